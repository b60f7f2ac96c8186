#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "windroute/experiment.hpp"
#include "windroute/fusion.hpp"
#include "windroute/loo.hpp"
#include "windroute/output.hpp"

namespace windroute {

struct IoConfig {
    std::filesystem::path bulletin;
    std::filesystem::path stations;
    std::filesystem::path aircraft;
    int level_ft = 30000;
    std::filesystem::path output_dir = "out";
    bool skip_invalid_rows = false;
};

struct ExperimentConfig {
    ExperimentOptions options;
    std::vector<Policy> policies{Policy::Ucb, Policy::Mean, Policy::Gcr};
    std::vector<std::string> routes{"sc-ut"};
    /// Write per-flight waypoint records and GeoJSON.
    bool write_flights = true;
};

/// Every tunable of a run. Sections of the INI file map onto the members:
/// [model] [fusion] [library] [planner] [world] [experiment] [io] [grid]
/// [loo] and one [route.<name>] per extra route.
struct RunConfig {
    ModelHyperparams model;
    FuseOptions fusion;
    SimConfig sim;
    WorldRecipe world;
    /// "synthetic", or "bulletin" to add the GP mean of io.bulletin to the truth.
    std::string world_truth = "synthetic";
    ExperimentConfig experiment;
    std::map<std::string, Route> routes;
    IoConfig io;
    GridSpec grid;
    std::vector<LooMethod> loo_methods{LooMethod::NearestNeighbor, LooMethod::Gpr, LooMethod::Laplace};
    /// Directory relative paths are resolved against.
    std::filesystem::path base_dir = ".";

    /// Range-checks every value; throws ConfigError.
    void validate() const;
    std::filesystem::path resolve(const std::filesystem::path& p) const;
    std::vector<Route> selected_routes() const;
};

/// Parses INI text. Unknown sections or keys are errors. `overrides` are
/// "section.key=value" strings applied after the file (flags win).
RunConfig parse_run_config(std::string_view ini_text, const std::vector<std::string>& overrides = {},
                           const std::filesystem::path& base_dir = ".");

/// Reads `path` (when non-empty) and applies `overrides`; relative paths in
/// the file resolve against its directory.
RunConfig load_run_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

/// Throws ConfigError when a file named by `p` does not exist.
void require_file(const RunConfig& cfg, const std::filesystem::path& p, const char* key);

} // namespace windroute
