#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "windroute/config.hpp"
#include "windroute/errors.hpp"
#include "windroute/fb.hpp"
#include "windroute/gp.hpp"
#include "windroute/reports.hpp"
#include "windroute/synthetic.hpp"

namespace fs = std::filesystem;
using namespace windroute;

namespace {

enum ExitCode { kOk = 0, kOther = 1, kConfig = 2, kParse = 3, kNumerical = 4, kSimulation = 5 };

std::string read_text(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ConfigError("cannot read '" + p.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Prefixes parse errors with the file they came from.
template <class F>
auto with_file(const fs::path& p, F&& f)
{
    try {
        return f();
    } catch (const FormatError& e) {
        throw FormatError(p.string() + ": " + e.what(), e.line(), e.offset());
    } catch (const ParseError& e) {
        throw ParseError(p.string() + ": " + e.what(), e.line(), e.offset());
    }
}

std::vector<StationObservation> load_stations(const RunConfig& cfg)
{
    require_file(cfg, cfg.io.bulletin, "io.bulletin");
    require_file(cfg, cfg.io.stations, "io.stations");
    const fs::path bpath = cfg.resolve(cfg.io.bulletin);
    const fs::path spath = cfg.resolve(cfg.io.stations);
    const auto bulletin = with_file(bpath, [&] { return parse_fb_bulletin(read_text(bpath)); });
    const auto directory = with_file(spath, [&] {
        std::ifstream in(spath, std::ios::binary);
        return parse_station_directory(in);
    });
    auto set = fb_to_station_observations(bulletin, directory, cfg.io.level_ft);
    for (const auto& w : set.warnings) std::cerr << "warning: " << w << "\n";
    if (set.observations.empty()) throw InputError("no station winds at " + std::to_string(cfg.io.level_ft) + " ft");
    return set.observations;
}

std::vector<AircraftReport> load_aircraft(const RunConfig& cfg, bool required)
{
    if (cfg.io.aircraft.empty() && !required) return {};
    require_file(cfg, cfg.io.aircraft, "io.aircraft");
    const fs::path apath = cfg.resolve(cfg.io.aircraft);
    const auto table = with_file(apath, [&] {
        std::ifstream in(apath, std::ios::binary);
        return parse_aircraft_csv(in, CsvOptions{cfg.io.skip_invalid_rows});
    });
    for (const auto& r : table.rejected) std::cerr << "warning: " << apath.string() << ": " << r.message << "\n";
    return table.reports();
}

fs::path output_dir(const RunConfig& cfg) { return cfg.resolve(cfg.io.output_dir); }

int cmd_fuse(const RunConfig& cfg, const std::string& method)
{
    const auto stations = load_stations(cfg);
    const auto nodes = cfg.grid.nodes();
    WindPosterior post;
    if (method == "gpr") {
        post = gp_regress(stations, nodes, cfg.model);
    } else if (method == "laplace") {
        const auto aircraft = load_aircraft(cfg, false);
        post = laplace_fuse(stations, aircraft, nodes, cfg.model, cfg.fusion);
    } else {
        throw ConfigError("fuse: unknown method '" + method + "' (expected laplace or gpr)");
    }
    const fs::path dir = output_dir(cfg);
    write_file_atomic(dir / "grid.csv", grid_csv(post, method));
    write_file_atomic(dir / "grid.geojson", grid_geojson(post, method));
    std::cout << "wrote " << post.size() << " grid nodes (" << method << ") to " << (dir / "grid.csv").string()
              << "\n";
    return kOk;
}

int cmd_loo(const RunConfig& cfg)
{
    const auto stations = load_stations(cfg);
    const auto aircraft = load_aircraft(cfg, true);
    std::vector<LooResult> results;
    for (const LooMethod m : cfg.loo_methods) {
        results.push_back(loo_ground_speed_rmse(aircraft, stations, m, cfg.model, cfg.fusion));
    }
    const std::string csv = loo_csv(results);
    write_file_atomic(output_dir(cfg) / "loo.csv", csv);
    std::cout << csv;
    return kOk;
}

int cmd_simulate(const RunConfig& cfg)
{
    RunConfig run = cfg;
    if (cfg.world_truth == "bulletin") {
        run.world.bulletin = load_stations(cfg);
        run.world.bulletin_model = cfg.model;
    }
    const fs::path dir = output_dir(cfg);
    FlightCallback on_flight;
    if (cfg.experiment.write_flights) {
        on_flight = [&dir](const RunRecord& rec, const FlightLog& log) {
            const std::string stem = rec.route + "_" + rec.slot + "_" + to_string(rec.policy);
            write_file_atomic(dir / "flights" / (stem + ".jsonl"), flight_log_records(log, rec));
            write_file_atomic(dir / "flights" / (stem + ".geojson"), flight_log_geojson(log, rec));
        };
    }
    const ExperimentReport report =
        run_experiment(run.selected_routes(), run.world, run.experiment.policies, run.experiment.options, run.sim,
                       on_flight);
    write_file_atomic(dir / "report.csv", report_csv(report));
    write_file_atomic(dir / "runs.csv", runs_csv(report));
    std::cout << report_csv(report);
    std::size_t failures = 0;
    for (const auto& r : report.runs) {
        if (!r.ok) {
            ++failures;
            std::cerr << "error: " << r.route << " " << r.slot << " " << to_string(r.policy) << ": " << r.error
                      << "\n";
        }
    }
    return failures == 0 ? kOk : kSimulation;
}

struct SyntheticArgs {
    std::uint64_t seed = 1;
    int stations = 10;
    int aircraft = 30;
    double noise_kt = 5.0;
    bool colocated = false;
};

int cmd_gen_synthetic(const RunConfig& cfg, const SyntheticArgs& args)
{
    SyntheticWorldSpec spec;
    spec.station_count = args.stations;
    spec.aircraft_count = args.aircraft;
    spec.noise_sd_kt = args.noise_kt;
    spec.colocated = args.colocated;
    spec.field = cfg.model;
    spec.center.alt_ft = cfg.io.level_ft;
    const SyntheticWorld world = make_synthetic_world(spec, args.seed);
    const SyntheticFiles files = render_synthetic_world(world, cfg.io.level_ft);
    const fs::path dir = output_dir(cfg);
    write_file_atomic(dir / "bulletin.txt", files.bulletin);
    write_file_atomic(dir / "stations.csv", files.stations_csv);
    write_file_atomic(dir / "aircraft.csv", files.aircraft_csv);
    std::cout << "wrote bulletin.txt, stations.csv, aircraft.csv to " << dir.string() << "\n";
    return kOk;
}

int exit_code_for(const Error& e)
{
    switch (e.kind()) {
    case ErrorKind::Config: return kConfig;
    case ErrorKind::Parse: return kParse;
    case ErrorKind::Numerical: return kNumerical;
    case ErrorKind::Simulation: return kSimulation;
    case ErrorKind::Input: return kOther;
    }
    return kOther;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Wind-field fusion and wind-aware route planning"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    app.add_option("-c,--config", config_path, "INI configuration file");
    app.add_option("--set", overrides, "Override a configuration key: section.key=value (repeatable)");

    // Flags shared by the data subcommands; each maps onto an io.* key.
    std::string bulletin, stations, aircraft, out_dir;
    int level = 0;
    auto add_io = [&](CLI::App* sub, bool with_aircraft) {
        sub->add_option("--bulletin", bulletin, "Winds-aloft bulletin (FB format)");
        sub->add_option("--stations", stations, "Station directory CSV (code,lat_deg,lon_deg)");
        if (with_aircraft) sub->add_option("--aircraft", aircraft, "Aircraft report CSV");
        sub->add_option("--level", level, "Flight level in feet");
        sub->add_option("-o,--out", out_dir, "Output directory");
    };

    auto* fuse = app.add_subcommand("fuse", "Write a gridded posterior wind map");
    add_io(fuse, true);
    std::string fuse_method = "laplace";
    fuse->add_option("--method", fuse_method, "laplace (stations + aircraft) or gpr (stations only)")
        ->check(CLI::IsMember({"laplace", "gpr"}));

    auto* loo = app.add_subcommand("loo", "Leave-one-aircraft-out ground-speed RMSE");
    add_io(loo, true);
    std::vector<std::string> loo_methods;
    loo->add_option("--method", loo_methods, "nearest-neighbor, gpr or laplace (repeatable; default all)");

    auto* simulate = app.add_subcommand("simulate", "Run the routing experiment");
    simulate->add_option("-o,--out", out_dir, "Output directory");
    std::string seed, repetitions;
    simulate->add_option("--seed", seed, "Base seed (experiment.seed)");
    simulate->add_option("--repetitions", repetitions, "Repetitions per route (experiment.repetitions)");

    auto* gen = app.add_subcommand("gen-synthetic", "Write a seeded synthetic bulletin, directory and aircraft table");
    SyntheticArgs synth;
    gen->add_option("--seed", synth.seed, "World seed");
    gen->add_option("--station-count", synth.stations, "Number of stations")->check(CLI::Range(1, 17576));
    gen->add_option("--aircraft-count", synth.aircraft, "Number of aircraft")->check(CLI::Range(0, 100000));
    gen->add_option("--noise", synth.noise_kt, "Observation noise sd, kt")->check(CLI::NonNegativeNumber);
    gen->add_flag("--colocated", synth.colocated, "Place aircraft at station sites");
    gen->add_option("--level", level, "Flight level in feet");
    gen->add_option("-o,--out", out_dir, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (!bulletin.empty()) overrides.push_back("io.bulletin=" + fs::absolute(bulletin).string());
        if (!stations.empty()) overrides.push_back("io.stations=" + fs::absolute(stations).string());
        if (!aircraft.empty()) overrides.push_back("io.aircraft=" + fs::absolute(aircraft).string());
        if (!out_dir.empty()) overrides.push_back("io.output_dir=" + fs::absolute(out_dir).string());
        if (level != 0) overrides.push_back("io.level_ft=" + std::to_string(level));
        if (!seed.empty()) overrides.push_back("experiment.seed=" + seed);
        if (!repetitions.empty()) overrides.push_back("experiment.repetitions=" + repetitions);
        if (!loo_methods.empty()) {
            std::string joined;
            for (const auto& m : loo_methods) joined += (joined.empty() ? "" : ",") + m;
            overrides.push_back("loo.methods=" + joined);
        }

        const RunConfig cfg = load_run_config(config_path, overrides);
        if (fuse->parsed()) return cmd_fuse(cfg, fuse_method);
        if (loo->parsed()) return cmd_loo(cfg);
        if (simulate->parsed()) return cmd_simulate(cfg);
        if (gen->parsed()) return cmd_gen_synthetic(cfg, synth);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kOther;
    }
    return kOther;
}
