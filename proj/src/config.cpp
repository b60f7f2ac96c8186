#include "windroute/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "windroute/errors.hpp"

namespace windroute {

namespace fs = std::filesystem;

namespace {

using Section = std::map<std::string, std::string>;
using Sections = std::map<std::string, Section>;

std::string trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_double(const std::string& key, const std::string& v)
{
    double x = 0.0;
    const char* first = v.data();
    const char* last = first + v.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, x);
    if (v.empty() || ec != std::errc() || ptr != last || !std::isfinite(x)) {
        throw ConfigError(key + ": expected a number, got '" + v + "'");
    }
    return x;
}

long long to_integer(const std::string& key, const std::string& v)
{
    long long x = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
        throw ConfigError(key + ": expected an integer, got '" + v + "'");
    }
    return x;
}

bool to_bool(const std::string& key, const std::string& v)
{
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(key + ": expected true/false, got '" + v + "'");
}

/// Binds the keys of one section to setters; unknown keys are errors.
class Binder {
public:
    Binder(std::string section, const Section* values) : section_(std::move(section)), values_(values) {}

    void real(const char* key, double& target) { bind(key, [&target](const std::string& k, const std::string& v) { target = to_double(k, v); }); }
    void integer(const char* key, int& target)
    {
        bind(key, [&target](const std::string& k, const std::string& v) {
            const long long x = to_integer(k, v);
            if (x < -1000000000LL || x > 1000000000LL) throw ConfigError(k + ": out of range");
            target = static_cast<int>(x);
        });
    }
    void size(const char* key, std::size_t& target)
    {
        bind(key, [&target](const std::string& k, const std::string& v) {
            const long long x = to_integer(k, v);
            if (x < 0) throw ConfigError(k + ": must be >= 0");
            target = static_cast<std::size_t>(x);
        });
    }
    void boolean(const char* key, bool& target) { bind(key, [&target](const std::string& k, const std::string& v) { target = to_bool(k, v); }); }
    void text(const char* key, std::string& target) { bind(key, [&target](const std::string&, const std::string& v) { target = v; }); }
    void path(const char* key, fs::path& target) { bind(key, [&target](const std::string&, const std::string& v) { target = v; }); }
    void custom(const char* key, std::function<void(const std::string&, const std::string&)> f) { bind(key, std::move(f)); }

    /// Applies the bound keys and rejects the rest.
    void finish() const
    {
        if (!values_) return;
        for (const auto& [k, v] : *values_) {
            const auto it = setters_.find(k);
            const std::string full = section_ + "." + k;
            if (it == setters_.end()) throw ConfigError("unknown configuration key '" + full + "'");
            it->second(full, v);
        }
    }

private:
    void bind(const char* key, std::function<void(const std::string&, const std::string&)> f) { setters_.emplace(key, std::move(f)); }

    std::string section_;
    const Section* values_;
    std::map<std::string, std::function<void(const std::string&, const std::string&)>> setters_;
};

Sections read_sections(std::string_view text)
{
    boost::property_tree::ptree tree;
    std::istringstream in{std::string(text)};
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(std::string("configuration file: ") + e.message() + " at line " + std::to_string(e.line()));
    }
    Sections out;
    for (const auto& [name, section] : tree) {
        if (section.empty() && !section.data().empty()) {
            throw ConfigError("configuration key '" + name + "' must appear inside a [section]");
        }
        for (const auto& [key, value] : section) out[name][key] = trim(value.data());
    }
    return out;
}

void apply_override(Sections& sections, const std::string& item)
{
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + item + "' must look like section.key=value");
    const std::string lhs = trim(std::string_view(item).substr(0, eq));
    const auto dot = lhs.rfind('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == lhs.size()) {
        throw ConfigError("override '" + item + "' must name section.key");
    }
    sections[lhs.substr(0, dot)][lhs.substr(dot + 1)] = trim(std::string_view(item).substr(eq + 1));
}

const Section* find(const Sections& s, const std::string& name)
{
    const auto it = s.find(name);
    return it == s.end() ? nullptr : &it->second;
}

} // namespace

RunConfig parse_run_config(std::string_view ini_text, const std::vector<std::string>& overrides, const fs::path& base_dir)
{
    Sections sections = read_sections(ini_text);
    for (const auto& o : overrides) apply_override(sections, o);

    RunConfig cfg;
    cfg.base_dir = base_dir;
    cfg.routes.emplace("sc-ut", sc_to_ut_route());
    cfg.routes.emplace("sea-mia", seattle_to_miami_route());

    static const std::set<std::string> known{"model",  "fusion", "library", "planner", "world",
                                             "experiment", "io", "grid", "loo"};
    for (const auto& [name, values] : sections) {
        if (known.count(name)) continue;
        if (name.rfind("route.", 0) == 0 && name.size() > 6) {
            const std::string rname = name.substr(6);
            double v[4] = {0, 0, 0, 0};
            bool seen[4] = {false, false, false, false};
            static const char* keys[4] = {"start_lat_deg", "start_lon_deg", "goal_lat_deg", "goal_lon_deg"};
            for (const auto& [k, val] : values) {
                int idx = -1;
                for (int i = 0; i < 4; ++i) {
                    if (k == keys[i]) idx = i;
                }
                if (idx < 0) throw ConfigError("unknown configuration key '" + name + "." + k + "'");
                v[idx] = to_double(name + "." + k, val);
                seen[idx] = true;
            }
            for (int i = 0; i < 4; ++i) {
                if (!seen[i]) throw ConfigError("missing configuration key '" + name + "." + keys[i] + "'");
            }
            try {
                cfg.routes[rname] = Route{rname, GeoPoint::make(v[0], v[1]), GeoPoint::make(v[2], v[3])};
            } catch (const InputError& e) {
                throw ConfigError(name + ": " + e.what());
            }
            continue;
        }
        throw ConfigError("unknown configuration section '[" + name + "]'");
    }

    {
        Binder b("model", find(sections, "model"));
        b.real("lengthscale_h_nm", cfg.model.lengthscale_h_nm);
        b.real("lengthscale_v_ft", cfg.model.lengthscale_v_ft);
        b.real("signal_sd_kt", cfg.model.signal_sd_kt);
        b.real("station_noise_sd_kt", cfg.model.station_noise_sd_kt);
        b.real("aircraft_beta", cfg.model.aircraft_beta);
        b.real("jitter", cfg.model.jitter);
        b.finish();
    }
    {
        Binder b("fusion", find(sections, "fusion"));
        b.real("tol", cfg.fusion.tol);
        b.integer("max_newton_iterations", cfg.fusion.max_newton_iterations);
        b.integer("fallback_gradient_steps", cfg.fusion.fallback_gradient_steps);
        b.integer("extra_starts", cfg.fusion.extra_starts);
        b.boolean("full_covariance", cfg.fusion.full_covariance);
        b.boolean("include_observation_noise", cfg.fusion.include_observation_noise);
        b.finish();
    }
    {
        Binder b("library", find(sections, "library"));
        b.integer("count", cfg.sim.library.count);
        b.real("arc_length_nm", cfg.sim.library.arc_length_nm);
        b.real("fan_halfwidth_deg", cfg.sim.library.fan_halfwidth_deg);
        b.integer("segments", cfg.sim.library.segments);
        b.finish();
    }
    {
        auto& p = cfg.sim.planner;
        Binder b("planner", find(sections, "planner"));
        b.real("airspeed_kt", p.airspeed_kt);
        b.real("goal_radius_nm", p.goal_radius_nm);
        b.integer("replan_segment_count", p.replan_segment_count);
        b.real("ucb_delta", p.ucb_delta);
        b.custom("beta_t", [&p](const std::string& k, const std::string& v) {
            if (v.empty() || v == "schedule") {
                p.beta_t_override.reset();
            } else {
                p.beta_t_override = to_double(k, v);
            }
        });
        b.real("observation_spacing_nm", p.observation_spacing_nm);
        b.real("observation_noise_sd_kt", p.observation_noise_sd_kt);
        b.real("sensitivity_step_kt", p.sensitivity_step_kt);
        b.real("cruise_alt_ft", cfg.sim.cruise_alt_ft);
        b.real("gcr_step_nm", cfg.sim.gcr_step_nm);
        b.real("timeout_factor", cfg.sim.timeout_factor);
        b.finish();
    }
    {
        auto& w = cfg.world;
        Binder b("world", find(sections, "world"));
        b.text("truth", cfg.world_truth);
        b.real("uniform_u_kt", w.uniform.u_kt);
        b.real("uniform_v_kt", w.uniform.v_kt);
        b.real("jet_core_kt", w.jet_core_kt);
        b.real("jet_width_nm", w.jet_width_nm);
        b.real("perturbation_sd_kt", w.perturbation_sd_kt);
        b.real("perturbation_length_nm", w.perturbation_length_nm);
        b.real("perturbation_spacing_nm", w.perturbation_spacing_nm);
        b.real("station_spacing_nm", w.station_spacing_nm);
        b.real("station_noise_sd_kt", w.station_noise_sd_kt);
        b.real("forecast_error_sd_kt", w.forecast_error_sd_kt);
        b.real("margin_nm", w.margin_nm);
        b.finish();
    }
    {
        auto& e = cfg.experiment;
        Binder b("experiment", find(sections, "experiment"));
        b.size("repetitions", e.options.repetitions);
        b.custom("seed", [&e](const std::string& k, const std::string& v) {
            const long long x = to_integer(k, v);
            if (x < 0) throw ConfigError(k + ": must be >= 0");
            e.options.base_seed = static_cast<std::uint64_t>(x);
        });
        b.custom("threads", [&e](const std::string& k, const std::string& v) {
            const long long x = to_integer(k, v);
            if (x < 0 || x > 1024) throw ConfigError(k + ": must be in [0, 1024]");
            e.options.threads = static_cast<unsigned>(x);
        });
        b.custom("policies", [&e](const std::string&, const std::string& v) {
            e.policies.clear();
            for (const auto& item : split_list(v)) e.policies.push_back(parse_policy(item));
        });
        b.custom("routes", [&e](const std::string&, const std::string& v) { e.routes = split_list(v); });
        b.boolean("write_flights", e.write_flights);
        b.finish();
    }
    {
        Binder b("io", find(sections, "io"));
        b.path("bulletin", cfg.io.bulletin);
        b.path("stations", cfg.io.stations);
        b.path("aircraft", cfg.io.aircraft);
        b.integer("level_ft", cfg.io.level_ft);
        b.path("output_dir", cfg.io.output_dir);
        b.boolean("skip_invalid_rows", cfg.io.skip_invalid_rows);
        b.finish();
    }
    {
        bool alt_set = false;
        Binder b("grid", find(sections, "grid"));
        b.real("lat_min_deg", cfg.grid.lat_min_deg);
        b.real("lat_max_deg", cfg.grid.lat_max_deg);
        b.real("lon_min_deg", cfg.grid.lon_min_deg);
        b.real("lon_max_deg", cfg.grid.lon_max_deg);
        b.integer("nlat", cfg.grid.nlat);
        b.integer("nlon", cfg.grid.nlon);
        b.custom("alt_ft", [&](const std::string& k, const std::string& v) {
            cfg.grid.alt_ft = to_double(k, v);
            alt_set = true;
        });
        b.finish();
        if (!alt_set) cfg.grid.alt_ft = cfg.io.level_ft;
    }
    {
        Binder b("loo", find(sections, "loo"));
        b.custom("methods", [&cfg](const std::string& k, const std::string& v) {
            cfg.loo_methods.clear();
            try {
                for (const auto& item : split_list(v)) cfg.loo_methods.push_back(parse_loo_method(item));
            } catch (const ConfigError& e) {
                throw ConfigError(k + ": " + e.what());
            }
        });
        b.finish();
    }
    // The planner's GP uses the same hyperparameters as fusion.
    cfg.sim.model = cfg.model;
    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const fs::path& path, const std::vector<std::string>& overrides)
{
    if (path.empty()) return parse_run_config("", overrides, ".");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read configuration file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
    try {
        return parse_run_config(ss.str(), overrides, dir);
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

void RunConfig::validate() const
{
    model.validate();
    sim.validate();
    world.validate();
    grid.validate();
    if (!(fusion.tol > 0.0)) throw ConfigError("fusion.tol must be > 0");
    if (fusion.max_newton_iterations < 1) throw ConfigError("fusion.max_newton_iterations must be >= 1");
    if (fusion.fallback_gradient_steps < 0) throw ConfigError("fusion.fallback_gradient_steps must be >= 0");
    if (fusion.extra_starts < 0) throw ConfigError("fusion.extra_starts must be >= 0");
    if (world_truth != "synthetic" && world_truth != "bulletin") {
        throw ConfigError("world.truth must be 'synthetic' or 'bulletin'");
    }
    if (experiment.options.repetitions < 1) throw ConfigError("experiment.repetitions must be >= 1");
    if (experiment.policies.empty()) throw ConfigError("experiment.policies must name at least one policy");
    if (experiment.routes.empty()) throw ConfigError("experiment.routes must name at least one route");
    for (const auto& r : experiment.routes) {
        if (!routes.count(r)) throw ConfigError("experiment.routes: unknown route '" + r + "'");
        const Route& route = routes.at(r);
        if (great_circle_distance_nm(route.start, route.goal) <= sim.planner.goal_radius_nm) {
            throw ConfigError("route '" + r + "': start lies within the goal radius");
        }
    }
    if (io.level_ft < 0 || io.level_ft > 60000) throw ConfigError("io.level_ft must be in [0, 60000]");
    if (loo_methods.empty()) throw ConfigError("loo.methods must name at least one method");
}

fs::path RunConfig::resolve(const fs::path& p) const { return p.is_absolute() ? p : base_dir / p; }

std::vector<Route> RunConfig::selected_routes() const
{
    std::vector<Route> out;
    for (const auto& r : experiment.routes) out.push_back(routes.at(r));
    return out;
}

void require_file(const RunConfig& cfg, const fs::path& p, const char* key)
{
    if (p.empty()) throw ConfigError(std::string(key) + " is required");
    const fs::path full = cfg.resolve(p);
    if (!fs::is_regular_file(full)) throw ConfigError(std::string(key) + ": file '" + full.string() + "' does not exist");
}

} // namespace windroute
