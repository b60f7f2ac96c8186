// Acceptance suite: prints one PASS/FAIL line per criterion with its runtime.
//
// Usage: windroute_acceptance [--report-only]
// Exits with the number of failed criteria unless --report-only is given.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "support.hpp"
#include "windroute/config.hpp"
#include "windroute/errors.hpp"
#include "windroute/fb.hpp"
#include "windroute/fusion.hpp"
#include "windroute/loo.hpp"
#include "windroute/synthetic.hpp"

using namespace windroute;
using namespace windroute::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// 1. laplace_fuse without aircraft reproduces gp_regress.
Outcome model_reduction()
{
    std::mt19937_64 rng(1001);
    ModelHyperparams h;
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        std::uniform_int_distribution<int> n(1, 12);
        const auto st = random_stations(rng, n(rng));
        std::vector<GeoPoint> qs;
        for (int i = 0; i < 30; ++i) qs.push_back(random_point(rng, 38, 50, -128, -112));
        const auto a = gp_regress(st, qs, h);
        const auto b = laplace_fuse(st, {}, qs, h);
        for (std::size_t i = 0; i < qs.size(); ++i) {
            worst = std::max({worst, std::abs(a.mean[i].u_kt - b.mean[i].u_kt), std::abs(a.mean[i].v_kt - b.mean[i].v_kt),
                              std::abs(a.sd[i].u_kt - b.sd[i].u_kt), std::abs(a.sd[i].v_kt - b.sd[i].v_kt)});
        }
    }
    return {worst <= 1e-8, fmt("max |delta| = %.3g kt over 20 scenarios", worst)};
}

// 2. Analytic gradient vs central differences.
Outcome gradient_check()
{
    std::mt19937_64 rng(1002);
    ModelHyperparams h;
    const auto st = random_stations(rng, 5);
    std::vector<AircraftReport> ac;
    for (int j = 0; j < 3; ++j) {
        ac.push_back(random_aircraft(rng, random_point(rng, 40, 48, -125, -115), random_wind(rng, 30), 5.0,
                                     "A" + std::to_string(j)));
    }
    const FusionProblem prob(st, ac, h);
    std::normal_distribution<double> n(0.0, 40.0);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        Eigen::VectorXd z(static_cast<Eigen::Index>(prob.latent_size()));
        for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = n(rng);
        const Eigen::VectorXd g = prob.gradient(z);
        Eigen::VectorXd fd(z.size());
        for (Eigen::Index i = 0; i < z.size(); ++i) {
            Eigen::VectorXd zp = z, zm = z;
            zp(i) += 1e-5;
            zm(i) -= 1e-5;
            fd(i) = (neg_log_posterior(prob, zp) - neg_log_posterior(prob, zm)) / 2e-5;
        }
        worst = std::max(worst, (g - fd).norm() / g.norm());
    }
    return {worst < 1e-4, fmt("max relative error %.3g at 50 points", worst)};
}

// 3. Laplace mode vs a 41x41 grid MAP (1 kt cells) on the one-station/one-aircraft toy.
Outcome brute_force_mode()
{
    ModelHyperparams h;
    int hits = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        std::mt19937_64 rng(2000 + seed);
        const GeoPoint s = random_point(rng, 44, 46, -121, -119);
        std::uniform_real_distribution<double> brg(0, 360), dist(20, 200);
        const GeoPoint p = project_nm(s, brg(rng), dist(rng));
        const WindVector w = random_wind(rng, 30);
        const StationObservation st[] = {{s, w + random_wind(rng, 5)}};
        const AircraftReport ac[] = {random_aircraft(rng, p, w, 5.0, "A")};
        const LaplaceFit fit(st, ac, h);
        const WindVector t = fit.aircraft_wind(0);
        const WindVector c = fit.problem().station_gp_mean()[fit.problem().aircraft_site(0)];
        double best = 1e300;
        WindVector arg;
        for (int i = -20; i <= 20; ++i) {
            for (int j = -20; j <= 20; ++j) {
                const WindVector cand{std::round(c.u_kt) + i, std::round(c.v_kt) + j};
                const double e = profile_energy(st[0], ac[0], cand, h);
                if (e < best) best = e, arg = cand;
            }
        }
        const double d = std::max(std::abs(t.u_kt - arg.u_kt), std::abs(t.v_kt - arg.v_kt));
        worst = std::max(worst, d);
        if (d <= 1.0) ++hits;
    }
    return {hits == 10, fmt("%d/10 seeds within one cell (max offset %.3f kt)", hits, worst)};
}

// 4. Wind-triangle exact values and infeasibility.
Outcome wind_triangle()
{
    const double tail = predict_ground_speed(WindVector::from_direction(270, 50), 90, 250);
    const double cross = predict_ground_speed(WindVector::from_direction(0, 70), 90, 250);
    bool threw = false;
    try {
        predict_ground_speed(WindVector::from_direction(0, 250), 90, 250);
    } catch (const InfeasibleTrackError&) {
        threw = true;
    }
    return {tail == 300.0 && cross == 240.0 && threw,
            fmt("tailwind %.12g kt, crosswind %.12g kt, infeasible %s", tail, cross, threw ? "raised" : "missing")};
}

// 5. LOO ground-speed RMSE ordering on seeded synthetic worlds.
Outcome loo_ordering()
{
    ModelHyperparams h;
    int ordered = 0;
    double nn = 0, gpr = 0, lap = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const SyntheticWorld w = make_synthetic_world(SyntheticWorldSpec{}, seed);
        const double a = loo_ground_speed_rmse(w.aircraft, w.stations, LooMethod::NearestNeighbor, h).rmse_kt;
        const double b = loo_ground_speed_rmse(w.aircraft, w.stations, LooMethod::Gpr, h).rmse_kt;
        const double c = loo_ground_speed_rmse(w.aircraft, w.stations, LooMethod::Laplace, h).rmse_kt;
        nn += a / 20, gpr += b / 20, lap += c / 20;
        if (c < b && b < a) ++ordered;
    }
    return {ordered >= 16,
            fmt("%d/20 ordered; mean RMSE laplace %.2f < gpr %.2f < nn %.2f kt", ordered, lap, gpr, nn)};
}

// 6. Policy ordering on the shipped strong-headwind scenario.
Outcome policy_ordering()
{
    const RunConfig cfg = load_run_config(fs::path(WINDROUTE_SOURCE_DIR) / "configs" / "headwind.ini");
    const auto report = run_experiment(cfg.selected_routes(), cfg.world, {Policy::Ucb, Policy::Mean, Policy::Gcr},
                                       cfg.experiment.options, cfg.sim);
    const auto* u = report.find("sc-ut", Policy::Ucb);
    const auto* m = report.find("sc-ut", Policy::Mean);
    const auto* g = report.find("sc-ut", Policy::Gcr);
    const bool complete = u->n == 20 && m->n == 20 && g->n == 20;
    const bool ucb_le_mean = u->mean_s <= m->mean_s;
    const bool mean_le_gcr = m->mean_s <= g->mean_s;
    const double ratio = g->mean_s / u->mean_s;
    std::string why;
    if (!ucb_le_mean) why = " [ucb > mean]";
    if (!mean_le_gcr) why += " [mean > gcr]";
    if (ratio < 1.2) why += " [gcr/ucb < 1.2]";
    return {complete && ucb_le_mean && mean_le_gcr && ratio >= 1.2,
            fmt("ucb %.0f s, mean %.0f s, gcr %.0f s, gcr/ucb %.3f, n=%zu/%zu/%zu%s", u->mean_s, m->mean_s, g->mean_s,
                ratio, u->n, m->n, g->n, why.c_str())};
}

// 7. Calm-air calibration on both routes.
Outcome calm_calibration()
{
    const auto report = run_experiment({sc_to_ut_route(), seattle_to_miami_route()}, WorldRecipe{},
                                       {Policy::Ucb, Policy::Mean, Policy::Gcr}, {}, SimConfig{});
    double worst = 0.0;
    std::string detail;
    for (const Route& r : {sc_to_ut_route(), seattle_to_miami_route()}) {
        const double d = great_circle_distance_nm(r.start, r.goal);
        const double expect = d / 250.0 * 3600.0;
        for (Policy p : {Policy::Ucb, Policy::Mean, Policy::Gcr}) {
            const auto* c = report.find(r.name, p);
            worst = std::max(worst, c->n == 1 ? std::abs(c->mean_s / expect - 1.0) : 1.0);
        }
        detail += fmt("%s %.0f nm -> %.0f s; ", r.name.c_str(), d, expect);
    }
    return {worst <= 0.02, detail + fmt("max deviation %.4f%%", 100 * worst)};
}

// 8. "mean" flights are UCB flights with zero exploration.
Outcome mean_is_ucb_beta0()
{
    const RunConfig cfg = load_run_config(fs::path(WINDROUTE_SOURCE_DIR) / "configs" / "headwind.ini");
    SimConfig zero = cfg.sim;
    zero.planner.beta_t_override = 0.0;
    const Route r = sc_to_ut_route();
    int same = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto truth = make_truth(cfg.world, r, seed);
        const auto st = make_prior_stations(cfg.world, r, truth, cfg.sim.cruise_alt_ft, seed + 100);
        const auto a = simulate_flight(Policy::Mean, r.start, r.goal, truth, st, cfg.sim, seed);
        const auto b = simulate_flight(Policy::Ucb, r.start, r.goal, truth, st, zero, seed);
        bool eq = a.choices == b.choices && a.total_time_s == b.total_time_s &&
                  a.waypoints.size() == b.waypoints.size() && a.observations.size() == b.observations.size();
        for (std::size_t i = 0; eq && i < a.waypoints.size(); ++i) {
            const auto& pa = a.waypoints[i].position;
            const auto& pb = b.waypoints[i].position;
            eq = pa.lat_deg == pb.lat_deg && pa.lon_deg == pb.lon_deg && a.waypoints[i].elapsed_s == b.waypoints[i].elapsed_s;
        }
        if (eq) ++same;
    }
    return {same == 5, fmt("%d/5 worlds with identical logs", same)};
}

// 9. FB decoding rules and the group round trip.
Outcome fb_decoder()
{
    const FbEntry a = decode_fb_group("3127+05");
    const FbEntry b = decode_fb_group("9900");
    const FbEntry c = decode_fb_group("7545-10");
    bool ok = a.direction_from_deg == 310 && a.speed_kt == 27 && a.temp_c == 5 && b.kind == FbKind::Calm &&
              c.direction_from_deg == 250 && c.speed_kt == 145 && c.temp_c == -10;
    int groups = 0;
    for (int dir = 0; dir < 360; dir += 10) {
        for (int speed = 0; speed <= 199; ++speed) {
            const FbEntry e = decode_fb_group(encode_fb_group(dir, speed));
            ok = ok && e.direction_from_deg == dir && e.speed_kt == speed;
            ++groups;
        }
    }
    return {ok, fmt("documented groups bit-exact; %d groups round-tripped", groups)};
}

int run_cli(const std::string& args)
{
    const std::string cmd = std::string("\"") + WINDROUTE_CLI + "\" " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// 10. Repeated simulate runs give byte-identical reports.
Outcome determinism()
{
    const fs::path work = fs::temp_directory_path() / "windroute_acceptance";
    fs::remove_all(work);
    const std::string cfg = (fs::path(WINDROUTE_SOURCE_DIR) / "configs" / "headwind.ini").string();
    const int a = run_cli("-c " + cfg + " simulate --seed 7 --repetitions 3 -o " + (work / "a").string());
    const int b = run_cli("-c " + cfg + " simulate --seed 7 --repetitions 3 -o " + (work / "b").string());
    const std::string ra = slurp(work / "a" / "report.csv");
    const bool same = a == 0 && b == 0 && !ra.empty() && ra == slurp(work / "b" / "report.csv") &&
                      slurp(work / "a" / "runs.csv") == slurp(work / "b" / "runs.csv");
    fs::remove_all(work);
    return {same, fmt("exit codes %d/%d, report.csv and runs.csv %s", a, b, same ? "identical" : "differ")};
}

} // namespace

int main(int argc, char** argv)
{
    const bool report_only = argc > 1 && std::string(argv[1]) == "--report-only";
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"model reduction (no aircraft == gpr)", model_reduction},
        {"gradient vs finite differences", gradient_check},
        {"laplace mode vs brute-force grid", brute_force_mode},
        {"wind-triangle exactness", wind_triangle},
        {"loo rmse ordering", loo_ordering},
        {"policy ordering (headwind)", policy_ordering},
        {"calm-world calibration", calm_calibration},
        {"mean == ucb(beta=0)", mean_is_ucb_beta0},
        {"fb decoder", fb_decoder},
        {"simulate determinism", determinism},
    };
    int failures = 0;
    int index = 0;
    for (const auto& [name, check] : criteria) {
        ++index;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!o.pass) ++failures;
        std::printf("%-4s %2d %-40s %7.2f s  %s\n", o.pass ? "PASS" : "FAIL", index, name, secs, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", index - failures, std::size(criteria));
    return report_only ? 0 : failures;
}
