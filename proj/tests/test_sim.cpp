#include <doctest.h>

#include "windroute/errors.hpp"
#include "windroute/experiment.hpp"

using namespace windroute;

namespace {

double direct_time_s(const Route& r, double speed_kt)
{
    return great_circle_distance_nm(r.start, r.goal) / speed_kt * 3600.0;
}

void check_kinematics(const FlightLog& log, double airspeed_kt)
{
    REQUIRE(log.waypoints.size() == log.legs.size() + 1);
    double elapsed = 0.0;
    for (std::size_t i = 0; i < log.legs.size(); ++i) {
        const auto& leg = log.legs[i];
        CHECK(std::abs(leg.ground_speed_kt - predict_ground_speed(leg.wind, leg.course_deg, airspeed_kt)) < 1e-6);
        CHECK(leg.duration_s == doctest::Approx(leg.length_nm / leg.ground_speed_kt * 3600.0).epsilon(1e-12));
        elapsed += leg.duration_s;
        CHECK(log.waypoints[i + 1].elapsed_s > log.waypoints[i].elapsed_s);
        CHECK(log.waypoints[i + 1].elapsed_s == doctest::Approx(elapsed).epsilon(1e-12));
    }
    CHECK(log.total_time_s == doctest::Approx(elapsed).epsilon(1e-12));
}

} // namespace

TEST_CASE("sim: calm air costs distance over airspeed on both routes")
{
    SimConfig cfg;
    for (const Route& r : {sc_to_ut_route(), seattle_to_miami_route()}) {
        for (Policy p : {Policy::Ucb, Policy::Mean, Policy::Gcr}) {
            const auto log = simulate_flight(p, r.start, r.goal, GroundTruthWindField::calm(), {}, cfg, 1);
            CHECK(log.total_time_s == doctest::Approx(direct_time_s(r, 250)).epsilon(0.02));
            CHECK(great_circle_distance_nm(log.waypoints.back().position, r.goal) < 1e-6);
            check_kinematics(log, 250);
        }
    }
}

TEST_CASE("sim: route-aligned winds change the great-circle time exactly")
{
    SimConfig cfg;
    const Route r = sc_to_ut_route();
    const auto tail = GroundTruthWindField::jet(r.start, r.goal, 50, 0);
    CHECK(simulate_flight(Policy::Gcr, r.start, r.goal, tail, {}, cfg, 1).total_time_s ==
          doctest::Approx(direct_time_s(r, 300)).epsilon(1e-3));
    for (double w : {0.0, 50.0, 100.0}) {
        const auto head = GroundTruthWindField::jet(r.goal, r.start, w, 0);
        const auto log = simulate_flight(Policy::Gcr, r.start, r.goal, head, {}, cfg, 1);
        CHECK(log.total_time_s == doctest::Approx(direct_time_s(r, 250 - w)).epsilon(1e-3));
        check_kinematics(log, 250);
        CHECK(log.observations.empty());
    }
}

TEST_CASE("sim: planner flights observe, replan and are reproducible")
{
    SimConfig cfg;
    const Route r = sc_to_ut_route();
    WorldRecipe recipe;
    recipe.jet_core_kt = 120;
    recipe.perturbation_sd_kt = 15;
    const auto truth = make_truth(recipe, r, 3);
    const auto stations = make_prior_stations(recipe, r, truth, cfg.cruise_alt_ft, 4);

    const auto a = simulate_flight(Policy::Ucb, r.start, r.goal, truth, stations, cfg, 9);
    const auto b = simulate_flight(Policy::Ucb, r.start, r.goal, truth, stations, cfg, 9);
    CHECK(a.total_time_s == b.total_time_s);
    CHECK(a.choices == b.choices);
    CHECK(a.observations.size() == b.observations.size());
    CHECK(!a.choices.empty());
    CHECK(a.observations.size() > 10);
    check_kinematics(a, 250);
    CHECK(great_circle_distance_nm(a.waypoints.back().position, r.goal) < 1e-6);

    // "mean" is exactly UCB with a zero exploration weight.
    SimConfig zero = cfg;
    zero.planner.beta_t_override = 0.0;
    const auto m = simulate_flight(Policy::Mean, r.start, r.goal, truth, stations, cfg, 9);
    const auto u0 = simulate_flight(Policy::Ucb, r.start, r.goal, truth, stations, zero, 9);
    CHECK(m.choices == u0.choices);
    CHECK(m.total_time_s == u0.total_time_s);

    // The great-circle baseline ignores every planner knob.
    SimConfig other = cfg;
    other.library.count = 5;
    other.library.fan_halfwidth_deg = 20;
    other.planner.ucb_delta = 0.5;
    CHECK(simulate_flight(Policy::Gcr, r.start, r.goal, truth, stations, cfg, 1).total_time_s ==
          simulate_flight(Policy::Gcr, r.start, r.goal, truth, stations, other, 2).total_time_s);
}

TEST_CASE("sim: timeout, stuck and input errors")
{
    const Route r = sc_to_ut_route();
    SimConfig cfg;
    cfg.timeout_factor = 1.01;
    CHECK_THROWS_AS(simulate_flight(Policy::Gcr, r.start, r.goal, GroundTruthWindField::jet(r.goal, r.start, 100, 0),
                                    {}, cfg, 1),
                    SimulationTimeoutError);

    SimConfig slow;
    slow.planner.airspeed_kt = 100;
    const auto gale = GroundTruthWindField::uniform({0, -150});
    CHECK_THROWS_AS(simulate_flight(Policy::Gcr, r.start, r.goal, gale, {}, slow, 1), SimulationStuckError);
    CHECK_THROWS_AS(simulate_flight(Policy::Ucb, r.start, r.goal, gale, {}, slow, 1), SimulationError);

    SimConfig ok;
    CHECK_THROWS_AS(simulate_flight(Policy::Gcr, r.start, r.start, GroundTruthWindField::calm(), {}, ok, 1),
                    InputError);
    CHECK_THROWS_AS(simulate_flight(Policy::Gcr, r.start, project_nm(r.start, 10, 10), GroundTruthWindField::calm(),
                                    {}, ok, 1),
                    InputError);
    ok.library.count = 1;
    CHECK_THROWS_AS(simulate_flight(Policy::Gcr, r.start, r.goal, GroundTruthWindField::calm(), {}, ok, 1),
                    ConfigError);
}

TEST_CASE("policy names")
{
    CHECK(parse_policy("ucb") == Policy::Ucb);
    CHECK(parse_policy("gcr") == Policy::Gcr);
    CHECK(to_string(Policy::Mean) == "mean");
    CHECK_THROWS_AS(parse_policy("greedy"), ConfigError);
}
