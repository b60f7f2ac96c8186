#include <doctest.h>

#include <random>

#include "windroute/errors.hpp"
#include "windroute/wind.hpp"

using namespace windroute;

TEST_CASE("wind triangle: calm, tailwind, crosswind, infeasible")
{
    CHECK(predict_ground_speed({0, 0}, 123.0, 250.0) == 250.0);
    // 50 kt blowing toward the east, track east.
    CHECK(predict_ground_speed({50, 0}, 90.0, 250.0) == 300.0);
    // 70 kt blowing toward the north, track east: sqrt(250^2 - 70^2) = 240.
    CHECK(predict_ground_speed({0, 70}, 90.0, 250.0) == 240.0);
    CHECK_THROWS_AS(predict_ground_speed({0, 250}, 90.0, 250.0), InfeasibleTrackError);
    CHECK_THROWS_AS(predict_ground_speed({0, -300}, 90.0, 250.0), InfeasibleTrackError);
}

TEST_CASE("wind triangle: bounds and monotonicity")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> comp(-200, 200), trk(0, 360);
    for (int i = 0; i < 500; ++i) {
        const WindVector w{comp(rng), comp(rng)};
        const double track = trk(rng);
        const auto [along, cross] = track_components(w, track);
        if (std::abs(cross) >= 250.0 || w.speed() >= 250.0) continue;
        const double gs = predict_ground_speed(w, track, 250.0);
        CHECK(gs >= 250.0 - w.speed() - 1e-9);
        CHECK(gs <= 250.0 + w.speed() + 1e-9);
        // more along-track wind at fixed crosswind -> faster
        const double th = deg2rad(track);
        const WindVector more{w.u_kt + std::sin(th), w.v_kt + std::cos(th)};
        CHECK(predict_ground_speed(more, track, 250.0) > gs);
    }
}

TEST_CASE("direction convention")
{
    const WindVector west = WindVector::from_direction(270.0, 50.0);
    CHECK(west.u_kt == doctest::Approx(50.0));
    CHECK(std::abs(west.v_kt) < 1e-12);
    const WindVector w = WindVector::from_direction(310.0, 27.0);
    CHECK(w.u_kt == doctest::Approx(20.68).epsilon(0.01 / 20.68));
    CHECK(w.v_kt == doctest::Approx(-17.36).epsilon(0.01 / 17.36));
    CHECK(w.speed() == doctest::Approx(27.0).epsilon(1e-12));
    CHECK(w.direction_from_deg() == doctest::Approx(310.0));
}

TEST_CASE("report and hyperparameter validation")
{
    const GeoPoint p{45, -120, 30000};
    CHECK_THROWS_AS(AircraftReport::make(p, {300, 0}, 0.0, "A"), InputError);
    CHECK_THROWS_AS(AircraftReport::make(p, {300, 0}, 700.0, "A"), InputError);
    CHECK_THROWS_AS(AircraftReport::make(p, {0, 0}, 450.0, "A"), InputError);
    CHECK_THROWS_AS(AircraftReport::make(p, {950, 0}, 450.0, "A"), InputError);
    CHECK_THROWS_AS(WindVector::make(600.0, 0.0), InputError);
    const auto r = AircraftReport::make(p, {300, 0}, 450.0, "A");
    CHECK(r.track_deg() == doctest::Approx(90.0));

    ModelHyperparams h;
    CHECK_NOTHROW(h.validate());
    h.jitter = 2e-4 * h.signal_sd_kt * h.signal_sd_kt;
    CHECK_THROWS_AS(h.validate(), ConfigError);
    h = ModelHyperparams{};
    h.aircraft_beta = 0.0;
    CHECK_THROWS_AS(h.validate(), ConfigError);
}
