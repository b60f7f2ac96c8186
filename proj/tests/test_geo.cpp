#include <doctest.h>

#include <random>

#include "windroute/errors.hpp"
#include "windroute/geo.hpp"

using namespace windroute;

TEST_CASE("distance: identity, one degree of longitude on the equator, symmetry")
{
    const GeoPoint p{12.3, -45.6, 0.0};
    CHECK(great_circle_distance_nm(p, p) == 0.0);
    const double one_deg = 2.0 * kPi * kEarthRadiusNm / 360.0;
    CHECK(great_circle_distance_nm({0, 0, 0}, {0, 1, 0}) == doctest::Approx(one_deg).epsilon(1e-12));
    CHECK(one_deg == doctest::Approx(60.04).epsilon(1e-4));

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> lat(-89, 89), lon(-180, 180);
    for (int i = 0; i < 200; ++i) {
        const GeoPoint a{lat(rng), lon(rng), 0}, b{lat(rng), lon(rng), 0}, c{lat(rng), lon(rng), 0};
        CHECK(great_circle_distance_nm(a, b) == great_circle_distance_nm(b, a));
        CHECK(great_circle_distance_nm(a, c) <=
              great_circle_distance_nm(a, b) + great_circle_distance_nm(b, c) + 1e-9);
    }
}

TEST_CASE("distance: Seattle to Miami is 2365 nm on the sphere")
{
    // Independent haversine evaluation gives 2364.94 nm; "2700" is statute miles.
    const double d = great_circle_distance_nm(GeoPoint::make(47.45, -122.31), GeoPoint::make(25.79, -80.29));
    CHECK(d == doctest::Approx(2364.94).epsilon(1e-4));
    CHECK(d * 1.150779 == doctest::Approx(2700.0).epsilon(0.02));
}

TEST_CASE("bearing: cardinal directions and a geodesic-walker oracle")
{
    CHECK(initial_bearing_deg({0, 0, 0}, {1, 0, 0}) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(initial_bearing_deg({0, 0, 0}, {0, 1, 0}) == doctest::Approx(90.0));
    CHECK_THROWS_AS(initial_bearing_deg({10, 10, 0}, {10, 10, 5000}), InputError);

    // Walk toward (1,1) in 1 nm steps re-aiming each step; the first step's
    // direction is the initial bearing to within the walker's resolution.
    const GeoPoint a{0, 0, 0}, b{1, 1, 0};
    const double theta = initial_bearing_deg(a, b);
    CHECK(theta > 0.0);
    CHECK(theta < 90.0);
    GeoPoint pos = a;
    double total = 0.0;
    const double d = great_circle_distance_nm(a, b);
    while (total + 1.0 < d) {
        pos = project_nm(pos, initial_bearing_deg(pos, b), 1.0);
        total += 1.0;
    }
    CHECK(great_circle_distance_nm(pos, b) == doctest::Approx(d - total).epsilon(1e-6));
    const GeoPoint first = project_nm(a, theta, 1.0);
    CHECK(great_circle_distance_nm(first, b) == doctest::Approx(d - 1.0).epsilon(1e-9));
}

TEST_CASE("project: zero distance, equator example, round trip")
{
    const GeoPoint p{33.0, 44.0, 1000.0};
    const GeoPoint q = project_nm(p, 123.0, 0.0);
    CHECK(q.lat_deg == p.lat_deg);
    CHECK(q.lon_deg == p.lon_deg);

    const GeoPoint e = project_nm({0, 0, 0}, 90.0, 2.0 * kPi * kEarthRadiusNm / 360.0);
    CHECK(std::abs(e.lat_deg) < 1e-6);
    CHECK(std::abs(e.lon_deg - 1.0) < 1e-6);

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> lat(-80, 80), lon(-180, 180), brg(0, 360), dist(0, 3000);
    for (int i = 0; i < 100; ++i) {
        const GeoPoint a{lat(rng), lon(rng), 0};
        const double d = dist(rng);
        CHECK(std::abs(great_circle_distance_nm(a, project_nm(a, brg(rng), d)) - d) < 1e-6);
    }
}

TEST_CASE("final bearing and track offsets")
{
    CHECK(final_bearing_deg({0, 0, 0}, {0, 10, 0}) == doctest::Approx(90.0));
    const GeoPoint a{40, -100, 0}, b{40, -90, 0};
    const GeoPoint mid = interpolate(a, b, 0.5);
    CHECK(std::abs(cross_track_nm(a, b, mid)) < 1e-6);
    CHECK(along_track_nm(a, b, mid) == doctest::Approx(0.5 * great_circle_distance_nm(a, b)));
    const GeoPoint north = project_nm(mid, initial_bearing_deg(mid, b) - 90.0, 30.0);
    CHECK(cross_track_nm(a, b, north) == doctest::Approx(-30.0).epsilon(1e-6));
}

TEST_CASE("GeoPoint validation and local offsets")
{
    CHECK_THROWS_AS(GeoPoint::make(91.0, 0.0), InputError);
    CHECK_THROWS_AS(GeoPoint::make(0.0, 0.0, -1.0), InputError);
    CHECK(GeoPoint::make(0.0, 180.0).lon_deg == doctest::Approx(-180.0));
    const GeoPoint ref{45, -120, 0};
    const GeoPoint p = from_local_nm(ref, {100.0, -50.0});
    const auto off = to_local_nm(ref, p);
    CHECK(off.east_nm == doctest::Approx(100.0).epsilon(1e-9));
    CHECK(off.north_nm == doctest::Approx(-50.0).epsilon(1e-9));
}
