#include <doctest.h>

#include <random>
#include <sstream>

#include "windroute/errors.hpp"
#include "windroute/reports.hpp"

using namespace windroute;

namespace {

const char* kHeader = "time_utc,aircraft_id,lat_deg,lon_deg,alt_ft,gs_kt,track_deg,tas_kt\n";

AircraftReportTable parse(const std::string& text, CsvOptions opts = {})
{
    std::istringstream in(text);
    return parse_aircraft_csv(in, opts);
}

} // namespace

TEST_CASE("aircraft csv: empty table, due-east ground velocity, column order")
{
    CHECK(parse(kHeader).rows.empty());
    const auto t = parse(std::string(kHeader) + "2026-01-01T00:00:00Z,N1,45,-120,30000,300,90,450\n");
    REQUIRE(t.rows.size() == 1);
    const auto r = t.reports();
    CHECK(r[0].ground_velocity.u_kt == doctest::Approx(300.0));
    CHECK(std::abs(r[0].ground_velocity.v_kt) < 1e-9);
    CHECK(r[0].aircraft_id == "N1");

    const auto shuffled = parse("tas_kt,track_deg,gs_kt,alt_ft,lon_deg,lat_deg,aircraft_id,time_utc,extra\n"
                                "450,0,300,30000,-120,45,N2,t,ignored\n");
    REQUIRE(shuffled.rows.size() == 1);
    CHECK(shuffled.reports()[0].ground_velocity.v_kt == doctest::Approx(300.0));
}

TEST_CASE("aircraft csv: range violations are located or skipped")
{
    const std::string bad = std::string(kHeader) + "t,N1,45,-120,30000,300,90,450\nt,N2,45,-120,30000,1200,90,450\n";
    try {
        parse(bad);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
        CHECK(std::string(e.what()).find("gs_kt") != std::string::npos);
    }
    const auto t = parse(bad, CsvOptions{true});
    CHECK(t.rows.size() == 1);
    REQUIRE(t.rejected.size() == 1);
    CHECK(t.rejected[0].line == 3);
    CHECK(t.rejected[0].column == "gs_kt");
}

TEST_CASE("aircraft csv: structural errors")
{
    CHECK_THROWS_AS(parse(""), ParseError);
    CHECK_THROWS_AS(parse("time_utc,aircraft_id,lat_deg\n"), ParseError);
    CHECK_THROWS_AS(parse(std::string(kHeader) + "t,N1,45,-120,30000,abc,90,450\n"), ParseError);
    CHECK_THROWS_AS(parse(std::string(kHeader) + "t,N1,45,-120\n"), ParseError);
    CHECK_THROWS_AS(parse(std::string(kHeader) + "t,N1,45,-120,30000,300,90,nan\n"), ParseError);
}

TEST_CASE("station directory")
{
    std::istringstream ok("code,lat_deg,lon_deg\nSEA,47.45,-122.31\nGEG,47.62,-117.53\n");
    const auto dir = parse_station_directory(ok);
    CHECK(dir.size() == 2);
    CHECK(dir.at("SEA").lat_deg == 47.45);
    std::istringstream dup("code,lat_deg,lon_deg\nSEA,47.45,-122.31\nSEA,1,1\n");
    CHECK_THROWS_AS(parse_station_directory(dup), ParseError);
    std::istringstream range("code,lat_deg,lon_deg\nSEA,97.45,-122.31\n");
    CHECK_THROWS_AS(parse_station_directory(range), ParseError);
    std::istringstream header("id,lat,lon\n");
    CHECK_THROWS_AS(parse_station_directory(header), ParseError);
}

TEST_CASE("csv parsers never escape with anything but a parse error")
{
    std::mt19937_64 rng(77);
    const std::string alphabet = "0123456789.,-+eE\n abcN";
    std::uniform_int_distribution<int> len(0, 300), pick(0, static_cast<int>(alphabet.size()) - 1), byte(0, 255);
    for (int trial = 0; trial < 3000; ++trial) {
        std::string text = trial % 2 ? kHeader : "code,lat_deg,lon_deg\n";
        const int n = len(rng);
        for (int i = 0; i < n; ++i) text += trial % 5 == 0 ? static_cast<char>(byte(rng)) : alphabet[pick(rng)];
        try {
            std::istringstream in(text);
            if (trial % 2) {
                parse_aircraft_csv(in, CsvOptions{trial % 4 == 1}).reports();
            } else {
                parse_station_directory(in);
            }
        } catch (const ParseError&) {
        }
    }
    CHECK(true);
}
