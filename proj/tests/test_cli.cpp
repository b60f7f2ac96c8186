#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "windroute_cli_test";

int run(const std::string& args)
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

void spit(const fs::path& p, const std::string& text)
{
    fs::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << text;
}

std::string data_flags(const fs::path& dir)
{
    return "--bulletin " + (dir / "bulletin.txt").string() + " --stations " + (dir / "stations.csv").string();
}

} // namespace

TEST_CASE("cli: synthetic data through fuse and loo")
{
    fs::remove_all(kWork);
    const fs::path data = kWork / "data";
    REQUIRE(run("gen-synthetic --seed 3 -o " + data.string()) == 0);
    CHECK(fs::exists(data / "bulletin.txt"));
    CHECK(fs::exists(data / "aircraft.csv"));

    const fs::path out = kWork / "fuse";
    CHECK(run("fuse " + data_flags(data) + " --aircraft " + (data / "aircraft.csv").string() + " -o " + out.string()) ==
          0);
    CHECK(slurp(out / "grid.csv").rfind("# method=laplace\n", 0) == 0);
    CHECK(fs::exists(out / "grid.geojson"));

    const fs::path loo = kWork / "loo";
    CHECK(run("loo " + data_flags(data) + " --aircraft " + (data / "aircraft.csv").string() + " -o " + loo.string()) ==
          0);
    CHECK(slurp(loo / "loo.csv").rfind("method,rmse_kt,n,flagged\nnearest-neighbor,", 0) == 0);
}

TEST_CASE("cli: laplace without aircraft reproduces the station-only grid")
{
    const fs::path data = kWork / "data";
    if (!fs::exists(data / "bulletin.txt")) REQUIRE(run("gen-synthetic --seed 3 -o " + data.string()) == 0);
    spit(kWork / "empty.csv", "time_utc,aircraft_id,lat_deg,lon_deg,alt_ft,gs_kt,track_deg,tas_kt\n");
    REQUIRE(run("fuse --method gpr " + data_flags(data) + " -o " + (kWork / "g").string()) == 0);
    REQUIRE(run("fuse " + data_flags(data) + " --aircraft " + (kWork / "empty.csv").string() + " -o " +
                (kWork / "l").string()) == 0);
    std::string g = slurp(kWork / "g" / "grid.csv");
    std::string l = slurp(kWork / "l" / "grid.csv");
    g = g.substr(g.find('\n'));
    l = l.substr(l.find('\n'));
    CHECK(g == l);
}

TEST_CASE("cli: simulate is byte-reproducible")
{
    const fs::path cfg = kWork / "sim.ini";
    spit(cfg, "[world]\njet_core_kt = 100\nperturbation_sd_kt = 10\n[experiment]\nrepetitions = 2\npolicies = ucb, gcr\n");
    REQUIRE(run("-c " + cfg.string() + " simulate --seed 5 -o " + (kWork / "s1").string()) == 0);
    REQUIRE(run("-c " + cfg.string() + " simulate --seed 5 -o " + (kWork / "s2").string()) == 0);
    CHECK(slurp(kWork / "s1" / "report.csv") == slurp(kWork / "s2" / "report.csv"));
    CHECK(slurp(kWork / "s1" / "runs.csv") == slurp(kWork / "s2" / "runs.csv"));
    CHECK(fs::exists(kWork / "s1" / "flights" / "sc-ut_slot-002_gcr.jsonl"));
    CHECK(fs::exists(kWork / "s1" / "flights" / "sc-ut_slot-001_ucb.geojson"));
}

TEST_CASE("cli: exit codes")
{
    CHECK(run("") == 2);
    CHECK(run("frobnicate") == 2);
    CHECK(run("--set model.nope=1 simulate -o " + (kWork / "x").string()) == 2);
    CHECK(run("-c /nonexistent.ini simulate") == 2);
    CHECK(run("fuse -o " + (kWork / "x").string()) == 2);

    const fs::path data = kWork / "data";
    if (!fs::exists(data / "stations.csv")) REQUIRE(run("gen-synthetic --seed 3 -o " + data.string()) == 0);
    spit(kWork / "bad.txt", "FT  3000\nAAA 4015\n");
    CHECK(run("fuse --method gpr --bulletin " + (kWork / "bad.txt").string() + " --stations " +
              (data / "stations.csv").string() + " -o " + (kWork / "x").string()) == 3);
    spit(kWork / "bad.csv", "time_utc,aircraft_id,lat_deg,lon_deg,alt_ft,gs_kt,track_deg,tas_kt\nt,A,1,2,3,x,5,6\n");
    CHECK(run("loo " + data_flags(data) + " --aircraft " + (kWork / "bad.csv").string() + " -o " +
              (kWork / "x").string()) == 3);

    const fs::path cap = kWork / "cap.ini";
    spit(cap, "[planner]\ntimeout_factor = 1.01\n[world]\njet_core_kt = 100\njet_width_nm = 0\n[experiment]\npolicies = gcr\n");
    CHECK(run("-c " + cap.string() + " simulate -o " + (kWork / "x").string()) == 5);
}
