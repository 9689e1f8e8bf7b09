#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <json.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Result {
    int status = -1;
    std::string out;
};

Result run(const std::string& args)
{
    const std::string cmd = std::string(VPATCH_CLI_PATH) + " " + args + " 2>/dev/null";
    Result r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    const int st = pclose(p);
    r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

std::string slurp(const fs::path& p)
{
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

std::vector<std::vector<std::string>> csv(const std::string& text)
{
    std::vector<std::vector<std::string>> rows;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string c;
        while (std::getline(ls, c, ',')) cells.push_back(c);
        rows.push_back(cells);
    }
    return rows;
}

fs::path scratch()
{
    const fs::path d = fs::temp_directory_path() / "vpatch_cli_test";
    fs::create_directories(d);
    return d;
}

} // namespace

TEST_CASE("spectrum table")
{
    const Result r = run("spectrum --gamma 2 --n-max 8");
    CHECK(r.status == 0);
    const auto rows = csv(r.out);
    REQUIRE(rows.size() == 9);
    CHECK(rows[0] == std::vector<std::string>{"n", "mu_plus", "mu_minus", "omega_n", "m_n", "class"});
    CHECK(std::abs(std::stod(rows[2][3])) <= 1e-15);
    CHECK(rows[2][5] == "degenerate");
    CHECK(rows[3][5] == "elliptic");
}

TEST_CASE("critical ratios")
{
    const Result r = run("critical-gammas --n 3");
    CHECK(r.status == 0);
    CHECK(r.out == "3.0000000000\n");
    const Result t = run("critical-gammas --n-max 5");
    const auto rows = csv(t.out);
    REQUIRE(rows.size() == 4);
    CHECK(std::abs(std::stod(rows[2][1]) - 4.611581789308714980881) < 1e-12);
    CHECK(run("critical-gammas --n 2").status == 1);
}

TEST_CASE("simulate the equilibrium")
{
    const Result r = run("simulate --gamma 2 --xi0 zero --omega equilibrium --t-end 1");
    CHECK(r.status == 0);
    const auto pos = r.out.find("max_abs_xi ");
    REQUIRE(pos != std::string::npos);
    CHECK(std::stod(r.out.substr(pos + 11)) <= 1e-9);
}

TEST_CASE("exit status")
{
    CHECK(run("simulate --gamma 0.5").status == 1);
    CHECK(run("simulate --n-points 10 --t-end 0.01 --xi0 x3:1").status == 1);
    CHECK(run("simulate --omega fast").status == 1);
    CHECK(run("spectrum --no-such-flag").status == 1);
    CHECK(run("").status == 1);
    CHECK(run("resonance --gamma-lo 2.5 --gamma-hi 3.5").status == 1);
    CHECK(run("rectify-check --gamma 1").status == 1);
    // blow-up
    CHECK(run("simulate --n-points 32 --xi0 c3:0.3 --dt 0.01 --t-end 1 --blowup-margin 0.5").status == 2);
    CHECK(run("--help").status == 0);
}

TEST_CASE("outputs are deterministic")
{
    const fs::path d = scratch();
    for (int k = 0; k < 2; ++k) {
        const std::string tag = std::to_string(k);
        const std::string args = "resonance --l-max 4 --n-max 16 --dgamma 0.01 --out " + (d / ("r" + tag + ".csv")).string() +
                                 " --summary " + (d / ("r" + tag + ".json")).string();
        CHECK(run(args).status == 0);
        CHECK(run("simulate --n-points 32 --xi0 random:4:0.01 --dt 0.01 --t-end 0.2 --stride 5 --out " +
                  (d / ("s" + tag + ".csv")).string() + " --dump " + (d / ("s" + tag)).string())
                  .status == 0);
    }
    CHECK(slurp(d / "r0.csv") == slurp(d / "r1.csv"));
    CHECK(slurp(d / "r0.json") == slurp(d / "r1.json"));
    CHECK(slurp(d / "s0.csv") == slurp(d / "s1.csv"));
    CHECK(slurp(d / "s0.bin") == slurp(d / "s1.bin"));

    const auto rows = csv(slurp(d / "r0.csv"));
    CHECK(rows[0] == std::vector<std::string>{"gamma", "family", "margin", "pass"});
    CHECK(rows.size() == 1 + 100 * 5);
    const auto j = nlohmann::json::parse(slurp(d / "r0.json"));
    CHECK(j["schema_version"] == 1);
    CHECK(j["trend"].size() == 3);
    const auto meta = nlohmann::json::parse(slurp(d / "s0.json"));
    CHECK(meta["n_records"] == 5);
    CHECK(fs::file_size(d / "s0.bin") == 5 * 32 * sizeof(double));
    fs::remove_all(d);
}

TEST_CASE("rectify-check report")
{
    const Result r = run("rectify-check --gamma 2 --n-points 64 --samples 5");
    CHECK(r.status == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["schema_version"] == 1);
    CHECK(j["round_trip"]["pass"] == true);
    CHECK(j["brackets"]["pass"] == true);
    CHECK(j["empirical_radius"]["radius"].get<double>() > 0);
}

TEST_CASE("verify selected properties")
{
    const Result r = run("verify --only 1,4");
    CHECK(r.status == 0);
    CHECK(r.out.find("PASS  [1]") != std::string::npos);
    CHECK(r.out.find("PASS  [4]") != std::string::npos);
    CHECK(run("verify --only 99").status == 1);
}

TEST_CASE("worker count from the environment")
{
    const std::string cmd = std::string("VPATCH_WORKERS=1 ") + VPATCH_CLI_PATH + " spectrum --n-max 3 >/dev/null 2>&1";
    const int st = std::system(cmd.c_str());
    CHECK(WIFEXITED(st));
    CHECK(WEXITSTATUS(st) == 0);
}
