#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "resorb/errors.hpp"
#include "resorb_cli/cache.hpp"
#include "resorb_cli/commands.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

// Runs the built binary with stderr folded into stdout.
Run run_tool(const std::string& args) {
    const std::string cmd = std::string(RESORB_CLI_PATH) + " " + args + " 2>&1";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    while (fgets(buf.data(), static_cast<int>(buf.size()), pipe) != nullptr) r.out += buf.data();
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

std::vector<std::string> fields(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    for (std::string f; std::getline(in, f, ',');) out.push_back(f);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("resorb_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("validation failures exit with 1") {
    CHECK(run_tool("coeff --p 1 --q 1").code == resorb::cli::kExitValidation);
    CHECK(run_tool("coeff --p 2 --q 4").code == resorb::cli::kExitValidation);
    CHECK(run_tool("coeff --e 1.5").code == resorb::cli::kExitValidation);
    CHECK(run_tool("verify --mu-list 1e-5,1e-4").code == resorb::cli::kExitValidation);
    CHECK(run_tool("sweep --e-list 0.1,abc").code == resorb::cli::kExitValidation);
    CHECK(run_tool("nonsense").code == resorb::cli::kExitValidation);

    resorb::cli::RunConfig c;
    c.command = "coeff";
    c.p = 1;
    c.q = 1;
    CHECK_THROWS_AS(resorb::cli::run_command(c), resorb::DomainError);
}

TEST_CASE("a corrector failure exits with 2") {
    const Run r = run_tool("verify --p 1 --q 3 --e 0.3 --families 0 --mu-list 0.1");
    CHECK(r.code == resorb::cli::kExitComputation);
    const json rec = json::parse(r.out);
    CHECK(rec["status"] == "failed");
    CHECK(rec["outputs"]["families"][0]["per_mu"][0]["status"] == "corrector_diverged");
}

TEST_CASE("an empty sweep grid gives the header only") {
    const Run r = run_tool("sweep --e-list none");
    CHECK(r.code == 0);
    CHECK(r.out == std::string(resorb::cli::kSweepHeader) + "\n");
}

TEST_CASE("sweep of 1/3 over the default grid") {
    const Run r = run_tool("sweep --p 1 --q 3");
    REQUIRE(r.code == 0);
    const auto ls = lines(r.out);
    REQUIRE(ls.size() == 13);
    CHECK(ls[0] == resorb::cli::kSweepHeader);
    for (std::size_t i = 1; i < ls.size(); ++i) {
        const auto f = fields(ls[i]);
        REQUIRE(f.size() == 7);
        CHECK(std::stod(f[0]) == doctest::Approx(0.05 * static_cast<double>(i)).epsilon(1e-12));
        CHECK(f[5] == "ok");
        CHECK(f[6] == "ok");
        CHECK(std::stod(f[1]) * std::stod(f[2]) < 0.0);
    }
}

TEST_CASE("coeff reports both families with opposite signs") {
    const Run r = run_tool("coeff --p 2 --q 7 --e 0.4");
    REQUIRE(r.code == 0);
    const json rec = json::parse(r.out);
    CHECK(rec["schema_version"] == resorb::cli::kSchemaVersion);
    CHECK(rec["tool"] == "resorb");
    CHECK(rec["command"] == "coeff");
    const auto& fams = rec["outputs"]["families"];
    REQUIRE(fams.size() == 2);
    CHECK(fams[0]["leading"]["exponent"] == 5);
    CHECK(fams[0]["result"]["C"].get<double>() * fams[1]["result"]["C"].get<double>() < 0.0);
}

TEST_CASE("doubles survive the JSON round trip exactly") {
    for (double v : {0.1, 1.0 / 3.0, -2.718281828459045e-7, 6.02214076e23}) {
        CHECK(std::strtod(resorb::cli::format_double(v).c_str(), nullptr) == v);
        CHECK(json::parse(json(v).dump()).get<double>() == v);
    }
    resorb::cli::RunConfig c;
    c.command = "coeff";
    c.p = 1;
    c.q = 2;
    c.e = 0.2;
    const auto out = resorb::cli::run_command(c);
    const double C = out.record["outputs"]["families"][0]["result"]["C"].get<double>();
    CHECK(json::parse(out.record.dump(2))["outputs"]["families"][0]["result"]["C"].get<double>() == C);
}

TEST_CASE("config file values are overridden by explicit flags") {
    const fs::path cfg = scratch("coeff.cfg");
    std::ofstream(cfg) << "# defaults for a test\np = 2\nq = 7\ne = 0.4\nfamilies = 0\n";
    const json from_file = json::parse(run_tool("coeff --config " + cfg.string()).out);
    CHECK(from_file["input"]["p"] == 2);
    CHECK(from_file["input"]["e"] == 0.4);
    const json overridden = json::parse(run_tool("coeff --config " + cfg.string() + " --e 0.2").out);
    CHECK(overridden["input"]["e"] == 0.2);
    CHECK(overridden["input"]["q"] == 7);

    std::ofstream(scratch("bad.cfg")) << "no equals sign here\n";
    CHECK(run_tool("coeff --config " + scratch("bad.cfg").string()).code == resorb::cli::kExitValidation);
    CHECK(run_tool("coeff --config /nonexistent/file.cfg").code == resorb::cli::kExitValidation);
}

TEST_CASE("verify cache returns the identical record") {
    const fs::path dir = scratch("cache");
    fs::remove_all(dir);
    const std::string args = "verify --p 1 --q 3 --e 0.3 --families 0 --mu-list 1e-5 --cache-dir " + dir.string();
    const Run first = run_tool(args);
    REQUIRE(first.code == 0);
    const Run second = run_tool(args);
    REQUIRE(second.code == 0);
    const json a = json::parse(first.out);
    const json b = json::parse(second.out);
    CHECK(a["timings"]["cache_hits"] == 0);
    CHECK(b["timings"]["cache_hits"] == 1);
    CHECK(a["outputs"] == b["outputs"]);

    // A record is only returned under its own key.
    const resorb::cli::ResultCache cache(dir);
    cache.store("key-a", json{{"v", 1}});
    CHECK(cache.load("key-a") == json{{"v", 1}});
    CHECK_FALSE(cache.load("key-b").has_value());
    CHECK_FALSE(resorb::cli::ResultCache("").enabled());
}

TEST_CASE("regularize passes its checks and rejects invalid charts") {
    const Run ok = run_tool("regularize --C -1.5 --G -0.3 --cycles 3");
    CHECK(ok.code == 0);
    const json rec = json::parse(ok.out);
    CHECK(rec["status"] == "ok");
    for (const auto& [name, check] : rec["outputs"]["checks"].items()) {
        INFO(name);
        CHECK(check["pass"] == true);
    }
    CHECK(rec["outputs"]["checks"].contains("k0_correspondence"));

    const Run g0 = run_tool("regularize --G 0");
    CHECK(g0.code == resorb::cli::kExitValidation);
    CHECK(g0.out.find("G=0") != std::string::npos);
    const Run bound = run_tool("regularize --C -0.1 --G 0.5");
    CHECK(bound.code == resorb::cli::kExitValidation);
    CHECK(bound.out.find("G + 2C < 0") != std::string::npos);
}

TEST_CASE("output file option") {
    const fs::path out = scratch("series.json");
    CHECK(run_tool("series --p 1 --q 3 -o " + out.string()).code == 0);
    std::ifstream in(out);
    const json rec = json::parse(in);
    CHECK(rec["command"] == "series");
    CHECK(rec["outputs"]["families"][0]["leading"]["exponent"] == 2);
}
