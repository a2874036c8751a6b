#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hardylab/report.hpp"

using namespace hardylab;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args, const fs::path& outdir) {
    const std::string cmd = std::string(HARDYLAB_CLI_PATH) + " " + args + " --out " +
                            outdir.string() + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("hardylab_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(rand()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST_CASE("exponents subcommand emits the worked values") {
    TempDir tmp;
    REQUIRE(run_cli("exponents --mu -2 --dim 3", tmp.path) == 0);
    auto j = json::parse(slurp(tmp.path / "exponents.json"));
    CHECK(j["alpha_plus"].get<double>() == 2.0);
    CHECK(j["alpha_minus"].get<double>() == -1.0);
    CHECK(j["q_c"].get<double>() == Catch::Approx(5.0 / 3.0));
    CHECK(j["q_star"].get<double>() == Catch::Approx(3.0));
}

TEST_CASE("q_star is an explicit tag for nonnegative mu") {
    TempDir tmp;
    REQUIRE(run_cli("exponents --mu 0.1 --dim 3 --q 2.5", tmp.path) == 0);
    auto j = json::parse(slurp(tmp.path / "exponents.json"));
    CHECK(j["q_star"].is_string());
    CHECK(j["q_star"].get<std::string>() == "infinity");
    CHECK(j["classification"]["regime"].is_string());
}

TEST_CASE("identical configuration reproduces byte-identical artifacts") {
    TempDir t1, t2;
    REQUIRE(run_cli("kernel-lq --mu 0 --dim 3 --q 2.0 --n 512", t1.path) == 0);
    REQUIRE(run_cli("kernel-lq --mu 0 --dim 3 --q 2.0 --n 512", t2.path) == 0);
    CHECK(slurp(t1.path / "kernel_lq.json") == slurp(t2.path / "kernel_lq.json"));
    auto j = json::parse(slurp(t1.path / "kernel_lq.json"));
    CHECK(j["verdict"].get<std::string>() == "divergent");  // endpoint q = q_c
}

TEST_CASE("usage errors exit with code 2") {
    TempDir tmp;
    CHECK(run_cli("exponents", tmp.path) != 0);                // missing --mu
    CHECK(run_cli("exponents --mu 0.5", tmp.path) == 2);       // mu out of range
    CHECK(run_cli("hardy --domain annulus --inner 2 --outer 1", tmp.path) == 2);
}

TEST_CASE("nonunique refusal uses its dedicated exit code") {
    TempDir tmp;
    const int rc = run_cli("nonunique --domain annulus --inner 0.5 --outer 1 --q 2 --n 512",
                           tmp.path);
    CHECK(rc == 6);
    auto j = json::parse(slurp(tmp.path / "nonunique.json"));
    CHECK(j["status"].get<std::string>() == "refused");
    CHECK(j["hardy_bound"].get<double>() > 0.2);
}

TEST_CASE("trace subcommand writes per-component estimates") {
    TempDir tmp;
    REQUIRE(run_cli("trace --mu 0.1 --domain annulus --inner 0.5 --outer 1 "
                    "--field kernel --n 512", tmp.path) == 0);
    auto j = json::parse(slurp(tmp.path / "trace.json"));
    REQUIRE(j["per_component"].size() == 2);
    CHECK(j["aggregate"]["converged"].get<bool>());
}

TEST_CASE("profile csv carries the fitted-model column") {
    TempDir tmp;
    REQUIRE(run_cli("harmonic --mu 0.1875 --domain slab --height 1 --dim 3 "
                    "--branch plus --n 256", tmp.path) == 0);
    const auto csv = slurp(tmp.path / "harmonic_profile.csv");
    CHECK(csv.rfind("r,delta,value,fitted_model\n", 0) == 0);
}
