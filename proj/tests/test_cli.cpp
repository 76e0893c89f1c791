#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "blowup/poly.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int run(const std::string& args) {
    std::string cmd = std::string(CLI_PATH) + " " + args + " > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string scenario(const char* name) {
    return std::string(SCENARIO_DIR) + "/" + name;
}

fs::path fresh_dir(const char* tag) {
    fs::path d = fs::temp_directory_path() / (std::string("blowup_cli_") + tag);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

json read_json(const fs::path& p) {
    std::ifstream in(p);
    EXPECT_TRUE(in.good()) << p;
    json j;
    in >> j;
    return j;
}

std::string read_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Cli, BlowupReport) {
    auto dir = fresh_dir("blowup");
    int rc = run("--scenario " + scenario("worked_example.json") + " --out " + dir.string() +
                 " blowup");
    EXPECT_EQ(rc, 0);
    json rep = read_json(dir / "blowup.json");
    EXPECT_EQ(rep["kappa"], 1);
    // the printed fields must agree with the exact pullback as polynomials
    auto strip = [](std::string s, std::size_t i) {
        auto comma = s.find(", ");
        std::string part = i == 0 ? s.substr(1, comma - 1) : s.substr(comma + 2);
        if (!part.empty() && part.back() == ')') part.pop_back();
        return part;
    };
    std::string blown = rep["blown_up_field"].get<std::string>();
    EXPECT_EQ(blowup::Poly2::parse(strip(blown, 0), "u", "v"),
              blowup::Poly2::parse("u^2 - 2*u^2*v", "u", "v"));
    EXPECT_EQ(blowup::Poly2::parse(strip(blown, 1), "u", "v"),
              blowup::Poly2::parse("3*u*v^2 - 3*u*v", "u", "v"));
    std::string desing = rep["desingularized_field"].get<std::string>();
    EXPECT_EQ(blowup::Poly2::parse(strip(desing, 0), "u", "v"),
              blowup::Poly2::parse("u - 2*u*v", "u", "v"));
    EXPECT_EQ(blowup::Poly2::parse(strip(desing, 1), "u", "v"),
              blowup::Poly2::parse("3*v^2 - 3*v", "u", "v"));
    EXPECT_TRUE(rep["axis_invariant"].get<bool>());
    ASSERT_EQ(rep["equilibria"].size(), 2u);
    EXPECT_EQ(rep["equilibria"][0]["v_exact"], "0");
    EXPECT_EQ(rep["equilibria"][1]["v_exact"], "1");
    EXPECT_EQ(rep["equilibria"][0]["class"], "hyperbolic-saddle");
    EXPECT_EQ(rep["equilibria"][1]["class"], "hyperbolic-saddle");
}

TEST(Cli, SimulateOrbitGate) {
    auto dir = fresh_dir("simulate");
    int rc = run("--scenario " + scenario("worked_example.json") + " --out " + dir.string() +
                 " simulate");
    EXPECT_EQ(rc, 0);
    EXPECT_TRUE(fs::exists(dir / "trajectory_desing.csv"));
    EXPECT_TRUE(fs::exists(dir / "trajectory_original.csv"));
    json rep = read_json(dir / "simulate.json");
    EXPECT_LE(rep["orbit_deviation"].get<double>(), 1e-6);
    EXPECT_FALSE(rep["axis_flag"].get<bool>());
}

TEST(Cli, SimulateDeterministicOutput) {
    auto d1 = fresh_dir("det1"), d2 = fresh_dir("det2");
    ASSERT_EQ(run("--scenario " + scenario("worked_example.json") + " --out " + d1.string() +
                  " simulate"),
              0);
    ASSERT_EQ(run("--scenario " + scenario("worked_example.json") + " --out " + d2.string() +
                  " simulate"),
              0);
    EXPECT_EQ(read_bytes(d1 / "trajectory_desing.csv"), read_bytes(d2 / "trajectory_desing.csv"));
    EXPECT_EQ(read_bytes(d1 / "trajectory_original.csv"),
              read_bytes(d2 / "trajectory_original.csv"));
}

TEST(Cli, ReportConstantsAndLadder) {
    auto d1 = fresh_dir("rep1"), d2 = fresh_dir("rep2");
    ASSERT_EQ(run("--scenario " + scenario("worked_example.json") + " --out " + d1.string() +
                  " report"),
              0);
    ASSERT_EQ(run("--scenario " + scenario("worked_example.json") + " --out " + d2.string() +
                  " report"),
              0);
    json rep = read_json(d1 / "report.json");
    EXPECT_GT(rep["zeta_ladder"].size(), 0u);
    EXPECT_GT(rep["constants"]["alpha"].get<double>(), 0.9);
    EXPECT_GE(rep["constants"]["C"].get<double>(), 1.0);
    // matrix A is the recentered saddle diag(-1, 3)
    EXPECT_NEAR(rep["constants"]["A"][0].get<double>(), -1.0, 1e-12);
    EXPECT_NEAR(rep["constants"]["A"][3].get<double>(), 3.0, 1e-12);
    // same seed, same bytes
    EXPECT_EQ(read_bytes(d1 / "report.json"), read_bytes(d2 / "report.json"));
}

TEST(Cli, ManifoldCertificates) {
    auto dir = fresh_dir("manifold");
    int rc = run("--scenario " + scenario("worked_example.json") + " --out " + dir.string() +
                 " manifold");
    EXPECT_EQ(rc, 0);
    json rep = read_json(dir / "manifold.json");
    EXPECT_TRUE(rep["failures"].empty());
    EXPECT_LE(rep["N_est"].get<double>(), rep["N_bound"].get<double>());
    EXPECT_TRUE(fs::exists(dir / "manifold_chart.csv"));
}

TEST(Cli, UnforcedScenario) {
    auto dir = fresh_dir("unforced");
    EXPECT_EQ(run("--scenario " + scenario("unforced_example.json") + " --out " + dir.string() +
                  " blowup"),
              0);
    EXPECT_EQ(run("--scenario " + scenario("unforced_example.json") + " --out " + dir.string() +
                  " report"),
              0);
}

TEST(Cli, ErrorExitCodes) {
    auto dir = fresh_dir("errors");
    // missing scenario file: config error
    EXPECT_EQ(run("--scenario /nonexistent.json --out " + dir.string() + " blowup"), 3);
    // malformed scenario: config error
    fs::path bad = dir / "bad.json";
    std::ofstream(bad) << "{ \"field\": { \"fx\": \"x^2\" } }";
    EXPECT_EQ(run("--scenario " + bad.string() + " blowup"), 3);
    // kappa override beyond the valuation: certificate-level failure
    EXPECT_EQ(run("--scenario " + scenario("worked_example.json") + " --out " + dir.string() +
                  " --kappa 2 blowup"),
              2);
    // no subcommand
    EXPECT_NE(run("--scenario " + scenario("worked_example.json")), 0);
}
