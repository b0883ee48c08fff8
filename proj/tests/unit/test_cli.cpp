#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <gtest/gtest.h>
#include <json.hpp>

#include "xva/app/config.hpp"
#include "xva/app/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace xva::app;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("xva_cli_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string config_path(const std::string& name) { return std::string(XVA_CONFIG_DIR) + "/" + name; }

int run(const std::string& args, const fs::path& log) {
    const std::string cmd = std::string(XVA_MILD_BIN) + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json load(const fs::path& p) { return json::parse(slurp(p)); }

fs::path write_config(const fs::path& dir, const json& doc) {
    const fs::path p = dir / "config.json";
    std::ofstream(p) << doc.dump(2);
    return p;
}

json bond() { return load(config_path("bond.json")); }

} // namespace

TEST(Config, NormalisedRoundTrip) {
    const RunConfig a = load_config_file(config_path("default.json"));
    const json na = to_json(a);
    const RunConfig b = load_config(na);
    EXPECT_EQ(to_json(b), na);
}

TEST(Config, UnknownKeyNamesField) {
    json doc = bond();
    doc["market"]["c_plu"] = 0.01;
    try {
        load_config(doc);
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.path(), "market.c_plu");
    }
}

TEST(Config, InvariantViolationNamesField) {
    json doc = bond();
    doc["market"]["alpha_frac"] = 0.9;
    doc["market"]["beta_frac"] = 0.5;
    try {
        load_config(doc);
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.path(), "market.alpha_frac");
    }
}

TEST(Cli, InvalidConfigExitsWithValidationCode) {
    const fs::path dir = scratch("invalid");
    json doc = bond();
    doc["market"]["alpha_frac"] = 0.9;
    doc["market"]["beta_frac"] = 0.5;
    const fs::path cfg = write_config(dir, doc);
    EXPECT_EQ(run("solve --config " + cfg.string() + " --out " + (dir / "out").string(), dir / "log"), 2);
    EXPECT_NE(slurp(dir / "log").find("market.alpha_frac"), std::string::npos);
}

TEST(Cli, SimulateIsReproducible) {
    const fs::path dir = scratch("simulate");
    const std::string cfg = config_path("default.json");
    ASSERT_EQ(run("simulate --config " + cfg + " --out " + (dir / "a").string(), dir / "log_a"), 0);
    ASSERT_EQ(run("simulate --config " + cfg + " --out " + (dir / "b").string() + " --threads 2", dir / "log_b"), 0);
    const json ma = load(dir / "a" / "manifest.json");
    const json mb = load(dir / "b" / "manifest.json");
    EXPECT_EQ(ma["outputs"], mb["outputs"]);
    EXPECT_EQ(ma["config_sha256"], mb["config_sha256"]);
    EXPECT_FALSE(fs::exists(dir / "a" / "run.incomplete"));
    EXPECT_TRUE(fs::exists(dir / "a" / "paths.bin"));
}

TEST(Cli, DefaultsExponentialCurve) {
    const fs::path dir = scratch("defaults");
    json doc = bond();
    doc["defaults"] = {{"investor", {{"intensity", 0.1}}}, {"counterparty", {{"intensity", 0.0}}}};
    doc["mc"]["default_samples"] = 20000;
    const fs::path cfg = write_config(dir, doc);
    ASSERT_EQ(run("defaults --config " + cfg.string() + " --out " + (dir / "out").string(), dir / "log"), 0);
    std::ifstream in(dir / "out" / "survival.csv");
    std::string line, last;
    std::getline(in, line);
    EXPECT_EQ(line.rfind("t,g_I,g_C,g_joint", 0), 0u);
    while (std::getline(in, line))
        if (!line.empty()) last = line;
    std::stringstream ss(last);
    std::string cell;
    std::vector<double> cols;
    while (std::getline(ss, cell, ',')) cols.push_back(std::stod(cell));
    ASSERT_GE(cols.size(), 4u);
    EXPECT_DOUBLE_EQ(cols[0], 1.0);
    EXPECT_NEAR(cols[1], std::exp(-0.1), 1e-12);
    EXPECT_EQ(cols[2], 1.0);
    const json d = load(dir / "out" / "defaults.json");
    EXPECT_LE(d["identity_gap"].get<double>(), 1e-6);
}

TEST(Cli, NoDefaultsGivesUnitAtom) {
    const fs::path dir = scratch("no_defaults");
    const fs::path cfg = write_config(dir, bond());
    ASSERT_EQ(run("defaults --config " + cfg.string() + " --out " + (dir / "out").string(), dir / "log"), 0);
    const json d = load(dir / "out" / "defaults.json");
    EXPECT_EQ(d["atom"].get<double>(), 1.0);
    EXPECT_EQ(d["density_integral"].get<double>(), 0.0);
}

TEST(Cli, BondPriceAndGridRoundTrip) {
    const fs::path dir = scratch("bond");
    ASSERT_EQ(run("price --config " + config_path("bond.json") + " --out " + (dir / "out").string(), dir / "log"), 0);
    const json p = load(dir / "out" / "price.json");
    EXPECT_NEAR(p["value"].get<double>(), std::exp(-0.05), 1e-10);
    const json m = load(dir / "out" / "manifest.json");
    EXPECT_EQ(m["command"], "price");
    EXPECT_TRUE(m["outputs"].contains("u.csv"));
    EXPECT_FALSE(fs::exists(dir / "out" / "run.incomplete"));

    const GridData csv = read_grid_csv((dir / "out" / "u.csv").string());
    const GridData bin = read_grid_bin((dir / "out" / "u.bin").string());
    EXPECT_EQ(csv.u.values(), bin.u.values());
    EXPECT_EQ(csv.u.t().nodes(), bin.u.t().nodes());
    EXPECT_EQ(csv.stderr_, bin.stderr_);
}

TEST(Cli, FailedRunKeepsMarker) {
    const fs::path dir = scratch("failed");
    json doc = bond();
    doc["model"]["preset"] = "heston";
    doc["model"]["k"] = 0.08;
    doc["model"]["l0"] = 2.0;
    doc["model"]["lambda"] = 0.3;
    doc["grid"]["x_range"] = {4.60, 4.61};
    const fs::path cfg = write_config(dir, doc);
    EXPECT_EQ(run("solve --config " + cfg.string() + " --out " + (dir / "out").string(), dir / "log"), 4);
    EXPECT_TRUE(fs::exists(dir / "out" / "run.incomplete"));
    EXPECT_FALSE(fs::exists(dir / "out" / "manifest.json"));
}

TEST(Cli, VerifyDefaultConfig) {
    const fs::path dir = scratch("verify");
    EXPECT_EQ(run("verify --config " + config_path("default.json") + " --out " + (dir / "out").string(), dir / "log"), 0)
        << slurp(dir / "log");
    EXPECT_TRUE(load(dir / "out" / "verify.json")["pass"].get<bool>());
}

TEST(Cli, VerifyRejectsInfeasibleModel) {
    const fs::path dir = scratch("infeasible");
    EXPECT_EQ(run("verify --config " + config_path("heston_infeasible.json") + " --out " + (dir / "out").string(),
                  dir / "log"),
              1);
    const json v = load(dir / "out" / "verify.json");
    EXPECT_FALSE(v["pass"].get<bool>());
    EXPECT_EQ(v["suites"]["positivity"]["status"], "fail");
}

TEST(Cli, VerifyComparisonPair) {
    const fs::path dir = scratch("compare");
    EXPECT_EQ(run("verify --config " + config_path("default.json") + " --compare " + config_path("comparison_hi.json") +
                      " --out " + (dir / "out").string(),
                  dir / "log"),
              0)
        << slurp(dir / "log");
    const json v = load(dir / "out" / "verify.json");
    EXPECT_EQ(v["suites"]["comparison"]["status"], "pass");
}
