#include <gtest/gtest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "phasekey/report.hpp"
#include "phasekey/run_config.hpp"
#include "phasekey/verify.hpp"

using namespace phasekey;
using namespace phasekey::cli;

namespace {

const double kPi = std::numbers::pi;

std::string temp_file(const std::string& name, const std::string& text) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream(path) << text;
    return path.string();
}

}  // namespace

TEST(Parse, DefaultsForSweep) {
    const auto c = parse_config(std::vector<std::string>{"sweep"});
    EXPECT_EQ(c.subcommand, Subcommand::sweep);
    EXPECT_DOUBLE_EQ(c.delta, kPi / 100);
    EXPECT_DOUBLE_EQ(c.l_min, 0.0);
    EXPECT_DOUBLE_EQ(c.l_max, 120.0);
    EXPECT_DOUBLE_EQ(c.l_step, 1.0);
    EXPECT_DOUBLE_EQ(c.p_dark, 1.7e-6);
    EXPECT_TRUE(c.out.empty());
}

TEST(Parse, ModulatorPrecisionIsTwiceDelta) {
    const auto c = parse_config(std::vector<std::string>{"bound", "--Delta", "pi/50", "--mu", "200", "--l", "55"});
    EXPECT_EQ(c.subcommand, Subcommand::bound);
    EXPECT_DOUBLE_EQ(c.delta, kPi / 100);
    EXPECT_DOUBLE_EQ(c.mu, 200.0);
    EXPECT_DOUBLE_EQ(c.l, 55.0);
    EXPECT_DOUBLE_EQ(parse_config(std::vector<std::string>{"bound", "--delta", "0.02"}).delta, 0.02);
    EXPECT_DOUBLE_EQ(parse_config(std::vector<std::string>{"bound", "--delta", "pi/300"}).delta, kPi / 300);
}

TEST(Parse, Errors) {
    EXPECT_THROW(parse_config(std::vector<std::string>{"bound", "--delta", "0.01", "--Delta", "0.02"}), ConfigError);
    EXPECT_THROW(parse_config(std::vector<std::string>{"bound", "--delta", "pie"}), ConfigError);
    EXPECT_THROW(parse_config(std::vector<std::string>{"bound", "--delta", "pi/0"}), ConfigError);
    EXPECT_THROW(parse_config(std::vector<std::string>{"bound", "--delta", "2.0"}), ConfigError);
    EXPECT_THROW(parse_config(std::vector<std::string>{"bound", "--mu", "-3"}), ConfigError);
    EXPECT_THROW(parse_config(std::vector<std::string>{"sweep", "--l-min", "50", "--l-max", "10"}), ConfigError);
    EXPECT_THROW(parse_config(std::vector<std::string>{"simulate", "--attack", "mirror"}), ConfigError);
    EXPECT_THROW(parse_config(std::vector<std::string>{"simulate", "--trials", "2.5"}), ConfigError);
    EXPECT_THROW(parse_config(std::vector<std::string>{"verify", "--suite", "qkd"}), ConfigError);
    EXPECT_THROW(parse_config(std::vector<std::string>{"frobnicate"}), ConfigError);
    EXPECT_THROW(parse_config(std::vector<std::string>{}), ConfigError);
    EXPECT_THROW(parse_config(std::vector<std::string>{"bound", "--bogus", "1"}), ConfigError);
}

TEST(Parse, Help) {
    const auto c = parse_config(std::vector<std::string>{"--help"});
    EXPECT_TRUE(c.show_help);
    EXPECT_NE(c.help_text.find("sweep"), std::string::npos);
}

TEST(Parse, SimulateOptions) {
    const auto c = parse_config(std::vector<std::string>{"simulate", "--attack", "beam_split", "--tap", "0.3",
                                                         "--trials", "5000", "--seed", "9"});
    EXPECT_EQ(c.attack.kind, montecarlo::AttackKind::beam_split);
    EXPECT_DOUBLE_EQ(c.attack.tap_fraction, 0.3);
    EXPECT_EQ(c.trials, 5000u);
    EXPECT_EQ(c.seed, 9u);
}

TEST(ConfigFile, FlagsOverrideFile) {
    const auto path = temp_file("phasekey_cfg_ok.txt", "# link\nmu = 300\nDelta = pi/150\n l = 70 \nl-step=2\n");
    const auto c = parse_config(std::vector<std::string>{"bound", "--config", path, "--mu", "500"});
    EXPECT_DOUBLE_EQ(c.mu, 500.0);
    EXPECT_DOUBLE_EQ(c.delta, kPi / 300);
    EXPECT_DOUBLE_EQ(c.l, 70.0);
    EXPECT_DOUBLE_EQ(c.l_step, 2.0);
    // A flag in the other angle spelling replaces the file's angle.
    const auto d = parse_config(std::vector<std::string>{"bound", "--config", path, "--delta", "0.01"});
    EXPECT_DOUBLE_EQ(d.delta, 0.01);
    std::filesystem::remove(path);
}

TEST(ConfigFile, Rejections) {
    const auto unknown = temp_file("phasekey_cfg_unknown.txt", "mu = 3\nbeta = 2\n");
    EXPECT_THROW(parse_config(std::vector<std::string>{"bound", "--config", unknown}), ConfigError);
    const auto malformed = temp_file("phasekey_cfg_malformed.txt", "mu 3\n");
    EXPECT_THROW(parse_config(std::vector<std::string>{"bound", "--config", malformed}), ConfigError);
    const auto both = temp_file("phasekey_cfg_both.txt", "delta = 0.01\nDelta = 0.02\n");
    EXPECT_THROW(parse_config(std::vector<std::string>{"bound", "--config", both}), ConfigError);
    EXPECT_THROW(parse_config(std::vector<std::string>{"bound", "--config", "/nonexistent/phasekey.cfg"}), IoError);
    for (const auto& p : {unknown, malformed, both}) std::filesystem::remove(p);
}

TEST(Csv, HeaderAndRows) {
    optimizer::SweepConfig s;
    s.l_min = s.l_max = 50.0;
    const auto pts = optimizer::sweep_distance(s);
    const std::string csv = sweep_csv(pts);
    EXPECT_EQ(csv.rfind(std::string(kSweepHeader) + "\n", 0), 0u);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
    EXPECT_EQ(csv, sweep_csv(optimizer::sweep_distance(s)));
    EXPECT_THROW(sweep_csv({}), std::invalid_argument);
    EXPECT_EQ(sci(1.0), "1.000000000e+00");
}

TEST(Csv, FileOutput) {
    optimizer::SweepConfig s;
    s.l_min = 40.0;
    s.l_max = 42.0;
    const auto pts = optimizer::sweep_distance(s);
    const auto path = (std::filesystem::temp_directory_path() / "phasekey_sweep.csv").string();
    emit_sweep_csv(pts, path);
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    EXPECT_EQ(buf.str(), sweep_csv(pts));
    std::filesystem::remove(path);
    EXPECT_THROW(emit_sweep_csv(pts, "/nonexistent/dir/out.csv"), IoError);
}

TEST(Verify, AllSuitesPass) {
    verify::VerifyOptions opt;
    opt.mc_trials = 100000;
    for (const auto& r : verify::run("all", opt)) {
        for (const auto& c : r.checks) EXPECT_TRUE(c.passed) << r.suite << ": " << c.name << " " << c.detail;
    }
    EXPECT_THROW(verify::run("nope"), std::invalid_argument);
}

TEST(Verify, TamperedFormulaIsCaught) {
    verify::VerifyOptions opt;
    opt.lambda_1x = verify::tampered_lambda_1x;
    const auto reports = verify::run("fock", opt);
    ASSERT_EQ(reports.size(), 1u);
    EXPECT_FALSE(reports[0].passed());
}
