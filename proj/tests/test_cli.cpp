#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "avgsfpde/cli.hpp"

namespace fs = std::filesystem;
using namespace avgsfpde;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "avg_sfpde");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        unsetenv("AVG_SFPDE_SEED");
        unsetenv("AVG_SFPDE_THREADS");
        dir_ = fs::temp_directory_path() /
               (std::string("avg_sfpde_") + ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override {
        unsetenv("AVG_SFPDE_SEED");
        unsetenv("AVG_SFPDE_THREADS");
        fs::remove_all(dir_);
    }

    fs::path write(const std::string& name, const std::string& text) {
        const auto p = dir_ / name;
        std::ofstream(p) << text;
        return p;
    }
    std::string at(const std::string& sub) const { return (dir_ / sub).string(); }

    fs::path dir_;
};

}  // namespace

TEST_F(Cli, ListPresets) {
    auto r = run_cli({"list-presets"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "porous-media-sin\nreaction-diffusion-delay\nscalar-linear-osc\nscalar-holder-osc\n");
    r = run_cli({"list-presets", "--all"});
    EXPECT_NE(r.out.find("broken-quadratic"), std::string::npos);
    EXPECT_NE(r.out.find("ou-scalar"), std::string::npos);
}

TEST_F(Cli, ParseErrorsAndHelp) {
    EXPECT_EQ(run_cli({}).code, cli::exit_error);
    EXPECT_EQ(run_cli({"bogus"}).code, cli::exit_error);
    EXPECT_EQ(run_cli({"simulate", "--no-such-flag"}).code, cli::exit_error);
    const auto help = run_cli({"--help"});
    EXPECT_EQ(help.code, cli::exit_pass);
    EXPECT_NE(help.out.find("sweep-averaging"), std::string::npos);
    EXPECT_EQ(run_cli({"--version"}).code, cli::exit_pass);
}

TEST_F(Cli, SimulateWritesTrajectoryManifestAndSummary) {
    const auto r = run_cli({"simulate", "--preset", "scalar-linear-osc", "--dt", "1e-3", "--T", "0.01", "--eps",
                            "0.1", "--out", at("sim")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto csv = slurp(dir_ / "sim" / "trajectory.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,c_1");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 12);
    EXPECT_TRUE(fs::exists(dir_ / "sim" / "summary.txt"));
    const auto manifest = slurp(dir_ / "sim" / "manifest.ini");
    EXPECT_NE(manifest.find("command = simulate"), std::string::npos);
    EXPECT_NE(manifest.find("eps = 0.1"), std::string::npos);
    EXPECT_EQ(manifest.find(dir_.string()), std::string::npos);
}

TEST_F(Cli, FieldPresetModesOverride) {
    const auto r = run_cli({"simulate", "--preset", "reaction-diffusion-delay", "--modes", "4", "--T", "0.01",
                            "--out", at("rd")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto csv = slurp(dir_ / "rd" / "trajectory.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,c_1,c_2,c_3,c_4");
    EXPECT_EQ(run_cli({"simulate", "--preset", "scalar-linear-osc", "--modes", "4", "--out", at("x")}).code,
              cli::exit_error);
}

TEST_F(Cli, UnknownAndInapplicableKeysRejected) {
    auto cfg = write("a.ini", "[run]\npreset = scalar-linear-osc\n[sweep]\npath = 3\n");
    auto r = run_cli({"sweep-averaging", "--config", cfg.string(), "--out", at("o")});
    EXPECT_EQ(r.code, cli::exit_error);
    EXPECT_NE(r.err.find("unknown config key 'sweep.path'"), std::string::npos);

    cfg = write("b.ini", "[run]\npreset = scalar-linear-osc\n[sweep]\ndelta_grid = 0.1\n");
    r = run_cli({"sweep-averaging", "--config", cfg.string(), "--out", at("o")});
    EXPECT_EQ(r.code, cli::exit_error);
    EXPECT_NE(r.err.find("'sweep.delta_grid' is not used by sweep-averaging"), std::string::npos);

    cfg = write("c.ini", "preset = scalar-linear-osc\n");
    r = run_cli({"simulate", "--config", cfg.string(), "--out", at("o")});
    EXPECT_EQ(r.code, cli::exit_error);
    EXPECT_NE(r.err.find("inside a section"), std::string::npos);

    cfg = write("d.ini", "[run]\ncommand = audit\npreset = scalar-linear-osc\n");
    r = run_cli({"simulate", "--config", cfg.string(), "--out", at("o")});
    EXPECT_EQ(r.code, cli::exit_error);
    EXPECT_NE(r.err.find("run.command"), std::string::npos);
    EXPECT_FALSE(fs::exists(dir_ / "o"));
}

TEST_F(Cli, MalformedValuesRejected) {
    for (const std::vector<std::string>& extra :
         {std::vector<std::string>{"--dt", "fast"}, {"--dt", "0"}, {"--T", "1x"}, {"--scheme", "rk4"},
          {"--threads", "0"}, {"--format", "png"}, {"--seed", "-1"}, {"--eps", "2"}}) {
        std::vector<std::string> args{"simulate", "--preset", "scalar-linear-osc", "--out", at("bad")};
        args.insert(args.end(), extra.begin(), extra.end());
        EXPECT_EQ(run_cli(args).code, cli::exit_error) << extra[0] << " " << extra[1];
    }
    EXPECT_EQ(run_cli({"simulate", "--out", at("bad")}).code, cli::exit_error);
    EXPECT_EQ(run_cli({"simulate", "--preset", "nope", "--out", at("bad")}).code, cli::exit_error);
}

TEST_F(Cli, LayeringFlagsOverEnvOverConfig) {
    const auto cfg = write("s.ini", "[run]\npreset = scalar-holder-osc\nseed = 5\n[stepper]\nT = 0.01\n");
    auto seed_of = [&](const std::string& sub) {
        const auto m = slurp(dir_ / sub / "manifest.ini");
        const auto pos = m.find("seed = ");
        return m.substr(pos + 7, m.find('\n', pos) - pos - 7);
    };
    ASSERT_EQ(run_cli({"simulate", "--config", cfg.string(), "--out", at("c")}).code, 0);
    EXPECT_EQ(seed_of("c"), "5");
    setenv("AVG_SFPDE_SEED", "6", 1);
    ASSERT_EQ(run_cli({"simulate", "--config", cfg.string(), "--out", at("e")}).code, 0);
    EXPECT_EQ(seed_of("e"), "6");
    ASSERT_EQ(run_cli({"simulate", "--config", cfg.string(), "--seed", "7", "--out", at("f")}).code, 0);
    EXPECT_EQ(seed_of("f"), "7");
    // the preset default applies when nothing overrides T
    unsetenv("AVG_SFPDE_SEED");
    ASSERT_EQ(run_cli({"simulate", "--preset", "scalar-holder-osc", "--out", at("d")}).code, 0);
    EXPECT_NE(slurp(dir_ / "d" / "manifest.ini").find("T = 1\n"), std::string::npos);
    EXPECT_EQ(seed_of("d"), "1");
}

TEST_F(Cli, SweepOutputsAndFormats) {
    auto r = run_cli({"sweep-averaging", "--preset", "degenerate-constant", "--modes", "4", "--T", "0.05", "--paths",
                      "4", "--out", at("avg")});
    ASSERT_EQ(r.code, cli::exit_pass) << r.err;
    const auto csv = slurp(dir_ / "avg" / "averaging.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "eps,d,paths,mean_sup_sq_error,std_err,censored");
    EXPECT_NE(csv.find("0.5,"), std::string::npos);
    const auto svg = slurp(dir_ / "avg" / "averaging.svg");
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
    EXPECT_NE(r.out.find("overall: PASS"), std::string::npos);

    r = run_cli({"sweep-khasminskii", "--preset", "scalar-holder-osc", "--T", "0.4", "--paths", "4", "--d", "0.2,0.1",
                 "--format", "csv", "--out", at("kh")});
    EXPECT_NE(r.code, cli::exit_error) << r.err;
    const auto kh = slurp(dir_ / "kh" / "khasminskii_path.csv");
    EXPECT_EQ(kh.substr(0, kh.find('\n')), "eps,d,paths,mean_int_sq_error,std_err,censored");
    EXPECT_FALSE(fs::exists(dir_ / "kh" / "khasminskii_path.svg"));
    EXPECT_TRUE(fs::exists(dir_ / "kh" / "khasminskii_segment.csv"));

    r = run_cli({"sweep-continuity", "--preset", "scalar-holder-osc", "--T", "0.2", "--paths", "4", "--out",
                 at("co")});
    EXPECT_EQ(r.code, cli::exit_pass) << r.out << r.err;
    const auto cc = slurp(dir_ / "co" / "continuity.csv");
    EXPECT_EQ(cc.substr(0, cc.find('\n')), "eps,delta,paths,mean_sup_sq_error,std_err,censored");
    EXPECT_EQ(std::count(cc.begin(), cc.end(), '\n'), 5);
}

TEST_F(Cli, ReplayIsByteIdentical) {
    ASSERT_NE(run_cli({"sweep-averaging", "--preset", "scalar-holder-osc", "--T", "0.2", "--paths", "6", "--eps",
                       "0.1,0.01", "--seed", "42", "--out", at("first")})
                  .code,
              cli::exit_error);
    // replay ignores environment overrides
    setenv("AVG_SFPDE_SEED", "9", 1);
    const auto r = run_cli({"replay", at("first/manifest.ini"), "--out", at("second")});
    EXPECT_NE(r.code, cli::exit_error) << r.err;
    for (const auto& entry : fs::directory_iterator(dir_ / "first")) {
        const auto name = entry.path().filename();
        EXPECT_EQ(slurp(entry.path()), slurp(dir_ / "second" / name)) << name;
    }
}

TEST_F(Cli, ThreadCountDoesNotChangeOutput) {
    ASSERT_NE(run_cli({"sweep-averaging", "--preset", "scalar-holder-osc", "--T", "0.2", "--paths", "12", "--threads",
                       "1", "--out", at("one")})
                  .code,
              cli::exit_error);
    setenv("AVG_SFPDE_THREADS", "4", 1);
    ASSERT_NE(run_cli({"sweep-averaging", "--preset", "scalar-holder-osc", "--T", "0.2", "--paths", "12", "--out",
                       at("four")})
                  .code,
              cli::exit_error);
    EXPECT_NE(slurp(dir_ / "four" / "manifest.ini").find("threads = 4"), std::string::npos);
    EXPECT_EQ(slurp(dir_ / "one" / "averaging.csv"), slurp(dir_ / "four" / "averaging.csv"));
}

TEST_F(Cli, AuditExitCodes) {
    auto r = run_cli({"audit", "--preset", "broken-quadratic", "--growth-trials", "200", "--holder-trials", "100",
                      "--h5-trials", "100", "--coercivity-trials", "100", "--monotone-trials", "100", "--out",
                      at("broken")});
    EXPECT_EQ(r.code, cli::exit_fail);
    EXPECT_NE(r.out.find("FAIL H2 growth"), std::string::npos);
    r = run_cli({"audit", "--preset", "scalar-holder-osc", "--growth-trials", "200", "--holder-trials", "200",
                 "--h5-trials", "200", "--coercivity-trials", "100", "--monotone-trials", "100", "--out", at("ok")});
    EXPECT_EQ(r.code, cli::exit_pass) << r.out;
    EXPECT_NE(slurp(dir_ / "ok" / "manifest.ini").find("holder_trials = 200"), std::string::npos);
    // stepping flags do not exist on audit
    EXPECT_EQ(run_cli({"audit", "--preset", "scalar-holder-osc", "--dt", "0.1"}).code, cli::exit_error);
}

TEST(CliResolve, ManifestRoundTripsThroughResolve) {
    cli::RawConfig raw{{"run.preset", "porous-media-sin"}, {"run.modes", "6"}, {"stepper.dt", "0.0005"},
                       {"sweep.eps_grid", "0.3,0.03"}, {"sweep.paths", "10"}};
    const auto rc = cli::resolve("sweep-averaging", raw);
    const auto text = cli::manifest_text(rc);
    const auto tmp = fs::temp_directory_path() / "avg_sfpde_roundtrip.ini";
    std::ofstream(tmp) << text;
    const auto again = cli::resolve("sweep-averaging", cli::read_config(tmp));
    EXPECT_EQ(cli::manifest_text(again), text);
    EXPECT_EQ(again.eps_grid, (std::vector<double>{0.3, 0.03}));
    EXPECT_EQ(again.modes, std::optional<std::size_t>(6));
    EXPECT_EQ(again.stepper.dt, 5e-4);
    fs::remove(tmp);
}
