#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "avgsfpde/experiments.hpp"

using namespace avgsfpde;

namespace {

SweepPlan plan_for(const Preset& p, std::vector<double> eps, std::size_t paths, double T, unsigned threads = 1) {
    SweepPlan plan;
    plan.eps_grid = std::move(eps);
    plan.paths = paths;
    plan.stepper = p.stepper;
    plan.stepper.T = T;
    plan.stepper.seed = 1;
    plan.threads = threads;
    return plan;
}

// closed-form sup over the time grid of |int_0^t e^{-(t-s)} sin(s/eps) ds|^2
double linear_osc_oracle(double eps, double dt, double T) {
    const double w = 1.0 / eps;
    double best = 0.0;
    const auto n = static_cast<std::size_t>(std::llround(T / dt));
    for (std::size_t i = 0; i <= n; ++i) {
        const double t = i * dt;
        const double v = (std::sin(w * t) - w * std::cos(w * t) + w * std::exp(-t)) / (1.0 + w * w);
        best = std::max(best, v * v);
    }
    return best;
}

// int over [kd, (k+1)d) of (e^{-l t} - e^{-l kd})^2 dt, summed over blocks in [0, T]
double heat_block_oracle(double lambda, double d, double T, double c0) {
    double total = 0.0;
    const auto blocks = static_cast<std::size_t>(std::llround(T / d));
    for (std::size_t k = 0; k < blocks; ++k) {
        const double u = c0 * std::exp(-lambda * k * d);
        total += u * u *
                 (d - 2.0 * (1.0 - std::exp(-lambda * d)) / lambda + (1.0 - std::exp(-2.0 * lambda * d)) / (2.0 * lambda));
    }
    return total;
}

}  // namespace

TEST(ForEachPath, VisitsEveryIndexOnceAndRethrowsLowest) {
    std::vector<int> hits(100, 0);
    for_each_path(100, 4, [&](std::size_t i) { ++hits[i]; });
    for (int h : hits) EXPECT_EQ(h, 1);
    try {
        for_each_path(50, 3, [](std::size_t i) {
            if (i == 7 || i == 30) throw std::runtime_error(std::to_string(i));
        });
        FAIL();
    } catch (const std::runtime_error& e) {
        EXPECT_STREQ(e.what(), "7");
    }
    for_each_path(0, 4, [](std::size_t) { FAIL(); });
}

TEST(AveragingSweep, DegenerateCouplingIsExactlyZero) {
    const auto p = make_preset("degenerate-constant", {.modes = 8});
    const auto rep = averaging_sweep(p, plan_for(p, p.eps_grid, 8, 0.2));
    ASSERT_EQ(rep.rows.size(), 3u);
    for (const auto& r : rep.rows) {
        EXPECT_EQ(r.mean, 0.0);
        EXPECT_EQ(r.std_err, 0.0);
    }
    EXPECT_TRUE(rep.passed());
    EXPECT_FALSE(rep.fit.valid);
}

TEST(AveragingSweep, LinearOscillatorMatchesOracleAndSlope) {
    const auto p = make_preset("scalar-linear-osc");
    const auto rep = averaging_sweep(p, plan_for(p, p.eps_grid, 8, 1.0));
    ASSERT_EQ(rep.rows.size(), 3u);
    for (const auto& r : rep.rows) {
        const double oracle = linear_osc_oracle(r.eps, p.stepper.dt, 1.0);
        EXPECT_NEAR(r.mean, oracle, 0.05 * oracle) << "eps = " << r.eps;
        EXPECT_NEAR(r.d, std::sqrt(r.eps), p.stepper.dt);
    }
    EXPECT_NEAR(rep.fit.slope, 2.0, 0.3);
    EXPECT_TRUE(rep.passed());
}

TEST(AveragingSweep, ThreadCountDoesNotChangeRows) {
    const auto p = make_preset("scalar-holder-osc");
    const auto a = averaging_sweep(p, plan_for(p, {0.1, 0.01}, 24, 0.5, 1));
    const auto b = averaging_sweep(p, plan_for(p, {0.1, 0.01}, 24, 0.5, 4));
    ASSERT_EQ(a.rows.size(), b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        EXPECT_EQ(a.rows[i].mean, b.rows[i].mean);
        EXPECT_EQ(a.rows[i].std_err, b.rows[i].std_err);
    }
}

TEST(AveragingSweep, StandardErrorShrinksWithRootTwo) {
    const auto p = make_preset("scalar-holder-osc");
    const auto small = averaging_sweep(p, plan_for(p, {0.1}, 1500, 0.5));
    const auto large = averaging_sweep(p, plan_for(p, {0.1}, 3000, 0.5));
    const double ratio = small.rows[0].std_err / large.rows[0].std_err;
    EXPECT_NEAR(ratio, std::sqrt(2.0), 0.1 * std::sqrt(2.0));
}

TEST(AveragingSweep, PlanValidation) {
    const auto p = make_preset("scalar-holder-osc");
    EXPECT_THROW(averaging_sweep(p, plan_for(p, {}, 8, 0.1)), ArgumentError);
    EXPECT_THROW(averaging_sweep(p, plan_for(p, {0.01, 0.1}, 8, 0.1)), ArgumentError);
    EXPECT_THROW(averaging_sweep(p, plan_for(p, {2.0}, 8, 0.1)), ArgumentError);
    EXPECT_THROW(averaging_sweep(p, plan_for(p, {0.1}, 1, 0.1)), ArgumentError);
    auto plan = plan_for(p, {0.1, 0.01}, 8, 0.1);
    plan.d_fixed = {0.1};
    EXPECT_THROW(averaging_sweep(p, plan), ArgumentError);
}

TEST(AveragingSweep, BlowUpAtLargestEpsAborts) {
    auto p = make_preset("reaction-diffusion-delay", {.modes = 2});
    p.initial = HistoryBuffer(p.space(), p.h(), p.initial.tail(), {1e160, 0.0});
    try {
        averaging_sweep(p, plan_for(p, {0.5, 0.1}, 2, 0.01));
        FAIL() << "expected abort";
    } catch (const SweepAborted& e) {
        EXPECT_NE(e.diagnostics.find("path 0"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("eps = 0.5"), std::string::npos);
    }
}

TEST(Khasminskii, HeatBlocksMatchClosedForm) {
    const auto p = make_preset("heat-decay");
    auto cfg = p.stepper;
    cfg.eps = 0.1;
    const auto rep = khasminskii_diagnostic(p, p.d_grid, 1, cfg, 1);
    const double lambda = std::pow(std::numbers::pi / 4.0, 2.0);
    ASSERT_EQ(rep.path.rows.size(), 3u);
    for (const auto& r : rep.path.rows) {
        const double oracle = heat_block_oracle(lambda, r.d, 1.0, 1.0);
        EXPECT_NEAR(r.mean, oracle, 0.05 * oracle) << "d = " << r.d;
    }
    EXPECT_NEAR(rep.path.fit.slope, 2.0, 0.1);
    EXPECT_TRUE(rep.passed());
}

TEST(Khasminskii, OuSlopeAtLeastPointThreeFive) {
    const auto p = make_preset("ou-scalar");
    auto cfg = p.stepper;
    cfg.seed = 1;
    const auto rep = khasminskii_diagnostic(p, p.d_grid, 64, cfg, 1);
    EXPECT_GE(rep.path.fit.slope, 0.35);
    EXPECT_GE(rep.segment.fit.slope, 0.35);
    for (std::size_t i = 1; i < rep.path.rows.size(); ++i) {
        EXPECT_LT(rep.path.rows[i].mean, rep.path.rows[i - 1].mean);
    }
    EXPECT_TRUE(rep.passed());
}

TEST(Khasminskii, GridValidation) {
    const auto p = make_preset("ou-scalar");
    EXPECT_THROW(khasminskii_diagnostic(p, {}, 4, p.stepper, 1), ArgumentError);
    EXPECT_THROW(khasminskii_diagnostic(p, {0.1, 0.2}, 4, p.stepper, 1), ArgumentError);
    EXPECT_THROW(khasminskii_diagnostic(p, {0.0015}, 4, p.stepper, 1), ArgumentError);
    EXPECT_THROW(khasminskii_diagnostic(p, {0.1}, 0, p.stepper, 1), ArgumentError);
}

TEST(Continuity, HolderPresetRowsDecreaseAndZeroRowVanishes) {
    const auto p = make_preset("scalar-holder-osc");
    auto cfg = p.stepper;
    cfg.eps = 0.1;
    const auto rep = continuity_study(p, p.delta_grid, 32, cfg, 1);
    ASSERT_EQ(rep.rows.size(), 4u);
    EXPECT_EQ(rep.rows.back().delta, 0.0);
    EXPECT_EQ(rep.rows.back().mean, 0.0);
    EXPECT_TRUE(rep.passed());
    for (std::size_t i = 1; i + 1 < rep.rows.size(); ++i) EXPECT_LT(rep.rows[i].mean, rep.rows[i - 1].mean);
}

TEST(Continuity, LinearPresetRowsAreDeltaSquared) {
    const auto p = make_preset("scalar-linear-osc");
    auto cfg = p.stepper;
    cfg.eps = 0.1;
    cfg.dt = 1e-3;
    const auto rep = continuity_study(p, p.delta_grid, 4, cfg, 1);
    for (std::size_t i = 0; i + 1 < rep.rows.size(); ++i) {
        const double d = rep.rows[i].delta;
        EXPECT_NEAR(rep.rows[i].mean, d * d, 0.1 * d * d);
    }
    EXPECT_NEAR(rep.fit.slope, 2.0, 1e-6);
}

TEST(Continuity, GridValidation) {
    const auto p = make_preset("scalar-holder-osc");
    EXPECT_THROW(continuity_study(p, {}, 4, p.stepper, 1), ArgumentError);
    EXPECT_THROW(continuity_study(p, {0.01, 0.1}, 4, p.stepper, 1), ArgumentError);
    EXPECT_THROW(continuity_study(p, {0.1, 0.0}, 4, p.stepper, 1), ArgumentError);
}

TEST(Apriori, ConstantStableUnderPathDoubling) {
    for (const auto* name : {"scalar-holder-osc", "scalar-linear-osc", "reaction-diffusion-delay", "porous-media-sin"}) {
        const auto p = make_preset(name, has_variable_dimension(name) ? PresetOptions{.modes = 4} : PresetOptions{});
        auto cfg = p.stepper;
        cfg.eps = 0.1;
        cfg.seed = 3;
        if (cfg.dt < 1e-3) cfg.dt = 1e-3;
        const auto rep = apriori_audit(p, 100, cfg, 1);
        EXPECT_GT(rep.C, 0.0) << name;
        EXPECT_TRUE(rep.stable(0.2)) << name << ": C = " << rep.C << ", doubled " << rep.C_doubled;
        for (std::size_t i = 0; i < rep.scales.size(); ++i)
            EXPECT_LE(rep.moments[i], rep.C * (1.0 + rep.seminorms[i] * rep.seminorms[i]) * (1.0 + 1e-12));
    }
}

TEST(Refinement, FirstOrderOnFieldPresets) {
    for (const auto* name : {"porous-media-sin", "reaction-diffusion-delay"}) {
        const auto rep = dt_refinement(make_preset(name, {.modes = 8}), 1e-2, 4, 1.0);
        EXPECT_TRUE(rep.passed()) << name << ": slope " << rep.fit.slope;
        EXPECT_EQ(rep.differences.size(), 3u);
    }
    EXPECT_THROW(dt_refinement(make_preset("heat-decay"), 1e-2, 2), ArgumentError);
}

TEST(Audit, BrokenQuadraticFailsGrowthWithWitness) {
    AuditOptions opt;
    opt.holder_trials = opt.h5_trials = opt.growth_trials = opt.coercivity_trials = opt.monotone_trials = 300;
    const auto rep = hypothesis_audit(make_preset("broken-quadratic"), opt);
    const auto* h2 = rep.find("H2");
    ASSERT_NE(h2, nullptr);
    EXPECT_FALSE(h2->pass);
    EXPECT_NE(h2->detail.find("witness"), std::string::npos);
    EXPECT_FALSE(rep.passed());
}

TEST(Audit, ShippedPresetsPassAtReducedTrials) {
    AuditOptions opt;
    opt.holder_trials = opt.h5_trials = opt.growth_trials = opt.coercivity_trials = opt.monotone_trials = 300;
    for (const auto& name : preset_names()) {
        const auto rep = hypothesis_audit(make_preset(name), opt);
        for (const auto& v : rep.verdicts) EXPECT_TRUE(v.pass) << name << " " << v.name << ": " << v.detail;
        EXPECT_EQ(rep.verdicts.size(), 7u);
    }
}
