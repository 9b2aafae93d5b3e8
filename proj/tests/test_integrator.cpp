#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "avgsfpde/integrator.hpp"
#include "avgsfpde/presets.hpp"
#include "avgsfpde/stats.hpp"

using namespace avgsfpde;
using std::numbers::pi;

namespace {

StepperConfig config(double dt, double T, std::optional<double> eps = std::nullopt, std::uint64_t seed = 1) {
    StepperConfig cfg;
    cfg.dt = dt;
    cfg.T = T;
    cfg.eps = eps;
    cfg.seed = seed;
    return cfg;
}

CoefficientSet silent() {
    CoefficientSet cs;
    cs.diffusion.form = AdditiveNoise{};
    return cs;
}

struct Samples {
    std::vector<double> xs;
    void push(double x) { xs.push_back(x); }
    double mean() const { return summarize(xs).mean; }
    double std_err() const { return summarize(xs).std_err; }
};

// integral_0^t e^{-(t-s)} sin(w s) ds
double convolution(double t, double w) {
    return (std::sin(w * t) - w * std::cos(w * t) + w * std::exp(-t)) / (1.0 + w * w);
}

}  // namespace

TEST(Step, HeatDecayMatchesDiscreteFactor) {
    const auto space = SpectralSpace::interval(1.0, 4);
    const auto buf = HistoryBuffer::constant(space, 1.0, {2.0, 0.0, 0.0, 0.0});
    const auto tr = run_path(PdeOperator::pure_laplacian(), silent(), buf, config(0.1, 1.0), 0);
    const double lambda = pi * pi;
    EXPECT_NEAR(tr.state(10)[0], 2.0 * std::pow(1.0 + 0.1 * lambda, -10.0), 1e-15);
    for (std::size_t i = 1; i < 4; ++i) EXPECT_EQ(tr.state(10)[i], 0.0);
}

TEST(Step, HeatDecayConvergesUnderRefinement) {
    // At dt = 0.1 the implicit factor overstates e^{-pi^2} twentyfold; the
    // relative error must shrink at first order as dt is refined.
    const auto space = SpectralSpace::interval(1.0, 4);
    const auto buf = HistoryBuffer::constant(space, 1.0, {1.0, 0.0, 0.0, 0.0});
    const double exact = std::exp(-pi * pi);
    double prev = std::numeric_limits<double>::infinity();
    for (double dt : {1e-2, 5e-3, 2.5e-3, 1.25e-3}) {
        const auto tr = run_path(PdeOperator::pure_laplacian(), silent(), buf, config(dt, 1.0), 0);
        const double rel = std::abs(tr.state(tr.size() - 1)[0] / exact - 1.0);
        EXPECT_LT(rel, prev);
        if (std::isfinite(prev)) {
            EXPECT_NEAR(prev / rel, 2.0, 0.35) << "dt = " << dt;
        }
        prev = rel;
    }
    EXPECT_LT(prev, 0.1);
}

TEST(Step, ZeroStaysZero) {
    const auto space = SpectralSpace::interval(1.0, 4);
    for (const auto& op : {PdeOperator::pure_laplacian(), PdeOperator::porous_media(3.0),
                           PdeOperator::reaction_diffusion(3.0)}) {
        const auto tr = run_path(op, silent(), HistoryBuffer::constant(space, 1.0, std::vector<double>(4, 0.0)),
                                 config(1e-2, 1.0), 0);
        for (double v : tr.states) EXPECT_EQ(v, 0.0);
    }
}

TEST(Step, OrnsteinUhlenbeckVariance) {
    const auto p = make_preset("ou-scalar");
    const auto cfg = config(1e-3, 1.0, std::nullopt, 2024);
    Samples stats;
    for (std::uint64_t path = 0; path < 10000; ++path) {
        const auto tr = run_path(p.op, p.cs, p.initial, cfg, path);
        const double u = tr.state(tr.size() - 1)[0];
        stats.push(u * u);
    }
    const double exact = (1.0 - std::exp(-2.0)) / 2.0;
    EXPECT_NEAR(exact, 0.4323, 1e-4);
    EXPECT_LT(std::abs(stats.mean() - exact), 3.0 * stats.std_err())
        << "mean " << stats.mean() << " se " << stats.std_err();
}

TEST(Step, DeterministicForFixedSeedAndPath) {
    const auto p = make_preset("porous-media-sin", {.modes = 4});
    auto cfg = p.stepper;
    cfg.T = 0.1;
    cfg.seed = 99;
    const auto a = run_path(p.op, p.cs, p.initial, cfg, 3);
    const auto b = run_path(p.op, p.cs, p.initial, cfg, 3);
    EXPECT_EQ(a.states, b.states);
    const auto c = run_path(p.op, p.cs, p.initial, cfg, 4);
    EXPECT_NE(a.states, c.states);
}

TEST(Step, ConfigValidation) {
    const auto p = make_preset("heat-decay");
    auto cfg = config(0.0, 1.0);
    EXPECT_THROW(run_path(p.op, p.cs, p.initial, cfg, 0), ArgumentError);
    cfg = config(0.3, 1.0);
    EXPECT_THROW(run_path(p.op, p.cs, p.initial, cfg, 0), ArgumentError);
    cfg = config(1e-2, 1e-3);
    EXPECT_THROW(run_path(p.op, p.cs, p.initial, cfg, 0), ArgumentError);
    cfg = config(1e-2, 1.0, 2.0);
    EXPECT_THROW(run_path(p.op, p.cs, p.initial, cfg, 0), ArgumentError);
    // explicit stability guard dt * lambda_k < 2; lambda_4 = pi^2 on (0, 4)
    cfg = config(0.25, 1.0);
    cfg.scheme = Scheme::explicit_em;
    EXPECT_THROW(run_path(p.op, p.cs, p.initial, cfg, 0), ArgumentError);
    cfg.dt = 0.1;
    EXPECT_NO_THROW(run_path(p.op, p.cs, p.initial, cfg, 0));
    EXPECT_EQ(parse_scheme(to_string(Scheme::explicit_em)), Scheme::explicit_em);
    EXPECT_THROW(parse_scheme("rk4"), ArgumentError);
    // a scalar operator on a field space
    EXPECT_THROW(run_path(PdeOperator::scalar_linear(1.0), p.cs, p.initial, config(0.1, 1.0), 0), ArgumentError);
}

TEST(StepProperty, SegmentNormDominatesState) {
    for (const auto* name : {"reaction-diffusion-delay", "scalar-holder-osc", "porous-media-sin"}) {
        const auto p = make_preset(name, has_variable_dimension(name) ? PresetOptions{.modes = 4} : PresetOptions{});
        auto cfg = p.stepper;
        cfg.T = 0.2;
        cfg.seed = 5;
        PathState s(p.op, p.cs, p.initial, cfg.seed, 0);
        for (std::size_t n = 0; n < cfg.steps(); ++n) {
            step(s, p.op, p.cs, cfg);
            const double norm = SpectralSpace::norm(s.state());
            ASSERT_LE(norm, s.seminorm() * (1.0 + 1e-12)) << name << " step " << n;
            ASSERT_NEAR(s.seminorm(), seminorm_h(s.buffer(), s.time()), 1e-9 * (1.0 + s.seminorm())) << name;
        }
    }
}

TEST(StepRetry, HalvingRecoversOverflowingStep) {
    // A drift of 1e308 overflows at dt = 4 and 2 but not at 1, where the
    // sign flip keeps the second substep finite.
    CoefficientSet cs;
    cs.drift.terms = {PointwiseTerm{
        ScalarMap::custom([](double u) { return u < 1e300 ? 1e308 : -1e308; }, "overflow probe")}};
    cs.diffusion.form = AdditiveNoise{{0.0}};
    const auto buf = HistoryBuffer::constant_scalar(1.0, 0.0);
    const auto tr = run_path(PdeOperator::scalar_linear(1.0), cs, buf, config(4.0, 4.0), 0);
    ASSERT_EQ(tr.size(), 2u);
    const double u = tr.state(1)[0];
    EXPECT_TRUE(std::isfinite(u));
    // four unit substeps of u <- (u + f(u)) / 2
    double v = 0.0;
    for (int i = 0; i < 4; ++i) v = (v + (v < 1e300 ? 1e308 : -1e308)) / 2.0;
    EXPECT_EQ(u, v);
}

TEST(StepRetry, GenuineBlowUpReported) {
    const auto p = make_preset("reaction-diffusion-delay", {.modes = 2});
    const HistoryBuffer huge(p.space(), p.h(), p.initial.tail(), {1e160, 0.0});
    auto cfg = p.stepper;
    cfg.T = 0.01;
    try {
        run_path(p.op, p.cs, huge, cfg, 0);
        FAIL() << "expected blow-up";
    } catch (const BlowUpError& e) {
        EXPECT_EQ(e.t, 0.0);
        EXPECT_EQ(e.mode, 0u);
        EXPECT_NE(std::string(e.what()).find("4 step halvings"), std::string::npos);
    }
}

TEST(WienerProperty, BridgeLevelsSumToParent) {
    const NoiseSource noise(17, 3);
    for (std::uint64_t n = 0; n < 50; ++n) {
        for (std::uint32_t mode = 0; mode < 3; ++mode) {
            const double base = wiener_increment(noise, n, mode, 0.01);
            for (std::uint32_t level = 1; level <= 4; ++level) {
                double sum = 0.0;
                for (std::uint32_t sub = 0; sub < (1u << level); ++sub)
                    sum += wiener_increment(noise, n, mode, 0.01, level, sub);
                ASSERT_NEAR(sum, base, 1e-14);
            }
        }
    }
}

TEST(WienerProperty, SubIncrementVariance) {
    const NoiseSource noise(18, 0);
    const double dt = 0.04;
    for (std::uint32_t level : {0u, 2u}) {
        Samples s;
        for (std::uint64_t n = 0; n < 20000; ++n) {
            const double w = wiener_increment(noise, n, 0, dt, level, 1u % (1u << level));
            s.push(w * w);
        }
        const double want = dt / static_cast<double>(1u << level);
        EXPECT_LT(std::abs(s.mean() - want), 4.0 * s.std_err()) << "level " << level;
    }
}

TEST(CoupledRun, ConstantOscillatorGivesExactlyZero) {
    const auto p = make_preset("degenerate-constant", {.modes = 4});
    auto cfg = p.stepper;
    cfg.T = 0.2;
    auto fast = cfg;
    fast.eps = 0.01;
    auto slow = cfg;
    slow.eps.reset();
    const auto r = coupled_run(p.op, p.cs, p.initial, fast, slow, 7);
    EXPECT_EQ(r.sup_error, 0.0);
    EXPECT_EQ(r.fast.states, r.averaged.states);
}

TEST(CoupledRun, ScalarGapMatchesConvolutionOracle) {
    const auto p = make_preset("scalar-linear-osc");
    for (double eps : {0.1, 0.01}) {
        auto fast = p.stepper;
        fast.eps = eps;
        auto slow = p.stepper;
        slow.eps.reset();
        const auto r = coupled_run(p.op, p.cs, p.initial, fast, slow, 0);
        double oracle = 0.0;
        for (std::size_t i = 0; i < r.fast.size(); ++i)
            oracle = std::max(oracle, std::abs(convolution(r.fast.times[i], 1.0 / eps)));
        // shared noise cancels: the gap is the deterministic convolution
        EXPECT_NEAR(std::sqrt(r.sup_error), oracle, 0.02 * oracle) << "eps = " << eps;
        // once e^{-t} has decayed the sup is about 2 eps, not eps
        if (eps < 0.05) {
            EXPECT_NEAR(oracle, 2.0 * eps / (1.0 + eps * eps), 0.1 * eps);
            EXPECT_GT(oracle, 0.011);
        }
    }
}

TEST(CoupledRun, LargeEpsWorseThanSmallEps) {
    const auto p = make_preset("scalar-holder-osc");
    auto slow = p.stepper;
    slow.eps.reset();
    slow.seed = 3;
    auto at = [&](double eps) {
        auto fast = slow;
        fast.eps = eps;
        return coupled_run(p.op, p.cs, p.initial, fast, slow, 0).sup_error;
    };
    const double big = at(1.0), small = at(0.01);
    EXPECT_GT(big, 0.0);
    EXPECT_GT(big, small);
}

TEST(CoupledRun, ReproducibleAndValidated) {
    const auto p = make_preset("scalar-holder-osc");
    auto slow = p.stepper;
    slow.eps.reset();
    auto fast = slow;
    fast.eps = 0.1;
    const auto a = coupled_run(p.op, p.cs, p.initial, fast, slow, 11);
    const auto b = coupled_run(p.op, p.cs, p.initial, fast, slow, 11);
    EXPECT_EQ(a.sup_error, b.sup_error);
    auto other = slow;
    other.seed = 2;
    EXPECT_THROW(coupled_run(p.op, p.cs, p.initial, fast, other, 0), ArgumentError);
    other = slow;
    other.dt = 2e-3;
    EXPECT_THROW(coupled_run(p.op, p.cs, p.initial, fast, other, 0), ArgumentError);
    EXPECT_THROW(coupled_run(p.op, p.cs, p.initial, slow, slow, 0), ArgumentError);
    EXPECT_THROW(sup_squared_gap(a.fast, Trajectory{}), ArgumentError);
}

TEST(Freeze, IdentityCasesAndErrors) {
    const auto p = make_preset("ou-scalar");
    const auto tr = run_path(p.op, p.cs, p.initial, config(1e-2, 1.0), 0);
    EXPECT_EQ(khasminskii_freeze(tr, 1e-2).states, tr.states);
    EXPECT_EQ(frozen_gap_integral(tr, 1e-2) > 0.0, true);
    Trajectory flat;
    flat.dim = 2;
    for (int i = 0; i <= 100; ++i) flat.push(i * 0.01, std::vector<double>{1.5, -0.5});
    EXPECT_EQ(khasminskii_freeze(flat, 0.2).states, flat.states);
    EXPECT_EQ(frozen_gap_integral(flat, 0.2), 0.0);
    EXPECT_THROW(khasminskii_freeze(tr, 0.015), ArgumentError);
    EXPECT_THROW(khasminskii_freeze(tr, 0.001), ArgumentError);
}

TEST(Freeze, BlockValuesAreLeftEndpoints) {
    const auto p = make_preset("ou-scalar");
    const auto tr = run_path(p.op, p.cs, p.initial, config(1e-2, 1.0), 4);
    const auto fr = khasminskii_freeze(tr, 0.1);
    for (std::size_t i = 0; i < tr.size(); ++i) EXPECT_EQ(fr.state(i)[0], tr.state((i / 10) * 10)[0]);
}

TEST(Freeze, GapIntegralOnExponentialMatchesClosedForm) {
    const double lambda = 2.0, dt = 1e-4, d = 0.1;
    Trajectory tr;
    tr.dim = 1;
    for (int i = 0; i <= 10000; ++i) tr.push(i * dt, std::vector<double>{std::exp(-lambda * i * dt)});
    double closed = 0.0;
    for (int k = 0; k < 10; ++k)
        closed += std::exp(-2.0 * lambda * k * d) *
                  (d - 2.0 * (1.0 - std::exp(-lambda * d)) / lambda + (1.0 - std::exp(-2.0 * lambda * d)) / (2.0 * lambda));
    EXPECT_NEAR(frozen_gap_integral(tr, d), closed, 1e-6 * closed);
}

TEST(Freeze, OuGapDecreasesWithBlockLength) {
    const auto p = make_preset("ou-scalar");
    std::vector<double> means;
    for (double d : {0.2, 0.1, 0.05}) {
        Samples s;
        for (std::uint64_t path = 0; path < 64; ++path)
            s.push(frozen_gap_integral(run_path(p.op, p.cs, p.initial, config(1e-3, 1.0), path), d));
        means.push_back(s.mean());
    }
    EXPECT_GT(means[0], means[1]);
    EXPECT_GT(means[1], means[2]);
}

TEST(Freeze, SegmentGapDominatesPointGap) {
    const auto p = make_preset("ou-scalar");
    const auto tr = run_path(p.op, p.cs, p.initial, config(1e-3, 1.0), 9);
    EXPECT_GE(frozen_segment_gap_integral(tr, 0.1, 1.0), frozen_gap_integral(tr, 0.1) * (1.0 - 1e-9));
}
