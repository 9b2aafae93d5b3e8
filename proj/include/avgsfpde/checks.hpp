#pragma once

// Sampling falsifiers for the growth, coercivity, monotonicity, Hoelder,
// one-sided pairing and averaging-rate hypotheses. A PASS means no sampled
// witness violated the inequality; a FAIL carries the worst witness.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "avgsfpde/coefficients.hpp"
#include "avgsfpde/errors.hpp"
#include "avgsfpde/history.hpp"
#include "avgsfpde/spectral.hpp"

namespace avgsfpde {

struct CheckReport {
    std::string name;
    bool pass = true;
    /// Largest observed ratio (or excess) against the hypothesis bound.
    double worst = 0.0;
    double bound = 0.0;
    std::size_t trials = 0;
    std::string witness;
};

/// Draws histories from the constant, single-exponential and random-walk
/// families, rescaled to a requested seminorm.
class HistorySampler {
public:
    enum class Family { constant, exponential, walk };

    struct Shape {
        Family family = Family::constant;
        double rate = 0.0;
        std::size_t samples = 0;
    };

    HistorySampler(SpectralSpace space, double h, std::uint64_t seed) : space_(std::move(space)), h_(h), rng_(seed) {}

    Shape draw_shape() {
        Shape s;
        s.family = static_cast<Family>(std::uniform_int_distribution<int>(0, 2)(rng_));
        if (s.family == Family::exponential) s.rate = std::uniform_real_distribution<double>(-h_, 2.0 * h_)(rng_);
        if (s.family == Family::walk) s.samples = 16;
        return s;
    }

    /// A history of the given shape with ||phi||_h equal to `seminorm`.
    HistoryBuffer draw(const Shape& shape, double seminorm) {
        auto profile = direction();
        const auto tail = shape.family == Family::exponential ? TailProfile::exponential(shape.rate)
                                                              : TailProfile::constant();
        HistoryBuffer buf(space_, h_, tail, profile);
        if (shape.family == Family::walk) {
            std::vector<double> u(profile);
            std::normal_distribution<double> z;
            for (std::size_t j = 1; j <= shape.samples; ++j) {
                for (std::size_t i = 0; i < u.size(); ++i) u[i] += 0.5 * z(rng_) / static_cast<double>(i + 1);
                buf.append(0.25 * static_cast<double>(j), u);
            }
        }
        const double sn = seminorm_h(buf, buf.head());
        if (sn > 0.0) buf.scale(seminorm / sn);
        return buf;
    }

    /// A pair of same-shape histories inside the ball of radius `radius`:
    /// independent, near-coincident, or both tiny.
    std::pair<HistoryBuffer, HistoryBuffer> draw_pair(double radius) {
        const auto shape = draw_shape();
        const int mode = std::uniform_int_distribution<int>(0, 2)(rng_);
        auto decade = [&] { return std::pow(10.0, -std::uniform_real_distribution<double>(1.0, 8.0)(rng_)); };
        auto within = [&] { return radius * std::uniform_real_distribution<double>(0.0, 1.0)(rng_); };
        if (mode == 0) return {draw(shape, within()), draw(shape, within())};
        if (mode == 2) return {draw(shape, radius * decade()), draw(shape, radius * decade())};
        auto a = draw(shape, within());
        auto offset = draw(shape, radius * decade());
        offset.scale(-1.0);
        auto b = a - offset;
        const double worst = std::max(seminorm_h(a, a.head()), seminorm_h(b, b.head()));
        if (worst > radius) {
            a.scale(radius / worst);
            b.scale(radius / worst);
        }
        return {std::move(a), std::move(b)};
    }

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

    /// Random Galerkin field with L2 norm `norm`.
    std::vector<double> field(double norm) {
        auto d = direction();
        for (double& c : d) c *= norm;
        return d;
    }

private:
    std::vector<double> direction() {
        std::normal_distribution<double> z;
        std::vector<double> c(space_.dim());
        double n = 0.0;
        do {
            for (std::size_t i = 0; i < c.size(); ++i) c[i] = z(rng_) / static_cast<double>(i + 1);
            n = SpectralSpace::norm(c);
        } while (n == 0.0);
        for (double& v : c) v /= n;
        return c;
    }

    SpectralSpace space_;
    double h_;
    std::mt19937_64 rng_;
};

namespace detail {

inline std::optional<double> check_eps(bool averaged) {
    return averaged ? std::nullopt : std::optional<double>(1.0);
}

inline double gap_norm(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(acc);
}

inline std::string describe_pair(const HistoryBuffer& a, const HistoryBuffer& b, double t) {
    return fmt::format("t={:.6g}, tail={}, |phi|_h={:.6g}, |psi|_h={:.6g}, samples={}", t, a.tail().describe(),
                       seminorm_h(a, a.head()), seminorm_h(b, b.head()), a.size());
}

}  // namespace detail

/// ||f(t,phi) - f(t,psi)|| v ||g(t,phi) - g(t,psi)|| <= L_M ||phi - psi||_h^gamma
/// on pairs inside the ball of radius M. `averaged` tests f*, g* instead.
inline CheckReport check_holder(const CoefficientSet& cs, const SpectralSpace& space, double h, double radius,
                                std::size_t trials, std::uint64_t seed, bool averaged = false) {
    if (trials == 0) throw ArgumentError("check_holder needs at least one trial");
    const auto& prof = cs.profile;
    CheckReport rep{averaged ? "holder(averaged)" : "holder", true, 0.0, prof.L_M, trials, {}};
    HistorySampler sampler(space, h, seed);
    const auto eps = detail::check_eps(averaged);
    for (std::size_t n = 0; n < trials; ++n) {
        auto [a, b] = sampler.draw_pair(radius);
        const double t = sampler.uniform(0.0, 100.0);
        const double dist = seminorm_h(a - b, a.head());
        if (!(dist > 0.0)) continue;
        const double df = detail::gap_norm(eval_drift_coeffs(cs, t, eps, a), eval_drift_coeffs(cs, t, eps, b));
        const double dg = detail::gap_norm(eval_diffusion(cs, t, eps, a), eval_diffusion(cs, t, eps, b));
        const double ratio = std::max(df, dg) / std::pow(dist, prof.gamma);
        if (ratio > rep.worst) {
            rep.worst = ratio;
            rep.witness = fmt::format("{}, |phi-psi|_h={:.6g}, ratio={:.6g}", detail::describe_pair(a, b, t), dist,
                                      ratio);
        }
    }
    rep.pass = rep.worst <= prof.L_M * (1.0 + 1e-12);
    return rep;
}

/// Both one-sided conditions: the drift pairing against mu1 and the squared
/// diffusion gap against mu2.
inline CheckReport check_h5(const CoefficientSet& cs, const SpectralSpace& space, double h, std::size_t trials,
                            std::uint64_t seed, double radius = 10.0) {
    const auto& prof = cs.profile;
    prof.validate(h);
    CheckReport rep{"h5", true, 0.0, 1.0, trials, {}};
    HistorySampler sampler(space, h, seed);
    const auto eps = detail::check_eps(false);
    const auto pow_drift = ScalarMap::abs_power(prof.gamma + 1.0);
    const auto pow_diff = ScalarMap::abs_power(2.0 * prof.gamma);
    auto record = [&](double lhs, double rhs, const std::string& which, const std::string& where) {
        const double tol = 1e-12 * (1.0 + std::abs(rhs));
        double ratio = 0.0;
        if (lhs > rhs + tol) ratio = rhs > 0.0 ? lhs / rhs : std::numeric_limits<double>::infinity();
        else if (rhs > 0.0) ratio = std::max(lhs, 0.0) / rhs;
        if (ratio > rep.worst) {
            rep.worst = ratio;
            rep.witness = fmt::format("{} side: lhs={:.6g}, rhs={:.6g}, {}", which, lhs, rhs, where);
        }
        if (lhs > rhs + tol) rep.pass = false;
    };
    for (std::size_t n = 0; n < trials; ++n) {
        auto [a, b] = sampler.draw_pair(radius);
        const double t = sampler.uniform(0.0, 100.0);
        const auto diff = a - b;
        const auto d0 = diff.head_state();
        const auto fa = eval_drift_coeffs(cs, t, eps, a);
        const auto fb = eval_drift_coeffs(cs, t, eps, b);
        double lhs = 0.0;
        for (std::size_t i = 0; i < fa.size(); ++i) lhs += (fa[i] - fb[i]) * d0[i];
        const double rhs = prof.alpha2 * (std::pow(SpectralSpace::norm(d0), prof.gamma + 1.0) +
                                          delay_integral(diff, diff.head(), prof.mu1, pow_drift));
        const auto where = detail::describe_pair(a, b, t);
        record(lhs, rhs, "drift", where);
        const double dg = detail::gap_norm(eval_diffusion(cs, t, eps, a), eval_diffusion(cs, t, eps, b));
        record(dg * dg, prof.alpha1 * delay_integral(diff, diff.head(), prof.mu2, pow_diff), "diffusion", where);
    }
    return rep;
}

/// ||f(t,phi)|| v ||g(t,phi)|| <= alpha1 ||phi||_h + M on sampled histories.
inline CheckReport growth_audit(const CoefficientSet& cs, const SpectralSpace& space, double h, std::size_t trials,
                                std::uint64_t seed, double radius = 10.0) {
    const auto& prof = cs.profile;
    CheckReport rep{"growth", true, -std::numeric_limits<double>::infinity(), 0.0, trials, {}};
    HistorySampler sampler(space, h, seed);
    for (std::size_t n = 0; n < trials; ++n) {
        const double target = sampler.uniform(0.0, radius);
        auto phi = sampler.draw(sampler.draw_shape(), target);
        const double t = sampler.uniform(0.0, 100.0);
        const double sn = seminorm_h(phi, phi.head());
        const double nf = SpectralSpace::norm(eval_drift_coeffs(cs, t, 1.0, phi));
        const double ng = SpectralSpace::norm(eval_diffusion(cs, t, 1.0, phi));
        const double bound = prof.alpha1 * sn + prof.M;
        const double excess = std::max(nf, ng) - bound;
        if (excess > rep.worst) {
            rep.worst = excess;
            rep.witness = fmt::format("t={:.6g}, |phi|_h={:.6g}, |f|={:.6g}, |g|={:.6g}, bound={:.6g}", t, sn, nf, ng,
                                      bound);
        }
        if (excess > 1e-12 * (1.0 + bound)) rep.pass = false;
    }
    return rep;
}

/// <A u, u> <= -a1 ||u||_B^p + a2 ||u||^2 + M on random Galerkin fields.
inline CheckReport check_coercivity(const PdeOperator& op, const SpectralSpace& space,
                                    const AssumptionProfile& prof, std::size_t trials, std::uint64_t seed,
                                    double radius = 10.0) {
    const auto& c = prof.coercivity;
    CheckReport rep{"coercivity", true, -std::numeric_limits<double>::infinity(), 0.0, trials, {}};
    HistorySampler sampler(space, 1.0, seed);
    for (std::size_t n = 0; n < trials; ++n) {
        const SpectralField u{space, sampler.field(sampler.uniform(0.0, radius))};
        const auto probe = coercivity_probe(op, u);
        const double nu = u.norm();
        const double rhs = -c.alpha1 * probe.b_norm_p + c.alpha2 * nu * nu + c.M;
        const double excess = probe.pairing - rhs;
        if (excess > rep.worst) {
            rep.worst = excess;
            rep.witness = fmt::format("|u|={:.6g}, |u|_B={:.6g}, pairing={:.6g}, rhs={:.6g}", nu, probe.b_norm,
                                      probe.pairing, rhs);
        }
        if (excess > 1e-9 * (1.0 + std::abs(rhs))) rep.pass = false;
    }
    return rep;
}

/// 2 <A u - A v, u - v> <= alpha ||u - v||^{beta+1} up to 1e-8 (|u| + |v|)^2.
inline CheckReport check_monotone(const PdeOperator& op, const SpectralSpace& space, const AssumptionProfile& prof,
                                  std::size_t trials, std::uint64_t seed, double radius = 10.0) {
    CheckReport rep{"monotone", true, -std::numeric_limits<double>::infinity(), 0.0, trials, {}};
    HistorySampler sampler(space, 1.0, seed);
    for (std::size_t n = 0; n < trials; ++n) {
        const SpectralField u{space, sampler.field(sampler.uniform(0.0, radius))};
        SpectralField v{space, sampler.field(sampler.uniform(0.0, radius))};
        if (n % 2 == 1) {
            // near pairs probe the local modulus
            const auto bump = sampler.field(radius * std::pow(10.0, -sampler.uniform(1.0, 8.0)));
            for (std::size_t i = 0; i < v.coeffs.size(); ++i) v.coeffs[i] = u.coeffs[i] + bump[i];
        }
        const double lhs = monotonicity_pairing(op, u, v);
        std::vector<double> w(u.coeffs.size());
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = u.coeffs[i] - v.coeffs[i];
        const double scale = u.norm() + v.norm();
        const double rhs = prof.monotone_alpha * std::pow(SpectralSpace::norm(w), prof.beta + 1.0);
        const double excess = lhs - rhs;
        if (excess > rep.worst) {
            rep.worst = excess;
            rep.witness = fmt::format("|u|={:.6g}, |v|={:.6g}, pairing={:.6g}", u.norm(), v.norm(), lhs);
        }
        if (excess > 1e-8 * scale * scale) rep.pass = false;
    }
    return rep;
}

/// Empirical Phi_1, Phi_2 of the averaging condition on a window grid.
struct AveragingRate {
    std::vector<double> windows;
    std::vector<double> phi1_raw;
    std::vector<double> phi2_raw;
    /// Least nonincreasing majorants of the raw estimates.
    std::vector<double> phi1;
    std::vector<double> phi2;
};

inline std::vector<double> upper_envelope(const std::vector<double>& v) {
    std::vector<double> out(v);
    for (std::size_t i = out.size(); i-- > 1;) out[i - 1] = std::max(out[i - 1], out[i]);
    return out;
}

/// A rate table is acceptable when it vanishes or falls to below half its
/// first value across the window grid.
inline bool rate_decays(const std::vector<double>& env, double tol = 1e-12) {
    if (env.empty()) return false;
    if (*std::max_element(env.begin(), env.end()) <= tol) return true;
    return env.back() < 0.5 * env.front();
}

/// For each window r: max over probes and start times of
///   (1/r) ||int_t^{t+r} (f - f*) ds|| / (||phi||_h + M)     (Phi_1)
///   (1/r) int_t^{t+r} ||g - g*||^2 ds / (||phi||_h^2 + M)   (Phi_2)
/// For modulated coefficients xi(s) F(phi) the time integrals are exact.
inline AveragingRate estimate_rate(const CoefficientSet& cs, const std::vector<HistoryBuffer>& probes,
                                   const std::vector<double>& windows, std::size_t starts = 32,
                                   double start_horizon = 50.0) {
    if (probes.empty()) throw ArgumentError("estimate_rate needs probe histories");
    if (probes.size() < 3) throw ArgumentError("estimate_rate needs at least 3 probe histories");
    if (windows.empty()) throw ArgumentError("estimate_rate needs at least one window");
    for (std::size_t i = 0; i < windows.size(); ++i)
        if (!(windows[i] > 0.0) || (i > 0 && !(windows[i] > windows[i - 1])))
            throw ArgumentError("windows must be positive and increasing");
    const double M = cs.profile.M;
    const auto& x1 = cs.drift_oscillator;
    const auto& x2 = cs.diffusion.modulation;
    AveragingRate out;
    out.windows = windows;
    out.phi1_raw.assign(windows.size(), 0.0);
    out.phi2_raw.assign(windows.size(), 0.0);
    for (const auto& phi : probes) {
        const double sn = seminorm_h(phi, phi.head());
        const double nf = SpectralSpace::norm(evaluate_functional(cs.drift, phi, phi.head()));
        const double ng = SpectralSpace::norm(diffusion_coordinates(cs.diffusion, phi, phi.head()));
        for (std::size_t w = 0; w < windows.size(); ++w) {
            const double r = windows[w];
            for (std::size_t j = 0; j < starts; ++j) {
                const double t = starts > 1 ? start_horizon * static_cast<double>(j) / static_cast<double>(starts - 1)
                                            : 0.0;
                const double d1 = std::abs(x1.integral(t, t + r) - x1.mean() * r) / r;
                const double d2 = x2.squared_deviation_integral(t, t + r, x2.mean()) / r;
                out.phi1_raw[w] = std::max(out.phi1_raw[w], d1 * nf / (sn + M));
                out.phi2_raw[w] = std::max(out.phi2_raw[w], d2 * ng * ng / (sn * sn + M));
            }
        }
    }
    out.phi1 = upper_envelope(out.phi1_raw);
    out.phi2 = upper_envelope(out.phi2_raw);
    return out;
}

}  // namespace avgsfpde
