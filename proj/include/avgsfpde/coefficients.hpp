#pragma once

// Drift and diffusion coefficients f(t/eps, phi) = xi1(t/eps) F(phi),
// g(t/eps, phi) = xi2(t/eps) G(phi), their time averages, and the constants
// the hypothesis checkers test them against.

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <fmt/format.h>

#include "avgsfpde/errors.hpp"
#include "avgsfpde/history.hpp"
#include "avgsfpde/maps.hpp"
#include "avgsfpde/measure.hpp"
#include "avgsfpde/oscillator.hpp"
#include "avgsfpde/spectral.hpp"

namespace avgsfpde {

/// map(phi(0)(x)).
struct PointwiseTerm {
    ScalarMap map;
};

/// integral of kernel(phi(theta)(x)) mu(d theta).
struct DelayTerm {
    ScalarMap kernel;
    DelayMeasure measure;
};

/// coefficient * ||phi||_h^2, spatially constant. Violates linear growth.
struct SeminormSquaredTerm {
    double coefficient = 1.0;
};

using FunctionalTerm = std::variant<PointwiseTerm, DelayTerm, SeminormSquaredTerm>;

/// A history functional F(phi) assembled from terms, valued on the grid.
struct FieldFunctional {
    std::vector<FunctionalTerm> terms;

    bool empty() const noexcept { return terms.empty(); }

    bool needs_seminorm() const noexcept {
        for (const auto& t : terms)
            if (std::holds_alternative<SeminormSquaredTerm>(t)) return true;
        return false;
    }

    std::string describe() const {
        if (terms.empty()) return "0";
        std::string out;
        for (const auto& term : terms) {
            if (!out.empty()) out += " + ";
            std::visit(
                [&](const auto& t) {
                    using T = std::decay_t<decltype(t)>;
                    if constexpr (std::is_same_v<T, PointwiseTerm>)
                        out += fmt::format("[{}](phi(0))", t.map.describe());
                    else if constexpr (std::is_same_v<T, DelayTerm>)
                        out += fmt::format("int [{}](phi(theta)) {}", t.kernel.describe(), t.measure.describe());
                    else
                        out += fmt::format("{}*||phi||_h^2", t.coefficient);
                },
                term);
        }
        return out;
    }
};

/// Combines per-term inputs into grid values. `delay_values[i]` holds the
/// grid-valued integral of the i-th delay term in order of appearance.
inline void compose_functional(const FieldFunctional& f, std::span<const double> head_grid,
                               std::span<const std::vector<double>> delay_values, double seminorm,
                               std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    std::size_t delay_index = 0;
    for (const auto& term : f.terms) {
        if (const auto* p = std::get_if<PointwiseTerm>(&term)) {
            for (std::size_t x = 0; x < out.size(); ++x) out[x] += p->map(head_grid[x]);
        } else if (std::holds_alternative<DelayTerm>(term)) {
            const auto& v = delay_values[delay_index++];
            for (std::size_t x = 0; x < out.size(); ++x) out[x] += v[x];
        } else {
            const double c = std::get<SeminormSquaredTerm>(term).coefficient * seminorm * seminorm;
            for (double& o : out) o += c;
        }
    }
    for (std::size_t x = 0; x < out.size(); ++x)
        if (!std::isfinite(out[x])) throw NumericError("non-finite functional value", 0.0);
}

/// F(u_t) on the grid, evaluated directly from a history buffer.
inline std::vector<double> evaluate_functional_grid(const FieldFunctional& f, const HistoryBuffer& buf, double t) {
    const auto& space = buf.space();
    const auto head = space.to_grid(buf.value_at(t));
    std::vector<std::vector<double>> delays;
    for (const auto& term : f.terms)
        if (const auto* d = std::get_if<DelayTerm>(&term))
            delays.push_back(delay_integral_pointwise(buf, t, d->measure, d->kernel));
    const double sn = f.needs_seminorm() ? seminorm_h(buf, t) : 0.0;
    std::vector<double> out(space.grid_size());
    compose_functional(f, head, delays, sn, out);
    return out;
}

/// Galerkin coefficients of F(u_t).
inline std::vector<double> evaluate_functional(const FieldFunctional& f, const HistoryBuffer& buf, double t) {
    if (f.empty()) return std::vector<double>(buf.dim(), 0.0);
    return buf.space().from_grid(evaluate_functional_grid(f, buf, t));
}

/// Constant diagonal noise: amplitude sigma_i on mode i of a cylindrical
/// Wiener process truncated to amplitudes.size() modes.
struct AdditiveNoise {
    std::vector<double> amplitudes;
};

/// G(phi) dW with a single real Wiener process.
struct MultiplicativeNoise {
    FieldFunctional field;
};

struct DiffusionSpec {
    std::variant<AdditiveNoise, MultiplicativeNoise> form = AdditiveNoise{};
    Oscillator modulation = Oscillator::constant(1.0);

    /// Number of independent scalar Wiener coordinates.
    std::size_t noise_modes() const noexcept {
        if (const auto* a = std::get_if<AdditiveNoise>(&form)) return a->amplitudes.size();
        return 1;
    }

    bool is_additive() const noexcept { return std::holds_alternative<AdditiveNoise>(form); }

    std::string describe() const {
        if (const auto* a = std::get_if<AdditiveNoise>(&form))
            return fmt::format("{} * diag(sigma, {} modes)", modulation.describe(), a->amplitudes.size());
        return fmt::format("{} * [{}] dW", modulation.describe(), std::get<MultiplicativeNoise>(form).field.describe());
    }
};

/// Constants of the growth, Hoelder, monotone-pairing and averaging
/// hypotheses for one coefficient set.
struct AssumptionProfile {
    double alpha1 = 1.0;  // linear growth slope; diffusion-pairing constant
    double alpha2 = 1.0;  // drift-pairing constant
    double M = 1.0;       // growth offset and Hoelder radius
    double L_M = 1.0;     // Hoelder constant at radius M
    double beta = 1.0;    // Hoelder exponent of the operator's monotonicity
    double gamma = 0.5;   // Hoelder exponent of f and g
    double p = 2.0;       // growth exponent of A
    DelayMeasure mu1 = DelayMeasure::point_mass();
    DelayMeasure mu2 = DelayMeasure::point_mass();

    /// Coercivity of A: <A u, u> <= -a1 ||u||_B^p + a2 ||u||^2 + M.
    struct Coercivity {
        double alpha1 = 1.0;
        double alpha2 = 0.0;
        double M = 0.0;
    } coercivity;
    /// 2 <A u - A v, u - v> <= monotone_alpha ||u - v||^{beta + 1}.
    double monotone_alpha = 0.0;

    /// mu1 in P_{(gamma+1)h} and mu2 in P_{2 gamma h}.
    void validate(double h) const {
        if (!(gamma > 0.0 && gamma <= 1.0)) throw ArgumentError(fmt::format("gamma = {} outside (0, 1]", gamma));
        if (!(beta > 0.0 && beta <= 1.0)) throw ArgumentError(fmt::format("beta = {} outside (0, 1]", beta));
        if (!(p >= 2.0)) throw ArgumentError(fmt::format("growth exponent p = {} below 2", p));
        if (!mu1.has_exp_moment((gamma + 1.0) * h))
            throw DivergenceError(fmt::format("mu1 = {} is not in P_{}", mu1.describe(), (gamma + 1.0) * h));
        if (!mu2.has_exp_moment(2.0 * gamma * h))
            throw DivergenceError(fmt::format("mu2 = {} is not in P_{}", mu2.describe(), 2.0 * gamma * h));
    }
};

struct CoefficientSet {
    FieldFunctional drift;
    Oscillator drift_oscillator = Oscillator::constant(1.0);
    DiffusionSpec diffusion;
    AssumptionProfile profile;
};

/// xi(t/eps), or xi* when eps is empty (the averaged system).
inline double modulation_at(const Oscillator& osc, double t, std::optional<double> eps) {
    if (!eps) return osc.mean();
    if (!(*eps > 0.0)) throw ArgumentError(fmt::format("time-scale eps must be positive, got {}", *eps));
    return osc(t / *eps);
}

/// f^eps(t, u_t) = xi1(t/eps) F(u_t) at the buffer's head.
inline SpectralField eval_drift(const CoefficientSet& cs, double t, double eps, const HistoryBuffer& buf) {
    if (!(eps > 0.0) || eps > 1.0) throw ArgumentError(fmt::format("eps must lie in (0, 1], got {}", eps));
    const double xi = modulation_at(cs.drift_oscillator, t, eps);
    auto coeffs = evaluate_functional(cs.drift, buf, buf.head());
    for (double& c : coeffs) c *= xi;
    return {buf.space(), std::move(coeffs)};
}

/// f*(u_t) = xi1* F(u_t).
inline SpectralField averaged_drift(const CoefficientSet& cs, const HistoryBuffer& buf) {
    const double xi = cs.drift_oscillator.mean();
    auto coeffs = evaluate_functional(cs.drift, buf, buf.head());
    for (double& c : coeffs) c *= xi;
    return {buf.space(), std::move(coeffs)};
}

/// Hilbert-Schmidt coordinates of G(u_t) without modulation: the diagonal
/// amplitudes, or the Galerkin coefficients of the multiplicative field.
inline std::vector<double> diffusion_coordinates(const DiffusionSpec& g, const HistoryBuffer& buf, double t) {
    if (const auto* a = std::get_if<AdditiveNoise>(&g.form)) return a->amplitudes;
    return evaluate_functional(std::get<MultiplicativeNoise>(g.form).field, buf, t);
}

/// g(t/eps, u_t) in Hilbert-Schmidt coordinates; eps empty means g*.
inline std::vector<double> eval_diffusion(const CoefficientSet& cs, double t, std::optional<double> eps,
                                          const HistoryBuffer& buf) {
    const double xi = modulation_at(cs.diffusion.modulation, t, eps);
    auto coords = diffusion_coordinates(cs.diffusion, buf, buf.head());
    for (double& c : coords) c *= xi;
    return coords;
}

/// f(t/eps, .) or f* in coefficients; eps empty means averaged.
inline std::vector<double> eval_drift_coeffs(const CoefficientSet& cs, double t, std::optional<double> eps,
                                             const HistoryBuffer& buf) {
    const double xi = modulation_at(cs.drift_oscillator, t, eps);
    auto coeffs = evaluate_functional(cs.drift, buf, buf.head());
    for (double& c : coeffs) c *= xi;
    return coeffs;
}

}  // namespace avgsfpde
