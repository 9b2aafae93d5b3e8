#pragma once

// Dirichlet sine basis on (0, L), pseudospectral transforms, and the drift
// operators A of the porous-media and reaction-diffusion examples.
//
// Basis: e_i(x) = sqrt(2/L) sin(i pi x / L), i = 1..k, eigenvalues of -Laplace
// lambda_i = (i pi / L)^2. Collocation grid x_j = j L / (m + 1), j = 1..m,
// where the transform pair is the orthogonal DST-I; for any field in the span
// the grid trapezoid inner product equals the coefficient inner product.
//
// A one-point "scalar" space (k = m = 1, identity transforms) lets SDE models
// share every code path with the field models.

#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "avgsfpde/errors.hpp"

namespace avgsfpde {

class SpectralSpace {
public:
    static SpectralSpace scalar() { return SpectralSpace(); }

    /// `grid == 0` selects the anti-aliasing floor m = 2k.
    static SpectralSpace interval(double length, std::size_t modes, std::size_t grid = 0) {
        if (!(length > 0.0)) throw ArgumentError("domain length must be positive");
        if (modes == 0) throw ArgumentError("spectral space needs at least one mode");
        if (grid == 0) grid = 2 * modes;
        if (grid < 2 * modes)
            throw ArgumentError(fmt::format("collocation grid m = {} below anti-aliasing floor 2k = {}",
                                            grid, 2 * modes));
        SpectralSpace s;
        s.scalar_ = false;
        s.length_ = length;
        s.modes_ = modes;
        s.grid_ = grid;
        auto table = std::make_shared<std::vector<double>>(2 * (grid + 1));
        const double step = std::numbers::pi / static_cast<double>(grid + 1);
        for (std::size_t n = 0; n < table->size(); ++n) (*table)[n] = std::sin(step * static_cast<double>(n));
        s.sines_ = std::move(table);
        auto eig = std::make_shared<std::vector<double>>(modes);
        for (std::size_t i = 0; i < modes; ++i) {
            const double w = static_cast<double>(i + 1) * std::numbers::pi / length;
            (*eig)[i] = w * w;
        }
        s.eigenvalues_ = std::move(eig);
        return s;
    }

    bool is_scalar() const noexcept { return scalar_; }
    std::size_t dim() const noexcept { return modes_; }
    std::size_t grid_size() const noexcept { return grid_; }
    double length() const noexcept { return length_; }

    /// lambda for 0-based mode index (mode number index + 1); zero for scalars.
    double eigenvalue(std::size_t index) const noexcept {
        return scalar_ ? 0.0 : (*eigenvalues_)[index];
    }

    double grid_point(std::size_t j) const noexcept {
        return scalar_ ? 0.0 : length_ * static_cast<double>(j + 1) / static_cast<double>(grid_ + 1);
    }

    /// Trapezoid weight of one interior collocation node.
    double grid_weight() const noexcept {
        return scalar_ ? 1.0 : length_ / static_cast<double>(grid_ + 1);
    }

    /// Value of basis function e_{index+1} at collocation node j.
    double basis_at(std::size_t index, std::size_t j) const noexcept {
        if (scalar_) return 1.0;
        return std::sqrt(2.0 / length_) * sine((index + 1) * (j + 1));
    }

    void to_grid(std::span<const double> coeffs, std::span<double> grid) const {
        if (scalar_) {
            grid[0] = coeffs[0];
            return;
        }
        const double scale = std::sqrt(2.0 / length_);
        const std::size_t period = 2 * (grid_ + 1);
        const auto& s = *sines_;
        for (std::size_t j = 0; j < grid_; ++j) {
            double acc = 0.0;
            std::size_t idx = 0;
            const std::size_t stride = j + 1;
            for (std::size_t i = 0; i < coeffs.size(); ++i) {
                idx += stride;
                if (idx >= period) idx -= period;
                acc += coeffs[i] * s[idx];
            }
            grid[j] = scale * acc;
        }
    }

    /// Projects grid values onto the first coeffs.size() modes.
    void from_grid(std::span<const double> grid, std::span<double> coeffs) const {
        if (scalar_) {
            coeffs[0] = grid[0];
            return;
        }
        const double scale = std::sqrt(2.0 / length_) * grid_weight();
        const std::size_t period = 2 * (grid_ + 1);
        const auto& s = *sines_;
        for (std::size_t i = 0; i < coeffs.size(); ++i) {
            double acc = 0.0;
            std::size_t idx = 0;
            const std::size_t stride = i + 1;
            for (std::size_t j = 0; j < grid_; ++j) {
                idx += stride;
                if (idx >= period) idx -= period;
                acc += grid[j] * s[idx];
            }
            coeffs[i] = scale * acc;
        }
    }

    std::vector<double> to_grid(std::span<const double> coeffs) const {
        std::vector<double> g(grid_);
        to_grid(coeffs, g);
        return g;
    }

    std::vector<double> from_grid(std::span<const double> grid) const {
        std::vector<double> c(modes_);
        from_grid(grid, c);
        return c;
    }

    /// L2 norm of a field given by its coefficients (Parseval).
    static double norm(std::span<const double> coeffs) noexcept {
        return std::sqrt(std::inner_product(coeffs.begin(), coeffs.end(), coeffs.begin(), 0.0));
    }

    static double dot(std::span<const double> a, std::span<const double> b) noexcept {
        return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
    }

    /// Composite Simpson integral of a grid function, including the zero
    /// boundary nodes; an odd interval count closes with one trapezoid panel.
    double integrate_grid(std::span<const double> grid) const {
        if (scalar_) return grid[0];
        const std::size_t intervals = grid_ + 1;
        auto value = [&](std::size_t node) { return (node == 0 || node == intervals) ? 0.0 : grid[node - 1]; };
        const double h = grid_weight();
        const std::size_t even = intervals - intervals % 2;
        double sum = value(0) + value(even);
        for (std::size_t n = 1; n < even; ++n) sum += (n % 2 ? 4.0 : 2.0) * value(n);
        sum *= h / 3.0;
        if (even != intervals) sum += 0.5 * h * (value(even) + value(intervals));
        return sum;
    }

    /// L^p norm of a grid function by Simpson quadrature.
    double lp_norm_grid(std::span<const double> grid, double p) const {
        if (scalar_) return std::abs(grid[0]);
        std::vector<double> powered(grid.size());
        for (std::size_t j = 0; j < grid.size(); ++j) powered[j] = std::pow(std::abs(grid[j]), p);
        return std::pow(integrate_grid(powered), 1.0 / p);
    }

    /// H^1_0 norm sqrt(sum lambda_i c_i^2); for scalars the absolute value.
    double h1_norm(std::span<const double> coeffs) const noexcept {
        if (scalar_) return std::abs(coeffs[0]);
        double acc = 0.0;
        for (std::size_t i = 0; i < coeffs.size(); ++i) acc += eigenvalue(i) * coeffs[i] * coeffs[i];
        return std::sqrt(acc);
    }

    friend bool operator==(const SpectralSpace& a, const SpectralSpace& b) noexcept {
        return a.scalar_ == b.scalar_ && a.modes_ == b.modes_ && a.grid_ == b.grid_ && a.length_ == b.length_;
    }

    std::string describe() const {
        return scalar_ ? std::string("scalar") : fmt::format("sine(L={}, k={}, m={})", length_, modes_, grid_);
    }

private:
    SpectralSpace() = default;

    double sine(std::size_t n) const noexcept { return (*sines_)[n % sines_->size()]; }

    bool scalar_ = true;
    double length_ = 1.0;
    std::size_t modes_ = 1;
    std::size_t grid_ = 1;
    std::shared_ptr<const std::vector<double>> sines_;
    std::shared_ptr<const std::vector<double>> eigenvalues_;
};

/// A state of the spatial discretization: coefficients in the sine basis
/// (or a single number for the scalar space).
struct SpectralField {
    SpectralSpace space;
    std::vector<double> coeffs;

    static SpectralField zero(const SpectralSpace& space) { return {space, std::vector<double>(space.dim(), 0.0)}; }

    /// c * e_{mode}, `mode` 1-based.
    static SpectralField basis(const SpectralSpace& space, std::size_t mode, double c = 1.0) {
        if (mode == 0 || mode > space.dim()) throw ArgumentError(fmt::format("mode {} outside 1..{}", mode, space.dim()));
        auto f = zero(space);
        f.coeffs[mode - 1] = c;
        return f;
    }

    double norm() const noexcept { return SpectralSpace::norm(coeffs); }
    std::vector<double> grid_values() const { return space.to_grid(coeffs); }
};

/// Retains modes 1..k of `field`, zeroing the rest.
inline SpectralField project(const SpectralField& field, std::size_t k) {
    if (k == 0) throw ArgumentError("projection onto zero modes");
    if (k > field.space.dim()) throw ArgumentError(fmt::format("projection to k = {} exceeds capacity {}", k, field.space.dim()));
    SpectralField out = field;
    for (std::size_t i = k; i < out.coeffs.size(); ++i) out.coeffs[i] = 0.0;
    return out;
}

/// Galerkin coefficients of a physical-space function, sampled on the
/// space's collocation grid, truncated to k modes.
inline SpectralField project(const std::function<double(double)>& fn, const SpectralSpace& space, std::size_t k) {
    if (k == 0) throw ArgumentError("projection onto zero modes");
    if (k > space.dim()) throw ArgumentError(fmt::format("projection to k = {} exceeds capacity {}", k, space.dim()));
    std::vector<double> grid(space.grid_size());
    for (std::size_t j = 0; j < grid.size(); ++j) grid[j] = fn(space.grid_point(j));
    auto field = SpectralField{space, space.from_grid(grid)};
    return project(field, k);
}

// --- drift operators --------------------------------------------------------

struct PdeOperator {
    enum class Kind { porous_media, reaction_diffusion, pure_laplacian, scalar_linear };

    Kind kind = Kind::pure_laplacian;
    double q = 0.0;
    /// Decay rate a of A(u) = -a u for the scalar kind.
    double rate = 0.0;
    /// Porous media as Laplace(|u|^{q-2} + u) instead of Laplace(|u|^{q-2} u + u).
    bool literal_porous = false;

    static PdeOperator porous_media(double q, bool literal = false) {
        check_exponent(q);
        return {Kind::porous_media, q, 0.0, literal};
    }
    static PdeOperator reaction_diffusion(double q) {
        check_exponent(q);
        return {Kind::reaction_diffusion, q, 0.0, false};
    }
    static PdeOperator pure_laplacian() { return {Kind::pure_laplacian, 0.0, 0.0, false}; }
    static PdeOperator scalar_linear(double a) { return {Kind::scalar_linear, 0.0, a, false}; }

    bool needs_scalar_space() const noexcept { return kind == Kind::scalar_linear; }

    std::string describe() const {
        switch (kind) {
        case Kind::porous_media: return fmt::format("porous_media(q={}{})", q, literal_porous ? ", literal" : "");
        case Kind::reaction_diffusion: return fmt::format("reaction_diffusion(q={})", q);
        case Kind::pure_laplacian: return "pure_laplacian";
        case Kind::scalar_linear: return fmt::format("scalar_linear(a={})", rate);
        }
        return {};
    }

private:
    static void check_exponent(double q) {
        if (!(q > 2.0)) throw ArgumentError(fmt::format("nonlinearity exponent must satisfy q > 2, got {}", q));
    }
};

inline void check_operator_space(const PdeOperator& op, const SpectralSpace& space) {
    if (op.needs_scalar_space() != space.is_scalar())
        throw ArgumentError(fmt::format("operator {} is incompatible with space {}", op.describe(), space.describe()));
}

/// Per-mode rates of the stiff linear part, treated implicitly by the stepper.
inline std::vector<double> linear_rates(const PdeOperator& op, const SpectralSpace& space) {
    check_operator_space(op, space);
    std::vector<double> rates(space.dim());
    for (std::size_t i = 0; i < rates.size(); ++i)
        rates[i] = op.kind == PdeOperator::Kind::scalar_linear ? op.rate : space.eigenvalue(i);
    return rates;
}

/// Scratch for pseudospectral evaluation; one per thread.
struct TransformScratch {
    std::vector<double> grid;
    std::vector<double> coeffs;
    void fit(const SpectralSpace& s) {
        grid.resize(s.grid_size());
        coeffs.resize(s.dim());
    }
};

/// Explicit (non-linear) part of A, written into `out`. Zero for linear kinds.
inline void nonlinear_part(const PdeOperator& op, const SpectralSpace& space, std::span<const double> u,
                           std::span<double> out, TransformScratch& scratch) {
    using K = PdeOperator::Kind;
    if (op.kind == K::pure_laplacian || op.kind == K::scalar_linear) {
        std::fill(out.begin(), out.end(), 0.0);
        return;
    }
    scratch.fit(space);
    space.to_grid(u, scratch.grid);
    const double e = op.q - 2.0;
    for (std::size_t j = 0; j < scratch.grid.size(); ++j) {
        const double s = scratch.grid[j];
        double v = 0.0;
        if (op.kind == K::porous_media)
            v = op.literal_porous ? std::pow(std::abs(s), e) : s * std::pow(std::abs(s), e);
        else
            v = -s * std::pow(std::abs(s), e);
        if (!std::isfinite(v))
            throw NumericError(fmt::format("numeric overflow in {} at x = {}", op.describe(), space.grid_point(j)),
                               space.grid_point(j));
        scratch.grid[j] = v;
    }
    space.from_grid(scratch.grid, out);
    if (op.kind == K::porous_media)
        for (std::size_t i = 0; i < out.size(); ++i) out[i] *= -space.eigenvalue(i);
}

/// A(u) as an element of the Galerkin space.
inline SpectralField apply_operator(const PdeOperator& op, const SpectralField& u) {
    for (double c : u.coeffs)
        if (!std::isfinite(c)) throw NumericError("non-finite coefficient passed to apply_operator", 0.0);
    TransformScratch scratch;
    SpectralField out = SpectralField::zero(u.space);
    nonlinear_part(op, u.space, u.coeffs, out.coeffs, scratch);
    const auto rates = linear_rates(op, u.space);
    for (std::size_t i = 0; i < out.coeffs.size(); ++i) out.coeffs[i] -= rates[i] * u.coeffs[i];
    return out;
}

/// Duality pairing <A, v> between B* and B. For porous media this is the
/// H^{-1} form, so <Laplace(Phi(u)), v> = -integral Phi(u) v.
inline double duality_pairing(const PdeOperator& op, const SpectralSpace& space, std::span<const double> a,
                              std::span<const double> v) {
    if (op.kind != PdeOperator::Kind::porous_media) return SpectralSpace::dot(a, v);
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * v[i] / space.eigenvalue(i);
    return acc;
}

struct CoercivityProbe {
    double pairing = 0.0;
    /// ||u||_B^p with p the operator's growth exponent.
    double b_norm_p = 0.0;
    double b_norm = 0.0;
    double p = 2.0;
};

/// Growth exponent p of the coercivity condition for this operator.
inline double coercivity_exponent(const PdeOperator& op) noexcept {
    return op.kind == PdeOperator::Kind::porous_media ? op.q : 2.0;
}

/// ||u||_B: L^q for porous media, max(H^1, L^q) for reaction-diffusion,
/// H^1 for the Laplacian, |u| for scalars.
inline double b_norm(const PdeOperator& op, const SpectralField& u) {
    using K = PdeOperator::Kind;
    switch (op.kind) {
    case K::porous_media: return u.space.lp_norm_grid(u.grid_values(), op.q);
    case K::reaction_diffusion:
        return std::max(u.space.h1_norm(u.coeffs), u.space.lp_norm_grid(u.grid_values(), op.q));
    case K::pure_laplacian: return u.space.h1_norm(u.coeffs);
    case K::scalar_linear: return std::abs(u.coeffs[0]);
    }
    return 0.0;
}

inline CoercivityProbe coercivity_probe(const PdeOperator& op, const SpectralField& u) {
    const auto au = apply_operator(op, u);
    CoercivityProbe out;
    out.pairing = duality_pairing(op, u.space, au.coeffs, u.coeffs);
    out.p = coercivity_exponent(op);
    out.b_norm = b_norm(op, u);
    out.b_norm_p = std::pow(out.b_norm, out.p);
    if (!std::isfinite(out.pairing) || !std::isfinite(out.b_norm_p))
        throw NumericError("numeric overflow in coercivity probe", 0.0);
    return out;
}

/// 2 <A(u) - A(v), u - v>, the left side of the monotonicity condition.
inline double monotonicity_pairing(const PdeOperator& op, const SpectralField& u, const SpectralField& v) {
    const auto au = apply_operator(op, u);
    const auto av = apply_operator(op, v);
    std::vector<double> da(au.coeffs.size()), dw(u.coeffs.size());
    for (std::size_t i = 0; i < da.size(); ++i) {
        da[i] = au.coeffs[i] - av.coeffs[i];
        dw[i] = u.coeffs[i] - v.coeffs[i];
    }
    return 2.0 * duality_pairing(op, u.space, da, dw);
}

}  // namespace avgsfpde
