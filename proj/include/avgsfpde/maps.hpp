#pragma once

#include <cmath>
#include <functional>
#include <string>

#include <fmt/format.h>

#include "avgsfpde/errors.hpp"

namespace avgsfpde {

/// Scalar map s -> K(s) applied pointwise to field values or to state norms.
/// The closed-form families (one, identity, abs_power) admit exact delay
/// integrals over exponential tails; the rest fall back to quadrature.
struct ScalarMap {
    enum class Kind { one, identity, abs_power, sin_sqrt_abs, cos_sqrt_abs, custom };

    Kind kind = Kind::one;
    double coefficient = 1.0;
    double exponent = 0.0;
    std::function<double(double)> fn;
    std::string label;

    static ScalarMap one(double c = 1.0) { return {Kind::one, c, 0.0, {}, {}}; }
    static ScalarMap identity(double c = 1.0) { return {Kind::identity, c, 1.0, {}, {}}; }
    static ScalarMap abs_power(double a, double c = 1.0) {
        if (!(a >= 0.0)) throw ArgumentError(fmt::format("power kernel exponent must be >= 0, got {}", a));
        return {Kind::abs_power, c, a, {}, {}};
    }
    static ScalarMap sqrt_abs(double c = 1.0) { return abs_power(0.5, c); }
    static ScalarMap sin_sqrt_abs(double c = 1.0) { return {Kind::sin_sqrt_abs, c, 0.0, {}, {}}; }
    static ScalarMap cos_sqrt_abs(double c = 1.0) { return {Kind::cos_sqrt_abs, c, 0.0, {}, {}}; }
    static ScalarMap custom(std::function<double(double)> f, std::string label) {
        return {Kind::custom, 1.0, 0.0, std::move(f), std::move(label)};
    }

    double operator()(double s) const {
        switch (kind) {
        case Kind::one: return coefficient;
        case Kind::identity: return coefficient * s;
        case Kind::abs_power: return exponent == 0.0 ? coefficient : coefficient * std::pow(std::abs(s), exponent);
        case Kind::sin_sqrt_abs: return coefficient * std::sin(std::sqrt(std::abs(s)));
        case Kind::cos_sqrt_abs: return coefficient * std::cos(std::sqrt(std::abs(s)));
        case Kind::custom: return fn(s);
        }
        return 0.0;
    }

    /// True when K(A e^{b s}) = K(A) e^{p b s} for a known power p.
    bool is_homogeneous() const noexcept {
        return kind == Kind::one || kind == Kind::identity || kind == Kind::abs_power;
    }
    double homogeneity() const noexcept { return kind == Kind::one ? 0.0 : exponent; }

    std::string describe() const {
        switch (kind) {
        case Kind::one: return fmt::format("{}", coefficient);
        case Kind::identity: return fmt::format("{}*s", coefficient);
        case Kind::abs_power: return fmt::format("{}*|s|^{}", coefficient, exponent);
        case Kind::sin_sqrt_abs: return fmt::format("{}*sin(sqrt|s|)", coefficient);
        case Kind::cos_sqrt_abs: return fmt::format("{}*cos(sqrt|s|)", coefficient);
        case Kind::custom: return label.empty() ? std::string("custom") : label;
        }
        return {};
    }
};

}  // namespace avgsfpde
