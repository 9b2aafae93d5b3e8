#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "avgsfpde/errors.hpp"

namespace avgsfpde {

/// Bounded time profile xi(t) with a closed-form long-run mean.
class Oscillator {
public:
    enum class Kind { constant, sinusoid, almost_periodic, tabulated_periodic };

    struct Mode {
        double amplitude;
        double frequency;
        double phase;
    };

    static Oscillator constant(double c) {
        Oscillator o(Kind::constant);
        o.offset_ = c;
        return o;
    }

    /// c0 + a sin(omega t).
    static Oscillator sinusoid(double c0, double a, double omega) {
        return almost_periodic_impl(Kind::sinusoid, c0, {{a, omega, 0.0}});
    }

    /// c0 + sum_j a_j sin(omega_j t + phi_j).
    static Oscillator almost_periodic(double c0, std::vector<Mode> modes) {
        return almost_periodic_impl(Kind::almost_periodic, c0, std::move(modes));
    }

    /// Piecewise-linear periodic profile through `values` at t = j period / n.
    static Oscillator tabulated_periodic(double period, std::vector<double> values) {
        if (!(period > 0.0)) throw ArgumentError("oscillator period must be positive");
        if (values.size() < 2) throw ArgumentError("tabulated oscillator needs >= 2 values");
        Oscillator o(Kind::tabulated_periodic);
        o.period_ = period;
        o.values_ = std::move(values);
        o.offset_ = std::accumulate(o.values_.begin(), o.values_.end(), 0.0) / static_cast<double>(o.values_.size());
        return o;
    }

    Kind kind() const noexcept { return kind_; }
    const std::vector<Mode>& modes() const noexcept { return modes_; }

    double operator()(double t) const {
        switch (kind_) {
        case Kind::constant: return offset_;
        case Kind::sinusoid:
        case Kind::almost_periodic: {
            double v = offset_;
            for (const auto& m : modes_) v += m.amplitude * std::sin(m.frequency * t + m.phase);
            return v;
        }
        case Kind::tabulated_periodic: {
            const double n = static_cast<double>(values_.size());
            double x = std::fmod(t, period_) / period_ * n;
            if (x < 0.0) x += n;
            const auto i = static_cast<std::size_t>(x) % values_.size();
            const double w = x - std::floor(x);
            return (1.0 - w) * values_[i] + w * values_[(i + 1) % values_.size()];
        }
        }
        return 0.0;
    }

    /// xi* = lim (1/T) integral_t^{t+T} xi.
    double mean() const noexcept { return offset_; }

    /// sup_t |xi(t)|.
    double bound() const noexcept {
        switch (kind_) {
        case Kind::constant: return std::abs(offset_);
        case Kind::sinusoid:
        case Kind::almost_periodic: {
            double b = std::abs(offset_);
            for (const auto& m : modes_) b += std::abs(m.amplitude);
            return b;
        }
        case Kind::tabulated_periodic: {
            double b = 0.0;
            for (double v : values_) b = std::max(b, std::abs(v));
            return b;
        }
        }
        return 0.0;
    }

    /// Whether the profile oscillates at all.
    bool is_constant() const noexcept {
        if (kind_ == Kind::constant) return true;
        if (kind_ == Kind::tabulated_periodic)
            return std::all_of(values_.begin(), values_.end(), [&](double v) { return v == values_.front(); });
        return std::all_of(modes_.begin(), modes_.end(), [](const Mode& m) { return m.amplitude == 0.0; });
    }

    /// Exact integral over [a, b].
    double integral(double a, double b) const { return antiderivative(b) - antiderivative(a); }

    /// integral_a^b (xi(s) - c)^2 ds by composite Simpson resolved to the
    /// fastest frequency present.
    double squared_deviation_integral(double a, double b, double c) const {
        if (!(b > a)) return 0.0;
        if (kind_ == Kind::constant) return (offset_ - c) * (offset_ - c) * (b - a);
        double fastest = 0.0;
        for (const auto& m : modes_) fastest = std::max(fastest, std::abs(m.frequency));
        if (kind_ == Kind::tabulated_periodic) fastest = 2.0 * std::numbers::pi * static_cast<double>(values_.size()) / period_;
        auto panels = static_cast<std::size_t>(std::ceil((b - a) * fastest * 4.0));
        panels = std::max<std::size_t>(64, panels + panels % 2);
        const double h = (b - a) / static_cast<double>(panels);
        auto f = [&](double s) {
            const double d = (*this)(s) - c;
            return d * d;
        };
        double sum = f(a) + f(b);
        for (std::size_t j = 1; j < panels; ++j) sum += (j % 2 ? 4.0 : 2.0) * f(a + static_cast<double>(j) * h);
        return sum * h / 3.0;
    }

    std::string describe() const {
        switch (kind_) {
        case Kind::constant: return fmt::format("constant({})", offset_);
        case Kind::sinusoid:
            return fmt::format("sinusoid({} + {} sin({} t))", offset_, modes_[0].amplitude, modes_[0].frequency);
        case Kind::almost_periodic: {
            std::string s = fmt::format("almost_periodic({}", offset_);
            for (const auto& m : modes_) s += fmt::format(" + {} sin({} t + {})", m.amplitude, m.frequency, m.phase);
            return s + ")";
        }
        case Kind::tabulated_periodic: return fmt::format("tabulated_periodic(period={}, n={})", period_, values_.size());
        }
        return {};
    }

private:
    explicit Oscillator(Kind kind) : kind_(kind) {}

    static Oscillator almost_periodic_impl(Kind kind, double c0, std::vector<Mode> modes) {
        if (modes.empty()) throw ArgumentError("oscillator needs at least one mode");
        for (const auto& m : modes)
            if (!(m.frequency != 0.0) || !std::isfinite(m.frequency) || !std::isfinite(m.amplitude))
                throw ArgumentError("oscillator modes need finite amplitude and nonzero frequency");
        Oscillator o(kind);
        o.offset_ = c0;
        o.modes_ = std::move(modes);
        return o;
    }

    double antiderivative(double t) const {
        switch (kind_) {
        case Kind::constant: return offset_ * t;
        case Kind::sinusoid:
        case Kind::almost_periodic: {
            double v = offset_ * t;
            for (const auto& m : modes_) v -= m.amplitude * std::cos(m.frequency * t + m.phase) / m.frequency;
            return v;
        }
        case Kind::tabulated_periodic: {
            const double cycles = std::floor(t / period_);
            double v = cycles * period_ * offset_;
            const double rem = t - cycles * period_;
            const double step = period_ / static_cast<double>(values_.size());
            const auto full = static_cast<std::size_t>(rem / step);
            for (std::size_t i = 0; i < full && i < values_.size(); ++i)
                v += 0.5 * step * (values_[i] + values_[(i + 1) % values_.size()]);
            const double part = rem - static_cast<double>(full) * step;
            if (part > 0.0 && full < values_.size()) {
                const double a = values_[full];
                const double b = values_[(full + 1) % values_.size()];
                v += part * (a + 0.5 * (b - a) * part / step);
            }
            return v;
        }
        }
        return 0.0;
    }

    Kind kind_;
    double offset_ = 0.0;
    std::vector<Mode> modes_;
    double period_ = 0.0;
    std::vector<double> values_;
};

}  // namespace avgsfpde
