#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "avgsfpde/errors.hpp"

namespace avgsfpde {

/// Probability measure on (-inf, 0] used by delay functionals.
///
/// Three families are supported: the exponential law with density
/// 2r exp(2r theta), the Dirac mass at theta = 0, and a piecewise-linear
/// density tabulated on a finite window [-tau, 0].
class DelayMeasure {
public:
    enum class Kind { exponential, point_mass, tabulated };

    static DelayMeasure exponential(double rate) {
        if (!(rate > 0.0) || !std::isfinite(rate))
            throw ArgumentError(fmt::format("exponential delay measure needs rate > 0, got {}", rate));
        DelayMeasure mu(Kind::exponential);
        mu.rate_ = rate;
        return mu;
    }

    static DelayMeasure point_mass() { return DelayMeasure(Kind::point_mass); }

    /// `nodes` strictly increasing and ending at 0; the density is normalized
    /// to unit mass.
    static DelayMeasure tabulated(std::vector<double> nodes, std::vector<double> density) {
        if (nodes.size() < 2 || nodes.size() != density.size())
            throw ArgumentError("tabulated delay measure needs >= 2 matching nodes and values");
        if (nodes.back() != 0.0)
            throw ArgumentError("tabulated delay measure must end at theta = 0");
        for (std::size_t i = 1; i < nodes.size(); ++i)
            if (!(nodes[i] > nodes[i - 1]))
                throw ArgumentError("tabulated delay measure nodes must increase strictly");
        if (std::any_of(density.begin(), density.end(), [](double v) { return !(v >= 0.0); }))
            throw ArgumentError("tabulated delay measure density must be nonnegative");
        double total = 0.0;
        for (std::size_t i = 1; i < nodes.size(); ++i)
            total += 0.5 * (density[i] + density[i - 1]) * (nodes[i] - nodes[i - 1]);
        if (!(total > 0.0)) throw ArgumentError("tabulated delay measure has zero mass");
        for (double& v : density) v /= total;
        DelayMeasure mu(Kind::tabulated);
        mu.nodes_ = std::move(nodes);
        mu.density_ = std::move(density);
        return mu;
    }

    Kind kind() const noexcept { return kind_; }
    double rate() const noexcept { return rate_; }
    const std::vector<double>& nodes() const noexcept { return nodes_; }
    const std::vector<double>& density_values() const noexcept { return density_; }

    /// Lower end of the support; -inf for the exponential law.
    double support_lower() const noexcept {
        switch (kind_) {
        case Kind::exponential: return -std::numeric_limits<double>::infinity();
        case Kind::point_mass: return 0.0;
        case Kind::tabulated: return nodes_.front();
        }
        return 0.0;
    }

    /// Lebesgue density; zero for the point mass.
    double density(double theta) const {
        switch (kind_) {
        case Kind::exponential:
            return theta > 0.0 ? 0.0 : 2.0 * rate_ * std::exp(2.0 * rate_ * theta);
        case Kind::point_mass: return 0.0;
        case Kind::tabulated: return tabulated_density(theta);
        }
        return 0.0;
    }

    /// mu([a, b]) for a <= b <= 0; `a` may be -inf.
    double mass(double a, double b) const {
        if (a > b) throw ArgumentError("mass interval reversed");
        b = std::min(b, 0.0);
        a = std::min(a, b);
        switch (kind_) {
        case Kind::exponential:
            // exp(2r b) - exp(2r a), written to keep relative accuracy for short intervals
            return std::exp(2.0 * rate_ * b) * -std::expm1(2.0 * rate_ * (a - b));
        case Kind::point_mass: return b == 0.0 ? 1.0 : 0.0;
        case Kind::tabulated: return tabulated_cdf(b) - tabulated_cdf(a);
        }
        return 0.0;
    }

    /// mu((-inf, b]).
    double mass_below(double b) const {
        return mass(-std::numeric_limits<double>::infinity(), b);
    }

    /// Whether mu belongs to P_k, i.e. the k-th exponential moment is finite.
    bool has_exp_moment(double k) const noexcept {
        if (kind_ == Kind::exponential) return k < 2.0 * rate_;
        return std::isfinite(k);
    }

    /// mu^(k) = integral of exp(-k theta) mu(d theta).
    double exp_moment(double k) const {
        if (!(k >= 0.0)) throw ArgumentError(fmt::format("exponential moment order must be >= 0, got {}", k));
        switch (kind_) {
        case Kind::exponential:
            if (!(k < 2.0 * rate_))
                throw DivergenceError(fmt::format(
                    "exponential moment of order {} diverges: exponential({}) is not in P_{} (needs k < {})",
                    k, rate_, k, 2.0 * rate_));
            return 2.0 * rate_ / (2.0 * rate_ - k);
        case Kind::point_mass: return 1.0;
        case Kind::tabulated: {
            // composite Simpson on each linear piece
            constexpr int panels = 64;
            double sum = 0.0;
            for (std::size_t i = 1; i < nodes_.size(); ++i) {
                const double a = nodes_[i - 1];
                const double h = (nodes_[i] - a) / panels;
                auto f = [&](double th) { return std::exp(-k * th) * tabulated_density(th); };
                double s = f(a) + f(nodes_[i]);
                for (int j = 1; j < panels; ++j) s += (j % 2 ? 4.0 : 2.0) * f(a + j * h);
                sum += s * h / 3.0;
            }
            return sum;
        }
        }
        return 0.0;
    }

    std::string describe() const {
        switch (kind_) {
        case Kind::exponential: return fmt::format("exponential({})", rate_);
        case Kind::point_mass: return "point_mass";
        case Kind::tabulated: return fmt::format("tabulated[{}, 0]", nodes_.front());
        }
        return {};
    }

private:
    explicit DelayMeasure(Kind kind) : kind_(kind) {}

    double tabulated_density(double theta) const {
        if (theta < nodes_.front() || theta > 0.0) return 0.0;
        auto it = std::upper_bound(nodes_.begin(), nodes_.end(), theta);
        if (it == nodes_.end()) return density_.back();
        const auto i = static_cast<std::size_t>(it - nodes_.begin());
        const double w = (theta - nodes_[i - 1]) / (nodes_[i] - nodes_[i - 1]);
        return (1.0 - w) * density_[i - 1] + w * density_[i];
    }

    double tabulated_cdf(double theta) const {
        if (theta <= nodes_.front()) return 0.0;
        double acc = 0.0;
        for (std::size_t i = 1; i < nodes_.size(); ++i) {
            const double a = nodes_[i - 1];
            const double b = std::min(nodes_[i], theta);
            if (b <= a) break;
            acc += 0.5 * (density_[i - 1] + tabulated_density(b)) * (b - a);
            if (theta <= nodes_[i]) break;
        }
        return acc;
    }

    Kind kind_;
    double rate_ = 0.0;
    std::vector<double> nodes_;
    std::vector<double> density_;
};

}  // namespace avgsfpde
