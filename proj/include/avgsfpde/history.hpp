#pragma once

// Infinite-delay histories in the weighted space C^h: an analytic initial
// tail psi * tau(s) for s <= 0 followed by sampled states on a time grid.
// ||phi||_h = sup_{theta <= 0} e^{h theta} ||phi(theta)||.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include "avgsfpde/errors.hpp"
#include "avgsfpde/maps.hpp"
#include "avgsfpde/measure.hpp"
#include "avgsfpde/spectral.hpp"

namespace avgsfpde {

/// Temporal factor tau(s), s <= 0, of an initial datum phi(s) = psi tau(s).
class TailProfile {
public:
    enum class Kind { constant, exponential, tabulated };

    static TailProfile constant() { return TailProfile(Kind::constant); }

    /// tau(s) = e^{b s}.
    static TailProfile exponential(double b) {
        if (!std::isfinite(b)) throw ArgumentError("exponential tail rate must be finite");
        TailProfile t(Kind::exponential);
        t.rate_ = b;
        return t;
    }

    /// Piecewise-linear values on `nodes` (increasing, ending at 0), extended
    /// below the first node by values[0] e^{b (s - nodes[0])}.
    static TailProfile tabulated(std::vector<double> nodes, std::vector<double> values, double extrapolation_rate) {
        if (nodes.size() < 2 || nodes.size() != values.size())
            throw ArgumentError("tabulated tail needs >= 2 matching nodes and values");
        if (nodes.back() != 0.0) throw ArgumentError("tabulated tail must end at s = 0");
        for (std::size_t i = 1; i < nodes.size(); ++i)
            if (!(nodes[i] > nodes[i - 1])) throw ArgumentError("tabulated tail nodes must increase strictly");
        TailProfile t(Kind::tabulated);
        t.rate_ = extrapolation_rate;
        t.nodes_ = std::move(nodes);
        t.values_ = std::move(values);
        return t;
    }

    Kind kind() const noexcept { return kind_; }
    double rate() const noexcept { return rate_; }
    const std::vector<double>& nodes() const noexcept { return nodes_; }
    const std::vector<double>& values() const noexcept { return values_; }

    double operator()(double s) const {
        switch (kind_) {
        case Kind::constant: return 1.0;
        case Kind::exponential: return std::exp(rate_ * s);
        case Kind::tabulated: {
            if (s <= nodes_.front()) return values_.front() * std::exp(rate_ * (s - nodes_.front()));
            if (s >= 0.0) return values_.back();
            auto it = std::upper_bound(nodes_.begin(), nodes_.end(), s);
            const auto i = static_cast<std::size_t>(it - nodes_.begin());
            const double w = (s - nodes_[i - 1]) / (nodes_[i] - nodes_[i - 1]);
            return (1.0 - w) * values_[i - 1] + w * values_[i];
        }
        }
        return 0.0;
    }

    /// Existence of lim_{s -> -inf} e^{h s} tau(s).
    bool belongs_to_ch(double h) const noexcept {
        switch (kind_) {
        case Kind::constant: return true;
        case Kind::exponential:
        case Kind::tabulated: return rate_ >= -h;
        }
        return false;
    }

    double ch_limit(double h) const {
        if (!belongs_to_ch(h)) throw ArgumentError("tail is not in C^h");
        switch (kind_) {
        case Kind::constant: return 0.0;
        case Kind::exponential: return rate_ == -h ? 1.0 : 0.0;
        case Kind::tabulated: return rate_ == -h ? values_.front() * std::exp(h * nodes_.front()) : 0.0;
        }
        return 0.0;
    }

    /// sup_{s <= 0} e^{h s} |tau(s)|, by stationary-point analysis.
    double weighted_sup(double h) const {
        if (!belongs_to_ch(h)) throw ArgumentError("tail is not in C^h");
        switch (kind_) {
        case Kind::constant:
        case Kind::exponential: return 1.0;  // e^{(h+b)s} <= 1 on s <= 0
        case Kind::tabulated: break;
        }
        double best = std::abs(values_.front()) * std::exp(h * nodes_.front());
        for (std::size_t i = 1; i < nodes_.size(); ++i)
            best = std::max(best, linear_piece_sup(h, nodes_[i - 1], values_[i - 1], nodes_[i], values_[i]));
        return best;
    }

    bool same_shape(const TailProfile& o) const noexcept {
        return kind_ == o.kind_ && rate_ == o.rate_ && nodes_ == o.nodes_ && values_ == o.values_;
    }

    std::string describe() const {
        switch (kind_) {
        case Kind::constant: return "constant";
        case Kind::exponential: return fmt::format("exponential(b={})", rate_);
        case Kind::tabulated: return fmt::format("tabulated[{}, 0] + exp(b={})", nodes_.front(), rate_);
        }
        return {};
    }

private:
    explicit TailProfile(Kind kind) : kind_(kind) {}

    // max of e^{h s}|v(s)| for v linear on [a, b]
    static double linear_piece_sup(double h, double a, double va, double b, double vb) {
        auto weighted = [h](double s, double v) { return std::exp(h * s) * std::abs(v); };
        double best = std::max(weighted(a, va), weighted(b, vb));
        const double slope = (vb - va) / (b - a);
        if (slope == 0.0) return best;
        // d/ds e^{hs} (v(s)) = 0  <=>  h v(s) + slope = 0, valid on either sign branch
        const double s_star = a + (-slope / h - va) / slope;
        if (s_star > a && s_star < b) best = std::max(best, weighted(s_star, va + slope * (s_star - a)));
        return best;
    }

    Kind kind_;
    double rate_ = 0.0;
    std::vector<double> nodes_;
    std::vector<double> values_;
};

namespace detail {

inline double gk_integrate(const std::function<double(double)>& f, double a, double b) {
    if (!(b > a)) return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 12, 1e-12);
}

/// Integral over theta <= theta_c of K(amplitude tau(theta + shift)) mu(d theta)
/// where theta + shift stays inside the tail's domain. Contributions below
/// -horizon are dropped when no closed form is available.
inline double tail_delay_integral(const DelayMeasure& mu, const ScalarMap& kernel, double amplitude,
                                  const TailProfile& tau, double shift, double theta_c, double horizon) {
    using MK = DelayMeasure::Kind;
    if (mu.kind() == MK::point_mass) return theta_c >= 0.0 ? kernel(amplitude * tau(0.0)) : 0.0;
    if (theta_c < mu.support_lower()) return 0.0;
    if (tau.kind() == TailProfile::Kind::constant) {
        const double k = kernel(amplitude);
        if (!std::isfinite(k)) throw NumericError("non-finite kernel value on constant tail", theta_c);
        return k * mu.mass_below(theta_c);
    }
    if (mu.kind() == MK::exponential && tau.kind() == TailProfile::Kind::exponential && kernel.is_homogeneous()) {
        const double p = kernel.homogeneity();
        const double r = mu.rate();
        const double decay = p * tau.rate() + 2.0 * r;
        if (!(decay > 0.0))
            throw DivergenceError(fmt::format("delay integral diverges: kernel growth {} outpaces measure rate {}",
                                              p * tau.rate(), 2.0 * r));
        // K(A e^{b(theta+shift)}) = K(A) e^{p b (theta + shift)}
        return kernel(amplitude) * std::exp(p * tau.rate() * shift) * 2.0 * r * std::exp(decay * theta_c) / decay;
    }
    const double lo = std::max(mu.support_lower(), -horizon);
    auto integrand = [&](double theta) {
        const double v = kernel(amplitude * tau(theta + shift)) * mu.density(theta);
        if (!std::isfinite(v)) throw NumericError(fmt::format("non-finite kernel value at theta = {}", theta), theta);
        return v;
    };
    double total = 0.0;
    // split at tabulated nodes so each panel is smooth
    std::vector<double> cuts{lo, theta_c};
    auto add_cuts = [&](const std::vector<double>& nodes, double offset) {
        for (double n : nodes) {
            const double c = n + offset;
            if (c > lo && c < theta_c) cuts.push_back(c);
        }
    };
    if (tau.kind() == TailProfile::Kind::tabulated) add_cuts(tau.nodes(), -shift);
    if (mu.kind() == MK::tabulated) add_cuts(mu.nodes(), 0.0);
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t i = 1; i < cuts.size(); ++i) total += gk_integrate(integrand, cuts[i - 1], cuts[i]);
    return total;
}

}  // namespace detail

/// A segment process u_t: analytic tail on (-inf, tail_end] followed by
/// samples on [tail_end, head]. Freshly constructed buffers have
/// tail_end = 0 and a single sample phi(0).
class HistoryBuffer {
public:
    /// `horizon <= 0` selects the default truncation horizon 40 / h.
    HistoryBuffer(SpectralSpace space, double h, TailProfile tail, std::vector<double> profile, double horizon = 0.0)
        : space_(std::move(space)), h_(h), tail_(std::move(tail)), profile_(std::move(profile)),
          horizon_(horizon > 0.0 ? horizon : 40.0 / h) {
        if (!(h > 0.0)) throw ArgumentError(fmt::format("C^h weight must be positive, got {}", h));
        if (profile_.size() != space_.dim())
            throw ArgumentError(fmt::format("profile has {} coefficients, space has {}", profile_.size(), space_.dim()));
        if (!tail_.belongs_to_ch(h_))
            throw ArgumentError(fmt::format("initial tail {} is not in C^h for h = {}: e^(h s) phi(s) has no limit",
                                            tail_.describe(), h_));
        times_.push_back(0.0);
        const double t0 = tail_(0.0);
        for (double c : profile_) samples_.push_back(c * t0);
    }

    /// Constant history phi(s) = psi.
    static HistoryBuffer constant(SpectralSpace space, double h, std::vector<double> psi) {
        return HistoryBuffer(std::move(space), h, TailProfile::constant(), std::move(psi));
    }
    static HistoryBuffer constant_scalar(double h, double c) {
        return constant(SpectralSpace::scalar(), h, {c});
    }

    const SpectralSpace& space() const noexcept { return space_; }
    std::size_t dim() const noexcept { return space_.dim(); }
    double h() const noexcept { return h_; }
    double horizon() const noexcept { return horizon_; }
    const TailProfile& tail() const noexcept { return tail_; }
    const std::vector<double>& profile() const noexcept { return profile_; }
    double tail_end() const noexcept { return tail_end_; }
    double head() const noexcept { return times_.back(); }
    bool pruned() const noexcept { return pruned_; }
    std::size_t size() const noexcept { return times_.size(); }
    const std::vector<double>& times() const noexcept { return times_; }

    std::span<const double> sample(std::size_t i) const noexcept {
        return {samples_.data() + i * dim(), dim()};
    }
    std::span<const double> head_state() const noexcept { return sample(size() - 1); }

    /// Appends u(t); older samples beyond the truncation horizon are dropped.
    void append(double t, std::span<const double> state) {
        if (!(t > head())) throw ArgumentError(fmt::format("append at t = {} not after head {}", t, head()));
        if (state.size() != dim()) throw ArgumentError("appended state has wrong dimension");
        times_.push_back(t);
        samples_.insert(samples_.end(), state.begin(), state.end());
        const double cutoff = t - horizon_;
        std::size_t drop = 0;
        while (drop + 1 < times_.size() && times_[drop + 1] <= cutoff) ++drop;
        if (drop > 0) {
            times_.erase(times_.begin(), times_.begin() + static_cast<std::ptrdiff_t>(drop));
            samples_.erase(samples_.begin(), samples_.begin() + static_cast<std::ptrdiff_t>(drop * dim()));
            pruned_ = true;
        }
    }

    /// u(s) for s <= head: tail formula or linear interpolation.
    std::vector<double> value_at(double s) const {
        if (s > head()) throw RangeError(fmt::format("history queried at {} beyond head {}", s, head()));
        std::vector<double> out(dim());
        if (s <= tail_end_ && !pruned_) {
            const double f = tail_(s - tail_end_);
            for (std::size_t i = 0; i < dim(); ++i) out[i] = profile_[i] * f;
            return out;
        }
        if (s <= times_.front()) {
            auto first = sample(0);
            std::copy(first.begin(), first.end(), out.begin());
            return out;
        }
        auto it = std::lower_bound(times_.begin(), times_.end(), s);
        const auto j = static_cast<std::size_t>(it - times_.begin());
        if (*it == s) {
            auto v = sample(j);
            std::copy(v.begin(), v.end(), out.begin());
            return out;
        }
        const double w = (s - times_[j - 1]) / (times_[j] - times_[j - 1]);
        auto a = sample(j - 1);
        auto b = sample(j);
        for (std::size_t i = 0; i < dim(); ++i) out[i] = (1.0 - w) * a[i] + w * b[i];
        return out;
    }

    void check_time(double t) const {
        if (!(t >= tail_end_ && t <= head()))
            throw RangeError(fmt::format("time {} outside simulated range [{}, {}]", t, tail_end_, head()));
    }

    /// Multiplies the whole history (tail and samples) by c.
    void scale(double c) {
        for (double& v : profile_) v *= c;
        for (double& v : samples_) v *= c;
    }

    /// Pointwise difference; both buffers must share space, h, tail shape and time grid.
    friend HistoryBuffer operator-(const HistoryBuffer& a, const HistoryBuffer& b) {
        if (!(a.space_ == b.space_) || a.h_ != b.h_ || !a.tail_.same_shape(b.tail_) || a.times_ != b.times_ ||
            a.tail_end_ != b.tail_end_)
            throw ArgumentError("history difference needs matching space, weight, tail shape and grid");
        HistoryBuffer out = a;
        for (std::size_t i = 0; i < out.profile_.size(); ++i) out.profile_[i] -= b.profile_[i];
        for (std::size_t i = 0; i < out.samples_.size(); ++i) out.samples_[i] -= b.samples_[i];
        out.pruned_ = a.pruned_ || b.pruned_;
        return out;
    }

    /// u_t re-anchored so its head sits at local time 0.
    HistoryBuffer segment(double t) const {
        check_time(t);
        HistoryBuffer out = *this;
        std::size_t keep = 0;
        while (keep < times_.size() && times_[keep] <= t) ++keep;
        out.times_.resize(keep);
        out.samples_.resize(keep * dim());
        if (out.times_.back() < t) {
            const auto v = value_at(t);
            out.times_.push_back(t);
            out.samples_.insert(out.samples_.end(), v.begin(), v.end());
        }
        for (double& s : out.times_) s -= t;
        out.tail_end_ = tail_end_ - t;
        return out;
    }

private:
    SpectralSpace space_;
    double h_;
    TailProfile tail_;
    std::vector<double> profile_;
    double horizon_;
    double tail_end_ = 0.0;
    bool pruned_ = false;
    std::vector<double> times_;
    std::vector<double> samples_;
};

/// ||u_t||_h: max of the tail's closed-form supremum and the weighted samples
/// at or before t.
inline double seminorm_h(const HistoryBuffer& buf, double t) {
    buf.check_time(t);
    const double h = buf.h();
    double best = 0.0;
    if (!buf.pruned())
        best = std::exp(h * (buf.tail_end() - t)) * SpectralSpace::norm(buf.profile()) * buf.tail().weighted_sup(h);
    const auto& times = buf.times();
    std::size_t j = 0;
    for (; j < times.size() && times[j] <= t; ++j)
        best = std::max(best, std::exp(h * (times[j] - t)) * SpectralSpace::norm(buf.sample(j)));
    if (j > 0 && times[j - 1] < t) best = std::max(best, SpectralSpace::norm(buf.value_at(t)));
    return best;
}

/// u_t as a history of its own whose head sits at local time 0.
inline HistoryBuffer extract_segment(const HistoryBuffer& buf, double t) { return buf.segment(t); }

namespace detail {

// Interval-mass trapezoid over the sampled part of the segment at time t.
template <class Value>
double sampled_delay_part(const HistoryBuffer& buf, double t, const DelayMeasure& mu, Value&& value_of) {
    const auto& times = buf.times();
    double acc = 0.0;
    double prev_t = times.front();
    double prev_k = value_of(buf.sample(0), prev_t - t);
    for (std::size_t j = 1; j < times.size() && times[j - 1] < t; ++j) {
        double cur_t = times[j];
        double cur_k = 0.0;
        if (cur_t > t) {
            cur_t = t;
            const auto v = buf.value_at(t);
            cur_k = value_of(std::span<const double>(v), 0.0);
        } else {
            cur_k = value_of(buf.sample(j), cur_t - t);
        }
        acc += 0.5 * (prev_k + cur_k) * mu.mass(prev_t - t, cur_t - t);
        prev_t = cur_t;
        prev_k = cur_k;
    }
    return acc;
}

}  // namespace detail

/// Integral of K(||u(t + theta)||) mu(d theta): closed form or adaptive
/// quadrature on the analytic tail, interval-mass trapezoid on the samples.
inline double delay_integral(const HistoryBuffer& buf, double t, const DelayMeasure& mu, const ScalarMap& kernel) {
    buf.check_time(t);
    auto k_of = [&](std::span<const double> state, double theta) {
        const double v = kernel(SpectralSpace::norm(state));
        if (!std::isfinite(v)) throw NumericError(fmt::format("non-finite kernel value at theta = {}", theta), theta);
        return v;
    };
    if (mu.kind() == DelayMeasure::Kind::point_mass) {
        const auto v = buf.value_at(t);
        return k_of(v, 0.0);
    }
    double total = detail::sampled_delay_part(buf, t, mu, k_of);
    if (!buf.pruned()) {
        const double shift = t - buf.tail_end();
        total += detail::tail_delay_integral(mu, kernel, SpectralSpace::norm(buf.profile()), buf.tail(), shift,
                                             buf.tail_end() - t, buf.horizon());
    }
    return total;
}

/// Field-valued delay integral: for every collocation node x,
/// integral of K(u(t + theta)(x)) mu(d theta). Returns grid values.
inline std::vector<double> delay_integral_pointwise(const HistoryBuffer& buf, double t, const DelayMeasure& mu,
                                                    const ScalarMap& kernel) {
    buf.check_time(t);
    const auto& space = buf.space();
    const std::size_t m = space.grid_size();
    std::vector<double> out(m, 0.0);
    std::vector<double> grid(m);
    auto eval_grid = [&](std::span<const double> state, double theta, std::vector<double>& dst) {
        space.to_grid(state, grid);
        for (std::size_t j = 0; j < m; ++j) {
            dst[j] = kernel(grid[j]);
            if (!std::isfinite(dst[j]))
                throw NumericError(fmt::format("non-finite kernel value at theta = {}", theta), theta);
        }
    };
    if (mu.kind() == DelayMeasure::Kind::point_mass) {
        eval_grid(buf.value_at(t), 0.0, out);
        return out;
    }
    std::vector<double> prev(m), cur(m);
    const auto& times = buf.times();
    double prev_t = times.front();
    eval_grid(buf.sample(0), prev_t - t, prev);
    for (std::size_t j = 1; j < times.size() && times[j - 1] < t; ++j) {
        double cur_t = times[j];
        if (cur_t > t) {
            cur_t = t;
            eval_grid(buf.value_at(t), 0.0, cur);
        } else {
            eval_grid(buf.sample(j), cur_t - t, cur);
        }
        const double w = 0.5 * mu.mass(prev_t - t, cur_t - t);
        for (std::size_t x = 0; x < m; ++x) out[x] += w * (prev[x] + cur[x]);
        prev_t = cur_t;
        std::swap(prev, cur);
    }
    if (!buf.pruned()) {
        const auto psi = space.to_grid(buf.profile());
        const double shift = t - buf.tail_end();
        for (std::size_t x = 0; x < m; ++x)
            out[x] += detail::tail_delay_integral(mu, kernel, psi[x], buf.tail(), shift, buf.tail_end() - t,
                                                  buf.horizon());
    }
    return out;
}

/// Incremental form of delay_integral_pointwise for a path being stepped:
/// O(m) per appended sample for the exponential and point-mass laws, a
/// window sum for tabulated laws. Agrees with the direct evaluation up to
/// rounding.
class PointwiseDelayAccumulator {
public:
    PointwiseDelayAccumulator(const HistoryBuffer& initial, DelayMeasure mu, ScalarMap kernel)
        : mu_(std::move(mu)), kernel_(std::move(kernel)), space_(initial.space()), tail_(initial.tail()),
          horizon_(initial.horizon()) {
        if (initial.size() != 1 || initial.tail_end() != 0.0)
            throw ArgumentError("accumulator must start from an unsimulated initial datum");
        const std::size_t m = space_.grid_size();
        psi_grid_ = space_.to_grid(initial.profile());
        head_k_.resize(m);
        sim_.assign(m, 0.0);
        std::vector<double> g = space_.to_grid(initial.head_state());
        apply_kernel(g, head_k_, 0.0);
        if (mu_.kind() == DelayMeasure::Kind::exponential) {
            tail0_.resize(m);
            for (std::size_t x = 0; x < m; ++x)
                tail0_[x] = detail::tail_delay_integral(mu_, kernel_, psi_grid_[x], tail_, 0.0, 0.0, horizon_);
        }
        if (mu_.kind() == DelayMeasure::Kind::tabulated) window_.push_back({0.0, head_k_});
    }

    double head() const noexcept { return head_; }

    /// Registers u(t) given on the collocation grid.
    void push(double t, std::span<const double> grid_values) {
        const double dt = t - head_;
        if (!(dt > 0.0)) throw ArgumentError("accumulator push must advance time");
        std::vector<double> k(grid_values.size());
        apply_kernel(grid_values, k, 0.0);
        if (mu_.kind() == DelayMeasure::Kind::exponential) {
            const double decay = std::exp(-2.0 * mu_.rate() * dt);
            const double w = 0.5 * mu_.mass(-dt, 0.0);
            for (std::size_t x = 0; x < k.size(); ++x) sim_[x] = decay * sim_[x] + w * (head_k_[x] + k[x]);
        } else if (mu_.kind() == DelayMeasure::Kind::tabulated) {
            window_.push_back({t, k});
            const double lower = t + mu_.support_lower();
            while (window_.size() > 2 && window_[1].time <= lower) window_.pop_front();
        }
        head_ = t;
        head_k_ = std::move(k);
    }

    /// Current value of the integral on the grid, written into `out`.
    void value(std::span<double> out) const {
        const std::size_t m = out.size();
        switch (mu_.kind()) {
        case DelayMeasure::Kind::point_mass:
            std::copy(head_k_.begin(), head_k_.end(), out.begin());
            return;
        case DelayMeasure::Kind::exponential: {
            const bool tail_live = head_ <= horizon_;
            const double tail_scale = std::exp(-2.0 * mu_.rate() * head_);
            for (std::size_t x = 0; x < m; ++x) out[x] = sim_[x] + (tail_live ? tail_scale * tail0_[x] : 0.0);
            return;
        }
        case DelayMeasure::Kind::tabulated: {
            std::fill(out.begin(), out.end(), 0.0);
            for (std::size_t i = 1; i < window_.size(); ++i) {
                const double w = 0.5 * mu_.mass(window_[i - 1].time - head_, window_[i].time - head_);
                for (std::size_t x = 0; x < m; ++x) out[x] += w * (window_[i - 1].k[x] + window_[i].k[x]);
            }
            if (-head_ >= mu_.support_lower())
                for (std::size_t x = 0; x < m; ++x)
                    out[x] += detail::tail_delay_integral(mu_, kernel_, psi_grid_[x], tail_, head_, -head_, horizon_);
            return;
        }
        }
    }

private:
    struct Entry {
        double time;
        std::vector<double> k;
    };

    void apply_kernel(std::span<const double> g, std::span<double> out, double theta) const {
        for (std::size_t x = 0; x < g.size(); ++x) {
            out[x] = kernel_(g[x]);
            if (!std::isfinite(out[x]))
                throw NumericError(fmt::format("non-finite kernel value at theta = {}", theta), theta);
        }
    }

    DelayMeasure mu_;
    ScalarMap kernel_;
    SpectralSpace space_;
    TailProfile tail_;
    double horizon_;
    double head_ = 0.0;
    std::vector<double> psi_grid_;
    std::vector<double> head_k_;
    std::vector<double> sim_;
    std::vector<double> tail0_;
    std::deque<Entry> window_;
};

/// Running ||u_t||_h along a stepped path.
class SeminormTracker {
public:
    explicit SeminormTracker(const HistoryBuffer& initial)
        : h_(initial.h()), value_(seminorm_h(initial, initial.head())), head_(initial.head()) {}

    void push(double t, double state_norm) {
        value_ = std::max(std::exp(-h_ * (t - head_)) * value_, state_norm);
        head_ = t;
    }
    double value() const noexcept { return value_; }

private:
    double h_;
    double value_;
    double head_;
};

}  // namespace avgsfpde
