#pragma once

// Semi-implicit Euler-Maruyama for Galerkin SFPDEs with infinite delay.
//
//   u_{n+1,i} = (u_{n,i} + dt (N_i(u_n) + f_i) + g_i dW_i) / (1 + dt r_i)
//
// where r_i is the stiff linear rate of mode i, N the explicit nonlinear part
// of A and f, g the (modulated) functional drift and diffusion at t_n.

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <fmt/format.h>

#include "avgsfpde/coefficients.hpp"
#include "avgsfpde/errors.hpp"
#include "avgsfpde/history.hpp"
#include "avgsfpde/philox.hpp"
#include "avgsfpde/spectral.hpp"

namespace avgsfpde {

enum class Scheme { explicit_em, semi_implicit_linear };

inline std::string to_string(Scheme s) {
    return s == Scheme::explicit_em ? "explicit_em" : "semi_implicit_linear";
}

inline Scheme parse_scheme(const std::string& s) {
    if (s == "explicit_em") return Scheme::explicit_em;
    if (s == "semi_implicit_linear") return Scheme::semi_implicit_linear;
    throw ArgumentError(fmt::format("unknown scheme '{}'", s));
}

struct StepperConfig {
    double dt = 1e-3;
    double T = 1.0;
    Scheme scheme = Scheme::semi_implicit_linear;
    /// Retained noise coordinates k_w; 0 keeps every coordinate of g.
    std::size_t noise_modes = 0;
    std::uint64_t seed = 0;
    /// Time-scale parameter; empty runs the averaged system.
    std::optional<double> eps;
    /// Drops the stochastic integral entirely.
    bool deterministic = false;

    std::size_t steps() const {
        const double ratio = T / dt;
        const auto n = static_cast<std::size_t>(std::llround(ratio));
        if (n == 0 || std::abs(ratio - static_cast<double>(n)) > 1e-9 * ratio)
            throw ArgumentError(fmt::format("horizon T = {} is not a positive multiple of dt = {}", T, dt));
        return n;
    }

    double time(std::size_t n) const noexcept { return static_cast<double>(n) * dt; }

    void validate(const PdeOperator& op, const SpectralSpace& space) const {
        if (!(dt > 0.0) || !std::isfinite(dt)) throw ArgumentError(fmt::format("dt must be positive, got {}", dt));
        if (!(T >= dt)) throw ArgumentError(fmt::format("horizon T = {} shorter than dt = {}", T, dt));
        if (eps && (!(*eps > 0.0) || *eps > 1.0))
            throw ArgumentError(fmt::format("eps must lie in (0, 1], got {}", *eps));
        steps();
        if (scheme == Scheme::explicit_em) {
            const auto rates = linear_rates(op, space);
            const double stiff = rates.empty() ? 0.0 : rates.back();
            if (dt * stiff >= 2.0)
                throw ArgumentError(fmt::format("explicit_em unstable: dt * lambda_k = {} >= 2", dt * stiff));
        }
    }
};

/// Increment of the mode-th Wiener coordinate over sub-interval `sub` of
/// 2^level equal parts of step n, built by dyadic Brownian-bridge refinement
/// of the level-0 increment so every level sums to the same path.
inline double wiener_increment(const NoiseSource& noise, std::uint64_t n, std::uint32_t mode, double dt,
                               std::uint32_t level = 0, std::uint32_t sub = 0) {
    if (level == 0) return std::sqrt(dt) * noise.normal(n, mode);
    const double parent = wiener_increment(noise, n, mode, dt, level - 1, sub / 2);
    const double parent_len = dt / static_cast<double>(1u << (level - 1));
    const double left = 0.5 * parent + 0.5 * std::sqrt(parent_len) * noise.normal(n, mode, level, sub / 2);
    return (sub % 2 == 0) ? left : parent - left;
}

/// One path being stepped: the history buffer plus the incremental delay
/// integrals and seminorm that the functional coefficients read.
class PathState {
public:
    PathState(const PdeOperator& op, const CoefficientSet& cs, const HistoryBuffer& initial, std::uint64_t seed,
              std::uint64_t path_id)
        : buffer_(initial), noise_(seed, path_id), tracker_(initial) {
        check_operator_space(op, initial.space());
        if (initial.size() != 1 || initial.head() != 0.0)
            throw ArgumentError("path must start from an unsimulated initial datum");
        auto add = [&](const FieldFunctional& f, std::vector<PointwiseDelayAccumulator>& acc) {
            for (const auto& term : f.terms)
                if (const auto* d = std::get_if<DelayTerm>(&term)) acc.emplace_back(initial, d->measure, d->kernel);
        };
        add(cs.drift, drift_acc_);
        if (const auto* m = std::get_if<MultiplicativeNoise>(&cs.diffusion.form)) add(m->field, diff_acc_);
        const auto& space = initial.space();
        head_grid_ = space.to_grid(initial.head_state());
        rates_ = linear_rates(op, space);
    }

    double time() const noexcept { return buffer_.head(); }
    std::uint64_t step_index() const noexcept { return step_; }
    std::span<const double> state() const noexcept { return buffer_.head_state(); }
    const HistoryBuffer& buffer() const noexcept { return buffer_; }
    double seminorm() const noexcept { return tracker_.value(); }
    const NoiseSource& noise() const noexcept { return noise_; }

private:
    friend void step(PathState&, const PdeOperator&, const CoefficientSet&, const StepperConfig&);
    friend struct StepKernel;

    HistoryBuffer buffer_;
    NoiseSource noise_;
    SeminormTracker tracker_;
    std::vector<PointwiseDelayAccumulator> drift_acc_;
    std::vector<PointwiseDelayAccumulator> diff_acc_;
    std::vector<double> head_grid_;
    std::vector<double> rates_;
    std::uint64_t step_ = 0;
};

struct StepKernel {
    // Scratch reused across steps of one path.
    TransformScratch scratch;
    std::vector<double> nl, drift, diff, fgrid, next, next_grid;
    std::vector<std::vector<double>> delay;

    void fit(const SpectralSpace& space, std::size_t delays) {
        nl.resize(space.dim());
        drift.resize(space.dim());
        diff.resize(space.dim());
        next.resize(space.dim());
        fgrid.resize(space.grid_size());
        next_grid.resize(space.grid_size());
        delay.resize(delays);
        for (auto& d : delay) d.resize(space.grid_size());
    }

    /// Galerkin coefficients of a functional at the state's head, or false if
    /// the functional is empty.
    bool functional(const PathState& s, const FieldFunctional& f, const std::vector<PointwiseDelayAccumulator>& acc,
                    std::vector<double>& out) {
        if (f.empty()) return false;
        const auto& space = s.buffer_.space();
        fit(space, acc.size());
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i].value(delay[i]);
        compose_functional(f, s.head_grid_, delay, s.tracker_.value(), fgrid);
        space.from_grid(fgrid, out);
        return true;
    }

    /// Advances `s` by h from time t0 with the given per-coordinate Wiener
    /// increments. Returns the first non-finite mode, or -1 on success.
    long advance(PathState& s, const PdeOperator& op, const CoefficientSet& cs, const StepperConfig& cfg, double t0,
                 double h, const std::vector<double>& dw) {
        const auto& space = s.buffer_.space();
        const std::size_t k = space.dim();
        fit(space, std::max(s.drift_acc_.size(), s.diff_acc_.size()));
        const auto u = s.buffer_.head_state();
        bool has_drift = false;
        double xi1 = 0.0;
        std::fill(diff.begin(), diff.end(), 0.0);
        try {
            nonlinear_part(op, space, u, nl, scratch);
            has_drift = functional(s, cs.drift, s.drift_acc_, drift);
            if (has_drift) xi1 = modulation_at(cs.drift_oscillator, t0, cfg.eps);
            if (!cfg.deterministic) {
                const double xi2 = modulation_at(cs.diffusion.modulation, t0, cfg.eps);
                if (const auto* a = std::get_if<AdditiveNoise>(&cs.diffusion.form)) {
                    for (std::size_t i = 0; i < dw.size() && i < k; ++i) diff[i] = xi2 * a->amplitudes[i] * dw[i];
                } else {
                    const auto& field = std::get<MultiplicativeNoise>(cs.diffusion.form).field;
                    if (functional(s, field, s.diff_acc_, diff))
                        for (double& c : diff) c *= xi2 * dw[0];
                }
            }
        } catch (const NumericError&) {
            return 0;
        }
        for (std::size_t i = 0; i < k; ++i) {
            const double f = has_drift ? xi1 * drift[i] : 0.0;
            if (cfg.scheme == Scheme::semi_implicit_linear)
                next[i] = (u[i] + h * (nl[i] + f) + diff[i]) / (1.0 + h * s.rates_[i]);
            else
                next[i] = u[i] + h * (nl[i] - s.rates_[i] * u[i] + f) + diff[i];
            if (!std::isfinite(next[i])) return static_cast<long>(i);
        }
        commit(s, t0 + h);
        return -1;
    }

    void commit(PathState& s, double t1) {
        const auto& space = s.buffer_.space();
        space.to_grid(next, next_grid);
        s.buffer_.append(t1, next);
        for (auto& a : s.drift_acc_) a.push(t1, next_grid);
        for (auto& a : s.diff_acc_) a.push(t1, next_grid);
        s.tracker_.push(t1, SpectralSpace::norm(next));
        s.head_grid_.assign(next_grid.begin(), next_grid.end());
    }
};

/// Number of independent Wiener coordinates a configuration drives.
inline std::size_t active_noise_modes(const CoefficientSet& cs, const SpectralSpace& space, const StepperConfig& cfg) {
    if (cfg.deterministic) return 0;
    if (!cs.diffusion.is_additive()) return 1;
    std::size_t n = std::min(cs.diffusion.noise_modes(), space.dim());
    if (cfg.noise_modes > 0) n = std::min(n, cfg.noise_modes);
    return n;
}

/// Advances a path by one base step dt. A non-finite result is retried with
/// up to four dyadic halvings that reuse the same Brownian path; after that
/// the blow-up is reported.
inline void step(PathState& s, const PdeOperator& op, const CoefficientSet& cs, const StepperConfig& cfg) {
    thread_local StepKernel kernel;
    thread_local std::vector<double> dw;
    const std::uint64_t n = s.step_;
    const double t0 = cfg.time(n);
    const std::size_t modes = active_noise_modes(cs, s.buffer_.space(), cfg);
    dw.resize(modes);
    for (std::size_t j = 0; j < modes; ++j) dw[j] = wiener_increment(s.noise_, n, static_cast<std::uint32_t>(j), cfg.dt);
    long bad = kernel.advance(s, op, cs, cfg, t0, cfg.dt, dw);
    if (bad < 0) {
        ++s.step_;
        return;
    }
    for (std::uint32_t level = 1; level <= 4; ++level) {
        PathState trial = s;
        const std::uint32_t parts = 1u << level;
        const double h = cfg.dt / parts;
        bool ok = true;
        for (std::uint32_t sub = 0; sub < parts && ok; ++sub) {
            for (std::size_t j = 0; j < modes; ++j)
                dw[j] = wiener_increment(s.noise_, n, static_cast<std::uint32_t>(j), cfg.dt, level, sub);
            const double start = t0 + sub * h;
            bad = kernel.advance(trial, op, cs, cfg, start, sub + 1 == parts ? cfg.time(n + 1) - start : h, dw);
            ok = bad < 0;
        }
        if (ok) {
            trial.step_ = n + 1;
            s = std::move(trial);
            return;
        }
    }
    throw BlowUpError(fmt::format("blow-up at t = {} in mode {} after 4 step halvings", t0, bad + 1), t0,
                      static_cast<std::size_t>(bad));
}

/// States on the base time grid, row-major.
struct Trajectory {
    std::size_t dim = 0;
    std::vector<double> times;
    std::vector<double> states;

    std::size_t size() const noexcept { return times.size(); }
    std::span<const double> state(std::size_t i) const noexcept { return {states.data() + i * dim, dim}; }
    void push(double t, std::span<const double> u) {
        times.push_back(t);
        states.insert(states.end(), u.begin(), u.end());
    }
};

inline Trajectory run_path(const PdeOperator& op, const CoefficientSet& cs, const HistoryBuffer& initial,
                           const StepperConfig& cfg, std::uint64_t path_id) {
    cfg.validate(op, initial.space());
    const std::size_t n = cfg.steps();
    PathState s(op, cs, initial, cfg.seed, path_id);
    Trajectory tr;
    tr.dim = initial.dim();
    tr.times.reserve(n + 1);
    tr.states.reserve((n + 1) * tr.dim);
    tr.push(0.0, s.state());
    for (std::size_t i = 0; i < n; ++i) {
        step(s, op, cs, cfg);
        tr.push(cfg.time(i + 1), s.state());
    }
    return tr;
}

/// max_n ||a(t_n) - b(t_n)||^2 over a shared grid.
inline double sup_squared_gap(const Trajectory& a, const Trajectory& b) {
    if (a.times != b.times || a.dim != b.dim) throw ArgumentError("trajectories live on different grids");
    double best = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto x = a.state(i);
        const auto y = b.state(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < a.dim; ++j) acc += (x[j] - y[j]) * (x[j] - y[j]);
        best = std::max(best, acc);
    }
    return best;
}

struct CoupledRun {
    Trajectory fast;
    Trajectory averaged;
    double sup_error = 0.0;
};

/// u^eps and u* on the same Brownian path (same seed and path id).
inline CoupledRun coupled_run(const PdeOperator& op, const CoefficientSet& cs, const HistoryBuffer& initial_eps,
                              const HistoryBuffer& initial_avg, const StepperConfig& cfg_eps,
                              const StepperConfig& cfg_avg, std::uint64_t path_id) {
    if (cfg_eps.dt != cfg_avg.dt || cfg_eps.T != cfg_avg.T || cfg_eps.noise_modes != cfg_avg.noise_modes ||
        cfg_eps.seed != cfg_avg.seed || cfg_eps.scheme != cfg_avg.scheme ||
        cfg_eps.deterministic != cfg_avg.deterministic)
        throw ArgumentError("coupled runs need identical dt, T, scheme, noise modes and seed");
    if (!cfg_eps.eps || cfg_avg.eps)
        throw ArgumentError("coupled run needs eps on the fast configuration and none on the averaged one");
    CoupledRun out;
    out.fast = run_path(op, cs, initial_eps, cfg_eps, path_id);
    out.averaged = run_path(op, cs, initial_avg, cfg_avg, path_id);
    out.sup_error = sup_squared_gap(out.fast, out.averaged);
    return out;
}

inline CoupledRun coupled_run(const PdeOperator& op, const CoefficientSet& cs, const HistoryBuffer& initial,
                              const StepperConfig& cfg_eps, const StepperConfig& cfg_avg, std::uint64_t path_id) {
    return coupled_run(op, cs, initial, initial, cfg_eps, cfg_avg, path_id);
}

/// Block length d as a whole number of grid steps.
inline std::size_t block_steps(const Trajectory& path, double d) {
    if (path.size() < 2) throw ArgumentError("trajectory too short to freeze");
    const double dt = path.times[1] - path.times[0];
    const double ratio = d / dt;
    const auto r = static_cast<std::size_t>(std::llround(ratio));
    if (r == 0 || std::abs(ratio - static_cast<double>(r)) > 1e-6 * ratio)
        throw ArgumentError(fmt::format("block length d = {} is not a multiple of dt = {}", d, dt));
    return r;
}

/// Piecewise-frozen path: u-hat(t) = u(jd) on [jd, (j+1)d).
inline Trajectory khasminskii_freeze(const Trajectory& path, double d) {
    const std::size_t r = block_steps(path, d);
    Trajectory out = path;
    for (std::size_t i = 0; i < path.size(); ++i) {
        const auto src = path.state((i / r) * r);
        std::copy(src.begin(), src.end(), out.states.begin() + static_cast<std::ptrdiff_t>(i * path.dim));
    }
    return out;
}

/// integral_0^T ||u - u-hat||^2 dt, trapezoid inside each block with the
/// frozen value held up to the block's right end.
inline double frozen_gap_integral(const Trajectory& path, double d) {
    const std::size_t r = block_steps(path, d);
    auto gap = [&](std::size_t i, std::size_t anchor) {
        const auto a = path.state(i);
        const auto b = path.state(anchor);
        double acc = 0.0;
        for (std::size_t j = 0; j < path.dim; ++j) acc += (a[j] - b[j]) * (a[j] - b[j]);
        return acc;
    };
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        const std::size_t anchor = (i / r) * r;
        const double w = path.times[i + 1] - path.times[i];
        total += 0.5 * w * (gap(i, anchor) + gap(i + 1, anchor));
    }
    return total;
}

/// integral_0^T ||u_s - u-hat_s||_h^2 ds on the grid; before time 0 both
/// segments share the initial datum, so only simulated times contribute.
inline double frozen_segment_gap_integral(const Trajectory& path, double d, double h) {
    const auto frozen = khasminskii_freeze(path, d);
    std::vector<double> sn(path.size());
    double running = 0.0;
    for (std::size_t i = 0; i < path.size(); ++i) {
        const auto a = path.state(i);
        const auto b = frozen.state(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < path.dim; ++j) acc += (a[j] - b[j]) * (a[j] - b[j]);
        const double decay = i == 0 ? 0.0 : std::exp(-h * (path.times[i] - path.times[i - 1]));
        running = std::max(decay * running, std::sqrt(acc));
        sn[i] = running * running;
    }
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
        total += 0.5 * (path.times[i + 1] - path.times[i]) * (sn[i] + sn[i + 1]);
    return total;
}

/// max_n ||u(t_n)||^2.
inline double sup_squared_norm(const Trajectory& path) {
    double best = 0.0;
    for (std::size_t i = 0; i < path.size(); ++i) {
        const double v = SpectralSpace::norm(path.state(i));
        best = std::max(best, v * v);
    }
    return best;
}

}  // namespace avgsfpde
