#pragma once

// Monte Carlo studies: the averaging sweep in eps, the block-freezing
// diagnostic in d, continuity in the initial datum, a-priori bounds, time-step
// refinement and the hypothesis audit. Every path is indexed, results are
// stored per index and reduced in index order, so worker count never changes
// a report.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "avgsfpde/checks.hpp"
#include "avgsfpde/errors.hpp"
#include "avgsfpde/integrator.hpp"
#include "avgsfpde/presets.hpp"
#include "avgsfpde/stats.hpp"

namespace avgsfpde {

/// A sweep stopped by a blow-up where results would be meaningless.
struct SweepAborted : Error {
    SweepAborted(const std::string& what, std::string diagnostics) : Error(what), diagnostics(std::move(diagnostics)) {}
    std::string diagnostics;
};

/// Runs fn(i) for i in [0, count) on `threads` workers. The lowest-index
/// exception, if any, is rethrown after all workers finish.
template <class Fn>
void for_each_path(std::size_t count, unsigned threads, Fn&& fn) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

inline unsigned default_threads() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1u : n;
}

struct ReportRow {
    double eps = std::numeric_limits<double>::quiet_NaN();
    double d = std::numeric_limits<double>::quiet_NaN();
    double delta = std::numeric_limits<double>::quiet_NaN();
    std::size_t paths = 0;
    std::size_t censored = 0;
    double mean = 0.0;
    double std_err = 0.0;
    bool in_fit = true;
};

struct Verdict {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct ExperimentReport {
    std::string kind;
    std::string preset;
    /// Which row field is the abscissa: "eps", "d" or "delta".
    std::string axis;
    std::vector<ReportRow> rows;
    SlopeFit fit;
    std::vector<Verdict> verdicts;
    std::vector<std::string> notes;

    double x(const ReportRow& r) const { return axis == "eps" ? r.eps : axis == "d" ? r.d : r.delta; }

    bool passed() const {
        return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
    }
};

namespace detail {

struct PathOutcome {
    bool censored = false;
    double value = 0.0;
    std::string note;
};

inline ReportRow make_row(const std::vector<PathOutcome>& outcomes) {
    ReportRow row;
    row.paths = outcomes.size();
    std::vector<double> values;
    for (const auto& o : outcomes) {
        if (o.censored) ++row.censored;
        else values.push_back(o.value);
    }
    const auto s = summarize(values);
    row.mean = s.mean;
    row.std_err = s.std_err;
    row.in_fit = static_cast<double>(row.censored) <= 0.05 * static_cast<double>(row.paths);
    return row;
}

template <class Fn>
std::vector<PathOutcome> farm(std::size_t paths, unsigned threads, Fn&& run_one) {
    std::vector<PathOutcome> out(paths);
    for_each_path(paths, threads, [&](std::size_t i) {
        try {
            out[i].value = run_one(i);
        } catch (const BlowUpError& e) {
            out[i].censored = true;
            out[i].note = e.what();
        }
    });
    return out;
}

inline SlopeFit fit_rows(const ExperimentReport& rep) {
    std::vector<double> x, y, se;
    for (const auto& r : rep.rows) {
        if (!r.in_fit) continue;
        x.push_back(rep.x(r));
        y.push_back(r.mean);
        se.push_back(r.std_err);
    }
    return fit_loglog(x, y, se);
}

inline std::string first_censored_note(const std::vector<PathOutcome>& outcomes) {
    for (std::size_t i = 0; i < outcomes.size(); ++i)
        if (outcomes[i].censored) return fmt::format("path {}: {}", i, outcomes[i].note);
    return {};
}

/// Each row not above the previous by more than `k` combined standard errors.
inline Verdict monotone_verdict(const std::vector<ReportRow>& rows, double k = 2.0) {
    Verdict v{"monotone decay (2 SE)", true, "rows non-increasing within 2 combined standard errors"};
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double slack = k * std::hypot(rows[i].std_err, rows[i - 1].std_err);
        if (rows[i].mean > rows[i - 1].mean + slack) {
            v.pass = false;
            v.detail = fmt::format("row {} mean {:.6g} exceeds row {} mean {:.6g} by more than {:.3g}", i,
                                   rows[i].mean, i - 1, rows[i - 1].mean, slack);
        }
    }
    return v;
}

inline Verdict strict_verdict(const std::vector<ReportRow>& rows) {
    Verdict v{"strictly decreasing", true, "every row below the previous one"};
    if (rows.size() < 2) {
        v.pass = false;
        v.detail = "fewer than two rows";
    }
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (!(rows[i].mean < rows[i - 1].mean)) {
            v.pass = false;
            v.detail = fmt::format("row {} mean {:.6g} not below row {} mean {:.6g}", i, rows[i].mean, i - 1,
                                   rows[i - 1].mean);
        }
    return v;
}

inline double snap_to_grid(double d, double dt) {
    const double steps = std::max(1.0, std::round(d / dt));
    return steps * dt;
}

}  // namespace detail

struct SweepPlan {
    std::vector<double> eps_grid;
    /// Empty: d = sqrt(eps) snapped to the time grid. Otherwise one d per eps.
    std::vector<double> d_fixed;
    std::size_t paths = 32;
    StepperConfig stepper;
    unsigned threads = 1;

    void validate() const {
        if (eps_grid.empty()) throw ArgumentError("eps grid is empty");
        for (std::size_t i = 0; i < eps_grid.size(); ++i) {
            const double e = eps_grid[i];
            if (!(e > 0.0) || e > 1.0) throw ArgumentError(fmt::format("eps = {} outside (0, 1]", e));
            if (i > 0 && !(e < eps_grid[i - 1])) throw ArgumentError("eps grid must be strictly decreasing");
        }
        if (!d_fixed.empty() && d_fixed.size() != eps_grid.size())
            throw ArgumentError("fixed d list must match the eps grid");
        if (paths < 2) throw ArgumentError("a sweep needs at least 2 paths");
    }
};

/// E sup_t ||u^eps(t) - u*(t)||^2 for each eps, both systems on one
/// Brownian path per index.
inline ExperimentReport averaging_sweep(const Preset& preset, const SweepPlan& plan) {
    plan.validate();
    ExperimentReport rep{"averaging", preset.name, "eps", {}, {}, {}, {}};
    rep.notes.push_back("sup over t is the maximum over the time grid, a lower bound of the continuous supremum");
    auto cfg_avg = plan.stepper;
    cfg_avg.eps.reset();
    cfg_avg.validate(preset.op, preset.space());
    for (std::size_t row = 0; row < plan.eps_grid.size(); ++row) {
        const double eps = plan.eps_grid[row];
        auto cfg_eps = plan.stepper;
        cfg_eps.eps = eps;
        const auto outcomes = detail::farm(plan.paths, plan.threads, [&](std::size_t i) {
            return coupled_run(preset.op, preset.cs, preset.initial, cfg_eps, cfg_avg, i).sup_error;
        });
        auto r = detail::make_row(outcomes);
        r.eps = eps;
        r.d = plan.d_fixed.empty() ? detail::snap_to_grid(std::sqrt(eps), plan.stepper.dt) : plan.d_fixed[row];
        if (row == 0 && r.censored > 0)
            throw SweepAborted(fmt::format("blow-up at the largest eps = {} (preset {}, dt = {}, seed = {})", eps,
                                           preset.name, plan.stepper.dt, plan.stepper.seed),
                               detail::first_censored_note(outcomes));
        if (!r.in_fit)
            rep.notes.push_back(fmt::format("eps = {}: {} of {} paths censored, row excluded from the fit", eps,
                                            r.censored, r.paths));
        rep.rows.push_back(r);
    }
    rep.fit = detail::fit_rows(rep);
    const bool degenerate = preset.cs.drift_oscillator.is_constant() && preset.cs.diffusion.modulation.is_constant();
    if (degenerate) {
        Verdict v{"degenerate coupling: all rows exactly 0", true, "fast and averaged systems coincide"};
        for (const auto& r : rep.rows)
            if (r.mean != 0.0 || r.censored > 0) {
                v.pass = false;
                v.detail = fmt::format("eps = {} row is {:.17g}", r.eps, r.mean);
            }
        rep.verdicts.push_back(v);
        return rep;
    }
    rep.verdicts.push_back(detail::monotone_verdict(rep.rows));
    rep.verdicts.push_back(detail::strict_verdict(rep.rows));
    if (preset.eps_slope) {
        const double target = *preset.eps_slope;
        Verdict v{fmt::format("slope {} +- 0.3", target), rep.fit.valid && std::abs(rep.fit.slope - target) <= 0.3,
                  fmt::format("fitted slope {:.4f}", rep.fit.slope)};
        if (rep.fit.rows < 3) {
            v.pass = false;
            v.detail = fmt::format("only {} rows usable for the fit", rep.fit.rows);
        }
        rep.verdicts.push_back(v);
    }
    return rep;
}

struct KhasminskiiReport {
    /// E int_0^T ||u - u-hat||^2 dt per d.
    ExperimentReport path;
    /// E int_0^T ||u_s - u-hat_s||_h^2 ds per d.
    ExperimentReport segment;

    bool passed() const { return path.passed() && segment.passed(); }
};

inline constexpr double khasminskii_min_slope = 0.5 - 0.15;

/// Block-freezing residuals of u^eps for each block length d.
inline KhasminskiiReport khasminskii_diagnostic(const Preset& preset, const std::vector<double>& d_grid,
                                                std::size_t paths, const StepperConfig& cfg, unsigned threads) {
    if (d_grid.empty()) throw ArgumentError("d grid is empty");
    for (std::size_t i = 1; i < d_grid.size(); ++i)
        if (!(d_grid[i] < d_grid[i - 1])) throw ArgumentError("d grid must be strictly decreasing");
    if (paths == 0) throw ArgumentError("need at least one path");
    cfg.validate(preset.op, preset.space());
    for (double d : d_grid) {
        const double ratio = d / cfg.dt;
        if (!(ratio >= 1.0 - 1e-9) || std::abs(ratio - std::round(ratio)) > 1e-6 * ratio)
            throw ArgumentError(fmt::format("block length d = {} is not a multiple of dt = {}", d, cfg.dt));
    }
    const std::size_t nd = d_grid.size();
    std::vector<std::vector<double>> item1(paths), item2(paths);
    std::vector<std::string> censored(paths);
    for_each_path(paths, threads, [&](std::size_t i) {
        try {
            const auto tr = run_path(preset.op, preset.cs, preset.initial, cfg, i);
            item1[i].resize(nd);
            item2[i].resize(nd);
            for (std::size_t j = 0; j < nd; ++j) {
                item1[i][j] = frozen_gap_integral(tr, d_grid[j]);
                item2[i][j] = frozen_segment_gap_integral(tr, d_grid[j], preset.h());
            }
        } catch (const BlowUpError& e) {
            censored[i] = e.what();
        }
    });
    KhasminskiiReport out;
    auto build = [&](ExperimentReport& rep, const std::vector<std::vector<double>>& values, const char* kind) {
        rep = ExperimentReport{kind, preset.name, "d", {}, {}, {}, {}};
        for (std::size_t j = 0; j < nd; ++j) {
            std::vector<detail::PathOutcome> outcomes(paths);
            for (std::size_t i = 0; i < paths; ++i) {
                outcomes[i].censored = !censored[i].empty();
                if (!outcomes[i].censored) outcomes[i].value = values[i][j];
            }
            auto r = detail::make_row(outcomes);
            r.d = d_grid[j];
            r.eps = cfg.eps.value_or(std::numeric_limits<double>::quiet_NaN());
            rep.rows.push_back(r);
        }
        rep.fit = detail::fit_rows(rep);
        rep.verdicts.push_back({fmt::format("slope in d >= {}", khasminskii_min_slope),
                                rep.fit.valid && rep.fit.slope >= khasminskii_min_slope,
                                fmt::format("fitted slope {:.4f} over {} rows", rep.fit.slope, rep.fit.rows)});
    };
    build(out.path, item1, "khasminskii-path");
    build(out.segment, item2, "khasminskii-segment");
    return out;
}

/// E sup_t ||x(t) - y(t)||^2 for initial data phi and phi + delta psi on
/// shared noise; a delta = 0 row is appended as the pathwise-uniqueness
/// witness.
inline ExperimentReport continuity_study(const Preset& preset, const std::vector<double>& delta_grid,
                                         std::size_t paths, const StepperConfig& cfg, unsigned threads) {
    if (delta_grid.empty()) throw ArgumentError("delta grid is empty");
    for (std::size_t i = 0; i < delta_grid.size(); ++i)
        if (!(delta_grid[i] > 0.0) || (i > 0 && !(delta_grid[i] < delta_grid[i - 1])))
            throw ArgumentError("delta grid must be positive and strictly decreasing");
    if (paths == 0) throw ArgumentError("need at least one path");
    cfg.validate(preset.op, preset.space());
    std::vector<double> deltas = delta_grid;
    deltas.push_back(0.0);
    const std::size_t nd = deltas.size();
    std::vector<HistoryBuffer> starts;
    for (double d : deltas) starts.push_back(preset.perturbed(d));
    std::vector<std::vector<double>> values(paths);
    std::vector<std::string> censored(paths);
    for_each_path(paths, threads, [&](std::size_t i) {
        try {
            const auto base = run_path(preset.op, preset.cs, preset.initial, cfg, i);
            values[i].resize(nd);
            for (std::size_t j = 0; j < nd; ++j)
                values[i][j] = sup_squared_gap(base, run_path(preset.op, preset.cs, starts[j], cfg, i));
        } catch (const BlowUpError& e) {
            censored[i] = e.what();
        }
    });
    ExperimentReport rep{"continuity", preset.name, "delta", {}, {}, {}, {}};
    rep.notes.push_back("the stopping times of the continuity argument are replaced by blow-up detection; "
                        "censored paths are counted per row");
    for (std::size_t j = 0; j < nd; ++j) {
        std::vector<detail::PathOutcome> outcomes(paths);
        for (std::size_t i = 0; i < paths; ++i) {
            outcomes[i].censored = !censored[i].empty();
            if (!outcomes[i].censored) outcomes[i].value = values[i][j];
        }
        auto r = detail::make_row(outcomes);
        r.delta = deltas[j];
        r.eps = cfg.eps.value_or(std::numeric_limits<double>::quiet_NaN());
        if (deltas[j] == 0.0) r.in_fit = false;
        rep.rows.push_back(r);
    }
    rep.fit = detail::fit_rows(rep);
    std::vector<ReportRow> positive(rep.rows.begin(), rep.rows.end() - 1);
    rep.verdicts.push_back(detail::strict_verdict(positive));
    const auto& zero = rep.rows.back();
    rep.verdicts.push_back({"delta = 0 row exactly 0", zero.mean == 0.0 && zero.censored == 0,
                            fmt::format("delta = 0 row is {:.17g}", zero.mean)});
    return rep;
}

struct AprioriReport {
    /// Initial-datum scalings probed.
    std::vector<double> scales;
    std::vector<double> seminorms;
    /// E sup ||u||^2 at `paths` and at twice as many paths.
    std::vector<double> moments;
    std::vector<double> moments_doubled;
    double C = 0.0;
    double C_doubled = 0.0;

    bool stable(double tol = 0.2) const { return std::abs(C_doubled - C) <= tol * C; }
};

/// Fits C in E sup_t ||u(t)||^2 <= C (1 + ||phi||_h^2) over scaled initial
/// data, at `paths` and at 2 * paths.
inline AprioriReport apriori_audit(const Preset& preset, std::size_t paths, const StepperConfig& cfg,
                                   unsigned threads, std::vector<double> scales = {0.5, 1.0, 2.0}) {
    cfg.validate(preset.op, preset.space());
    AprioriReport rep;
    rep.scales = scales;
    auto moment = [&](const HistoryBuffer& init, std::size_t n) {
        std::vector<double> v(n);
        for_each_path(n, threads, [&](std::size_t i) { v[i] = sup_squared_norm(run_path(preset.op, preset.cs, init, cfg, i)); });
        return summarize(v).mean;
    };
    for (double s : scales) {
        auto init = preset.initial;
        init.scale(s);
        if (SpectralSpace::norm(init.profile()) == 0.0) init = preset.perturbed(s);
        const double sn = seminorm_h(init, 0.0);
        rep.seminorms.push_back(sn);
        rep.moments.push_back(moment(init, paths));
        rep.moments_doubled.push_back(moment(init, 2 * paths));
        rep.C = std::max(rep.C, rep.moments.back() / (1.0 + sn * sn));
        rep.C_doubled = std::max(rep.C_doubled, rep.moments_doubled.back() / (1.0 + sn * sn));
    }
    return rep;
}

struct RefinementReport {
    std::vector<double> dts;
    /// ||u_dt(T) - u_{dt/2}(T)|| for consecutive levels.
    std::vector<double> differences;
    SlopeFit fit;

    bool passed() const { return fit.valid && fit.slope >= 0.7 && fit.slope <= 1.3; }
};

/// Deterministic runs at dt, dt/2, ...; the endpoint change between levels
/// shrinks like dt for a first-order scheme.
inline RefinementReport dt_refinement(const Preset& preset, double dt0, std::size_t levels = 4, double T = 1.0) {
    if (levels < 3) throw ArgumentError("dt refinement needs at least 3 levels");
    RefinementReport rep;
    std::vector<std::vector<double>> ends;
    for (std::size_t l = 0; l < levels; ++l) {
        StepperConfig cfg = preset.stepper;
        cfg.dt = dt0 / static_cast<double>(1u << l);
        cfg.T = T;
        cfg.deterministic = true;
        const auto tr = run_path(preset.op, preset.cs, preset.initial, cfg, 0);
        const auto e = tr.state(tr.size() - 1);
        rep.dts.push_back(cfg.dt);
        ends.emplace_back(e.begin(), e.end());
    }
    std::vector<double> x;
    for (std::size_t l = 0; l + 1 < levels; ++l) {
        double acc = 0.0;
        for (std::size_t i = 0; i < ends[l].size(); ++i) acc += (ends[l][i] - ends[l + 1][i]) * (ends[l][i] - ends[l + 1][i]);
        rep.differences.push_back(std::sqrt(acc));
        x.push_back(rep.dts[l]);
    }
    rep.fit = fit_loglog(x, rep.differences, {});
    return rep;
}

struct AuditOptions {
    std::size_t holder_trials = 2000;
    std::size_t h5_trials = 1000;
    std::size_t growth_trials = 1000;
    std::size_t coercivity_trials = 1000;
    std::size_t monotone_trials = 1000;
    std::uint64_t seed = 1;
    std::vector<double> windows{10.0, 1e2, 1e3, 1e4};
};

struct AuditReport {
    std::string preset;
    std::vector<Verdict> verdicts;
    std::vector<CheckReport> checks;
    AveragingRate rate;

    bool passed() const {
        return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
    }
    const Verdict* find(const std::string& prefix) const {
        for (const auto& v : verdicts)
            if (v.name.rfind(prefix, 0) == 0) return &v;
        return nullptr;
    }
};

/// Growth, coercivity, monotonicity and Hoelder, one-sided pairing and
/// averaging-rate checks for one preset.
inline AuditReport hypothesis_audit(const Preset& preset, const AuditOptions& opt = {}) {
    AuditReport rep;
    rep.preset = preset.name;
    const auto& cs = preset.cs;
    const auto& space = preset.space();
    const double h = preset.h();
    auto verdict = [&](const std::string& name, const CheckReport& c) {
        rep.checks.push_back(c);
        std::string detail = fmt::format("{}: worst {:.6g} (bound {:.6g}) over {} trials", c.name, c.worst, c.bound,
                                         c.trials);
        if (!c.witness.empty()) detail += "; witness " + c.witness;
        rep.verdicts.push_back({name, c.pass, detail});
    };
    verdict("H2 growth", growth_audit(cs, space, h, opt.growth_trials, opt.seed));
    verdict("H3 coercivity", check_coercivity(preset.op, space, cs.profile, opt.coercivity_trials, opt.seed + 1));
    verdict("H4 monotone A", check_monotone(preset.op, space, cs.profile, opt.monotone_trials, opt.seed + 2));
    verdict("H4 holder f,g", check_holder(cs, space, h, cs.profile.M, opt.holder_trials, opt.seed + 3));
    verdict("H4 holder f*,g*", check_holder(cs, space, h, cs.profile.M, opt.holder_trials, opt.seed + 3, true));
    try {
        cs.profile.validate(h);
        verdict("H5 pairing", check_h5(cs, space, h, opt.h5_trials, opt.seed + 4));
    } catch (const DivergenceError& e) {
        rep.verdicts.push_back({"H5 pairing", false, e.what()});
    }
    HistorySampler sampler(space, h, opt.seed + 5);
    std::vector<HistoryBuffer> probes;
    for (double s : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0}) probes.push_back(sampler.draw(sampler.draw_shape(), s));
    rep.rate = estimate_rate(cs, probes, opt.windows);
    const bool ok1 = rate_decays(rep.rate.phi1);
    const bool ok2 = rate_decays(rep.rate.phi2);
    std::string detail = "Phi1:";
    for (double v : rep.rate.phi1) detail += fmt::format(" {:.3g}", v);
    detail += "; Phi2:";
    for (double v : rep.rate.phi2) detail += fmt::format(" {:.3g}", v);
    rep.verdicts.push_back({"H6 averaging rate", ok1 && ok2, detail});
    return rep;
}

}  // namespace avgsfpde
