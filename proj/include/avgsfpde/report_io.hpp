#pragma once

// CSV, SVG and plain-text writers for experiment reports.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "avgsfpde/errors.hpp"
#include "avgsfpde/experiments.hpp"
#include "avgsfpde/integrator.hpp"

namespace avgsfpde::io {

inline constexpr const char* version = "0.1.0";

/// Round-trippable decimal form of a double.
inline std::string num(double x) { return fmt::format("{:.17g}", x); }

inline void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(fmt::format("cannot write {}", path.string()));
    out << text;
    if (!out) throw Error(fmt::format("write to {} failed", path.string()));
}

/// Sweep rows. The value column is named after what the report measures.
inline std::string report_csv(const ExperimentReport& rep) {
    std::string out;
    if (rep.axis == "delta") {
        out = "eps,delta,paths,mean_sup_sq_error,std_err,censored\n";
        for (const auto& r : rep.rows)
            out += fmt::format("{},{},{},{},{},{}\n", num(r.eps), num(r.delta), r.paths, num(r.mean), num(r.std_err),
                               r.censored);
        return out;
    }
    const bool integral = rep.kind.rfind("khasminskii", 0) == 0;
    out = integral ? "eps,d,paths,mean_int_sq_error,std_err,censored\n"
                   : "eps,d,paths,mean_sup_sq_error,std_err,censored\n";
    for (const auto& r : rep.rows)
        out += fmt::format("{},{},{},{},{},{}\n", num(r.eps), num(r.d), r.paths, num(r.mean), num(r.std_err),
                           r.censored);
    return out;
}

inline std::string trajectory_csv(const Trajectory& tr) {
    std::string out = "t";
    for (std::size_t i = 1; i <= tr.dim; ++i) out += fmt::format(",c_{}", i);
    out += '\n';
    for (std::size_t n = 0; n < tr.size(); ++n) {
        out += num(tr.times[n]);
        for (double c : tr.state(n)) {
            out += ',';
            out += num(c);
        }
        out += '\n';
    }
    return out;
}

namespace detail {

inline std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace detail

/// Log-log plot of row means with +-1 standard error bars. Rows with a
/// nonpositive mean cannot be placed on log axes and are listed instead.
inline std::string report_svg(const ExperimentReport& rep) {
    constexpr double W = 640, H = 440, left = 80, right = 30, top = 40, bottom = 60;
    struct Pt {
        double x, y, lo, hi;
    };
    std::vector<Pt> pts;
    std::size_t skipped = 0;
    for (const auto& r : rep.rows) {
        const double x = rep.x(r);
        if (!(x > 0.0) || !(r.mean > 0.0)) {
            ++skipped;
            continue;
        }
        const double lo = r.mean - r.std_err > 0.0 ? r.mean - r.std_err : r.mean;
        pts.push_back({std::log10(x), std::log10(r.mean), std::log10(lo), std::log10(r.mean + r.std_err)});
    }
    std::string s = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
        "font-family=\"sans-serif\" font-size=\"12\">\n"
        "<rect width=\"{0}\" height=\"{1}\" fill=\"white\"/>\n",
        W, H);
    const std::string value = rep.kind.rfind("khasminskii", 0) == 0 ? "E int |u - u_hat|^2" : "E sup |error|^2";
    s += fmt::format("<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n", W / 2,
                     detail::escape_xml(rep.kind + " / " + rep.preset));
    if (pts.empty()) {
        s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">no positive rows to plot ({} skipped)</text>\n",
                         W / 2, H / 2, skipped);
        return s + "</svg>\n";
    }
    double x0 = pts[0].x, x1 = pts[0].x, y0 = pts[0].lo, y1 = pts[0].hi;
    for (const auto& p : pts) {
        x0 = std::min(x0, p.x);
        x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.lo);
        y1 = std::max(y1, p.hi);
    }
    x0 = std::floor(x0);
    x1 = std::ceil(x1);
    y0 = std::floor(y0);
    y1 = std::ceil(y1);
    if (x1 <= x0) x1 = x0 + 1;
    if (y1 <= y0) y1 = y0 + 1;
    auto px = [&](double v) { return left + (v - x0) / (x1 - x0) * (W - left - right); };
    auto py = [&](double v) { return H - bottom - (v - y0) / (y1 - y0) * (H - top - bottom); };
    s += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", left,
                     top, W - left - right, H - top - bottom);
    for (double d = x0; d <= x1 + 1e-9; d += 1.0)
        s += fmt::format(
            "<line x1=\"{0:.2f}\" y1=\"{1}\" x2=\"{0:.2f}\" y2=\"{2}\" stroke=\"#ddd\"/>"
            "<text x=\"{0:.2f}\" y=\"{3}\" text-anchor=\"middle\">1e{4}</text>\n",
            px(d), top, H - bottom, H - bottom + 18, static_cast<int>(d));
    for (double d = y0; d <= y1 + 1e-9; d += 1.0)
        s += fmt::format(
            "<line x1=\"{0}\" y1=\"{1:.2f}\" x2=\"{2}\" y2=\"{1:.2f}\" stroke=\"#ddd\"/>"
            "<text x=\"{3}\" y=\"{1:.2f}\" text-anchor=\"end\" dominant-baseline=\"middle\">1e{4}</text>\n",
            left, py(d), W - right, left - 6, static_cast<int>(d));
    s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", W / 2, H - 18, rep.axis);
    s += fmt::format("<text x=\"18\" y=\"{0}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {0})\">{1}</text>\n",
                     H / 2, value);
    std::string line;
    for (const auto& p : pts) {
        s += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"#1f77b4\"/>\n",
                         px(p.x), py(p.lo), py(p.hi));
        s += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3.5\" fill=\"#1f77b4\"/>\n", px(p.x), py(p.y));
        line += fmt::format("{}{:.2f},{:.2f}", line.empty() ? "" : " ", px(p.x), py(p.y));
    }
    s += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"#1f77b4\"/>\n", line);
    if (rep.fit.valid)
        s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">slope {:.3f} [{:.3f}, {:.3f}]</text>\n",
                         W - right - 6, top + 16, rep.fit.slope, rep.fit.ci_low(), rep.fit.ci_high());
    if (skipped > 0)
        s += fmt::format("<text x=\"{}\" y=\"{}\">{} row(s) with zero mean not shown</text>\n", left + 6, top + 16,
                         skipped);
    return s + "</svg>\n";
}

inline std::string verdict_lines(const std::vector<Verdict>& verdicts) {
    std::string out;
    for (const auto& v : verdicts)
        out += fmt::format("{} {}: {}\n", v.pass ? "PASS" : "FAIL", v.name, v.detail);
    return out;
}

inline std::string report_summary(const ExperimentReport& rep) {
    std::string out = fmt::format("kind: {}\npreset: {}\nversion: {}\nrows: {}\n", rep.kind, rep.preset, version,
                                  rep.rows.size());
    if (rep.fit.valid)
        out += fmt::format("slope: {:.6f} (95% CI [{:.6f}, {:.6f}], {} rows, {})\n", rep.fit.slope, rep.fit.ci_low(),
                           rep.fit.ci_high(), rep.fit.rows, rep.fit.weighted ? "weighted" : "unweighted");
    else
        out += "slope: n/a\n";
    for (const auto& n : rep.notes) out += "note: " + n + "\n";
    out += verdict_lines(rep.verdicts);
    out += fmt::format("overall: {}\n", rep.passed() ? "PASS" : "FAIL");
    return out;
}

inline std::string audit_summary(const AuditReport& rep) {
    std::string out = fmt::format("kind: audit\npreset: {}\nversion: {}\n", rep.preset, version);
    out += verdict_lines(rep.verdicts);
    out += "averaging windows:";
    for (double w : rep.rate.windows) out += fmt::format(" {}", w);
    out += "\nPhi1 raw:";
    for (double v : rep.rate.phi1_raw) out += ' ' + num(v);
    out += "\nPhi2 raw:";
    for (double v : rep.rate.phi2_raw) out += ' ' + num(v);
    out += fmt::format("\noverall: {}\n", rep.passed() ? "PASS" : "FAIL");
    return out;
}

}  // namespace avgsfpde::io
