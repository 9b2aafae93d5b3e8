#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace avgsfpde {

struct SampleSummary {
    std::size_t count = 0;
    double mean = 0.0;
    double std_err = 0.0;
};

/// Mean and standard error (sample standard deviation / sqrt(n)), summed in
/// index order so the result never depends on how samples were produced.
inline SampleSummary summarize(std::span<const double> xs) {
    SampleSummary s;
    s.count = xs.size();
    if (xs.empty()) return s;
    double mean = 0.0;
    double m2 = 0.0;
    std::size_t n = 0;
    for (double x : xs) {
        ++n;
        const double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }
    s.mean = mean;
    if (n > 1) s.std_err = std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n));
    return s;
}

struct SlopeFit {
    bool valid = false;
    /// Inverse-variance weights were used (false: ordinary least squares).
    bool weighted = false;
    std::size_t rows = 0;
    double slope = std::numeric_limits<double>::quiet_NaN();
    double intercept = std::numeric_limits<double>::quiet_NaN();
    double std_err = std::numeric_limits<double>::quiet_NaN();

    double ci_low() const noexcept { return slope - 1.96 * std_err; }
    double ci_high() const noexcept { return slope + 1.96 * std_err; }
};

/// Least squares of log y on log x. Each row's weight is the inverse
/// variance of log y by the delta method, (y / se)^2; a zero standard error
/// anywhere falls back to unweighted fitting. Rows with y <= 0 are skipped.
inline SlopeFit fit_loglog(std::span<const double> x, std::span<const double> y, std::span<const double> se) {
    std::vector<double> lx, ly, w;
    bool any_zero_se = false;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
        const double s = se.empty() ? 0.0 : se[i];
        if (!(s > 0.0)) any_zero_se = true;
        w.push_back(s > 0.0 ? (y[i] / s) * (y[i] / s) : 1.0);
    }
    SlopeFit fit;
    fit.rows = lx.size();
    if (fit.rows < 2) return fit;
    fit.weighted = !any_zero_se;
    if (!fit.weighted) std::fill(w.begin(), w.end(), 1.0);
    double sw = 0.0, sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sw += w[i];
        sx += w[i] * lx[i];
        sy += w[i] * ly[i];
    }
    const double mx = sx / sw;
    const double my = sy / sw;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += w[i] * (lx[i] - mx) * (lx[i] - mx);
        sxy += w[i] * (lx[i] - mx) * (ly[i] - my);
    }
    if (!(sxx > 0.0)) return fit;
    fit.valid = true;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (fit.weighted) {
        fit.std_err = std::sqrt(1.0 / sxx);
    } else if (fit.rows > 2) {
        double rss = 0.0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            const double r = ly[i] - fit.intercept - fit.slope * lx[i];
            rss += r * r;
        }
        fit.std_err = std::sqrt(rss / static_cast<double>(fit.rows - 2) / sxx);
    } else {
        fit.std_err = 0.0;
    }
    return fit;
}

}  // namespace avgsfpde
