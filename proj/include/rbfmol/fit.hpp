#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace rbfmol {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // rms residual in log space
    double slope_stderr = 0.0;
};

/// Ordinary least squares y = slope*x + intercept.
inline LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t m = x.size();
    if (m < 2 || y.size() != m) throw std::invalid_argument("least_squares: need >= 2 matching points");
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / m, my = sy / m;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const double r = y[i] - (f.slope * x[i] + f.intercept);
        ss += r * r;
    }
    f.residual = std::sqrt(ss / m);
    f.slope_stderr = m > 2 ? std::sqrt(ss / (m - 2) / sxx) : 0.0;
    return f;
}

struct RateFit {
    bool exact = false;  // some error was exactly zero
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;
    double slope_stderr = 0.0;
    std::vector<double> pairwise;  // log(e_i/e_{i+1}) / log(h_i/h_{i+1})
};

/// Fit e(h) ~ C h^slope on a log-log scale.
inline RateFit estimate_rate(const std::vector<double>& h, const std::vector<double>& e) {
    if (h.size() < 3 || e.size() != h.size()) throw std::invalid_argument("estimate_rate: need >= 3 (h, e) pairs");
    for (std::size_t i = 1; i < h.size(); ++i)
        if (!(h[i] < h[i - 1])) throw std::invalid_argument("estimate_rate: h must be strictly decreasing");
    RateFit r;
    for (double v : e) {
        if (v < 0.0 || !std::isfinite(v)) throw std::invalid_argument("estimate_rate: errors must be finite and >= 0");
        if (v == 0.0) r.exact = true;
    }
    if (r.exact) return r;
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < h.size(); ++i) {
        lx.push_back(std::log(h[i]));
        ly.push_back(std::log(e[i]));
    }
    const LineFit f = least_squares(lx, ly);
    r.slope = f.slope;
    r.intercept = f.intercept;
    r.residual = f.residual;
    r.slope_stderr = f.slope_stderr;
    for (std::size_t i = 0; i + 1 < h.size(); ++i)
        r.pairwise.push_back(std::log(e[i] / e[i + 1]) / std::log(h[i] / h[i + 1]));
    return r;
}

struct Plateau {
    bool found = false;
    double value = 0.0;
};

/// Mean of the last three errors once the last two pairwise orders are below the threshold.
inline Plateau estimate_plateau(const std::vector<double>& h, const std::vector<double>& e, double order_threshold = 0.2) {
    Plateau p;
    if (h.size() < 3) return p;
    const RateFit r = estimate_rate(h, e);
    if (r.exact) return p;
    const std::size_t m = r.pairwise.size();
    if (std::abs(r.pairwise[m - 1]) < order_threshold && std::abs(r.pairwise[m - 2]) < order_threshold) {
        p.found = true;
        p.value = (e[e.size() - 1] + e[e.size() - 2] + e[e.size() - 3]) / 3.0;
    }
    return p;
}

/// Drop the coarsest points of a ladder before fitting.
inline RateFit estimate_rate_asymptotic(const std::vector<double>& h, const std::vector<double>& e, std::size_t drop = 2) {
    if (h.size() < drop + 3) return estimate_rate(h, e);
    return estimate_rate(std::vector<double>(h.begin() + drop, h.end()), std::vector<double>(e.begin() + drop, e.end()));
}

}  // namespace rbfmol
