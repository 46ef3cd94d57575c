// analysis.hpp — curve diagnostics: log-log slopes and oscillation frequencies

#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "nhbath/errors.hpp"
#include "nhbath/model.hpp"

namespace nhbath::analysis {

struct LineFit {
    double slope{0.0};
    double intercept{0.0};
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw Error(ErrorCode::InvalidParams, "line fit needs at least two matched points");
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw Error(ErrorCode::InvalidParams, "degenerate abscissae");
    return {sxy / sxx, my - sxy / sxx * mx};
}

// Exponent p of y ~ x^p by least squares on (log x, log y).
inline double power_law_exponent(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> lx, ly;
    lx.reserve(x.size());
    ly.reserve(y.size());
    for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw Error(ErrorCode::InvalidParams, "power-law fit needs positive data");
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    return fit_line(lx, ly).slope;
}

// Positions of interior local minima, refined by a parabola through the three samples.
inline std::vector<double> local_minima(const std::vector<double>& t, const std::vector<double>& y) {
    std::vector<double> out;
    for (std::size_t i = 1; i + 1 < y.size(); ++i) {
        if (!(y[i] < y[i - 1] && y[i] <= y[i + 1])) continue;
        const double h = t[i + 1] - t[i];
        const double curvature = y[i - 1] - 2.0 * y[i] + y[i + 1];
        double shift = 0.0;
        if (curvature > 0.0) shift = 0.5 * h * (y[i - 1] - y[i + 1]) / curvature;
        out.push_back(t[i] + shift);
    }
    return out;
}

// Angular frequency of a periodic modulation from the mean spacing of its minima.
inline double oscillation_frequency(const std::vector<double>& t, const std::vector<double>& y) {
    const std::vector<double> minima = local_minima(t, y);
    if (minima.size() < 2) throw Error(ErrorCode::ToleranceNotMet, "fewer than two minima in window");
    const double spacing = (minima.back() - minima.front()) / static_cast<double>(minima.size() - 1);
    return 2.0 * kPi / spacing;
}

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = lo;
        return out;
    }
    for (std::size_t i = 0; i < n; ++i)
        out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return out;
}

inline std::vector<double> logspace(double lo, double hi, std::size_t n) {
    std::vector<double> out = linspace(std::log(lo), std::log(hi), n);
    for (double& v : out) v = std::exp(v);
    return out;
}

} // namespace nhbath::analysis
