#pragma once

// Detrended fluctuation analysis with order-1 detrending over non-overlapping boxes.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "dislo/errors.hpp"
#include "dislo/stats.hpp"

namespace dislo::analytics {

/// About `count` log-spaced, distinct box sizes from `min_box` to n/4.
inline std::vector<std::size_t> default_box_sizes(std::size_t n, std::size_t min_box = 4, std::size_t count = 20) {
    std::vector<std::size_t> out;
    const std::size_t max_box = n / 4;
    if (max_box < min_box) return out;
    const double lo = std::log(static_cast<double>(min_box));
    const double hi = std::log(static_cast<double>(max_box));
    for (std::size_t i = 0; i < count; ++i) {
        const double f = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
        const auto b = static_cast<std::size_t>(std::llround(std::exp(lo + f * (hi - lo))));
        if (out.empty() || b != out.back()) out.push_back(b);
    }
    return out;
}

/// RMS of residuals after a least-squares line is removed from each full box
/// of the profile.
inline double dfa_fluctuation(std::span<const double> profile, std::size_t box) {
    const std::size_t boxes = profile.size() / box;
    // x = 0..box-1 has closed-form sums.
    const double n = static_cast<double>(box);
    const double sx = n * (n - 1) / 2.0;
    const double sxx = (n - 1) * n * (2 * n - 1) / 6.0;
    const double denom = n * sxx - sx * sx;
    double total = 0.0;
    for (std::size_t b = 0; b < boxes; ++b) {
        const double* y = profile.data() + b * box;
        double sy = 0, sxy = 0;
        for (std::size_t i = 0; i < box; ++i) {
            sy += y[i];
            sxy += static_cast<double>(i) * y[i];
        }
        const double slope = (n * sxy - sx * sy) / denom;
        const double icpt = (sy - slope * sx) / n;
        for (std::size_t i = 0; i < box; ++i) {
            const double r = y[i] - (icpt + slope * static_cast<double>(i));
            total += r * r;
        }
    }
    return std::sqrt(total / static_cast<double>(boxes * box));
}

/// Scaling exponent: slope of log F(n) against log n.
inline double dfa_exponent(std::span<const double> series, std::vector<std::size_t> boxes = {}) {
    if (boxes.empty()) boxes = default_box_sizes(series.size());
    if (boxes.size() < 2) throw AnalysisError("DFA needs at least 2 box sizes; series of length 16 or more");
    const std::size_t largest = *std::max_element(boxes.begin(), boxes.end());
    if (series.size() < 4 * largest)
        throw AnalysisError("DFA series too short: need at least " + std::to_string(4 * largest) + " points, got " +
                            std::to_string(series.size()));
    const double m = stats::mean(series);
    std::vector<double> profile(series.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        acc += series[i] - m;
        profile[i] = acc;
    }
    std::vector<double> lx, ly;
    for (auto b : boxes) {
        if (b < 2) throw AnalysisError("DFA box size must be at least 2");
        const double f = dfa_fluctuation(profile, b);
        if (!(f > 0)) throw AnalysisError("DFA fluctuation vanished (constant series?)");
        lx.push_back(std::log(static_cast<double>(b)));
        ly.push_back(std::log(f));
    }
    const double mx = stats::mean(lx), my = stats::mean(ly);
    double num = 0, den = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        num += (lx[i] - mx) * (ly[i] - my);
        den += (lx[i] - mx) * (lx[i] - mx);
    }
    return num / den;
}

}  // namespace dislo::analytics
