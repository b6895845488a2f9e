#pragma once

// Basic descriptive statistics shared by segment summaries and analytics.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

namespace dislo::stats {

inline double mean(std::span<const double> x) {
    if (x.empty()) return std::numeric_limits<double>::quiet_NaN();
    // Kahan-compensated sum.
    double s = 0.0, c = 0.0;
    for (double v : x) {
        const double y = v - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s / static_cast<double>(x.size());
}

/// Variance with `ddof` delta degrees of freedom (0 = population, 1 = sample).
inline double variance(std::span<const double> x, int ddof = 0) {
    const auto n = static_cast<double>(x.size());
    if (n - ddof <= 0) return std::numeric_limits<double>::quiet_NaN();
    const double m = mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return ss / (n - ddof);
}

/// Linear interpolation between order statistics (Hyndman-Fan type 7).
/// `sorted` must be ascending.
inline double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
    const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline double quantile(std::vector<double> x, double q) {
    std::sort(x.begin(), x.end());
    return quantile_sorted(x, q);
}

/// count / mean / std / min / 25% / 50% / 75% / max, std with ddof = 1.
struct Describe {
    std::size_t count = 0;
    double mean = std::numeric_limits<double>::quiet_NaN();
    double std = std::numeric_limits<double>::quiet_NaN();
    double min = std::numeric_limits<double>::quiet_NaN();
    double q25 = std::numeric_limits<double>::quiet_NaN();
    double q50 = std::numeric_limits<double>::quiet_NaN();
    double q75 = std::numeric_limits<double>::quiet_NaN();
    double max = std::numeric_limits<double>::quiet_NaN();
};

inline Describe describe(std::vector<double> x) {
    Describe d;
    d.count = x.size();
    if (x.empty()) return d;
    std::sort(x.begin(), x.end());
    d.mean = mean(x);
    d.std = variance(x, 1);
    d.std = std::isnan(d.std) ? d.std : std::sqrt(d.std);
    d.min = x.front();
    d.max = x.back();
    d.q25 = quantile_sorted(x, 0.25);
    d.q50 = quantile_sorted(x, 0.50);
    d.q75 = quantile_sorted(x, 0.75);
    return d;
}

}  // namespace dislo::stats
