#pragma once

// Conditional averages, daily series normalization, moments and correlation.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dislo/errors.hpp"
#include "dislo/stats.hpp"

namespace dislo::analytics {

/// One value per trading day, dates strictly increasing (YYYY-MM-DD sorts correctly).
struct DailySeries {
    std::string label;
    std::vector<std::pair<std::string, double>> points;

    std::vector<double> values() const {
        std::vector<double> v;
        v.reserve(points.size());
        for (const auto& p : points) v.push_back(p.second);
        return v;
    }
    std::size_t size() const { return points.size(); }
};

/// Mean of the values whose flag is set; nullopt when no value qualifies.
inline std::optional<double> conditional_average(std::span<const double> values, std::span<const bool> condition) {
    if (values.size() != condition.size()) throw AnalysisError("values and condition flags differ in length");
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!condition[i]) continue;
        sum += values[i];
        ++n;
    }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
}

/// (x - mean) / sqrt(population variance).
inline std::vector<double> normalize(std::span<const double> x) {
    if (x.size() < 2) throw AnalysisError("normalization needs at least 2 points");
    const double m = stats::mean(x);
    const double var = stats::variance(x, 0);
    if (!(var > 0.0)) throw AnalysisError("zero variance series cannot be normalized");
    const double sd = std::sqrt(var);
    std::vector<double> out;
    out.reserve(x.size());
    for (double v : x) out.push_back((v - m) / sd);
    return out;
}

inline DailySeries normalize_series(const DailySeries& s) {
    for (std::size_t i = 1; i < s.points.size(); ++i)
        if (!(s.points[i - 1].first < s.points[i].first))
            throw AnalysisError(s.label + ": dates must be strictly increasing");
    const auto z = normalize(s.values());
    DailySeries out{s.label, {}};
    for (std::size_t i = 0; i < z.size(); ++i) out.points.emplace_back(s.points[i].first, z[i]);
    return out;
}

struct Moments {
    double skew;
    double kurtosis;  // non-excess: 3 for a Gaussian
};

/// Standardized third and fourth central moments (population normalization).
inline Moments skew_kurtosis(std::span<const double> x) {
    if (x.size() < 3) throw AnalysisError("skew/kurtosis need at least 3 values");
    const double m = stats::mean(x);
    double m2 = 0, m3 = 0, m4 = 0;
    for (double v : x) {
        const double d = v - m;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    const auto n = static_cast<double>(x.size());
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if (!(m2 > 0.0)) throw AnalysisError("zero variance: skew/kurtosis undefined");
    return {m3 / std::pow(m2, 1.5), m4 / (m2 * m2)};
}

inline std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw AnalysisError("pearson needs equal lengths >= 2");
    const double mx = stats::mean(x), my = stats::mean(y);
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (!(sxx > 0) || !(syy > 0)) return std::nullopt;
    const double r = sxy / std::sqrt(sxx * syy);
    return std::clamp(r, -1.0, 1.0);
}

/// Symmetric matrix with unit diagonal; nullopt marks undefined entries
/// (a zero-variance series).
struct CorrelationMatrix {
    std::vector<std::string> labels;
    std::vector<std::vector<std::optional<double>>> r;
};

inline CorrelationMatrix pearson_matrix(const std::vector<DailySeries>& series) {
    CorrelationMatrix m;
    const std::size_t k = series.size();
    std::vector<std::vector<double>> vals;
    for (const auto& s : series) {
        m.labels.push_back(s.label);
        vals.push_back(s.values());
    }
    m.r.assign(k, std::vector<std::optional<double>>(k));
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i; j < k; ++j) {
            auto v = pearson(vals[i], vals[j]);
            if (i == j && v) v = 1.0;
            m.r[i][j] = m.r[j][i] = v;
        }
    }
    return m;
}

}  // namespace dislo::analytics
