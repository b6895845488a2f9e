#pragma once

// Intra-day start-time and log-duration histograms, and circle-plot records.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "dislo/dislocation.hpp"
#include "dislo/errors.hpp"
#include "dislo/types.hpp"

namespace dislo::analytics {

struct Histogram {
    std::vector<double> edges;          // bins are [edges[i], edges[i+1])
    std::vector<std::uint64_t> counts;  // edges.size() - 1 entries
    std::uint64_t excluded = 0;         // e.g. zero durations
    std::uint64_t underflow = 0;
    std::uint64_t overflow = 0;

    std::uint64_t total() const {
        std::uint64_t t = 0;
        for (auto c : counts) t += c;
        return t;
    }
};

struct SessionClock {
    std::uint64_t open_ns = kRegularOpenNs;
    std::uint64_t length_ns = kRegularSessionNs;
};

/// Counts segment starts per intra-day bin, modulo day, summed over all days.
/// Edges are seconds since the session open.
inline Histogram start_time_histogram(const std::vector<DislocationSegment>& segments, std::uint64_t bin_width_ns,
                                      SessionClock clock = {}) {
    if (bin_width_ns == 0 || clock.length_ns % bin_width_ns != 0)
        throw AnalysisError("bin width must divide the session length");
    const std::uint64_t bins = clock.length_ns / bin_width_ns;
    Histogram h;
    for (std::uint64_t i = 0; i <= bins; ++i)
        h.edges.push_back(static_cast<double>(i * bin_width_ns) / static_cast<double>(kNanosPerSecond));
    h.counts.assign(bins, 0);
    for (const auto& s : segments) {
        const std::uint64_t tod = s.start_ts.ns % kNanosPerDay;
        if (tod < clock.open_ns) {
            ++h.underflow;
            continue;
        }
        const std::uint64_t off = tod - clock.open_ns;
        if (off >= clock.length_ns) {
            ++h.overflow;
            continue;
        }
        ++h.counts[off / bin_width_ns];
    }
    return h;
}

/// Counts durations in log10-second bins [lo + k/per_decade, lo + (k+1)/per_decade).
/// Zero durations are excluded and counted; out-of-range values go to under/overflow.
inline Histogram duration_histogram(const std::vector<DislocationSegment>& segments, int lo_exp = -7,
                                    int hi_exp = 5, int bins_per_decade = 1) {
    if (hi_exp <= lo_exp || bins_per_decade < 1) throw AnalysisError("bad log10 histogram range");
    const int bins = (hi_exp - lo_exp) * bins_per_decade;
    Histogram h;
    for (int i = 0; i <= bins; ++i) h.edges.push_back(lo_exp + static_cast<double>(i) / bins_per_decade);
    h.counts.assign(static_cast<std::size_t>(bins), 0);
    for (const auto& s : segments) {
        if (s.duration() == 0) {
            ++h.excluded;
            continue;
        }
        const double x = std::log10(static_cast<double>(s.duration())) - 9.0;  // ns -> s
        const double pos = (x - lo_exp) * bins_per_decade;
        if (pos < 0) {
            ++h.underflow;
            continue;
        }
        const auto k = static_cast<std::size_t>(std::floor(pos));
        if (k >= h.counts.size()) {
            ++h.overflow;
            continue;
        }
        ++h.counts[k];
    }
    return h;
}

inline std::string histogram_csv(const Histogram& h) {
    std::string s = "lo,hi,count\n";
    for (std::size_t i = 0; i < h.counts.size(); ++i)
        s += std::to_string(h.edges[i]) + "," + std::to_string(h.edges[i + 1]) + "," + std::to_string(h.counts[i]) +
             "\n";
    s += "# excluded=" + std::to_string(h.excluded) + " underflow=" + std::to_string(h.underflow) +
         " overflow=" + std::to_string(h.overflow) + "\n";
    return s;
}

struct PolarRecord {
    double angle;   // radians, 0 at the open, 2*pi at the close
    double radius;  // max magnitude, USD
    double weight;  // duration, seconds
};

/// angle = 2*pi * ((start mod day) - open) / session length.
inline std::vector<PolarRecord> circleplot_export(const std::vector<DislocationSegment>& segments,
                                                  SessionClock clock = {}) {
    std::vector<PolarRecord> out;
    out.reserve(segments.size());
    for (const auto& s : segments) {
        const double tod = static_cast<double>(s.start_ts.ns % kNanosPerDay);
        const double angle = 2.0 * std::numbers::pi * (tod - static_cast<double>(clock.open_ns)) /
                             static_cast<double>(clock.length_ns);
        out.push_back({angle, static_cast<double>(s.max_magnitude) / Price::kUnitsPerDollar,
                       static_cast<double>(s.duration()) / static_cast<double>(kNanosPerSecond)});
    }
    return out;
}

inline std::string circleplot_csv(const std::vector<PolarRecord>& records) {
    std::string s = "angle_rad,radius_usd,weight_s\n";
    char buf[96];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof buf, "%.12f,%.4f,%.9f\n", r.angle, r.radius, r.weight);
        s += buf;
    }
    return s;
}

}  // namespace dislo::analytics
