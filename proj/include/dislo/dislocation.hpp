#pragma once

// Dislocation segment (DS) detection between the SIP NBBO (feed 1) and the
// synthetic direct BBO (feed 2).
//
// Each side is tracked independently. A side is dislocated while both prices
// are present and unequal; a segment is a maximal run during which the sign
// of (feed1 - feed2) stays constant. A sign flip closes the running segment
// and opens a new one at the same instant.

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dislo/book.hpp"
#include "dislo/csv.hpp"
#include "dislo/errors.hpp"
#include "dislo/stats.hpp"
#include "dislo/types.hpp"

namespace dislo {

enum class Side : std::uint8_t { BID, OFFER };
enum class Ordering : std::uint8_t { F1_LESS, F1_GREATER };

inline std::string_view to_string(Side s) { return s == Side::BID ? "BID" : "OFFER"; }
inline std::string_view to_string(Ordering o) { return o == Ordering::F1_LESS ? "F1_LESS" : "F1_GREATER"; }

struct DislocationSegment {
    Ticker symbol;
    Side side = Side::BID;
    Ordering ordering = Ordering::F1_LESS;
    Timestamp start_ts;
    Timestamp end_ts;
    std::int64_t min_magnitude = 0;  // 1e-4 USD
    std::int64_t max_magnitude = 0;
    bool truncated = false;

    std::uint64_t duration() const { return end_ts.ns - start_ts.ns; }

    friend bool operator==(const DislocationSegment&, const DislocationSegment&) = default;
};

/// Canonical order used for every segment listing: symbol, start, side.
inline bool segment_less(const DislocationSegment& a, const DislocationSegment& b) {
    if (a.symbol != b.symbol) return a.symbol < b.symbol;
    if (a.start_ts != b.start_ts) return a.start_ts < b.start_ts;
    return a.side < b.side;
}

inline void sort_segments(std::vector<DislocationSegment>& v) { std::sort(v.begin(), v.end(), segment_less); }

/// Per-symbol detector. Feed it the prevailing (sip, dbbo) pair once per
/// timestamp at which either changed.
class DislocationDetector {
public:
    explicit DislocationDetector(Ticker symbol = {}) : symbol_(symbol) {}

    /// Advances to `ts` with the given prices. Closed segments are appended to `out`.
    void step(Timestamp ts, const ConsolidatedBBO& sip, const ConsolidatedBBO& dbbo,
              std::vector<DislocationSegment>& out) {
        if (started_ && ts < last_ts_)
            throw InvariantError("detector timestamp regressed for " + symbol_.str() + ": " +
                                 std::to_string(ts.ns) + " < " + std::to_string(last_ts_.ns));
        started_ = true;
        last_ts_ = ts;
        advance(tracks_[0], Side::BID, ts, sip.bid, dbbo.bid, out);
        advance(tracks_[1], Side::OFFER, ts, sip.offer, dbbo.offer, out);
    }

    std::vector<DislocationSegment> step(Timestamp ts, const ConsolidatedBBO& sip, const ConsolidatedBBO& dbbo) {
        std::vector<DislocationSegment> out;
        step(ts, sip, dbbo, out);
        return out;
    }

    /// Closes any open segment at `session_end`, flagged truncated.
    void finalize(Timestamp session_end, std::vector<DislocationSegment>& out) {
        for (std::size_t i = 0; i < tracks_.size(); ++i) {
            auto& t = tracks_[i];
            if (!t.open) continue;
            const Timestamp end = std::max(session_end, t.start);
            out.push_back(make_segment(t, static_cast<Side>(i), end, true));
            t.open = false;
        }
    }

    std::vector<DislocationSegment> finalize(Timestamp session_end) {
        std::vector<DislocationSegment> out;
        finalize(session_end, out);
        return out;
    }

    bool any_open() const { return tracks_[0].open || tracks_[1].open; }
    bool open(Side s) const { return tracks_[static_cast<std::size_t>(s)].open; }
    const Ticker& symbol() const { return symbol_; }

private:
    struct Track {
        bool open = false;
        Ordering ordering = Ordering::F1_LESS;
        Timestamp start;
        std::int64_t min_mag = 0;
        std::int64_t max_mag = 0;
    };

    DislocationSegment make_segment(const Track& t, Side side, Timestamp end, bool truncated) const {
        return {symbol_, side, t.ordering, t.start, end, t.min_mag, t.max_mag, truncated};
    }

    void advance(Track& t, Side side, Timestamp ts, Price f1, Price f2, std::vector<DislocationSegment>& out) {
        const bool comparable = f1.present() && f2.present();
        const std::int64_t diff = comparable ? f1.value - f2.value : 0;
        if (t.open) {
            const bool same_sign = diff != 0 && ((diff < 0) == (t.ordering == Ordering::F1_LESS));
            if (same_sign) {
                const std::int64_t mag = diff < 0 ? -diff : diff;
                t.min_mag = std::min(t.min_mag, mag);
                t.max_mag = std::max(t.max_mag, mag);
                return;
            }
            // A segment opened and closed within one instant covers no time.
            if (ts > t.start) out.push_back(make_segment(t, side, ts, false));
            t.open = false;
        }
        if (diff != 0) {
            t.open = true;
            t.ordering = diff < 0 ? Ordering::F1_LESS : Ordering::F1_GREATER;
            t.start = ts;
            t.min_mag = t.max_mag = diff < 0 ? -diff : diff;
        }
    }

    Ticker symbol_;
    std::array<Track, 2> tracks_{};
    Timestamp last_ts_{};
    bool started_ = false;
};

// ---- conditioning and summaries ---------------------------------------------

inline constexpr std::uint64_t kActionableDurationNs = 545'000;  // 545 us
inline constexpr std::int64_t kTickMagnitude = 100;             // $0.01

struct Conditioning {
    std::optional<std::uint64_t> duration_floor_ns;  // keep duration > floor
    std::optional<std::int64_t> magnitude_floor;     // keep min_magnitude > floor
    bool include_truncated = false;                   // only consulted when a floor is set

    static Conditioning none() { return {}; }
    static Conditioning duration(std::uint64_t floor = kActionableDurationNs) { return {floor, std::nullopt}; }
    static Conditioning duration_and_magnitude(std::uint64_t d = kActionableDurationNs,
                                               std::int64_t m = kTickMagnitude) {
        return {d, m};
    }

    bool active() const { return duration_floor_ns || magnitude_floor; }

    bool keeps(const DislocationSegment& s) const {
        if (!active()) return true;
        if (s.truncated && !include_truncated) return false;
        if (duration_floor_ns && !(s.duration() > *duration_floor_ns)) return false;
        if (magnitude_floor && !(s.min_magnitude > *magnitude_floor)) return false;
        return true;
    }
};

inline std::vector<DislocationSegment> condition(const std::vector<DislocationSegment>& segments,
                                                 const Conditioning& c) {
    std::vector<DislocationSegment> out;
    std::copy_if(segments.begin(), segments.end(), std::back_inserter(out),
                 [&](const DislocationSegment& s) { return c.keeps(s); });
    return out;
}

/// Magnitudes reported in USD, durations in seconds.
struct SegmentSummary {
    std::size_t count = 0;
    stats::Describe min_magnitude;
    stats::Describe max_magnitude;
    stats::Describe duration;
};

inline SegmentSummary summarize(const std::vector<DislocationSegment>& segments) {
    std::vector<double> mn, mx, du;
    mn.reserve(segments.size());
    mx.reserve(segments.size());
    du.reserve(segments.size());
    for (const auto& s : segments) {
        mn.push_back(static_cast<double>(s.min_magnitude) / Price::kUnitsPerDollar);
        mx.push_back(static_cast<double>(s.max_magnitude) / Price::kUnitsPerDollar);
        du.push_back(static_cast<double>(s.duration()) / static_cast<double>(kNanosPerSecond));
    }
    return {segments.size(), stats::describe(std::move(mn)), stats::describe(std::move(mx)),
            stats::describe(std::move(du))};
}

// ---- segment CSV --------------------------------------------------------------

inline constexpr std::string_view kSegmentCsvHeader =
    "symbol,side,ordering,start_ns,end_ns,duration_ns,min_mag_1e-4usd,max_mag_1e-4usd,truncated";

inline std::string segment_csv_row(const DislocationSegment& s) {
    std::string r;
    r.reserve(96);
    r.append(s.symbol.view()).push_back(',');
    r.append(to_string(s.side)).push_back(',');
    r.append(to_string(s.ordering)).push_back(',');
    r.append(std::to_string(s.start_ts.ns)).push_back(',');
    r.append(std::to_string(s.end_ts.ns)).push_back(',');
    r.append(std::to_string(s.duration())).push_back(',');
    r.append(std::to_string(s.min_magnitude)).push_back(',');
    r.append(std::to_string(s.max_magnitude)).push_back(',');
    r.append(s.truncated ? "1" : "0");
    return r;
}

inline void write_segments_csv(const std::string& path, const std::vector<DislocationSegment>& segs) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    std::string buf{kSegmentCsvHeader};
    buf.push_back('\n');
    for (const auto& s : segs) {
        buf += segment_csv_row(s);
        buf.push_back('\n');
    }
    out << buf;
}

inline std::vector<DislocationSegment> read_segments_csv(const std::string& path) {
    const auto t = csv::Table::read(path);
    std::vector<DislocationSegment> out;
    out.reserve(t.rows());
    for (std::size_t r = 0; r < t.rows(); ++r) {
        DislocationSegment s;
        const auto& sym = t.at(r, "symbol");
        if (!valid_ticker(sym)) throw FormatError(path, t.line_of(r), "invalid ticker");
        s.symbol = Ticker{sym};
        const auto& side = t.at(r, "side");
        if (side == "BID") s.side = Side::BID;
        else if (side == "OFFER") s.side = Side::OFFER;
        else throw FormatError(path, t.line_of(r), "side: expected BID or OFFER");
        const auto& ord = t.at(r, "ordering");
        if (ord == "F1_LESS") s.ordering = Ordering::F1_LESS;
        else if (ord == "F1_GREATER") s.ordering = Ordering::F1_GREATER;
        else throw FormatError(path, t.line_of(r), "ordering: expected F1_LESS or F1_GREATER");
        s.start_ts.ns = t.integer<std::uint64_t>(r, "start_ns");
        s.end_ts.ns = t.integer<std::uint64_t>(r, "end_ns");
        if (s.end_ts < s.start_ts || t.integer<std::uint64_t>(r, "duration_ns") != s.duration())
            throw FormatError(path, t.line_of(r), "duration_ns inconsistent with start/end");
        s.min_magnitude = t.integer<std::int64_t>(r, "min_mag_1e-4usd");
        s.max_magnitude = t.integer<std::int64_t>(r, "max_mag_1e-4usd");
        s.truncated = t.integer<int>(r, "truncated") != 0;
        out.push_back(s);
    }
    return out;
}

}  // namespace dislo
