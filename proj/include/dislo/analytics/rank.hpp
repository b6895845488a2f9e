#pragma once

// Top/bottom listings of symbols by an ROC metric.

#include <algorithm>
#include <cstdio>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "dislo/errors.hpp"
#include "dislo/roc.hpp"
#include "dislo/types.hpp"

namespace dislo::analytics {

enum class RankMetric { ROC_TOTAL, ROC_PER_SHARE, ROC_PER_TRADED_VALUE };

inline RankMetric parse_rank_metric(std::string_view s) {
    if (s == "roc_total") return RankMetric::ROC_TOTAL;
    if (s == "roc_per_share") return RankMetric::ROC_PER_SHARE;
    if (s == "roc_per_traded_value") return RankMetric::ROC_PER_TRADED_VALUE;
    throw AnalysisError("unknown rank metric '" + std::string{s} + "'");
}

inline std::string_view to_string(RankMetric m) {
    switch (m) {
        case RankMetric::ROC_TOTAL: return "roc_total";
        case RankMetric::ROC_PER_SHARE: return "roc_per_share";
        case RankMetric::ROC_PER_TRADED_VALUE: return "roc_per_traded_value";
    }
    return "?";
}

inline double metric_value(const PurseRow& r, RankMetric m) {
    switch (m) {
        case RankMetric::ROC_TOTAL: return static_cast<double>(r.roc_total) / Price::kUnitsPerDollar;
        case RankMetric::ROC_PER_SHARE: return r.roc_per_share();
        case RankMetric::ROC_PER_TRADED_VALUE: return r.roc_per_traded_value();
    }
    return 0.0;
}

struct RankEntry {
    std::size_t rank = 0;  // 1-based position in the full ordering
    std::string ticker;
    std::string category;
    double value = 0.0;
};

struct Ranking {
    RankMetric metric = RankMetric::ROC_TOTAL;
    std::vector<RankEntry> top;     // highest first
    std::vector<RankEntry> bottom;  // lowest last, i.e. continues the full order
};

/// Rows are summed per symbol across dates first. Order is by metric
/// descending, ties by ticker ascending.
inline Ranking rank_by(const std::vector<PurseRow>& rows, RankMetric metric, std::size_t top_k,
                       std::size_t bottom_k, const std::map<Ticker, SymbolMeta>& meta = {}) {
    std::map<std::string, PurseRow> per_symbol;
    for (const auto& r : rows) {
        auto& acc = per_symbol[r.key];
        acc.key = r.key;
        acc += r;
    }
    std::vector<RankEntry> all;
    for (const auto& [key, row] : per_symbol) {
        RankEntry e;
        e.ticker = key;
        e.category = std::string{to_string(Category::OTHER)};
        if (valid_ticker(key))
            if (auto it = meta.find(Ticker{key}); it != meta.end()) e.category = std::string{to_string(it->second.category)};
        e.value = metric_value(row, metric);
        all.push_back(std::move(e));
    }
    std::sort(all.begin(), all.end(), [](const RankEntry& a, const RankEntry& b) {
        if (a.value != b.value) return a.value > b.value;
        return a.ticker < b.ticker;
    });
    for (std::size_t i = 0; i < all.size(); ++i) all[i].rank = i + 1;
    Ranking out;
    out.metric = metric;
    const std::size_t nt = std::min(top_k, all.size());
    out.top.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(nt));
    const std::size_t nb = std::min(bottom_k, all.size());
    out.bottom.assign(all.end() - static_cast<std::ptrdiff_t>(nb), all.end());
    return out;
}

inline std::string ranking_csv(const Ranking& r) {
    std::string s = "list,rank,ticker,category," + std::string{to_string(r.metric)} + "\n";
    char buf[64];
    const auto emit = [&](const char* list, const RankEntry& e) {
        std::snprintf(buf, sizeof buf, "%.10g", e.value);
        s += std::string{list} + "," + std::to_string(e.rank) + "," + e.ticker + "," + e.category + "," + buf + "\n";
    };
    for (const auto& e : r.top) emit("top", e);
    for (const auto& e : r.bottom) emit("bottom", e);
    return s;
}

}  // namespace dislo::analytics
