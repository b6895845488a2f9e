#pragma once

// Realized opportunity cost (ROC) of trades printed while a symbol is
// dislocated, and the purse aggregates built from it.
//
// Feed 1 is the SIP, feed 2 the direct BBO. A positive ROC means the direct
// feeds showed the active trader a better price (higher bid or lower offer).

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "dislo/book.hpp"
#include "dislo/csv.hpp"
#include "dislo/dislocation.hpp"
#include "dislo/errors.hpp"
#include "dislo/types.hpp"

namespace dislo {

enum class MatchedSide : std::uint8_t { NONE, SIP_BID, SIP_OFFER };

/// Why a trade does or does not contribute to ROC.
enum class RocReason : std::uint8_t {
    INCLUDED,
    NOT_DIFFERING,     // no segment open for the symbol
    OFF_QUOTE,         // price equals neither SIP quote (e.g. midpoint)
    LOCKED_SIP,        // price equals both SIP quotes
    DBBO_SIDE_ABSENT,  // matched a SIP quote but the direct side is empty
};

inline std::string_view to_string(MatchedSide m) {
    switch (m) {
        case MatchedSide::SIP_BID: return "SIP_BID";
        case MatchedSide::SIP_OFFER: return "SIP_OFFER";
        default: return "NONE";
    }
}

inline std::string_view to_string(RocReason r) {
    switch (r) {
        case RocReason::INCLUDED: return "included";
        case RocReason::NOT_DIFFERING: return "not_differing";
        case RocReason::OFF_QUOTE: return "off_quote";
        case RocReason::LOCKED_SIP: return "locked_sip";
        case RocReason::DBBO_SIDE_ABSENT: return "dbbo_side_absent";
    }
    return "unknown";
}

struct RocRecord {
    Ticker symbol;
    Timestamp ts;
    Price price;
    std::uint32_t volume = 0;
    MatchedSide matched = MatchedSide::NONE;
    std::int64_t roc_signed = 0;  // 1e-4 USD x shares
    bool is_differing = false;
    bool included = false;
    RocReason reason = RocReason::NOT_DIFFERING;

    std::int64_t traded_value() const { return price.value * static_cast<std::int64_t>(volume); }
    friend bool operator==(const RocRecord&, const RocRecord&) = default;
};

/// Classifies one trade against the quotes prevailing at its timestamp.
/// `dislocated` is whether any segment is open for the symbol at that instant.
inline RocRecord classify_trade(Ticker symbol, Timestamp ts, const TradeMsg& t, const ConsolidatedBBO& sip,
                                const ConsolidatedBBO& dbbo, bool dislocated) {
    RocRecord r{symbol, ts, t.price, t.volume};
    r.is_differing = dislocated;
    if (!dislocated) {
        r.reason = RocReason::NOT_DIFFERING;
        return r;
    }
    const bool at_bid = sip.bid.present() && t.price == sip.bid;
    const bool at_offer = sip.offer.present() && t.price == sip.offer;
    if (at_bid && at_offer) {
        r.reason = RocReason::LOCKED_SIP;
        return r;
    }
    if (!at_bid && !at_offer) {
        r.reason = RocReason::OFF_QUOTE;
        return r;
    }
    r.matched = at_bid ? MatchedSide::SIP_BID : MatchedSide::SIP_OFFER;
    const Price direct = at_bid ? dbbo.bid : dbbo.offer;
    if (!direct.present()) {
        r.reason = RocReason::DBBO_SIDE_ABSENT;
        return r;
    }
    const auto v = static_cast<std::int64_t>(t.volume);
    r.roc_signed = at_bid ? (dbbo.bid - sip.bid).value * v : (sip.offer - dbbo.offer).value * v;
    r.included = true;
    r.reason = RocReason::INCLUDED;
    return r;
}

inline RocRecord classify_trade(Ticker symbol, Timestamp ts, const TradeMsg& t, const ConsolidatedBBO& sip,
                                const ConsolidatedBBO& dbbo, const DislocationDetector& active) {
    return classify_trade(symbol, ts, t, sip, dbbo, active.any_open());
}

// ---- purse aggregation ----------------------------------------------------------

/// Per-key (symbol or category) per-date sums. Integer fields are in 1e-4 USD
/// (x shares where applicable) and merge exactly.
struct PurseRow {
    std::string date;
    std::string key;
    std::uint64_t trades = 0;
    std::uint64_t shares = 0;
    std::int64_t traded_value = 0;
    std::uint64_t diff_trades = 0;
    std::int64_t diff_traded_value = 0;
    std::uint64_t included_trades = 0;
    std::uint64_t included_shares = 0;
    std::int64_t roc_total = 0;
    std::int64_t roc_sip = 0;
    std::int64_t roc_direct = 0;
    double roc_per_share_sum = 0.0;  // sum over included trades of |roc|/volume, 1e-4 USD/share

    void add(const RocRecord& r) {
        ++trades;
        shares += r.volume;
        traded_value += r.traded_value();
        if (r.is_differing) {
            ++diff_trades;
            diff_traded_value += r.traded_value();
        }
        if (r.included) {
            ++included_trades;
            included_shares += r.volume;
            const std::int64_t mag = r.roc_signed < 0 ? -r.roc_signed : r.roc_signed;
            roc_total += mag;
            if (r.roc_signed > 0) roc_sip += r.roc_signed;
            else roc_direct += -r.roc_signed;
            roc_per_share_sum += static_cast<double>(mag) / r.volume;
        }
    }

    PurseRow& operator+=(const PurseRow& o) {
        trades += o.trades;
        shares += o.shares;
        traded_value += o.traded_value;
        diff_trades += o.diff_trades;
        diff_traded_value += o.diff_traded_value;
        included_trades += o.included_trades;
        included_shares += o.included_shares;
        roc_total += o.roc_total;
        roc_sip += o.roc_sip;
        roc_direct += o.roc_direct;
        roc_per_share_sum += o.roc_per_share_sum;
        return *this;
    }

    /// Share-weighted ROC per share in USD; 0 without included trades.
    double roc_per_share() const {
        if (included_shares == 0) return 0.0;
        return static_cast<double>(roc_total) / static_cast<double>(included_shares) / Price::kUnitsPerDollar;
    }

    /// Trade-weighted ROC per share in USD; 0 without included trades.
    double roc_per_share_trade_weighted() const {
        if (included_trades == 0) return 0.0;
        return roc_per_share_sum / static_cast<double>(included_trades) / Price::kUnitsPerDollar;
    }

    /// ROC per dollar traded.
    double roc_per_traded_value() const {
        if (traded_value == 0) return 0.0;
        return static_cast<double>(roc_total) / static_cast<double>(traded_value);
    }
};

/// Sums records for one date under keys chosen by `key_of`.
template <typename KeyFn>
std::map<std::string, PurseRow> aggregate_purse(const std::vector<RocRecord>& records, const std::string& date,
                                                KeyFn key_of) {
    std::map<std::string, PurseRow> rows;
    for (const auto& r : records) {
        const std::string key = key_of(r);
        auto [it, inserted] = rows.try_emplace(key);
        if (inserted) {
            it->second.date = date;
            it->second.key = key;
        }
        it->second.add(r);
    }
    return rows;
}

inline std::map<std::string, PurseRow> aggregate_purse_by_symbol(const std::vector<RocRecord>& records,
                                                                 const std::string& date) {
    return aggregate_purse(records, date, [](const RocRecord& r) { return r.symbol.str(); });
}

/// Re-keys symbol rows into category rows (per date). Unknown symbols map to OTHER.
inline std::vector<PurseRow> rollup_by_category(const std::vector<PurseRow>& symbol_rows,
                                                const std::map<Ticker, SymbolMeta>& meta) {
    std::map<std::pair<std::string, std::string>, PurseRow> acc;
    for (const auto& r : symbol_rows) {
        std::string cat{to_string(Category::OTHER)};
        if (valid_ticker(r.key))
            if (auto it = meta.find(Ticker{r.key}); it != meta.end()) cat = std::string{to_string(it->second.category)};
        auto& row = acc[{r.date, cat}];
        row.date = r.date;
        row.key = cat;
        row += r;
    }
    std::vector<PurseRow> out;
    for (auto& [k, v] : acc) out.push_back(v);
    return out;
}

// ---- ten-line report ------------------------------------------------------------

struct PurseReport {
    std::int64_t roc = 0;         // line 1
    std::int64_t sip_oc = 0;      // line 2
    std::int64_t direct_oc = 0;   // line 3
    std::uint64_t trades = 0;     // line 4
    std::uint64_t diff_trades = 0;  // line 5
    std::int64_t traded_value = 0;  // line 6
    std::int64_t diff_traded_value = 0;  // line 7
    std::optional<double> pct_diff_trades;       // line 8
    std::optional<double> pct_diff_traded_value;  // line 9
    std::optional<double> ratio;                  // line 10 = 9 / 8

    std::string render_text(const std::string& title = {}) const;
    std::string render_csv() const;
};

inline PurseReport purse_report(const std::vector<PurseRow>& rows) {
    PurseRow total;
    for (const auto& r : rows) total += r;
    PurseReport p;
    p.roc = total.roc_total;
    p.sip_oc = total.roc_sip;
    p.direct_oc = total.roc_direct;
    p.trades = total.trades;
    p.diff_trades = total.diff_trades;
    p.traded_value = total.traded_value;
    p.diff_traded_value = total.diff_traded_value;
    if (p.trades > 0) p.pct_diff_trades = 100.0 * static_cast<double>(p.diff_trades) / static_cast<double>(p.trades);
    if (p.traded_value > 0)
        p.pct_diff_traded_value =
            100.0 * static_cast<double>(p.diff_traded_value) / static_cast<double>(p.traded_value);
    if (p.pct_diff_trades && p.pct_diff_traded_value && *p.pct_diff_trades > 0.0)
        p.ratio = *p.pct_diff_traded_value / *p.pct_diff_trades;
    return p;
}

inline std::string fixed(double v, int digits) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

inline std::string PurseReport::render_text(const std::string& title) const {
    const std::string undef = "undefined";
    const std::vector<std::pair<std::string, std::string>> lines = {
        {"Realized Opportunity Cost", "$" + format_usd_cents(roc)},
        {"SIP Opportunity Cost", "$" + format_usd_cents(sip_oc)},
        {"Direct Opportunity Cost", "$" + format_usd_cents(direct_oc)},
        {"Trades", with_commas(std::to_string(trades))},
        {"Diff. Trades", with_commas(std::to_string(diff_trades))},
        {"Traded Value", "$" + format_usd_cents(traded_value)},
        {"Diff. Traded Value", "$" + format_usd_cents(diff_traded_value)},
        {"Percent Diff. Trades", pct_diff_trades ? fixed(*pct_diff_trades, 2) : undef},
        {"Percent Diff. Traded Value", pct_diff_traded_value ? fixed(*pct_diff_traded_value, 2) : undef},
        {"Ratio of 9 / 8", ratio ? fixed(*ratio, 4) : undef},
    };
    std::ostringstream os;
    if (!title.empty()) os << title << '\n';
    for (std::size_t i = 0; i < lines.size(); ++i) {
        os << std::setw(2) << (i + 1) << "  " << std::left << std::setw(28) << lines[i].first << std::right
           << std::setw(26) << lines[i].second << '\n';
    }
    return os.str();
}

inline std::string PurseReport::render_csv() const {
    const auto opt = [](const std::optional<double>& v, int d) { return v ? fixed(*v, d) : std::string{}; };
    std::ostringstream os;
    os << "line,label,value\n";
    os << "1,Realized Opportunity Cost," << format_usd_cents(roc, false) << '\n';
    os << "2,SIP Opportunity Cost," << format_usd_cents(sip_oc, false) << '\n';
    os << "3,Direct Opportunity Cost," << format_usd_cents(direct_oc, false) << '\n';
    os << "4,Trades," << trades << '\n';
    os << "5,Diff. Trades," << diff_trades << '\n';
    os << "6,Traded Value," << format_usd_cents(traded_value, false) << '\n';
    os << "7,Diff. Traded Value," << format_usd_cents(diff_traded_value, false) << '\n';
    os << "8,Percent Diff. Trades," << opt(pct_diff_trades, 2) << '\n';
    os << "9,Percent Diff. Traded Value," << opt(pct_diff_traded_value, 2) << '\n';
    os << "10,Ratio of 9 / 8," << opt(ratio, 4) << '\n';
    return os.str();
}

// ---- CSV ------------------------------------------------------------------------

inline constexpr std::string_view kRocCsvHeader =
    "symbol,ts_ns,price_1e-4usd,volume,is_differing,included,matched,roc_signed_1e-4usd,roc_signed_usd,reason";

inline void write_roc_csv(const std::string& path, const std::vector<RocRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    std::string buf{kRocCsvHeader};
    buf.push_back('\n');
    for (const auto& r : records) {
        buf.append(r.symbol.view()).push_back(',');
        buf.append(std::to_string(r.ts.ns)).push_back(',');
        buf.append(std::to_string(r.price.value)).push_back(',');
        buf.append(std::to_string(r.volume)).push_back(',');
        buf.append(r.is_differing ? "1," : "0,");
        buf.append(r.included ? "1," : "0,");
        buf.append(to_string(r.matched)).push_back(',');
        buf.append(std::to_string(r.roc_signed)).push_back(',');
        buf.append(format_price(Price{r.roc_signed})).push_back(',');
        buf.append(to_string(r.reason)).push_back('\n');
        if (buf.size() > (1u << 20)) {
            out << buf;
            buf.clear();
        }
    }
    out << buf;
}

inline constexpr std::string_view kPurseCsvHeader =
    "date,key,trades,shares,traded_value_1e-4usd,diff_trades,diff_traded_value_1e-4usd,included_trades,"
    "included_shares,roc_total_1e-4usd,roc_sip_1e-4usd,roc_direct_1e-4usd,roc_per_share_sum_1e-4usd,"
    "traded_value_usd,roc_total_usd,roc_per_share_usd,roc_per_share_tw_usd";

inline std::string purse_csv_row(const PurseRow& r) {
    std::ostringstream os;
    os << r.date << ',' << r.key << ',' << r.trades << ',' << r.shares << ',' << r.traded_value << ','
       << r.diff_trades << ',' << r.diff_traded_value << ',' << r.included_trades << ',' << r.included_shares
       << ',' << r.roc_total << ',' << r.roc_sip << ',' << r.roc_direct << ',' << std::setprecision(17)
       << r.roc_per_share_sum << ',' << format_usd_cents(r.traded_value, false) << ','
       << format_usd_cents(r.roc_total, false) << ',' << fixed(r.roc_per_share(), 6) << ','
       << fixed(r.roc_per_share_trade_weighted(), 6);
    return os.str();
}

inline void write_purse_csv(const std::string& path, const std::vector<PurseRow>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    out << kPurseCsvHeader << '\n';
    for (const auto& r : rows) out << purse_csv_row(r) << '\n';
}

inline std::vector<PurseRow> read_purse_csv(const std::string& path) {
    const auto t = csv::Table::read(path);
    std::vector<PurseRow> out;
    for (std::size_t i = 0; i < t.rows(); ++i) {
        PurseRow r;
        r.date = t.at(i, "date");
        r.key = t.at(i, "key");
        r.trades = t.integer<std::uint64_t>(i, "trades");
        r.shares = t.integer<std::uint64_t>(i, "shares");
        r.traded_value = t.integer<std::int64_t>(i, "traded_value_1e-4usd");
        r.diff_trades = t.integer<std::uint64_t>(i, "diff_trades");
        r.diff_traded_value = t.integer<std::int64_t>(i, "diff_traded_value_1e-4usd");
        r.included_trades = t.integer<std::uint64_t>(i, "included_trades");
        r.included_shares = t.integer<std::uint64_t>(i, "included_shares");
        r.roc_total = t.integer<std::int64_t>(i, "roc_total_1e-4usd");
        r.roc_sip = t.integer<std::int64_t>(i, "roc_sip_1e-4usd");
        r.roc_direct = t.integer<std::int64_t>(i, "roc_direct_1e-4usd");
        r.roc_per_share_sum = t.real(i, "roc_per_share_sum_1e-4usd");
        if (r.roc_total != r.roc_sip + r.roc_direct)
            throw FormatError(path, t.line_of(i), "roc_total != roc_sip + roc_direct");
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace dislo
