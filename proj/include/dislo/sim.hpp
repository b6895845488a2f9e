#pragma once

// Deterministic discrete-event simulator of exchanges, one SIP and a single
// observer connected by fixed one-way links.
//
// A top-of-book change at an exchange at local time t reaches the observer
// on the direct feed at t + link(exch, observer). The same change reaches the
// SIP at t + link(exch, sip); if the consolidated prices move, the SIP
// disseminates after its processing delay and the observer sees the update at
// arrival + processing + link(sip, observer). Trades execute at the NBBO the
// exchange holds from the SIP and are reported on the SIP path.
//
// The observer-side ground truth is computed by materializing each symbol's
// piecewise-constant (sip, dbbo) price timeline from the scheduled arrival
// times and scanning it for maximal constant-sign runs.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dislo/book.hpp"
#include "dislo/csv.hpp"
#include "dislo/dislocation.hpp"
#include "dislo/errors.hpp"
#include "dislo/feed_io.hpp"
#include "dislo/rng.hpp"
#include "dislo/types.hpp"

namespace dislo::sim {

struct ExchangeSite {
    ExchangeId id;
    std::string location;
};

struct TopologyConfig {
    std::vector<ExchangeSite> exchanges;
    std::string sip_location;
    std::uint64_t sip_processing_ns = 0;
    std::string observer_location;
    // One-way latencies keyed by (from, to). A missing direction falls back to
    // its reverse; co-located endpoints without an entry are 0.
    std::map<std::pair<std::string, std::string>, std::uint64_t> links;
    std::uint64_t jitter_ns = 0;  // uniform [0, jitter] added per message

    std::optional<std::uint64_t> find_latency(const std::string& from, const std::string& to) const {
        if (auto it = links.find({from, to}); it != links.end()) return it->second;
        if (auto it = links.find({to, from}); it != links.end()) return it->second;
        if (from == to) return 0;
        return std::nullopt;
    }

    std::uint64_t latency(const std::string& from, const std::string& to) const {
        auto v = find_latency(from, to);
        if (!v) throw InputError("no link between " + from + " and " + to);
        return *v;
    }

    /// Throws InputError naming the first problem.
    void validate() const {
        if (exchanges.empty()) throw InputError("topology has no exchanges");
        std::set<ExchangeId> seen;
        for (const auto& x : exchanges) {
            if (!seen.insert(x.id).second) throw InputError("duplicate exchange " + x.id.str());
            if (!find_latency(x.location, sip_location))
                throw InputError("exchange " + x.id.str() + " has no path to the SIP");
            if (!find_latency(x.location, observer_location))
                throw InputError("exchange " + x.id.str() + " has no path to the observer");
            if (!find_latency(sip_location, x.location))
                throw InputError("SIP has no path to exchange " + x.id.str());
        }
        if (!find_latency(sip_location, observer_location)) throw InputError("SIP has no path to the observer");
    }
};

/// Stochastic driver for one symbol.
struct SymbolProcess {
    Price initial_price = dollars(100);
    double quote_rate = 20.0;     // book changes per second across all exchanges
    double trade_rate = 2.0;      // trades per second
    double step_prob = 0.3;       // probability the reference level moves one tick
    int max_offset_ticks = 2;     // exchange bid sits 0..max below the reference level
    int max_spread_ticks = 3;     // exchange spread 1..max ticks
    int max_size_lots = 10;
    int max_trade_lots = 5;
    double edge_boost = 1.0;      // quote-rate multiplier near open and close
    std::uint64_t edge_window_ns = 0;
};

inline constexpr std::int64_t kTick = Price::kUnitsPerCent;
inline constexpr std::uint32_t kLot = 100;

struct QuoteProcessConfig {
    std::uint64_t seed = 0;
    std::string start_date = "2016-01-04";
    unsigned days = 1;
    std::uint64_t session_open_ns = kRegularOpenNs;
    std::uint64_t session_length_ns = kRegularSessionNs;
    std::vector<std::pair<Ticker, SymbolProcess>> symbols;

    void validate() const {
        if (symbols.empty()) throw InputError("no symbols configured");
        if (days == 0) throw InputError("days must be positive");
        if (session_length_ns == 0) throw InputError("session_length_ns must be positive");
        for (const auto& [t, p] : symbols) {
            if (!(p.quote_rate > 0) || !(p.trade_rate > 0)) throw InputError(t.str() + ": rates must be positive");
            if (p.max_spread_ticks < 1) throw InputError(t.str() + ": spread must be at least one tick");
            if (p.max_offset_ticks < 0 || p.max_size_lots < 1 || p.max_trade_lots < 1)
                throw InputError(t.str() + ": bad size/offset bounds");
            if (p.step_prob < 0 || p.step_prob > 1) throw InputError(t.str() + ": step_prob outside [0,1]");
            if (p.edge_boost < 1.0) throw InputError(t.str() + ": edge_boost must be >= 1");
            if (p.initial_price.value <= (p.max_offset_ticks + 1) * kTick)
                throw InputError(t.str() + ": initial_price too low");
        }
    }
};

// ---- scripted actions and the event loop -----------------------------------------

struct QuoteAction {
    std::uint64_t local_ns = 0;
    std::size_t exchange = 0;  // index into TopologyConfig::exchanges
    Quote quote;
};

struct TradeAction {
    std::uint64_t local_ns = 0;
    std::size_t exchange = 0;
    bool buy = true;  // buyer lifts the offer; seller hits the bid
    std::uint32_t volume = kLot;
};

struct SymbolScript {
    Ticker symbol;
    std::vector<QuoteAction> quotes;
    std::vector<TradeAction> trades;
};

/// One observer-side delivery. `seq` orders deliveries that share a timestamp.
struct Delivery {
    FeedEvent event;
    std::uint64_t seq = 0;
};

struct SymbolRun {
    Ticker symbol;
    std::vector<Delivery> deliveries;  // sorted by (ts, seq)
    std::size_t book_changes = 0;
    std::size_t sip_quotes = 0;
    std::size_t trades = 0;
};

namespace detail {

enum class Kind : std::uint8_t { SIP_ARRIVAL = 0, VIEW_UPDATE = 1, EXCH_QUOTE = 2, TRADE = 3 };

struct Item {
    std::uint64_t ts;
    Kind kind;
    std::size_t exchange;
    std::uint64_t seq;
    Quote quote;
    ConsolidatedBBO nbbo;
    bool buy = true;
    std::uint32_t volume = 0;

    bool operator>(const Item& o) const {
        if (ts != o.ts) return ts > o.ts;
        if (kind != o.kind) return kind > o.kind;
        if (exchange != o.exchange) return exchange > o.exchange;
        return seq > o.seq;
    }
};

/// FIFO link: a message never overtakes an earlier one on the same link.
struct Link {
    std::uint64_t latency = 0;
    std::uint64_t last_arrival = 0;

    std::uint64_t send(std::uint64_t t, std::uint64_t jitter, Rng& rng) {
        std::uint64_t a = t + latency + (jitter ? rng.below(jitter + 1) : 0);
        a = std::max(a, last_arrival);
        last_arrival = a;
        return a;
    }
};

}  // namespace detail

/// Runs one symbol's actions through the network. `jitter_rng` is only drawn
/// from when the topology has jitter.
inline SymbolRun run_symbol(const TopologyConfig& topo, const SymbolScript& script, Rng& jitter_rng) {
    using detail::Item;
    using detail::Kind;
    const std::size_t nx = topo.exchanges.size();
    std::vector<detail::Link> to_obs(nx), to_sip(nx), sip_to(nx);
    for (std::size_t i = 0; i < nx; ++i) {
        const auto& loc = topo.exchanges[i].location;
        to_obs[i].latency = topo.latency(loc, topo.observer_location);
        to_sip[i].latency = topo.latency(loc, topo.sip_location);
        sip_to[i].latency = topo.latency(topo.sip_location, loc);
    }
    detail::Link sip_obs{topo.latency(topo.sip_location, topo.observer_location)};
    const std::uint64_t jitter = topo.jitter_ns;

    std::priority_queue<Item, std::vector<Item>, std::greater<>> q;
    std::uint64_t seq = 0;
    for (const auto& a : script.quotes) {
        if (a.exchange >= nx) throw InputError("quote action references unknown exchange");
        q.push(Item{a.local_ns, Kind::EXCH_QUOTE, a.exchange, seq++, a.quote, {}});
    }
    for (const auto& a : script.trades) {
        if (a.exchange >= nx) throw InputError("trade action references unknown exchange");
        q.push(Item{a.local_ns, Kind::TRADE, a.exchange, seq++, {}, {}, a.buy, a.volume});
    }

    SymbolRun run;
    run.symbol = script.symbol;
    std::uint64_t out_seq = 0;
    auto deliver = [&](std::uint64_t ts, Source src, std::variant<Quote, TradeMsg> payload) {
        run.deliveries.push_back({FeedEvent{Timestamp{ts}, script.symbol, std::move(src), payload}, out_seq++});
    };

    std::vector<std::pair<ExchangeId, Quote>> sip_table;
    for (const auto& x : topo.exchanges) sip_table.emplace_back(x.id, Quote{});
    std::vector<ConsolidatedBBO> views(nx);
    ConsolidatedBBO sip_last;

    while (!q.empty()) {
        Item it = q.top();
        q.pop();
        switch (it.kind) {
            case Kind::EXCH_QUOTE: {
                ++run.book_changes;
                const ExchangeId id = topo.exchanges[it.exchange].id;
                deliver(to_obs[it.exchange].send(it.ts, jitter, jitter_rng), Source::direct(id), it.quote);
                const std::uint64_t at_sip = to_sip[it.exchange].send(it.ts, jitter, jitter_rng);
                q.push(Item{at_sip, Kind::SIP_ARRIVAL, it.exchange, seq++, it.quote, {}});
                break;
            }
            case Kind::SIP_ARRIVAL: {
                sip_table[it.exchange].second = it.quote;
                const ConsolidatedBBO nbbo = rescan_bbo(sip_table);
                if (nbbo.same_prices(sip_last)) break;
                sip_last = nbbo;
                const std::uint64_t dispatched = it.ts + topo.sip_processing_ns;
                ++run.sip_quotes;
                const Quote out{nbbo.bid, static_cast<std::uint32_t>(nbbo.bid_size), nbbo.offer,
                                static_cast<std::uint32_t>(nbbo.offer_size)};
                deliver(sip_obs.send(dispatched, jitter, jitter_rng), Source::make_sip(), out);
                for (std::size_t x = 0; x < nx; ++x)
                    q.push(Item{sip_to[x].send(dispatched, jitter, jitter_rng), Kind::VIEW_UPDATE, x, seq++, {},
                                nbbo});
                break;
            }
            case Kind::VIEW_UPDATE:
                views[it.exchange] = it.nbbo;
                break;
            case Kind::TRADE: {
                const ConsolidatedBBO& v = views[it.exchange];
                const Price px = it.buy ? v.offer : v.bid;
                if (!px.present()) break;
                ++run.trades;
                const std::uint64_t at_sip = to_sip[it.exchange].send(it.ts, jitter, jitter_rng);
                deliver(sip_obs.send(at_sip + topo.sip_processing_ns, jitter, jitter_rng), Source::make_sip(),
                        TradeMsg{px, it.volume});
                break;
            }
        }
    }
    std::sort(run.deliveries.begin(), run.deliveries.end(), [](const Delivery& a, const Delivery& b) {
        if (a.event.ts != b.event.ts) return a.event.ts < b.event.ts;
        return a.seq < b.seq;
    });
    return run;
}

// ---- ground truth ---------------------------------------------------------------

/// Segments implied by one symbol's deliveries, closing open runs at `session_end`.
inline std::vector<DislocationSegment> ground_truth(const SymbolRun& run, Timestamp session_end) {
    struct Point {
        std::uint64_t ts;
        std::int64_t diff[2];  // feed1 - feed2 per side, 0 when equal or not comparable
    };
    std::vector<Point> timeline;
    std::map<ExchangeId, Quote> direct;
    Quote sip{};
    const auto& d = run.deliveries;
    for (std::size_t i = 0; i < d.size();) {
        const std::uint64_t ts = d[i].event.ts.ns;
        for (; i < d.size() && d[i].event.ts.ns == ts; ++i) {
            const FeedEvent& e = d[i].event;
            if (!e.is_quote()) continue;
            if (e.source.sip) sip = e.quote();
            else direct[e.source.exchange] = e.quote();
        }
        const ConsolidatedBBO dbbo = rescan_bbo(direct);
        auto diff = [](Price a, Price b) { return a.present() && b.present() ? a.value - b.value : 0; };
        timeline.push_back({ts, {diff(sip.bid, dbbo.bid), diff(sip.offer, dbbo.offer)}});
    }

    std::vector<DislocationSegment> out;
    for (int side = 0; side < 2; ++side) {
        std::size_t i = 0;
        while (i < timeline.size()) {
            const std::int64_t v = timeline[i].diff[side];
            if (v == 0) {
                ++i;
                continue;
            }
            const bool negative = v < 0;
            std::size_t j = i;
            std::int64_t lo = std::abs(v), hi = std::abs(v);
            while (j + 1 < timeline.size()) {
                const std::int64_t w = timeline[j + 1].diff[side];
                if (w == 0 || (w < 0) != negative) break;
                ++j;
                lo = std::min(lo, std::abs(w));
                hi = std::max(hi, std::abs(w));
            }
            DislocationSegment s;
            s.symbol = run.symbol;
            s.side = side == 0 ? Side::BID : Side::OFFER;
            s.ordering = negative ? Ordering::F1_LESS : Ordering::F1_GREATER;
            s.start_ts = Timestamp{timeline[i].ts};
            s.min_magnitude = lo;
            s.max_magnitude = hi;
            if (j + 1 < timeline.size()) {
                s.end_ts = Timestamp{timeline[j + 1].ts};
            } else {
                s.end_ts = std::max(session_end, s.start_ts);
                s.truncated = true;
            }
            out.push_back(s);
            i = j + 1;
        }
    }
    sort_segments(out);
    return out;
}

// ---- stochastic driver -----------------------------------------------------------

/// Draws one day of book changes and trades for `symbol`.
inline SymbolScript generate_script(const TopologyConfig& topo, const QuoteProcessConfig& cfg, Ticker symbol,
                                    const SymbolProcess& p, unsigned day) {
    Rng rng = Rng::stream(cfg.seed, symbol.view(), day);
    SymbolScript s;
    s.symbol = symbol;
    const std::size_t nx = topo.exchanges.size();
    const std::uint64_t open = cfg.session_open_ns;
    const std::uint64_t close = open + cfg.session_length_ns;
    const std::int64_t floor_level = (p.max_offset_ticks + 1) * kTick;
    std::int64_t level = p.initial_price.value;

    auto draw_quote = [&] {
        Quote q;
        q.bid = Price{level - rng.between(0, p.max_offset_ticks) * kTick};
        q.offer = Price{q.bid.value + rng.between(1, p.max_spread_ticks) * kTick};
        q.bid_size = static_cast<std::uint32_t>(rng.between(1, p.max_size_lots)) * kLot;
        q.offer_size = static_cast<std::uint32_t>(rng.between(1, p.max_size_lots)) * kLot;
        return q;
    };

    for (std::size_t x = 0; x < nx; ++x) s.quotes.push_back({open, x, draw_quote()});

    const double peak = p.quote_rate * p.edge_boost;
    auto boosted = [&](std::uint64_t t) {
        return p.edge_window_ns > 0 && (t < open + p.edge_window_ns || t + p.edge_window_ns >= close);
    };
    double t = static_cast<double>(open);
    while (true) {
        t += rng.exponential(peak) * static_cast<double>(kNanosPerSecond);
        const auto ts = static_cast<std::uint64_t>(t);
        if (ts >= close) break;
        const double accept = rng.uniform();
        if (!boosted(ts) && accept * p.edge_boost >= 1.0) continue;  // thinning
        const double u = rng.uniform();
        if (u < p.step_prob / 2) level += kTick;
        else if (u < p.step_prob) level = std::max(floor_level, level - kTick);
        const auto x = static_cast<std::size_t>(rng.below(nx));
        s.quotes.push_back({ts, x, draw_quote()});
    }

    t = static_cast<double>(open);
    while (true) {
        t += rng.exponential(p.trade_rate) * static_cast<double>(kNanosPerSecond);
        const auto ts = static_cast<std::uint64_t>(t);
        if (ts >= close) break;
        TradeAction a;
        a.local_ns = ts;
        a.exchange = static_cast<std::size_t>(rng.below(nx));
        a.buy = rng.bernoulli(0.5);
        a.volume = static_cast<std::uint32_t>(rng.between(1, p.max_trade_lots)) * kLot;
        s.trades.push_back(a);
    }
    return s;
}

// ---- whole-day simulation and files ----------------------------------------------

struct DayOutput {
    std::string date;
    std::vector<FeedEvent> sip;                          // ts-sorted
    std::map<ExchangeId, std::vector<FeedEvent>> direct;  // ts-sorted per exchange
    std::vector<DislocationSegment> truth;               // canonical order
    Timestamp session_end;
    std::size_t book_changes = 0;
    std::size_t sip_quotes = 0;
    std::size_t trades = 0;

    std::size_t event_count() const {
        std::size_t n = sip.size();
        for (const auto& [x, v] : direct) n += v.size();
        return n;
    }
};

/// Assembles per-feed files and the ground truth from per-symbol runs.
inline DayOutput assemble_day(const TopologyConfig& topo, std::string date, std::vector<SymbolRun> runs) {
    DayOutput day;
    day.date = std::move(date);
    std::sort(runs.begin(), runs.end(), [](const SymbolRun& a, const SymbolRun& b) { return a.symbol < b.symbol; });
    std::uint64_t last = 0;
    for (const auto& r : runs)
        if (!r.deliveries.empty()) last = std::max(last, r.deliveries.back().event.ts.ns);
    day.session_end = Timestamp{last};

    struct Keyed {
        const Delivery* d;
        std::size_t symbol_rank;
    };
    std::vector<Keyed> sip;
    std::map<ExchangeId, std::vector<Keyed>> direct;
    for (const auto& x : topo.exchanges) direct[x.id];
    for (std::size_t r = 0; r < runs.size(); ++r) {
        day.book_changes += runs[r].book_changes;
        day.sip_quotes += runs[r].sip_quotes;
        day.trades += runs[r].trades;
        for (const auto& d : runs[r].deliveries) {
            if (d.event.source.sip) sip.push_back({&d, r});
            else direct[d.event.source.exchange].push_back({&d, r});
        }
        auto truth = ground_truth(runs[r], day.session_end);
        day.truth.insert(day.truth.end(), truth.begin(), truth.end());
    }
    sort_segments(day.truth);
    auto order = [](const Keyed& a, const Keyed& b) {
        if (a.d->event.ts != b.d->event.ts) return a.d->event.ts < b.d->event.ts;
        if (a.symbol_rank != b.symbol_rank) return a.symbol_rank < b.symbol_rank;
        return a.d->seq < b.d->seq;
    };
    std::sort(sip.begin(), sip.end(), order);
    for (const auto& k : sip) day.sip.push_back(k.d->event);
    for (auto& [id, v] : direct) {
        std::sort(v.begin(), v.end(), order);
        auto& out = day.direct[id];
        for (const auto& k : v) out.push_back(k.d->event);
    }
    return day;
}

/// Weekday session dates starting at `start` (YYYY-MM-DD).
inline std::vector<std::string> session_dates(const std::string& start, unsigned count) {
    using namespace std::chrono;
    int y = 0;
    unsigned m = 0, d = 0;
    char dash1 = 0, dash2 = 0;
    std::istringstream is(start);
    is >> y >> dash1 >> m >> dash2 >> d;
    const year_month_day ymd{year{y}, month{m}, day{d}};
    if (!is || dash1 != '-' || dash2 != '-' || !ymd.ok()) throw InputError("bad date '" + start + "'");
    sys_days cur{ymd};
    std::vector<std::string> out;
    while (out.size() < count) {
        const weekday wd{cur};
        if (wd != Saturday && wd != Sunday) {
            const year_month_day c{cur};
            char buf[16];
            std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(c.year()),
                          static_cast<unsigned>(c.month()), static_cast<unsigned>(c.day()));
            out.emplace_back(buf);
        }
        cur += std::chrono::days{1};
    }
    return out;
}

struct SimulationOutput {
    std::vector<DayOutput> days;
};

/// Full stochastic simulation: every configured symbol for every session day.
inline SimulationOutput simulate(const TopologyConfig& topo, const QuoteProcessConfig& cfg) {
    topo.validate();
    cfg.validate();
    SimulationOutput out;
    const auto dates = session_dates(cfg.start_date, cfg.days);
    for (unsigned day = 0; day < dates.size(); ++day) {
        std::vector<SymbolRun> runs;
        for (const auto& [sym, proc] : cfg.symbols) {
            const auto script = generate_script(topo, cfg, sym, proc, day);
            Rng jitter = Rng::stream(cfg.seed ^ 0x6A09E667F3BCC909ULL, sym.view(), day);
            runs.push_back(run_symbol(topo, script, jitter));
        }
        out.days.push_back(assemble_day(topo, dates[day], std::move(runs)));
    }
    return out;
}

inline std::string feed_file_name(const std::string& date, const Source& src) {
    return date + (src.sip ? std::string{".SIP"} : ".D_" + src.exchange.str()) + ".feed";
}

inline std::string truth_file_name(const std::string& date) { return date + ".truth.csv"; }

/// Writes one SIP file, one file per direct feed, and the ground truth. Returns feed paths.
inline std::vector<std::string> write_day(const DayOutput& day, const std::filesystem::path& dir,
                                          std::uint32_t symbol_count) {
    std::filesystem::create_directories(dir);
    const EventFileHeader header{kFeedFormatVersion, day.date, symbol_count};
    std::vector<std::string> paths;
    auto dump = [&](const Source& src, const std::vector<FeedEvent>& events) {
        const auto p = (dir / feed_file_name(day.date, src)).string();
        EventFileWriter w(p, header);
        for (const auto& e : events) w.write(e);
        w.close();
        paths.push_back(p);
    };
    dump(Source::make_sip(), day.sip);
    for (const auto& [id, v] : day.direct) dump(Source::direct(id), v);
    write_segments_csv((dir / truth_file_name(day.date)).string(), day.truth);
    return paths;
}

// ---- the Figure-2 scenario -------------------------------------------------------

/// NYSE and the SIP co-located in Mahwah; Nasdaq and the observer in Carteret.
inline TopologyConfig figure2_topology() {
    TopologyConfig t;
    t.exchanges = {{ExchangeId{"NYSE"}, "Mahwah"}, {ExchangeId{"NASDAQ"}, "Carteret"}};
    t.sip_location = "Mahwah";
    t.sip_processing_ns = 92'000;
    t.observer_location = "Carteret";
    t.links[{"Mahwah", "Mahwah"}] = 5'000;
    t.links[{"Mahwah", "Carteret"}] = 282'000;
    t.links[{"Carteret", "Carteret"}] = 0;
    return t;
}

struct Figure2Replay {
    DayOutput day;
    DislocationSegment expected;
    std::uint64_t improvement_local_ns = 0;
};

/// Market in harmony at $10.00 / $10.02 on both exchanges; one millisecond
/// after the open NYSE improves its bid to $10.01.
inline Figure2Replay replay_figure2() {
    const auto topo = figure2_topology();
    const std::uint64_t open = kRegularOpenNs;
    const std::uint64_t t0 = open + 1'000'000;
    SymbolScript s;
    s.symbol = Ticker{"XYZ"};
    const Quote harmony{dollars(10), 300, dollars(10, 2), 300};
    s.quotes.push_back({open, 0, harmony});
    s.quotes.push_back({open, 1, harmony});
    s.quotes.push_back({t0, 0, Quote{dollars(10, 1), 100, dollars(10, 2), 300}});
    Rng unused(0);
    std::vector<SymbolRun> runs{run_symbol(topo, s, unused)};
    Figure2Replay r;
    r.improvement_local_ns = t0;
    r.day = assemble_day(topo, "2016-01-04", std::move(runs));
    const std::uint64_t direct_arrival = t0 + 282'000;
    const std::uint64_t sip_arrival = t0 + 5'000 + 92'000 + 282'000;
    r.expected = DislocationSegment{s.symbol,          Side::BID,  Ordering::F1_LESS, Timestamp{direct_arrival},
                                    Timestamp{sip_arrival}, 100, 100, false};
    return r;
}

// ---- configuration file -----------------------------------------------------------

struct SimConfig {
    TopologyConfig topology;
    QuoteProcessConfig process;
    std::map<Ticker, SymbolMeta> meta;  // from symbol.<T>.category / market_cap / sector
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string{s.substr(b, e - b + 1)};
}

inline void set_process_key(SymbolProcess& p, const std::string& key, const std::string& v,
                            const std::function<double()>& num) {
    if (key == "initial_price") {
        auto px = parse_price(v);
        if (!px) throw InputError("initial_price: expected decimal dollars");
        p.initial_price = *px;
    } else if (key == "quote_rate") p.quote_rate = num();
    else if (key == "trade_rate") p.trade_rate = num();
    else if (key == "step_prob") p.step_prob = num();
    else if (key == "max_offset_ticks") p.max_offset_ticks = static_cast<int>(num());
    else if (key == "max_spread_ticks") p.max_spread_ticks = static_cast<int>(num());
    else if (key == "max_size_lots") p.max_size_lots = static_cast<int>(num());
    else if (key == "max_trade_lots") p.max_trade_lots = static_cast<int>(num());
    else if (key == "edge_boost") p.edge_boost = num();
    else if (key == "edge_window_ns") p.edge_window_ns = static_cast<std::uint64_t>(num());
    else throw InputError("unknown symbol process key '" + key + "'");
}

}  // namespace detail

/// Parses the `key = value` simulator configuration. Lines starting with '#'
/// are comments. See README for the key list.
inline SimConfig parse_sim_config(std::istream& in, const std::string& name = "<config>") {
    SimConfig c;
    SymbolProcess defaults;
    std::vector<Ticker> symbol_order;
    std::map<Ticker, std::vector<std::pair<std::string, std::string>>> overrides;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = detail::trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw FormatError(name, lineno, "expected key = value");
        const std::string key = detail::trim(std::string_view{t}.substr(0, eq));
        const std::string val = detail::trim(std::string_view{t}.substr(eq + 1));
        auto num = [&]() -> double {
            auto v = csv::to_double(val);
            if (!v || *v < 0) throw FormatError(name, lineno, key + ": expected a non-negative number");
            return *v;
        };
        auto integer = [&]() -> std::uint64_t {
            auto v = csv::to_int<std::uint64_t>(val);
            if (!v) throw FormatError(name, lineno, key + ": expected an integer");
            return *v;
        };
        auto parts = csv::split(key, '.');
        try {
            if (key == "seed") c.process.seed = integer();
            else if (key == "start_date") c.process.start_date = val;
            else if (key == "days") c.process.days = static_cast<unsigned>(integer());
            else if (key == "session_open_ns") c.process.session_open_ns = integer();
            else if (key == "session_length_ns") c.process.session_length_ns = integer();
            else if (key == "sip.location") c.topology.sip_location = val;
            else if (key == "sip.processing_ns") c.topology.sip_processing_ns = integer();
            else if (key == "observer.location") c.topology.observer_location = val;
            else if (key == "jitter_ns") c.topology.jitter_ns = integer();
            else if (parts.size() == 2 && parts[0] == "exchange") {
                if (!valid_exchange(parts[1])) throw FormatError(name, lineno, "bad exchange id");
                c.topology.exchanges.push_back({ExchangeId{parts[1]}, val});
            } else if (parts.size() == 3 && parts[0] == "link") {
                c.topology.links[{std::string{parts[1]}, std::string{parts[2]}}] = integer();
            } else if (key == "symbols") {
                for (auto s : csv::split(val)) {
                    const auto sym = detail::trim(s);
                    if (!valid_ticker(sym)) throw FormatError(name, lineno, "bad ticker '" + sym + "'");
                    if (std::find(symbol_order.begin(), symbol_order.end(), Ticker{sym}) != symbol_order.end())
                        throw FormatError(name, lineno, "duplicate symbol '" + sym + "'");
                    symbol_order.emplace_back(sym);
                }
            } else if (parts.size() == 2 && parts[0] == "default") {
                detail::set_process_key(defaults, std::string{parts[1]}, val, num);
            } else if (parts.size() >= 3 && parts[0] == "symbol") {
                // Tickers may contain dots: symbol.<TICKER>.<key>
                const auto last_dot = key.rfind('.');
                const std::string tick = key.substr(7, last_dot - 7);
                if (!valid_ticker(tick)) throw FormatError(name, lineno, "bad ticker '" + tick + "'");
                overrides[Ticker{tick}].emplace_back(key.substr(last_dot + 1), val);
            } else {
                throw FormatError(name, lineno, "unknown key '" + key + "'");
            }
        } catch (const InputError& e) {
            throw FormatError(name, lineno, e.what());
        }
    }
    for (const auto& sym : symbol_order) {
        SymbolProcess p = defaults;
        SymbolMeta m;
        m.ticker = sym;
        for (const auto& [k, v] : overrides[sym]) {
            if (k == "category") {
                auto cat = parse_category(v);
                if (!cat) throw FormatError(name, 0, sym.str() + ": unknown category '" + v + "'");
                m.category = *cat;
                continue;
            }
            if (k == "market_cap") {
                auto mc = csv::to_double(v);
                if (!mc || *mc <= 0) throw FormatError(name, 0, sym.str() + ": market_cap must be positive");
                m.market_cap = *mc;
                continue;
            }
            if (k == "sector") {
                m.sector = v;
                continue;
            }
            detail::set_process_key(p, k, v, [&, v = v]() -> double {
                auto d = csv::to_double(v);
                if (!d || *d < 0) throw FormatError(name, 0, k + ": expected a non-negative number");
                return *d;
            });
        }
        c.process.symbols.emplace_back(sym, p);
        c.meta.emplace(sym, m);
    }
    for (const auto& [sym, kv] : overrides)
        if (std::find(symbol_order.begin(), symbol_order.end(), sym) == symbol_order.end())
            throw FormatError(name, 0, "override for unlisted symbol " + sym.str());
    return c;
}

inline SimConfig load_sim_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    return parse_sim_config(in, path);
}

}  // namespace dislo::sim
