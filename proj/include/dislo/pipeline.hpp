#pragma once

// Streaming detection + ROC over a merged observer stream.
//
// Each symbol advances one instant at a time: every quote carrying a given
// timestamp is applied before the detector sees the instant, and trades at
// that timestamp are classified against the settled state. Symbols never
// interact, so work can be partitioned across threads by symbol.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "dislo/book.hpp"
#include "dislo/dislocation.hpp"
#include "dislo/feed_io.hpp"
#include "dislo/roc.hpp"

namespace dislo {

struct PipelineResult {
    std::vector<DislocationSegment> segments;  // canonical order
    std::vector<RocRecord> records;            // by (symbol, ts, arrival)
    std::uint64_t events = 0;
    Timestamp session_end;
};

class SymbolProcessor {
public:
    explicit SymbolProcessor(Ticker symbol) : symbol_(symbol), detector_(symbol) {}

    void consume(const FeedEvent& e, PipelineResult& out) {
        if (has_pending_ && e.ts != pending_ts_) commit(out);
        if (!has_pending_) {
            has_pending_ = true;
            pending_ts_ = e.ts;
        }
        if (e.is_trade()) {
            pending_trades_.push_back(e.trade());
            return;
        }
        if (e.source.sip)
            sip_.apply_sip_quote(e.quote(), e.ts);
        else
            book_.apply_direct_quote(e.source.exchange, e.quote(), e.ts);
    }

    void finish(Timestamp session_end, PipelineResult& out) {
        if (has_pending_) commit(out);
        detector_.finalize(session_end, out.segments);
    }

    const ExchangeBook& book() const { return book_; }
    const SipState& sip() const { return sip_; }
    const DislocationDetector& detector() const { return detector_; }

private:
    void commit(PipelineResult& out) {
        detector_.step(pending_ts_, sip_.nbbo(), book_.dbbo(), out.segments);
        for (const auto& t : pending_trades_)
            out.records.push_back(classify_trade(symbol_, pending_ts_, t, sip_.nbbo(), book_.dbbo(), detector_));
        pending_trades_.clear();
        has_pending_ = false;
    }

    Ticker symbol_;
    ExchangeBook book_;
    SipState sip_;
    DislocationDetector detector_;
    bool has_pending_ = false;
    Timestamp pending_ts_{};
    std::vector<TradeMsg> pending_trades_;
};

/// Single-threaded engine over any time-ordered event sequence.
class Pipeline {
public:
    void consume(const FeedEvent& e) {
        if (e.ts < last_ts_) throw InvariantError("pipeline input not time ordered");
        last_ts_ = e.ts;
        ++result_.events;
        auto it = symbols_.find(e.symbol);
        if (it == symbols_.end()) it = symbols_.emplace(e.symbol, SymbolProcessor{e.symbol}).first;
        it->second.consume(e, result_);
    }

    /// Flushes every symbol and closes open segments at `session_end`
    /// (defaults to the last event timestamp).
    PipelineResult finish(std::optional<Timestamp> session_end = std::nullopt) {
        const Timestamp end = session_end.value_or(last_ts_);
        if (end < last_ts_)
            throw InvariantError("session end " + std::to_string(end.ns) + " precedes last event " +
                                 std::to_string(last_ts_.ns));
        for (auto& [sym, proc] : symbols_) proc.finish(end, result_);
        result_.session_end = end;
        canonicalize(result_);
        return std::move(result_);
    }

    static void canonicalize(PipelineResult& r) {
        sort_segments(r.segments);
        // Records are produced in time order per symbol; a stable sort by symbol keeps that.
        std::stable_sort(r.records.begin(), r.records.end(),
                         [](const RocRecord& a, const RocRecord& b) { return a.symbol < b.symbol; });
    }

    Timestamp last_ts() const { return last_ts_; }

private:
    std::unordered_map<Ticker, SymbolProcessor> symbols_;
    PipelineResult result_;
    Timestamp last_ts_{};
};

/// Runs the pipeline over a merged stream, partitioning symbols over `threads`
/// workers. Output is identical for every thread count.
inline PipelineResult run_pipeline(MergedStream& stream, unsigned threads = 1,
                                   std::optional<Timestamp> session_end = std::nullopt) {
    threads = std::max(1u, threads);
    if (threads == 1) {
        Pipeline p;
        while (auto e = stream.next()) p.consume(*e);
        return p.finish(session_end);
    }
    std::vector<Pipeline> workers(threads);
    std::vector<std::vector<FeedEvent>> buckets(threads);
    constexpr std::size_t kBatch = 1 << 16;
    std::hash<Ticker> hasher;
    Timestamp last{};
    std::uint64_t total = 0;
    auto drain = [&] {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < threads; ++w)
            pool.emplace_back([&, w] {
                for (const auto& e : buckets[w]) workers[w].consume(e);
                buckets[w].clear();
            });
    };
    std::size_t pending = 0;
    while (auto e = stream.next()) {
        last = e->ts;
        ++total;
        buckets[hasher(e->symbol) % threads].push_back(std::move(*e));
        if (++pending == kBatch) {
            drain();
            pending = 0;
        }
    }
    drain();
    PipelineResult merged;
    merged.session_end = session_end.value_or(last);
    if (merged.session_end < last)
        throw InvariantError("session end " + std::to_string(merged.session_end.ns) + " precedes last event " +
                             std::to_string(last.ns));
    for (auto& w : workers) {
        auto r = w.finish(merged.session_end);
        merged.segments.insert(merged.segments.end(), r.segments.begin(), r.segments.end());
        merged.records.insert(merged.records.end(), r.records.begin(), r.records.end());
    }
    merged.events = total;
    Pipeline::canonicalize(merged);
    return merged;
}

}  // namespace dislo
