#pragma once

// Top-of-book state per exchange, the synthetic direct BBO (DBBO) built from
// it, and the SIP NBBO as disseminated.

#include <algorithm>
#include <cstdint>
#include <vector>

#include "dislo/types.hpp"

namespace dislo {

struct ConsolidatedBBO {
    Price bid;
    std::uint64_t bid_size = 0;
    Price offer;
    std::uint64_t offer_size = 0;
    Timestamp ts;  // last price change

    constexpr bool same_prices(const ConsolidatedBBO& o) const { return bid == o.bid && offer == o.offer; }
    friend constexpr bool operator==(const ConsolidatedBBO&, const ConsolidatedBBO&) = default;
};

/// Recomputes a consolidated BBO from scratch over (exchange, quote) pairs.
template <typename Range>
ConsolidatedBBO rescan_bbo(const Range& quotes) {
    ConsolidatedBBO b;
    for (const auto& [exch, q] : quotes) {
        if (q.bid.present()) {
            if (q.bid > b.bid) {
                b.bid = q.bid;
                b.bid_size = q.bid_size;
            } else if (q.bid == b.bid) {
                b.bid_size += q.bid_size;
            }
        }
        if (q.offer.present()) {
            if (!b.offer.present() || q.offer < b.offer) {
                b.offer = q.offer;
                b.offer_size = q.offer_size;
            } else if (q.offer == b.offer) {
                b.offer_size += q.offer_size;
            }
        }
    }
    return b;
}

/// Latest top of book for each exchange quoting one symbol, plus the DBBO
/// maintained incrementally (falling back to a rescan only when a venue that
/// held the best price backs away).
class ExchangeBook {
public:
    struct Entry {
        ExchangeId exchange;
        Quote quote;
    };

    /// Replaces `exch`'s top of book and returns the updated DBBO.
    const ConsolidatedBBO& apply_direct_quote(ExchangeId exch, const Quote& q, Timestamp ts = {}) {
        auto it = std::find_if(entries_.begin(), entries_.end(),
                               [&](const Entry& e) { return e.exchange == exch; });
        Quote old{};
        if (it == entries_.end()) {
            entries_.push_back({exch, q});
        } else {
            old = it->quote;
            it->quote = q;
        }
        const ConsolidatedBBO before = dbbo_;
        update_bid(old, q);
        update_offer(old, q);
        if (!dbbo_.same_prices(before)) dbbo_.ts = ts;
        return dbbo_;
    }

    const ConsolidatedBBO& dbbo() const { return dbbo_; }
    const std::vector<Entry>& entries() const { return entries_; }

    ConsolidatedBBO rescan() const {
        std::vector<std::pair<ExchangeId, Quote>> v;
        for (const auto& e : entries_) v.emplace_back(e.exchange, e.quote);
        auto b = rescan_bbo(v);
        b.ts = dbbo_.ts;
        return b;
    }

private:
    void update_bid(const Quote& old, const Quote& q) {
        const bool was_best = old.bid.present() && old.bid == dbbo_.bid;
        if (was_best && (!q.bid.present() || q.bid < old.bid)) {
            recompute_bid();
            return;
        }
        if (was_best) dbbo_.bid_size -= old.bid_size;  // still at (or above) the best
        if (!q.bid.present()) return;
        if (q.bid > dbbo_.bid) {
            dbbo_.bid = q.bid;
            dbbo_.bid_size = q.bid_size;
        } else if (q.bid == dbbo_.bid) {
            dbbo_.bid_size += q.bid_size;
        }
    }

    void update_offer(const Quote& old, const Quote& q) {
        const bool was_best = old.offer.present() && old.offer == dbbo_.offer;
        if (was_best && (!q.offer.present() || q.offer > old.offer)) {
            recompute_offer();
            return;
        }
        if (was_best) dbbo_.offer_size -= old.offer_size;
        if (!q.offer.present()) return;
        if (!dbbo_.offer.present() || q.offer < dbbo_.offer) {
            dbbo_.offer = q.offer;
            dbbo_.offer_size = q.offer_size;
        } else if (q.offer == dbbo_.offer) {
            dbbo_.offer_size += q.offer_size;
        }
    }

    void recompute_bid() {
        dbbo_.bid = {};
        dbbo_.bid_size = 0;
        for (const auto& e : entries_) {
            const auto& q = e.quote;
            if (!q.bid.present()) continue;
            if (q.bid > dbbo_.bid) {
                dbbo_.bid = q.bid;
                dbbo_.bid_size = q.bid_size;
            } else if (q.bid == dbbo_.bid) {
                dbbo_.bid_size += q.bid_size;
            }
        }
    }

    void recompute_offer() {
        dbbo_.offer = {};
        dbbo_.offer_size = 0;
        for (const auto& e : entries_) {
            const auto& q = e.quote;
            if (!q.offer.present()) continue;
            if (!dbbo_.offer.present() || q.offer < dbbo_.offer) {
                dbbo_.offer = q.offer;
                dbbo_.offer_size = q.offer_size;
            } else if (q.offer == dbbo_.offer) {
                dbbo_.offer_size += q.offer_size;
            }
        }
    }

    std::vector<Entry> entries_;
    ConsolidatedBBO dbbo_;
};

/// SIP NBBO replaced verbatim from SIP quotes; no re-aggregation.
class SipState {
public:
    const ConsolidatedBBO& apply_sip_quote(const Quote& q, Timestamp ts = {}) {
        const bool changed = q.bid != nbbo_.bid || q.offer != nbbo_.offer;
        nbbo_.bid = q.bid;
        nbbo_.bid_size = q.bid_size;
        nbbo_.offer = q.offer;
        nbbo_.offer_size = q.offer_size;
        if (changed) nbbo_.ts = ts;
        return nbbo_;
    }

    const ConsolidatedBBO& nbbo() const { return nbbo_; }

private:
    ConsolidatedBBO nbbo_;
};

}  // namespace dislo
