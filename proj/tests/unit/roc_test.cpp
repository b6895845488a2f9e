#include <gtest/gtest.h>

#include "dislo/roc.hpp"
#include "test_util.hpp"

using namespace dislo;
using testutil::quote;
using testutil::trade;

namespace {

ConsolidatedBBO bbo(std::int64_t bid, std::int64_t offer) {
    ConsolidatedBBO b;
    b.bid = Price{bid};
    b.offer = Price{offer};
    return b;
}

const Ticker kSym{"XYZ"};

}  // namespace

TEST(ClassifyTrade, FigureTwoTradeAtSipBid) {
    const auto r = classify_trade(kSym, Timestamp{1}, TradeMsg{dollars(10), 100}, bbo(100000, 100200),
                                  bbo(100100, 100200), true);
    EXPECT_TRUE(r.included);
    EXPECT_EQ(r.matched, MatchedSide::SIP_BID);
    EXPECT_EQ(r.roc_signed, 100 * 100);
    EXPECT_EQ(format_usd_cents(r.roc_signed), "1.00");
}

TEST(ClassifyTrade, MidpointIsOffQuote) {
    const auto r = classify_trade(kSym, Timestamp{1}, TradeMsg{Price{100050}, 100}, bbo(100000, 100200),
                                  bbo(100100, 100200), true);
    EXPECT_TRUE(r.is_differing);
    EXPECT_FALSE(r.included);
    EXPECT_EQ(r.reason, RocReason::OFF_QUOTE);
    EXPECT_EQ(r.roc_signed, 0);
}

TEST(ClassifyTrade, LockedSipIsAmbiguous) {
    const auto r = classify_trade(kSym, Timestamp{1}, TradeMsg{dollars(10), 100}, bbo(100000, 100000),
                                  bbo(100100, 100200), true);
    EXPECT_FALSE(r.included);
    EXPECT_EQ(r.reason, RocReason::LOCKED_SIP);
}

TEST(ClassifyTrade, NotDifferingIsNeverIncluded) {
    const auto r = classify_trade(kSym, Timestamp{1}, TradeMsg{dollars(10), 100}, bbo(100000, 100200),
                                  bbo(100000, 100200), false);
    EXPECT_FALSE(r.is_differing);
    EXPECT_FALSE(r.included);
    EXPECT_EQ(r.reason, RocReason::NOT_DIFFERING);
}

TEST(ClassifyTrade, DirectSideAbsent) {
    const auto r = classify_trade(kSym, Timestamp{1}, TradeMsg{Price{100200}, 100}, bbo(100000, 100200),
                                  bbo(100100, 0), true);
    EXPECT_FALSE(r.included);
    EXPECT_EQ(r.reason, RocReason::DBBO_SIDE_ABSENT);
}

TEST(ClassifyTrade, OfferSideSign) {
    // Direct offer better (lower) than SIP offer: positive, SIP side pays.
    auto r = classify_trade(kSym, Timestamp{1}, TradeMsg{Price{100300}, 200}, bbo(100000, 100300),
                            bbo(100000, 100200), true);
    EXPECT_EQ(r.roc_signed, 100 * 200);
    // Direct offer worse: negative.
    r = classify_trade(kSym, Timestamp{1}, TradeMsg{Price{100200}, 200}, bbo(100000, 100200), bbo(100000, 100300),
                       true);
    EXPECT_EQ(r.roc_signed, -100 * 200);
}

TEST(ClassifyTrade, ReversingFeedsNegates) {
    Rng rng(5);
    PurseRow fwd, rev;
    for (int i = 0; i < 5000; ++i) {
        const std::int64_t b1 = 10000 + rng.between(-3, 3) * 100, b2 = 10000 + rng.between(-3, 3) * 100;
        const std::int64_t o1 = b1 + 100 * (1 + rng.between(0, 3)), o2 = b2 + 100 * (1 + rng.between(0, 3));
        const auto f1 = bbo(b1, o1), f2 = bbo(b2, o2);
        const bool differing = b1 != b2 || o1 != o2;
        const bool at_bid = rng.bernoulli(0.5);
        const auto vol = static_cast<std::uint32_t>(100 * (1 + rng.below(10)));
        const auto a = classify_trade(kSym, Timestamp{1}, TradeMsg{Price{at_bid ? b1 : o1}, vol}, f1, f2, differing);
        const auto b = classify_trade(kSym, Timestamp{1}, TradeMsg{Price{at_bid ? b2 : o2}, vol}, f2, f1, differing);
        if (a.included && b.included && a.matched == b.matched) {
            ASSERT_EQ(a.roc_signed, -b.roc_signed);
            fwd.add(a);
            rev.add(b);
        }
    }
    EXPECT_GT(fwd.included_trades, 100u);
    EXPECT_EQ(fwd.roc_sip, rev.roc_direct);
    EXPECT_EQ(fwd.roc_direct, rev.roc_sip);
    EXPECT_EQ(fwd.roc_total, rev.roc_total);
}

TEST(Pipeline, RocMatchesFullRescanOracle) {
    Rng rng(77);
    testutil::RandomFeedOptions o;
    o.symbols = {"AAA", "BBB", "CCC"};
    o.events = 60000;
    o.trade_prob = 0.3;
    const auto merged = testutil::sort_merge({testutil::random_feed(rng, o)});
    const auto res = testutil::run_events(merged);
    std::vector<std::size_t> trade_idx;
    for (std::size_t i = 0; i < merged.size(); ++i)
        if (!merged[i].is_quote()) trade_idx.push_back(i);
    ASSERT_GE(trade_idx.size(), 10000u);
    ASSERT_EQ(res.records.size(), trade_idx.size());
    // Records are grouped by symbol in time order; rebuild the same order from the oracle.
    std::vector<RocRecord> oracle;
    for (auto i : trade_idx) oracle.push_back(testutil::rescan_roc(merged, i));
    std::stable_sort(oracle.begin(), oracle.end(),
                     [](const RocRecord& a, const RocRecord& b) { return a.symbol < b.symbol; });
    std::size_t included = 0;
    for (std::size_t i = 0; i < oracle.size(); ++i) {
        ASSERT_EQ(res.records[i], oracle[i]) << "trade " << i;
        included += oracle[i].included;
    }
    EXPECT_GT(included, 500u);
}

TEST(Pipeline, QuotesAtTradeInstantApplyFirst) {
    const auto s = Source::make_sip();
    const auto n = Source::direct(ExchangeId{"NYSE"});
    const std::vector<FeedEvent> ev{
        quote(10, "XYZ", s, 100000, 100, 100200, 100),
        quote(10, "XYZ", n, 100000, 100, 100200, 100),
        trade(20, "XYZ", 100000, 100),
        quote(20, "XYZ", n, 100100, 100, 100200, 100),  // same instant, after the trade in the file
    };
    const auto res = testutil::run_events(ev);
    ASSERT_EQ(res.records.size(), 1u);
    EXPECT_TRUE(res.records[0].included);
    EXPECT_EQ(res.records[0].roc_signed, 100 * 100);
}

TEST(Purse, SingleIncludedTrade) {
    PurseRow row;
    RocRecord r;
    r.symbol = kSym;
    r.price = dollars(10);
    r.volume = 100;
    r.is_differing = r.included = true;
    r.roc_signed = 10000;
    row.add(r);
    EXPECT_DOUBLE_EQ(row.roc_per_share(), 0.01);
    EXPECT_DOUBLE_EQ(row.roc_per_share_trade_weighted(), 0.01);
    EXPECT_EQ(row.roc_total, row.roc_sip + row.roc_direct);
}

TEST(Purse, NoDifferingTrades) {
    PurseRow row;
    RocRecord r;
    r.symbol = kSym;
    r.price = dollars(10);
    r.volume = 100;
    row.add(r);
    EXPECT_EQ(row.roc_total, 0);
    EXPECT_DOUBLE_EQ(row.roc_per_share(), 0.0);
    const auto rep = purse_report({row});
    ASSERT_TRUE(rep.pct_diff_trades.has_value());
    EXPECT_DOUBLE_EQ(*rep.pct_diff_trades, 0.0);
    EXPECT_DOUBLE_EQ(*rep.pct_diff_traded_value, 0.0);
    EXPECT_FALSE(rep.ratio.has_value());
}

TEST(Purse, IdentitiesAndVolumeScaling) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        Rng rng(seed);
        testutil::RandomFeedOptions o;
        o.symbols = {"AAA", "BBB", "CCC", "DDD", "EEE"};
        o.events = 20000;
        auto ev = testutil::sort_merge({testutil::random_feed(rng, o)});
        const auto res = testutil::run_events(ev);
        for (auto& e : ev)
            if (!e.is_quote()) std::get<TradeMsg>(e.payload).volume *= 3;
        const auto scaled = testutil::run_events(ev);
        const auto rows = aggregate_purse_by_symbol(res.records, "2016-01-04");
        const auto rows3 = aggregate_purse_by_symbol(scaled.records, "2016-01-04");
        for (const auto& [k, r] : rows) {
            EXPECT_EQ(r.roc_total, r.roc_sip + r.roc_direct);
            EXPECT_LE(r.included_trades, r.diff_trades);
            EXPECT_LE(r.diff_trades, r.trades);
            const auto& s = rows3.at(k);
            EXPECT_EQ(s.roc_total, 3 * r.roc_total);
            EXPECT_EQ(s.roc_sip, 3 * r.roc_sip);
            EXPECT_EQ(s.roc_direct, 3 * r.roc_direct);
        }
        for (const auto& rec : res.records) EXPECT_TRUE(!rec.included || rec.is_differing);
        std::vector<PurseRow> v;
        for (const auto& [k, r] : rows) v.push_back(r);
        const auto rep = purse_report(v);
        EXPECT_EQ(rep.roc, rep.sip_oc + rep.direct_oc);
        ASSERT_TRUE(rep.ratio.has_value());
        EXPECT_DOUBLE_EQ(*rep.ratio, *rep.pct_diff_traded_value / *rep.pct_diff_trades);
    }
}

TEST(PurseReport, RendersPublishedTotals) {
    PurseRow row;
    row.roc_sip = 19'140'186'544'100;
    row.roc_direct = 1'378'980'852'500;
    row.roc_total = row.roc_sip + row.roc_direct;
    row.trades = 4'745'033'119;
    row.diff_trades = 1'124'814'017;
    row.traded_value = 280'310'029'976'927'500;
    row.diff_traded_value = 70'773'574'626'416'700;
    const auto rep = purse_report({row});
    const auto text = rep.render_text();
    EXPECT_NE(text.find("$2,051,916,739.66"), std::string::npos) << text;
    EXPECT_NE(text.find("$1,914,018,654.41"), std::string::npos);
    EXPECT_NE(text.find("$137,898,085.25"), std::string::npos);
    EXPECT_NE(text.find("4,745,033,119"), std::string::npos);
    EXPECT_NE(text.find("1,124,814,017"), std::string::npos);
    EXPECT_NE(text.find("$28,031,002,997,692.75"), std::string::npos);
    EXPECT_NE(text.find("$7,077,357,462,641.67"), std::string::npos);
    EXPECT_NE(text.find("23.71"), std::string::npos);
    EXPECT_NE(text.find("25.25"), std::string::npos);
    EXPECT_NE(text.find("1.0651"), std::string::npos);
    EXPECT_NE(rep.render_csv().find("10,Ratio of 9 / 8,1.0651\n"), std::string::npos);
}

TEST(PurseReport, AllZeroIsUndefined) {
    const auto rep = purse_report({});
    EXPECT_EQ(rep.roc, 0);
    EXPECT_FALSE(rep.pct_diff_trades.has_value());
    EXPECT_FALSE(rep.ratio.has_value());
    const auto text = rep.render_text("empty");
    EXPECT_NE(text.find("undefined"), std::string::npos);
    EXPECT_NE(rep.render_csv().find("10,Ratio of 9 / 8,\n"), std::string::npos);
}

TEST(PurseCsv, RoundTrip) {
    Rng rng(3);
    testutil::RandomFeedOptions o;
    o.symbols = {"AAA", "BBB"};
    o.events = 5000;
    const auto res = testutil::run_events(testutil::sort_merge({testutil::random_feed(rng, o)}));
    std::vector<PurseRow> rows;
    for (const auto& [k, r] : aggregate_purse_by_symbol(res.records, "2016-01-04")) rows.push_back(r);
    testutil::TempDir dir;
    write_purse_csv(dir.file("p.csv"), rows);
    const auto back = read_purse_csv(dir.file("p.csv"));
    ASSERT_EQ(back.size(), rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(back[i].key, rows[i].key);
        EXPECT_EQ(back[i].roc_total, rows[i].roc_total);
        EXPECT_EQ(back[i].traded_value, rows[i].traded_value);
        EXPECT_EQ(back[i].included_shares, rows[i].included_shares);
        EXPECT_DOUBLE_EQ(back[i].roc_per_share_sum, rows[i].roc_per_share_sum);
    }
}

TEST(PurseCsv, BrokenIdentityRejected) {
    testutil::TempDir dir;
    PurseRow r;
    r.date = "2016-01-04";
    r.key = "AAA";
    r.roc_total = 5;
    r.roc_sip = 1;
    write_purse_csv(dir.file("p.csv"), {r});
    EXPECT_THROW(read_purse_csv(dir.file("p.csv")), FormatError);
}

TEST(CategoryRollup, UnknownSymbolsGoToOther) {
    std::vector<PurseRow> rows(3);
    rows[0].key = "AAA", rows[0].trades = 1;
    rows[1].key = "BBB", rows[1].trades = 2;
    rows[2].key = "ZZZ", rows[2].trades = 4;
    for (auto& r : rows) r.date = "d";
    std::map<Ticker, SymbolMeta> meta;
    meta[Ticker{"AAA"}].category = Category::DOW;
    meta[Ticker{"BBB"}].category = Category::DOW;
    const auto out = rollup_by_category(rows, meta);
    ASSERT_EQ(out.size(), 2u);
    EXPECT_EQ(out[0].key, "DOW");
    EXPECT_EQ(out[0].trades, 3u);
    EXPECT_EQ(out[1].key, "OTHER");
    EXPECT_EQ(out[1].trades, 4u);
}
