#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>

#include <cmath>
#include <memory>
#include <numbers>

#include "dislo/analytics/descriptive.hpp"
#include "dislo/analytics/dfa.hpp"
#include "dislo/analytics/granger.hpp"
#include "dislo/analytics/histogram.hpp"
#include "dislo/analytics/ols.hpp"
#include "dislo/analytics/rank.hpp"
#include "test_util.hpp"

using namespace dislo;
using namespace dislo::analytics;

namespace {

std::vector<double> gaussian(Rng& rng, std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.normal();
    return v;
}

DailySeries series(const std::string& label, const std::vector<double>& v) {
    DailySeries s;
    s.label = label;
    char buf[16];
    for (std::size_t i = 0; i < v.size(); ++i) {
        std::snprintf(buf, sizeof buf, "d%06zu", i);
        s.points.emplace_back(buf, v[i]);
    }
    return s;
}

DislocationSegment at(std::uint64_t start, std::uint64_t dur = 1000, std::int64_t mag = 100) {
    return DislocationSegment{Ticker{"S"}, Side::BID, Ordering::F1_LESS, Timestamp{start}, Timestamp{start + dur},
                              mag, mag, false};
}

}  // namespace

TEST(ConditionalAverage, Examples) {
    const std::vector<double> f{1, 2, 3};
    const bool all[] = {true, true, true}, none[] = {false, false, false}, some[] = {true, false, true};
    EXPECT_DOUBLE_EQ(*conditional_average(f, all), 2.0);
    EXPECT_FALSE(conditional_average(f, none).has_value());
    EXPECT_DOUBLE_EQ(*conditional_average(f, some), 2.0);
}

TEST(ConditionalAverage, AllEqualsMean) {
    Rng rng(1);
    const auto v = gaussian(rng, 1000);
    std::unique_ptr<bool[]> all(new bool[v.size()]);
    std::fill_n(all.get(), v.size(), true);
    EXPECT_NEAR(*conditional_average(v, std::span<const bool>(all.get(), v.size())), stats::mean(v), 1e-12);
}

TEST(Normalize, Examples) {
    EXPECT_EQ(normalize(std::vector<double>{1, 3}), (std::vector<double>{-1, 1}));
    EXPECT_THROW(normalize(std::vector<double>{2, 2, 2}), AnalysisError);
}

TEST(Normalize, ZeroMeanUnitVariance) {
    Rng rng(2);
    for (int trial = 0; trial < 20; ++trial) {
        auto v = gaussian(rng, 2 + rng.below(500));
        for (auto& x : v) x = 1e3 + 50 * x;
        const auto z = normalize(v);
        EXPECT_LT(std::fabs(stats::mean(z)), 1e-12);
        EXPECT_LT(std::fabs(stats::variance(z, 0) - 1.0), 1e-12);
    }
    const auto s = normalize_series(series("x", {1, 2, 3, 4}));
    EXPECT_EQ(s.label, "x");
    EXPECT_EQ(s.points[0].first, "d000000");
}

TEST(Moments, Examples) {
    EXPECT_DOUBLE_EQ(skew_kurtosis(std::vector<double>{-1, 0, 1}).skew, 0.0);
    EXPECT_THROW(skew_kurtosis(std::vector<double>{1, 1, 1}), AnalysisError);
    Rng rng(3);
    const auto m = skew_kurtosis(gaussian(rng, 100000));
    EXPECT_NEAR(m.skew, 0.0, 0.05);
    EXPECT_NEAR(m.kurtosis, 3.0, 0.1);
}

TEST(Moments, HeavyTailedMixture) {
    Rng rng(4);
    std::vector<double> v;
    for (int i = 0; i < 20000; ++i)
        v.push_back(rng.bernoulli(0.05) ? std::pow(1.0 - rng.uniform(), -1.0 / 2.5) * 5.0 : rng.normal());
    EXPECT_GT(skew_kurtosis(v).kurtosis, 20.0);
}

TEST(Pearson, Examples) {
    Rng rng(5);
    const auto x = gaussian(rng, 100);
    std::vector<double> neg;
    for (double v : x) neg.push_back(-v);
    EXPECT_NEAR(*pearson(x, x), 1.0, 1e-15);
    EXPECT_NEAR(*pearson(x, neg), -1.0, 1e-15);
    EXPECT_FALSE(pearson(x, std::vector<double>(100, 2.0)).has_value());
}

TEST(Pearson, MatrixShapeAndAffineInvariance) {
    Rng rng(6);
    std::vector<DailySeries> s, t;
    for (int k = 0; k < 4; ++k) {
        auto v = gaussian(rng, 300);
        if (k > 0)
            for (std::size_t i = 0; i < v.size(); ++i) v[i] += s[0].points[i].second * 0.5 * k;
        s.push_back(series("s" + std::to_string(k), v));
        for (auto& x : v) x = 3.0 * x + 17.0 * k;
        t.push_back(series("s" + std::to_string(k), v));
    }
    s.push_back(series("flat", std::vector<double>(300, 1.0)));
    t.push_back(s.back());
    const auto m = pearson_matrix(s), n = pearson_matrix(t);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j) {
            ASSERT_EQ(m.r[i][j].has_value(), i != 4 && j != 4);
            if (!m.r[i][j]) continue;
            EXPECT_EQ(m.r[i][j], m.r[j][i]);
            EXPECT_LE(std::fabs(*m.r[i][j]), 1.0);
            EXPECT_NEAR(*m.r[i][j], *n.r[i][j], 1e-12);
            if (i == j) {
                EXPECT_EQ(*m.r[i][j], 1.0);
            }
        }
}

TEST(Pearson, PlantedFactorOrdering) {
    Rng rng(7);
    const std::size_t n = 4000;
    std::vector<double> spex(n), rex(n), dow(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double f = rng.normal();
        spex[i] = 3.0 * f + rng.normal();
        rex[i] = 1.5 * f + rng.normal();
        dow[i] = 0.8 * f + rng.normal();
    }
    const auto m = pearson_matrix({series("SPEXDOW", spex), series("REXSP", rex), series("DOW", dow)});
    EXPECT_GT(*m.r[0][1], *m.r[0][2]);
    EXPECT_GT(*m.r[0][2], *m.r[1][2]);
}

TEST(Dfa, WhiteAndIntegratedNoise) {
    double white = 0, brown = 0;
    const int seeds = 10;
    for (int s = 0; s < seeds; ++s) {
        Rng rng(100 + s);
        auto v = gaussian(rng, 4096);
        white += dfa_exponent(v);
        for (std::size_t i = 1; i < v.size(); ++i) v[i] += v[i - 1];
        brown += dfa_exponent(v);
    }
    EXPECT_NEAR(white / seeds, 0.5, 0.05);
    EXPECT_NEAR(brown / seeds, 1.5, 0.1);
}

TEST(Dfa, DifferencedNoiseIsAntiPersistent) {
    Rng rng(8);
    const auto e = gaussian(rng, 4097);
    std::vector<double> d;
    for (std::size_t i = 1; i < e.size(); ++i) d.push_back(e[i] - e[i - 1]);
    EXPECT_LT(dfa_exponent(d), 0.3);
}

TEST(Dfa, AffineInvariant) {
    Rng rng(9);
    auto v = gaussian(rng, 2000);
    const double a = dfa_exponent(v);
    for (auto& x : v) x = -40.0 * x + 1e4;
    EXPECT_NEAR(dfa_exponent(v), a, 1e-9);
}

TEST(Dfa, BoxSizesAndErrors) {
    const auto b = default_box_sizes(4096);
    EXPECT_EQ(b.front(), 4u);
    EXPECT_EQ(b.back(), 1024u);
    EXPECT_TRUE(std::is_sorted(b.begin(), b.end()));
    EXPECT_EQ(std::adjacent_find(b.begin(), b.end()), b.end());
    Rng rng(10);
    const auto v = gaussian(rng, 100);
    try {
        dfa_exponent(v, {4, 8, 50});
        FAIL();
    } catch (const AnalysisError& e) {
        EXPECT_NE(std::string{e.what()}.find("200"), std::string::npos) << e.what();
    }
    EXPECT_THROW(dfa_exponent(std::vector<double>(8, 1.0)), AnalysisError);
}

TEST(Dfa, FluctuationMatchesDirectFit) {
    // Per-box detrending against an Eigen least-squares line.
    Rng rng(11);
    const auto prof = gaussian(rng, 97);
    const std::size_t box = 12;
    double total = 0;
    std::size_t count = 0;
    for (std::size_t b = 0; b + box <= prof.size(); b += box) {
        Eigen::MatrixXd X(box, 2);
        Eigen::VectorXd y(box);
        for (std::size_t i = 0; i < box; ++i) X(i, 0) = 1, X(i, 1) = static_cast<double>(i), y(i) = prof[b + i];
        const Eigen::VectorXd beta = X.colPivHouseholderQr().solve(y);
        total += (y - X * beta).squaredNorm();
        count += box;
    }
    EXPECT_NEAR(dfa_fluctuation(prof, box), std::sqrt(total / count), 1e-12);
}

TEST(Granger, PlantedDirectionFound) {
    Rng rng(12);
    const std::size_t n = 600;
    std::vector<double> x = gaussian(rng, n), y(n);
    y[0] = rng.normal();
    for (std::size_t t = 1; t < n; ++t) y[t] = 0.8 * x[t - 1] + rng.normal();
    const auto xy = granger_tests(series("x", x), series("y", y));
    const auto yx = granger_tests(series("y", y), series("x", x));
    ASSERT_TRUE(xy.significant());
    EXPECT_EQ(xy.significant_lags.front(), 1u);
    EXPECT_FALSE(yx.significant());
    EXPECT_EQ(xy.lags.size(), 40u);
    EXPECT_DOUBLE_EQ(xy.threshold(), 0.05 / 40);
    for (const auto& t : xy.lags) {
        EXPECT_GE(t.p_ssr_f, 0.0);
        EXPECT_LE(t.p_wald, 1.0);
        // n*g/SSR_u >= n*ln(1 + g/SSR_u)
        EXPECT_GE(t.ssr_chi2, t.lr - 1e-9);
    }
}

TEST(Granger, LagOneStatisticsMatchDirectFormulas) {
    Rng rng(13);
    const std::size_t n = 200;
    const auto x = gaussian(rng, n);
    std::vector<double> y(n);
    for (std::size_t t = 1; t < n; ++t) y[t] = 0.3 * y[t - 1] + 0.2 * x[t - 1] + rng.normal();
    const auto t = granger_lag(x, y, 1);
    // Lag 1: restricted y ~ 1 + y1; unrestricted adds x1.
    Eigen::MatrixXd Xr(n - 1, 2), Xu(n - 1, 3);
    Eigen::VectorXd yy(n - 1);
    for (std::size_t i = 1; i < n; ++i) {
        yy(i - 1) = y[i];
        Xr(i - 1, 0) = Xu(i - 1, 0) = 1;
        Xr(i - 1, 1) = Xu(i - 1, 1) = y[i - 1];
        Xu(i - 1, 2) = x[i - 1];
    }
    const Eigen::VectorXd br = (Xr.transpose() * Xr).ldlt().solve(Xr.transpose() * yy);
    const Eigen::VectorXd bu = (Xu.transpose() * Xu).ldlt().solve(Xu.transpose() * yy);
    const double ssr_r = (yy - Xr * br).squaredNorm(), ssr_u = (yy - Xu * bu).squaredNorm();
    const double df = static_cast<double>(n - 1 - 3);
    const double F = (ssr_r - ssr_u) / (ssr_u / df);
    EXPECT_NEAR(t.ssr_f, F, 1e-8 * F);
    EXPECT_NEAR(t.ssr_chi2, (n - 1) * (ssr_r - ssr_u) / ssr_u, 1e-8);
    EXPECT_NEAR(t.lr, (n - 1) * std::log(ssr_r / ssr_u), 1e-8);
    // With one restriction the Wald statistic is the squared t-statistic, i.e. F.
    EXPECT_NEAR(t.wald, F, 1e-8 * F);
    const boost::math::chi_squared_distribution<> c1(1);
    EXPECT_NEAR(t.p_lr, boost::math::cdf(boost::math::complement(c1, t.lr)), 1e-12);
}

TEST(Granger, AffineRescalingKeepsDecisions) {
    Rng rng(14);
    for (int trial = 0; trial < 5; ++trial) {
        const std::size_t n = 300;
        auto x = gaussian(rng, n);
        std::vector<double> y(n);
        for (std::size_t t = 2; t < n; ++t) y[t] = 0.25 * x[t - 2] + rng.normal();
        const auto base = granger_tests(series("x", x), series("y", y), 10);
        for (auto& v : x) v = 1e3 * v - 7;
        for (auto& v : y) v = -0.01 * v + 3;
        const auto scaled = granger_tests(series("x", x), series("y", y), 10);
        EXPECT_EQ(base.significant_lags, scaled.significant_lags);
        for (std::size_t l = 0; l < 10; ++l)
            EXPECT_NEAR(base.lags[l].ssr_f, scaled.lags[l].ssr_f, 1e-6 * (1 + base.lags[l].ssr_f));
    }
}

TEST(Granger, DegenerateInputs) {
    Rng rng(15);
    const auto y = gaussian(rng, 150);
    const auto g = granger_tests(series("c", std::vector<double>(150, 4.0)), series("y", y), 5);
    for (const auto& t : g.lags) EXPECT_FALSE(t.testable);
    EXPECT_FALSE(g.significant());
    try {
        granger_tests(series("a", y), series("b", y), 60);
        FAIL();
    } catch (const AnalysisError& e) {
        EXPECT_NE(std::string{e.what()}.find("180"), std::string::npos);
    }
    const auto csv = granger_csv(g);
    EXPECT_EQ(csv.substr(0, csv.find('\n')),
              "cause,effect,lag,testable,ssr_f,p_ssr_f,ssr_chi2,p_ssr_chi2,lr,p_lr,wald,p_wald,significant");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 6);
}

TEST(Granger, SpexdowDrivesBoth) {
    int forward = 0, reverse = 0;
    const int seeds = 20;
    for (int s = 0; s < seeds; ++s) {
        Rng rng(500 + s);
        const std::size_t n = 600;
        const auto spex = gaussian(rng, n);
        std::vector<double> dow(n), rex(n);
        for (std::size_t t = 0; t < n; ++t) {
            dow[t] = (t >= 1 ? 0.6 * spex[t - 1] : 0) + rng.normal();
            rex[t] = (t >= 2 ? 0.6 * spex[t - 2] : 0) + rng.normal();
        }
        const auto S = series("SPEXDOW", spex), D = series("DOW", dow), R = series("REXSP", rex);
        forward += granger_tests(S, D).significant() && granger_tests(S, R).significant();
        reverse += granger_tests(D, S).significant() || granger_tests(R, S).significant();
    }
    EXPECT_GE(forward, 19);
    EXPECT_LE(reverse, 1);
}

TEST(Ols, NoiselessLine) {
    Eigen::MatrixXd X(50, 2);
    Eigen::VectorXd y(50);
    for (int i = 0; i < 50; ++i) X(i, 0) = 1, X(i, 1) = 0.1 * i, y(i) = 1.0 + 0.5 * X(i, 1);
    const auto f = ols_fit(X, y, {"const", "x"});
    EXPECT_NEAR(f.coef[0], 1.0, 1e-9);
    EXPECT_NEAR(f.coef[1], 0.5, 1e-9);
    EXPECT_NEAR(f.r2, 1.0, 1e-9);
    EXPECT_LT(f.max_normal_residual, 1e-8);
}

TEST(Ols, NoisyCoverage) {
    int covered = 0;
    const int seeds = 100;
    for (int s = 0; s < seeds; ++s) {
        Rng rng(700 + s);
        const std::size_t n = 2884;
        std::vector<double> mc(n), roc(n);
        for (std::size_t i = 0; i < n; ++i) {
            mc[i] = std::pow(10.0, 8 + 4 * rng.uniform());
            roc[i] = std::pow(10.0, -2.0 + 0.6 * std::log10(mc[i]) + 0.3 * rng.normal());
        }
        const auto f = ols_fit_log10({{"market_cap", mc}}, roc, false);
        covered += std::fabs(f.coef[0] + 2.0) < 3 * f.se[0] && std::fabs(f.coef[1] - 0.6) < 3 * f.se[1];
        EXPECT_LT(f.max_normal_residual, 1e-8);
        EXPECT_GE(f.r2, 0.0);
        EXPECT_LE(f.r2, 1.0);
    }
    EXPECT_GE(covered, 95);
}

TEST(Ols, DuplicateColumnIsNamed) {
    Rng rng(16);
    std::vector<double> a(100), r(100);
    for (std::size_t i = 0; i < 100; ++i) a[i] = 1 + rng.uniform() * 100, r[i] = 1 + rng.uniform();
    try {
        ols_fit_log10({{"market_cap", a}, {"market_cap_copy", a}}, r, false);
        FAIL();
    } catch (const AnalysisError& e) {
        EXPECT_NE(std::string{e.what()}.find("market_cap"), std::string::npos) << e.what();
    }
}

TEST(Ols, NonPositiveRowsExcludedAndCounted) {
    std::vector<double> x{1, 10, 100, 1000, 0, 10000}, y{2, 20, 200, 2000, 5, -1};
    const auto f = ols_fit_log10({{"x", x}}, y, false);
    EXPECT_EQ(f.n, 4u);
    EXPECT_EQ(f.excluded, 2u);
    EXPECT_NEAR(f.coef[1], 1.0, 1e-12);
    EXPECT_NEAR(f.coef[0], std::log10(2.0), 1e-12);
    EXPECT_NE(f.summary().find("log10(x)"), std::string::npos);
}

TEST(Histogram, StartTimeExamples) {
    const std::uint64_t day = kNanosPerDay;
    const auto h = start_time_histogram({at(kRegularOpenNs), at(day + kRegularOpenNs + 301 * kNanosPerSecond),
                                         at(kRegularOpenNs - 1), at(kRegularOpenNs + kRegularSessionNs)},
                                        300 * kNanosPerSecond);
    EXPECT_EQ(h.counts.size(), 78u);
    EXPECT_EQ(h.counts[0], 1u);
    EXPECT_EQ(h.counts[1], 1u);
    EXPECT_EQ(h.underflow, 1u);
    EXPECT_EQ(h.overflow, 1u);
    EXPECT_EQ(h.total() + h.underflow + h.overflow, 4u);
    EXPECT_THROW(start_time_histogram({}, 7 * kNanosPerSecond), AnalysisError);
}

TEST(Histogram, UniformStartsLookFlat) {
    Rng rng(17);
    std::vector<DislocationSegment> v;
    for (int i = 0; i < 50000; ++i) v.push_back(at(kRegularOpenNs + rng.below(kRegularSessionNs)));
    const auto h = start_time_histogram(v, 300 * kNanosPerSecond);
    const double expect = 50000.0 / h.counts.size();
    double chi2 = 0;
    for (auto c : h.counts) chi2 += (c - expect) * (c - expect) / expect;
    const boost::math::chi_squared_distribution<> dist(static_cast<double>(h.counts.size() - 1));
    EXPECT_LT(chi2, boost::math::quantile(dist, 0.99));
}

TEST(Histogram, DurationBinning) {
    const auto d = static_cast<std::uint64_t>(std::llround(std::pow(10.0, -3.5) * 1e9));
    auto h = duration_histogram({at(0, d)});
    // Edges run from 1e-7 s; [-4, -3) is the fourth bin.
    EXPECT_EQ(h.counts[3], 1u);
    EXPECT_DOUBLE_EQ(h.edges[3], -4.0);
    h = duration_histogram({at(0, 1'000'000), at(5, 1'000'000), at(9, 1'000'000)});  // exactly 1e-3 s
    EXPECT_EQ(h.counts[4], 3u);
    EXPECT_EQ(h.total(), 3u);
    h = duration_histogram({at(0, 0), at(1, 5), at(2, 1000)});
    EXPECT_EQ(h.excluded, 1u);
    EXPECT_EQ(h.underflow, 1u);
    EXPECT_EQ(h.total() + h.excluded + h.underflow + h.overflow, 3u);
}

TEST(Histogram, CountsSumToInput) {
    Rng rng(18);
    std::vector<DislocationSegment> v;
    for (int i = 0; i < 5000; ++i)
        v.push_back(at(rng.below(2 * kNanosPerDay), rng.bernoulli(0.01) ? 0 : rng.below(100 * kNanosPerSecond)));
    const auto d = duration_histogram(v, -7, 5, 4);
    EXPECT_EQ(d.total() + d.excluded + d.underflow + d.overflow, v.size());
    const auto s = start_time_histogram(v, 60 * kNanosPerSecond);
    EXPECT_EQ(s.total() + s.underflow + s.overflow, v.size());
}

TEST(CirclePlot, Examples) {
    const auto r = circleplot_export({at(kRegularOpenNs + kRegularSessionNs / 2, 2 * kNanosPerSecond, 300)});
    ASSERT_EQ(r.size(), 1u);
    EXPECT_NEAR(r[0].angle, std::numbers::pi, 1e-12);
    EXPECT_DOUBLE_EQ(r[0].radius, 0.03);
    EXPECT_DOUBLE_EQ(r[0].weight, 2.0);
    EXPECT_EQ(circleplot_csv({}), "angle_rad,radius_usd,weight_s\n");
}

TEST(CirclePlot, AnglesInvertToStartTimes) {
    Rng rng(19);
    std::vector<DislocationSegment> v;
    for (int i = 0; i < 1000; ++i) v.push_back(at(3 * kNanosPerDay + kRegularOpenNs + rng.below(kRegularSessionNs)));
    const auto r = circleplot_export(v);
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double back = r[i].angle / (2 * std::numbers::pi) * kRegularSessionNs + kRegularOpenNs;
        EXPECT_NEAR(back, static_cast<double>(v[i].start_ts.ns % kNanosPerDay), 1e-3);
    }
}

TEST(Rank, Examples) {
    std::vector<PurseRow> rows(4);
    const char* keys[] = {"CCC", "AAA", "BBB", "ABC"};
    const std::int64_t roc[] = {10000, 30000, 20000, 20000};
    for (int i = 0; i < 4; ++i) rows[i].key = keys[i], rows[i].roc_sip = rows[i].roc_total = roc[i];
    std::map<Ticker, SymbolMeta> meta;
    meta[Ticker{"AAA"}].category = Category::DOW;
    const auto r = rank_by(rows, RankMetric::ROC_TOTAL, 3, 2, meta);
    ASSERT_EQ(r.top.size(), 3u);
    EXPECT_EQ(r.top[0].ticker, "AAA");
    EXPECT_EQ(r.top[0].category, "DOW");
    EXPECT_EQ(r.top[1].ticker, "ABC");  // tie broken by ticker
    EXPECT_EQ(r.top[2].ticker, "BBB");
    EXPECT_EQ(r.top[2].category, "OTHER");
    EXPECT_EQ(r.bottom.back().ticker, "CCC");
    EXPECT_EQ(r.bottom.back().rank, 4u);
    EXPECT_DOUBLE_EQ(r.top[0].value, 3.0);
    EXPECT_EQ(ranking_csv(r).substr(0, 37), "list,rank,ticker,category,roc_total\nt");
    EXPECT_THROW(parse_rank_metric("roc"), AnalysisError);
    EXPECT_EQ(parse_rank_metric("roc_per_share"), RankMetric::ROC_PER_SHARE);
}

TEST(Rank, SumsAcrossDates) {
    std::vector<PurseRow> rows(3);
    rows[0].key = "A", rows[0].date = "d1", rows[0].roc_total = rows[0].roc_sip = 5;
    rows[1].key = "B", rows[1].date = "d1", rows[1].roc_total = rows[1].roc_sip = 8;
    rows[2].key = "A", rows[2].date = "d2", rows[2].roc_total = rows[2].roc_sip = 5;
    const auto r = rank_by(rows, RankMetric::ROC_TOTAL, 5, 0);
    ASSERT_EQ(r.top.size(), 2u);
    EXPECT_EQ(r.top[0].ticker, "A");
    EXPECT_TRUE(r.bottom.empty());
}
