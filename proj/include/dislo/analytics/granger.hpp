#pragma once

// Pairwise Granger causality, four tests per lag with a Bonferroni threshold.
//
// For lag L the restricted model regresses y_t on a constant and y_{t-1..t-L};
// the unrestricted model adds x_{t-1..t-L}. With nobs = N - L and
// df = nobs - 2L - 1:
//   SSR F     = ((SSR_r - SSR_u) / L) / (SSR_u / df)        ~ F(L, df)
//   SSR chi2  = nobs (SSR_r - SSR_u) / SSR_u                ~ chi2(L)
//   LR        = nobs ln(SSR_r / SSR_u)                      ~ chi2(L)
//   Wald      = b_x' [s^2 (X'X)^-1]_xx^-1 b_x, s^2 = SSR_u/df ~ chi2(L)

#include <Eigen/Dense>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include "dislo/analytics/descriptive.hpp"
#include "dislo/analytics/ols.hpp"
#include "dislo/errors.hpp"

namespace dislo::analytics {

struct LagTest {
    std::size_t lag = 0;
    bool testable = true;
    double ssr_f = 0, p_ssr_f = 1;
    double ssr_chi2 = 0, p_ssr_chi2 = 1;
    double lr = 0, p_lr = 1;
    double wald = 0, p_wald = 1;

    double max_p() const { return std::max({p_ssr_f, p_ssr_chi2, p_lr, p_wald}); }
};

struct GrangerResult {
    std::string cause;
    std::string effect;
    std::size_t max_lag = 0;
    double alpha = 0.05;
    std::vector<LagTest> lags;
    std::vector<std::size_t> significant_lags;

    double threshold() const { return alpha / static_cast<double>(max_lag); }
    bool significant() const { return !significant_lags.empty(); }
};

namespace detail {

inline double chi2_sf(double x, double df) {
    if (!(x > 0)) return 1.0;
    if (!std::isfinite(x)) return 0.0;
    return boost::math::cdf(boost::math::complement(boost::math::chi_squared_distribution<>(df), x));
}

inline double f_sf(double x, double d1, double d2) {
    if (!(x > 0)) return 1.0;
    if (!std::isfinite(x)) return 0.0;
    return boost::math::cdf(boost::math::complement(boost::math::fisher_f_distribution<>(d1, d2), x));
}

}  // namespace detail

/// One lag of the x -> y test.
inline LagTest granger_lag(std::span<const double> x, std::span<const double> y, std::size_t lag) {
    LagTest t;
    t.lag = lag;
    const std::size_t n = y.size();
    const auto nobs = static_cast<Eigen::Index>(n - lag);
    const auto L = static_cast<Eigen::Index>(lag);
    Eigen::MatrixXd Xr(nobs, 1 + L), Xu(nobs, 1 + 2 * L);
    Eigen::VectorXd yv(nobs);
    for (Eigen::Index r = 0; r < nobs; ++r) {
        const std::size_t tt = lag + static_cast<std::size_t>(r);
        yv(r) = y[tt];
        Xr(r, 0) = Xu(r, 0) = 1.0;
        for (Eigen::Index k = 1; k <= L; ++k) {
            Xr(r, k) = Xu(r, k) = y[tt - static_cast<std::size_t>(k)];
            Xu(r, L + k) = x[tt - static_cast<std::size_t>(k)];
        }
    }
    const double df = static_cast<double>(nobs - (2 * L + 1));
    if (df <= 0) {
        t.testable = false;
        return t;
    }
    const auto rest = least_squares(Xr, yv);
    const auto unre = least_squares(Xu, yv);
    if (!rest.full_rank() || !unre.full_rank() || !(unre.ssr > 0)) {
        t.testable = false;
        return t;
    }
    const double l = static_cast<double>(lag);
    const double dn = static_cast<double>(nobs);
    const double gain = std::max(0.0, rest.ssr - unre.ssr);
    t.ssr_f = (gain / l) / (unre.ssr / df);
    t.p_ssr_f = detail::f_sf(t.ssr_f, l, df);
    t.ssr_chi2 = dn * gain / unre.ssr;
    t.p_ssr_chi2 = detail::chi2_sf(t.ssr_chi2, l);
    t.lr = dn * std::log(rest.ssr / unre.ssr);
    t.p_lr = detail::chi2_sf(t.lr, l);

    const double s2 = unre.ssr / df;
    const Eigen::VectorXd bx = unre.beta.tail(L);
    const Eigen::MatrixXd Vxx = s2 * unre.xtx_inv.bottomRightCorner(L, L);
    const auto ldlt = Vxx.ldlt();
    if (ldlt.info() != Eigen::Success) {
        t.testable = false;
        return t;
    }
    t.wald = bx.dot(ldlt.solve(bx));
    t.p_wald = detail::chi2_sf(t.wald, l);
    return t;
}

/// Does x Granger-cause y? A lag is significant when all four p-values are
/// below alpha / max_lag.
inline GrangerResult granger_tests(const DailySeries& x, const DailySeries& y, std::size_t max_lag = 40,
                                   double alpha = 0.05) {
    if (x.size() != y.size()) throw AnalysisError("granger: series lengths differ");
    if (max_lag == 0) throw AnalysisError("granger: max_lag must be positive");
    if (x.size() < 3 * max_lag)
        throw AnalysisError("granger: need at least " + std::to_string(3 * max_lag) + " points, got " +
                            std::to_string(x.size()));
    const auto xv = x.values();
    const auto yv = y.values();
    GrangerResult g;
    g.cause = x.label;
    g.effect = y.label;
    g.max_lag = max_lag;
    g.alpha = alpha;
    for (std::size_t lag = 1; lag <= max_lag; ++lag) {
        auto t = granger_lag(xv, yv, lag);
        if (t.testable && t.max_p() < g.threshold()) g.significant_lags.push_back(lag);
        g.lags.push_back(t);
    }
    return g;
}

inline std::string granger_csv(const GrangerResult& g) {
    std::string s = "cause,effect,lag,testable,ssr_f,p_ssr_f,ssr_chi2,p_ssr_chi2,lr,p_lr,wald,p_wald,significant\n";
    char buf[512];
    for (const auto& t : g.lags) {
        const bool sig = t.testable && t.max_p() < g.threshold();
        std::snprintf(buf, sizeof buf, "%s,%s,%zu,%d,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%d\n", g.cause.c_str(),
                      g.effect.c_str(), t.lag, t.testable ? 1 : 0, t.ssr_f, t.p_ssr_f, t.ssr_chi2, t.p_ssr_chi2, t.lr,
                      t.p_lr, t.wald, t.p_wald, sig ? 1 : 0);
        s += buf;
    }
    return s;
}

}  // namespace dislo::analytics
