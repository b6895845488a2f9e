#pragma once

// Ordinary least squares with normal-theory inference, and the log10
// scaling regressions of ROC on market capitalization and trade counts.

#include <Eigen/Dense>
#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dislo/errors.hpp"

namespace dislo::analytics {

/// Least-squares solution via column-pivoted QR, with the unscaled
/// covariance (X'X)^-1. Rank deficiency is reported, never silently fitted.
struct LeastSquares {
    Eigen::VectorXd beta;
    Eigen::VectorXd residuals;
    Eigen::MatrixXd xtx_inv;
    double ssr = 0.0;
    Eigen::Index rank = 0;
    std::vector<Eigen::Index> dependent_columns;  // non-empty iff rank deficient

    bool full_rank() const { return dependent_columns.empty(); }
};

inline LeastSquares least_squares(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    LeastSquares ls;
    const Eigen::Index p = X.cols();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    // Pivots below 1e-10 of the largest count as zero.
    qr.setThreshold(1e-10);
    ls.rank = qr.rank();
    if (ls.rank < p || X.rows() < p) {
        const auto& perm = qr.colsPermutation().indices();
        for (Eigen::Index i = ls.rank; i < p; ++i) ls.dependent_columns.push_back(perm(i));
        if (ls.dependent_columns.empty()) ls.dependent_columns.push_back(p - 1);
        return ls;
    }
    ls.beta = qr.solve(y);
    ls.residuals = y - X * ls.beta;
    ls.ssr = ls.residuals.squaredNorm();
    const Eigen::MatrixXd R = qr.matrixR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd Rinv =
        R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
    const Eigen::MatrixXd inner = Rinv * Rinv.transpose();
    const auto P = qr.colsPermutation();
    ls.xtx_inv = P * inner * P.transpose();
    return ls;
}

struct OlsFit {
    std::vector<std::string> names;
    std::vector<double> coef, se, z, p, ci_low, ci_high;
    double r2 = 0.0;
    double adj_r2 = 0.0;
    std::size_t n = 0;
    std::size_t excluded = 0;  // rows dropped for non-positive logged values
    bool quadratic = false;
    double max_normal_residual = 0.0;  // max |X'(y - X b)|

    std::string summary() const;
};

/// Fits y on X (X must already contain an intercept column if wanted;
/// R^2 is centered). Throws AnalysisError naming collinear columns.
inline OlsFit ols_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::vector<std::string> names) {
    if (X.rows() != y.size()) throw AnalysisError("design and response lengths differ");
    if (static_cast<Eigen::Index>(names.size()) != X.cols()) throw AnalysisError("one name per design column");
    if (X.rows() <= X.cols()) throw AnalysisError("need more observations than parameters");
    const auto ls = least_squares(X, y);
    if (!ls.full_rank()) {
        std::string cols;
        for (auto c : ls.dependent_columns) cols += (cols.empty() ? "" : ", ") + names[static_cast<std::size_t>(c)];
        throw AnalysisError("rank-deficient design; collinear column(s): " + cols);
    }
    OlsFit f;
    f.names = std::move(names);
    f.n = static_cast<std::size_t>(X.rows());
    const auto k = static_cast<double>(X.cols());
    const auto n = static_cast<double>(X.rows());
    const double sigma2 = ls.ssr / (n - k);
    const boost::math::normal_distribution<> stdnorm;
    const double zcrit = boost::math::quantile(stdnorm, 0.975);
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        const double b = ls.beta(j);
        const double s = std::sqrt(std::max(0.0, sigma2 * ls.xtx_inv(j, j)));
        double z = s > 0 ? b / s : (b == 0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), b));
        double pv = std::isfinite(z) ? 2.0 * boost::math::cdf(boost::math::complement(stdnorm, std::fabs(z))) : 0.0;
        f.coef.push_back(b);
        f.se.push_back(s);
        f.z.push_back(z);
        f.p.push_back(pv);
        f.ci_low.push_back(b - zcrit * s);
        f.ci_high.push_back(b + zcrit * s);
    }
    const double ybar = y.mean();
    const double sst = (y.array() - ybar).square().sum();
    f.r2 = sst > 0 ? std::clamp(1.0 - ls.ssr / sst, 0.0, 1.0) : 1.0;
    f.adj_r2 = 1.0 - (1.0 - f.r2) * (n - 1.0) / (n - k);
    f.max_normal_residual = (X.transpose() * ls.residuals).cwiseAbs().maxCoeff();
    return f;
}

struct NamedColumn {
    std::string name;
    std::vector<double> values;  // raw (unlogged)
};

/// log10(response) on an intercept plus log10 of each predictor; with
/// `quadratic`, squared log terms are appended. Rows with any non-positive
/// logged value are excluded and counted.
inline OlsFit ols_fit_log10(const std::vector<NamedColumn>& predictors, const std::vector<double>& response,
                            bool quadratic) {
    const std::size_t rows = response.size();
    for (const auto& c : predictors)
        if (c.values.size() != rows) throw AnalysisError("predictor '" + c.name + "' length mismatch");
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < rows; ++i) {
        bool ok = response[i] > 0;
        for (const auto& c : predictors) ok = ok && c.values[i] > 0;
        if (ok) keep.push_back(i);
    }
    const std::size_t k = 1 + predictors.size() * (quadratic ? 2 : 1);
    Eigen::MatrixXd X(static_cast<Eigen::Index>(keep.size()), static_cast<Eigen::Index>(k));
    Eigen::VectorXd y(static_cast<Eigen::Index>(keep.size()));
    std::vector<std::string> names{"const"};
    for (const auto& c : predictors) names.push_back("log10(" + c.name + ")");
    if (quadratic)
        for (const auto& c : predictors) names.push_back("log10(" + c.name + ")^2");
    for (std::size_t r = 0; r < keep.size(); ++r) {
        const auto i = keep[r];
        const auto row = static_cast<Eigen::Index>(r);
        X(row, 0) = 1.0;
        y(row) = std::log10(response[i]);
        for (std::size_t j = 0; j < predictors.size(); ++j) {
            const double l = std::log10(predictors[j].values[i]);
            X(row, static_cast<Eigen::Index>(1 + j)) = l;
            if (quadratic) X(row, static_cast<Eigen::Index>(1 + predictors.size() + j)) = l * l;
        }
    }
    auto f = ols_fit(X, y, std::move(names));
    f.excluded = rows - keep.size();
    f.quadratic = quadratic;
    return f;
}

inline std::string OlsFit::summary() const {
    std::ostringstream os;
    os << "n=" << n << " excluded=" << excluded << " R-squared=" << r2 << " adj. R-squared=" << adj_r2 << '\n';
    os << "term,coef,std_err,z,p,ci_2.5%,ci_97.5%\n";
    os.precision(10);
    for (std::size_t i = 0; i < names.size(); ++i)
        os << names[i] << ',' << coef[i] << ',' << se[i] << ',' << z[i] << ',' << p[i] << ',' << ci_low[i] << ','
           << ci_high[i] << '\n';
    return os.str();
}

}  // namespace dislo::analytics
