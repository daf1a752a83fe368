#include "gcspec/var.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace gcspec {

namespace {

constexpr double kRcondFloor = 1e-12;

// Lagged regressor matrix for response rows t_start..T-1: row t holds
// [Z_{t-1}, ..., Z_{t-k}] and an optional leading intercept column.
Eigen::MatrixXd build_regressors(const Eigen::MatrixXd& values, int k,
                                 bool with_intercept, Eigen::Index t_start)
{
    const Eigen::Index T = values.rows();
    const Eigen::Index p = values.cols();
    const Eigen::Index rows = T - t_start;
    const Eigen::Index cols = (with_intercept ? 1 : 0) + p * k;

    Eigen::MatrixXd X(rows, cols);
    Eigen::Index col = 0;
    if (with_intercept) {
        X.col(0).setOnes();
        col = 1;
    }
    for (int lag = 1; lag <= k; ++lag)
        for (Eigen::Index j = 0; j < p; ++j, ++col)
            for (Eigen::Index r = 0; r < rows; ++r)
                X(r, col) = values(t_start + r - lag, j);
    return X;
}

struct LsqFit {
    Eigen::MatrixXd beta;      // cols x p, one column of coefficients per equation
    Eigen::MatrixXd residuals; // rows x p
};

// Normal equations through a symmetric eigendecomposition of the Gram
// matrix (rank-revealing); declares singularity below rcond 1e-12.
LsqFit solve_least_squares(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                           bool has_intercept)
{
    const Eigen::Index n_reg = X.cols();

    for (Eigen::Index j = has_intercept ? 1 : 0; j < n_reg; ++j) {
        const double spread = X.col(j).maxCoeff() - X.col(j).minCoeff();
        if (spread == 0.0)
            fail("VAR_SINGULAR_REGRESSORS",
                 "lagged regressor column " + std::to_string(j) + " is constant");
    }

    const Eigen::MatrixXd gram = X.transpose() * X;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    const Eigen::VectorXd lambda = eig.eigenvalues();
    const double lmax = lambda(n_reg - 1);
    const double lmin = lambda(0);
    if (!(lmax > 0.0) || lmin / lmax < kRcondFloor)
        fail("VAR_SINGULAR_REGRESSORS",
             "regressor Gram matrix is numerically singular (rcond "
             + std::to_string(lmax > 0.0 ? lmin / lmax : 0.0) + ")");

    const Eigen::MatrixXd xty = X.transpose() * Y;
    LsqFit fit;
    fit.beta = eig.eigenvectors() *
               lambda.cwiseInverse().asDiagonal() *
               (eig.eigenvectors().transpose() * xty);
    fit.residuals = Y - X * fit.beta;
    return fit;
}

VarModel fit_var_window(const MultiSeries& data, int k, bool with_intercept,
                        Eigen::Index t_start)
{
    const Eigen::Index T = data.length();
    const Eigen::Index p = data.width();
    if (k < 1) fail("VAR_BAD_ORDER", "lag order must be >= 1");
    if (T - t_start <= p * k + 1)
        fail("VAR_INSUFFICIENT_DATA",
             "need T - k > p*k + 1 observations, have T = " + std::to_string(T)
             + ", k = " + std::to_string(k));

    const Eigen::MatrixXd X = build_regressors(data.values, k, with_intercept, t_start);
    const Eigen::MatrixXd Y = data.values.bottomRows(T - t_start);
    const LsqFit fit = solve_least_squares(X, Y, with_intercept);

    VarModel model;
    model.k = k;
    model.T_effective = T - t_start;
    model.T_source = T;
    model.residuals = fit.residuals;
    model.Sigma = fit.residuals.transpose() * fit.residuals
                  / static_cast<double>(model.T_effective);
    model.Sigma = ((model.Sigma + model.Sigma.transpose()) / 2.0).eval();

    Eigen::Index row = 0;
    if (with_intercept) {
        model.intercept = fit.beta.row(0).transpose();
        row = 1;
    }
    model.A.reserve(k);
    for (int lag = 0; lag < k; ++lag, row += p)
        model.A.push_back(fit.beta.middleRows(row, p).transpose());
    return model;
}

} // namespace

VarModel fit_var(const MultiSeries& data, int k, bool with_intercept)
{
    return fit_var_window(data, k, with_intercept, k);
}

LagSelection select_lag_bic(const MultiSeries& data, int k_max, bool with_intercept)
{
    if (k_max < 1) fail("VAR_BAD_ORDER", "k_max must be >= 1");
    const Eigen::Index p = data.width();

    LagSelection sel;
    sel.k_max = k_max;
    double best = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= k_max; ++k) {
        const VarModel model = fit_var_window(data, k, with_intercept, k_max);
        const double t_eff = static_cast<double>(model.T_effective);

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(model.Sigma);
        if (eig.eigenvalues()(0) <= 0.0)
            fail("VAR_DEGENERATE_COVARIANCE",
                 "residual covariance is singular at k = " + std::to_string(k));
        const double log_det = eig.eigenvalues().array().log().sum();

        const double n_params = static_cast<double>(p) * p * k
                                + (with_intercept ? static_cast<double>(p) : 0.0);
        const double bic = t_eff * log_det + n_params * std::log(t_eff);
        sel.bic_values[k] = bic;
        if (bic < best) {
            best = bic;
            sel.chosen_k = k;
        }
    }
    return sel;
}

CompanionRoots companion_roots(const std::vector<Eigen::MatrixXd>& A)
{
    const int k = static_cast<int>(A.size());
    const Eigen::Index p = A.front().rows();
    const Eigen::Index n = p * k;

    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < k; ++j)
        companion.block(0, j * p, p, p) = A[j];
    if (k > 1)
        companion.block(p, 0, n - p, n - p).setIdentity();

    Eigen::EigenSolver<Eigen::MatrixXd> eig(companion, /*computeEigenvectors=*/false);

    CompanionRoots roots;
    roots.moduli.resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i)
        roots.moduli[static_cast<std::size_t>(i)] = std::abs(eig.eigenvalues()(i));
    std::sort(roots.moduli.begin(), roots.moduli.end(), std::greater<double>());
    roots.stationary = roots.moduli.front() < 1.0 - 1e-8;
    return roots;
}

CompanionRoots companion_roots(const VarModel& model)
{
    return companion_roots(model.A);
}

Eigen::MatrixXd Autocovariance::at(int lag) const
{
    Eigen::MatrixXd out = R0;
    for (int i = 0; i < lag; ++i) out = A1 * out;
    return out;
}

Autocovariance autocovariance_var1(const VarModel& model)
{
    if (model.k != 1)
        fail("VAR_NOT_VAR1", "autocovariance recursion requires k = 1, model has k = "
             + std::to_string(model.k));
    if (!companion_roots(model).stationary)
        fail("VAR_NON_STATIONARY", "autocovariance requires a stationary model");

    const Eigen::MatrixXd& A1 = model.A.front();
    const Eigen::Index p = A1.rows();
    const Eigen::Index n = p * p;

    // column-major vec: (A (x) A)_{(i + j*p),(r + s*p)} = A(i,r) * A(j,s)
    Eigen::MatrixXd kron(n, n);
    for (Eigen::Index j = 0; j < p; ++j)
        for (Eigen::Index i = 0; i < p; ++i)
            for (Eigen::Index s = 0; s < p; ++s)
                for (Eigen::Index r = 0; r < p; ++r)
                    kron(i + j * p, r + s * p) = A1(j, s) * A1(i, r);

    const Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(n, n) - kron;
    const Eigen::VectorXd vec_sigma =
        Eigen::Map<const Eigen::VectorXd>(model.Sigma.data(), n);
    const Eigen::VectorXd vec_r0 = lhs.partialPivLu().solve(vec_sigma);

    Autocovariance cov;
    cov.A1 = A1;
    cov.R0 = Eigen::Map<const Eigen::MatrixXd>(vec_r0.data(), p, p);
    cov.R0 = ((cov.R0 + cov.R0.transpose()) / 2.0).eval();
    return cov;
}

} // namespace gcspec
