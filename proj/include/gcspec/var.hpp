#ifndef GCSPEC_VAR_HPP
#define GCSPEC_VAR_HPP

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <vector>

#include "gcspec/series.hpp"

namespace gcspec {

// Fitted VAR(k): Z_t = c + A_1 Z_{t-1} + ... + A_k Z_{t-k} + e_t.
struct VarModel {
    int k = 0;                          // lag order
    std::vector<Eigen::MatrixXd> A;     // k coefficient matrices, p x p
    std::optional<Eigen::VectorXd> intercept;
    Eigen::MatrixXd Sigma;              // residual covariance, divisor T_effective
    Eigen::MatrixXd residuals;          // T_effective x p
    Eigen::Index T_effective = 0;
    Eigen::Index T_source = 0;          // length of the series the model was fitted on

    Eigen::Index dimension() const { return Sigma.rows(); }
};

struct LagSelection {
    int chosen_k = 0;
    std::map<int, double> bic_values;
    int k_max = 0;
};

struct CompanionRoots {
    std::vector<double> moduli; // descending
    bool stationary = false;    // largest modulus < 1 - 1e-8
};

// Lag-0 covariance of a stationary VAR(1) plus the lag recursion R_k = A^k R_0.
struct Autocovariance {
    Eigen::MatrixXd R0;
    Eigen::MatrixXd A1;

    Eigen::MatrixXd at(int lag) const;
};

// Equationwise least squares on the common lagged regressor matrix.
// Residual covariance uses divisor T - k. Throws VAR_INSUFFICIENT_DATA
// if T - k <= p*k + 1 and VAR_SINGULAR_REGRESSORS if the regressor Gram
// matrix has reciprocal condition below 1e-12 (or a lagged regressor
// column is constant).
VarModel fit_var(const MultiSeries& data, int k, bool with_intercept);

// BIC = T_eff * ln det(Sigma_k) + n_params * ln(T_eff), all candidates
// fitted on the common effective window of the k_max-lag model so the
// scores are comparable. Ties break toward smaller k.
LagSelection select_lag_bic(const MultiSeries& data, int k_max, bool with_intercept);

// Eigenvalue moduli of the companion matrix, descending.
CompanionRoots companion_roots(const std::vector<Eigen::MatrixXd>& A);
CompanionRoots companion_roots(const VarModel& model);

// vec(R0) = (I - A1 (x) A1)^{-1} vec(Sigma); requires k = 1 and a
// stationary model.
Autocovariance autocovariance_var1(const VarModel& model);

} // namespace gcspec

#endif
