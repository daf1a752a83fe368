#include "gcspec/hp_filter.hpp"

#include <cmath>

namespace gcspec {

HpDecomposition hp_filter(const Eigen::VectorXd& series, double lambda)
{
    const Eigen::Index T = series.size();
    if (T < 4) fail("FILTER_TOO_SHORT", "HP filter needs at least 4 observations");
    if (!(lambda > 0.0)) fail("FILTER_BAD_LAMBDA", "lambda must be positive");
    if (!series.allFinite()) fail("SERIES_NON_FINITE", "HP filter input must be finite");

    // Rows of I + lambda D'D, stored as diagonals: the matrix is
    // pentadiagonal, symmetric positive definite.
    Eigen::MatrixXd band = Eigen::MatrixXd::Zero(T, 3); // band(i, d) = M(i, i+d)
    for (Eigen::Index i = 0; i < T; ++i) {
        const Eigen::Index lo = std::max<Eigen::Index>(0, i - 2);
        const Eigen::Index hi = std::min<Eigen::Index>(T - 3, i);
        // D'D row i: sum over second-difference rows touching i
        double d0 = 0.0, d1 = 0.0, d2 = 0.0;
        for (Eigen::Index r = lo; r <= hi; ++r) {
            const auto coeff = [&](Eigen::Index col) -> double {
                const Eigen::Index off = col - r;
                if (off == 0 || off == 2) return 1.0;
                if (off == 1) return -2.0;
                return 0.0;
            };
            d0 += coeff(i) * coeff(i);
            if (i + 1 < T) d1 += coeff(i) * coeff(i + 1);
            if (i + 2 < T) d2 += coeff(i) * coeff(i + 2);
        }
        band(i, 0) = 1.0 + lambda * d0;
        band(i, 1) = lambda * d1;
        band(i, 2) = lambda * d2;
    }

    // Banded Cholesky M = L L', bandwidth 2; chol(i, d) = L(i+d, i).
    Eigen::MatrixXd chol = Eigen::MatrixXd::Zero(T, 3);
    for (Eigen::Index i = 0; i < T; ++i) {
        double diag = band(i, 0);
        if (i >= 1) diag -= chol(i - 1, 1) * chol(i - 1, 1);
        if (i >= 2) diag -= chol(i - 2, 2) * chol(i - 2, 2);
        chol(i, 0) = std::sqrt(diag);
        if (i + 1 < T) {
            double v = band(i, 1);
            if (i >= 1) v -= chol(i - 1, 1) * chol(i - 1, 2);
            chol(i, 1) = v / chol(i, 0);
        }
        if (i + 2 < T)
            chol(i, 2) = band(i, 2) / chol(i, 0);
    }

    // forward then backward substitution
    Eigen::VectorXd z(T);
    for (Eigen::Index i = 0; i < T; ++i) {
        double v = series(i);
        if (i >= 1) v -= chol(i - 1, 1) * z(i - 1);
        if (i >= 2) v -= chol(i - 2, 2) * z(i - 2);
        z(i) = v / chol(i, 0);
    }
    Eigen::VectorXd trend(T);
    for (Eigen::Index i = T - 1; i >= 0; --i) {
        double v = z(i);
        if (i + 1 < T) v -= chol(i, 1) * trend(i + 1);
        if (i + 2 < T) v -= chol(i, 2) * trend(i + 2);
        trend(i) = v / chol(i, 0);
    }

    HpDecomposition out;
    out.lambda = lambda;
    out.cycle = series - trend;
    out.trend = std::move(trend);
    return out;
}

} // namespace gcspec
