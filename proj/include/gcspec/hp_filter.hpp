#ifndef GCSPEC_HP_FILTER_HPP
#define GCSPEC_HP_FILTER_HPP

#include <Eigen/Dense>

#include "gcspec/errors.hpp"

namespace gcspec {

struct HpDecomposition {
    Eigen::VectorXd trend;
    Eigen::VectorXd cycle;
    double lambda = 0.0;
};

// Penalized least-squares trend: solves (I + lambda D'D) tau = y with D
// the second-difference operator, via a banded Cholesky factorization
// (bandwidth 2). trend + cycle reproduces the input exactly.
HpDecomposition hp_filter(const Eigen::VectorXd& series, double lambda = 1600.0);

} // namespace gcspec

#endif
