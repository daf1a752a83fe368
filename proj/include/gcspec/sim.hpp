#ifndef GCSPEC_SIM_HPP
#define GCSPEC_SIM_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "gcspec/bootstrap.hpp"

namespace gcspec {

enum class TestFunctional { Unconditional, Conditional, Difference };

// A VAR data-generating process plus Monte Carlo settings.
struct SimDesign {
    std::string name;
    int k = 1;
    std::vector<Eigen::MatrixXd> A;
    Eigen::MatrixXd Sigma;
    Eigen::Index T = 200;
    int n_mc = 100;
    TestFunctional functional = TestFunctional::Unconditional;
    Eigen::Index burn_in = 200;
    bool allow_boundary = false; // unit-root designs for the power-limit study
};

struct SimReport {
    std::string design_name;
    FrequencyGrid grid;
    std::vector<double> rejection_rate;        // share of trials flagged
    std::vector<double> prominence_rate;       // share above the (1-alpha) bootstrap quantile
    std::vector<double> degree_of_prominence;  // share above the bootstrap median
    double overall_bonferroni_rate = 0.0;
    std::uint64_t seed = 0;
    int n_trials_failed = 0;
};

// Gaussian VAR path of length design.T after discarding burn_in samples.
// Columns are named x, y [, w]. Aborts with SIM_EXPLODING_PATH when a
// sample exceeds 1e12 in magnitude.
MultiSeries simulate_var(const SimDesign& design, std::uint64_t seed);

// Monte Carlo study of one design: runs the design's functional test on
// each simulated trial and aggregates the per-frequency rates.
SimReport run_design(const SimDesign& design, const BootstrapConfig& config);

// The built-in catalogue. The first seven entries carry the case_N
// prefix binding them to the jointly-tested rejection rates; the rest
// cover the level, power and conditioning studies.
std::vector<SimDesign> builtin_designs();

} // namespace gcspec

#endif
