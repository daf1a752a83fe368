#ifndef GCSPEC_BOOTSTRAP_HPP
#define GCSPEC_BOOTSTRAP_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "gcspec/parallel.hpp"
#include "gcspec/rng.hpp"
#include "gcspec/spectra.hpp"

namespace gcspec {

enum class LagPolicy { FixedFromData, ReselectPerReplicate };

struct BootstrapConfig {
    int n_boot = 1000;
    double alpha = 0.05;
    // mean geometric block length; defaults to ceil(T^{1/3})
    std::optional<double> expected_block_length;
    std::uint64_t seed = 0;
    LagPolicy lag_policy = LagPolicy::FixedFromData;
    int k_max = 4;
    bool with_intercept = true;
    std::optional<int> grid_M;
    Exec exec = Exec::Parallel;
};

// Outcome of one prominence test. flags compare the observed spectrum
// with the bootstrap quantile of the median causality; bonferroni_flags
// repeat the comparison at per-frequency level 2*alpha/T.
struct TestResult {
    SpectrumResult spectrum;
    double q_upper = 0.0;
    std::optional<double> q_lower;            // difference tests only
    std::vector<std::uint8_t> flags;
    std::vector<std::uint8_t> bonferroni_flags;
    bool overall_significant = false;
    std::vector<double> boot_medians;         // one per surviving replicate
    int n_failed_replicates = 0;
    bool quantile_warning = false;            // Bonferroni quantile under-resolved

    bool operator==(const TestResult&) const = default;
};

// One stationary-bootstrap resample: circular blocks with geometric
// lengths of mean L, uniform start indices.
std::vector<Eigen::Index> stationary_bootstrap_indices(Eigen::Index T, double L, Rng& rng);
Eigen::VectorXd stationary_bootstrap(const Eigen::VectorXd& series, double L, Rng& rng);

// Prominence tests of the causality spectrum against the bootstrap
// distribution of the median causality under independent resampling.
// Failed replicates (singular fits on resampled data) are excluded and
// counted; more than 10% failures aborts with BOOT_REPLICATE_FAILURE.
TestResult test_unconditional(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                              const BootstrapConfig& config);
TestResult test_conditional(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                            const Eigen::VectorXd& w, const BootstrapConfig& config);
TestResult test_difference(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                           const Eigen::VectorXd& w, const BootstrapConfig& config);

// Recomputes the Bonferroni fields of result at per-frequency level
// 2*alpha/T (two-sided tests split alpha/T per tail). Sets
// quantile_warning instead of aborting when the extreme quantile is
// under-resolved (n_boot < 10*T/(2*alpha)).
void overall_bonferroni(TestResult& result, Eigen::Index T, double alpha);

// Order statistic at index ceil(q*n), no interpolation.
double empirical_quantile(std::vector<double> samples, double q);

} // namespace gcspec

#endif
