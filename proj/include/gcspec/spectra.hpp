#ifndef GCSPEC_SPECTRA_HPP
#define GCSPEC_SPECTRA_HPP

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "gcspec/parallel.hpp"
#include "gcspec/var.hpp"

namespace gcspec {

// Fourier grid f_i = i/M, i = 1..floor(M/2), in cycles per sample.
struct FrequencyGrid {
    int M = 0;
    std::vector<double> freqs;

    static FrequencyGrid fourier(int M);

    std::size_t size() const { return freqs.size(); }
    double angular(std::size_t i) const;

    bool operator==(const FrequencyGrid&) const = default;
};

enum class SpectrumKind { Unconditional, Conditional, Difference };

struct SpectrumResult {
    FrequencyGrid grid;
    std::vector<double> values;
    SpectrumKind kind = SpectrumKind::Unconditional;

    bool operator==(const SpectrumResult&) const = default;
};

// (I - sum_j A_j e^{-ij w})^{-1}. Throws SPECTRA_SINGULAR_AT_FREQUENCY
// when the reciprocal condition (Hadamard ratio |det|/prod of row
// 1-norms, the measure used throughout this module) falls below 1e-12.
Eigen::MatrixXcd transfer_function(const VarModel& model, double omega);

// Model spectrum h(w) = P(w) Sigma P(w)*, Hermitian PSD.
Eigen::MatrixXcd spectral_matrix(const VarModel& model, double omega);

// Causality of the cause series (column 1) onto the effect series
// (column 0) of a bivariate model at angular frequency w. Nonnegative;
// values below -1e-10 raise SPECTRA_NUMERICAL_INCONSISTENCY, values in
// [-1e-10, 0) clamp to 0.
double unconditional_gc(const VarModel& model, double omega);

// Conditional causality cause -> effect given the conditioning series,
// from the bivariate (effect, conditioning) model and the trivariate
// (effect, cause, conditioning) model. Both models must come from the
// same sample window.
double conditional_gc(const VarModel& model_xw, const VarModel& model_xyw, double omega);

// Grid evaluation is data-parallel over frequencies; results do not
// depend on the evaluation order.
std::vector<double> unconditional_gc_grid(const VarModel& model, const FrequencyGrid& grid,
                                          Exec exec = Exec::Parallel);
std::vector<double> conditional_gc_grid(const VarModel& model_xw, const VarModel& model_xyw,
                                        const FrequencyGrid& grid, Exec exec = Exec::Parallel);

struct Roles {
    std::string effect;
    std::string cause;
    std::optional<std::string> conditioning;
};

struct SpectrumConfig {
    std::optional<int> fixed_k;  // bypass BIC when set
    int k_max = 4;
    bool with_intercept = true;
    std::optional<int> grid_M;   // grid base; defaults to T
    bool difference = false;     // requires a conditioning role
    Exec exec = Exec::Parallel;
};

// Convenience composition: orient columns per roles, select lags (BIC
// unless fixed_k), fit, evaluate over the grid.
SpectrumResult gc_spectrum(const MultiSeries& data, const Roles& roles,
                           const SpectrumConfig& config);

} // namespace gcspec

#endif
