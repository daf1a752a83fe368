#include "gcspec/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gcspec {

namespace {

enum class Functional { Unconditional, Conditional, Difference };

double median_of(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void validate(const BootstrapConfig& config, Eigen::Index T, double L)
{
    if (!(config.alpha > 0.0 && config.alpha < 1.0))
        fail("BOOT_BAD_CONFIG", "alpha must lie in (0, 1)");
    if (config.n_boot < 100)
        fail("BOOT_BAD_CONFIG", "n_boot must be at least 100");
    if (L < 1.0)
        fail("BOOT_BAD_CONFIG", "expected block length must be >= 1");
    if (T < 2)
        fail("BOOT_BAD_CONFIG", "series too short to resample");
}

double default_block_length(Eigen::Index T)
{
    return std::ceil(std::cbrt(static_cast<double>(T)));
}

void check_not_duplicated(const Eigen::VectorXd& cause, const Eigen::VectorXd& cond)
{
    const Eigen::VectorXd a = cause.array() - cause.mean();
    const Eigen::VectorXd b = cond.array() - cond.mean();
    const double denom = a.norm() * b.norm();
    if (denom == 0.0) return; // constant columns surface as fit errors
    if (std::abs(a.dot(b)) / denom > 1.0 - 1e-12)
        fail("SPECTRA_DEGENERATE_COVARIANCE",
             "conditioning series duplicates the cause series");
}

MultiSeries panel_from(std::initializer_list<const Eigen::VectorXd*> cols,
                       std::vector<std::string> names)
{
    Eigen::MatrixXd m((*cols.begin())->size(), static_cast<Eigen::Index>(cols.size()));
    Eigen::Index j = 0;
    for (const auto* c : cols) m.col(j++) = *c;
    return MultiSeries(std::move(names), std::move(m));
}

struct EngineInput {
    Functional functional;
    Eigen::MatrixXd columns; // oriented: effect, cause [, conditioning]
};

// Lags chosen on the observed data, reused verbatim under
// LagPolicy::FixedFromData.
struct ChosenLags {
    int k_xy = 0;
    int k_xw = 0;
    int k_xyw = 0;
};

struct SpectrumSet {
    std::vector<double> values;
};

MultiSeries subpanel(const Eigen::MatrixXd& cols, std::initializer_list<Eigen::Index> which,
                     std::vector<std::string> names)
{
    Eigen::MatrixXd m(cols.rows(), static_cast<Eigen::Index>(which.size()));
    Eigen::Index j = 0;
    for (const Eigen::Index c : which) m.col(j++) = cols.col(c);
    return MultiSeries(std::move(names), std::move(m));
}

int lag_for(const MultiSeries& panel, std::optional<int> fixed, const BootstrapConfig& config)
{
    if (fixed) return *fixed;
    return select_lag_bic(panel, config.k_max, config.with_intercept).chosen_k;
}

// Evaluates the requested functional on one panel. fixed lags are used
// when given; otherwise BIC reselects per model.
std::vector<double> evaluate_panel(const Eigen::MatrixXd& cols, Functional functional,
                                   const FrequencyGrid& grid, const BootstrapConfig& config,
                                   const std::optional<ChosenLags>& fixed, ChosenLags* chosen)
{
    ChosenLags lags;
    std::vector<double> values;

    if (functional == Functional::Unconditional || functional == Functional::Difference) {
        const MultiSeries xy = subpanel(cols, {0, 1}, {"x", "y"});
        lags.k_xy = lag_for(xy, fixed ? std::optional<int>(fixed->k_xy) : std::nullopt, config);
        const VarModel model = fit_var(xy, lags.k_xy, config.with_intercept);
        values = unconditional_gc_grid(model, grid, config.exec);
        if (functional == Functional::Unconditional) {
            if (chosen) *chosen = lags;
            return values;
        }
    }

    const MultiSeries xw = subpanel(cols, {0, 2}, {"x", "w"});
    const MultiSeries xyw = subpanel(cols, {0, 1, 2}, {"x", "y", "w"});
    lags.k_xw = lag_for(xw, fixed ? std::optional<int>(fixed->k_xw) : std::nullopt, config);
    lags.k_xyw = lag_for(xyw, fixed ? std::optional<int>(fixed->k_xyw) : std::nullopt, config);
    const VarModel model_xw = fit_var(xw, lags.k_xw, config.with_intercept);
    const VarModel model_xyw = fit_var(xyw, lags.k_xyw, config.with_intercept);
    const std::vector<double> cond = conditional_gc_grid(model_xw, model_xyw, grid, config.exec);

    if (functional == Functional::Conditional) {
        if (chosen) *chosen = lags;
        return cond;
    }

    for (std::size_t i = 0; i < values.size(); ++i) values[i] -= cond[i];
    if (chosen) *chosen = lags;
    return values;
}

TestResult run_test(const EngineInput& input, const BootstrapConfig& config)
{
    const Eigen::Index T = input.columns.rows();
    const Eigen::Index n_cols = input.columns.cols();
    const double L = config.expected_block_length.value_or(default_block_length(T));
    validate(config, T, L);

    const FrequencyGrid grid = FrequencyGrid::fourier(config.grid_M.value_or(static_cast<int>(T)));

    ChosenLags data_lags;
    TestResult result;
    result.spectrum.grid = grid;
    result.spectrum.kind = input.functional == Functional::Unconditional
                               ? SpectrumKind::Unconditional
                               : (input.functional == Functional::Conditional
                                      ? SpectrumKind::Conditional
                                      : SpectrumKind::Difference);
    result.spectrum.values =
        evaluate_panel(input.columns, input.functional, grid, config, std::nullopt, &data_lags);

    const std::optional<ChosenLags> fixed =
        config.lag_policy == LagPolicy::FixedFromData ? std::optional<ChosenLags>(data_lags)
                                                      : std::nullopt;

    // Replicates are independent work units keyed by (seed, index); the
    // results land in index slots so any schedule gives the same output.
    const std::size_t n_boot = static_cast<std::size_t>(config.n_boot);
    std::vector<double> medians(n_boot);
    std::vector<std::uint8_t> failed(n_boot, 0);

    parallel_for(n_boot, config.exec, [&](std::size_t r) {
        Rng rng(substream_seed(config.seed, r));
        Eigen::MatrixXd resampled(T, n_cols);
        for (Eigen::Index c = 0; c < n_cols; ++c)
            resampled.col(c) = stationary_bootstrap(input.columns.col(c), L, rng);
        try {
            const std::vector<double> values =
                evaluate_panel(resampled, input.functional, grid, config, fixed, nullptr);
            medians[r] = median_of(values);
        } catch (const Error&) {
            failed[r] = 1;
        }
    });

    std::vector<double> surviving;
    surviving.reserve(n_boot);
    for (std::size_t r = 0; r < n_boot; ++r)
        if (!failed[r]) surviving.push_back(medians[r]);
    result.n_failed_replicates = static_cast<int>(n_boot - surviving.size());
    if (result.n_failed_replicates * 10 > config.n_boot)
        fail("BOOT_REPLICATE_FAILURE",
             std::to_string(result.n_failed_replicates) + " of "
             + std::to_string(config.n_boot) + " bootstrap replicates failed");
    result.boot_medians = std::move(surviving);

    const bool two_sided = input.functional == Functional::Difference;
    if (two_sided) {
        result.q_lower = empirical_quantile(result.boot_medians, config.alpha / 2.0);
        result.q_upper = empirical_quantile(result.boot_medians, 1.0 - config.alpha / 2.0);
    } else {
        result.q_upper = empirical_quantile(result.boot_medians, 1.0 - config.alpha);
    }

    result.flags.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double v = result.spectrum.values[i];
        result.flags[i] = two_sided ? (v < *result.q_lower || v > result.q_upper)
                                    : (v > result.q_upper);
    }

    overall_bonferroni(result, T, config.alpha);
    return result;
}

} // namespace

std::vector<Eigen::Index> stationary_bootstrap_indices(Eigen::Index T, double L, Rng& rng)
{
    const double p = 1.0 / L;
    std::vector<Eigen::Index> indices(static_cast<std::size_t>(T));
    Eigen::Index current = static_cast<Eigen::Index>(rng.uniform_below(static_cast<std::uint64_t>(T)));
    indices[0] = current;
    for (Eigen::Index t = 1; t < T; ++t) {
        if (rng.uniform() < p)
            current = static_cast<Eigen::Index>(rng.uniform_below(static_cast<std::uint64_t>(T)));
        else
            current = (current + 1) % T;
        indices[static_cast<std::size_t>(t)] = current;
    }
    return indices;
}

Eigen::VectorXd stationary_bootstrap(const Eigen::VectorXd& series, double L, Rng& rng)
{
    const Eigen::Index T = series.size();
    const std::vector<Eigen::Index> indices = stationary_bootstrap_indices(T, L, rng);
    Eigen::VectorXd out(T);
    for (Eigen::Index t = 0; t < T; ++t) out(t) = series(indices[static_cast<std::size_t>(t)]);
    return out;
}

TestResult test_unconditional(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                              const BootstrapConfig& config)
{
    const MultiSeries panel = panel_from({&x, &y}, {"x", "y"});
    return run_test({Functional::Unconditional, panel.values}, config);
}

TestResult test_conditional(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                            const Eigen::VectorXd& w, const BootstrapConfig& config)
{
    check_not_duplicated(y, w);
    const MultiSeries panel = panel_from({&x, &y, &w}, {"x", "y", "w"});
    return run_test({Functional::Conditional, panel.values}, config);
}

TestResult test_difference(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                           const Eigen::VectorXd& w, const BootstrapConfig& config)
{
    check_not_duplicated(y, w);
    const MultiSeries panel = panel_from({&x, &y, &w}, {"x", "y", "w"});
    return run_test({Functional::Difference, panel.values}, config);
}

void overall_bonferroni(TestResult& result, Eigen::Index T, double alpha)
{
    if (result.boot_medians.empty())
        fail("BOOT_EMPTY_SAMPLE", "no bootstrap medians available");

    const double per_frequency = 2.0 * alpha / static_cast<double>(T);
    if (per_frequency >= 1.0)
        fail("BOOT_BAD_CONFIG", "Bonferroni level 2*alpha/T must be below 1");

    const double n_boot = static_cast<double>(result.boot_medians.size());
    result.quantile_warning = n_boot < 10.0 * static_cast<double>(T) / (2.0 * alpha);

    const bool two_sided = result.spectrum.kind == SpectrumKind::Difference;
    const std::size_t n = result.spectrum.values.size();
    result.bonferroni_flags.assign(n, 0);
    if (two_sided) {
        const double tail = per_frequency / 2.0; // alpha/T per tail
        const double lo = empirical_quantile(result.boot_medians, tail);
        const double hi = empirical_quantile(result.boot_medians, 1.0 - tail);
        for (std::size_t i = 0; i < n; ++i) {
            const double v = result.spectrum.values[i];
            result.bonferroni_flags[i] = (v < lo || v > hi);
        }
    } else {
        const double hi = empirical_quantile(result.boot_medians, 1.0 - per_frequency);
        for (std::size_t i = 0; i < n; ++i)
            result.bonferroni_flags[i] = result.spectrum.values[i] > hi;
    }

    result.overall_significant = false;
    for (const auto flag : result.bonferroni_flags)
        if (flag) result.overall_significant = true;
}

double empirical_quantile(std::vector<double> samples, double q)
{
    if (samples.empty()) fail("BOOT_EMPTY_SAMPLE", "quantile of an empty sample");
    if (!(q > 0.0 && q < 1.0)) fail("BOOT_BAD_CONFIG", "quantile level must lie in (0, 1)");
    std::sort(samples.begin(), samples.end());
    const std::size_t n = samples.size();
    std::size_t rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
    if (rank < 1) rank = 1;
    if (rank > n) rank = n;
    return samples[rank - 1];
}

} // namespace gcspec
