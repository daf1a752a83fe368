#include "gcspec/spectra.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "gcspec/parallel.hpp"

namespace gcspec {

namespace {

using std::complex;
constexpr double kRcondFloor = 1e-12;
constexpr double kNegativeTolerance = 1e-10;
constexpr double kVarianceFloor = 1e-14;

[[noreturn]] void fail_singular(double omega, double rcond)
{
    fail("SPECTRA_SINGULAR_AT_FREQUENCY",
         "transfer matrix numerically singular at omega = " + std::to_string(omega)
         + " (rcond " + std::to_string(rcond) + ")");
}

// Reciprocal-condition proxy: |det| over the product of row 1-norms.
// Bounded in [0, 1] by Hadamard's inequality, zero iff singular.
template <typename Mat>
double rcond_hadamard(const Mat& m, const complex<double>& det)
{
    double denom = 1.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        denom *= m.row(i).cwiseAbs().sum();
    if (denom == 0.0) return 0.0;
    return std::abs(det) / denom;
}

Eigen::Matrix2cd phi_matrix_2(const VarModel& model, double omega)
{
    Eigen::Matrix2cd phi = Eigen::Matrix2cd::Identity();
    for (int j = 1; j <= model.k; ++j) {
        const complex<double> e = std::polar(1.0, -j * omega);
        phi -= model.A[static_cast<std::size_t>(j - 1)] * e;
    }
    return phi;
}

Eigen::Matrix3cd phi_matrix_3(const VarModel& model, double omega)
{
    Eigen::Matrix3cd phi = Eigen::Matrix3cd::Identity();
    for (int j = 1; j <= model.k; ++j) {
        const complex<double> e = std::polar(1.0, -j * omega);
        phi -= model.A[static_cast<std::size_t>(j - 1)] * e;
    }
    return phi;
}

Eigen::Matrix2cd invert_2(const Eigen::Matrix2cd& m, double omega)
{
    const complex<double> det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    const double rcond = rcond_hadamard(m, det);
    if (rcond < kRcondFloor) fail_singular(omega, rcond);
    Eigen::Matrix2cd inv;
    inv << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
    return inv / det;
}

Eigen::Matrix3cd invert_3(const Eigen::Matrix3cd& m, double omega)
{
    const complex<double> c00 = m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
    const complex<double> c01 = m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2);
    const complex<double> c02 = m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0);
    const complex<double> det = m(0, 0) * c00 + m(0, 1) * c01 + m(0, 2) * c02;
    const double rcond = rcond_hadamard(m, det);
    if (rcond < kRcondFloor) fail_singular(omega, rcond);

    Eigen::Matrix3cd adj;
    adj(0, 0) = c00;
    adj(1, 0) = c01;
    adj(2, 0) = c02;
    adj(0, 1) = m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2);
    adj(1, 1) = m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0);
    adj(2, 1) = m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1);
    adj(0, 2) = m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1);
    adj(1, 2) = m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2);
    adj(2, 2) = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    return adj / det;
}

// Log-ratio with the shared clamping policy: tiny negatives are rounding,
// anything below -1e-10 signals ill-conditioning and aborts.
double log_ratio_clamped(double numerator, double denominator, double omega)
{
    if (!(denominator > 0.0))
        fail("SPECTRA_DEGENERATE_COVARIANCE",
             "nonpositive intrinsic power at omega = " + std::to_string(omega));
    const double value = std::log(numerator / denominator);
    // comparison written to also reject NaN
    if (!(value >= -kNegativeTolerance))
        fail("SPECTRA_NUMERICAL_INCONSISTENCY",
             "causality value " + std::to_string(value) + " at omega = "
             + std::to_string(omega) + " is negative beyond tolerance");
    return value < 0.0 ? 0.0 : value;
}

double unconditional_gc_impl(const VarModel& model, double omega)
{
    const double sigma = model.Sigma(0, 0);
    const double upsilon = model.Sigma(0, 1);
    const double gamma = model.Sigma(1, 1);
    if (gamma <= kVarianceFloor || sigma <= kVarianceFloor)
        fail("SPECTRA_DEGENERATE_COVARIANCE",
             "residual covariance is numerically degenerate");

    const Eigen::Matrix2cd P = invert_2(phi_matrix_2(model, omega), omega);
    const complex<double> pxx = P(0, 0);
    const complex<double> pxy = P(0, 1);

    const double h_xx = sigma * std::norm(pxx)
                        + 2.0 * upsilon * (pxx * std::conj(pxy)).real()
                        + gamma * std::norm(pxy);
    // Innovation-orthogonalizing transform: intrinsic power of the effect
    // series is sigma |P_xx + (upsilon/sigma) P_xy|^2.
    const complex<double> pxx_tilde = pxx + (upsilon / sigma) * pxy;
    return log_ratio_clamped(h_xx, sigma * std::norm(pxx_tilde), omega);
}

void check_alignment(const VarModel& model_xw, const VarModel& model_xyw)
{
    if (model_xw.dimension() != 2 || model_xyw.dimension() != 3)
        fail("SPECTRA_MISALIGNED_MODELS",
             "conditional causality needs a bivariate and a trivariate model");
    if (model_xw.T_source != model_xyw.T_source)
        fail("SPECTRA_MISALIGNED_MODELS",
             "models were fitted on different sample windows");
}

double conditional_gc_impl(const VarModel& model_xw, const VarModel& model_xyw,
                           double omega)
{
    const double sigma_b = model_xw.Sigma(0, 0);   // bivariate X innovation
    const double upsilon_b = model_xw.Sigma(0, 1);
    if (sigma_b <= kVarianceFloor)
        fail("SPECTRA_DEGENERATE_COVARIANCE",
             "bivariate residual covariance is numerically degenerate");

    const Eigen::Matrix2cd G = invert_2(phi_matrix_2(model_xw, omega), omega);
    // Same orthogonalizing transform as the unconditional case, applied
    // to the (effect, conditioning) model: first column is remixed.
    const complex<double> g_xx = G(0, 0) + (upsilon_b / sigma_b) * G(0, 1);
    const complex<double> g_wx = G(1, 0) + (upsilon_b / sigma_b) * G(1, 1);
    const complex<double> g_xw = G(0, 1);
    const complex<double> g_ww = G(1, 1);

    // C embeds the normalized bivariate transfer with a passthrough for
    // the cause series; only row X of Q = C^{-1} P' is needed.
    const complex<double> det_c = g_xx * g_ww - g_xw * g_wx;
    const Eigen::Matrix2cd c_block = (Eigen::Matrix2cd() << g_xx, g_xw, g_wx, g_ww).finished();
    const double rcond_c = rcond_hadamard(c_block, det_c);
    if (rcond_c < kRcondFloor) fail_singular(omega, rcond_c);

    const Eigen::Matrix3cd P3 = invert_3(phi_matrix_3(model_xyw, omega), omega);

    const double s_xx = model_xyw.Sigma(0, 0);
    const double s_yy = model_xyw.Sigma(1, 1);
    const double s_ww = model_xyw.Sigma(2, 2);
    if (s_xx <= kVarianceFloor)
        fail("SPECTRA_DEGENERATE_COVARIANCE",
             "trivariate residual covariance is numerically degenerate");

    double numerator = 0.0;
    double denominator = 0.0;
    const double sigmas[3] = {s_xx, s_yy, s_ww};
    for (int j = 0; j < 3; ++j) {
        const complex<double> q_xj = (g_ww * P3(0, j) - g_xw * P3(2, j)) / det_c;
        const double power = sigmas[j] * std::norm(q_xj);
        numerator += power;
        if (j == 0) denominator = power;
    }
    return log_ratio_clamped(numerator, denominator, omega);
}

VarModel fit_with_selection(const MultiSeries& data, const SpectrumConfig& config)
{
    const int k = config.fixed_k
                      ? *config.fixed_k
                      : select_lag_bic(data, config.k_max, config.with_intercept).chosen_k;
    return fit_var(data, k, config.with_intercept);
}

} // namespace

FrequencyGrid FrequencyGrid::fourier(int M)
{
    if (M < 2) fail("SPECTRA_BAD_GRID", "grid base M must be >= 2");
    FrequencyGrid grid;
    grid.M = M;
    const int n = M / 2;
    grid.freqs.reserve(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i)
        grid.freqs.push_back(static_cast<double>(i) / M);
    return grid;
}

double FrequencyGrid::angular(std::size_t i) const
{
    return 2.0 * std::numbers::pi * freqs[i];
}

Eigen::MatrixXcd transfer_function(const VarModel& model, double omega)
{
    const Eigen::Index p = model.dimension();
    Eigen::MatrixXcd phi = Eigen::MatrixXcd::Identity(p, p);
    for (int j = 1; j <= model.k; ++j)
        phi -= model.A[static_cast<std::size_t>(j - 1)] * std::polar(1.0, -j * omega);

    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(phi);
    const double rcond = rcond_hadamard(phi, lu.determinant());
    if (rcond < kRcondFloor) fail_singular(omega, rcond);
    return lu.solve(Eigen::MatrixXcd::Identity(p, p));
}

Eigen::MatrixXcd spectral_matrix(const VarModel& model, double omega)
{
    const Eigen::MatrixXcd P = transfer_function(model, omega);
    return P * model.Sigma * P.adjoint();
}

double unconditional_gc(const VarModel& model, double omega)
{
    if (model.dimension() != 2)
        fail("SPECTRA_MISALIGNED_MODELS", "unconditional causality needs a bivariate model");
    return unconditional_gc_impl(model, omega);
}

double conditional_gc(const VarModel& model_xw, const VarModel& model_xyw, double omega)
{
    check_alignment(model_xw, model_xyw);
    return conditional_gc_impl(model_xw, model_xyw, omega);
}

std::vector<double> unconditional_gc_grid(const VarModel& model, const FrequencyGrid& grid,
                                          Exec exec)
{
    if (model.dimension() != 2)
        fail("SPECTRA_MISALIGNED_MODELS", "unconditional causality needs a bivariate model");
    std::vector<double> values(grid.size());
    parallel_for(grid.size(), exec, [&](std::size_t i) {
        values[i] = unconditional_gc_impl(model, grid.angular(i));
    });
    return values;
}

std::vector<double> conditional_gc_grid(const VarModel& model_xw, const VarModel& model_xyw,
                                        const FrequencyGrid& grid, Exec exec)
{
    check_alignment(model_xw, model_xyw);
    std::vector<double> values(grid.size());
    parallel_for(grid.size(), exec, [&](std::size_t i) {
        values[i] = conditional_gc_impl(model_xw, model_xyw, grid.angular(i));
    });
    return values;
}

SpectrumResult gc_spectrum(const MultiSeries& data, const Roles& roles,
                           const SpectrumConfig& config)
{
    if (config.difference && !roles.conditioning)
        fail("SPECTRA_BAD_ROLES", "difference spectra need a conditioning role");

    const int M = config.grid_M.value_or(static_cast<int>(data.length()));
    const FrequencyGrid grid = FrequencyGrid::fourier(M);

    SpectrumResult result;
    result.grid = grid;

    if (!roles.conditioning) {
        const VarModel model =
            fit_with_selection(data.select({roles.effect, roles.cause}), config);
        result.kind = SpectrumKind::Unconditional;
        result.values = unconditional_gc_grid(model, grid, config.exec);
        return result;
    }

    const VarModel model_xw =
        fit_with_selection(data.select({roles.effect, *roles.conditioning}), config);
    const VarModel model_xyw = fit_with_selection(
        data.select({roles.effect, roles.cause, *roles.conditioning}), config);

    if (!config.difference) {
        result.kind = SpectrumKind::Conditional;
        result.values = conditional_gc_grid(model_xw, model_xyw, grid, config.exec);
        return result;
    }

    const VarModel model_xy =
        fit_with_selection(data.select({roles.effect, roles.cause}), config);
    const std::vector<double> uncond = unconditional_gc_grid(model_xy, grid, config.exec);
    const std::vector<double> cond = conditional_gc_grid(model_xw, model_xyw, grid, config.exec);

    result.kind = SpectrumKind::Difference;
    result.values.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        result.values[i] = uncond[i] - cond[i];
    return result;
}

} // namespace gcspec
