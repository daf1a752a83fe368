#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "gcspec/rng.hpp"
#include "gcspec/sim.hpp"
#include "gcspec/spectra.hpp"
#include "oracles.hpp"

using namespace gcspec;
using std::complex;

namespace {

constexpr double kPi = std::numbers::pi;

VarModel make_model(const std::vector<Eigen::MatrixXd>& A, const Eigen::MatrixXd& sigma)
{
    VarModel model;
    model.k = static_cast<int>(A.size());
    model.A = A;
    model.Sigma = sigma;
    model.T_effective = 100;
    model.T_source = 100 + model.k;
    return model;
}

std::vector<Eigen::MatrixXd> breitung_coeffs(double omega_star, double a22 = 0.0)
{
    Eigen::MatrixXd a1 = Eigen::MatrixXd::Zero(2, 2);
    a1(0, 1) = 1.0;
    a1(1, 1) = a22;
    Eigen::MatrixXd a2 = Eigen::MatrixXd::Zero(2, 2);
    a2(0, 1) = -2.0 * std::cos(omega_star);
    return {a1, a2, a1};
}

// Row-major complex copy of I - sum_j A_j e^{-ij w}.
std::vector<complex<double>> phi_flat(const VarModel& model, double omega)
{
    const std::size_t p = static_cast<std::size_t>(model.dimension());
    std::vector<complex<double>> phi(p * p, complex<double>(0.0));
    for (std::size_t i = 0; i < p; ++i) phi[i * p + i] = 1.0;
    for (int j = 1; j <= model.k; ++j) {
        const complex<double> e = std::polar(1.0, -j * omega);
        for (std::size_t r = 0; r < p; ++r)
            for (std::size_t c = 0; c < p; ++c)
                phi[r * p + c] -= model.A[static_cast<std::size_t>(j - 1)](
                                      static_cast<Eigen::Index>(r),
                                      static_cast<Eigen::Index>(c)) * e;
    }
    return phi;
}

// End-to-end re-implementation of the unconditional causality chain on
// top of the dense complex oracle solver.
double uncond_oracle(const VarModel& model, double omega)
{
    const auto P = oracles::invert_dense(phi_flat(model, omega), 2);
    const double sigma = model.Sigma(0, 0);
    const double upsilon = model.Sigma(0, 1);
    const double gamma = model.Sigma(1, 1);

    complex<double> h_xx(0.0);
    const complex<double> row[2] = {P[0], P[1]};
    const double s[2][2] = {{sigma, upsilon}, {upsilon, gamma}};
    for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 2; ++b)
            h_xx += row[a] * s[a][b] * std::conj(row[b]);

    const complex<double> ptilde = P[0] + (upsilon / sigma) * P[1];
    return std::log(h_xx.real() / (sigma * std::norm(ptilde)));
}

// Same for the conditional chain: bivariate (effect, conditioning)
// transfer, orthogonalizing column remix, bordered inverse, full Q.
double cond_oracle(const VarModel& model_xw, const VarModel& model_xyw, double omega)
{
    const auto G = oracles::invert_dense(phi_flat(model_xw, omega), 2);
    const double sigma_b = model_xw.Sigma(0, 0);
    const double upsilon_b = model_xw.Sigma(0, 1);
    const double m = upsilon_b / sigma_b;

    std::vector<complex<double>> C(9, complex<double>(0.0));
    C[0 * 3 + 0] = G[0] + m * G[1];
    C[0 * 3 + 2] = G[1];
    C[1 * 3 + 1] = 1.0;
    C[2 * 3 + 0] = G[2] + m * G[3];
    C[2 * 3 + 2] = G[3];

    const auto C_inv = oracles::invert_dense(C, 3);
    const auto P3 = oracles::invert_dense(phi_flat(model_xyw, omega), 3);

    std::vector<complex<double>> Q(9, complex<double>(0.0));
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = 0; c < 3; ++c)
            for (std::size_t k = 0; k < 3; ++k)
                Q[r * 3 + c] += C_inv[r * 3 + k] * P3[k * 3 + c];

    const double sigmas[3] = {model_xyw.Sigma(0, 0), model_xyw.Sigma(1, 1),
                              model_xyw.Sigma(2, 2)};
    double numerator = 0.0;
    for (std::size_t j = 0; j < 3; ++j) numerator += sigmas[j] * std::norm(Q[j]);
    return std::log(numerator / (sigmas[0] * std::norm(Q[0])));
}

MultiSeries white_noise_panel(Eigen::Index T, Eigen::Index p, std::uint64_t seed)
{
    Rng rng(seed);
    Eigen::MatrixXd values(T, p);
    for (Eigen::Index t = 0; t < T; ++t)
        for (Eigen::Index j = 0; j < p; ++j) values(t, j) = rng.normal();
    std::vector<std::string> names = {"x", "y", "w"};
    names.resize(static_cast<std::size_t>(p));
    return MultiSeries(names, values);
}

VarModel random_stationary_model(Rng& rng, Eigen::Index p, int k)
{
    std::vector<Eigen::MatrixXd> A;
    for (int j = 0; j < k; ++j) {
        Eigen::MatrixXd a(p, p);
        for (Eigen::Index r = 0; r < p; ++r)
            for (Eigen::Index c = 0; c < p; ++c) a(r, c) = 1.2 * (rng.uniform() - 0.5);
        A.push_back(a);
    }
    while (!companion_roots(A).stationary)
        for (auto& a : A) a *= 0.8;

    Eigen::MatrixXd m(p, p);
    for (Eigen::Index r = 0; r < p; ++r)
        for (Eigen::Index c = 0; c < p; ++c) m(r, c) = rng.normal();
    return make_model(A, m * m.transpose() + 0.1 * Eigen::MatrixXd::Identity(p, p));
}

} // namespace

TEST_CASE("transfer function without dynamics is the identity")
{
    const VarModel model =
        make_model({Eigen::MatrixXd::Zero(2, 2)}, Eigen::MatrixXd::Identity(2, 2));
    for (const double omega : {0.1, 1.0, 2.0, kPi}) {
        const Eigen::MatrixXcd P = transfer_function(model, omega);
        CHECK((P - Eigen::MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("scalar geometric inverse at frequency zero")
{
    const VarModel model =
        make_model({0.5 * Eigen::MatrixXd::Identity(2, 2)}, Eigen::MatrixXd::Identity(2, 2));
    const Eigen::MatrixXcd P = transfer_function(model, 0.0);
    CHECK((P - 2.0 * Eigen::MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("transfer function matches the dense complex oracle")
{
    const VarModel model = make_model(breitung_coeffs(kPi / 2.0, 0.25),
                                      Eigen::MatrixXd::Identity(2, 2));
    const double omega = kPi / 3.0;
    const Eigen::MatrixXcd P = transfer_function(model, omega);
    const auto expected = oracles::invert_dense(phi_flat(model, omega), 2);
    for (Eigen::Index r = 0; r < 2; ++r)
        for (Eigen::Index c = 0; c < 2; ++c)
            CHECK(std::abs(P(r, c) - expected[static_cast<std::size_t>(r * 2 + c)]) < 1e-10);
}

TEST_CASE("transfer function rejects singular frequencies")
{
    const VarModel model =
        make_model({Eigen::MatrixXd::Identity(2, 2)}, Eigen::MatrixXd::Identity(2, 2));
    try {
        transfer_function(model, 0.0);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == "SPECTRA_SINGULAR_AT_FREQUENCY");
    }
}

TEST_CASE("white noise spectrum is the identity")
{
    const VarModel model =
        make_model({Eigen::MatrixXd::Zero(2, 2)}, Eigen::MatrixXd::Identity(2, 2));
    for (const double omega : {0.3, 1.5, 3.0}) {
        const Eigen::MatrixXcd h = spectral_matrix(model, omega);
        CHECK((h - Eigen::MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("AR(1) spectrum closed form")
{
    Eigen::MatrixXd a1 = Eigen::MatrixXd::Zero(2, 2);
    a1(0, 0) = 0.9;
    const VarModel model = make_model({a1}, Eigen::MatrixXd::Identity(2, 2));
    for (const double omega : {0.2, 0.9, 2.2, kPi}) {
        const Eigen::MatrixXcd h = spectral_matrix(model, omega);
        const double expected = 1.0 / std::norm(1.0 - 0.9 * std::polar(1.0, -omega));
        CHECK(h(0, 0).real() == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("spectral matrices are Hermitian positive semidefinite")
{
    Rng rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Index p = trial % 2 == 0 ? 2 : 3;
        const int k = 1 + static_cast<int>(rng.uniform_below(3));
        const VarModel model = random_stationary_model(rng, p, k);
        for (int i = 0; i < 32; ++i) {
            const double omega = kPi * rng.uniform();
            const Eigen::MatrixXcd h = spectral_matrix(model, omega);
            CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h);
            CHECK(eig.eigenvalues()(0) > -1e-10);
        }
    }
}

TEST_CASE("no cross-dynamics means zero causality")
{
    Eigen::MatrixXd a1(2, 2);
    a1 << 0.6, 0.0, 0.0, -0.4;
    Eigen::MatrixXd sigma(2, 2);
    sigma << 2.0, 0.0, 0.0, 0.5;
    const VarModel model = make_model({a1}, sigma);
    const FrequencyGrid grid = FrequencyGrid::fourier(64);
    for (const double value : unconditional_gc_grid(model, grid))
        CHECK(std::abs(value) < 1e-10);
}

TEST_CASE("Breitung designs vanish exactly at their null frequency")
{
    for (const double omega_star : {0.0, kPi / 4.0, kPi / 2.0, 3.0 * kPi / 4.0, kPi}) {
        const VarModel model =
            make_model(breitung_coeffs(omega_star), Eigen::MatrixXd::Identity(2, 2));
        const double at_null = unconditional_gc(model, omega_star == 0.0 ? 1e-9 : omega_star);
        CHECK(std::abs(at_null) < 1e-8);
        const double away = unconditional_gc(model, omega_star < 1.0 ? 2.5 : 0.4);
        CHECK(away > 0.01);
    }
}

TEST_CASE("unconditional causality matches the formula-chain oracle")
{
    Eigen::MatrixXd a1(2, 2);
    a1 << 0.5, 0.5, 0.0, 0.5;
    const VarModel model = make_model({a1}, Eigen::MatrixXd::Identity(2, 2));
    const FrequencyGrid grid = FrequencyGrid::fourier(32);
    const std::vector<double> values = unconditional_gc_grid(model, grid);

    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(values[i] == doctest::Approx(uncond_oracle(model, grid.angular(i))).epsilon(1e-10));

    for (std::size_t i = 1; i < values.size(); ++i) CHECK(values[i] <= values[i - 1] + 1e-12);
}

TEST_CASE("unconditional causality with correlated innovations stays nonnegative")
{
    Rng rng(12345);
    for (int trial = 0; trial < 50; ++trial) {
        const VarModel model = random_stationary_model(rng, 2, 2);
        for (int i = 0; i < 8; ++i) {
            const double value = unconditional_gc(model, kPi * rng.uniform());
            CHECK(value >= 0.0);
        }
    }
}

TEST_CASE("degenerate covariance raises")
{
    Eigen::MatrixXd sigma(2, 2);
    sigma << 1.0, 0.0, 0.0, 0.0;
    const VarModel model = make_model({Eigen::MatrixXd::Zero(2, 2)}, sigma);
    try {
        unconditional_gc(model, 1.0);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == "SPECTRA_DEGENERATE_COVARIANCE");
    }
}

TEST_CASE("independent white-noise cause gives zero conditional causality")
{
    // trivariate model where the cause series is white noise and feeds
    // nothing: the (X,W) dynamics coincide with the trivariate ones
    Eigen::MatrixXd a3 = Eigen::MatrixXd::Zero(3, 3);
    a3(0, 0) = 0.4;
    a3(0, 2) = 0.3;
    a3(2, 0) = -0.2;
    a3(2, 2) = 0.5;
    Eigen::MatrixXd sigma3 = Eigen::MatrixXd::Identity(3, 3);
    sigma3(0, 2) = sigma3(2, 0) = 0.4;
    const VarModel model_xyw = make_model({a3}, sigma3);

    Eigen::MatrixXd a2(2, 2);
    a2 << 0.4, 0.3, -0.2, 0.5;
    Eigen::MatrixXd sigma2(2, 2);
    sigma2 << 1.0, 0.4, 0.4, 1.0;
    const VarModel model_xw = make_model({a2}, sigma2);

    const FrequencyGrid grid = FrequencyGrid::fourier(50);
    for (const double value : conditional_gc_grid(model_xw, model_xyw, grid))
        CHECK(std::abs(value) < 1e-8);
}

TEST_CASE("irrelevant conditioning variable reproduces the unconditional value")
{
    // X driven by its own lags and the cause's innovations; cause and
    // conditioning are independent white noise. The (X,W) marginal is
    // then an exact VAR(1) with inflated innovation variance.
    const double a = 0.6, b = 0.8;
    const double sx = 1.0, sy = 0.7, sw = 1.3;

    Eigen::MatrixXd a3 = Eigen::MatrixXd::Zero(3, 3);
    a3(0, 0) = a;
    a3(0, 1) = b;
    const VarModel model_xyw =
        make_model({a3}, Eigen::Vector3d(sx, sy, sw).asDiagonal().toDenseMatrix());

    Eigen::MatrixXd a2 = Eigen::MatrixXd::Zero(2, 2);
    a2(0, 0) = a;
    const VarModel model_xw = make_model(
        {a2}, Eigen::Vector2d(sx + b * b * sy, sw).asDiagonal().toDenseMatrix());

    Eigen::MatrixXd a_xy = Eigen::MatrixXd::Zero(2, 2);
    a_xy(0, 0) = a;
    a_xy(0, 1) = b;
    const VarModel model_xy =
        make_model({a_xy}, Eigen::Vector2d(sx, sy).asDiagonal().toDenseMatrix());

    const FrequencyGrid grid = FrequencyGrid::fourier(64);
    const std::vector<double> uncond = unconditional_gc_grid(model_xy, grid);
    const std::vector<double> cond = conditional_gc_grid(model_xw, model_xyw, grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(std::abs(uncond[i] - cond[i]) < 1e-6);
}

TEST_CASE("conditional causality matches the duplicate-implementation oracle")
{
    Rng rng(777);
    for (int trial = 0; trial < 10; ++trial) {
        const VarModel model_xyw = random_stationary_model(rng, 3, 1);
        VarModel model_xw = random_stationary_model(rng, 2, 1);
        model_xw.T_source = model_xyw.T_source;
        for (int i = 0; i < 8; ++i) {
            const double omega = 0.05 + (kPi - 0.05) * rng.uniform();
            const double value = conditional_gc(model_xw, model_xyw, omega);
            const double expected = cond_oracle(model_xw, model_xyw, omega);
            CHECK(value == doctest::Approx(std::max(expected, 0.0)).epsilon(1e-10));
        }
    }
}

TEST_CASE("misaligned models are rejected")
{
    Rng rng(5);
    const VarModel model_xyw = random_stationary_model(rng, 3, 1);
    VarModel model_xw = random_stationary_model(rng, 2, 1);
    model_xw.T_source = model_xyw.T_source + 10;
    try {
        conditional_gc(model_xw, model_xyw, 1.0);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == "SPECTRA_MISALIGNED_MODELS");
    }
}

TEST_CASE("spectra are symmetric in omega and 2 pi minus omega")
{
    Rng rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        const VarModel model = random_stationary_model(rng, 2, 2);
        for (int i = 0; i < 8; ++i) {
            const double omega = kPi * rng.uniform();
            const double a = unconditional_gc(model, omega);
            const double b = unconditional_gc(model, 2.0 * kPi - omega);
            CHECK(std::abs(a - b) < 1e-10);
        }
    }
}

TEST_CASE("gc_spectrum equals the composition of the public primitives")
{
    const MultiSeries data = white_noise_panel(150, 2, 404);
    SpectrumConfig config;
    config.fixed_k = 1;
    const SpectrumResult result = gc_spectrum(data, {"x", "y", std::nullopt}, config);

    const VarModel model = fit_var(data, 1, true);
    REQUIRE(result.values.size() == result.grid.size());
    for (std::size_t i = 0; i < result.grid.size(); ++i) {
        const double omega = result.grid.angular(i);
        const Eigen::MatrixXcd P = transfer_function(model, omega);
        const Eigen::MatrixXcd h = spectral_matrix(model, omega);
        const double sigma = model.Sigma(0, 0);
        const double upsilon = model.Sigma(0, 1);
        const std::complex<double> ptilde = P(0, 0) + (upsilon / sigma) * P(0, 1);
        const double composed = std::log(h(0, 0).real() / (sigma * std::norm(ptilde)));
        CHECK(std::abs(result.values[i] - std::max(composed, 0.0)) < 1e-12);
    }
}

TEST_CASE("white-noise spectra are finite with a small median")
{
    int small_median = 0;
    const int n_seeds = 20;
    for (int s = 0; s < n_seeds; ++s) {
        const MultiSeries data = white_noise_panel(200, 2, 6000 + static_cast<std::uint64_t>(s));
        const SpectrumResult result = gc_spectrum(data, {"x", "y", std::nullopt}, {});
        std::vector<double> values = result.values;
        for (const double v : values) REQUIRE(std::isfinite(v));
        std::sort(values.begin(), values.end());
        const double median = values[values.size() / 2];
        if (median < 0.1) ++small_median;
    }
    CHECK(small_median >= 19);
}

TEST_CASE("identical effect and cause series error out")
{
    MultiSeries data = white_noise_panel(120, 2, 9);
    data.values.col(1) = data.values.col(0);
    try {
        gc_spectrum(data, {"x", "y", std::nullopt}, {});
        FAIL("expected an error");
    } catch (const Error& e) {
        const bool expected = e.code() == "VAR_SINGULAR_REGRESSORS"
                              || e.code() == "SPECTRA_DEGENERATE_COVARIANCE";
        CHECK(expected);
    }
}

TEST_CASE("padded grid emits the documented number of frequencies")
{
    const MultiSeries data = white_noise_panel(76, 3, 11);
    SpectrumConfig config;
    config.grid_M = 80;
    const SpectrumResult result = gc_spectrum(data, {"x", "y", std::nullopt}, config);
    CHECK(result.values.size() == 40);
    CHECK(result.grid.freqs.front() == doctest::Approx(1.0 / 80.0));
    CHECK(result.grid.freqs.back() == doctest::Approx(0.5));

    SpectrumConfig cond_config;
    cond_config.grid_M = 80;
    const SpectrumResult cond = gc_spectrum(data, {"x", "y", "w"}, cond_config);
    CHECK(cond.kind == SpectrumKind::Conditional);
    CHECK(cond.values.size() == 40);

    cond_config.difference = true;
    const SpectrumResult diff = gc_spectrum(data, {"x", "y", "w"}, cond_config);
    CHECK(diff.kind == SpectrumKind::Difference);
}
