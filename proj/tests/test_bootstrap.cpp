#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gcspec/bootstrap.hpp"
#include "gcspec/rng.hpp"

using namespace gcspec;

namespace {

Eigen::VectorXd noise(Eigen::Index T, std::uint64_t seed)
{
    Rng rng(seed);
    Eigen::VectorXd v(T);
    for (Eigen::Index t = 0; t < T; ++t) v(t) = rng.normal();
    return v;
}

BootstrapConfig small_config(std::uint64_t seed)
{
    BootstrapConfig config;
    config.n_boot = 100;
    config.seed = seed;
    config.grid_M = 24;
    return config;
}

} // namespace

TEST_CASE("resampling a constant series returns it unchanged")
{
    Rng rng(1);
    const Eigen::VectorXd constant = Eigen::VectorXd::Constant(50, 3.25);
    const Eigen::VectorXd out = stationary_bootstrap(constant, 4.0, rng);
    CHECK((out - constant).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("resampled values always come from the input")
{
    Rng rng(2);
    const Eigen::VectorXd series = noise(40, 7);
    const Eigen::VectorXd out = stationary_bootstrap(series, 3.0, rng);
    REQUIRE(out.size() == series.size());
    for (Eigen::Index t = 0; t < out.size(); ++t) {
        bool found = false;
        for (Eigen::Index s = 0; s < series.size(); ++s)
            if (out(t) == series(s)) found = true;
        CHECK(found);
    }
}

TEST_CASE("block lengths are geometric with the requested mean")
{
    const Eigen::Index T = 100000;
    for (const double L : {2.0, 6.0, 25.0}) {
        Rng rng(static_cast<std::uint64_t>(L));
        const std::vector<Eigen::Index> idx = stationary_bootstrap_indices(T, L, rng);
        Eigen::Index blocks = 1;
        for (std::size_t t = 1; t < idx.size(); ++t)
            if (idx[t] != (idx[t - 1] + 1) % T) ++blocks;
        const double mean_length = static_cast<double>(T) / static_cast<double>(blocks);
        CHECK(mean_length == doctest::Approx(L).epsilon(0.02));
    }
}

TEST_CASE("block starts cover the sample uniformly")
{
    const Eigen::Index T = 200;
    Rng rng(99);
    std::vector<int> hits(static_cast<std::size_t>(T), 0);
    const int n_paths = 400;
    for (int i = 0; i < n_paths; ++i) {
        const std::vector<Eigen::Index> idx = stationary_bootstrap_indices(T, 5.0, rng);
        for (std::size_t t = 1; t < idx.size(); ++t)
            if (idx[t] != (idx[t - 1] + 1) % T) ++hits[static_cast<std::size_t>(idx[t])];
    }
    // roughly T*n_paths/L restarts spread over T cells
    double total = 0.0;
    for (const int h : hits) total += h;
    const double mean = total / static_cast<double>(T);
    int far = 0;
    for (const int h : hits)
        if (std::abs(h - mean) > 5.0 * std::sqrt(mean)) ++far;
    CHECK(far <= 2);
}

TEST_CASE("wrap-around indices stay in range")
{
    Rng rng(123);
    const std::vector<Eigen::Index> idx = stationary_bootstrap_indices(37, 50.0, rng);
    for (const Eigen::Index i : idx) {
        CHECK(i >= 0);
        CHECK(i < 37);
    }
}

TEST_CASE("identical seeds give identical output")
{
    const Eigen::VectorXd series = noise(64, 3);
    Rng a(42), b(42);
    const Eigen::VectorXd out_a = stationary_bootstrap(series, 4.0, a);
    const Eigen::VectorXd out_b = stationary_bootstrap(series, 4.0, b);
    CHECK((out_a - out_b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("the bootstrap destroys cross-series dependence")
{
    const Eigen::Index T = 200;
    const Eigen::VectorXd x = noise(T, 11);
    const Eigen::VectorXd y = noise(T, 12);

    double total_abs_corr = 0.0;
    const int n_reps = 200;
    for (int r = 0; r < n_reps; ++r) {
        Rng rng(substream_seed(5, static_cast<std::uint64_t>(r)));
        const Eigen::VectorXd xs = stationary_bootstrap(x, 6.0, rng);
        const Eigen::VectorXd ys = stationary_bootstrap(y, 6.0, rng);
        const Eigen::VectorXd xc = xs.array() - xs.mean();
        const Eigen::VectorXd yc = ys.array() - ys.mean();
        total_abs_corr += std::abs(xc.dot(yc) / (xc.norm() * yc.norm()));
    }
    CHECK(total_abs_corr / n_reps < 3.0 / std::sqrt(static_cast<double>(T)));
}

TEST_CASE("empirical quantile is the conservative order statistic")
{
    std::vector<double> samples;
    for (int i = 1; i <= 100; ++i) samples.push_back(i);
    CHECK(empirical_quantile(samples, 0.95) == 95.0);
    CHECK(empirical_quantile(samples, 0.5) == 50.0);
    CHECK(empirical_quantile({7.25}, 0.99) == 7.25);
    CHECK(empirical_quantile({7.25}, 0.01) == 7.25);

    try {
        empirical_quantile({}, 0.5);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == "BOOT_EMPTY_SAMPLE");
    }
}

TEST_CASE("quantile of standard normal draws approximates the true value")
{
    Rng rng(2024);
    std::vector<double> draws(1000);
    for (auto& d : draws) d = rng.normal();
    CHECK(std::abs(empirical_quantile(draws, 0.975) - 1.96) < 0.15);
}

TEST_CASE("unconditional test is deterministic across worker counts")
{
    const Eigen::VectorXd x = noise(100, 21);
    const Eigen::VectorXd y = noise(100, 22);

    BootstrapConfig config = small_config(7);
    config.exec = Exec::Serial;
    const TestResult reference = test_unconditional(x, y, config);

    config.exec = Exec::Parallel;
    for (const int threads : {1, 4, 16}) {
        set_max_threads(threads);
        const TestResult parallel = test_unconditional(x, y, config);
        CHECK(parallel == reference);
    }
    set_max_threads(0);
}

TEST_CASE("conditional and difference tests are deterministic too")
{
    const Eigen::VectorXd x = noise(90, 31);
    const Eigen::VectorXd y = noise(90, 32);
    const Eigen::VectorXd w = noise(90, 33);

    BootstrapConfig config = small_config(11);
    config.exec = Exec::Serial;
    const TestResult cond_ref = test_conditional(x, y, w, config);
    const TestResult diff_ref = test_difference(x, y, w, config);

    config.exec = Exec::Parallel;
    set_max_threads(4);
    CHECK(test_conditional(x, y, w, config) == cond_ref);
    CHECK(test_difference(x, y, w, config) == diff_ref);
    set_max_threads(0);
}

TEST_CASE("difference test thresholds are two-sided and ordered")
{
    const Eigen::VectorXd x = noise(120, 41);
    const Eigen::VectorXd y = noise(120, 42);
    const Eigen::VectorXd w = noise(120, 43);

    const TestResult result = test_difference(x, y, w, small_config(3));
    REQUIRE(result.q_lower.has_value());
    CHECK(*result.q_lower < result.q_upper);
    CHECK(result.spectrum.kind == SpectrumKind::Difference);
    for (std::size_t i = 0; i < result.flags.size(); ++i) {
        const double v = result.spectrum.values[i];
        CHECK(result.flags[i] == (v < *result.q_lower || v > result.q_upper));
    }
}

TEST_CASE("Bonferroni flags are a subset of the per-frequency flags")
{
    const Eigen::VectorXd x = noise(150, 51);
    Eigen::VectorXd y = noise(150, 52);
    for (Eigen::Index t = 1; t < 150; ++t) y(t) += 0.6 * x(t - 1); // x causes y
    const TestResult result = test_unconditional(y, x, small_config(13));
    for (std::size_t i = 0; i < result.flags.size(); ++i)
        if (result.bonferroni_flags[i]) CHECK(result.flags[i]);
    bool any_bonf = false;
    for (const auto f : result.bonferroni_flags) any_bonf |= f != 0;
    CHECK(result.overall_significant == any_bonf);
}

TEST_CASE("quantile warning follows the resolution rule")
{
    TestResult synthetic;
    synthetic.spectrum.kind = SpectrumKind::Unconditional;
    synthetic.spectrum.values.assign(38, 0.0);
    synthetic.boot_medians.assign(1000, 0.0);
    for (std::size_t i = 0; i < synthetic.boot_medians.size(); ++i)
        synthetic.boot_medians[i] = static_cast<double>(i);

    // n_boot = 1000 < 10 * 76 / (2 * 0.05) = 7600
    overall_bonferroni(synthetic, 76, 0.05);
    CHECK(synthetic.quantile_warning);

    // n_boot = 1000 >= 10 * 4 / 0.1 = 400
    overall_bonferroni(synthetic, 4, 0.05);
    CHECK(!synthetic.quantile_warning);
}

TEST_CASE("a duplicated conditioning series is rejected")
{
    const Eigen::VectorXd x = noise(100, 61);
    const Eigen::VectorXd y = noise(100, 62);
    try {
        test_conditional(x, y, y, small_config(1));
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == "SPECTRA_DEGENERATE_COVARIANCE");
    }
}

TEST_CASE("invalid configs are rejected")
{
    const Eigen::VectorXd x = noise(50, 71);
    const Eigen::VectorXd y = noise(50, 72);

    BootstrapConfig config = small_config(1);
    config.n_boot = 10;
    try {
        test_unconditional(x, y, config);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == "BOOT_BAD_CONFIG");
    }

    config = small_config(1);
    config.alpha = 1.5;
    try {
        test_unconditional(x, y, config);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == "BOOT_BAD_CONFIG");
    }
}

TEST_CASE("lag reselection per replicate stays deterministic")
{
    const Eigen::VectorXd x = noise(80, 81);
    const Eigen::VectorXd y = noise(80, 82);

    BootstrapConfig config = small_config(17);
    config.lag_policy = LagPolicy::ReselectPerReplicate;
    config.k_max = 2;
    const TestResult first = test_unconditional(x, y, config);
    const TestResult second = test_unconditional(x, y, config);
    CHECK(first == second);
    CHECK(first.n_failed_replicates <= 10);
}
