#include "gcspec/sim.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace gcspec {

namespace {

constexpr double kExplosionBound = 1e12;

void validate_design(const SimDesign& design)
{
    if (design.k < 1 || design.A.size() != static_cast<std::size_t>(design.k))
        fail("SIM_BAD_DESIGN", "design needs k coefficient matrices");
    const Eigen::Index p = design.Sigma.rows();
    if (p < 2 || design.Sigma.cols() != p)
        fail("SIM_BAD_DESIGN", "innovation covariance must be square, p >= 2");
    for (const auto& a : design.A)
        if (a.rows() != p || a.cols() != p)
            fail("SIM_BAD_DESIGN", "coefficient matrices must be p x p");
    if (design.functional != TestFunctional::Unconditional && p < 3)
        fail("SIM_BAD_DESIGN", "conditional functionals need a trivariate design");
    if (design.n_mc < 50) fail("SIM_BAD_DESIGN", "n_mc must be at least 50");

    const CompanionRoots roots = companion_roots(design.A);
    if (!roots.stationary) {
        if (!design.allow_boundary)
            fail("SIM_NON_STATIONARY_DESIGN",
                 "design '" + design.name + "' is not stationary; set allow_boundary"
                 " for unit-root power studies");
        if (roots.moduli.front() > 1.0 + 1e-8)
            fail("SIM_NON_STATIONARY_DESIGN",
                 "design '" + design.name + "' is explosive");
    }
}

std::vector<std::string> column_names(Eigen::Index p)
{
    if (p == 2) return {"x", "y"};
    if (p == 3) return {"x", "y", "w"};
    std::vector<std::string> names;
    for (Eigen::Index i = 0; i < p; ++i) names.push_back("z" + std::to_string(i));
    return names;
}

SimDesign breitung_design(const std::string& name, double omega_star, double a22,
                          const Eigen::Vector2d& sigma_diag)
{
    SimDesign d;
    d.name = name;
    d.k = 3;
    Eigen::MatrixXd a1 = Eigen::MatrixXd::Zero(2, 2);
    a1(0, 1) = 1.0;
    a1(1, 1) = a22;
    Eigen::MatrixXd a2 = Eigen::MatrixXd::Zero(2, 2);
    a2(0, 1) = -2.0 * std::cos(omega_star);
    Eigen::MatrixXd a3 = a1;
    d.A = {a1, a2, a3};
    d.Sigma = sigma_diag.asDiagonal();
    d.allow_boundary = a22 >= 0.5;
    return d;
}

SimDesign bivariate_design(const std::string& name, const Eigen::Matrix2d& a1,
                           const Eigen::Matrix2d& sigma, bool boundary = false)
{
    SimDesign d;
    d.name = name;
    d.k = 1;
    d.A = {a1};
    d.Sigma = sigma;
    d.allow_boundary = boundary;
    return d;
}

} // namespace

MultiSeries simulate_var(const SimDesign& design, std::uint64_t seed)
{
    validate_design(design);
    const Eigen::Index p = design.Sigma.rows();

    Eigen::LLT<Eigen::MatrixXd> llt(design.Sigma);
    if (llt.info() != Eigen::Success)
        fail("SIM_BAD_DESIGN", "innovation covariance is not positive definite");
    const Eigen::MatrixXd chol = llt.matrixL();

    Rng rng(seed);
    const Eigen::Index total = design.burn_in + design.T;
    Eigen::MatrixXd path = Eigen::MatrixXd::Zero(total + design.k, p);

    Eigen::VectorXd shock(p);
    for (Eigen::Index t = design.k; t < total + design.k; ++t) {
        for (Eigen::Index j = 0; j < p; ++j) shock(j) = rng.normal();
        Eigen::VectorXd z = chol * shock;
        for (int lag = 1; lag <= design.k; ++lag)
            z += design.A[static_cast<std::size_t>(lag - 1)] * path.row(t - lag).transpose();
        if (z.cwiseAbs().maxCoeff() > kExplosionBound)
            fail("SIM_EXPLODING_PATH",
                 "simulated path exceeded 1e12 at t = " + std::to_string(t));
        path.row(t) = z.transpose();
    }

    return MultiSeries(column_names(p), path.bottomRows(design.T));
}

SimReport run_design(const SimDesign& design, const BootstrapConfig& config)
{
    validate_design(design);

    const FrequencyGrid grid =
        FrequencyGrid::fourier(config.grid_M.value_or(static_cast<int>(design.T)));
    const std::size_t n_freq = grid.size();
    const std::size_t n_mc = static_cast<std::size_t>(design.n_mc);

    std::vector<std::uint8_t> trial_failed(n_mc, 0);
    std::vector<std::uint8_t> trial_overall(n_mc, 0);
    std::vector<std::vector<std::uint8_t>> rejected(n_mc);
    std::vector<std::vector<std::uint8_t>> prominent(n_mc);
    std::vector<std::vector<std::uint8_t>> above_median(n_mc);

    parallel_for(n_mc, config.exec, [&](std::size_t trial) {
        const std::uint64_t trial_seed = substream_seed(config.seed, trial);
        BootstrapConfig trial_config = config;
        trial_config.seed = substream_seed(trial_seed, 1);
        trial_config.grid_M = grid.M;

        try {
            const MultiSeries data = simulate_var(design, trial_seed);
            TestResult result;
            switch (design.functional) {
            case TestFunctional::Unconditional:
                result = test_unconditional(data.values.col(0), data.values.col(1),
                                            trial_config);
                break;
            case TestFunctional::Conditional:
                result = test_conditional(data.values.col(0), data.values.col(1),
                                          data.values.col(2), trial_config);
                break;
            case TestFunctional::Difference:
                result = test_difference(data.values.col(0), data.values.col(1),
                                         data.values.col(2), trial_config);
                break;
            }

            const double q_prom = empirical_quantile(result.boot_medians, 1.0 - config.alpha);
            const double q_med = empirical_quantile(result.boot_medians, 0.5);
            rejected[trial] = result.flags;
            prominent[trial].resize(n_freq);
            above_median[trial].resize(n_freq);
            for (std::size_t i = 0; i < n_freq; ++i) {
                const double v = result.spectrum.values[i];
                prominent[trial][i] = v > q_prom;
                above_median[trial][i] = v > q_med;
            }
            trial_overall[trial] = result.overall_significant;
        } catch (const Error&) {
            trial_failed[trial] = 1;
        }
    });

    int n_failed = 0;
    for (const auto f : trial_failed) n_failed += f;
    if (n_failed * 10 > design.n_mc)
        fail("SIM_TRIALS_FAILED", std::to_string(n_failed) + " of "
             + std::to_string(design.n_mc) + " Monte Carlo trials failed");

    SimReport report;
    report.design_name = design.name;
    report.grid = grid;
    report.seed = config.seed;
    report.n_trials_failed = n_failed;
    report.rejection_rate.assign(n_freq, 0.0);
    report.prominence_rate.assign(n_freq, 0.0);
    report.degree_of_prominence.assign(n_freq, 0.0);

    const double n_ok = static_cast<double>(design.n_mc - n_failed);
    double overall = 0.0;
    for (std::size_t trial = 0; trial < n_mc; ++trial) {
        if (trial_failed[trial]) continue;
        overall += trial_overall[trial];
        for (std::size_t i = 0; i < n_freq; ++i) {
            report.rejection_rate[i] += rejected[trial][i];
            report.prominence_rate[i] += prominent[trial][i];
            report.degree_of_prominence[i] += above_median[trial][i];
        }
    }
    for (std::size_t i = 0; i < n_freq; ++i) {
        report.rejection_rate[i] /= n_ok;
        report.prominence_rate[i] /= n_ok;
        report.degree_of_prominence[i] /= n_ok;
    }
    report.overall_bonferroni_rate = overall / n_ok;
    return report;
}

std::vector<SimDesign> builtin_designs()
{
    const Eigen::Matrix2d eye = Eigen::Matrix2d::Identity();
    const double pi = std::numbers::pi;

    std::vector<SimDesign> designs;

    // Jointly-tested cases, in the catalogue's fixed order.
    designs.push_back(bivariate_design(
        "case1_decreasing_half",
        (Eigen::Matrix2d() << 0.0, 0.5, 0.0, 0.5).finished(), eye));
    designs.push_back(bivariate_design(
        "case2_boundary_unit",
        (Eigen::Matrix2d() << 0.0, 1.0, 0.0, 1.0).finished(), eye, true));
    {
        SimDesign d;
        d.name = "case3_white_noise";
        d.k = 1;
        d.A = {Eigen::MatrixXd::Zero(3, 3)};
        d.Sigma = Eigen::MatrixXd::Identity(3, 3);
        designs.push_back(d);
    }
    designs.push_back(breitung_design("case4_breitung_pi2", pi / 2.0, 0.0, {1.0, 1.0}));
    designs.push_back(breitung_design("case5_breitung_pi2_sigma5", pi / 2.0, 0.0, {5.0, 1.0}));
    designs.push_back(breitung_design("case6_breitung_pi2_sigma02", pi / 2.0, 0.0, {0.2, 1.0}));
    designs.push_back(breitung_design("case7_breitung_pi2_unitroot", pi / 2.0, 0.5, {1.0, 1.0}));

    // Level study: diagonal autoregressions without causality.
    for (const double a : {0.2, 0.5, 0.8})
        designs.push_back(bivariate_design(
            "diag_" + std::to_string(static_cast<int>(a * 10)),
            (Eigen::Matrix2d() << a, 0.0, 0.0, a).finished(), eye));
    designs.push_back(bivariate_design("double_random_walk", eye, eye, true));

    // Remaining Breitung null frequencies.
    designs.push_back(breitung_design("breitung_0", 0.0, 0.0, {1.0, 1.0}));
    designs.push_back(breitung_design("breitung_pi4", pi / 4.0, 0.0, {1.0, 1.0}));
    designs.push_back(breitung_design("breitung_3pi4", 3.0 * pi / 4.0, 0.0, {1.0, 1.0}));
    designs.push_back(breitung_design("breitung_pi", pi, 0.0, {1.0, 1.0}));
    designs.push_back(breitung_design("breitung_pi2_a22_025", pi / 2.0, 0.25, {1.0, 1.0}));

    // Conditional and difference functionals.
    {
        SimDesign d;
        d.name = "cond_white_noise";
        d.k = 1;
        d.A = {Eigen::MatrixXd::Zero(3, 3)};
        d.Sigma = Eigen::MatrixXd::Identity(3, 3);
        d.functional = TestFunctional::Conditional;
        designs.push_back(d);
    }
    {
        SimDesign d;
        d.name = "diff_white_noise";
        d.k = 1;
        d.A = {Eigen::MatrixXd::Zero(3, 3)};
        d.Sigma = Eigen::MatrixXd::Identity(3, 3);
        d.functional = TestFunctional::Difference;
        designs.push_back(d);
    }
    {
        // Suppression: the cause enters the effect equation but its
        // marginal predictive content is cancelled through the
        // conditioning innovations, so only the conditional link shows.
        SimDesign d;
        d.name = "diff_suppressed_one";
        d.k = 1;
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, 3);
        a(0, 1) = 1.0;
        a(0, 2) = 1.0;
        d.A = {a};
        d.Sigma = (Eigen::MatrixXd(3, 3) << 1, 0, 0, 0, 1, -1, 0, -1, 2).finished();
        d.functional = TestFunctional::Difference;
        designs.push_back(d);
    }

    return designs;
}

} // namespace gcspec
