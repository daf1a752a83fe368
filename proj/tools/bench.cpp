// Times the serial reference path against the OpenMP path on the
// bootstrap engine and verifies both produce identical results.
#include <chrono>
#include <cstdio>

#include "gcspec/bootstrap.hpp"
#include "gcspec/sim.hpp"

using namespace gcspec;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

Eigen::VectorXd noise(Eigen::Index T, std::uint64_t seed)
{
    Rng rng(seed);
    Eigen::VectorXd v(T);
    for (Eigen::Index t = 0; t < T; ++t) v(t) = rng.normal();
    return v;
}

} // namespace

int main()
{
    const Eigen::Index T = 200;
    const Eigen::VectorXd x = noise(T, 1);
    const Eigen::VectorXd y = noise(T, 2);
    const Eigen::VectorXd w = noise(T, 3);

    BootstrapConfig config;
    config.n_boot = 2000;
    config.seed = 42;

    // spin up the OpenMP pool so the first timed row is not charged for it
    parallel_for(64, Exec::Parallel, [](std::size_t) {});

    std::printf("%-28s %10s %10s %8s %s\n", "kernel", "serial[s]", "openmp[s]", "speedup",
                "identical");

    struct Case {
        const char* name;
        TestResult (*run)(const Eigen::VectorXd&, const Eigen::VectorXd&,
                          const Eigen::VectorXd&, const BootstrapConfig&);
    };
    const Case cases[] = {
        {"test_unconditional",
         [](const Eigen::VectorXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd&,
            const BootstrapConfig& c) { return test_unconditional(a, b, c); }},
        {"test_conditional",
         [](const Eigen::VectorXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c_,
            const BootstrapConfig& c) { return test_conditional(a, b, c_, c); }},
        {"test_difference",
         [](const Eigen::VectorXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c_,
            const BootstrapConfig& c) { return test_difference(a, b, c_, c); }},
    };

    for (const auto& test_case : cases) {
        BootstrapConfig serial = config;
        serial.exec = Exec::Serial;
        auto start = Clock::now();
        const TestResult serial_result = test_case.run(x, y, w, serial);
        const double serial_time = seconds_since(start);

        BootstrapConfig parallel = config;
        parallel.exec = Exec::Parallel;
        start = Clock::now();
        const TestResult parallel_result = test_case.run(x, y, w, parallel);
        const double parallel_time = seconds_since(start);

        std::printf("%-28s %10.3f %10.3f %7.2fx %s\n", test_case.name, serial_time,
                    parallel_time, serial_time / parallel_time,
                    serial_result == parallel_result ? "yes" : "NO");
    }

    // Monte Carlo harness over trials
    SimDesign design;
    design.name = "bench_white_noise";
    design.k = 1;
    design.A = {Eigen::MatrixXd::Zero(2, 2)};
    design.Sigma = Eigen::MatrixXd::Identity(2, 2);
    design.T = 150;
    design.n_mc = 50;

    BootstrapConfig sim_config;
    sim_config.n_boot = 200;
    sim_config.seed = 7;
    sim_config.grid_M = 40;

    sim_config.exec = Exec::Serial;
    auto start = Clock::now();
    const SimReport serial_report = run_design(design, sim_config);
    const double serial_time = seconds_since(start);

    sim_config.exec = Exec::Parallel;
    start = Clock::now();
    const SimReport parallel_report = run_design(design, sim_config);
    const double parallel_time = seconds_since(start);

    const bool same = serial_report.rejection_rate == parallel_report.rejection_rate
                      && serial_report.overall_bonferroni_rate
                             == parallel_report.overall_bonferroni_rate;
    std::printf("%-28s %10.3f %10.3f %7.2fx %s\n", "run_design", serial_time, parallel_time,
                serial_time / parallel_time, same ? "yes" : "NO");
    return 0;
}
