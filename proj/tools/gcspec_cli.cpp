// Command-line front end: CSV in, JSON/CSV out, deterministic under --seed.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "gcspec/io.hpp"

namespace {

using namespace gcspec;

struct CommonOptions {
    std::string input;
    std::string output;
    std::string format = "json";
    std::string effect;
    std::string cause;
    std::string conditioning;
    bool take_logs = false;
    bool quarterly = false;
    double hp_lambda = 0.0; // 0 disables the filter
    double freq_scale = 1.0;
    int k = 0;              // 0 means BIC selection
    int k_max = 4;
    bool no_intercept = false;
    int grid_m = 0;
    int threads = 0;
};

struct BootOptions {
    int n_boot = 1000;
    double alpha = 0.05;
    double block_length = 0.0; // 0 means ceil(T^(1/3))
    std::uint64_t seed = 0;
    std::string lag_policy = "fixed";
};

void add_common(CLI::App* cmd, CommonOptions& opt, bool needs_cause)
{
    cmd->add_option("--input", opt.input, "input CSV path")->required();
    cmd->add_option("--output", opt.output, "output path (default stdout)");
    cmd->add_option("--format", opt.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--effect", opt.effect, "effect column")->required();
    if (needs_cause) cmd->add_option("--cause", opt.cause, "cause column")->required();
    cmd->add_option("--cond", opt.conditioning, "conditioning column");
    cmd->add_flag("--log", opt.take_logs, "log-transform before analysis");
    cmd->add_flag("--quarterly-average", opt.quarterly,
                  "collapse monthly rows to quarterly means");
    cmd->add_option("--hp-lambda", opt.hp_lambda,
                    "extract HP cycles with this smoothing parameter (1600 for quarterly)");
    cmd->add_option("--freq-scale", opt.freq_scale,
                    "multiply reported frequencies for display");
    cmd->add_option("--k", opt.k, "fixed VAR lag order (default: BIC selection)");
    cmd->add_option("--k-max", opt.k_max, "BIC lag bound");
    cmd->add_flag("--no-intercept", opt.no_intercept, "fit without an intercept");
    cmd->add_option("--grid-m", opt.grid_m, "Fourier grid base M (default T)");
    cmd->add_option("--threads", opt.threads, "worker threads (or GCSPEC_THREADS)");
}

void add_boot(CLI::App* cmd, BootOptions& opt)
{
    cmd->add_option("--n-boot", opt.n_boot, "bootstrap replicates");
    cmd->add_option("--alpha", opt.alpha, "significance level");
    cmd->add_option("--block-length", opt.block_length,
                    "mean bootstrap block length (default ceil(T^(1/3)))");
    cmd->add_option("--seed", opt.seed, "RNG seed; fixes output bytes");
    cmd->add_option("--lag-policy", opt.lag_policy, "fixed or reselect")
        ->check(CLI::IsMember({"fixed", "reselect"}));
}

MultiSeries load_panel(const CommonOptions& opt)
{
    MultiSeries series = ingest_csv(opt.input).series;
    if (opt.quarterly) series = quarterly_average(series);
    if (opt.take_logs) series = log_transform(series);
    if (opt.hp_lambda > 0.0) {
        Eigen::MatrixXd cycles(series.length(), series.width());
        for (Eigen::Index c = 0; c < series.width(); ++c)
            cycles.col(c) = hp_filter(series.values.col(c), opt.hp_lambda).cycle;
        series = MultiSeries(series.names, std::move(cycles));
    }
    return series;
}

SpectrumConfig spectrum_config(const CommonOptions& opt)
{
    SpectrumConfig config;
    if (opt.k > 0) config.fixed_k = opt.k;
    config.k_max = opt.k_max;
    config.with_intercept = !opt.no_intercept;
    if (opt.grid_m > 0) config.grid_M = opt.grid_m;
    return config;
}

BootstrapConfig bootstrap_config(const CommonOptions& common, const BootOptions& boot)
{
    BootstrapConfig config;
    config.n_boot = boot.n_boot;
    config.alpha = boot.alpha;
    if (boot.block_length > 0.0) config.expected_block_length = boot.block_length;
    config.seed = boot.seed;
    config.lag_policy = boot.lag_policy == "reselect" ? LagPolicy::ReselectPerReplicate
                                                      : LagPolicy::FixedFromData;
    config.k_max = common.k_max;
    config.with_intercept = !common.no_intercept;
    if (common.grid_m > 0) config.grid_M = common.grid_m;
    return config;
}

void emit(const CommonOptions& opt, const nlohmann::json& as_json, const std::string& as_csv)
{
    std::string payload;
    if (opt.format == "json")
        payload = as_json.dump(2) + "\n";
    else
        payload = as_csv;

    if (opt.output.empty()) {
        std::cout << payload;
        return;
    }
    std::ofstream out(opt.output, std::ios::binary);
    if (!out) fail("IO_PARSE_ERROR", "cannot write '" + opt.output + "'");
    out << payload;
}

void apply_threads(const CommonOptions& opt)
{
    if (opt.threads > 0) set_max_threads(opt.threads);
}

int run(int argc, char** argv)
{
    CLI::App app{"Frequency-domain Granger-causality spectra and bootstrap prominence tests"};
    app.require_subcommand(1);

    CommonOptions opt;
    BootOptions boot;
    bool difference = false;
    std::string design_name;
    std::string design_file;
    bool list_designs = false;
    double hp_only_lambda = 1600.0;

    CLI::App* cmd_spectrum = app.add_subcommand("spectrum", "causality spectrum of a fitted VAR");
    add_common(cmd_spectrum, opt, true);
    cmd_spectrum->add_flag("--difference", difference,
                           "emit the unconditional-minus-conditional spectrum");

    CLI::App* cmd_uncond = app.add_subcommand("test-uncond", "bootstrap prominence test");
    add_common(cmd_uncond, opt, true);
    add_boot(cmd_uncond, boot);

    CLI::App* cmd_cond = app.add_subcommand("test-cond", "conditional prominence test");
    add_common(cmd_cond, opt, true);
    add_boot(cmd_cond, boot);

    CLI::App* cmd_diff = app.add_subcommand("test-diff", "two-sided test of the spectrum difference");
    add_common(cmd_diff, opt, true);
    add_boot(cmd_diff, boot);

    CLI::App* cmd_bc = app.add_subcommand("bc-test", "parametric frequency-domain F-test");
    add_common(cmd_bc, opt, true);

    CLI::App* cmd_sim = app.add_subcommand("simulate", "Monte Carlo study of a design");
    cmd_sim->add_option("--design", design_name, "builtin or loaded design name");
    cmd_sim->add_option("--design-file", design_file, "JSON design catalogue");
    cmd_sim->add_flag("--list-designs", list_designs, "print available designs and exit");
    cmd_sim->add_option("--output", opt.output, "output path (default stdout)");
    cmd_sim->add_option("--format", opt.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd_sim->add_option("--freq-scale", opt.freq_scale, "frequency display factor");
    cmd_sim->add_option("--grid-m", opt.grid_m, "Fourier grid base M (default T)");
    cmd_sim->add_option("--k-max", opt.k_max, "BIC lag bound");
    cmd_sim->add_option("--threads", opt.threads, "worker threads");
    add_boot(cmd_sim, boot);

    CLI::App* cmd_hp = app.add_subcommand("hp-filter", "trend/cycle decomposition");
    cmd_hp->add_option("--input", opt.input, "input CSV path")->required();
    cmd_hp->add_option("--output", opt.output, "output path (default stdout)");
    cmd_hp->add_option("--format", opt.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd_hp->add_option("--lambda", hp_only_lambda, "smoothing parameter");
    cmd_hp->add_flag("--log", opt.take_logs, "log-transform first");
    cmd_hp->add_flag("--quarterly-average", opt.quarterly, "quarterly means first");

    CLI11_PARSE(app, argc, argv);
    apply_threads(opt);

    if (cmd_spectrum->parsed()) {
        const MultiSeries data = load_panel(opt);
        Roles roles{opt.effect, opt.cause, std::nullopt};
        if (!opt.conditioning.empty()) roles.conditioning = opt.conditioning;
        SpectrumConfig config = spectrum_config(opt);
        config.difference = difference;
        const SpectrumResult result = gc_spectrum(data, roles, config);
        emit(opt, spectrum_json(result, opt.freq_scale), spectrum_csv(result, opt.freq_scale));
        return 0;
    }

    if (cmd_uncond->parsed() || cmd_cond->parsed() || cmd_diff->parsed()) {
        const MultiSeries data = load_panel(opt);
        BootstrapConfig config = bootstrap_config(opt, boot);
        const Eigen::VectorXd x = data.values.col(data.column_index(opt.effect));
        const Eigen::VectorXd y = data.values.col(data.column_index(opt.cause));

        TestResult result;
        if (cmd_uncond->parsed()) {
            result = test_unconditional(x, y, config);
        } else {
            if (opt.conditioning.empty())
                fail("IO_MISSING_COLUMN", "conditional tests need --cond");
            const Eigen::VectorXd w = data.values.col(data.column_index(opt.conditioning));
            result = cmd_cond->parsed() ? test_conditional(x, y, w, config)
                                        : test_difference(x, y, w, config);
        }
        if (result.quantile_warning)
            std::cerr << "warning: QUANTILE_UNSTABLE: Bonferroni quantile under-resolved;"
                         " raise --n-boot\n";
        emit(opt, test_json(result, opt.freq_scale), test_csv(result, opt.freq_scale));
        return 0;
    }

    if (cmd_bc->parsed()) {
        const MultiSeries data = load_panel(opt);
        const Eigen::VectorXd x = data.values.col(data.column_index(opt.effect));
        const Eigen::VectorXd y = data.values.col(data.column_index(opt.cause));

        std::vector<std::string> fit_columns = {opt.effect, opt.cause};
        if (!opt.conditioning.empty()) fit_columns.push_back(opt.conditioning);
        const int k = opt.k > 0
                          ? opt.k
                          : select_lag_bic(data.select(fit_columns), opt.k_max,
                                           !opt.no_intercept).chosen_k;
        const int grid_m = opt.grid_m > 0 ? opt.grid_m : static_cast<int>(data.length());
        const FrequencyGrid grid = FrequencyGrid::fourier(grid_m);

        BcResult result;
        if (opt.conditioning.empty()) {
            result = bc_test(x, y, k, grid);
        } else {
            const Eigen::VectorXd w = data.values.col(data.column_index(opt.conditioning));
            result = bc_test_conditional(x, y, w, k, grid);
        }
        emit(opt, bc_json(result, opt.freq_scale), bc_csv(result, opt.freq_scale));
        return 0;
    }

    if (cmd_sim->parsed()) {
        std::vector<SimDesign> designs = builtin_designs();
        if (!design_file.empty()) {
            const std::vector<SimDesign> loaded = load_designs(design_file);
            designs.insert(designs.end(), loaded.begin(), loaded.end());
        }
        if (list_designs) {
            nlohmann::json names = nlohmann::json::array();
            for (const auto& d : designs) names.push_back(d.name);
            std::cout << names.dump(2) << "\n";
            return 0;
        }
        if (design_name.empty()) fail("SIM_BAD_DESIGN", "pass --design or --list-designs");

        const SimDesign* chosen = nullptr;
        for (const auto& d : designs)
            if (d.name == design_name) chosen = &d;
        if (!chosen) fail("SIM_BAD_DESIGN", "no design named '" + design_name + "'");

        BootstrapConfig config = bootstrap_config(opt, boot);
        const SimReport report = run_design(*chosen, config);
        emit(opt, sim_json(report, opt.freq_scale), sim_csv(report, opt.freq_scale));
        return 0;
    }

    if (cmd_hp->parsed()) {
        const CsvPanel panel = ingest_csv(opt.input);
        MultiSeries series = panel.series;
        std::vector<std::string> labels = panel.row_labels;
        if (opt.quarterly) {
            series = quarterly_average(series);
            labels.clear(); // per-quarter labels are not derivable from monthly ones
        }
        if (opt.take_logs) series = log_transform(series);

        std::vector<HpDecomposition> parts;
        for (Eigen::Index c = 0; c < series.width(); ++c)
            parts.push_back(hp_filter(series.values.col(c), hp_only_lambda));
        emit(opt, hp_json(series, parts, labels), hp_csv(series, parts, labels));
        return 0;
    }

    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    try {
        return run(argc, argv);
    } catch (const gcspec::Error& e) {
        const nlohmann::json error = {{"error", {{"code", e.code()}, {"message", e.what()}}}};
        std::cerr << error.dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        const nlohmann::json error = {{"error", {{"code", "INTERNAL"}, {"message", e.what()}}}};
        std::cerr << error.dump() << "\n";
        return 1;
    }
}
