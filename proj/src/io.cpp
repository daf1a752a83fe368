#include "gcspec/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace gcspec {

namespace {

std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' '))
            cell.pop_back();
        std::size_t start = 0;
        while (start < cell.size() && cell[start] == ' ') ++start;
        cells.push_back(cell.substr(start));
    }
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

bool parse_double(const std::string& cell, double& out)
{
    if (cell.empty()) return false;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

double parse_cell(const std::string& cell, std::size_t row, std::size_t col)
{
    double value = 0.0;
    if (!parse_double(cell, value))
        fail("IO_NON_NUMERIC", "non-numeric cell '" + cell + "' at row "
             + std::to_string(row) + ", column " + std::to_string(col));
    return value;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, Eigen::Index p)
{
    Eigen::MatrixXd m(p, p);
    if (j.is_array() && !j.empty() && j.front().is_array()) {
        for (Eigen::Index r = 0; r < p; ++r)
            for (Eigen::Index c = 0; c < p; ++c)
                m(r, c) = j.at(r).at(c).get<double>();
    } else {
        // row-major flat array
        for (Eigen::Index r = 0; r < p; ++r)
            for (Eigen::Index c = 0; c < p; ++c)
                m(r, c) = j.at(r * p + c).get<double>();
    }
    return m;
}

nlohmann::json frequencies_json(const FrequencyGrid& grid, double scale)
{
    nlohmann::json freqs = nlohmann::json::array();
    for (const double f : grid.freqs) freqs.push_back(f * scale);
    return freqs;
}

const char* kind_name(SpectrumKind kind)
{
    switch (kind) {
    case SpectrumKind::Unconditional: return "unconditional";
    case SpectrumKind::Conditional: return "conditional";
    case SpectrumKind::Difference: return "difference";
    }
    return "unknown";
}

} // namespace

CsvPanel ingest_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) fail("IO_PARSE_ERROR", "cannot open '" + path + "'");

    std::string line;
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        rows.push_back(split_csv_line(line));
    }
    if (rows.size() < 2) fail("IO_PARSE_ERROR", "need a header row and at least one data row");

    const std::size_t width = rows.front().size();
    for (std::size_t r = 1; r < rows.size(); ++r)
        if (rows[r].size() != width)
            fail("IO_PARSE_ERROR", "row " + std::to_string(r + 1) + " has "
                 + std::to_string(rows[r].size()) + " cells, expected "
                 + std::to_string(width));

    // A non-numeric first cell in the first data row marks a label column.
    double probe = 0.0;
    const bool has_labels = width > 1 && !parse_double(rows[1][0], probe);
    const std::size_t first_data_col = has_labels ? 1 : 0;
    const std::size_t p = width - first_data_col;
    if (p == 0) fail("IO_PARSE_ERROR", "no numeric columns found");

    CsvPanel panel;
    const std::size_t T = rows.size() - 1;
    Eigen::MatrixXd values(static_cast<Eigen::Index>(T), static_cast<Eigen::Index>(p));
    std::vector<std::string> names(rows.front().begin() + static_cast<std::ptrdiff_t>(first_data_col),
                                   rows.front().end());
    for (std::size_t r = 0; r < T; ++r) {
        if (has_labels) panel.row_labels.push_back(rows[r + 1][0]);
        for (std::size_t c = 0; c < p; ++c)
            values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                parse_cell(rows[r + 1][c + first_data_col], r + 2, c + first_data_col + 1);
    }
    panel.series = MultiSeries(std::move(names), std::move(values));
    return panel;
}

MultiSeries quarterly_average(const MultiSeries& series)
{
    const Eigen::Index T = series.length();
    const Eigen::Index quarters = T / 3;
    if (quarters < 1) fail("IO_PARSE_ERROR", "fewer than three rows to average");
    Eigen::MatrixXd out(quarters, series.width());
    for (Eigen::Index q = 0; q < quarters; ++q)
        out.row(q) = (series.values.row(3 * q) + series.values.row(3 * q + 1)
                      + series.values.row(3 * q + 2)) / 3.0;
    return MultiSeries(series.names, std::move(out));
}

MultiSeries log_transform(const MultiSeries& series)
{
    if ((series.values.array() <= 0.0).any())
        fail("IO_NON_NUMERIC", "log transform needs strictly positive values");
    return MultiSeries(series.names, series.values.array().log().matrix());
}

std::vector<SimDesign> load_designs(const std::string& path)
{
    std::ifstream in(path);
    if (!in) fail("IO_PARSE_ERROR", "cannot open '" + path + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        fail("IO_PARSE_ERROR", std::string("design file: ") + e.what());
    }

    std::vector<SimDesign> designs;
    try {
        for (const auto& j : doc) {
            SimDesign d;
            d.name = j.at("name").get<std::string>();
            d.k = j.at("k").get<int>();

            const auto& sigma = j.at("sigma");
            if (sigma.is_object() && sigma.contains("diag")) {
                const auto diag = sigma.at("diag").get<std::vector<double>>();
                const Eigen::Index p = static_cast<Eigen::Index>(diag.size());
                d.Sigma = Eigen::MatrixXd::Zero(p, p);
                for (Eigen::Index i = 0; i < p; ++i) d.Sigma(i, i) = diag[static_cast<std::size_t>(i)];
            } else {
                const Eigen::Index p = static_cast<Eigen::Index>(sigma.size());
                d.Sigma = matrix_from_json(sigma, p);
            }

            const Eigen::Index p = d.Sigma.rows();
            for (const auto& a : j.at("A")) d.A.push_back(matrix_from_json(a, p));

            if (j.contains("T")) d.T = j.at("T").get<Eigen::Index>();
            if (j.contains("n_mc")) d.n_mc = j.at("n_mc").get<int>();
            if (j.contains("burn_in")) d.burn_in = j.at("burn_in").get<Eigen::Index>();
            if (j.contains("allow_boundary")) d.allow_boundary = j.at("allow_boundary").get<bool>();
            if (j.contains("functional")) {
                const std::string f = j.at("functional").get<std::string>();
                if (f == "unconditional") d.functional = TestFunctional::Unconditional;
                else if (f == "conditional") d.functional = TestFunctional::Conditional;
                else if (f == "difference") d.functional = TestFunctional::Difference;
                else fail("IO_PARSE_ERROR", "unknown functional '" + f + "'");
            }
            designs.push_back(std::move(d));
        }
    } catch (const nlohmann::json::exception& e) {
        fail("IO_PARSE_ERROR", std::string("design file: ") + e.what());
    }
    return designs;
}

std::string format_double(double value)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

nlohmann::json spectrum_json(const SpectrumResult& result, double display_scale)
{
    return {
        {"kind", kind_name(result.kind)},
        {"grid_base", result.grid.M},
        {"frequency_scale", display_scale},
        {"frequencies", frequencies_json(result.grid, display_scale)},
        {"values", result.values},
    };
}

std::string spectrum_csv(const SpectrumResult& result, double display_scale)
{
    std::string out = "frequency,value\n";
    for (std::size_t i = 0; i < result.values.size(); ++i) {
        out += format_double(result.grid.freqs[i] * display_scale);
        out += ',';
        out += format_double(result.values[i]);
        out += '\n';
    }
    return out;
}

nlohmann::json test_json(const TestResult& result, double display_scale)
{
    const auto as_booleans = [](const std::vector<std::uint8_t>& flags) {
        nlohmann::json out = nlohmann::json::array();
        for (const auto f : flags) out.push_back(f != 0);
        return out;
    };
    nlohmann::json j = spectrum_json(result.spectrum, display_scale);
    j["q_upper"] = result.q_upper;
    if (result.q_lower) j["q_lower"] = *result.q_lower;
    j["significant"] = as_booleans(result.flags);
    j["bonferroni_significant"] = as_booleans(result.bonferroni_flags);
    j["overall_significant"] = result.overall_significant;
    j["n_failed_replicates"] = result.n_failed_replicates;
    j["quantile_warning"] = result.quantile_warning;
    return j;
}

std::string test_csv(const TestResult& result, double display_scale)
{
    std::string out = "frequency,value,q_upper,q_lower,significant,bonferroni_significant\n";
    const std::string q_upper = format_double(result.q_upper);
    const std::string q_lower = result.q_lower ? format_double(*result.q_lower) : "";
    for (std::size_t i = 0; i < result.spectrum.values.size(); ++i) {
        out += format_double(result.spectrum.grid.freqs[i] * display_scale);
        out += ',';
        out += format_double(result.spectrum.values[i]);
        out += ',';
        out += q_upper;
        out += ',';
        out += q_lower;
        out += ',';
        out += result.flags[i] ? '1' : '0';
        out += ',';
        out += result.bonferroni_flags[i] ? '1' : '0';
        out += '\n';
    }
    return out;
}

nlohmann::json bc_json(const BcResult& result, double display_scale)
{
    nlohmann::json df1 = nlohmann::json::array();
    nlohmann::json df2 = nlohmann::json::array();
    for (const auto& [a, b] : result.df) {
        df1.push_back(a);
        df2.push_back(b);
    }
    return {
        {"k", result.k},
        {"frequency_scale", display_scale},
        {"frequencies", frequencies_json(result.grid, display_scale)},
        {"f_statistics", result.f_stats},
        {"p_values", result.p_values},
        {"df1", df1},
        {"df2", df2},
    };
}

std::string bc_csv(const BcResult& result, double display_scale)
{
    std::string out = "frequency,f_statistic,p_value,df1,df2\n";
    for (std::size_t i = 0; i < result.f_stats.size(); ++i) {
        out += format_double(result.grid.freqs[i] * display_scale);
        out += ',';
        out += format_double(result.f_stats[i]);
        out += ',';
        out += format_double(result.p_values[i]);
        out += ',';
        out += std::to_string(result.df[i].first);
        out += ',';
        out += std::to_string(result.df[i].second);
        out += '\n';
    }
    return out;
}

nlohmann::json sim_json(const SimReport& report, double display_scale)
{
    return {
        {"design", report.design_name},
        {"seed", report.seed},
        {"frequency_scale", display_scale},
        {"frequencies", frequencies_json(report.grid, display_scale)},
        {"rejection_rate", report.rejection_rate},
        {"prominence_rate", report.prominence_rate},
        {"degree_of_prominence", report.degree_of_prominence},
        {"overall_bonferroni_rate", report.overall_bonferroni_rate},
        {"n_trials_failed", report.n_trials_failed},
    };
}

std::string sim_csv(const SimReport& report, double display_scale)
{
    std::string out = "frequency,rejection_rate,prominence_rate,degree_of_prominence\n";
    for (std::size_t i = 0; i < report.rejection_rate.size(); ++i) {
        out += format_double(report.grid.freqs[i] * display_scale);
        out += ',';
        out += format_double(report.rejection_rate[i]);
        out += ',';
        out += format_double(report.prominence_rate[i]);
        out += ',';
        out += format_double(report.degree_of_prominence[i]);
        out += '\n';
    }
    return out;
}

nlohmann::json hp_json(const MultiSeries& input, const std::vector<HpDecomposition>& parts,
                       const std::vector<std::string>& row_labels)
{
    nlohmann::json columns = nlohmann::json::object();
    for (std::size_t c = 0; c < parts.size(); ++c) {
        const auto& part = parts[c];
        columns[input.names[c]] = {
            {"trend", std::vector<double>(part.trend.begin(), part.trend.end())},
            {"cycle", std::vector<double>(part.cycle.begin(), part.cycle.end())},
        };
    }
    nlohmann::json j = {{"lambda", parts.empty() ? 0.0 : parts.front().lambda},
                        {"columns", columns}};
    if (!row_labels.empty()) j["labels"] = row_labels;
    return j;
}

std::string hp_csv(const MultiSeries& input, const std::vector<HpDecomposition>& parts,
                   const std::vector<std::string>& row_labels)
{
    std::string out = row_labels.empty() ? "t" : "label";
    for (const auto& name : input.names) {
        out += ",trend_" + name + ",cycle_" + name;
    }
    out += '\n';
    for (Eigen::Index t = 0; t < input.length(); ++t) {
        out += row_labels.empty() ? std::to_string(t + 1)
                                  : row_labels[static_cast<std::size_t>(t)];
        for (const auto& part : parts) {
            out += ',';
            out += format_double(part.trend(t));
            out += ',';
            out += format_double(part.cycle(t));
        }
        out += '\n';
    }
    return out;
}

} // namespace gcspec
