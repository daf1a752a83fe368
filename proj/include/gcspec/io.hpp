#ifndef GCSPEC_IO_HPP
#define GCSPEC_IO_HPP

#include <string>
#include <vector>

#include "gcspec/bc_test.hpp"
#include "gcspec/bootstrap.hpp"
#include "gcspec/hp_filter.hpp"
#include "gcspec/sim.hpp"

#include <json.hpp>

namespace gcspec {

// Parsed CSV panel: header-named numeric columns plus the optional
// leading date-label column (empty when the file has none).
struct CsvPanel {
    MultiSeries series;
    std::vector<std::string> row_labels;
};

// UTF-8 CSV, first row headers, optional non-numeric first column of
// labels, every other cell strictly numeric. Errors carry 1-based
// row/column coordinates.
CsvPanel ingest_csv(const std::string& path);

// Collapses complete groups of three rows into their mean; trailing
// partial groups are dropped.
MultiSeries quarterly_average(const MultiSeries& series);

MultiSeries log_transform(const MultiSeries& series);

// Declarative design catalogue (JSON array); see README for the schema.
std::vector<SimDesign> load_designs(const std::string& path);

// Machine-readable emitters. The display_scale factor multiplies
// reported frequencies and never touches computation.
nlohmann::json spectrum_json(const SpectrumResult& result, double display_scale);
std::string spectrum_csv(const SpectrumResult& result, double display_scale);

nlohmann::json test_json(const TestResult& result, double display_scale);
std::string test_csv(const TestResult& result, double display_scale);

nlohmann::json bc_json(const BcResult& result, double display_scale);
std::string bc_csv(const BcResult& result, double display_scale);

nlohmann::json sim_json(const SimReport& report, double display_scale);
std::string sim_csv(const SimReport& report, double display_scale);

nlohmann::json hp_json(const MultiSeries& input, const std::vector<HpDecomposition>& parts,
                       const std::vector<std::string>& row_labels);
std::string hp_csv(const MultiSeries& input, const std::vector<HpDecomposition>& parts,
                   const std::vector<std::string>& row_labels);

std::string format_double(double value);

} // namespace gcspec

#endif
