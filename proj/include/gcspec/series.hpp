#ifndef GCSPEC_SERIES_HPP
#define GCSPEC_SERIES_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "gcspec/errors.hpp"

namespace gcspec {

// A length-T panel of named real series on one sampling grid.
// values is T x p, one column per series.
struct MultiSeries {
    std::vector<std::string> names;
    Eigen::MatrixXd values;

    MultiSeries() = default;
    MultiSeries(std::vector<std::string> names_, Eigen::MatrixXd values_)
        : names(std::move(names_)), values(std::move(values_))
    {
        if (values.rows() < 1 || values.cols() < 1)
            fail("SERIES_EMPTY", "series panel must have at least one row and column");
        if (names.size() != static_cast<std::size_t>(values.cols()))
            fail("SERIES_NAME_MISMATCH", "one name per column required");
        if (!values.allFinite())
            fail("SERIES_NON_FINITE", "series contain NaN or infinite values");
    }

    Eigen::Index length() const { return values.rows(); }
    Eigen::Index width() const { return values.cols(); }

    Eigen::Index column_index(const std::string& name) const
    {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return static_cast<Eigen::Index>(i);
        fail("IO_MISSING_COLUMN", "no column named '" + name + "'");
    }

    // Panel restricted to the given columns, in the given order.
    MultiSeries select(const std::vector<std::string>& which) const
    {
        Eigen::MatrixXd out(values.rows(), static_cast<Eigen::Index>(which.size()));
        for (std::size_t i = 0; i < which.size(); ++i)
            out.col(static_cast<Eigen::Index>(i)) = values.col(column_index(which[i]));
        return MultiSeries(which, std::move(out));
    }
};

} // namespace gcspec

#endif
