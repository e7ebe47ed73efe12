#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace treecascade {

/// n x d observations with column names. When `standardized` is set, `means`
/// and `scales` hold the per-column shift and sample standard deviation that
/// were removed.
struct Dataset {
    std::vector<std::string> names;
    Eigen::MatrixXd values;
    bool standardized = false;
    std::vector<double> means;
    std::vector<double> scales;

    std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
    std::size_t cols() const { return static_cast<std::size_t>(values.cols()); }
};

/// "x0", "x1", ...
std::vector<std::string> default_column_names(std::size_t d);

}  // namespace treecascade
