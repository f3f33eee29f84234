#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace pem {

/// Renders a double with 17 significant digits (round-trip exact).
std::string format_number(double value);

/// Writes a CSV file with the given header and rows, rendering every cell
/// at full precision. Rows must match the header width.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

/// Serializes the same table to a string (used for byte-identity checks).
std::string csv_to_string(const std::vector<std::string>& header,
                          const std::vector<std::vector<double>>& rows);

struct TrajectoryCsv {
    Eigen::VectorXd outputs;
    Eigen::VectorXd noise;  // size 0 when the file has no W column
};

/// Writes a trajectory as `t,Y,W` rows (W omitted when absent).
void write_trajectory_csv(const std::string& path, const Eigen::VectorXd& outputs,
                          const Eigen::VectorXd& noise);

/// Reads a trajectory CSV produced by write_trajectory_csv. Throws
/// ConfigError on malformed input.
TrajectoryCsv read_trajectory_csv(const std::string& path);

}  // namespace pem
