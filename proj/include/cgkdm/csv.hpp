#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

namespace cgkdm {

// Reads a numeric CSV: optional header line, one observation per row,
// comma-separated, locale-independent decimal point. Rows containing
// NaN/Inf or malformed numbers raise DataError with the 1-based row index.
Eigen::MatrixXd load_csv(const std::filesystem::path& path);

// Writes a matrix as CSV with an optional header row.
void write_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m,
               const std::vector<std::string>& header = {});

// Shortest round-trip decimal formatting for doubles.
std::string format_double(double v);

}  // namespace cgkdm
