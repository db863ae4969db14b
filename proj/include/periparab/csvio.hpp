#pragma once

#include <Eigen/Dense>
#include <string>

namespace periparab {

/// Serializes a matrix as comma-separated rows, each value with 17
/// significant digits (exact double round trip). An empty header writes no
/// header line.
[[nodiscard]] std::string csv_from_matrix(const Eigen::MatrixXd& values,
                                          const std::string& header);

/// Writes csv_from_matrix output to a file.
void write_csv_matrix(const std::string& path, const Eigen::MatrixXd& values,
                      const std::string& header);

/// Parses a rectangular numeric CSV. With expect_header the first line is
/// returned through header_out (when given) and excluded from the matrix.
/// Throws ValidationError on ragged rows, non-numeric cells, or an empty
/// table, with the offending line number in the message.
[[nodiscard]] Eigen::MatrixXd parse_csv_matrix(const std::string& text,
                                               bool expect_header,
                                               std::string* header_out = nullptr);

/// parse_csv_matrix applied to a file's content.
[[nodiscard]] Eigen::MatrixXd read_csv_matrix(const std::string& path,
                                              bool expect_header,
                                              std::string* header_out = nullptr);

}  // namespace periparab
