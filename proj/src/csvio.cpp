#include "periparab/csvio.hpp"

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "periparab/errors.hpp"
#include "periparab/jsonout.hpp"

namespace periparab {

namespace {

/// Splits one CSV line into numeric cells; returns false with a message on
/// the first malformed cell.
bool parse_row(const std::string& line, std::vector<double>& cells,
               std::string& message) {
  cells.clear();
  std::size_t begin = 0;
  while (true) {
    std::size_t end = line.find(',', begin);
    const std::string cell =
        line.substr(begin, end == std::string::npos ? end : end - begin);
    const char* start = cell.c_str();
    char* parsed_end = nullptr;
    const double value = std::strtod(start, &parsed_end);
    // The whole cell (minus surrounding spaces) must be consumed.
    const char* tail = parsed_end;
    while (*tail == ' ' || *tail == '\t') ++tail;
    if (parsed_end == start || *tail != '\0') {
      message = "non-numeric cell '" + cell + "'";
      return false;
    }
    cells.push_back(value);
    if (end == std::string::npos) break;
    begin = end + 1;
  }
  return true;
}

}  // namespace

std::string csv_from_matrix(const Eigen::MatrixXd& values,
                            const std::string& header) {
  std::string out;
  if (!header.empty()) {
    out += header;
    out += '\n';
  }
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      if (c > 0) out += ',';
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.17g", values(r, c));
      out += buf;
    }
    out += '\n';
  }
  return out;
}

void write_csv_matrix(const std::string& path, const Eigen::MatrixXd& values,
                      const std::string& header) {
  write_text_file(path, csv_from_matrix(values, header));
}

Eigen::MatrixXd parse_csv_matrix(const std::string& text, bool expect_header,
                                 std::string* header_out) {
  std::vector<std::vector<double>> rows;
  std::size_t line_begin = 0;
  int line_number = 0;
  bool header_pending = expect_header;
  while (line_begin <= text.size()) {
    std::size_t line_end = text.find('\n', line_begin);
    if (line_end == std::string::npos) line_end = text.size();
    std::string line = text.substr(line_begin, line_end - line_begin);
    line_begin = line_end + 1;
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;  // skip blank lines (including the final one)
    if (header_pending) {
      if (header_out != nullptr) *header_out = line;
      header_pending = false;
      continue;
    }
    std::vector<double> cells;
    std::string message;
    if (!parse_row(line, cells, message)) {
      throw ValidationError("CSV line " + std::to_string(line_number) + ": " +
                            message);
    }
    if (!rows.empty() && cells.size() != rows.front().size()) {
      throw ValidationError(
          "CSV line " + std::to_string(line_number) + ": expected " +
          std::to_string(rows.front().size()) + " columns, found " +
          std::to_string(cells.size()));
    }
    rows.push_back(std::move(cells));
  }
  if (header_pending) throw ValidationError("CSV is missing its header line");
  if (rows.empty()) throw ValidationError("CSV holds no data rows");

  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    for (Eigen::Index c = 0; c < out.cols(); ++c) {
      out(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    }
  }
  return out;
}

Eigen::MatrixXd read_csv_matrix(const std::string& path, bool expect_header,
                                std::string* header_out) {
  try {
    return parse_csv_matrix(read_text_file(path), expect_header, header_out);
  } catch (const ValidationError& err) {
    throw ValidationError(path + ": " + err.what());
  }
}

}  // namespace periparab
