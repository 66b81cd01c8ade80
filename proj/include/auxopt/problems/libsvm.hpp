#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "auxopt/core/eigen_interop.hpp"

namespace auxopt::problems {

/// Parse failure carrying the 1-based line number of the offending line.
class LibsvmParseError : public std::runtime_error {
 public:
  LibsvmParseError(std::size_t line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct SparseEntry {
  std::size_t column;  // 1-based, as in the file
  double value;
};

struct LibsvmData {
  std::vector<double> labels;
  std::vector<std::vector<SparseEntry>> rows;
  std::size_t num_features = 0;  // largest index seen

  std::size_t num_rows() const { return rows.size(); }

  /// Dense n x max(num_features, min_cols) matrix; column j holds index j+1.
  Matrix to_dense(std::size_t min_cols = 0) const {
    const std::size_t cols = std::max(num_features, min_cols);
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(rows.size()),
                            static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      for (const auto& e : rows[r]) {
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(e.column - 1)) = e.value;
      }
    }
    return m;
  }
};

namespace detail {

inline bool parse_double(std::string_view text, double& out) {
  if (text.empty()) return false;
  const char* first = text.data();
  if (*first == '+') ++first;  // from_chars rejects a leading '+'
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

inline bool parse_index(std::string_view text, std::size_t& out) {
  if (text.empty()) return false;
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), last, out);
  return ec == std::errc() && ptr == last;
}

}  // namespace detail

/// Reads "<label> <index>:<value> ..." lines with 1-based ascending indices.
/// Blank lines are skipped; labels are returned as written.
inline LibsvmData parse_libsvm(std::istream& in) {
  LibsvmData data;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream tokens(line);
    std::string token;
    if (!(tokens >> token)) continue;

    double label = 0.0;
    if (!detail::parse_double(token, label)) {
      throw LibsvmParseError(line_no, "invalid label '" + token + "'");
    }
    std::vector<SparseEntry> row;
    std::size_t previous = 0;
    while (tokens >> token) {
      const auto colon = token.find(':');
      if (colon == std::string::npos) {
        throw LibsvmParseError(line_no, "expected index:value, got '" + token + "'");
      }
      const std::string_view view(token);
      std::size_t index = 0;
      if (!detail::parse_index(view.substr(0, colon), index) || index == 0) {
        throw LibsvmParseError(line_no, "invalid feature index in '" + token + "'");
      }
      double value = 0.0;
      if (!detail::parse_double(view.substr(colon + 1), value)) {
        throw LibsvmParseError(line_no, "invalid feature value in '" + token + "'");
      }
      if (index <= previous) {
        throw LibsvmParseError(line_no, "feature indices must be strictly ascending");
      }
      previous = index;
      row.push_back({index, value});
      data.num_features = std::max(data.num_features, index);
    }
    data.labels.push_back(label);
    data.rows.push_back(std::move(row));
  }
  return data;
}

inline LibsvmData parse_libsvm(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_libsvm(in);
}

/// Maps a two-symbol label alphabet onto {+1, -1}. {1, 2} and {0, 1} use
/// 1 -> +1; labels already in {-1, +1} pass through.
inline std::vector<double> map_binary_labels(const std::vector<double>& labels) {
  bool pm = true, zero_one = true, one_two = true;
  for (double y : labels) {
    pm = pm && (y == 1.0 || y == -1.0);
    zero_one = zero_one && (y == 0.0 || y == 1.0);
    one_two = one_two && (y == 1.0 || y == 2.0);
  }
  if (!pm && !zero_one && !one_two) {
    throw std::invalid_argument("map_binary_labels: labels are not a supported binary alphabet");
  }
  std::vector<double> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out[i] = labels[i] == 1.0 ? 1.0 : -1.0;
  }
  return out;
}

}  // namespace auxopt::problems
