#pragma once

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "auxopt/optimizers/run.hpp"

namespace auxopt::harness {

inline constexpr const char* kTrajectoryHeader =
    "t,k,f_value,grad_norm_sq,E_t,Delta_t,calls_f,calls_h,calls_fmh";

/// Shortest form that round-trips: %.17g.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_trajectory_csv(std::ostream& out,
                                 const std::vector<optimizers::TrajectoryRow>& rows) {
  out << kTrajectoryHeader << '\n';
  for (const auto& r : rows) {
    out << r.t << ',' << r.k << ',' << format_double(r.f_value) << ','
        << format_double(r.grad_norm_sq) << ',' << format_double(r.E_t) << ','
        << format_double(r.Delta_t) << ',' << r.calls_f << ',' << r.calls_h << ','
        << r.calls_fmh << '\n';
  }
}

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::vector<optimizers::TrajectoryRow> read_trajectory_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTrajectoryHeader) {
    throw CsvError("trajectory csv: unexpected header");
  }
  std::vector<optimizers::TrajectoryRow> rows;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 9) {
      throw CsvError("trajectory csv line " + std::to_string(line_no) + ": expected 9 fields");
    }
    auto num = [&](std::size_t i) {
      char* end = nullptr;
      const double v = std::strtod(cells[i].c_str(), &end);
      if (end == cells[i].c_str() || *end != '\0') {
        throw CsvError("trajectory csv line " + std::to_string(line_no) + ": bad number");
      }
      return v;
    };
    auto integer = [&](std::size_t i) { return static_cast<long>(num(i)); };
    rows.push_back({integer(0), integer(1), num(2), num(3), num(4), num(5), integer(6),
                    integer(7), integer(8)});
  }
  return rows;
}

}  // namespace auxopt::harness
