#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "bhq/common.hpp"

namespace bhq {

struct SeriesMeta {
  std::string model;
  std::string quench;
  std::string observable;
  /// Free-form tag, e.g. "k=4,l=10".
  std::string label;
};

/// Values on a strictly increasing time grid (units 1/J).
struct TimeSeries {
  std::vector<double> grid;
  std::vector<Complex> values;
  bool complex_valued = true;
  SeriesMeta meta;

  static TimeSeries make_real(std::vector<double> grid, const std::vector<double>& values, SeriesMeta meta = {});
  static TimeSeries make_complex(std::vector<double> grid, std::vector<Complex> values, SeriesMeta meta = {});

  std::size_t size() const { return grid.size(); }
  std::vector<double> real_values() const;
  std::vector<double> magnitudes() const;

  /// Throws DomainError unless the grid increases strictly, sizes match and
  /// every value is finite.
  void validate() const;
  /// `t,re,im` or `t,value`, 17 significant digits.
  void write_csv(std::ostream& out) const;
};

/// `points` equally spaced times from t0 to t1 inclusive.
std::vector<double> linear_grid(double t0, double t1, std::size_t points);

struct FitWindow {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double t) const { return t >= lo && t <= hi; }
};

/// Output of `git describe` recorded at configure time.
std::string git_describe();

}  // namespace bhq
