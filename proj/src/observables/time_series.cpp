#include "bhq/observables/time_series.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

namespace bhq {

TimeSeries TimeSeries::make_real(std::vector<double> grid, const std::vector<double>& values, SeriesMeta meta) {
  TimeSeries s;
  s.grid = std::move(grid);
  s.values.assign(values.begin(), values.end());
  s.complex_valued = false;
  s.meta = std::move(meta);
  s.validate();
  return s;
}

TimeSeries TimeSeries::make_complex(std::vector<double> grid, std::vector<Complex> values, SeriesMeta meta) {
  TimeSeries s;
  s.grid = std::move(grid);
  s.values = std::move(values);
  s.complex_valued = true;
  s.meta = std::move(meta);
  s.validate();
  return s;
}

std::vector<double> TimeSeries::real_values() const {
  std::vector<double> out;
  out.reserve(values.size());
  for (const auto& v : values) out.push_back(v.real());
  return out;
}

std::vector<double> TimeSeries::magnitudes() const {
  std::vector<double> out;
  out.reserve(values.size());
  for (const auto& v : values) out.push_back(std::abs(v));
  return out;
}

void TimeSeries::validate() const {
  if (grid.size() != values.size()) {
    std::ostringstream msg;
    msg << "TimeSeries: " << grid.size() << " times but " << values.size() << " values";
    throw DomainError(msg.str());
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i]) || (i > 0 && !(grid[i] > grid[i - 1]))) {
      throw DomainError("TimeSeries: grid must increase strictly (index " + std::to_string(i) + ")");
    }
    if (!std::isfinite(values[i].real()) || !std::isfinite(values[i].imag())) {
      throw DomainError("TimeSeries: non-finite value at t = " + std::to_string(grid[i]));
    }
  }
}

void TimeSeries::write_csv(std::ostream& out) const {
  const auto old = out.precision(17);
  out << (complex_valued ? "t,re,im\n" : "t,value\n");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out << grid[i] << ',' << values[i].real();
    if (complex_valued) out << ',' << values[i].imag();
    out << '\n';
  }
  out.precision(old);
}

std::vector<double> linear_grid(double t0, double t1, std::size_t points) {
  if (points < 2 || !(t1 > t0)) throw DomainError("linear_grid: need t1 > t0 and at least two points");
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  grid.back() = t1;
  return grid;
}

std::string git_describe() { return BHQ_GIT_DESCRIBE; }

}  // namespace bhq
