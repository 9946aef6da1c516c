#include "bhq/observables/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace bhq {

ExponentFit fit_exponent(const TimeSeries& series, FitWindow window) {
  series.validate();
  std::vector<double> t, y;
  int sign = 0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (!window.contains(series.grid[i])) continue;
    const Complex v = series.values[i];
    if (std::abs(v) == 0.0) {
      std::ostringstream msg;
      msg << "fit_exponent: zero value at t = " << series.grid[i] << " inside the window";
      throw WindowError(msg.str());
    }
    if (!series.complex_valued) {
      const int s = v.real() > 0.0 ? 1 : -1;
      if (sign != 0 && s != sign) {
        std::ostringstream msg;
        msg << "fit_exponent: sign change at t = " << series.grid[i] << " inside the window";
        throw WindowError(msg.str());
      }
      sign = s;
    }
    t.push_back(series.grid[i]);
    y.push_back(std::log(std::abs(v)));
  }
  if (t.size() < 5) {
    std::ostringstream msg;
    msg << "fit_exponent: window [" << window.lo << ", " << window.hi << "] holds " << t.size()
        << " grid points, need at least 5";
    throw WindowError(msg.str());
  }
  const double n = static_cast<double>(t.size());
  double mt = 0.0, my = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    mt += t[i];
    my += y[i];
  }
  mt /= n;
  my /= n;
  double stt = 0.0, sty = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    stt += (t[i] - mt) * (t[i] - mt);
    sty += (t[i] - mt) * (y[i] - my);
  }
  ExponentFit fit;
  fit.rate = sty / stt;
  fit.intercept = my - fit.rate * mt;
  double ss = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double r = y[i] - fit.intercept - fit.rate * t[i];
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  fit.points = t.size();
  return fit;
}

double PhaseDeviation::max_abs(FitWindow window) const {
  double m = 0.0;
  for (std::size_t i = 0; i < residual.size(); ++i) {
    if (undefined[i] || !window.contains(residual.grid[i])) continue;
    m = std::max(m, std::abs(residual.values[i].real()));
  }
  return m;
}

PhaseDeviation phase_deviation(const TimeSeries& series, int k, int l, double phi, double relative_floor) {
  if (k == l) throw DomainError("phase_deviation: needs k != l");
  series.validate();
  double largest = 0.0;
  for (const auto& v : series.values) largest = std::max(largest, std::abs(v));
  std::vector<double> residual;
  PhaseDeviation out;
  const Complex rotation = std::polar(1.0, (l - k) * phi);
  for (const auto& v : series.values) {
    const bool undefined = !(std::abs(v) > relative_floor * largest);
    out.undefined.push_back(undefined);
    if (undefined) {
      residual.push_back(0.0);
      continue;
    }
    double d = std::arg(rotation * v);
    // Reduce modulo pi into [-pi/2, pi/2).
    d -= std::numbers::pi * std::floor(d / std::numbers::pi + 0.5);
    if (d >= std::numbers::pi / 2) d -= std::numbers::pi;
    residual.push_back(d);
  }
  SeriesMeta meta = series.meta;
  meta.observable = "phase deviation of " + meta.observable;
  out.residual = TimeSeries::make_real(series.grid, residual, meta);
  return out;
}

}  // namespace bhq
