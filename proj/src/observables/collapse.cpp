#include "bhq/observables/collapse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bhq {
namespace {

double relative_spread(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  return (*hi - *lo) / std::abs(mean);
}

}  // namespace

Plateau detect_plateau(const TimeSeries& f, double band, FitWindow restrict_to) {
  Plateau best;
  std::size_t best_len = 0;
  const auto values = f.real_values();
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!restrict_to.contains(f.grid[i])) continue;
    double lo = values[i], hi = values[i], sum = 0.0;
    for (std::size_t j = i; j < f.size() && restrict_to.contains(f.grid[j]); ++j) {
      lo = std::min(lo, values[j]);
      hi = std::max(hi, values[j]);
      sum += values[j];
      const double mean = sum / static_cast<double>(j - i + 1);
      if (hi - lo > band * std::abs(mean)) break;
      if (j - i + 1 > best_len && j > i) {
        best_len = j - i + 1;
        best = {true, f.grid[i], f.grid[j], mean};
      }
    }
  }
  return best;
}

std::vector<CollapseCurve> collapse_statistic(const std::vector<CollapseInput>& inputs, double lambda, double hbar,
                                              double band, double zero_tolerance) {
  std::vector<CollapseCurve> out;
  double scale = 0.0;
  for (const auto& in : inputs) {
    for (double m : in.series.magnitudes()) scale = std::max(scale, m);
  }
  const double floor = zero_tolerance * scale;
  for (const auto& in : inputs) {
    if (in.order <= 0) throw DomainError("collapse_statistic: order must be positive");
    if (in.normalization == Complex(0.0)) throw DomainError("collapse_statistic: zero normalization");
    CollapseCurve c;
    c.label = in.series.meta.label;
    c.order = in.order;
    const auto mags = in.series.magnitudes();
    if (std::all_of(mags.begin(), mags.end(), [&](double m) { return m <= floor; })) {
      c.excluded = true;
      c.note = "vanishes identically (selection rule)";
      c.f = TimeSeries::make_real(in.series.grid, std::vector<double>(in.series.size(), 0.0), in.series.meta);
      out.push_back(std::move(c));
      continue;
    }
    std::vector<double> f;
    for (std::size_t i = 0; i < in.series.size(); ++i) {
      const double t = in.series.grid[i];
      f.push_back(std::pow(std::abs(in.series.values[i] / in.normalization), 2.0 / in.order) /
                  (hbar * std::exp(2.0 * lambda * t)));
    }
    SeriesMeta meta = in.series.meta;
    meta.observable = "collapse of " + meta.observable;
    c.f = TimeSeries::make_real(in.series.grid, f, meta);
    c.plateau = detect_plateau(c.f, band, {in.series.grid.front(), in.series.grid.back()});
    out.push_back(std::move(c));
  }
  return out;
}

double pointwise_spread(const std::vector<CollapseCurve>& curves, FitWindow window) {
  double worst = 0.0;
  const CollapseCurve* first = nullptr;
  for (const auto& c : curves) {
    if (!c.excluded) {
      first = &c;
      break;
    }
  }
  if (first == nullptr) return std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < first->f.size(); ++i) {
    const double t = first->f.grid[i];
    if (!window.contains(t)) continue;
    std::vector<double> v;
    for (const auto& c : curves) {
      if (c.excluded) continue;
      if (c.f.grid != first->f.grid) throw DomainError("pointwise_spread: curves use different grids");
      v.push_back(c.f.values[i].real());
    }
    worst = std::max(worst, relative_spread(v));
  }
  return worst;
}

double window_mean(const TimeSeries& f, FitWindow window) {
  double sum = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!window.contains(f.grid[i])) continue;
    sum += f.values[i].real();
    ++count;
  }
  if (count == 0) throw DomainError("window_mean: no grid points inside the window");
  return sum / count;
}

double level_spread(const std::vector<CollapseCurve>& curves, FitWindow window) {
  std::vector<double> levels;
  for (const auto& c : curves) {
    if (!c.excluded) levels.push_back(window_mean(c.f, window));
  }
  if (levels.empty()) return std::numeric_limits<double>::quiet_NaN();
  return relative_spread(levels);
}

}  // namespace bhq
