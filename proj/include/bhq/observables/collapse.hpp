#pragma once

#include <string>
#include <vector>

#include "bhq/observables/time_series.hpp"

namespace bhq {

struct CollapseInput {
  TimeSeries series;
  /// |k - l| for the dimer, k1 + k2 for the trimer; must be > 0.
  int order = 0;
  /// Predicted prefactor divided out before taking the root (c_kl).
  Complex normalization = 1.0;
};

struct Plateau {
  bool found = false;
  double t_begin = 0.0;
  double t_end = 0.0;
  /// Mean of the curve over the plateau.
  double level = 0.0;
};

struct CollapseCurve {
  std::string label;
  int order = 0;
  /// f(t) = |value / normalization|^{2/order} / (hbar e^{2 lambda t}).
  TimeSeries f;
  bool excluded = false;
  std::string note;
  Plateau plateau;
};

/// Longest run of consecutive grid points inside `restrict_to` whose values
/// stay within (max - min) <= band * mean.
Plateau detect_plateau(const TimeSeries& f, double band, FitWindow restrict_to);

/// Collapse curves. A series that never exceeds `zero_tolerance` times the
/// largest magnitude among all inputs is taken to vanish by symmetry, with
/// only propagation noise left, and is excluded with a selection-rule note.
std::vector<CollapseCurve> collapse_statistic(const std::vector<CollapseInput>& inputs, double lambda, double hbar,
                                              double band = 0.2, double zero_tolerance = 1e-8);

/// Largest (max - min)/mean across the included curves at a common grid
/// point inside the window.
double pointwise_spread(const std::vector<CollapseCurve>& curves, FitWindow window);

/// (max - min)/mean of the window averages of the included curves.
double level_spread(const std::vector<CollapseCurve>& curves, FitWindow window);

/// Mean of f over the grid points inside the window.
double window_mean(const TimeSeries& f, FitWindow window);

}  // namespace bhq
