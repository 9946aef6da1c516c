#pragma once

#include <cstddef>
#include <vector>

#include "bhq/observables/time_series.hpp"

namespace bhq {

/// The requested fit window is unusable.
class WindowError : public DomainError {
 public:
  using DomainError::DomainError;
};

struct ExponentFit {
  double rate = 0.0;       ///< slope of ln|value|
  double intercept = 0.0;  ///< ln|value| at t = 0
  double residual = 0.0;   ///< RMS deviation of ln|value| from the line
  std::size_t points = 0;
};

/// Least squares of ln|value| against t over the grid points inside the
/// window. Throws WindowError for fewer than 5 points, a zero value, or a
/// sign change of a real series inside the window.
ExponentFit fit_exponent(const TimeSeries& series, FitWindow window);

struct PhaseDeviation {
  /// arg[e^{i(l-k)phi} <k|A(t)|l>] reduced to [-pi/2, pi/2).
  TimeSeries residual;
  /// Points whose magnitude is too small for a phase (residual set to 0).
  std::vector<bool> undefined;

  /// Largest |residual| over defined points inside the window.
  double max_abs(FitWindow window) const;
};

/// Phase of <k|A(t)|l> against the predicted (k - l) phi, modulo pi.
/// Magnitudes below `relative_floor` times the largest one are flagged.
PhaseDeviation phase_deviation(const TimeSeries& series, int k, int l, double phi, double relative_floor = 1e-12);

}  // namespace bhq
