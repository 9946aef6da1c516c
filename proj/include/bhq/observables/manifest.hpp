#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "bhq/observables/time_series.hpp"

namespace bhq {

/// Provenance record written next to every CSV bundle.
struct Manifest {
  std::string model;
  std::string quench;
  double hbar_eff = 0.0;
  std::optional<double> lambda;
  std::optional<double> ehrenfest_time;
  std::optional<FitWindow> window;
  std::string git_describe;
  /// The configuration that produced the bundle, verbatim.
  nlohmann::json config;
  /// Produced files and per-analysis results.
  nlohmann::json outputs = nlohmann::json::object();

  nlohmann::json to_json() const;
  static Manifest from_json(const nlohmann::json& j);
  void write(std::ostream& out) const;
};

}  // namespace bhq
