#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bhq/observables/quench.hpp"
#include "bhq/observables/time_series.hpp"

namespace bhq::cli {

inline constexpr int kSchemaVersion = 1;

enum class Command { DimerMatrixElements, DimerOtoc, DimerCumulants, TrimerCollapse, MeanfieldStability, Predict };

std::string to_string(Command command);
/// Throws ConfigError for an unknown name.
Command command_from_string(const std::string& name);
std::vector<std::string> command_names();

struct TimeGridSpec {
  double start = 0.0;
  double end = 1.2;
  /// Endpoints in units of t_E instead of 1/J.
  bool ehrenfest_units = true;
  int points = 121;

  /// Throws ConfigError when t_E units are requested without t_E.
  std::vector<double> resolve(std::optional<double> ehrenfest_time) const;
};

struct EnsembleSpec {
  enum class Kind { Ground, Beta, GapTemperature };
  Kind kind = Kind::Ground;
  /// beta for Kind::Beta, k_B T / gap for Kind::GapTemperature.
  double value = 0.0;

  double beta(double gap) const;
};

/// A validated experiment. Couplings are alpha for the dimer and u otherwise.
struct ExperimentConfig {
  Command command = Command::DimerMatrixElements;
  Model model = Model::Dimer;
  int particles = 0;
  /// Lattice size for meanfield-stability (2 for the dimer, 3 for the trimer
  /// unless given).
  int sites = 2;
  double hopping = 1.0;
  double pre_coupling = 0.0;
  double post_coupling = 0.0;
  std::string observable_a;
  std::string observable_b;
  std::vector<int> ket;
  std::vector<std::vector<int>> bras;
  TimeGridSpec time;
  EnsembleSpec ensemble;
  int order = 20;
  int otoc_terms = 25;
  int cumulant_max = 10;
  /// Fit window [lo / lambda, hi * t_E].
  double window_lo = 1.5;
  double window_hi = 0.8;
  /// auto | spectral | window | krylov
  std::string backend = "auto";

  /// The document the config was read from.
  nlohmann::json source;

  QuenchSpec quench_spec() const;
};

/// Validates a config document for a subcommand. Every problem is reported
/// at once in the ConfigError message, one "field: reason" per line.
ExperimentConfig parse_config(const nlohmann::json& document, Command command);

/// Reads a config file. A bundle manifest is accepted too and yields the
/// config it records.
nlohmann::json load_config_document(const std::string& path);

}  // namespace bhq::cli
