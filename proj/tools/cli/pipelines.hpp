#pragma once

#include <iosfwd>
#include <string>

#include "bhq/fockspace/fock_basis.hpp"
#include "bhq/fockspace/sparse_operator.hpp"
#include "bhq/observables/manifest.hpp"
#include "bhq/weyl/manifold.hpp"
#include "cli/config.hpp"

namespace bhq::cli {

struct RunOptions {
  std::string out_dir = ".";
  bool emit_gnuplot = false;
  /// Also write the Fock basis as `basis.csv`.
  bool dump_basis = false;
  /// Progress and warnings; nullptr keeps quiet.
  std::ostream* log = nullptr;
};

/// Runs the pipeline of cfg.command, writes its CSVs and `manifest.json`
/// into options.out_dir (created if needed) and returns the manifest.
Manifest run(const ExperimentConfig& cfg, const RunOptions& options);

/// Classical symbol of a diagonal dimer observable that is a polynomial in
/// z = (n_1 - n_2) / (2 (N + 1)), recovered by least squares on the diagonal.
/// Throws ConfigError when no polynomial of degree <= max_degree reproduces it.
PhaseSpacePolynomial z_symbol(const FockBasis& basis, const SparseOperator& diagonal, int max_degree = 12);

}  // namespace bhq::cli
