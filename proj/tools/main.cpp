#include <iostream>

#include <CLI11.hpp>
#include <Eigen/Core>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "cli/config.hpp"
#include "cli/pipelines.hpp"

int main(int argc, char** argv) {
  using namespace bhq;
  CLI::App app{"Quench dynamics of Bose-Hubbard dimers and trimers"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  int threads = 0;
  bool emit_gnuplot = false;
  bool dump_basis = false;
  app.add_option("--config", config_path, "Experiment config (or a bundle manifest)")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Output directory for CSVs and manifest.json");
  app.add_option("--threads", threads, "Worker cap (0 keeps the OpenMP default)")->check(CLI::NonNegativeNumber);
  app.add_flag("--emit-gnuplot", emit_gnuplot, "Write plot.gp next to the CSVs");
  app.add_flag("--dump-basis", dump_basis, "Write the Fock basis as basis.csv");
  app.fallthrough();
  for (const auto& name : cli::command_names()) app.add_subcommand(name, "Run the " + name + " pipeline");

  CLI11_PARSE(app, argc, argv);

  if (threads > 0) {
#ifdef _OPENMP
    omp_set_num_threads(threads);
#endif
    Eigen::setNbThreads(threads);
  }
  try {
    const auto command = cli::command_from_string(app.get_subcommands().front()->get_name());
    const auto cfg = cli::parse_config(cli::load_config_document(config_path), command);
    cli::RunOptions options;
    options.out_dir = out_dir;
    options.emit_gnuplot = emit_gnuplot;
    options.dump_basis = dump_basis;
    options.log = &std::cerr;
    const auto manifest = cli::run(cfg, options);
    std::cerr << "wrote " << manifest.outputs.at("files").size() << " files and manifest.json to " << out_dir << '\n';
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
