#include "cli/pipelines.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>

#include "bhq/fockspace/operators.hpp"
#include "bhq/fockspace/prequench.hpp"
#include "bhq/meanfield/meanfield.hpp"
#include "bhq/observables/collapse.hpp"
#include "bhq/observables/cumulants.hpp"
#include "bhq/observables/ensemble.hpp"
#include "bhq/observables/fitting.hpp"
#include "bhq/observables/matrix_elements.hpp"
#include "bhq/observables/otoc.hpp"
#include "bhq/weyl/gaussian.hpp"
#include "bhq/weyl/prediction.hpp"

namespace bhq::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Writes the files of one bundle and remembers what to plot.
class Bundle {
 public:
  explicit Bundle(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  void series(const std::string& stem, const TimeSeries& s, const std::string& group, bool log_scale) {
    s.validate();
    write(stem, [&](std::ostream& out) { s.write_csv(out); });
    plots_[group].log_scale = log_scale;
    plots_[group].files.push_back({stem + ".csv", s.complex_valued});
  }

  void table(const std::string& stem, const std::string& header, const std::vector<std::vector<double>>& rows) {
    write(stem, [&](std::ostream& out) {
      out << std::setprecision(17) << header << '\n';
      for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << '\n';
      }
    });
  }

  void raw(const std::string& name, const std::function<void(std::ostream&)>& body) {
    std::ofstream out(dir_ / name);
    if (!out) throw Error("cannot write " + (dir_ / name).string());
    body(out);
    files_.push_back(name);
  }

  void gnuplot() {
    raw("plot.gp", [&](std::ostream& out) {
      out << "set datafile separator ','\nset terminal pngcairo size 900,600\nset xlabel 't J'\n";
      out << "set key outside right\n";
      for (const auto& [group, plot] : plots_) {
        out << "\nset output '" << group << ".png'\n" << (plot.log_scale ? "set logscale y\n" : "unset logscale y\n");
        out << "plot ";
        for (std::size_t i = 0; i < plot.files.size(); ++i) {
          const auto& [file, complex_valued] = plot.files[i];
          const std::string column = complex_valued ? "(sqrt($2**2 + $3**2))" : (plot.log_scale ? "(abs($2))" : "2");
          out << (i ? ", \\\n     " : "") << '\'' << file << "' every ::1 using 1:" << column << " with lines title '"
              << file.substr(0, file.size() - 4) << '\'';
        }
        out << '\n';
      }
    });
  }

  const std::vector<std::string>& files() const { return files_; }
  const fs::path& dir() const { return dir_; }

 private:
  struct Plot {
    bool log_scale = false;
    std::vector<std::pair<std::string, bool>> files;
  };

  void write(const std::string& stem, const std::function<void(std::ostream&)>& body) { raw(stem + ".csv", body); }

  fs::path dir_;
  std::vector<std::string> files_;
  std::map<std::string, Plot> plots_;
};

// State shared by every pipeline that runs a quench.
struct Context {
  const ExperimentConfig& cfg;
  const RunOptions& options;
  Quench quench;
  std::vector<double> grid;
  std::optional<FitWindow> window;
  json results = json::object();
  std::vector<std::string> warnings;

  void log(const std::string& line) const {
    if (options.log) *options.log << line << '\n';
  }
  void warn(const std::string& line) {
    warnings.push_back(line);
    log("warning: " + line);
  }
  double lambda() const { return *quench.lambda; }
  double hbar() const { return quench.hbar_eff; }
  double gap() const { return prequench_gap(quench.sites(), cfg.hopping); }
  SeriesMeta meta(const std::string& observable, const std::string& label) const {
    return {to_string(cfg.model), quench.description(), observable, label};
  }
};

std::string tag(const std::vector<int>& label) {
  std::string out;
  for (std::size_t i = 0; i < label.size(); ++i) out += (i ? "-" : "") + std::to_string(label[i]);
  return out;
}

std::string pair_tag(const std::vector<int>& k, const std::vector<int>& l) { return "k" + tag(k) + "_l" + tag(l); }

int excitation(const std::vector<int>& label) {
  int total = 0;
  for (int x : label) total += x;
  return total;
}

TimeSeries squared_magnitude(const TimeSeries& s) {
  std::vector<double> v;
  for (const auto& x : s.values) v.push_back(std::norm(x));
  return TimeSeries::make_real(s.grid, v, s.meta);
}

// Rate of ln|value| over the fit window; the error text when the window is unusable.
json rate_fit(const TimeSeries& s, const FitWindow& w, double expected) {
  try {
    const auto fit = fit_exponent(s, w);
    return {{"rate", fit.rate}, {"rate_ratio", fit.rate / expected}, {"rms_residual", fit.residual},
            {"points", fit.points}};
  } catch (const WindowError& e) {
    return {{"error", e.what()}};
  }
}

std::unique_ptr<Evolver> evolver_for(Context& ctx, const PrequenchBasis* reference_states) {
  const auto& cfg = ctx.cfg;
  const auto& h = ctx.quench.hamiltonian;
  const std::string& backend = cfg.backend;
  if (backend == "krylov") return make_krylov_evolver(h);
  if (backend == "spectral") {
    if (cfg.model != Model::Dimer) throw ConfigError("backend: the spectral backend needs the dimer");
    EvolverOptions options;
    options.spectral_limit = std::numeric_limits<std::size_t>::max();
    return make_evolver(h, options);
  }
  const bool large = ctx.quench.basis.size() > EvolverOptions{}.spectral_limit;
  if (backend == "window" || (backend == "auto" && cfg.model == Model::Dimer && large && reference_states)) {
    Eigen::MatrixXcd reference(static_cast<Eigen::Index>(ctx.quench.basis.size()),
                               static_cast<Eigen::Index>(reference_states->states.size()));
    for (std::size_t i = 0; i < reference_states->states.size(); ++i) {
      reference.col(static_cast<Eigen::Index>(i)) = reference_states->states[i].vector;
    }
    return make_windowed_evolver(h, reference);
  }
  return make_evolver(h);
}

ThermalEnsemble ensemble_for(Context& ctx) {
  const double beta = ctx.cfg.ensemble.beta(ctx.gap());
  auto ens = thermal_ensemble(ctx.quench.basis, ctx.cfg.hopping, beta);
  ctx.results["ensemble"] = {{"beta", std::isinf(beta) ? json(nullptr) : json(beta)},
                             {"states", ens.states.size()},
                             {"discarded_weight", ens.truncation_mass}};
  ctx.log("ensemble: " + std::to_string(ens.states.size()) + " prequench states");
  return ens;
}

QuadratureCovariance covariance_for(const Context& ctx) {
  return thermal_covariance(ctx.cfg.ensemble.beta(ctx.gap()), ctx.gap(), quadrature_angle(ctx.gap(), ctx.lambda()));
}

PhaseSpacePolynomial symbol_for(const Context& ctx, const std::string& expression, const std::string& field) {
  try {
    return z_symbol(ctx.quench.basis, operator_polynomial(ctx.quench.basis, expression));
  } catch (const ConfigError& e) {
    throw ConfigError(field + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------

void dimer_matrix_elements(Context& ctx, Bundle& bundle) {
  const auto& cfg = ctx.cfg;
  int count = cfg.ket[0] + 1;
  for (const auto& k : cfg.bras) count = std::max(count, k[0] + 1);
  const auto pre = prequench_eigenbasis(ctx.quench.basis, cfg.hopping, count);
  const auto evolver = evolver_for(ctx, &pre);
  ctx.results["backend"] = evolver->name();
  ctx.log("backend: " + evolver->name());
  const auto a = operator_polynomial(ctx.quench.basis, cfg.observable_a);
  const auto series = matrix_element_scan(*evolver, pre, a, cfg.bras, cfg.ket, ctx.grid, ctx.meta(cfg.observable_a, ""));
  for (std::size_t i = 0; i < series.size(); ++i) {
    bundle.series("me_" + pair_tag(cfg.bras[i], cfg.ket), series[i], "me", true);
  }
  if (!ctx.window) return;

  const int l = cfg.ket[0];
  int max_order = 0;
  for (const auto& k : cfg.bras) max_order = std::max(max_order, std::abs(k[0] - l));
  auto pred = manifold_prediction(cfg.post_coupling, symbol_for(ctx, cfg.observable_a, "observable.A"),
                                  std::max(cfg.order, max_order));
  const double phi = quadrature_angle(ctx.gap(), ctx.lambda());
  std::vector<CollapseInput> inputs;
  std::vector<std::size_t> used, series_index;
  json pairs = json::array();
  for (std::size_t i = 0; i < series.size(); ++i) {
    const int k = cfg.bras[i][0];
    const int n = std::abs(k - l);
    json entry{{"label", series[i].meta.label}};
    if (n == 0) {
      entry["note"] = "diagonal element: no growth prediction";
      pairs.push_back(entry);
      continue;
    }
    entry["fit"] = rate_fit(squared_magnitude(series[i]), *ctx.window, 2.0 * ctx.lambda() * n);
    const Complex ckl = predict_ckl(pred, k, l, phi);
    entry["c_kl"] = {ckl.real(), ckl.imag()};
    const auto phase = phase_deviation(series[i], k, l, phi);
    entry["max_phase_deviation"] = phase.max_abs(*ctx.window);
    bundle.series("phase_" + pair_tag(cfg.bras[i], cfg.ket), phase.residual, "phase", false);
    pairs.push_back(entry);
    inputs.push_back({series[i], n, ckl});
    used.push_back(pairs.size() - 1);
    series_index.push_back(i);
  }
  if (!inputs.empty()) {
    const auto curves = collapse_statistic(inputs, ctx.lambda(), ctx.hbar());
    for (std::size_t i = 0; i < curves.size(); ++i) {
      auto& entry = pairs[used[i]];
      bundle.series("collapse_" + pair_tag(cfg.bras[series_index[i]], cfg.ket), curves[i].f, "collapse", false);
      entry["collapse_window_mean"] = window_mean(curves[i].f, *ctx.window);
      entry["plateau"] = curves[i].plateau.found ? json{{"t", {curves[i].plateau.t_begin, curves[i].plateau.t_end}},
                                                        {"level", curves[i].plateau.level}}
                                                  : json(nullptr);
    }
    ctx.results["collapse"] = {{"level_spread", level_spread(curves, *ctx.window)},
                               {"pointwise_spread", pointwise_spread(curves, *ctx.window)}};
  }
  ctx.results["matrix_elements"] = pairs;
  json c = json::array();
  for (double x : pred.C) c.push_back(x);
  ctx.results["C_k"] = c;
}

void dimer_otoc(Context& ctx, Bundle& bundle) {
  const auto& cfg = ctx.cfg;
  const auto ens = ensemble_for(ctx);
  const auto evolver = evolver_for(ctx, nullptr);
  ctx.results["backend"] = evolver->name();
  const auto a = operator_polynomial(ctx.quench.basis, cfg.observable_a);
  const auto b = operator_polynomial(ctx.quench.basis, cfg.observable_b);
  const auto otoc = otoc_numeric(*evolver, a, b, ens, ctx.grid, ctx.meta("otoc", "numeric"));
  bundle.series("otoc", otoc, "otoc", true);
  if (!ctx.window) return;

  auto pred = manifold_prediction(cfg.post_coupling, symbol_for(ctx, cfg.observable_a, "observable.A"), cfg.order);
  const auto cov = covariance_for(ctx);
  const auto series =
      otoc_series(pred, from_phase_space(symbol_for(ctx, cfg.observable_b, "observable.B"), ctx.lambda()), cov,
                  cfg.otoc_terms);
  std::vector<double> full, leading;
  const double c0 = pred.otoc_c.at(0);
  for (double t : ctx.grid) {
    const double pre_factor = std::pow(ctx.hbar() * std::exp(ctx.lambda() * t), 2);
    full.push_back(pre_factor * series.at(t, ctx.hbar()));
    leading.push_back(pre_factor * c0);
  }
  bundle.series("otoc_series", TimeSeries::make_real(ctx.grid, full, ctx.meta("otoc", "series")), "otoc", true);
  bundle.series("otoc_leading", TimeSeries::make_real(ctx.grid, leading, ctx.meta("otoc", "leading")), "otoc", true);
  std::vector<std::vector<double>> rows;
  for (std::size_t m = 0; m < pred.otoc_c.size(); ++m) rows.push_back({static_cast<double>(m), pred.otoc_c[m]});
  bundle.table("otoc_c", "m,value", rows);

  double worst_leading = 0.0;
  std::optional<double> departure;
  for (std::size_t i = 0; i < ctx.grid.size(); ++i) {
    const double t = ctx.grid[i];
    const double num = otoc.values[i].real();
    if (ctx.window->contains(t)) worst_leading = std::max(worst_leading, std::abs(leading[i] / num - 1.0));
    if (!departure && t >= ctx.window->lo) {
      const double ratio = full[i] / num;
      if (!(ratio >= 0.5 && ratio <= 2.0)) departure = t;
    }
  }
  ctx.results["otoc"] = {{"c0", c0},
                         {"leading_order_max_deviation", worst_leading},
                         {"series_departure_t_over_tE",
                          departure ? json(*departure / *ctx.quench.ehrenfest_time) : json(nullptr)},
                         {"fit", rate_fit(otoc, *ctx.window, 2.0 * ctx.lambda())}};
}

void dimer_cumulants(Context& ctx, Bundle& bundle) {
  const auto& cfg = ctx.cfg;
  const auto ens = ensemble_for(ctx);
  const auto evolver = evolver_for(ctx, nullptr);
  ctx.results["backend"] = evolver->name();
  const auto a = operator_polynomial(ctx.quench.basis, cfg.observable_a);
  const auto table = cumulants_numeric(*evolver, a, ens, ctx.grid, cfg.cumulant_max);

  std::optional<ScalingPrediction> pred;
  QuadratureCovariance cov;
  if (ctx.window) {
    pred = manifold_prediction(cfg.post_coupling, symbol_for(ctx, cfg.observable_a, "observable.A"), cfg.order);
    cov = covariance_for(ctx);
  }
  json per_order = json::array();
  std::vector<std::vector<double>> d_rows;
  for (int n = 1; n <= cfg.cumulant_max; ++n) {
    const auto kappa = table.series(n, ctx.meta(cfg.observable_a, "kappa_" + std::to_string(n)));
    bundle.series("kappa_" + std::to_string(n), kappa, "kappa", true);
    const auto& flags = table.precision_limited[static_cast<std::size_t>(n)];
    const auto limited = std::count(flags.begin(), flags.end(), true);
    json entry{{"n", n}, {"precision_limited_points", limited}};
    if (limited == static_cast<long>(flags.size())) entry["note"] = "below the precision floor everywhere";
    if (pred && n >= 2 && !entry.contains("note")) {
      const double expected = 2.0 * ctx.lambda() * (n - 1);
      entry["fit"] = rate_fit(kappa, *ctx.window, expected);
      // The plateau of |kappa_n|^{1/(n-1)} / (hbar e^{2 lambda t}) marks the scaling regime.
      std::vector<double> f;
      for (std::size_t i = 0; i < kappa.size(); ++i) {
        f.push_back(std::pow(std::abs(kappa.values[i].real()), 1.0 / (n - 1)) /
                    (ctx.hbar() * std::exp(2.0 * ctx.lambda() * kappa.grid[i])));
      }
      const auto plateau = detect_plateau(TimeSeries::make_real(kappa.grid, f), 0.2, *ctx.window);
      if (plateau.found) {
        entry["plateau"] = {plateau.t_begin, plateau.t_end};
        entry["plateau_fit"] = rate_fit(kappa, {plateau.t_begin, plateau.t_end}, expected);
      }
      try {
        const double d = cumulant_prediction(*pred, n).d();
        entry["d_n"] = d;
        d_rows.push_back({static_cast<double>(n), d});
        std::vector<double> curve;
        for (double t : ctx.grid) curve.push_back(d * std::pow(pred->renorm_param(t, ctx.hbar(), cov.plus2), n - 1));
        bundle.series("kappa_pred_" + std::to_string(n),
                      TimeSeries::make_real(ctx.grid, curve, ctx.meta(cfg.observable_a, "prediction")), "kappa", true);
      } catch (const OrderError& e) {
        entry["d_n"] = nullptr;
        ctx.warn("kappa_" + std::to_string(n) + " prediction: " + e.what());
      }
    }
    per_order.push_back(entry);
  }
  if (!d_rows.empty()) bundle.table("d_n", "n,value", d_rows);
  ctx.results["cumulants"] = per_order;
}

void trimer_collapse(Context& ctx, Bundle& bundle) {
  const auto& cfg = ctx.cfg;
  int s_max = excitation(cfg.ket);
  for (const auto& k : cfg.bras) s_max = std::max(s_max, excitation(k));
  const auto pre = prequench_eigenbasis(ctx.quench.basis, cfg.hopping, (s_max + 1) * (s_max + 2) / 2);
  const auto evolver = evolver_for(ctx, nullptr);
  ctx.results["backend"] = evolver->name();
  ctx.log("backend: " + evolver->name() + ", dimension " + std::to_string(ctx.quench.basis.size()));
  const auto a = operator_polynomial(ctx.quench.basis, cfg.observable_a);
  const auto b = operator_polynomial(ctx.quench.basis, cfg.observable_b);
  const std::string comm_name = "[" + cfg.observable_a + "(t), " + cfg.observable_b + "]";
  const std::vector<std::pair<std::string, std::vector<TimeSeries>>> tables{
      {"me", matrix_element_scan(*evolver, pre, a, cfg.bras, cfg.ket, ctx.grid, ctx.meta(cfg.observable_a, ""))},
      {"comm", commutator_scan(*evolver, pre, a, b, cfg.bras, cfg.ket, ctx.grid, ctx.meta(comm_name, ""))}};
  for (const auto& [prefix, table] : tables) {
    for (std::size_t i = 0; i < table.size(); ++i) {
      bundle.series(prefix + "_" + pair_tag(cfg.bras[i], cfg.ket), table[i], prefix, true);
    }
  }
  if (!ctx.window) return;

  for (const auto& [prefix, table] : tables) {
    std::vector<CollapseInput> inputs;
    std::vector<std::size_t> index;
    for (std::size_t i = 0; i < table.size(); ++i) {
      const int s = excitation(cfg.bras[i]) - excitation(cfg.ket);
      if (s <= 0) continue;
      inputs.push_back({table[i], s, 1.0});
      index.push_back(i);
    }
    const auto curves = collapse_statistic(inputs, ctx.lambda(), ctx.hbar());
    json entries = json::array();
    std::map<int, std::vector<CollapseCurve>> groups;
    for (std::size_t j = 0; j < curves.size(); ++j) {
      const auto& c = curves[j];
      json entry{{"label", c.label}, {"order", c.order}, {"excluded", c.excluded}};
      if (c.excluded) {
        entry["note"] = c.note;
      } else {
        bundle.series("collapse_" + prefix + "_" + pair_tag(cfg.bras[index[j]], cfg.ket), c.f, "collapse_" + prefix,
                      false);
        entry["window_mean"] = window_mean(c.f, *ctx.window);
        entry["fit"] = rate_fit(squared_magnitude(table[index[j]]), *ctx.window, 2.0 * ctx.lambda() * c.order);
      }
      groups[c.order].push_back(c);
      entries.push_back(entry);
    }
    json spreads = json::object();
    for (const auto& [order, group] : groups) {
      const auto included = std::count_if(group.begin(), group.end(), [](const auto& c) { return !c.excluded; });
      spreads[std::to_string(order)] = included > 1 ? json(level_spread(group, *ctx.window)) : json(nullptr);
    }
    ctx.results[prefix] = {{"curves", entries}, {"level_spread_by_order", spreads}};
  }
}

void predict(Context& ctx, Bundle& bundle) {
  const auto& cfg = ctx.cfg;
  if (!ctx.window) throw StabilityError("predict: the postquench fixed point is stable, there is no growth to predict");
  auto pred = manifold_prediction(cfg.post_coupling, symbol_for(ctx, cfg.observable_a, "observable.A"), cfg.order);
  const auto cov = covariance_for(ctx);
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < pred.C.size(); ++k) rows.push_back({static_cast<double>(k), pred.C[k]});
  bundle.table("C_k", "k,value", rows);

  if (!cfg.bras.empty()) {
    const auto l = cfg.ket.empty() ? 0 : cfg.ket[0];
    const double phi = quadrature_angle(ctx.gap(), ctx.lambda());
    rows.clear();
    for (const auto& k : cfg.bras) {
      const Complex c = predict_ckl(pred, k[0], l, phi);
      rows.push_back({static_cast<double>(k[0]), static_cast<double>(l), c.real(), c.imag()});
    }
    bundle.table("c_kl", "k,l,re,im", rows);
  }

  const auto mean = expectation_series(pred, cov, WickFactor::Pairings);
  std::vector<double> values;
  for (double t : ctx.grid) values.push_back(mean.at(t, ctx.hbar()));
  bundle.series("expectation", TimeSeries::make_real(ctx.grid, values, ctx.meta(cfg.observable_a, "mean")),
                "expectation", false);

  if (!cfg.observable_b.empty()) {
    const auto series = otoc_series(pred, from_phase_space(symbol_for(ctx, cfg.observable_b, "observable.B"),
                                                           ctx.lambda()),
                                    cov, cfg.otoc_terms);
    rows.clear();
    for (std::size_t m = 0; m < pred.otoc_c.size(); ++m) rows.push_back({static_cast<double>(m), pred.otoc_c[m]});
    bundle.table("otoc_c", "m,value", rows);
    values.clear();
    for (double t : ctx.grid) values.push_back(std::pow(ctx.hbar() * std::exp(ctx.lambda() * t), 2) * series.at(t, ctx.hbar()));
    bundle.series("otoc_prediction", TimeSeries::make_real(ctx.grid, values, ctx.meta("otoc", "series")), "otoc", true);
  }

  rows.clear();
  for (int n = 2; n <= cfg.cumulant_max; ++n) {
    double d = 0.0;
    try {
      d = cumulant_prediction(pred, n).d();
    } catch (const OrderError& e) {
      ctx.warn("d_" + std::to_string(n) + ": " + e.what());
      break;
    }
    rows.push_back({static_cast<double>(n), d});
    values.clear();
    for (double t : ctx.grid) values.push_back(d * std::pow(pred.renorm_param(t, ctx.hbar(), cov.plus2), n - 1));
    bundle.series("kappa_pred_" + std::to_string(n),
                  TimeSeries::make_real(ctx.grid, values, ctx.meta(cfg.observable_a, "prediction")), "kappa", true);
  }
  if (!rows.empty()) bundle.table("d_n", "n,value", rows);
  ctx.results["bplus2"] = cov.plus2;
}

Manifest stability(const ExperimentConfig& cfg, Bundle& bundle) {
  // The dimer coupling is alpha; the lattice analysis takes u.
  double u = cfg.post_coupling;
  if (cfg.model == Model::Dimer) u = cfg.particles > 0 ? u_from_alpha(cfg.post_coupling, cfg.particles) : -2.0 * cfg.post_coupling;
  const auto spectrum = gp_stability(u, cfg.sites);
  bundle.raw("stability.csv", [&](std::ostream& out) { spectrum.write_csv(out); });

  Manifest m;
  m.model = to_string(cfg.model);
  std::ostringstream quench;
  quench << (cfg.model == Model::Dimer ? "alpha" : "u") << ": " << cfg.pre_coupling << " -> " << cfg.post_coupling;
  m.quench = quench.str();
  m.hbar_eff = cfg.particles > 0 ? 1.0 / (cfg.particles + 1.0) : 0.0;
  const auto rates = spectrum.unstable_rates();
  if (!rates.empty()) {
    m.lambda = cfg.hopping * *std::max_element(rates.begin(), rates.end());
    if (cfg.particles > 0) m.ehrenfest_time = ehrenfest_time(cfg.particles, *m.lambda);
  }
  json frequencies = json::array();
  for (const auto& mode : spectrum.modes) {
    frequencies.push_back({{"mode_k", mode.mode_k}, {"type", to_string(mode.type)}, {"value", mode.value},
                           {"omega_squared", mode.omega_squared}, {"degeneracy", mode.degeneracy}});
  }
  m.outputs["results"] = {{"sites", cfg.sites}, {"u", u}, {"modes", frequencies}, {"warnings", spectrum.warnings}};
  return m;
}

}  // namespace

PhaseSpacePolynomial z_symbol(const FockBasis& basis, const SparseOperator& diagonal, int max_degree) {
  if (basis.sites() != 2) throw ConfigError("a phase-space symbol needs a dimer observable");
  if (!diagonal.is_diagonal()) throw ConfigError("a phase-space symbol needs a diagonal observable");
  const auto values = diagonal.diagonal_values();
  const double n1 = basis.particles() + 1.0;
  std::vector<double> z(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const auto s = basis.state(i);
    z[i] = (static_cast<double>(s[0]) - static_cast<double>(s[1])) / (2.0 * n1);
  }
  double scale = 0.0;
  for (double v : values) scale = std::max(scale, std::abs(v));
  const auto n = static_cast<Eigen::Index>(basis.size());
  // Rescaling z by 2 keeps the Vandermonde columns of order one.
  for (int degree = 0; degree <= std::min<int>(max_degree, static_cast<int>(n) - 1); ++degree) {
    Eigen::MatrixXd v(n, degree + 1);
    Eigen::VectorXd rhs(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      double p = 1.0;
      for (int j = 0; j <= degree; ++j, p *= 2.0 * z[static_cast<std::size_t>(i)]) v(i, j) = p;
      rhs(i) = values[static_cast<std::size_t>(i)];
    }
    const Eigen::VectorXd c = v.colPivHouseholderQr().solve(rhs);
    if ((v * c - rhs).cwiseAbs().maxCoeff() > 1e-10 * std::max(scale, 1.0)) continue;
    PhaseSpacePolynomial out;
    const double largest = c.cwiseAbs().maxCoeff();
    for (int j = 0; j <= degree; ++j) {
      if (std::abs(c(j)) > 1e-12 * largest) out[{j, 0}] = c(j) * std::pow(2.0, j);
    }
    return out;
  }
  throw ConfigError("not a polynomial of degree <= " + std::to_string(max_degree) + " in z");
}

Manifest run(const ExperimentConfig& cfg, const RunOptions& options) {
  Bundle bundle(options.out_dir);
  Manifest m;
  if (cfg.command == Command::MeanfieldStability) {
    m = stability(cfg, bundle);
  } else {
    Context ctx{cfg, options, make_quench(cfg.quench_spec()), {}, std::nullopt, json::object(), {}};
    if (options.dump_basis) bundle.raw("basis.csv", [&](std::ostream& out) { ctx.quench.basis.write_csv(out); });
    if (ctx.quench.lambda) {
      ctx.window = FitWindow{cfg.window_lo / ctx.lambda(), cfg.window_hi * *ctx.quench.ehrenfest_time};
    } else {
      ctx.warn("the postquench fixed point is stable: growth fits, collapse and predictions are skipped");
    }
    ctx.grid = cfg.time.resolve(ctx.quench.ehrenfest_time);
    if (ctx.window && std::count_if(ctx.grid.begin(), ctx.grid.end(), [&](double t) { return ctx.window->contains(t); }) < 5) {
      ctx.warn("fewer than 5 grid points inside the fit window: growth fits, collapse and predictions are skipped");
      ctx.window.reset();
    }
    ctx.log(to_string(cfg.command) + ": " + to_string(cfg.model) + ", N = " + std::to_string(cfg.particles) + ", " +
            ctx.quench.description() + ", dimension " + std::to_string(ctx.quench.basis.size()));
    switch (cfg.command) {
      case Command::DimerMatrixElements: dimer_matrix_elements(ctx, bundle); break;
      case Command::DimerOtoc: dimer_otoc(ctx, bundle); break;
      case Command::DimerCumulants: dimer_cumulants(ctx, bundle); break;
      case Command::TrimerCollapse: trimer_collapse(ctx, bundle); break;
      case Command::Predict: predict(ctx, bundle); break;
      case Command::MeanfieldStability: break;
    }
    m.model = to_string(cfg.model);
    m.quench = ctx.quench.description();
    m.hbar_eff = ctx.hbar();
    m.lambda = ctx.quench.lambda;
    m.ehrenfest_time = ctx.quench.ehrenfest_time;
    m.window = ctx.window;
    m.outputs["results"] = ctx.results;
    m.outputs["warnings"] = ctx.warnings;
  }
  if (options.emit_gnuplot) bundle.gnuplot();
  m.git_describe = git_describe();
  m.config = cfg.source;
  m.outputs["command"] = to_string(cfg.command);
  m.outputs["files"] = bundle.files();
  std::ofstream out(bundle.dir() / "manifest.json");
  if (!out) throw Error("cannot write " + (bundle.dir() / "manifest.json").string());
  m.write(out);
  return m;
}

}  // namespace bhq::cli
