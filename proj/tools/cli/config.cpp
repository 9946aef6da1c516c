#include "cli/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "bhq/observables/cumulants.hpp"

namespace bhq::cli {

namespace {

using nlohmann::json;

const std::vector<std::pair<Command, std::string>>& command_table() {
  static const std::vector<std::pair<Command, std::string>> table{
      {Command::DimerMatrixElements, "dimer-matrix-elements"},
      {Command::DimerOtoc, "dimer-otoc"},
      {Command::DimerCumulants, "dimer-cumulants"},
      {Command::TrimerCollapse, "trimer-collapse"},
      {Command::MeanfieldStability, "meanfield-stability"},
      {Command::Predict, "predict"}};
  return table;
}

// Collects "field: reason" lines while reading a document.
class Reader {
 public:
  explicit Reader(const json& root) : root_(root) {}

  void fail(const std::string& field, const std::string& reason) { errors_.push_back(field + ": " + reason); }
  const std::vector<std::string>& errors() const { return errors_; }

  // Node at a dotted path, or nullptr when some component is missing.
  const json* find(const std::string& path) const {
    const json* node = &root_;
    std::istringstream parts(path);
    std::string part;
    while (std::getline(parts, part, '.')) {
      if (!node->is_object() || !node->contains(part)) return nullptr;
      node = &(*node)[part];
    }
    return node;
  }

  std::optional<double> number(const std::string& path, bool required) {
    const json* node = find(path);
    if (!node) {
      if (required) fail(path, "required");
      return std::nullopt;
    }
    if (!node->is_number()) {
      fail(path, "must be a number");
      return std::nullopt;
    }
    const double v = node->get<double>();
    if (!std::isfinite(v)) {
      fail(path, "must be finite");
      return std::nullopt;
    }
    return v;
  }

  std::optional<int> integer(const std::string& path, bool required, int min_value) {
    const json* node = find(path);
    if (!node) {
      if (required) fail(path, "required");
      return std::nullopt;
    }
    if (!node->is_number_integer()) {
      fail(path, "must be an integer");
      return std::nullopt;
    }
    const auto v = node->get<long long>();
    if (v < min_value || v > std::numeric_limits<int>::max()) {
      fail(path, "must be an integer >= " + std::to_string(min_value));
      return std::nullopt;
    }
    return static_cast<int>(v);
  }

  std::optional<std::string> string(const std::string& path, bool required) {
    const json* node = find(path);
    if (!node) {
      if (required) fail(path, "required");
      return std::nullopt;
    }
    if (!node->is_string() || node->get<std::string>().empty()) {
      fail(path, "must be a nonempty string");
      return std::nullopt;
    }
    return node->get<std::string>();
  }

  std::optional<std::vector<int>> label(const std::string& path, const json& node, std::size_t length) {
    if (!node.is_array() || node.size() != length) {
      fail(path, "must be an array of " + std::to_string(length) + " nonnegative integers");
      return std::nullopt;
    }
    std::vector<int> out;
    for (const auto& x : node) {
      if (!x.is_number_integer() || x.get<long long>() < 0 || x.get<long long>() > std::numeric_limits<int>::max()) {
        fail(path, "must be an array of " + std::to_string(length) + " nonnegative integers");
        return std::nullopt;
      }
      out.push_back(x.get<int>());
    }
    return out;
  }

  // Flags keys of an object that are not in `known`.
  void only(const std::string& path, const std::set<std::string>& known) {
    const json* node = path.empty() ? &root_ : find(path);
    if (!node) return;
    if (!node->is_object()) {
      fail(path.empty() ? "(document)" : path, "must be an object");
      return;
    }
    for (const auto& [key, value] : node->items()) {
      if (!known.count(key)) fail(path.empty() ? key : path + "." + key, "unknown field");
    }
  }

 private:
  const json& root_;
  std::vector<std::string> errors_;
};

bool needs_particles(Command c) { return c != Command::MeanfieldStability; }

}  // namespace

std::string to_string(Command command) {
  for (const auto& [c, name] : command_table()) {
    if (c == command) return name;
  }
  return "unknown";
}

Command command_from_string(const std::string& name) {
  for (const auto& [c, n] : command_table()) {
    if (n == name) return c;
  }
  throw ConfigError("unknown subcommand '" + name + "'");
}

std::vector<std::string> command_names() {
  std::vector<std::string> out;
  for (const auto& entry : command_table()) out.push_back(entry.second);
  return out;
}

std::vector<double> TimeGridSpec::resolve(std::optional<double> ehrenfest_time) const {
  double scale = 1.0;
  if (ehrenfest_units) {
    if (!ehrenfest_time) {
      throw ConfigError("time.unit: t_E is undefined because the postquench fixed point is stable; use \"1/J\"");
    }
    scale = *ehrenfest_time;
  }
  return linear_grid(start * scale, end * scale, static_cast<std::size_t>(points));
}

double EnsembleSpec::beta(double gap) const {
  switch (kind) {
    case Kind::Ground: return std::numeric_limits<double>::infinity();
    case Kind::Beta: return value;
    case Kind::GapTemperature: return 1.0 / (value * gap);
  }
  return std::numeric_limits<double>::infinity();
}

QuenchSpec ExperimentConfig::quench_spec() const { return {model, particles, pre_coupling, post_coupling, hopping}; }

ExperimentConfig parse_config(const json& document, Command command) {
  ExperimentConfig cfg;
  cfg.command = command;
  cfg.source = document;
  if (!document.is_object()) throw ConfigError("(document): must be a JSON object");
  Reader r(document);
  r.only("", {"schema_version", "model", "particles", "sites", "hopping", "quench", "observable", "states", "time",
              "ensemble", "expansion", "fit_window", "backend", "comment"});
  r.only("quench", {"from", "to"});
  r.only("observable", {"A", "B"});
  r.only("states", {"ket", "bras", "max_excitation"});
  r.only("time", {"start", "end", "unit", "points"});
  r.only("ensemble", {"kind", "beta", "kT_over_gap"});
  r.only("expansion", {"order", "otoc_terms", "cumulant_max"});
  r.only("fit_window", {"lo_inverse_lambda", "hi_ehrenfest"});

  if (const auto v = r.integer("schema_version", true, 1); v && *v != kSchemaVersion) {
    r.fail("schema_version", "unsupported version " + std::to_string(*v) + " (expected " +
                                 std::to_string(kSchemaVersion) + ")");
  }

  bool model_ok = false;
  if (const auto m = r.string("model", true)) {
    if (*m == "dimer" || *m == "trimer") {
      cfg.model = model_from_string(*m);
      model_ok = true;
      const bool dimer_only = command == Command::DimerMatrixElements || command == Command::DimerOtoc ||
                              command == Command::DimerCumulants || command == Command::Predict;
      if (dimer_only && cfg.model != Model::Dimer) r.fail("model", "subcommand " + to_string(command) + " needs \"dimer\"");
      if (command == Command::TrimerCollapse && cfg.model != Model::Trimer) {
        r.fail("model", "subcommand trimer-collapse needs \"trimer\"");
      }
    } else {
      r.fail("model", "must be \"dimer\" or \"trimer\"");
    }
  }
  cfg.sites = cfg.model == Model::Dimer ? 2 : 3;
  if (const auto s = r.integer("sites", false, 2)) {
    if (command != Command::MeanfieldStability) {
      r.fail("sites", "only meanfield-stability accepts a lattice size");
    } else if (model_ok && cfg.model == Model::Dimer && *s != 2) {
      r.fail("sites", "a dimer has 2 sites");
    } else {
      cfg.sites = *s;
    }
  }

  if (const auto n = r.integer("particles", needs_particles(command), 1)) cfg.particles = *n;
  if (const auto h = r.number("hopping", false)) {
    if (*h <= 0.0) r.fail("hopping", "must be positive");
    else cfg.hopping = *h;
  }
  if (const auto c = r.number("quench.from", false)) {
    if (*c != 0.0) r.fail("quench.from", "only a noninteracting prequench (0) is supported");
    cfg.pre_coupling = *c;
  }
  if (const auto c = r.number("quench.to", true)) cfg.post_coupling = *c;

  const bool scan = command == Command::DimerMatrixElements || command == Command::TrimerCollapse;
  const bool needs_a = command != Command::MeanfieldStability;
  if (command == Command::TrimerCollapse) {
    cfg.observable_a = r.string("observable.A", false).value_or("z1");
    cfg.observable_b = r.string("observable.B", false).value_or("n2");
  } else {
    if (const auto a = r.string("observable.A", needs_a)) cfg.observable_a = *a;
    if (const auto b = r.string("observable.B", command == Command::DimerOtoc)) cfg.observable_b = *b;
  }

  const std::size_t label_length = cfg.model == Model::Dimer ? 1 : 2;
  if (scan || command == Command::Predict) {
    const bool required = command == Command::DimerMatrixElements;
    if (const json* ket = r.find("states.ket")) {
      if (auto l = r.label("states.ket", *ket, label_length)) cfg.ket = *l;
    } else if (required) {
      r.fail("states.ket", "required");
    } else if (command == Command::TrimerCollapse) {
      cfg.ket = {0, 0};
    }
    const json* bras = r.find("states.bras");
    const auto max_excitation = r.integer("states.max_excitation", false, 1);
    if (bras && max_excitation) r.fail("states", "give either bras or max_excitation");
    if (bras) {
      if (!bras->is_array() || bras->empty()) {
        r.fail("states.bras", "must be a nonempty array of labels");
      } else {
        for (std::size_t i = 0; i < bras->size(); ++i) {
          if (auto l = r.label("states.bras[" + std::to_string(i) + "]", (*bras)[i], label_length)) {
            cfg.bras.push_back(*l);
          }
        }
      }
    } else if (cfg.model == Model::Trimer && command == Command::TrimerCollapse) {
      const int s_max = max_excitation.value_or(5);
      for (int s = 1; s <= s_max; ++s) {
        for (int k1 = 0; k1 <= s; ++k1) cfg.bras.push_back({k1, s - k1});
      }
    } else if (max_excitation) {
      r.fail("states.max_excitation", "only trimer-collapse generates labels");
    } else if (required) {
      r.fail("states.bras", "required");
    }
    if (cfg.particles > 0) {
      auto check = [&](const std::vector<int>& l, const std::string& field) {
        int total = 0;
        for (int x : l) total += x;
        if (total > cfg.particles) r.fail(field, "excitation exceeds the particle number");
      };
      if (!cfg.ket.empty()) check(cfg.ket, "states.ket");
      for (std::size_t i = 0; i < cfg.bras.size(); ++i) check(cfg.bras[i], "states.bras[" + std::to_string(i) + "]");
    }
  }

  if (command != Command::MeanfieldStability) {
    if (const auto v = r.number("time.start", false)) cfg.time.start = *v;
    if (const auto v = r.number("time.end", false)) cfg.time.end = *v;
    if (const auto u = r.string("time.unit", false)) {
      if (*u == "t_E") cfg.time.ehrenfest_units = true;
      else if (*u == "1/J") cfg.time.ehrenfest_units = false;
      else r.fail("time.unit", "must be \"t_E\" or \"1/J\"");
    }
    if (const auto p = r.integer("time.points", false, 2)) cfg.time.points = *p;
    if (cfg.time.start < 0.0) r.fail("time.start", "must be nonnegative");
    if (cfg.time.end <= cfg.time.start) r.fail("time.end", "must exceed time.start");
  }

  if (const auto kind = r.string("ensemble.kind", false)) {
    if (*kind == "ground") {
      cfg.ensemble.kind = EnsembleSpec::Kind::Ground;
      if (r.find("ensemble.beta") || r.find("ensemble.kT_over_gap")) {
        r.fail("ensemble", "a ground-state ensemble takes no temperature");
      }
    } else if (*kind == "thermal") {
      const auto beta = r.number("ensemble.beta", false);
      const auto kt = r.number("ensemble.kT_over_gap", false);
      if (beta.has_value() == kt.has_value()) {
        r.fail("ensemble", "a thermal ensemble needs exactly one of beta and kT_over_gap");
      } else if (beta) {
        if (*beta <= 0.0) r.fail("ensemble.beta", "must be positive");
        cfg.ensemble = {EnsembleSpec::Kind::Beta, *beta};
      } else {
        if (*kt <= 0.0) r.fail("ensemble.kT_over_gap", "must be positive");
        cfg.ensemble = {EnsembleSpec::Kind::GapTemperature, *kt};
      }
    } else {
      r.fail("ensemble.kind", "must be \"ground\" or \"thermal\"");
    }
  }

  if (const auto v = r.integer("expansion.order", false, 1)) cfg.order = *v;
  if (const auto v = r.integer("expansion.otoc_terms", false, 0)) cfg.otoc_terms = *v;
  if (const auto v = r.integer("expansion.cumulant_max", false, 1)) {
    if (*v > kMaxCumulantOrder) r.fail("expansion.cumulant_max", "at most " + std::to_string(kMaxCumulantOrder));
    else cfg.cumulant_max = *v;
  }
  if (const auto v = r.number("fit_window.lo_inverse_lambda", false)) cfg.window_lo = *v;
  if (const auto v = r.number("fit_window.hi_ehrenfest", false)) cfg.window_hi = *v;
  if (cfg.window_lo < 0.0) r.fail("fit_window.lo_inverse_lambda", "must be nonnegative");
  if (cfg.window_hi <= 0.0) r.fail("fit_window.hi_ehrenfest", "must be positive");

  if (const auto b = r.string("backend", false)) {
    if (*b == "auto" || *b == "spectral" || *b == "window" || *b == "krylov") cfg.backend = *b;
    else r.fail("backend", "must be one of auto, spectral, window, krylov");
    if (cfg.backend == "window" && command != Command::DimerMatrixElements) {
      r.fail("backend", "the energy-window backend only serves dimer-matrix-elements");
    }
  }

  if (!r.errors().empty()) {
    std::string message = "invalid configuration for " + to_string(command) + ":";
    for (const auto& e : r.errors()) message += "\n  " + e;
    throw ConfigError(message);
  }
  return cfg;
}

json load_config_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json document;
  try {
    in >> document;
  } catch (const json::exception& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  if (document.is_object() && document.contains("git_describe") && document.contains("config")) {
    return document.at("config");
  }
  return document;
}

}  // namespace bhq::cli
