#include "bhq/observables/manifest.hpp"

#include <ostream>

namespace bhq {

nlohmann::json Manifest::to_json() const {
  nlohmann::json j;
  j["model"] = model;
  j["quench"] = quench;
  j["hbar_eff"] = hbar_eff;
  j["lambda"] = lambda ? nlohmann::json(*lambda) : nlohmann::json(nullptr);
  j["t_E"] = ehrenfest_time ? nlohmann::json(*ehrenfest_time) : nlohmann::json(nullptr);
  j["window"] = window ? nlohmann::json::array({window->lo, window->hi}) : nlohmann::json(nullptr);
  j["git_describe"] = git_describe;
  j["config"] = config;
  j["outputs"] = outputs;
  return j;
}

Manifest Manifest::from_json(const nlohmann::json& j) {
  Manifest m;
  try {
    m.model = j.at("model").get<std::string>();
    m.quench = j.at("quench").get<std::string>();
    m.hbar_eff = j.at("hbar_eff").get<double>();
    if (!j.at("lambda").is_null()) m.lambda = j.at("lambda").get<double>();
    if (!j.at("t_E").is_null()) m.ehrenfest_time = j.at("t_E").get<double>();
    if (!j.at("window").is_null()) m.window = FitWindow{j.at("window").at(0), j.at("window").at(1)};
    m.git_describe = j.at("git_describe").get<std::string>();
    m.config = j.at("config");
    m.outputs = j.value("outputs", nlohmann::json::object());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("manifest: ") + e.what());
  }
  return m;
}

void Manifest::write(std::ostream& out) const { out << to_json().dump(2) << '\n'; }

}  // namespace bhq
