#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace qcbo {

// Raised for malformed or inconsistent configuration; the CLI maps it to a
// dedicated exit code.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require_known_keys(const nlohmann::json& j, const std::set<std::string>& allowed,
                               const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw ConfigError(where + ": unknown key \"" + it.key() + "\"");
}

namespace detail {

template <typename T>
T get_field(const nlohmann::json& j, const std::string& key, const T& fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("config: key \"" + key + "\" has the wrong type");
  }
}

}  // namespace detail

struct BoSettings {
  int n_init = 10;
  int m_iters = 50;
  int refit_every = 10;
  std::string acquisition = "ucb";  // "ucb" | "ei"
  double ucb_k_start = 5.0;
  double ucb_k_end = 0.0;
};

struct ScenarioConfig {
  std::string system;     // "bose-hubbard" | "rydberg-1d" | "rydberg-2d" | "rydberg-3d"
  std::string fom;        // "fidelity" | "fexp" | "manifold" | "detected-count"
  std::string optimizer;  // "bo" | "spsa" | "nm" | "de" | "random"

  int budget = 0;  // baselines only; BO derives it from n_init + m_iters
  BoSettings bo;

  double protocol_time_factor = 1.0;  // lattice ramp duration as a multiple of the speed limit
  int substeps = 1600;
  int fexp_shots = 1000;

  int target_excitations = 0;  // 0 = geometry default
  double tolerance = 1e-5;     // per-evaluation integration accuracy
  double detection_prob = 1.0;
  double fill_prob = 1.0;
  double pulse_noise_sigma = 0.0;

  int repeats = 1;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string output_dir = "out";

  bool is_rydberg() const { return system.rfind("rydberg-", 0) == 0; }

  int total_evals() const { return optimizer == "bo" ? bo.n_init + bo.m_iters : budget; }

  int effective_target() const {
    if (target_excitations > 0) return target_excitations;
    return system == "rydberg-3d" ? 4 : 5;
  }

  void validate() const {
    static const std::set<std::string> systems = {"bose-hubbard", "rydberg-1d", "rydberg-2d",
                                                  "rydberg-3d"};
    static const std::set<std::string> foms = {"fidelity", "fexp", "manifold", "detected-count"};
    static const std::set<std::string> optimizers = {"bo", "spsa", "nm", "de", "random"};
    if (!systems.count(system)) throw ConfigError("config: unknown system \"" + system + "\"");
    if (!foms.count(fom)) throw ConfigError("config: unknown fom \"" + fom + "\"");
    if (!optimizers.count(optimizer))
      throw ConfigError("config: unknown optimizer \"" + optimizer + "\"");

    bool bh = system == "bose-hubbard";
    if ((fom == "fidelity" || fom == "fexp") && !bh)
      throw ConfigError("config: fom \"" + fom + "\" requires system \"bose-hubbard\"");
    if ((fom == "manifold" || fom == "detected-count") && bh)
      throw ConfigError("config: fom \"" + fom + "\" requires a rydberg system");

    if (optimizer == "bo") {
      if (bo.n_init < 1 || bo.m_iters < 0)
        throw ConfigError("config: bo needs n_init >= 1 and m_iters >= 0");
      if (bo.refit_every < 1) throw ConfigError("config: bo.refit_every must be >= 1");
      if (bo.acquisition != "ucb" && bo.acquisition != "ei")
        throw ConfigError("config: bo.acquisition must be \"ucb\" or \"ei\"");
      if (bo.acquisition == "ucb" && !(bo.ucb_k_start >= bo.ucb_k_end && bo.ucb_k_end >= 0))
        throw ConfigError("config: need ucb_k_start >= ucb_k_end >= 0");
    } else if (budget < 1) {
      throw ConfigError("config: optimizer \"" + optimizer + "\" needs budget >= 1");
    }

    if (!(protocol_time_factor > 0)) throw ConfigError("config: protocol_time_factor must be > 0");
    if (substeps < 1) throw ConfigError("config: substeps must be >= 1");
    if (fom == "fexp" && fexp_shots < 2) throw ConfigError("config: fexp_shots must be >= 2");
    if (target_excitations < 0) throw ConfigError("config: target_excitations must be >= 0");
    if (!(tolerance > 0)) throw ConfigError("config: tolerance must be > 0");
    if (!(detection_prob >= 0 && detection_prob <= 1))
      throw ConfigError("config: detection_prob must lie in [0, 1]");
    if (!(fill_prob >= 0 && fill_prob <= 1))
      throw ConfigError("config: fill_prob must lie in [0, 1]");
    if (!(pulse_noise_sigma >= 0)) throw ConfigError("config: pulse_noise_sigma must be >= 0");
    if (repeats < 1) throw ConfigError("config: repeats must be >= 1");
    if (workers < 1) throw ConfigError("config: workers must be >= 1");
    if (output_dir.empty()) throw ConfigError("config: output_dir must be non-empty");
  }

  static ScenarioConfig from_json(const nlohmann::json& j) {
    require_known_keys(j,
                       {"system", "fom", "optimizer", "budget", "bo", "protocol_time_factor",
                        "substeps", "fexp_shots", "target_excitations", "tolerance",
                        "detection_prob", "fill_prob", "pulse_noise_sigma", "repeats", "seed",
                        "workers", "output_dir"},
                       "config");
    ScenarioConfig c;
    c.system = detail::get_field<std::string>(j, "system", "");
    c.fom = detail::get_field<std::string>(j, "fom", "");
    c.optimizer = detail::get_field<std::string>(j, "optimizer", "");
    c.budget = detail::get_field<int>(j, "budget", c.budget);
    if (j.contains("bo")) {
      const auto& b = j.at("bo");
      require_known_keys(
          b, {"n_init", "m_iters", "refit_every", "acquisition", "ucb_k_start", "ucb_k_end"},
          "config.bo");
      c.bo.n_init = detail::get_field<int>(b, "n_init", c.bo.n_init);
      c.bo.m_iters = detail::get_field<int>(b, "m_iters", c.bo.m_iters);
      c.bo.refit_every = detail::get_field<int>(b, "refit_every", c.bo.refit_every);
      c.bo.acquisition = detail::get_field<std::string>(b, "acquisition", c.bo.acquisition);
      c.bo.ucb_k_start = detail::get_field<double>(b, "ucb_k_start", c.bo.ucb_k_start);
      c.bo.ucb_k_end = detail::get_field<double>(b, "ucb_k_end", c.bo.ucb_k_end);
      if (c.bo.acquisition == "ei" && (b.contains("ucb_k_start") || b.contains("ucb_k_end")))
        throw ConfigError("config.bo: ucb_k_* only applies to acquisition \"ucb\"");
    }
    c.protocol_time_factor =
        detail::get_field<double>(j, "protocol_time_factor", c.protocol_time_factor);
    c.substeps = detail::get_field<int>(j, "substeps", c.substeps);
    c.fexp_shots = detail::get_field<int>(j, "fexp_shots", c.fexp_shots);
    c.target_excitations = detail::get_field<int>(j, "target_excitations", c.target_excitations);
    c.tolerance = detail::get_field<double>(j, "tolerance", c.tolerance);
    c.detection_prob = detail::get_field<double>(j, "detection_prob", c.detection_prob);
    c.fill_prob = detail::get_field<double>(j, "fill_prob", c.fill_prob);
    c.pulse_noise_sigma = detail::get_field<double>(j, "pulse_noise_sigma", c.pulse_noise_sigma);
    c.repeats = detail::get_field<int>(j, "repeats", c.repeats);
    c.seed = detail::get_field<std::uint64_t>(j, "seed", c.seed);
    c.workers = detail::get_field<int>(j, "workers", c.workers);
    c.output_dir = detail::get_field<std::string>(j, "output_dir", c.output_dir);

    bool bh_keys = j.contains("protocol_time_factor") || j.contains("substeps");
    if (bh_keys && c.system != "bose-hubbard")
      throw ConfigError("config: protocol_time_factor/substeps only apply to bose-hubbard");
    if (j.contains("fexp_shots") && c.fom != "fexp")
      throw ConfigError("config: fexp_shots only applies to fom \"fexp\"");
    bool ryd_keys = j.contains("target_excitations") || j.contains("tolerance");
    if (ryd_keys && !c.is_rydberg())
      throw ConfigError("config: target_excitations/tolerance only apply to rydberg systems");
    bool noise_keys = j.contains("detection_prob") || j.contains("fill_prob") ||
                      j.contains("pulse_noise_sigma");
    if (noise_keys && c.fom != "detected-count")
      throw ConfigError(
          "config: detection_prob/fill_prob/pulse_noise_sigma only apply to fom "
          "\"detected-count\"");
    if (j.contains("budget") && c.optimizer == "bo")
      throw ConfigError("config: budget does not apply to bo; set bo.n_init and bo.m_iters");

    c.validate();
    return c;
  }

  // Canonical echo with every effective value spelled out; nlohmann orders
  // object keys, so equal configs serialize to equal bytes.
  nlohmann::json to_json() const {
    nlohmann::json j;
    j["system"] = system;
    j["fom"] = fom;
    j["optimizer"] = optimizer;
    if (optimizer == "bo") {
      j["bo"]["n_init"] = bo.n_init;
      j["bo"]["m_iters"] = bo.m_iters;
      j["bo"]["refit_every"] = bo.refit_every;
      j["bo"]["acquisition"] = bo.acquisition;
      if (bo.acquisition == "ucb") {
        j["bo"]["ucb_k_start"] = bo.ucb_k_start;
        j["bo"]["ucb_k_end"] = bo.ucb_k_end;
      }
    } else {
      j["budget"] = budget;
    }
    if (system == "bose-hubbard") {
      j["protocol_time_factor"] = protocol_time_factor;
      j["substeps"] = substeps;
    } else {
      j["target_excitations"] = effective_target();
      j["tolerance"] = tolerance;
    }
    if (fom == "fexp") j["fexp_shots"] = fexp_shots;
    if (fom == "detected-count") {
      j["detection_prob"] = detection_prob;
      j["fill_prob"] = fill_prob;
      j["pulse_noise_sigma"] = pulse_noise_sigma;
    }
    j["repeats"] = repeats;
    j["seed"] = seed;
    // output_dir and workers are execution details; they do not identify the
    // scenario and never change the results, so they stay out of the echo.
    return j;
  }
};

struct PresetInfo {
  std::string name;
  std::string note;
};

inline std::vector<PresetInfo> preset_list() {
  return {
      {"bh-benchmark", "lattice ramp fidelity, BO 100+1750, UCB 5 -> 0"},
      {"bh-desk", "lattice ramp fidelity, BO 100+500, UCB 5 -> 0"},
      {"bh-fexp", "lattice ramp shot-based FoM, BO 100+500, 1000 shots"},
      {"rydberg-1d", "9-atom chain, 5-excitation manifold, BO 24+10, EI"},
      {"rydberg-2d", "3x3 square, 5-excitation manifold, BO 24+10, EI"},
      {"rydberg-3d", "2x2x2 cube, 4-excitation manifold, BO 24+10, EI"},
      {"rydberg-1d-noisy", "9-atom chain, detected count with imperfections, BO 6+50, EI"},
  };
}

inline ScenarioConfig preset_config(const std::string& name) {
  ScenarioConfig c;
  c.optimizer = "bo";
  c.repeats = 10;
  if (name == "bh-benchmark" || name == "bh-desk" || name == "bh-fexp") {
    c.system = "bose-hubbard";
    c.fom = name == "bh-fexp" ? "fexp" : "fidelity";
    c.bo.n_init = 100;
    c.bo.m_iters = name == "bh-benchmark" ? 1750 : 500;
    c.bo.refit_every = 10;
    c.bo.acquisition = "ucb";
    c.bo.ucb_k_start = 5.0;
    c.bo.ucb_k_end = 0.0;
  } else if (name == "rydberg-1d" || name == "rydberg-2d" || name == "rydberg-3d") {
    c.system = name;
    c.fom = "manifold";
    c.bo.n_init = 24;
    c.bo.m_iters = 10;
    c.bo.refit_every = 10;
    c.bo.acquisition = "ei";
    c.repeats = 5;
  } else if (name == "rydberg-1d-noisy") {
    c.system = "rydberg-1d";
    c.fom = "detected-count";
    c.bo.n_init = 6;
    c.bo.m_iters = 50;
    c.bo.refit_every = 10;
    c.bo.acquisition = "ei";
    c.detection_prob = 0.9;
    c.fill_prob = 0.9;
    c.pulse_noise_sigma = 0.05;
    c.repeats = 5;
  } else {
    throw ConfigError("unknown preset \"" + name + "\"");
  }
  c.validate();
  return c;
}

}  // namespace qcbo
