#pragma once

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "multispot/error.hpp"
#include "multispot/experiment.hpp"

namespace multispot {

/// K_T bins evenly spaced over the window, centred in each of K_T equal
/// segments (zero-based). For K_P = 30, K_T = 5 this is {2, 8, 14, 20, 26}.
inline std::vector<BinIndex> default_target_positions(std::size_t k_p, std::size_t k_t) {
  std::vector<BinIndex> out;
  if (k_t == 0 || k_t > k_p) return out;
  const double spacing = static_cast<double>(k_p) / static_cast<double>(k_t);
  for (std::size_t i = 0; i < k_t; ++i)
    out.push_back(static_cast<BinIndex>(std::ceil((static_cast<double>(i) + 0.5) * spacing)) - 1);
  return out;
}

inline std::vector<double> sinr_grid(double start, double stop, double step) {
  require(step > 0.0 && stop >= start, "sinr grid needs step > 0 and stop >= start");
  std::vector<double> out;
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  for (std::size_t i = 0; i < count; ++i) out.push_back(start + static_cast<double>(i) * step);
  return out;
}

/// Full-size simulation: N = N_a = 16, K_T = 5, K_P = 30, K_S = 48,
/// P_fa = 1e-3, CNR 40 dB, rho_c = 0.9, 1e3 detection trials per SINR point.
inline ExperimentConfig paper_preset() {
  ExperimentConfig c;
  Scenario& s = c.scenario;
  s.n_a = 16;
  s.n_p = 1;
  s.theta = 0.0;
  s.doppler = 0.0;
  s.cnr_db = 40.0;
  s.rho_c = 0.9;
  s.k_p = 30;
  s.k_s = 48;
  s.k_t = 5;
  s.target_positions = default_target_positions(s.k_p, s.k_t);
  s.sinr_db = sinr_grid(-2.0, 20.0, 0.5);
  s.p_fa = 1e-3;
  s.seed = 20211;
  c.covariance = CovarianceMode::Sample;
  c.known_order = true;
  c.mos_rules = {MosRule::aic(), MosRule::gic(1.0), MosRule::gic(2.0), MosRule::gic(3.0), MosRule::bic()};
  c.pd_trials = 1000;
  return c;
}

/// Reduced scenario for quick runs: N = 8, K_P = 16, K_S = 24, P_fa = 1e-2,
/// 500 detection trials per SINR point.
inline ExperimentConfig desk_preset() {
  ExperimentConfig c = paper_preset();
  Scenario& s = c.scenario;
  s.n_a = 8;
  s.k_p = 16;
  s.k_s = 24;
  s.target_positions = default_target_positions(s.k_p, s.k_t);
  s.sinr_db = sinr_grid(-2.0, 20.0, 1.0);
  s.p_fa = 1e-2;
  c.pd_trials = 500;
  return c;
}

inline ExperimentConfig preset(const std::string& name) {
  if (name == "paper") return paper_preset();
  if (name == "desk") return desk_preset();
  throw ConfigError("preset", "unknown preset '" + name + "' (expected paper or desk)");
}

namespace detail {

using nlohmann::json;

inline double get_number(const json& j, const std::string& key) {
  if (!j.is_number()) throw ConfigError(key, "expected a number");
  return j.get<double>();
}

inline std::size_t get_count(const json& j, const std::string& key) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) throw ConfigError(key, "expected a non-negative integer");
  const auto value = j.get<long long>();
  if (value < 0) throw ConfigError(key, "expected a non-negative integer");
  return static_cast<std::size_t>(value);
}

inline std::vector<double> get_number_list(const json& j, const std::string& key) {
  if (j.is_number()) return {j.get<double>()};
  if (!j.is_array()) throw ConfigError(key, "expected a number or an array of numbers");
  std::vector<double> out;
  for (const auto& e : j) out.push_back(get_number(e, key));
  return out;
}

inline std::string get_string(const json& j, const std::string& key) {
  if (!j.is_string()) throw ConfigError(key, "expected a string");
  return j.get<std::string>();
}

inline std::vector<double> parse_sinr(const json& j) {
  if (j.is_object()) {
    for (const auto& [k, _] : j.items()) {
      if (k != "start" && k != "stop" && k != "step") throw ConfigError("sinr_db." + k, "unknown key");
    }
    for (const char* k : {"start", "stop", "step"}) {
      if (!j.contains(k)) throw ConfigError(std::string("sinr_db.") + k, "missing");
    }
    try {
      return sinr_grid(get_number(j["start"], "sinr_db.start"), get_number(j["stop"], "sinr_db.stop"),
                       get_number(j["step"], "sinr_db.step"));
    } catch (const ParameterError& e) {
      throw ConfigError("sinr_db", e.what());
    }
  }
  auto grid = get_number_list(j, "sinr_db");
  if (grid.empty()) throw ConfigError("sinr_db", "grid must not be empty");
  return grid;
}

inline DetectorKind parse_detector(const std::string& name) {
  if (name == "BML") return DetectorKind::BML;
  if (name == "WEN") return DetectorKind::WEN;
  if (name == "GAMF") return DetectorKind::GAMF;
  if (name == "GASD") return DetectorKind::GASD;
  throw ConfigError("detectors", "unknown detector '" + name + "' (expected BML, WEN, GAMF or GASD)");
}

}  // namespace detail

/// Applies a JSON configuration on top of `base`. Unknown keys, type
/// mismatches and violated invariants raise ConfigError naming the key.
/// `target_positions` are one-based in the file.
inline ExperimentConfig parse_config(const nlohmann::json& j, ExperimentConfig base = paper_preset()) {
  using detail::get_count;
  using detail::get_number;
  if (!j.is_object()) throw ConfigError("", "configuration must be a JSON object");
  static const std::set<std::string> known = {
      "n_a",      "n_p",     "theta",     "doppler",   "cnr_db",        "rho_c",
      "k_p",      "k_s",     "k_t",       "target_positions", "sinr_db", "p_fa",
      "seed",     "covariance", "detectors", "mos_rules", "gic_rho",    "calibration_trials",
      "validation_trials", "pd_trials", "data_scale", "threads"};
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw ConfigError(key, "unknown key");
  }

  ExperimentConfig c = std::move(base);
  Scenario& s = c.scenario;
  if (j.contains("n_a")) s.n_a = get_count(j["n_a"], "n_a");
  if (j.contains("n_p")) s.n_p = get_count(j["n_p"], "n_p");
  if (j.contains("theta")) s.theta = get_number(j["theta"], "theta");
  if (j.contains("doppler")) s.doppler = get_number(j["doppler"], "doppler");
  if (j.contains("cnr_db")) s.cnr_db = get_number(j["cnr_db"], "cnr_db");
  if (j.contains("rho_c")) s.rho_c = get_number(j["rho_c"], "rho_c");
  if (j.contains("k_p")) s.k_p = get_count(j["k_p"], "k_p");
  if (j.contains("k_s")) s.k_s = get_count(j["k_s"], "k_s");
  if (j.contains("k_t")) s.k_t = get_count(j["k_t"], "k_t");
  if (j.contains("target_positions")) {
    const auto& tp = j["target_positions"];
    if (!tp.is_array()) throw ConfigError("target_positions", "expected an array of one-based bin indices");
    s.target_positions.clear();
    for (const auto& e : tp) {
      const std::size_t h = get_count(e, "target_positions");
      if (h < 1) throw ConfigError("target_positions", "bin indices are one-based");
      s.target_positions.push_back(h - 1);
    }
    if (!j.contains("k_t")) s.k_t = s.target_positions.size();
  } else if (j.contains("k_t") || j.contains("k_p")) {
    s.target_positions = default_target_positions(s.k_p, s.k_t);
  }
  if (j.contains("sinr_db")) s.sinr_db = detail::parse_sinr(j["sinr_db"]);
  if (j.contains("p_fa")) s.p_fa = get_number(j["p_fa"], "p_fa");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer() && !j["seed"].is_number_unsigned())
      throw ConfigError("seed", "expected an integer");
    s.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("covariance")) {
    const std::string mode = detail::get_string(j["covariance"], "covariance");
    if (mode == "sample") c.covariance = CovarianceMode::Sample;
    else if (mode == "known") c.covariance = CovarianceMode::Known;
    else throw ConfigError("covariance", "expected \"sample\" or \"known\"");
  }
  if (j.contains("detectors")) {
    if (!j["detectors"].is_array()) throw ConfigError("detectors", "expected an array of detector names");
    c.detectors.clear();
    for (const auto& e : j["detectors"]) c.detectors.push_back(detail::parse_detector(detail::get_string(e, "detectors")));
  }
  std::vector<double> rhos;
  for (const MosRule& r : c.mos_rules)
    if (r.kind == MosRule::Kind::GIC) rhos.push_back(r.rho);
  if (rhos.empty()) rhos = {1.0};
  if (j.contains("gic_rho")) {
    rhos = detail::get_number_list(j["gic_rho"], "gic_rho");
    if (rhos.empty()) throw ConfigError("gic_rho", "expected at least one value");
    for (double r : rhos)
      if (!(r >= 1.0)) throw ConfigError("gic_rho", "GIC requires rho >= 1");
  }
  std::vector<std::string> rule_names;
  if (j.contains("mos_rules")) {
    if (!j["mos_rules"].is_array()) throw ConfigError("mos_rules", "expected an array of rule names");
    for (const auto& e : j["mos_rules"]) rule_names.push_back(detail::get_string(e, "mos_rules"));
  } else {
    if (c.known_order) rule_names.push_back("known");
    for (const MosRule& r : c.mos_rules) {
      const char* name = r.kind == MosRule::Kind::AIC ? "AIC" : r.kind == MosRule::Kind::BIC ? "BIC" : "GIC";
      if (std::find(rule_names.begin(), rule_names.end(), name) == rule_names.end()) rule_names.push_back(name);
    }
  }
  c.known_order = false;
  c.mos_rules.clear();
  for (const std::string& name : rule_names) {
    if (name == "known") c.known_order = true;
    else if (name == "AIC") c.mos_rules.push_back(MosRule::aic());
    else if (name == "BIC") c.mos_rules.push_back(MosRule::bic());
    else if (name == "GIC") for (double r : rhos) c.mos_rules.push_back(MosRule::gic(r));
    else throw ConfigError("mos_rules", "unknown rule '" + name + "' (expected known, AIC, GIC or BIC)");
  }
  if (j.contains("calibration_trials")) c.calibration_trials = get_count(j["calibration_trials"], "calibration_trials");
  if (j.contains("validation_trials")) c.validation_trials = get_count(j["validation_trials"], "validation_trials");
  if (j.contains("pd_trials")) c.pd_trials = get_count(j["pd_trials"], "pd_trials");
  if (j.contains("data_scale")) c.data_scale = get_number(j["data_scale"], "data_scale");
  if (j.contains("threads")) c.threads = get_count(j["threads"], "threads");

  // Invariants, each reported against the key most likely at fault.
  if (s.n_a < 1) throw ConfigError("n_a", "must be >= 1");
  if (s.n_p < 1) throw ConfigError("n_p", "must be >= 1");
  if (s.k_p < 1) throw ConfigError("k_p", "K_P >= 1 required");
  if (s.k_t < 1 || s.k_t > s.k_p) throw ConfigError("k_t", "1 <= K_T <= K_P required");
  if (s.target_positions.size() != s.k_t) throw ConfigError("target_positions", "must list exactly K_T bins");
  {
    std::set<BinIndex> seen;
    for (BinIndex h : s.target_positions) {
      if (h >= s.k_p) throw ConfigError("target_positions", "bin outside 1..K_P");
      if (!seen.insert(h).second) throw ConfigError("target_positions", "bins must be distinct");
    }
  }
  if (!(s.rho_c >= 0.0 && s.rho_c < 1.0)) throw ConfigError("rho_c", "must lie in [0, 1)");
  if (!(s.p_fa > 0.0 && s.p_fa < 1.0)) throw ConfigError("p_fa", "must lie in (0, 1)");
  if (c.covariance == CovarianceMode::Sample && s.k_s < s.n())
    throw ConfigError("k_s", "K_S >= N required (K_S=" + std::to_string(s.k_s) + ", N=" + std::to_string(s.n()) + ")");
  if (c.detectors.empty()) throw ConfigError("detectors", "at least one detector required");
  if (c.calibration_trials != 0 && c.calibration_trials < ExperimentConfig::minimum_calibration_trials(s.p_fa))
    throw ConfigError("calibration_trials", "at least ceil(100 / p_fa) = " +
                                                std::to_string(ExperimentConfig::minimum_calibration_trials(s.p_fa)) +
                                                " trials required");
  if (c.pd_trials < 1) throw ConfigError("pd_trials", "must be >= 1");
  if (!(c.data_scale != 0.0 && std::isfinite(c.data_scale))) throw ConfigError("data_scale", "must be finite and nonzero");
  return c;
}

inline ExperimentConfig load_config(const std::string& path, ExperimentConfig base = paper_preset()) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("", "malformed JSON in '" + path + "': " + e.what());
  }
  return parse_config(j, std::move(base));
}

}  // namespace multispot
