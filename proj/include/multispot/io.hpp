#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "multispot/error.hpp"
#include "multispot/experiment.hpp"

namespace multispot {

/// Nine significant digits; non-finite values as nan / inf.
inline std::string format_float(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

/// The double closest to `x` printed with nine significant digits, so JSON
/// output carries the same precision as the CSV files.
inline double round9(double x) {
  if (!std::isfinite(x)) return x;
  return std::stod(format_float(x));
}

inline const char* kPdCurveHeader = "detector,mos_rule,sinr_db,pd,trials,eta";
inline const char* kMetricsHeader = "detector,mos_rule,sinr_db,rms_missed,rms_ghosts,rms_hausdorff,empty_rate";
inline const char* kKtHistHeader = "detector,mos_rule,sinr_db,k,probability";

inline std::string pd_curve_csv(const MetricsReport& report, const ThresholdTable& thresholds) {
  std::string out = std::string(kPdCurveHeader) + "\n";
  for (std::size_t p = 0; p < report.pipelines.size(); ++p) {
    const Pipeline& pl = report.pipelines[p];
    for (const SinrPoint& pt : report.points) {
      const PipelinePoint& agg = pt.pipelines[p];
      out += pl.detector_label() + "," + pl.mos_label() + "," + format_float(pt.sinr_db) + "," +
             format_float(agg.pd()) + "," + std::to_string(agg.trials) + "," + format_float(thresholds.entries[p].eta) +
             "\n";
    }
  }
  return out;
}

/// Estimation-quality rows for the support-based pipelines.
inline std::string metrics_csv(const MetricsReport& report) {
  std::string out = std::string(kMetricsHeader) + "\n";
  for (std::size_t p = 0; p < report.pipelines.size(); ++p) {
    const Pipeline& pl = report.pipelines[p];
    if (!pl.uses_support()) continue;
    for (const SinrPoint& pt : report.points) {
      const PipelinePoint& agg = pt.pipelines[p];
      out += pl.detector_label() + "," + pl.mos_label() + "," + format_float(pt.sinr_db) + "," +
             format_float(agg.rms_missed()) + "," + format_float(agg.rms_ghosts()) + "," +
             format_float(agg.rms_hausdorff()) + "," + format_float(agg.empty_rate()) + "\n";
    }
  }
  return out;
}

/// Histogram rows for the MOS pipelines, one row per k in 1..K_P.
inline std::string kt_hist_csv(const MetricsReport& report, std::size_t k_p) {
  std::string out = std::string(kKtHistHeader) + "\n";
  for (std::size_t p = 0; p < report.pipelines.size(); ++p) {
    const Pipeline& pl = report.pipelines[p];
    if (pl.order != OrderKind::Mos) continue;
    for (const SinrPoint& pt : report.points) {
      const PipelinePoint& agg = pt.pipelines[p];
      for (std::size_t k = 1; k <= k_p; ++k) {
        const auto it = agg.k_counts.find(k);
        const std::size_t c = it == agg.k_counts.end() ? 0 : it->second;
        const double prob = agg.trials ? static_cast<double>(c) / static_cast<double>(agg.trials) : 0.0;
        out += pl.detector_label() + "," + pl.mos_label() + "," + format_float(pt.sinr_db) + "," +
               std::to_string(k) + "," + format_float(prob) + "\n";
      }
    }
  }
  return out;
}

inline nlohmann::json thresholds_json(const ThresholdTable& table) {
  nlohmann::json j;
  j["seed"] = table.seed;
  j["entries"] = nlohmann::json::array();
  for (const auto& e : table.entries) {
    j["entries"].push_back({{"detector", e.detector},
                            {"mos_rule", e.mos_rule},
                            {"eta", round9(e.eta)},
                            {"trials_used", e.trials_used},
                            {"p_fa", round9(e.p_fa)}});
  }
  return j;
}

inline ThresholdTable parse_thresholds(const nlohmann::json& j) {
  ThresholdTable t;
  try {
    t.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& e : j.at("entries")) {
      t.entries.push_back({e.at("detector").get<std::string>(), e.at("mos_rule").get<std::string>(),
                           e.at("eta").get<double>(), e.at("trials_used").get<std::size_t>(),
                           e.at("p_fa").get<double>()});
    }
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError("thresholds", std::string("malformed thresholds file: ") + ex.what());
  }
  return t;
}

/// Reorders a loaded table to match `pipelines`; every pipeline must be present.
inline ThresholdTable align_thresholds(const ThresholdTable& loaded, const std::vector<Pipeline>& pipelines) {
  ThresholdTable out;
  out.seed = loaded.seed;
  for (const Pipeline& p : pipelines) {
    const ThresholdEntry* e = loaded.find(p.detector_label(), p.mos_label());
    if (!e) throw ConfigError("thresholds", "no threshold for " + p.label());
    out.entries.push_back(*e);
  }
  return out;
}

/// Writes `content` to `path`. An existing file is only replaced with `force`.
inline void write_output(const std::filesystem::path& path, const std::string& content, bool force) {
  if (std::filesystem::exists(path) && !force)
    throw ConfigError("out", "refusing to overwrite existing '" + path.string() + "' (use --force)");
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("out", "cannot write '" + path.string() + "'");
  out << content;
}

}  // namespace multispot
