#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "multispot/covariance.hpp"
#include "multispot/detectors.hpp"
#include "multispot/estimators.hpp"
#include "multispot/metrics.hpp"
#include "multispot/model.hpp"
#include "multispot/mos.hpp"
#include "multispot/parallel.hpp"
#include "multispot/rng.hpp"
#include "multispot/types.hpp"

namespace multispot {

enum class DetectorKind { BML, WEN, GAMF, GASD };

inline std::string to_string(DetectorKind d) {
  switch (d) {
    case DetectorKind::BML: return "BML";
    case DetectorKind::WEN: return "WEN";
    case DetectorKind::GAMF: return "GAMF";
    case DetectorKind::GASD: return "GASD";
  }
  return "?";
}

/// How the target count is obtained for a support-based detector.
enum class OrderKind { None, Known, Mos };

/// One detector + target-count strategy combination.
struct Pipeline {
  DetectorKind detector = DetectorKind::WEN;
  OrderKind order = OrderKind::Known;
  MosRule rule{};

  bool uses_support() const { return detector == DetectorKind::BML || detector == DetectorKind::WEN; }
  SupportMethod selector() const {
    return detector == DetectorKind::BML ? SupportMethod::BML : SupportMethod::WEN;
  }
  std::string detector_label() const { return to_string(detector); }
  std::string mos_label() const {
    switch (order) {
      case OrderKind::None: return "none";
      case OrderKind::Known: return "known";
      case OrderKind::Mos: return rule.label();
    }
    return "?";
  }
  std::string label() const { return detector_label() + "/" + mos_label(); }
};

enum class CovarianceMode { Known, Sample };

/// Everything a Monte Carlo run needs. `order_rules` applies to the BML and WEN
/// detectors only; GAMF and GASD always run over the full window.
struct ExperimentConfig {
  Scenario scenario;
  CovarianceMode covariance = CovarianceMode::Sample;
  std::vector<DetectorKind> detectors{DetectorKind::BML, DetectorKind::WEN, DetectorKind::GAMF, DetectorKind::GASD};
  bool known_order = true;
  std::vector<MosRule> mos_rules{MosRule::aic(), MosRule::gic(1.0), MosRule::bic()};
  std::size_t calibration_trials = 0;  // 0: ceil(100 / p_fa)
  std::size_t validation_trials = 0;   // 0: same as calibration
  std::size_t pd_trials = 1000;
  double data_scale = 1.0;
  std::size_t threads = 0;  // 0: MULTISPOT_THREADS or hardware

  std::size_t effective_calibration_trials() const {
    return calibration_trials > 0 ? calibration_trials : minimum_calibration_trials(scenario.p_fa);
  }
  std::size_t effective_validation_trials() const {
    return validation_trials > 0 ? validation_trials : effective_calibration_trials();
  }

  static std::size_t minimum_calibration_trials(double p_fa) {
    return static_cast<std::size_t>(std::ceil(100.0 / p_fa - 1e-9));
  }

  std::vector<Pipeline> pipelines() const {
    std::vector<Pipeline> out;
    for (DetectorKind d : detectors) {
      if (d == DetectorKind::BML || d == DetectorKind::WEN) {
        if (known_order) out.push_back({d, OrderKind::Known, {}});
        for (const MosRule& r : mos_rules) out.push_back({d, OrderKind::Mos, r});
      } else {
        out.push_back({d, OrderKind::None, {}});
      }
    }
    return out;
  }

  void validate() const {
    scenario.validate();
    if (covariance == CovarianceMode::Sample) require(scenario.k_s >= scenario.n(), "K_S >= N required");
    require(!detectors.empty(), "at least one detector required");
    require(data_scale != 0.0 && std::isfinite(data_scale), "data_scale must be finite and nonzero");
  }
};

/// Outcome of one pipeline on one trial.
struct PipelineOutcome {
  double statistic = 0.0;
  SupportEstimate support;  // empty for full-window detectors
  std::size_t k_hat = 0;    // 0 unless MOS ran
};

/// Precomputed objects shared by every trial of an experiment.
class Experiment {
 public:
  explicit Experiment(ExperimentConfig config)
      : config_(validated(std::move(config))),
        steering_(steering_vector(config_.scenario.n_a, config_.scenario.n_p, config_.scenario.theta,
                                  config_.scenario.doppler)),
        icm_(build_icm(config_.scenario.n(), config_.scenario.cnr_db, config_.scenario.rho_c)),
        pipelines_(config_.pipelines()) {}

  const ExperimentConfig& config() const { return config_; }
  const std::vector<Pipeline>& pipelines() const { return pipelines_; }
  const ComplexVec& steering() const { return steering_; }
  const HermitianPD& icm() const { return icm_; }
  std::size_t threads() const { return resolve_threads(config_.threads); }

  /// Draws one scene for (stream, trial) at the given SINR.
  Scene scene(Stream stream, std::uint64_t trial, Hypothesis hypothesis, double sinr_db) const {
    RandomEngine rng = trial_engine(config_.scenario.seed, stream, trial);
    Scene s = generate_scene(config_.scenario, hypothesis, sinr_db, steering_, icm_, rng);
    if (config_.data_scale != 1.0) {
      s.primary = WindowData(s.primary.matrix() * config_.data_scale);
      s.secondary = TrainingData(s.secondary.matrix() * config_.data_scale);
    }
    return s;
  }

  /// Runs every pipeline on one scene.
  std::vector<PipelineOutcome> evaluate(const Scene& s) const {
    const WindowStatistics stats = config_.covariance == CovarianceMode::Known
                                       ? window_statistics(s.primary, steering_, icm_)
                                       : window_statistics(s.primary, steering_, sample_covariance(s.secondary));
    std::optional<MosPath> paths[2];
    std::vector<PipelineOutcome> out;
    out.reserve(pipelines_.size());
    const std::size_t k_t = config_.scenario.k_t;
    for (const Pipeline& p : pipelines_) {
      PipelineOutcome o;
      switch (p.detector) {
        case DetectorKind::GAMF: o.statistic = gamf_full(stats).statistic; break;
        case DetectorKind::GASD: o.statistic = gasd_full(stats).statistic; break;
        case DetectorKind::BML:
        case DetectorKind::WEN: {
          if (p.order == OrderKind::Known) {
            o.support = p.detector == DetectorKind::WEN
                            ? wen_support(stats, k_t)
                            : bml_support(bml_responsibilities(stats.energy, k_t), stats.amplitude, k_t);
          } else {
            auto& path = paths[p.detector == DetectorKind::BML ? 0 : 1];
            if (!path) path = mos_path(stats, p.selector());
            MosResult r = estimate_kt(*path, p.rule);
            o.k_hat = r.k_hat;
            o.support = std::move(r.support);
          }
          o.statistic = gamf_on_support(stats, o.support).statistic;
          break;
        }
      }
      out.push_back(std::move(o));
    }
    return out;
  }

  /// H0 statistics, stats[pipeline][trial].
  std::vector<std::vector<double>> null_statistics(Stream stream, std::size_t trials) const {
    std::vector<std::vector<double>> per_trial(trials);
    parallel_for(trials, threads(), [&](std::size_t t) {
      const auto outcomes = evaluate(scene(stream, t, Hypothesis::H0, -std::numeric_limits<double>::infinity()));
      per_trial[t].reserve(outcomes.size());
      for (const auto& o : outcomes) per_trial[t].push_back(o.statistic);
    });
    std::vector<std::vector<double>> out(pipelines_.size(), std::vector<double>(trials));
    for (std::size_t t = 0; t < trials; ++t)
      for (std::size_t p = 0; p < pipelines_.size(); ++p) out[p][t] = per_trial[t][p];
    return out;
  }

 private:
  static ExperimentConfig validated(ExperimentConfig c) {
    c.validate();
    return c;
  }

  ExperimentConfig config_;
  ComplexVec steering_;
  HermitianPD icm_;
  std::vector<Pipeline> pipelines_;
};

/// The ceil((1 - p_fa) * T)-th order statistic of T samples.
inline double threshold_quantile(std::vector<double> samples, double p_fa) {
  require(!samples.empty(), "threshold_quantile: no samples");
  require(p_fa > 0.0 && p_fa < 1.0, "threshold_quantile: p_fa must lie in (0, 1)");
  const double t = static_cast<double>(samples.size());
  auto rank = static_cast<std::size_t>(std::ceil((1.0 - p_fa) * t - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, samples.size());
  std::nth_element(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(rank - 1), samples.end());
  return samples[rank - 1];
}

struct ThresholdEntry {
  std::string detector;
  std::string mos_rule;
  double eta = 0.0;
  std::size_t trials_used = 0;
  double p_fa = 0.0;
};

struct ThresholdTable {
  std::vector<ThresholdEntry> entries;  // one per pipeline, in pipeline order
  std::uint64_t seed = 0;

  const ThresholdEntry* find(const std::string& detector, const std::string& mos_rule) const {
    for (const auto& e : entries)
      if (e.detector == detector && e.mos_rule == mos_rule) return &e;
    return nullptr;
  }
};

/// Calibrates every pipeline's threshold from fresh H0 trials.
inline ThresholdTable calibrate_thresholds(const Experiment& exp) {
  const std::size_t trials = exp.config().effective_calibration_trials();
  const double p_fa = exp.config().scenario.p_fa;
  const auto stats = exp.null_statistics(Stream::Calibration, trials);
  ThresholdTable table;
  table.seed = exp.config().scenario.seed;
  for (std::size_t p = 0; p < exp.pipelines().size(); ++p) {
    const Pipeline& pl = exp.pipelines()[p];
    table.entries.push_back({pl.detector_label(), pl.mos_label(), threshold_quantile(stats[p], p_fa), trials, p_fa});
  }
  return table;
}

struct FalseAlarmRate {
  std::string detector;
  std::string mos_rule;
  std::size_t exceedances = 0;
  std::size_t trials = 0;
  double rate() const { return trials ? static_cast<double>(exceedances) / static_cast<double>(trials) : 0.0; }
};

/// Measured false-alarm rate at calibrated thresholds on an independent H0 stream.
inline std::vector<FalseAlarmRate> measure_false_alarm(const Experiment& exp, const ThresholdTable& table,
                                                       std::size_t trials = 0) {
  if (trials == 0) trials = exp.config().effective_validation_trials();
  require(table.entries.size() == exp.pipelines().size(), "threshold table does not match the pipelines");
  const auto stats = exp.null_statistics(Stream::Validation, trials);
  std::vector<FalseAlarmRate> out;
  for (std::size_t p = 0; p < exp.pipelines().size(); ++p) {
    FalseAlarmRate r{table.entries[p].detector, table.entries[p].mos_rule, 0, trials};
    for (double s : stats[p]) r.exceedances += s > table.entries[p].eta ? 1 : 0;
    out.push_back(r);
  }
  return out;
}

/// Aggregates for one pipeline at one SINR.
struct PipelinePoint {
  std::size_t trials = 0;
  std::size_t detections = 0;  // only meaningful with thresholds
  double sum_missed_sq = 0.0;
  double sum_ghosts_sq = 0.0;
  double sum_hausdorff_sq = 0.0;
  std::size_t hausdorff_trials = 0;  // trials with a finite distance
  std::size_t empty_supports = 0;
  std::map<std::size_t, std::size_t> k_counts;

  double pd() const { return trials ? static_cast<double>(detections) / static_cast<double>(trials) : 0.0; }
  double rms_missed() const { return trials ? std::sqrt(sum_missed_sq / static_cast<double>(trials)) : 0.0; }
  double rms_ghosts() const { return trials ? std::sqrt(sum_ghosts_sq / static_cast<double>(trials)) : 0.0; }
  /// NaN when every trial produced the infinite sentinel.
  double rms_hausdorff() const {
    return hausdorff_trials ? std::sqrt(sum_hausdorff_sq / static_cast<double>(hausdorff_trials))
                            : std::numeric_limits<double>::quiet_NaN();
  }
  double empty_rate() const {
    return trials ? static_cast<double>(empty_supports) / static_cast<double>(trials) : 0.0;
  }
};

struct SinrPoint {
  double sinr_db = 0.0;
  std::vector<PipelinePoint> pipelines;  // in pipeline order
};

/// Per-SINR detection and estimation-quality results.
struct MetricsReport {
  std::vector<Pipeline> pipelines;
  std::vector<SinrPoint> points;
  bool has_thresholds = false;

  std::size_t index_of(const std::string& detector, const std::string& mos_rule) const {
    for (std::size_t p = 0; p < pipelines.size(); ++p)
      if (pipelines[p].detector_label() == detector && pipelines[p].mos_label() == mos_rule) return p;
    throw ParameterError("pipeline not in report: " + detector + "/" + mos_rule);
  }
};

/// H1 Monte Carlo over the SINR grid. Trial t uses the same random stream at
/// every SINR, so only the target power changes along the curve. With a
/// threshold table, detection counts are filled in as well.
inline MetricsReport run_h1(const Experiment& exp, const ThresholdTable* thresholds = nullptr) {
  const auto& cfg = exp.config();
  const std::size_t n_pipe = exp.pipelines().size();
  if (thresholds) require(thresholds->entries.size() == n_pipe, "threshold table does not match the pipelines");
  MetricsReport report;
  report.pipelines = exp.pipelines();
  report.has_thresholds = thresholds != nullptr;

  struct TrialRecord {
    double statistic;
    std::size_t missed;
    std::size_t ghosts;
    double hausdorff;
    bool empty;
    std::size_t k_hat;
  };
  const std::size_t trials = cfg.pd_trials;
  for (double sinr : cfg.scenario.sinr_db) {
    std::vector<std::vector<TrialRecord>> records(trials);
    parallel_for(trials, exp.threads(), [&](std::size_t t) {
      const Scene s = exp.scene(Stream::Detection, t, Hypothesis::H1, sinr);
      const auto outcomes = exp.evaluate(s);
      records[t].reserve(n_pipe);
      for (std::size_t p = 0; p < n_pipe; ++p) {
        const auto& o = outcomes[p];
        TrialRecord r{o.statistic, 0, 0, 0.0, o.support.empty(), o.k_hat};
        if (exp.pipelines()[p].uses_support()) {
          const auto counts = estimation_metrics(s.truth, o.support);
          r.missed = counts.missed;
          r.ghosts = counts.ghosts;
          r.hausdorff = hausdorff(s.truth.alpha, amplitude_vector(o.support, cfg.scenario.k_p));
        }
        records[t].push_back(r);
      }
    });
    SinrPoint point;
    point.sinr_db = sinr;
    point.pipelines.resize(n_pipe);
    for (std::size_t t = 0; t < trials; ++t) {
      for (std::size_t p = 0; p < n_pipe; ++p) {
        const TrialRecord& r = records[t][p];
        PipelinePoint& agg = point.pipelines[p];
        ++agg.trials;
        if (thresholds && r.statistic > thresholds->entries[p].eta) ++agg.detections;
        agg.sum_missed_sq += static_cast<double>(r.missed * r.missed);
        agg.sum_ghosts_sq += static_cast<double>(r.ghosts * r.ghosts);
        if (std::isfinite(r.hausdorff)) {
          agg.sum_hausdorff_sq += r.hausdorff * r.hausdorff;
          ++agg.hausdorff_trials;
        }
        if (exp.pipelines()[p].uses_support() && r.empty) ++agg.empty_supports;
        if (r.k_hat > 0) ++agg.k_counts[r.k_hat];
      }
    }
    report.points.push_back(std::move(point));
  }
  return report;
}

/// SINR at which a P_d curve first reaches `target`, by linear interpolation
/// between grid points. Empty if the curve never reaches it.
inline std::optional<double> sinr_at_pd(const std::vector<double>& sinr_db, const std::vector<double>& pd,
                                        double target) {
  require(sinr_db.size() == pd.size(), "sinr_at_pd: size mismatch");
  for (std::size_t i = 0; i < pd.size(); ++i) {
    if (pd[i] >= target) {
      if (i == 0) return sinr_db[0];
      const double f = (target - pd[i - 1]) / (pd[i] - pd[i - 1]);
      return sinr_db[i - 1] + f * (sinr_db[i] - sinr_db[i - 1]);
    }
  }
  return std::nullopt;
}

/// Random Hermitian positive-definite matrix A A^H / n + I.
template <class Engine>
HermitianPD random_hpd(std::size_t n, Engine& rng) {
  ComplexMat a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index j = 0; j < a.cols(); ++j) a.col(j) = standard_complex_normal(n, rng);
  ComplexMat m = a * a.adjoint() / static_cast<double>(n) + ComplexMat::Identity(a.rows(), a.cols());
  ComplexMat h = 0.5 * (m + m.adjoint());
  return HermitianPD(std::move(h));
}

struct OracleCheckReport {
  std::size_t instances = 0;
  std::size_t agreements = 0;
  std::vector<std::string> mismatches;
  bool passed() const { return instances > 0 && agreements == instances; }
};

/// Compares wen_support against the exhaustive GLRT support on random
/// known-covariance instances with K_P <= 10 and K_T <= 4.
inline OracleCheckReport run_oracle_check(std::uint64_t seed, std::size_t instances) {
  OracleCheckReport report;
  for (std::size_t i = 0; i < instances; ++i) {
    RandomEngine rng = trial_engine(seed, Stream::Oracle, i);
    std::uniform_int_distribution<std::size_t> dim_dist(1, 6), kp_dist(2, 10);
    const std::size_t n = dim_dist(rng);
    const std::size_t k_p = kp_dist(rng);
    std::uniform_int_distribution<std::size_t> kt_dist(1, std::min<std::size_t>(4, k_p));
    const std::size_t k_t = kt_dist(rng);
    const HermitianPD m = random_hpd(n, rng);
    const ComplexVec v = standard_complex_normal(n, rng);
    ComplexMat z(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k_p));
    std::bernoulli_distribution has_target(0.4);
    std::normal_distribution<double> amp(0.0, 2.0);
    for (Eigen::Index h = 0; h < z.cols(); ++h) {
      z.col(h) = m.color(standard_complex_normal(n, rng));
      if (has_target(rng)) z.col(h) += Complex(amp(rng), amp(rng)) * v;
    }
    const WindowStatistics stats = window_statistics(WindowData(std::move(z)), v, m);
    const SupportEstimate wen = wen_support(stats, k_t);
    const SupportEstimate brute = exhaustive_glrt_support(stats, k_t);
    ++report.instances;
    if (wen.indices == brute.indices) {
      ++report.agreements;
    } else {
      report.mismatches.push_back("instance " + std::to_string(i) + " (K_P=" + std::to_string(k_p) +
                                  ", K_T=" + std::to_string(k_t) + ")");
    }
  }
  return report;
}

}  // namespace multispot
