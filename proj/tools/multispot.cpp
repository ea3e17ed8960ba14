// multispot: Monte Carlo driver for multi-target adaptive detection.
//
//   multispot calibrate  --preset paper --out results/
//   multispot pd-curve   --config paper.json --out results/
//   multispot mos-eval   --preset desk --out results/
//   multispot oracle-check --instances 500
//   multispot demo --preset desk --sinr 12

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "multispot/multispot.hpp"

namespace fs = std::filesystem;
using namespace multispot;

namespace {

struct CommonOptions {
  std::string config;
  std::string preset;
  std::string out = "results";
  bool force = false;
  std::size_t threads = 0;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool with_out = true) {
  cmd->add_option("--config", o.config, "JSON configuration file");
  cmd->add_option("--preset", o.preset, "Base preset: paper or desk")->check(CLI::IsMember({"paper", "desk"}));
  if (with_out) {
    cmd->add_option("--out", o.out, "Output directory");
    cmd->add_flag("--force", o.force, "Overwrite existing output files");
  }
  cmd->add_option("--threads", o.threads, "Worker threads (default: MULTISPOT_THREADS or all cores)");
  cmd->add_option("--seed", o.seed, "Override the configured seed");
}

ExperimentConfig resolve(const CommonOptions& o) {
  ExperimentConfig base = o.preset.empty() ? paper_preset() : preset(o.preset);
  ExperimentConfig c = o.config.empty() ? base : load_config(o.config, base);
  if (o.seed) c.scenario.seed = *o.seed;
  if (o.threads) c.threads = o.threads;
  c.validate();
  return c;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void print_thresholds(const ThresholdTable& t) {
  std::printf("%-6s %-12s %14s %10s\n", "det", "mos_rule", "eta", "trials");
  for (const auto& e : t.entries)
    std::printf("%-6s %-12s %14s %10zu\n", e.detector.c_str(), e.mos_rule.c_str(), format_float(e.eta).c_str(),
                e.trials_used);
}

int run_calibrate(const CommonOptions& o, bool validate) {
  const Experiment exp(resolve(o));
  const fs::path out = fs::path(o.out) / "thresholds.json";
  if (fs::exists(out) && !o.force) throw ConfigError("out", "refusing to overwrite existing '" + out.string() + "' (use --force)");
  Stopwatch sw;
  const ThresholdTable table = calibrate_thresholds(exp);
  write_output(out, thresholds_json(table).dump(2) + "\n", o.force);
  print_thresholds(table);
  std::printf("calibrated %zu pipelines over %zu H0 trials in %.1f s -> %s\n", table.entries.size(),
              exp.config().effective_calibration_trials(), sw.seconds(), out.string().c_str());
  if (validate) {
    const auto rates = measure_false_alarm(exp, table);
    std::printf("\nfresh-H0 false-alarm check (target %s):\n", format_float(exp.config().scenario.p_fa).c_str());
    for (const auto& r : rates)
      std::printf("%-6s %-12s %8zu / %zu = %s\n", r.detector.c_str(), r.mos_rule.c_str(), r.exceedances, r.trials,
                  format_float(r.rate()).c_str());
  }
  return 0;
}

int run_pd_curve(const CommonOptions& o, const std::string& thresholds_path) {
  const Experiment exp(resolve(o));
  const fs::path pd_path = fs::path(o.out) / "pd_curve.csv";
  const fs::path eta_path = fs::path(o.out) / "thresholds.json";
  for (const auto& p : {pd_path, eta_path}) {
    if (p == eta_path && !thresholds_path.empty()) continue;
    if (fs::exists(p) && !o.force) throw ConfigError("out", "refusing to overwrite existing '" + p.string() + "' (use --force)");
  }
  Stopwatch sw;
  ThresholdTable table;
  if (thresholds_path.empty()) {
    table = calibrate_thresholds(exp);
    write_output(eta_path, thresholds_json(table).dump(2) + "\n", o.force);
  } else {
    std::ifstream in(thresholds_path);
    if (!in) throw ConfigError("thresholds", "cannot open '" + thresholds_path + "'");
    nlohmann::json j;
    in >> j;
    table = align_thresholds(parse_thresholds(j), exp.pipelines());
  }
  const MetricsReport report = run_h1(exp, &table);
  write_output(pd_path, pd_curve_csv(report, table), o.force);
  std::printf("P_d curves for %zu pipelines x %zu SINR points in %.1f s -> %s\n", exp.pipelines().size(),
              report.points.size(), sw.seconds(), pd_path.string().c_str());
  return 0;
}

int run_mos_eval(const CommonOptions& o) {
  const Experiment exp(resolve(o));
  const fs::path metrics_path = fs::path(o.out) / "metrics.csv";
  const fs::path hist_path = fs::path(o.out) / "kt_hist.csv";
  for (const auto& p : {metrics_path, hist_path})
    if (fs::exists(p) && !o.force) throw ConfigError("out", "refusing to overwrite existing '" + p.string() + "' (use --force)");
  Stopwatch sw;
  const MetricsReport report = run_h1(exp);
  write_output(metrics_path, metrics_csv(report), o.force);
  write_output(hist_path, kt_hist_csv(report, exp.config().scenario.k_p), o.force);
  std::printf("estimation metrics over %zu SINR points in %.1f s -> %s, %s\n", report.points.size(), sw.seconds(),
              metrics_path.string().c_str(), hist_path.string().c_str());
  return 0;
}

int run_oracle(std::uint64_t seed, std::size_t instances) {
  const OracleCheckReport r = run_oracle_check(seed, instances);
  for (const auto& m : r.mismatches) std::printf("mismatch: %s\n", m.c_str());
  std::printf("oracle-check: %zu/%zu instances with identical WEN and exhaustive GLRT supports\n", r.agreements,
              r.instances);
  return r.passed() ? 0 : 1;
}

std::string one_based(const std::vector<BinIndex>& v) {
  std::string s = "{";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + std::to_string(v[i] + 1);
  return s + "}";
}

int run_demo(const CommonOptions& o, std::optional<double> sinr) {
  const Experiment exp(resolve(o));
  const auto& cfg = exp.config();
  const double snr = sinr.value_or(cfg.scenario.sinr_db.back());
  const Scene scene = exp.scene(Stream::Demo, 0, Hypothesis::H1, snr);
  const HermitianPD m = cfg.covariance == CovarianceMode::Known ? exp.icm() : sample_covariance(scene.secondary);
  const WindowStatistics stats = window_statistics(scene.primary, exp.steering(), m);

  std::printf("scene: N=%zu K_P=%zu K_S=%zu K_T=%zu SINR=%s dB, covariance=%s\n", cfg.scenario.n(),
              cfg.scenario.k_p, cfg.scenario.k_s, cfg.scenario.k_t, format_float(snr).c_str(),
              cfg.covariance == CovarianceMode::Known ? "known" : "sample");
  std::printf("true targets: %s\n\n", one_based(scene.truth.target_positions).c_str());
  std::printf("%4s %14s %14s\n", "bin", "energy", "r_h1");
  const Responsibilities resp = bml_responsibilities(stats.energy, cfg.scenario.k_t);
  for (std::size_t h = 0; h < stats.size(); ++h)
    std::printf("%4zu %14s %14s\n", h + 1, format_float(stats.energy[h]).c_str(), format_float(resp.r[h][1]).c_str());

  std::printf("\n%-6s %-12s %6s %14s  support\n", "det", "mos_rule", "k_hat", "statistic");
  const auto outcomes = exp.evaluate(scene);
  for (std::size_t p = 0; p < outcomes.size(); ++p) {
    const Pipeline& pl = exp.pipelines()[p];
    const auto& oc = outcomes[p];
    std::printf("%-6s %-12s %6s %14s  %s\n", pl.detector_label().c_str(), pl.mos_label().c_str(),
                oc.k_hat ? std::to_string(oc.k_hat).c_str() : "-", format_float(oc.statistic).c_str(),
                pl.uses_support() ? one_based(oc.support.indices).c_str() : "full window");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multispot: adaptive detection of multiple point-like targets"};
  app.require_subcommand(1);

  CommonOptions calib_opts, pd_opts, mos_opts, demo_opts;
  bool validate = false;
  auto* calibrate = app.add_subcommand("calibrate", "Calibrate CFAR thresholds from H0 trials");
  add_common(calibrate, calib_opts);
  calibrate->add_flag("--validate", validate, "Also measure P_fa on a fresh H0 run");

  std::string thresholds_path;
  auto* pd = app.add_subcommand("pd-curve", "Estimate P_d versus SINR");
  add_common(pd, pd_opts);
  pd->add_option("--thresholds", thresholds_path, "Reuse a thresholds.json instead of calibrating");

  auto* mos = app.add_subcommand("mos-eval", "RMS missed/ghost counts, Hausdorff distance and K_T histograms");
  add_common(mos, mos_opts);

  std::uint64_t oracle_seed = 7;
  std::size_t instances = 200;
  auto* oracle = app.add_subcommand("oracle-check", "Compare WEN support against the exhaustive GLRT search");
  oracle->add_option("--seed", oracle_seed, "Seed for the random instances");
  oracle->add_option("--instances", instances, "Number of random instances")->check(CLI::PositiveNumber);

  std::optional<double> demo_sinr;
  auto* demo = app.add_subcommand("demo", "Run every pipeline on one H1 scene and print the result");
  add_common(demo, demo_opts, false);
  demo->add_option("--sinr", demo_sinr, "SINR in dB (default: top of the grid)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*calibrate) return run_calibrate(calib_opts, validate);
    if (*pd) return run_pd_curve(pd_opts, thresholds_path);
    if (*mos) return run_mos_eval(mos_opts);
    if (*oracle) return run_oracle(oracle_seed, instances);
    if (*demo) return run_demo(demo_opts, demo_sinr);
  } catch (const ConfigError& e) {
    std::cerr << "multispot: configuration error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "multispot: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "multispot: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
