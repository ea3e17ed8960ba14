#pragma once

#include <cmath>
#include <optional>

#include "multispot/estimators.hpp"
#include "multispot/linalg.hpp"
#include "multispot/types.hpp"

namespace multispot {

/// A detection statistic in the log domain. `support` is empty for the
/// full-window detectors.
struct DetectorOutput {
  double statistic = 0.0;
  std::optional<SupportEstimate> support;
  std::optional<bool> decision;

  bool full_window() const { return !support.has_value(); }
};

/// Strict comparison against the threshold.
inline bool decide(const DetectorOutput& out, double eta) {
  require(std::isfinite(eta), "decide: threshold must be finite");
  return out.statistic > eta;
}

inline DetectorOutput with_decision(DetectorOutput out, double eta) {
  out.decision = decide(out, eta);
  return out;
}

/// GAMF restricted to a support: sum of whitened energies over the selected
/// bins. For a BML support this is the log of the plug-in likelihood ratio,
/// for a WEN support it is the whitened-energy detector itself.
inline DetectorOutput gamf_on_support(const WindowStatistics& stats, const SupportEstimate& support) {
  double sum = 0.0;
  for (BinIndex h : support.indices) {
    require(h < stats.size(), "gamf_on_support: support index outside the window");
    sum += stats.energy[h];
  }
  return DetectorOutput{sum, support, std::nullopt};
}

inline DetectorOutput gamf_on_support(const WindowData& z, const SupportEstimate& support, const ComplexVec& v,
                                      const HermitianPD& m) {
  return gamf_on_support(window_statistics(z, v, m), support);
}

/// GAMF over the whole window.
inline DetectorOutput gamf_full(const WindowStatistics& stats) {
  double sum = 0.0;
  for (double e : stats.energy) sum += e;
  return DetectorOutput{sum, std::nullopt, std::nullopt};
}

inline DetectorOutput gamf_full(const WindowData& z, const ComplexVec& v, const HermitianPD& m) {
  return gamf_full(window_statistics(z, v, m));
}

/// GASD over the whole window: sum of per-bin adaptive coherence terms
/// |v^H M^-1 z|^2 / ((v^H M^-1 v)(z^H M^-1 z)), each in [0, 1].
inline DetectorOutput gasd_full(const WindowStatistics& stats) {
  double sum = 0.0;
  for (std::size_t h = 0; h < stats.size(); ++h) {
    if (!(stats.total_energy[h] > 0.0)) throw DegenerateInputError("gasd_full: zero column in the window");
    sum += stats.energy[h] / stats.total_energy[h];
  }
  return DetectorOutput{sum, std::nullopt, std::nullopt};
}

inline DetectorOutput gasd_full(const WindowData& z, const ComplexVec& v, const HermitianPD& m) {
  return gasd_full(window_statistics(z, v, m));
}

}  // namespace multispot
