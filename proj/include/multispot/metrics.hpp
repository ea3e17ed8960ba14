#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include "multispot/estimators.hpp"
#include "multispot/types.hpp"

namespace multispot {

/// Hausdorff distance between the point sets {(h, Re a_h, Im a_h) : a_h != 0}
/// of two amplitude vectors, Euclidean metric in R^3. Two empty sets are at
/// distance 0; exactly one empty set yields +infinity.
inline double hausdorff(const std::vector<Complex>& alpha, const std::vector<Complex>& alpha_hat) {
  require(alpha.size() == alpha_hat.size(), "hausdorff: vectors must have the same length");
  using Point = std::array<double, 3>;
  auto points = [](const std::vector<Complex>& a) {
    std::vector<Point> out;
    for (std::size_t h = 0; h < a.size(); ++h) {
      if (a[h] != Complex(0.0, 0.0)) out.push_back({static_cast<double>(h), a[h].real(), a[h].imag()});
    }
    return out;
  };
  const std::vector<Point> a = points(alpha);
  const std::vector<Point> b = points(alpha_hat);
  if (a.empty() && b.empty()) return 0.0;
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();

  auto dist = [](const Point& p, const Point& q) {
    return std::hypot(p[0] - q[0], p[1] - q[1], p[2] - q[2]);
  };
  auto directed = [&](const std::vector<Point>& from, const std::vector<Point>& to) {
    double worst = 0.0;
    for (const Point& p : from) {
      double nearest = std::numeric_limits<double>::infinity();
      for (const Point& q : to) nearest = std::min(nearest, dist(p, q));
      worst = std::max(worst, nearest);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

/// Expands a support estimate into a K_P-long amplitude vector, zero off-support.
inline std::vector<Complex> amplitude_vector(const SupportEstimate& est, std::size_t k_p) {
  std::vector<Complex> out(k_p, Complex(0.0, 0.0));
  for (std::size_t i = 0; i < est.size(); ++i) {
    require(est.indices[i] < k_p, "support index outside the window");
    out[est.indices[i]] = est.amplitudes[i];
  }
  return out;
}

struct EstimationCounts {
  std::size_t missed = 0;
  std::size_t ghosts = 0;
};

/// Missed targets are true positions absent from the estimate, ghosts are
/// estimated positions with no true target.
inline EstimationCounts estimation_metrics(const GroundTruth& truth, const SupportEstimate& est) {
  std::vector<BinIndex> t = truth.target_positions;
  std::sort(t.begin(), t.end());
  EstimationCounts c;
  for (BinIndex h : t) c.missed += est.contains(h) ? 0 : 1;
  for (BinIndex h : est.indices) c.ghosts += std::binary_search(t.begin(), t.end(), h) ? 0 : 1;
  return c;
}

/// Occurrence counts of each estimated target count.
inline std::map<std::size_t, std::size_t> kt_counts(const std::vector<std::size_t>& k_hats) {
  std::map<std::size_t, std::size_t> counts;
  for (std::size_t k : k_hats) ++counts[k];
  return counts;
}

inline std::map<std::size_t, double> counts_to_probabilities(const std::map<std::size_t, std::size_t>& counts) {
  std::size_t total = 0;
  for (const auto& [k, c] : counts) total += c;
  require(total > 0, "kt_histogram: at least one trial required");
  std::map<std::size_t, double> out;
  for (const auto& [k, c] : counts) out[k] = static_cast<double>(c) / static_cast<double>(total);
  return out;
}

/// Empirical distribution of estimated target counts.
inline std::map<std::size_t, double> kt_histogram(const std::vector<std::size_t>& k_hats) {
  require(!k_hats.empty(), "kt_histogram: at least one trial required");
  return counts_to_probabilities(kt_counts(k_hats));
}

}  // namespace multispot
