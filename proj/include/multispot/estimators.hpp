#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <vector>

#include "multispot/linalg.hpp"
#include "multispot/types.hpp"

namespace multispot {

/// v^H M^{-1} v, rejecting non-positive values that only arise from numerical
/// corruption of a supposedly positive-definite factor.
inline double steering_gain(const ComplexVec& v, const HermitianPD& m) {
  const double gain = m.quadratic_form(v);
  if (!(gain > 0.0) || !std::isfinite(gain))
    throw FactorizationError("v^H M^-1 v must be positive");
  return gain;
}

/// ML amplitude v^H M^{-1} z / v^H M^{-1} v.
inline Complex ml_amplitude(const ComplexVec& z, const ComplexVec& v, const HermitianPD& m) {
  require(z.size() == v.size(), "ml_amplitude: dimension mismatch");
  const double gain = steering_gain(v, m);
  return m.solve(v).dot(z) / gain;  // Eigen's dot conjugates the left operand
}

/// Whitened energy |v^H M^{-1} z|^2 / v^H M^{-1} v.
inline double whitened_energy(const ComplexVec& z, const ComplexVec& v, const HermitianPD& m) {
  require(z.size() == v.size(), "whitened_energy: dimension mismatch");
  const double gain = steering_gain(v, m);
  return std::norm(m.solve(v).dot(z)) / gain;
}

/// Per-bin quantities shared by every estimator, detector and MOS rule, computed
/// from one factorization of M: whitened data W = L^{-1} Z and u = L^{-1} v.
struct WindowStatistics {
  std::vector<double> energy;        // E_h
  std::vector<Complex> amplitude;    // ML amplitude per bin
  std::vector<double> total_energy;  // z_h^H M^{-1} z_h
  double steering_gain = 0.0;        // v^H M^{-1} v
  double log_det = 0.0;              // ln det M
  std::size_t dim = 0;

  std::size_t size() const { return energy.size(); }
};

inline WindowStatistics window_statistics(const WindowData& z, const ComplexVec& v, const HermitianPD& m) {
  require(z.dim() == m.dim() && static_cast<std::size_t>(v.size()) == m.dim(),
          "window_statistics: dimension mismatch");
  const ComplexVec u = m.whiten(v);
  const ComplexMat w = m.lower_factor().triangularView<Eigen::Lower>().solve(z.matrix());
  WindowStatistics stats;
  stats.steering_gain = u.squaredNorm();
  if (!(stats.steering_gain > 0.0) || !std::isfinite(stats.steering_gain))
    throw FactorizationError("v^H M^-1 v must be positive");
  stats.log_det = m.log_det();
  stats.dim = m.dim();
  const std::size_t k_p = z.size();
  stats.energy.resize(k_p);
  stats.amplitude.resize(k_p);
  stats.total_energy.resize(k_p);
  for (std::size_t h = 0; h < k_p; ++h) {
    const auto col = w.col(static_cast<Eigen::Index>(h));
    const Complex c = u.dot(col);
    stats.energy[h] = std::norm(c) / stats.steering_gain;
    stats.amplitude[h] = c / stats.steering_gain;
    stats.total_energy[h] = col.squaredNorm();
  }
  return stats;
}

enum class SupportMethod { BML, WEN, Exhaustive };

/// Estimated target support with ML amplitudes on the selected bins.
/// `indices` is ascending and `amplitudes[i]` belongs to `indices[i]`.
struct SupportEstimate {
  std::vector<BinIndex> indices;
  std::vector<Complex> amplitudes;
  SupportMethod method = SupportMethod::WEN;

  std::size_t size() const { return indices.size(); }
  bool empty() const { return indices.empty(); }
  bool contains(BinIndex h) const { return std::binary_search(indices.begin(), indices.end(), h); }
};

namespace detail {

/// Bins ordered by descending key, lowest index first on ties.
inline std::vector<BinIndex> descending_order(const std::vector<double>& key) {
  std::vector<BinIndex> order(key.size());
  std::iota(order.begin(), order.end(), BinIndex{0});
  std::stable_sort(order.begin(), order.end(), [&](BinIndex a, BinIndex b) { return key[a] > key[b]; });
  return order;
}

inline SupportEstimate make_support(std::vector<BinIndex> chosen, const std::vector<Complex>& amplitudes,
                                    SupportMethod method) {
  std::sort(chosen.begin(), chosen.end());
  SupportEstimate s;
  s.method = method;
  s.amplitudes.reserve(chosen.size());
  for (BinIndex h : chosen) {
    require(h < amplitudes.size(), "support index outside the window");
    s.amplitudes.push_back(amplitudes[h]);
  }
  s.indices = std::move(chosen);
  return s;
}

inline double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace detail

/// Posterior class probabilities r_{h0}, r_{h1} for every bin plus the class
/// priors. `log_odds[h] = ln(r_{h1} / r_{h0})` is kept alongside because the
/// probabilities saturate at 1 in double precision long before the odds do.
struct Responsibilities {
  std::vector<std::array<double, 2>> r;
  std::vector<double> log_odds;
  std::array<double, 2> priors{0.0, 0.0};

  std::size_t size() const { return r.size(); }

  /// Builds responsibilities from given target-class probabilities r_{h1}.
  static Responsibilities from_probabilities(const std::vector<double>& r1, std::array<double, 2> priors) {
    Responsibilities out;
    out.priors = priors;
    for (double p : r1) {
      require(p >= 0.0 && p <= 1.0, "responsibilities must lie in [0, 1]");
      out.r.push_back({1.0 - p, p});
      out.log_odds.push_back(std::log(p) - std::log1p(-p));
    }
    return out;
  }
};

/// Bayes-rule responsibilities with the ML amplitude plugged in, from
/// precomputed bin energies. With alpha_h replaced by its ML estimate the two
/// Gaussian exponents differ by exactly E_h, so
///   r_{h1} = pi_1 e^{E_h} / (pi_0 + pi_1 e^{E_h}),
/// evaluated as a logistic function of ln(pi_1/pi_0) + E_h.
inline Responsibilities bml_responsibilities(const std::vector<double>& energy, std::size_t k_t) {
  const std::size_t k_p = energy.size();
  if (k_t < 1 || k_t > k_p) throw ParameterError("bml_responsibilities: 1 <= K_T <= K_P required");
  Responsibilities out;
  const double pi1 = static_cast<double>(k_t) / static_cast<double>(k_p);
  const double pi0 = static_cast<double>(k_p - k_t) / static_cast<double>(k_p);
  out.priors = {pi0, pi1};
  // pi0 == 0 gives +inf log prior odds and r_{h1} = 1 for every bin.
  const double prior_log_odds = std::log(pi1) - std::log(pi0);
  out.r.reserve(k_p);
  out.log_odds.reserve(k_p);
  for (double e : energy) {
    const double x = prior_log_odds + e;
    out.log_odds.push_back(x);
    out.r.push_back({detail::logistic(-x), detail::logistic(x)});
  }
  return out;
}

inline Responsibilities bml_responsibilities(const WindowData& z, const ComplexVec& v, const HermitianPD& m,
                                             std::size_t k_t) {
  return bml_responsibilities(window_statistics(z, v, m).energy, k_t);
}

/// Discards bins whose most probable class is 0 and keeps at most K_T of the
/// rest, ranked by r_{h1} (via the log-odds). Fewer than K_T survivors are all
/// kept; the result may be empty.
inline SupportEstimate bml_support(const Responsibilities& resp, const std::vector<Complex>& amplitudes,
                                   std::size_t k_t) {
  require(amplitudes.size() == resp.size(), "bml_support: amplitude count must equal K_P");
  std::vector<BinIndex> candidates;
  for (BinIndex h = 0; h < resp.size(); ++h) {
    if (resp.r[h][1] > resp.r[h][0]) candidates.push_back(h);
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](BinIndex a, BinIndex b) { return resp.log_odds[a] > resp.log_odds[b]; });
  if (candidates.size() > k_t) candidates.resize(k_t);
  return detail::make_support(std::move(candidates), amplitudes, SupportMethod::BML);
}

/// The K_T bins with the largest whitened energy.
inline SupportEstimate wen_support(const WindowStatistics& stats, std::size_t k_t) {
  if (k_t < 1 || k_t > stats.size()) throw ParameterError("wen_support: 1 <= K_T <= K_P required");
  std::vector<BinIndex> order = detail::descending_order(stats.energy);
  order.resize(k_t);
  return detail::make_support(std::move(order), stats.amplitude, SupportMethod::WEN);
}

inline SupportEstimate wen_support(const WindowData& z, const ComplexVec& v, const HermitianPD& m,
                                   std::size_t k_t) {
  return wen_support(window_statistics(z, v, m), k_t);
}

/// Largest admissible number of subsets for the exhaustive search.
inline constexpr double kExhaustiveSubsetLimit = 1e6;

inline double binomial(std::size_t n, std::size_t k) {
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
}

/// Brute-force GLRT support: the size-K_T subset maximizing the sum of bin
/// energies, i.e. the likelihood ratio with ML amplitudes substituted. Ties go
/// to the lexicographically smallest subset. Intended as a test oracle only.
inline SupportEstimate exhaustive_glrt_support(const WindowStatistics& stats, std::size_t k_t) {
  const std::size_t k_p = stats.size();
  if (k_t < 1 || k_t > k_p) throw ParameterError("exhaustive_glrt_support: 1 <= K_T <= K_P required");
  if (binomial(k_p, k_t) > kExhaustiveSubsetLimit * (1.0 + 1e-9))
    throw ParameterError("exhaustive_glrt_support: more than 1e6 subsets, refusing");

  std::vector<BinIndex> current(k_t);
  std::iota(current.begin(), current.end(), BinIndex{0});
  std::vector<BinIndex> best = current;
  double best_score = -std::numeric_limits<double>::infinity();
  while (true) {
    double score = 0.0;
    for (BinIndex h : current) score += stats.energy[h];
    if (score > best_score) {
      best_score = score;
      best = current;
    }
    // Next combination in lexicographic order.
    std::size_t i = k_t;
    while (i > 0 && current[i - 1] == k_p - k_t + (i - 1)) --i;
    if (i == 0) break;
    ++current[i - 1];
    for (std::size_t j = i; j < k_t; ++j) current[j] = current[j - 1] + 1;
  }
  return detail::make_support(std::move(best), stats.amplitude, SupportMethod::Exhaustive);
}

inline SupportEstimate exhaustive_glrt_support(const WindowData& z, const ComplexVec& v, const HermitianPD& m,
                                               std::size_t k_t) {
  return exhaustive_glrt_support(window_statistics(z, v, m), k_t);
}

}  // namespace multispot
