#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "multispot/estimators.hpp"
#include "multispot/linalg.hpp"
#include "multispot/types.hpp"

namespace multispot {

/// Penalty rule for model order selection. The penalty is 3 k nu: three real
/// unknowns per target (complex amplitude and position).
struct MosRule {
  enum class Kind { AIC, GIC, BIC };

  Kind kind = Kind::AIC;
  double rho = 0.0;  // GIC only

  static MosRule aic() { return {Kind::AIC, 0.0}; }
  static MosRule bic() { return {Kind::BIC, 0.0}; }
  static MosRule gic(double rho) {
    require(rho >= 1.0, "GIC requires rho >= 1");
    return {Kind::GIC, rho};
  }

  /// Penalty factor nu. BIC uses the natural logarithm of K_P.
  double factor(std::size_t k_p) const {
    switch (kind) {
      case Kind::AIC: return 2.0;
      case Kind::GIC: return 1.0 + rho;
      case Kind::BIC: return std::log(static_cast<double>(k_p));
    }
    return 0.0;
  }

  std::string label() const {
    switch (kind) {
      case Kind::AIC: return "AIC";
      case Kind::BIC: return "BIC";
      case Kind::GIC: {
        char buf[32];
        std::snprintf(buf, sizeof buf, "GIC_rho%g", rho);
        return buf;
      }
    }
    return "?";
  }

  bool operator==(const MosRule&) const = default;
};

inline double penalty(std::size_t k, const MosRule& rule, std::size_t k_p) {
  require(k >= 1, "penalty: k >= 1 required");
  return 3.0 * static_cast<double>(k) * rule.factor(k_p);
}

/// -2 ln f_1 with the energies of `support` removed from the quadratic term:
///   2 [K_P N ln(pi) + K_P ln det M + sum_h z_h^H M^-1 z_h - sum_{h in support} E_h].
inline double neg2_loglik(const WindowStatistics& stats, const SupportEstimate& support) {
  const double k_p = static_cast<double>(stats.size());
  double quad = 0.0;
  for (double q : stats.total_energy) quad += q;
  double explained = 0.0;
  for (BinIndex h : support.indices) {
    require(h < stats.size(), "neg2_loglik: support index outside the window");
    explained += stats.energy[h];
  }
  return 2.0 * (k_p * static_cast<double>(stats.dim) * std::log(std::numbers::pi) + k_p * stats.log_det + quad -
                explained);
}

inline double neg2_loglik(const WindowData& z, const ComplexVec& v, const HermitianPD& m,
                          const SupportEstimate& support) {
  return neg2_loglik(window_statistics(z, v, m), support);
}

/// Candidate supports for k = 1..K_P from one selector, with the
/// k-dependent part of the data term, -2 sum_{h in support(k)} E_h.
struct MosPath {
  std::vector<SupportEstimate> supports;  // supports[k-1]
  std::vector<double> reduced_data;       // reduced_data[k-1]
  double constant = 0.0;                  // neg2_loglik(empty support)
  std::size_t k_p = 0;
};

inline MosPath mos_path(const WindowStatistics& stats, SupportMethod selector) {
  require(selector != SupportMethod::Exhaustive, "MOS selector must be BML or WEN");
  MosPath path;
  path.k_p = stats.size();
  require(path.k_p >= 1, "MOS needs K_P >= 1");
  path.constant = neg2_loglik(stats, SupportEstimate{});
  path.supports.reserve(path.k_p);
  path.reduced_data.reserve(path.k_p);
  for (std::size_t k = 1; k <= path.k_p; ++k) {
    SupportEstimate s = selector == SupportMethod::WEN
                            ? wen_support(stats, k)
                            : bml_support(bml_responsibilities(stats.energy, k), stats.amplitude, k);
    double explained = 0.0;
    for (BinIndex h : s.indices) explained += stats.energy[h];
    path.reduced_data.push_back(-2.0 * explained);
    path.supports.push_back(std::move(s));
  }
  return path;
}

struct MosResult {
  std::size_t k_hat = 1;
  SupportEstimate support;
  std::vector<double> objective;  // objective[k-1], full criterion
};

/// argmin over k of -2 ln f_1(k) + p(k), lowest k on ties. The argmin is taken
/// on the reduced form; the reported objective adds back the k-independent
/// constant.
inline MosResult estimate_kt(const MosPath& path, const MosRule& rule) {
  MosResult out;
  out.objective.reserve(path.k_p);
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_k = 1;
  for (std::size_t k = 1; k <= path.k_p; ++k) {
    const double reduced = path.reduced_data[k - 1] + penalty(k, rule, path.k_p);
    if (reduced < best) {
      best = reduced;
      best_k = k;
    }
    out.objective.push_back(path.constant + reduced);
  }
  out.k_hat = best_k;
  out.support = path.supports[best_k - 1];
  return out;
}

inline MosResult estimate_kt(const WindowStatistics& stats, const MosRule& rule, SupportMethod selector) {
  return estimate_kt(mos_path(stats, selector), rule);
}

inline MosResult estimate_kt(const WindowData& z, const ComplexVec& v, const HermitianPD& m, const MosRule& rule,
                             SupportMethod selector) {
  return estimate_kt(window_statistics(z, v, m), rule, selector);
}

}  // namespace multispot
