#pragma once

// Independent reference computations for the unit and acceptance tests. None
// of these go through the Cholesky path used by the library.

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/LU>

#include "multispot/types.hpp"

namespace oracle {

using multispot::Complex;
using multispot::ComplexMat;
using multispot::ComplexVec;

/// Explicit inverse via full-pivot LU.
inline ComplexMat inverse(const ComplexMat& m) { return m.fullPivLu().inverse(); }

/// ln of the complex normal density CN(mean, M) at z, written out directly
/// with the explicit inverse and LU determinant.
inline double log_pdf(const ComplexVec& z, const ComplexVec& mean, const ComplexMat& m) {
  const ComplexVec d = z - mean;
  const double quad = (d.adjoint() * inverse(m) * d)(0, 0).real();
  const double log_det = std::log(std::abs(m.fullPivLu().determinant()));
  return -quad - static_cast<double>(z.size()) * std::log(std::numbers::pi) - log_det;
}

/// v^H M^-1 z with the explicit inverse.
inline Complex bilinear(const ComplexVec& v, const ComplexMat& m, const ComplexVec& z) {
  return (v.adjoint() * inverse(m) * z)(0, 0);
}

inline double energy(const ComplexVec& z, const ComplexVec& v, const ComplexMat& m) {
  return std::norm(bilinear(v, m, z)) / bilinear(v, m, v).real();
}

/// Best size-k subset by total score, enumerated over bitmasks. Ties keep the
/// lexicographically smallest index list.
inline std::vector<std::size_t> best_subset(const std::vector<double>& score, std::size_t k) {
  const std::size_t n = score.size();
  std::vector<std::size_t> best;
  double best_sum = -1e300;
  for (unsigned long mask = 0; mask < (1ul << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcountl(mask)) != k) continue;
    std::vector<std::size_t> idx;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1ul << i)) {
        idx.push_back(i);
        sum += score[i];
      }
    if (sum > best_sum || (sum == best_sum && idx < best)) {
      best_sum = sum;
      best = idx;
    }
  }
  return best;
}

template <class Engine>
ComplexMat random_complex(std::size_t rows, std::size_t cols, Engine& rng) {
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  ComplexMat a(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) a(i, j) = Complex(g(rng), g(rng));
  return a;
}

/// Random HPD matrix B B^H + 0.1 I (not exactly Hermitian before symmetrizing).
template <class Engine>
ComplexMat random_hpd(std::size_t n, Engine& rng) {
  const ComplexMat b = random_complex(n, n, rng);
  ComplexMat m = b * b.adjoint() + 0.1 * ComplexMat::Identity(b.rows(), b.cols());
  return 0.5 * (m + m.adjoint());
}

inline double frobenius_relative(const ComplexMat& a, const ComplexMat& b) { return (a - b).norm() / b.norm(); }

}  // namespace oracle
