#pragma once

#include "multispot/linalg.hpp"
#include "multispot/types.hpp"

namespace multispot {

namespace detail {

/// (1/K_S) R R^H without any rank check. The lower triangle is accumulated and
/// mirrored, so the result is exactly Hermitian.
inline ComplexMat outer_product_average(const ComplexMat& r) {
  const Eigen::Index n = r.rows();
  ComplexMat s = ComplexMat::Zero(n, n);
  s.selfadjointView<Eigen::Lower>().rankUpdate(r, 1.0 / static_cast<double>(r.cols()));
  for (Eigen::Index i = 0; i < n; ++i) {
    s(i, i) = Complex(s(i, i).real(), 0.0);
    for (Eigen::Index j = 0; j < i; ++j) s(j, i) = std::conj(s(i, j));
  }
  return s;
}

}  // namespace detail

/// Sample covariance (1/K_S) R R^H of the training data. Needs K_S >= N,
/// otherwise the estimate is singular; no diagonal loading is applied.
inline HermitianPD sample_covariance(const TrainingData& r) {
  if (r.size() < r.dim()) throw ParameterError("sample_covariance: K_S >= N required");
  return HermitianPD(detail::outer_product_average(r.matrix()));
}

}  // namespace multispot
