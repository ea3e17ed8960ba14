#pragma once

#include <cmath>
#include <complex>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "multispot/error.hpp"
#include "multispot/types.hpp"

namespace multispot {

/// Hermitian positive-definite matrix together with its Cholesky factor.
///
/// Positive definiteness is verified at construction: the lower factor L with
/// L L^H = M must exist and every pivot must be strictly positive. All
/// quadratic forms below go through that single factorization; the inverse is
/// never formed.
class HermitianPD {
 public:
  /// Relative tolerance for the Hermitian-symmetry check.
  static constexpr double kHermitianTolerance = 1e-10;

  explicit HermitianPD(ComplexMat m) : matrix_(std::move(m)) {
    if (matrix_.rows() == 0 || matrix_.rows() != matrix_.cols())
      throw FactorizationError("matrix must be square and non-empty");
    if (!matrix_.allFinite()) throw FactorizationError("matrix has non-finite entries");
    const double scale = matrix_.cwiseAbs().maxCoeff();
    const double asym = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
    if (asym > kHermitianTolerance * scale)
      throw FactorizationError("matrix is not Hermitian");

    llt_.compute(matrix_);
    if (llt_.info() != Eigen::Success)
      throw FactorizationError("matrix is not positive definite");
    const auto diag = llt_.matrixLLT().diagonal().real();
    for (Eigen::Index i = 0; i < diag.size(); ++i) {
      if (!(diag[i] > 0.0) || !std::isfinite(diag[i]))
        throw FactorizationError("non-positive Cholesky pivot");
    }
    log_det_ = 2.0 * diag.array().log().sum();
  }

  std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }
  const ComplexMat& matrix() const { return matrix_; }

  /// Lower-triangular factor L with L L^H = M.
  ComplexMat lower_factor() const { return llt_.matrixL(); }

  /// Smallest diagonal entry of L.
  double min_pivot() const { return llt_.matrixLLT().diagonal().real().minCoeff(); }

  /// ln det M, from the factor diagonal.
  double log_det() const { return log_det_; }

  /// y = M^{-1} x via two triangular solves.
  ComplexVec solve(const Eigen::Ref<const ComplexVec>& x) const {
    check_dim(x.size());
    return llt_.solve(x);
  }

  /// w = L^{-1} x, so that ||w||^2 = x^H M^{-1} x.
  ComplexVec whiten(const Eigen::Ref<const ComplexVec>& x) const {
    check_dim(x.size());
    return llt_.matrixL().solve(x);
  }

  /// x^H M^{-1} x.
  double quadratic_form(const Eigen::Ref<const ComplexVec>& x) const {
    return whiten(x).squaredNorm();
  }

  /// L x, mapping white noise to covariance M.
  ComplexVec color(const Eigen::Ref<const ComplexVec>& w) const {
    check_dim(w.size());
    return llt_.matrixL() * w;
  }

 private:
  void check_dim(Eigen::Index n) const {
    if (n != matrix_.rows()) throw ParameterError("dimension mismatch with HermitianPD");
  }

  ComplexMat matrix_;
  Eigen::LLT<ComplexMat, Eigen::Lower> llt_;
  double log_det_ = 0.0;
};

/// Solves M y = x for Hermitian positive-definite M.
inline ComplexVec solve_hpd(const HermitianPD& m, const Eigen::Ref<const ComplexVec>& x) {
  return m.solve(x);
}

}  // namespace multispot
