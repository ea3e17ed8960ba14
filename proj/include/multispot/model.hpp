#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>

#include "multispot/linalg.hpp"
#include "multispot/rng.hpp"
#include "multispot/types.hpp"

namespace multispot {

/// Space-time steering vector v = v_t(doppler) (x) v_s(theta) for a
/// half-wavelength uniform linear array. Entry p*n_a + n carries phase
/// 2*pi*(p*doppler + 0.5*n*sin(theta)).
inline ComplexVec steering_vector(std::size_t n_a, std::size_t n_p, double theta, double doppler) {
  require(n_a >= 1 && n_p >= 1, "steering_vector: n_a and n_p must be >= 1");
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double spatial = 0.5 * std::sin(theta);
  ComplexVec v(static_cast<Eigen::Index>(n_a * n_p));
  for (std::size_t p = 0; p < n_p; ++p) {
    for (std::size_t n = 0; n < n_a; ++n) {
      const double phase = two_pi * (static_cast<double>(p) * doppler + static_cast<double>(n) * spatial);
      v[static_cast<Eigen::Index>(p * n_a + n)] = std::polar(1.0, phase);
    }
  }
  return v;
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// Interference covariance I + CNR * M_c with M_c(i,j) = rho_c^|i-j|.
/// Entries are written symmetrically so the result is exactly Hermitian.
inline HermitianPD build_icm(std::size_t n, double cnr_db, double rho_c) {
  require(n >= 1, "build_icm: N must be >= 1");
  require(rho_c >= 0.0 && rho_c < 1.0, "build_icm: rho_c must lie in [0, 1)");
  const double cnr = db_to_linear(cnr_db);
  const auto size = static_cast<Eigen::Index>(n);
  ComplexMat m(size, size);
  for (Eigen::Index i = 0; i < size; ++i) {
    m(i, i) = 1.0 + cnr;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double value = cnr * std::pow(rho_c, static_cast<double>(i - j));
      m(i, j) = value;
      m(j, i) = value;
    }
  }
  return HermitianPD(std::move(m));
}

/// mean + L w with L L^H = M and w standard circular complex normal.
template <class Engine>
ComplexVec sample_complex_gaussian(const Eigen::Ref<const ComplexVec>& mean, const HermitianPD& m,
                                   Engine& rng) {
  require(static_cast<std::size_t>(mean.size()) == m.dim(),
          "sample_complex_gaussian: mean and covariance dimensions differ");
  return mean + m.color(standard_complex_normal(m.dim(), rng));
}

/// Per-target power P such that P * v^H M^{-1} v equals the requested SINR.
/// An SINR of -inf dB maps to zero power.
inline double target_power(double sinr_db, const ComplexVec& v, const HermitianPD& m) {
  if (std::isinf(sinr_db) && sinr_db < 0) return 0.0;
  const double gain = m.quadratic_form(v);
  return db_to_linear(sinr_db) / gain;
}

struct Scene {
  WindowData primary;
  TrainingData secondary;
  GroundTruth truth;
};

/// Draws one realization of the data model.
///
/// The draw order is fixed: K_P primary noise vectors, K_S secondary vectors,
/// then K_T target phases. Phases are drawn under H0 as well, so the random
/// stream consumed does not depend on the hypothesis or the SINR.
template <class Engine>
Scene generate_scene(const Scenario& s, Hypothesis hypothesis, double sinr_db, const ComplexVec& v,
                     const HermitianPD& m, Engine& rng) {
  require(m.dim() == s.n() && static_cast<std::size_t>(v.size()) == s.n(),
          "generate_scene: steering vector / covariance dimension must equal N");
  const auto n = static_cast<Eigen::Index>(s.n());
  ComplexMat z(n, static_cast<Eigen::Index>(s.k_p));
  ComplexMat r(n, static_cast<Eigen::Index>(s.k_s));
  for (Eigen::Index h = 0; h < z.cols(); ++h) z.col(h) = m.color(standard_complex_normal(s.n(), rng));
  for (Eigen::Index k = 0; k < r.cols(); ++k) r.col(k) = m.color(standard_complex_normal(s.n(), rng));

  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::vector<double> phases(s.k_t);
  for (double& p : phases) p = phase(rng);

  GroundTruth truth;
  truth.alpha.assign(s.k_p, Complex(0.0, 0.0));
  if (hypothesis == Hypothesis::H1) {
    const double amplitude = std::sqrt(target_power(sinr_db, v, m));
    std::vector<BinIndex> positions = s.target_positions;
    for (std::size_t t = 0; t < positions.size(); ++t) {
      const BinIndex h = positions[t];
      const Complex alpha = std::polar(amplitude, phases[t]);
      truth.alpha[h] = alpha;
      z.col(static_cast<Eigen::Index>(h)) += alpha * v;
    }
    std::sort(positions.begin(), positions.end());
    if (amplitude > 0.0) truth.target_positions = std::move(positions);
  }
  return Scene{WindowData(std::move(z)), TrainingData(std::move(r)), std::move(truth)};
}

/// Convenience overload: builds v and M from the scenario and uses the first
/// SINR grid point.
template <class Engine>
Scene generate_scene(const Scenario& s, Hypothesis hypothesis, Engine& rng) {
  s.validate();
  const ComplexVec v = steering_vector(s.n_a, s.n_p, s.theta, s.doppler);
  const HermitianPD m = build_icm(s.n(), s.cnr_db, s.rho_c);
  return generate_scene(s, hypothesis, s.sinr_db.front(), v, m, rng);
}

}  // namespace multispot
