#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

#include "multispot/types.hpp"

namespace multispot {

using RandomEngine = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent Monte Carlo phases draw from distinct streams.
enum class Stream : std::uint64_t {
  Calibration = 1,
  Validation = 2,
  Detection = 3,
  Oracle = 4,
  Demo = 5,
};

/// Engine for one trial, a pure function of (seed, stream, trial index). Any
/// worker can construct it, so results do not depend on scheduling.
inline RandomEngine trial_engine(std::uint64_t seed, Stream stream, std::uint64_t trial) {
  const std::uint64_t s = mix64(mix64(seed ^ mix64(static_cast<std::uint64_t>(stream))) + trial);
  return RandomEngine(s);
}

/// Circularly symmetric complex normal with unit variance: real and imaginary
/// parts are independent N(0, 1/2).
template <class Engine>
ComplexVec standard_complex_normal(std::size_t n, Engine& rng) {
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  ComplexVec w(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    w[i] = Complex(re, im);
  }
  return w;
}

}  // namespace multispot
