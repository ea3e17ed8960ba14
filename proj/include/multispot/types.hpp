#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "multispot/error.hpp"

namespace multispot {

using Complex = std::complex<double>;
using ComplexVec = Eigen::VectorXcd;
using ComplexMat = Eigen::MatrixXcd;

/// Zero-based range-bin index inside the window under test.
using BinIndex = std::size_t;

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ParameterError(message);
}

inline bool all_finite(const Eigen::Ref<const ComplexMat>& m) {
  return m.allFinite();
}

/// Columns of an N x K matrix, each column one range bin. Shared base for
/// primary (window under test) and secondary (training) data.
class DataMatrix {
 public:
  DataMatrix() = default;
  explicit DataMatrix(ComplexMat columns) : columns_(std::move(columns)) {
    require(columns_.rows() > 0, "data vectors must have length > 0");
    require(all_finite(columns_), "data entries must be finite");
  }

  std::size_t dim() const { return static_cast<std::size_t>(columns_.rows()); }
  std::size_t size() const { return static_cast<std::size_t>(columns_.cols()); }
  auto column(std::size_t h) const { return columns_.col(static_cast<Eigen::Index>(h)); }
  const ComplexMat& matrix() const { return columns_; }

 protected:
  ComplexMat columns_;
};

/// Primary data Z: K_P range bins of the window under test.
class WindowData : public DataMatrix {
 public:
  WindowData() = default;
  explicit WindowData(ComplexMat columns) : DataMatrix(std::move(columns)) {
    require(size() >= 1, "window under test needs K_P >= 1");
  }
};

/// Secondary data R: K_S target-free training snapshots.
class TrainingData : public DataMatrix {
 public:
  TrainingData() = default;
  explicit TrainingData(ComplexMat columns) : DataMatrix(std::move(columns)) {}
};

enum class Hypothesis { H0, H1 };

/// True amplitudes alpha_h over the window; zero outside the target support.
struct GroundTruth {
  std::vector<Complex> alpha;
  std::vector<BinIndex> target_positions;  // ascending; empty under H0
};

/// Full experiment description.
struct Scenario {
  std::size_t n_a = 16;
  std::size_t n_p = 1;
  double theta = 0.0;    // radians
  double doppler = 0.0;  // cycles/pulse
  double cnr_db = 40.0;
  double rho_c = 0.9;
  std::size_t k_p = 30;
  std::size_t k_s = 48;
  std::size_t k_t = 5;
  std::vector<BinIndex> target_positions{2, 8, 14, 20, 26};
  std::vector<double> sinr_db{10.0};
  double p_fa = 1e-3;
  std::uint64_t seed = 1;

  std::size_t n() const { return n_a * n_p; }

  /// Throws ParameterError naming the violated invariant.
  void validate() const {
    require(n_a >= 1 && n_p >= 1, "n_a and n_p must be >= 1");
    require(k_p >= 1, "K_P >= 1 required");
    require(k_t >= 1 && k_t <= k_p, "1 <= K_T <= K_P required");
    require(target_positions.size() == k_t, "target_positions must list exactly K_T bins");
    std::vector<bool> seen(k_p, false);
    for (BinIndex h : target_positions) {
      require(h < k_p, "target_positions must lie inside the window");
      require(!seen[h], "target_positions must be distinct");
      seen[h] = true;
    }
    require(rho_c >= 0.0 && rho_c < 1.0, "rho_c must lie in [0, 1)");
    require(p_fa > 0.0 && p_fa < 1.0, "p_fa must lie in (0, 1)");
    require(!sinr_db.empty(), "sinr_db grid must not be empty");
  }
};

}  // namespace multispot
