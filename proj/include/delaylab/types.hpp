#pragma once

#include <complex>
#include <limits>
#include <vector>

#include <Eigen/Core>

namespace delaylab {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Complex = std::complex<double>;
using ComplexMatrix = Matrix<Complex>;
using ComplexVector = Vector<Complex>;
using RealMatrix = Matrix<double>;
using RealVector = Vector<double>;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Default relative rank tolerance: sigma_j < kRankTolRel * sigma_max counts as zero.
inline constexpr double kRankTolRel = 1e-12;

// Window used to decide "sigma == 1" style algebraic cases.
inline constexpr double kUnitWindow = 1e-12;

/// Singular-value digest of a matrix. Determinants are carried as natural logs.
struct SpectralSummary {
  std::vector<double> singular_values;  // descending
  double sigma_max = 0.0;
  double sigma_min = 0.0;
  double kappa = kInfinity;  // +inf when sigma_min is below the rank tolerance
  double gen_det_log = 0.0;  // sum of log(sigma_j) over sigma_j above tolerance
  int rank_numeric = 0;

  bool full_rank() const { return rank_numeric == static_cast<int>(singular_values.size()); }
};

}  // namespace delaylab
