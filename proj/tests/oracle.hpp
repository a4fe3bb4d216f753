#pragma once

// Independent reference computations for the tests. Everything here goes
// through Eigen's own decompositions (or plain series sums), never through
// the library's Jacobi code.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "delaylab/types.hpp"

namespace oracle {

using delaylab::Complex;
using delaylab::ComplexMatrix;
using delaylab::ComplexVector;
using delaylab::RealMatrix;
using delaylab::RealVector;

template <typename Derived>
std::vector<double> singular_values(const Eigen::MatrixBase<Derived>& a) {
  using M = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Eigen::JacobiSVD<M> svd{M(a)};
  const auto& s = svd.singularValues();
  return std::vector<double>(s.data(), s.data() + s.size());  // descending
}

template <typename Derived>
std::vector<double> hermitian_eigenvalues(const Eigen::MatrixBase<Derived>& a) {
  using M = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Eigen::SelfAdjointEigenSolver<M> es(M(a), Eigen::EigenvaluesOnly);
  const auto& v = es.eigenvalues();
  return std::vector<double>(v.data(), v.data() + v.size());  // ascending
}

/// log|det A| through partial-pivot LU.
template <typename Derived>
double log_abs_det(const Eigen::MatrixBase<Derived>& a) {
  using M = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Eigen::PartialPivLU<M> lu{M(a)};
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) s += std::log(std::abs(lu.matrixLU()(i, i)));
  return s;
}

template <typename Derived>
auto pinv(const Eigen::MatrixBase<Derived>& a) {
  using M = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  return Eigen::CompleteOrthogonalDecomposition<M>(M(a)).pseudoInverse().eval();
}

/// Delay matrix built entry by entry from its definition.
inline ComplexMatrix delay_matrix(const ComplexMatrix& w, int n, double sign = 1.0) {
  const Eigen::Index m = w.rows();
  ComplexMatrix out = ComplexMatrix::Zero(m * n, m * (n + 1));
  for (Eigen::Index r = 0; r < m * n; ++r) {
    out(r, r) = 1.0;
    const Eigen::Index block = r / m, i = r % m;
    for (Eigen::Index j = 0; j < m; ++j) out(r, (block + 1) * m + j) = sign * w(i, j);
  }
  return out;
}

inline double max_rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double scale = 0.0;
  for (double x : b) scale = std::max(scale, std::abs(x));
  scale = std::max(scale, 1e-300);
  double worst = a.size() == b.size() ? 0.0 : INFINITY;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
  return worst;
}

inline std::vector<double> sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v;
}

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed) {}

  double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen); }

  ComplexMatrix complex_gaussian(int rows, int cols) {
    ComplexMatrix a(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) a(i, j) = Complex(normal(), normal());
    return a;
  }

  ComplexVector complex_vector(int n) { return complex_gaussian(n, 1).col(0); }

  ComplexMatrix unitary(int m) {
    Eigen::HouseholderQR<ComplexMatrix> qr(complex_gaussian(m, m));
    return qr.householderQ();
  }

  /// U diag(eigs) U^* with Haar-ish U.
  ComplexMatrix hermitian_with(const std::vector<double>& eigs) {
    const int m = static_cast<int>(eigs.size());
    const ComplexMatrix u = unitary(m);
    ComplexMatrix d = ComplexMatrix::Zero(m, m);
    for (int i = 0; i < m; ++i) d(i, i) = eigs[static_cast<std::size_t>(i)];
    ComplexMatrix h = u * d * u.adjoint();
    return (h + h.adjoint()) / 2.0;
  }

  /// U diag(sv) V^* with given singular values.
  ComplexMatrix with_singular_values(const std::vector<double>& sv) {
    const int m = static_cast<int>(sv.size());
    ComplexMatrix d = ComplexMatrix::Zero(m, m);
    for (int i = 0; i < m; ++i) d(i, i) = sv[static_cast<std::size_t>(i)];
    return unitary(m) * d * unitary(m).adjoint();
  }
};

}  // namespace oracle
