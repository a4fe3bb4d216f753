#pragma once

// Builders for the block bidiagonal delay matrix M (identity blocks on the
// diagonal, W on the super-diagonal) and its Gram matrix A = M M^*, plus the
// perfect-shuffle permutation and the Hermitian fast factorization.

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Core>

#include "delaylab/error.hpp"
#include "delaylab/matcore.hpp"
#include "delaylab/spectra.hpp"
#include "delaylab/types.hpp"

namespace delaylab {

enum class WClass { Scalar, Hermitian, General, Unitary, Zero };

inline const char* to_string(WClass c) {
  switch (c) {
    case WClass::Scalar: return "scalar";
    case WClass::Hermitian: return "hermitian";
    case WClass::General: return "general";
    case WClass::Unitary: return "unitary";
    case WClass::Zero: return "zero";
  }
  return "unknown";
}

/// Sign placed in front of W on the super-diagonal. The recurrence produces
/// -W; the spectral analysis is sign-invariant and uses +W.
enum class WeightSign { Plus, Minus };

/// One delay-matrix instance: n block rows (lags), state dimension m, weight W.
template <typename Scalar = Complex>
struct DelaySpec {
  int n = 1;
  int m = 1;
  Matrix<Scalar> W;
  WClass w_class = WClass::General;
};

/// Throws InvalidParams / DimensionMismatch / NonFinite / NotHermitian when
/// the spec violates its invariants (including the declared class).
template <typename Scalar>
void validate(const DelaySpec<Scalar>& spec) {
  if (spec.n < 1 || spec.m < 1)
    throw Error(ErrorCode::InvalidParams, "n and m must be positive");
  if (spec.W.rows() != spec.m || spec.W.cols() != spec.m)
    throw Error(ErrorCode::DimensionMismatch, "W must be m x m with m = " + std::to_string(spec.m));
  detail::require_finite(spec.W, "W");
  const double scale = detail::max_abs(spec.W);
  switch (spec.w_class) {
    case WClass::Scalar:
      if (spec.m != 1) throw Error(ErrorCode::InvalidParams, "scalar class requires m = 1");
      break;
    case WClass::Hermitian:
      if (detail::max_abs(spec.W - spec.W.adjoint()) > 1e-12 * scale)
        throw Error(ErrorCode::NotHermitian, "W declared Hermitian is not");
      break;
    case WClass::Unitary: {
      const Matrix<Scalar> eye = Matrix<Scalar>::Identity(spec.m, spec.m);
      if (detail::max_abs(spec.W * spec.W.adjoint() - eye) > 1e-10)
        throw Error(ErrorCode::InvalidParams, "W declared unitary is not");
      break;
    }
    case WClass::Zero:
      if (scale != 0.0) throw Error(ErrorCode::InvalidParams, "W declared zero is not");
      break;
    case WClass::General:
      break;
  }
}

inline DelaySpec<Complex> make_scalar_spec(Complex omega, int n) {
  DelaySpec<Complex> spec;
  spec.n = n;
  spec.m = 1;
  spec.W = ComplexMatrix::Constant(1, 1, omega);
  spec.w_class = WClass::Scalar;
  return spec;
}

template <typename Scalar>
DelaySpec<Scalar> make_spec(const Matrix<Scalar>& w, int n, WClass w_class = WClass::General) {
  DelaySpec<Scalar> spec;
  spec.n = n;
  spec.m = static_cast<int>(w.rows());
  spec.W = w;
  spec.w_class = w_class;
  return spec;
}

/// The mn x m(n+1) delay matrix.
template <typename Scalar>
Matrix<Scalar> build_delay_matrix(const DelaySpec<Scalar>& spec, WeightSign sign = WeightSign::Plus) {
  validate(spec);
  const Eigen::Index n = spec.n, m = spec.m;
  Matrix<Scalar> out = Matrix<Scalar>::Zero(m * n, m * (n + 1));
  const Matrix<Scalar> w = sign == WeightSign::Plus ? spec.W : Matrix<Scalar>(-spec.W);
  for (Eigen::Index j = 0; j < n; ++j) {
    out.block(j * m, j * m, m, m).setIdentity();
    out.block(j * m, (j + 1) * m, m, m) = w;
  }
  return out;
}

/// The mn x mn Gram matrix: I + W W^* on the diagonal, W above, W^* below.
template <typename Scalar>
Matrix<Scalar> build_gram(const DelaySpec<Scalar>& spec) {
  validate(spec);
  const Eigen::Index n = spec.n, m = spec.m;
  Matrix<Scalar> out = Matrix<Scalar>::Zero(m * n, m * n);
  const Matrix<Scalar> diag = Matrix<Scalar>::Identity(m, m) + spec.W * spec.W.adjoint();
  for (Eigen::Index j = 0; j < n; ++j) {
    out.block(j * m, j * m, m, m) = diag;
    if (j + 1 < n) {
      out.block(j * m, (j + 1) * m, m, m) = spec.W;
      out.block((j + 1) * m, j * m, m, m) = spec.W.adjoint();
    }
  }
  return out;
}

using Permutation = Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int>;

/// Perfect-shuffle (stride) permutation on {0, ..., mn-1}: flat index
/// (block j, offset k) of n blocks of size m goes to (block k, offset j) of
/// m blocks of size n. Eigen convention: (P x)[indices[i]] = x[i].
inline Permutation shuffle_permutation(int n, int m) {
  if (n < 1 || m < 1) throw Error(ErrorCode::InvalidParams, "n and m must be positive");
  Permutation p(n * m);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < m; ++k) p.indices()[j * m + k] = k * n + j;
  return p;
}

/// Orthonormal eigenvectors of any n x n symmetric tridiagonal Toeplitz
/// matrix: column j-1 holds sqrt(2/(n+1)) sin(i j pi/(n+1)), i, j = 1..n.
inline RealMatrix sine_basis(int n) {
  RealMatrix v(n, n);
  const double scale = std::sqrt(2.0 / (n + 1));
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j)
      v(i - 1, j - 1) = scale * std::sin(static_cast<double>(i) * j * std::numbers::pi / (n + 1));
  return v;
}

/// A = (I_n (x) U) P^T (I_m (x) V) diag(block_eigs) (...)^*, for Hermitian W = U diag(eigvals_w) U^*.
template <typename Scalar = Complex>
struct HermitianFactorization {
  int n = 1;
  int m = 1;
  Matrix<Scalar> W;
  RealVector eigvals_w;  // ascending
  Matrix<Scalar> U;      // unitary eigenvectors of W
  RealMatrix block_eigs; // n x m; (j-1, k) is the eigenvalue for sine mode j and W-mode k
  int sine_basis_dim = 1;
};

template <typename Scalar>
HermitianFactorization<Scalar> hermitian_factorization(const DelaySpec<Scalar>& spec) {
  validate(spec);
  const auto eig = hermitian_eigen(spec.W);  // throws NotHermitian
  HermitianFactorization<Scalar> f;
  f.n = spec.n;
  f.m = spec.m;
  f.W = spec.W;
  f.eigvals_w = eig.values;
  f.U = eig.vectors;
  f.block_eigs = hermitian_gram_eigs(std::vector<double>(eig.values.data(), eig.values.data() + eig.values.size()),
                                     spec.n);
  f.sine_basis_dim = spec.n;
  return f;
}

/// Dense Gram matrix reassembled from the factorization (test and diagnostics use).
template <typename Scalar>
Matrix<Scalar> gram_from_factorization(const HermitianFactorization<Scalar>& f) {
  const Eigen::Index n = f.n, m = f.m, nm = n * m;
  // Columns of Q are the eigenvectors of A: Q = (I_n (x) U) P^T (I_m (x) V).
  const RealMatrix v = sine_basis(f.n);
  const Permutation p = shuffle_permutation(f.n, f.m);
  Matrix<Scalar> blockv = Matrix<Scalar>::Zero(nm, nm);
  for (Eigen::Index k = 0; k < m; ++k) blockv.block(k * n, k * n, n, n) = v.template cast<Scalar>();
  Matrix<Scalar> q = p.transpose() * blockv;
  for (Eigen::Index j = 0; j < n; ++j) q.middleRows(j * m, m) = f.U * q.middleRows(j * m, m);

  Vector<Scalar> lambda(nm);
  for (Eigen::Index k = 0; k < m; ++k)
    for (Eigen::Index j = 0; j < n; ++j) lambda(k * n + j) = Scalar(f.block_eigs(j, k));
  return q * lambda.asDiagonal() * q.adjoint();
}

/// M^+ rhs through the factorization: rotate by U^*, shuffle, diagonal solve in
/// the sine basis of each tridiagonal block, unshuffle, rotate back, apply M^*.
template <typename Scalar>
Vector<Scalar> apply_fast_pinv(const HermitianFactorization<Scalar>& f, const Vector<Scalar>& rhs) {
  const Eigen::Index n = f.n, m = f.m;
  if (rhs.size() != n * m)
    throw Error(ErrorCode::DimensionMismatch, "rhs length must be m*n");
  if (f.block_eigs.minCoeff() <= 1e-12)
    throw Error(ErrorCode::RankDeficient, "Gram eigenvalue below 1e-12");

  // Column j of the m x n view is block j.
  Matrix<Scalar> blocks = f.U.adjoint() * Eigen::Map<const Matrix<Scalar>>(rhs.data(), m, n);
  const Permutation p = shuffle_permutation(f.n, f.m);
  Vector<Scalar> shuffled = p * Eigen::Map<const Vector<Scalar>>(blocks.data(), n * m);

  // Column k of the n x m view is the tridiagonal block for W-mode k.
  Eigen::Map<Matrix<Scalar>> modes(shuffled.data(), n, m);
  const Matrix<Scalar> v = sine_basis(f.n).template cast<Scalar>();
  Matrix<Scalar> coeffs = v.transpose() * modes;
  coeffs.array() /= f.block_eigs.template cast<Scalar>().array();
  modes = v * coeffs;

  Vector<Scalar> unshuffled = p.transpose() * shuffled;
  Matrix<Scalar> x = f.U * Eigen::Map<const Matrix<Scalar>>(unshuffled.data(), m, n);

  // M^* x: block i of the result is x_i (i < n) plus W^* x_{i-1} (i >= 1).
  Matrix<Scalar> out = Matrix<Scalar>::Zero(m, n + 1);
  out.leftCols(n) = x;
  out.rightCols(n) += f.W.adjoint() * x;
  return Eigen::Map<const Vector<Scalar>>(out.data(), m * (n + 1));
}

}  // namespace delaylab
