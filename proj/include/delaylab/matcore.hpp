#pragma once

// Dense spectral oracle: cyclic Jacobi eigenvalues for Hermitian matrices and
// one-sided cyclic Jacobi singular values. Every closed form and bound in the
// library is checked against these routines, so they trade speed for
// accuracy and simplicity (intended for dimensions up to a few hundred).

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Jacobi>

#include "delaylab/error.hpp"
#include "delaylab/types.hpp"

namespace delaylab {

namespace detail {

inline constexpr int kMaxJacobiSweeps = 100;

template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& a) {
  return a.size() == 0 ? 0.0 : static_cast<double>(a.cwiseAbs().maxCoeff());
}

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& a, const char* what) {
  if (!a.allFinite()) throw Error(ErrorCode::NonFinite, std::string(what) + " has NaN/Inf entries");
}

template <typename Derived>
void require_hermitian(const Eigen::MatrixBase<Derived>& a, const char* what) {
  if (a.rows() != a.cols())
    throw Error(ErrorCode::NotHermitian, std::string(what) + " is not square");
  const double scale = max_abs(a);
  const double asym = max_abs(a - a.adjoint());
  if (asym > 1e-12 * scale)
    throw Error(ErrorCode::NotHermitian,
                std::string(what) + " deviates from its adjoint by " + std::to_string(asym));
}

// Two-sided cyclic Jacobi on a Hermitian matrix, in place. On exit `a` is
// diagonal to working precision. When `v` is non-null it accumulates the
// rotations so that a_in = v * a_out * v^*.
template <typename Scalar>
void jacobi_diagonalize(Matrix<Scalar>& a, Matrix<Scalar>* v) {
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  const Eigen::Index n = a.rows();
  const Real eps = Eigen::NumTraits<Real>::epsilon();
  if (v) v->setIdentity(n, n);

  for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
    bool rotated = false;
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const Real apq = std::abs(a(p, q));
        if (apq == Real(0)) continue;
        const Real app = std::abs(Eigen::numext::real(a(p, p)));
        const Real aqq = std::abs(Eigen::numext::real(a(q, q)));
        // Relative criterion keeps small eigenvalues of definite matrices accurate.
        if (apq <= eps * std::sqrt(app * aqq)) continue;

        Eigen::JacobiRotation<Scalar> rot;
        rot.makeJacobi(Eigen::numext::real(a(p, p)), a(p, q), Eigen::numext::real(a(q, q)));
        a.applyOnTheLeft(p, q, rot.adjoint());
        a.applyOnTheRight(p, q, rot);
        a(p, q) = Scalar(0);
        a(q, p) = Scalar(0);
        if (v) v->applyOnTheRight(p, q, rot);
        rotated = true;
      }
    }
    if (!rotated) break;
  }
}

// One-sided (Hestenes) cyclic Jacobi on the rows of x, in place: each step is
// the two-sided Jacobi rotation of the implicit Gram matrix x x^*. On exit
// the rows are mutually orthogonal and their norms are the singular values.
// When `u` is non-null it accumulates rotations so that x_in = u * x_out.
template <typename Scalar>
void hestenes_orthogonalize(Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>& x,
                            Matrix<Scalar>* u) {
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  const Eigen::Index r = x.rows();
  const Real tol = Eigen::NumTraits<Real>::epsilon() * std::sqrt(Real(std::max<Eigen::Index>(x.cols(), 1)));
  if (u) u->setIdentity(r, r);

  Eigen::Matrix<Real, Eigen::Dynamic, 1> norms2(r);
  for (Eigen::Index i = 0; i < r; ++i) norms2(i) = x.row(i).squaredNorm();

  for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
    bool rotated = false;
    for (Eigen::Index p = 0; p + 1 < r; ++p) {
      for (Eigen::Index q = p + 1; q < r; ++q) {
        // Gram entry G(p,q) = sum_k x(p,k) conj(x(q,k)).
        const Scalar gpq = x.row(q).dot(x.row(p));
        const Real apq = std::abs(gpq);
        if (apq == Real(0) || apq <= tol * std::sqrt(norms2(p) * norms2(q))) continue;

        Eigen::JacobiRotation<Scalar> rot;
        rot.makeJacobi(norms2(p), gpq, norms2(q));
        x.applyOnTheLeft(p, q, rot.adjoint());
        if (u) u->applyOnTheRight(p, q, rot);
        norms2(p) = x.row(p).squaredNorm();
        norms2(q) = x.row(q).squaredNorm();
        rotated = true;
      }
    }
    if (!rotated) break;
  }
}

template <typename Derived>
using RowMajorOf = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace detail

/// Eigenvalues of a Hermitian matrix, ascending.
///
/// Throws NotHermitian when max|A - A^*| > 1e-12 max|A| and NonFinite on
/// NaN/Inf input.
template <typename Derived>
std::vector<double> hermitian_eigenvalues(const Eigen::MatrixBase<Derived>& a) {
  detail::require_finite(a, "matrix");
  detail::require_hermitian(a, "matrix");
  using Scalar = typename Derived::Scalar;
  Matrix<Scalar> work = (a + a.adjoint()) / 2.0;
  detail::jacobi_diagonalize<Scalar>(work, nullptr);
  std::vector<double> eigs(static_cast<std::size_t>(work.rows()));
  for (Eigen::Index i = 0; i < work.rows(); ++i)
    eigs[static_cast<std::size_t>(i)] = static_cast<double>(Eigen::numext::real(work(i, i)));
  std::sort(eigs.begin(), eigs.end());
  return eigs;
}

template <typename Scalar>
struct HermitianEigen {
  RealVector values;       // ascending
  Matrix<Scalar> vectors;  // columns are the matching unit eigenvectors
};

/// Full eigendecomposition A = V diag(values) V^* of a Hermitian matrix.
template <typename Derived>
HermitianEigen<typename Derived::Scalar> hermitian_eigen(const Eigen::MatrixBase<Derived>& a) {
  detail::require_finite(a, "matrix");
  detail::require_hermitian(a, "matrix");
  using Scalar = typename Derived::Scalar;
  Matrix<Scalar> work = (a + a.adjoint()) / 2.0;
  Matrix<Scalar> v;
  detail::jacobi_diagonalize<Scalar>(work, &v);

  const Eigen::Index n = work.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
    return Eigen::numext::real(work(i, i)) < Eigen::numext::real(work(j, j));
  });

  HermitianEigen<Scalar> out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    out.values(k) = static_cast<double>(Eigen::numext::real(work(src, src)));
    out.vectors.col(k) = v.col(src);
  }
  return out;
}

/// Singular values, descending; min(rows, cols) of them.
template <typename Derived>
std::vector<double> singular_values(const Eigen::MatrixBase<Derived>& m) {
  detail::require_finite(m, "matrix");
  detail::RowMajorOf<Derived> x;
  if (m.rows() <= m.cols())
    x = m;
  else
    x = m.adjoint();
  detail::hestenes_orthogonalize(x, static_cast<Matrix<typename Derived::Scalar>*>(nullptr));

  std::vector<double> sv(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) sv[static_cast<std::size_t>(i)] = static_cast<double>(x.row(i).norm());
  std::sort(sv.begin(), sv.end(), std::greater<>());
  return sv;
}

/// Summary statistics derived from a descending list of singular values.
inline SpectralSummary summarize_singular_values(std::vector<double> sv, double rank_tol_rel = kRankTolRel) {
  SpectralSummary s;
  s.singular_values = std::move(sv);
  if (s.singular_values.empty()) return s;
  s.sigma_max = s.singular_values.front();
  s.sigma_min = s.singular_values.back();
  const double tol = rank_tol_rel * s.sigma_max;
  s.rank_numeric = 0;
  s.gen_det_log = 0.0;
  for (double sigma : s.singular_values) {
    if (sigma > tol && sigma > 0.0) {
      ++s.rank_numeric;
      s.gen_det_log += std::log(sigma);
    }
  }
  s.kappa = s.full_rank() ? s.sigma_max / s.sigma_min : kInfinity;
  return s;
}

template <typename Derived>
SpectralSummary spectral_summary(const Eigen::MatrixBase<Derived>& m, double rank_tol_rel = kRankTolRel) {
  return summarize_singular_values(singular_values(m), rank_tol_rel);
}

/// Natural log of the generalized determinant S(M) = prod sigma_j, for
/// rows <= cols. Returns -inf when M is numerically rank deficient.
template <typename Derived>
double generalized_determinant(const Eigen::MatrixBase<Derived>& m, double rank_tol_rel = kRankTolRel) {
  if (m.rows() > m.cols())
    throw Error(ErrorCode::DimensionMismatch, "generalized determinant needs rows <= cols");
  const SpectralSummary s = spectral_summary(m, rank_tol_rel);
  if (!s.full_rank()) return -kInfinity;
  return s.gen_det_log;
}

/// Moore-Penrose pseudo-inverse of a full-rank matrix. For rows <= cols this
/// is the right inverse M^*(M M^*)^{-1}, assembled from the one-sided Jacobi
/// factors rather than by inverting the Gram matrix.
template <typename Derived>
Matrix<typename Derived::Scalar> pseudo_inverse(const Eigen::MatrixBase<Derived>& m,
                                                double rank_tol_rel = kRankTolRel) {
  using Scalar = typename Derived::Scalar;
  detail::require_finite(m, "matrix");
  if (m.rows() > m.cols()) {
    Matrix<Scalar> adj = m.adjoint();
    return pseudo_inverse(adj, rank_tol_rel).adjoint();
  }
  detail::RowMajorOf<Derived> x = m;
  Matrix<Scalar> u;
  detail::hestenes_orthogonalize(x, &u);

  // m = u * x with orthogonal rows of x, so m^+ = x^* diag(1/|x_i|^2) u^*.
  RealVector norms2(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) norms2(i) = x.row(i).squaredNorm();
  const double smax = norms2.size() ? std::sqrt(norms2.maxCoeff()) : 0.0;
  const double smin = norms2.size() ? std::sqrt(norms2.minCoeff()) : 0.0;
  if (!(smin > rank_tol_rel * smax))
    throw Error(ErrorCode::RankDeficient, "sigma_min " + std::to_string(smin) + " below rank tolerance");

  return x.adjoint() * norms2.cwiseInverse().template cast<Scalar>().asDiagonal() * u.adjoint();
}

}  // namespace delaylab
