#pragma once

// Deterministic bounds and sufficiency predicates for the delay matrix:
// condition-number and determinant bounds (scalar, Hermitian, general W),
// block diagonal dominance embedding conditions and lag monotonicity.

#include <algorithm>
#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "delaylab/delaymat.hpp"
#include "delaylab/matcore.hpp"
#include "delaylab/types.hpp"

namespace delaylab {

enum class KappaRegime { AwayFromUnit, AtUnit, GeneralHalf, NotApplicable };
enum class DetRegime { Sub1, At1, Super1, NotApplicable };

const char* to_string(KappaRegime r);
const char* to_string(DetRegime r);

struct EmbeddingVerdict {
  bool weak_ok = false;   // sigma_max <= (1 + sigma_min^2) / 2
  bool case1_ok = false;  // sub-unit refinement
  bool case2_ok = false;  // super-unit refinement
  bool guaranteed = false;
  // 1 - C for the smallest block dominance sum C among the applicable
  // conditions; >= 0 exactly when the embedding is guaranteed.
  double margin = 0.0;
};

struct BoundReport {
  double kappa_bound = kInfinity;
  KappaRegime kappa_regime = KappaRegime::NotApplicable;
  double det_bound_log = kInfinity;
  DetRegime det_regime = DetRegime::NotApplicable;
  EmbeddingVerdict embedding;
};

/// |(|w|+1)/(|w|-1)| away from the unit circle, (2/pi)(n+1) on it.
double scalar_cond_bound(Complex omega, int n);

/// Three-branch upper bound on log S for the scalar delay matrix.
double scalar_det_bound(Complex omega, int n);

/// (s_max+1)/min|s_j-1| when no s_j is 1, else ((n+1)/pi)(s_max+1).
double hermitian_cond_bound(std::span<const double> sing_w, int n);

/// Three-branch upper bound on log S for Hermitian W. The super-unit branch
/// (m/2) log n + n m log s_max is evaluated as stated; it does not dominate
/// log S when s_max is close to 1 (and never for n = 1).
double hermitian_det_bound(std::span<const double> sing_w, int n);

/// Block diagonal dominance sufficient conditions for full row rank. Equality
/// is admitted (block irreducibility). Throws InvalidRange on bad input.
EmbeddingVerdict embedding_condition(double sigma_min, double sigma_max);

/// sigma_max(M) <= sigma_max(W) + 1.
double general_smax_bound(double sigma_max_w);

/// ((1 + 2 s_max + s_max^2)/(1 - 2 s_max + s_min^2))^{1/2}, valid for s_max < 1/2.
double general_cond_bound(double sigma_min_w, double sigma_max_w);

/// The two block dominance terms ||(I+WW^*)^{-1} W|| and ||(I+WW^*)^{-1} W^*||
/// in the operator norm.
template <typename Derived>
std::pair<double, double> dominance_terms(const Eigen::MatrixBase<Derived>& w) {
  using Scalar = typename Derived::Scalar;
  detail::require_finite(w, "W");
  if (w.rows() != w.cols()) throw Error(ErrorCode::DimensionMismatch, "W must be square");
  const Matrix<Scalar> d = Matrix<Scalar>::Identity(w.rows(), w.cols()) + w * w.adjoint();
  // d is Hermitian positive definite; form d^{-1} from its eigendecomposition.
  const auto eig = hermitian_eigen(d);
  const Matrix<Scalar> dinv =
      eig.vectors * eig.values.cwiseInverse().template cast<Scalar>().asDiagonal() * eig.vectors.adjoint();
  const Matrix<Scalar> first = dinv * w;
  const Matrix<Scalar> second = dinv * w.adjoint();
  return {singular_values(first).front(), singular_values(second).front()};
}

struct LagMonotonicity {
  bool sigma_min_drop = false;  // sigma_min(M_{n2}) <= sigma_min(M_{n1})
  bool sigma_max_rise = false;  // sigma_max(M_{n1}) <= sigma_max(M_{n2})
  bool kappa_rise = false;      // kappa(M_{n1}) <= kappa(M_{n2})
  SpectralSummary first;
  SpectralSummary second;

  bool all() const { return sigma_min_drop && sigma_max_rise && kappa_rise; }
};

inline LagMonotonicity compare_lag_summaries(SpectralSummary first, SpectralSummary second,
                                             double rel_tol = 1e-9) {
  LagMonotonicity out;
  out.sigma_min_drop = second.sigma_min <= first.sigma_min * (1.0 + rel_tol) + rel_tol * first.sigma_max;
  out.sigma_max_rise = first.sigma_max <= second.sigma_max * (1.0 + rel_tol);
  out.kappa_rise = first.kappa <= second.kappa * (1.0 + rel_tol);
  out.first = std::move(first);
  out.second = std::move(second);
  return out;
}

/// Numerically checks that adding lags (n1 -> n2) cannot improve conditioning.
template <typename Scalar>
LagMonotonicity lag_monotonicity_check(const Matrix<Scalar>& w, int n1, int n2, double rel_tol = 1e-9) {
  if (n1 < 1 || n2 < n1) throw Error(ErrorCode::InvalidParams, "need 1 <= n1 <= n2");
  const auto a = spectral_summary(build_delay_matrix(make_spec(w, n1)));
  const auto b = spectral_summary(build_delay_matrix(make_spec(w, n2)));
  return compare_lag_summaries(a, b, rel_tol);
}

/// Every bound that applies to the spec's declared class. Scalar and Hermitian
/// specs use their closed-form regimes; other classes fall back to the general
/// results (condition bound only when sigma_max(W) < 1/2).
template <typename Scalar>
BoundReport bound_report(const DelaySpec<Scalar>& spec) {
  validate(spec);
  const std::vector<double> sw = singular_values(spec.W);
  const double smax = sw.front();
  const double smin = sw.back();

  BoundReport r;
  r.embedding = embedding_condition(smin, smax);
  const bool unit_max = std::abs(smax - 1.0) <= kUnitWindow;

  if (spec.w_class == WClass::Scalar || spec.w_class == WClass::Hermitian ||
      (spec.w_class == WClass::Zero)) {
    const bool any_unit =
        std::any_of(sw.begin(), sw.end(), [](double s) { return std::abs(s - 1.0) <= kUnitWindow; });
    if (spec.w_class == WClass::Scalar) {
      const Complex omega = Complex(spec.W(0, 0));
      r.kappa_bound = scalar_cond_bound(omega, spec.n);
      r.det_bound_log = scalar_det_bound(omega, spec.n);
    } else {
      r.kappa_bound = hermitian_cond_bound(sw, spec.n);
      r.det_bound_log = hermitian_det_bound(sw, spec.n);
    }
    r.kappa_regime = any_unit ? KappaRegime::AtUnit : KappaRegime::AwayFromUnit;
    r.det_regime = unit_max ? DetRegime::At1 : (smax < 1.0 ? DetRegime::Sub1 : DetRegime::Super1);
    return r;
  }

  if (smax < 0.5) {
    r.kappa_bound = general_cond_bound(smin, smax);
    r.kappa_regime = KappaRegime::GeneralHalf;
  }
  return r;
}

}  // namespace delaylab
