#include "delaylab/bounds.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "delaylab/error.hpp"

namespace delaylab {

const char* to_string(KappaRegime r) {
  switch (r) {
    case KappaRegime::AwayFromUnit: return "away_from_unit";
    case KappaRegime::AtUnit: return "at_unit";
    case KappaRegime::GeneralHalf: return "general_half";
    case KappaRegime::NotApplicable: return "not_applicable";
  }
  return "unknown";
}

const char* to_string(DetRegime r) {
  switch (r) {
    case DetRegime::Sub1: return "sub1";
    case DetRegime::At1: return "at1";
    case DetRegime::Super1: return "super1";
    case DetRegime::NotApplicable: return "not_applicable";
  }
  return "unknown";
}

namespace {

void require_n(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidParams, "n must be positive");
}

void require_sing(std::span<const double> sing_w) {
  if (sing_w.empty()) throw Error(ErrorCode::InvalidParams, "need at least one singular value");
  for (double s : sing_w)
    if (!(s >= 0.0) || !std::isfinite(s))
      throw Error(ErrorCode::InvalidParams, "singular values must be finite and non-negative");
}

double max_of(std::span<const double> v) { return *std::max_element(v.begin(), v.end()); }

}  // namespace

double scalar_cond_bound(Complex omega, int n) {
  require_n(n);
  const double r = std::abs(omega);
  if (std::abs(r - 1.0) <= kUnitWindow) return 2.0 / std::numbers::pi * (n + 1);
  return std::abs((r + 1.0) / (r - 1.0));
}

double scalar_det_bound(Complex omega, int n) {
  require_n(n);
  const double r = std::abs(omega);
  if (std::abs(r - 1.0) <= kUnitWindow) return 0.5 * std::log(static_cast<double>(n + 1));
  if (r < 1.0) return -0.5 * std::log1p(-r * r);
  return n * std::log(r) - 0.5 * std::log1p(-1.0 / (r * r));
}

double hermitian_cond_bound(std::span<const double> sing_w, int n) {
  require_n(n);
  require_sing(sing_w);
  const double smax = max_of(sing_w);
  double closest = kInfinity;
  for (double s : sing_w) closest = std::min(closest, std::abs(s - 1.0));
  if (closest <= kUnitWindow) return (n + 1) / std::numbers::pi * (smax + 1.0);
  return (smax + 1.0) / closest;
}

double hermitian_det_bound(std::span<const double> sing_w, int n) {
  require_n(n);
  require_sing(sing_w);
  const double m = static_cast<double>(sing_w.size());
  const double smax = max_of(sing_w);
  if (std::abs(smax - 1.0) <= kUnitWindow) return 0.5 * m * std::log(static_cast<double>(n + 1));
  if (smax < 1.0) return -0.5 * m * std::log1p(-smax * smax);  // min_j (1 - s_j^2) = 1 - s_max^2
  return 0.5 * m * std::log(static_cast<double>(n)) + n * m * std::log(smax);
}

EmbeddingVerdict embedding_condition(double sigma_min, double sigma_max) {
  if (!std::isfinite(sigma_min) || !std::isfinite(sigma_max) || sigma_min < 0.0 || sigma_max < sigma_min)
    throw Error(ErrorCode::InvalidRange, "need 0 <= sigma_min <= sigma_max, got " + std::to_string(sigma_min) +
                                             ", " + std::to_string(sigma_max));
  const double lo = sigma_min, hi = sigma_max;
  const double lo2 = lo * lo;
  EmbeddingVerdict v;

  v.weak_ok = hi <= 0.5 * (1.0 + lo2);
  double best_sum = 0.5 + hi / (1.0 + lo2);

  if (hi <= 1.0) {
    const double num = hi * hi * hi - hi * hi + 2.0 * hi - 1.0;
    const double den = hi * hi - hi + 1.0;
    v.case1_ok = num <= 0.0 || std::sqrt(num / den) <= lo;
    best_sum = std::min(best_sum, hi / (1.0 + hi * hi) + hi / (1.0 + lo2));
  }
  if (lo >= 1.0) {
    v.case2_ok = hi <= lo2 - lo + 1.0;
    best_sum = std::min(best_sum, (lo + hi) / (1.0 + lo2));
  }
  // W = 0 reduces the Gram matrix to the identity.
  v.guaranteed = hi == 0.0 || v.weak_ok || v.case1_ok || v.case2_ok;
  v.margin = 1.0 - best_sum;
  return v;
}

double general_smax_bound(double sigma_max_w) {
  if (!(sigma_max_w >= 0.0)) throw Error(ErrorCode::InvalidRange, "sigma_max must be >= 0");
  return sigma_max_w + 1.0;
}

double general_cond_bound(double sigma_min_w, double sigma_max_w) {
  if (!(sigma_min_w >= 0.0) || sigma_max_w < sigma_min_w)
    throw Error(ErrorCode::InvalidRange, "need 0 <= sigma_min <= sigma_max");
  if (!(sigma_max_w < 0.5))
    throw Error(ErrorCode::OutOfRegime, "general condition bound needs sigma_max < 1/2");
  const double hi = sigma_max_w, lo = sigma_min_w;
  return std::sqrt((1.0 + 2.0 * hi + hi * hi) / (1.0 - 2.0 * hi + lo * lo));
}

}  // namespace delaylab
