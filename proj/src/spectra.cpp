#include "delaylab/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>

#include "delaylab/error.hpp"

namespace delaylab {

namespace {

void require_positive_n(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidParams, "n must be positive, got " + std::to_string(n));
}

double mode_angle(int j, int n) { return static_cast<double>(j) * std::numbers::pi / (n + 1); }

// lambda^2 + 2 lambda cos(theta) + 1 written as a sum of non-negative terms.
double gram_mode(double lambda, double theta) {
  if (lambda >= 0.0) {
    const double c = std::cos(theta / 2);
    return (lambda - 1.0) * (lambda - 1.0) + 4.0 * lambda * c * c;
  }
  const double s = std::sin(theta / 2);
  return (lambda + 1.0) * (lambda + 1.0) - 4.0 * lambda * s * s;
}

}  // namespace

std::vector<Complex> toeplitz_tridiag_eigs(const ToeplitzTriSpec& t) {
  require_positive_n(t.n);
  const Complex root = std::sqrt(t.b * t.c);
  std::vector<Complex> out;
  out.reserve(static_cast<std::size_t>(t.n));
  for (int j = 1; j <= t.n; ++j) out.push_back(t.a + 2.0 * root * std::cos(mode_angle(j, t.n)));
  return out;
}

LogComplex toeplitz_tridiag_det(const ToeplitzTriSpec& t) {
  require_positive_n(t.n);
  const Complex disc = t.a * t.a - 4.0 * t.b * t.c;
  const double scale = std::norm(t.a) + 4.0 * std::abs(t.b) * std::abs(t.c);
  LogComplex out;
  if (std::abs(disc) <= 1e-12 * scale) {
    const Complex half = t.a / 2.0;
    out.log_abs = std::log(static_cast<double>(t.n + 1)) + t.n * std::log(std::abs(half));
    out.phase = t.n * std::arg(half);
    return out;
  }
  // Pick the root sign that makes |r1| >= |r2| and factor r1^{n+1} out.
  Complex s = std::sqrt(disc);
  if (std::abs(t.a + s) < std::abs(t.a - s)) s = -s;
  const Complex r1 = (t.a + s) / 2.0;
  const Complex r2 = (t.a - s) / 2.0;
  const Complex q = r2 / r1;
  const Complex tail = 1.0 - std::pow(q, t.n + 1);
  out.log_abs = (t.n + 1) * std::log(std::abs(r1)) + std::log(std::abs(tail)) - std::log(std::abs(s));
  out.phase = (t.n + 1) * std::arg(r1) + std::arg(tail) - std::arg(s);
  return out;
}

std::vector<double> scalar_singular_values(Complex omega, int n) {
  require_positive_n(n);
  const double r = std::abs(omega);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int j = 1; j <= n; ++j) out.push_back(std::sqrt(gram_mode(r, mode_angle(j, n))));
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

RealMatrix hermitian_gram_eigs(std::span<const double> eigvals_w, int n) {
  require_positive_n(n);
  if (eigvals_w.empty()) throw Error(ErrorCode::InvalidParams, "need at least one eigenvalue");
  const auto m = static_cast<Eigen::Index>(eigvals_w.size());
  RealMatrix out(n, m);
  for (int j = 1; j <= n; ++j)
    for (Eigen::Index k = 0; k < m; ++k)
      out(j - 1, k) = gram_mode(eigvals_w[static_cast<std::size_t>(k)], mode_angle(j, n));
  return out;
}

double log_power_sum(double x, int n) {
  if (n < 0) throw Error(ErrorCode::InvalidParams, "n must be non-negative");
  if (!(x >= 0.0) || !std::isfinite(x)) throw Error(ErrorCode::InvalidParams, "x must be finite and >= 0");
  if (x == 1.0) return std::log(static_cast<double>(n + 1));
  // Sum ratios <= 1 starting from the largest term.
  const double ratio = x < 1.0 ? x : 1.0 / x;
  double sum = 0.0;
  double term = 1.0;
  for (int k = 0; k <= n; ++k) {
    sum += term;
    term *= ratio;
    if (term < 1e-18 * sum) break;
  }
  const double lead = x < 1.0 ? 0.0 : n * std::log(x);
  return lead + std::log(sum);
}

double scalar_gen_det(Complex omega, int n) {
  require_positive_n(n);
  return 0.5 * log_power_sum(std::norm(omega), n);
}

double hermitian_gen_det(std::span<const double> sing_w, int n) {
  require_positive_n(n);
  double out = 0.0;
  for (double sigma : sing_w) {
    if (!(sigma >= 0.0)) throw Error(ErrorCode::InvalidParams, "singular values must be non-negative");
    if (std::abs(sigma - 1.0) <= kUnitWindow)
      out += 0.5 * std::log(static_cast<double>(n + 1));
    else
      out += 0.5 * log_power_sum(sigma * sigma, n);
  }
  return out;
}

}  // namespace delaylab
