#include <doctest.h>

#include <cmath>
#include <numbers>

#include "delaylab/delaymat.hpp"
#include "delaylab/error.hpp"
#include "delaylab/spectra.hpp"
#include "oracle.hpp"

using namespace delaylab;

namespace {

ComplexMatrix toeplitz(const ToeplitzTriSpec& t) {
  ComplexMatrix a = ComplexMatrix::Zero(t.n, t.n);
  for (int i = 0; i < t.n; ++i) {
    a(i, i) = t.a;
    if (i + 1 < t.n) {
      a(i, i + 1) = t.b;
      a(i + 1, i) = t.c;
    }
  }
  return a;
}

// Determinant by the three-term recurrence D_k = a D_{k-1} - bc D_{k-2}.
Complex det_recurrence(const ToeplitzTriSpec& t) {
  Complex prev = 1.0, cur = t.a;
  for (int k = 2; k <= t.n; ++k) {
    const Complex next = t.a * cur - t.b * t.c * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double direct_power_sum(double x, int n) {
  double s = 0.0;
  for (int k = 0; k <= n; ++k) s += std::pow(x, k);
  return s;
}

}  // namespace

TEST_CASE("tridiagonal Toeplitz eigenvalues for a symmetric example") {
  // a = 2, b = c = -1, n = 3: 2 - 2 cos(j pi/4).
  const auto eigs = toeplitz_tridiag_eigs({2.0, -1.0, -1.0, 3});
  REQUIRE(eigs.size() == 3);
  // sqrt(bc) = 1, so the ordering follows cos: 2 + sqrt2, 2, 2 - sqrt2.
  CHECK(eigs[0].real() == doctest::Approx(2.0 + std::sqrt(2.0)));
  CHECK(eigs[1].real() == doctest::Approx(2.0));
  CHECK(eigs[2].real() == doctest::Approx(2.0 - std::sqrt(2.0)));
}

TEST_CASE("tridiagonal Toeplitz eigenvalues match the oracle for Hermitian blocks") {
  oracle::Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = rng.integer(1, 30);
    const Complex b(rng.normal(), rng.normal());
    const ToeplitzTriSpec t{rng.normal(), b, std::conj(b), n};
    std::vector<double> ours;
    for (Complex z : toeplitz_tridiag_eigs(t)) {
      CHECK(std::abs(z.imag()) <= 1e-14);
      ours.push_back(z.real());
    }
    CHECK(oracle::max_rel_diff(oracle::sorted(ours), oracle::hermitian_eigenvalues(toeplitz(t))) <= 1e-12);
  }
}

TEST_CASE("tridiagonal Toeplitz determinant: closed form vs recurrence and LU") {
  oracle::Rng rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const ToeplitzTriSpec t{Complex(rng.normal(), rng.normal()), Complex(rng.normal(), rng.normal()),
                            Complex(rng.normal(), rng.normal()), rng.integer(1, 25)};
    const Complex ref = det_recurrence(t);
    const Complex ours = toeplitz_tridiag_det(t).value();
    CHECK(std::abs(ours - ref) <= 1e-9 * std::max(1.0, std::abs(ref)));
    CHECK(toeplitz_tridiag_det(t).log_abs == doctest::Approx(oracle::log_abs_det(toeplitz(t))).epsilon(1e-9));
  }
}

TEST_CASE("tridiagonal Toeplitz determinant: degenerate discriminant") {
  // a^2 = 4bc: a = 2, b = c = 1 gives det = n + 1.
  for (int n : {1, 2, 5, 40}) {
    const auto d = toeplitz_tridiag_det({2.0, 1.0, 1.0, n});
    CHECK(d.value().real() == doctest::Approx(n + 1.0));
    CHECK(std::abs(d.value().imag()) <= 1e-12);
  }
  // Complex degenerate case compared with the recurrence.
  const Complex a(1.0, 2.0);
  const ToeplitzTriSpec t{a, a * a / 4.0, 1.0, 7};
  CHECK(std::abs(toeplitz_tridiag_det(t).value() - det_recurrence(t)) <= 1e-10 * std::abs(det_recurrence(t)));
}

TEST_CASE("tridiagonal Toeplitz determinant does not overflow") {
  const auto d = toeplitz_tridiag_det({10.0, 1.0, 1.0, 2000});
  CHECK(std::isfinite(d.log_abs));
  CHECK(d.log_abs > 2000 * std::log(9.0));
}

TEST_CASE("scalar singular values: worked examples") {
  // omega = 1, n = 3: 2|cos(j pi/8)|, i.e. 2 sin(j pi/8) in some order.
  const auto sv = scalar_singular_values(1.0, 3);
  CHECK(sv[0] == doctest::Approx(2.0 * std::cos(std::numbers::pi / 8)));
  CHECK(sv[1] == doctest::Approx(std::sqrt(2.0)));
  CHECK(sv[2] == doctest::Approx(2.0 * std::sin(std::numbers::pi / 8)));
  CHECK(sv[0] / sv[2] == doctest::Approx(1.0 / std::tan(std::numbers::pi / 8)).epsilon(1e-12));
  // omega = 0: all ones.
  for (double s : scalar_singular_values(0.0, 6)) CHECK(s == 1.0);
  // Only |omega| matters.
  CHECK(oracle::max_rel_diff(scalar_singular_values(Complex(0.0, 0.8), 5), scalar_singular_values(-0.8, 5)) <= 1e-15);
}

TEST_CASE("scalar singular values match the oracle") {
  oracle::Rng rng(9);
  for (int n : {1, 2, 7, 33}) {
    for (int trial = 0; trial < 6; ++trial) {
      const Complex omega = std::polar(rng.uniform(0.0, 2.0), rng.uniform(0.0, 2.0 * std::numbers::pi));
      const ComplexMatrix m = oracle::delay_matrix(ComplexMatrix::Constant(1, 1, omega), n);
      CHECK(oracle::max_rel_diff(scalar_singular_values(omega, n), oracle::singular_values(m)) <= 1e-12);
    }
  }
}

TEST_CASE("Hermitian Gram eigenvalues match the oracle") {
  oracle::Rng rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = rng.integer(1, 5), n = rng.integer(1, 12);
    std::vector<double> eigs;
    for (int k = 0; k < m; ++k) eigs.push_back(rng.uniform(-2.0, 2.0));
    const ComplexMatrix w = rng.hermitian_with(eigs);
    const RealMatrix g = hermitian_gram_eigs(eigs, n);
    std::vector<double> ours(g.data(), g.data() + g.size());
    const ComplexMatrix mm = oracle::delay_matrix(w, n);
    const auto ref = oracle::hermitian_eigenvalues(ComplexMatrix(mm * mm.adjoint()));
    CHECK(oracle::max_rel_diff(oracle::sorted(ours), ref) <= 1e-12);
  }
}

TEST_CASE("Gram eigenvalues stay accurate near the unit circle") {
  // lambda = -1, n large: smallest eigenvalue 4 sin^2(pi/(2(n+1))) is tiny
  // and must not be lost to cancellation.
  const int n = 500;
  const RealMatrix g = hermitian_gram_eigs(std::vector<double>{-1.0}, n);
  const double expected = 4.0 * std::pow(std::sin(std::numbers::pi / (2.0 * (n + 1))), 2);
  CHECK(g.minCoeff() == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("log_power_sum") {
  CHECK(log_power_sum(0.0, 5) == doctest::Approx(0.0));
  CHECK(log_power_sum(1.0, 5) == doctest::Approx(std::log(6.0)));
  for (double x : {0.1, 0.5, 0.99, 1.01, 2.0, 7.5})
    for (int n : {0, 1, 3, 20}) CHECK(log_power_sum(x, n) == doctest::Approx(std::log(direct_power_sum(x, n))).epsilon(1e-13));
  // Overflow-free for huge sums: log sum ~ n log x.
  const double big = log_power_sum(10.0, 1000);
  CHECK(big == doctest::Approx(1000 * std::log(10.0) + std::log(10.0 / 9.0)).epsilon(1e-14));
  CHECK_THROWS_AS(log_power_sum(-1.0, 3), Error);
}

TEST_CASE("scalar generalized determinant") {
  // omega = 1: S = sqrt(n + 1).
  for (int n = 1; n <= 64; ++n) CHECK(scalar_gen_det(1.0, n) == doctest::Approx(0.5 * std::log(n + 1.0)).epsilon(1e-14));
  // omega = 0.5, n = 2: S^2 = 1 + 1/4 + 1/16.
  CHECK(std::exp(scalar_gen_det(0.5, 2)) == doctest::Approx(std::sqrt(1.3125)));
  // Against the numeric product of singular values.
  for (double r : {0.3, 0.9, 1.0, 1.4}) {
    const ComplexMatrix m = oracle::delay_matrix(ComplexMatrix::Constant(1, 1, Complex(0.0, r)), 9);
    double log_s = 0.0;
    for (double s : oracle::singular_values(m)) log_s += std::log(s);
    CHECK(scalar_gen_det(Complex(0.0, r), 9) == doctest::Approx(log_s).epsilon(1e-12));
  }
}

TEST_CASE("Hermitian generalized determinant matches half log det of the Gram matrix") {
  oracle::Rng rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    const int m = rng.integer(1, 5), n = rng.integer(1, 16);
    std::vector<double> eigs;
    for (int k = 0; k < m; ++k) eigs.push_back(rng.uniform(-1.6, 1.6));
    if (trial % 3 == 0) eigs[0] = trial % 2 ? 1.0 : -1.0;  // planted unit singular value
    std::vector<double> sing;
    for (double e : eigs) sing.push_back(std::abs(e));
    const ComplexMatrix mm = oracle::delay_matrix(rng.hermitian_with(eigs), n);
    const double expected = 0.5 * oracle::log_abs_det(ComplexMatrix(mm * mm.adjoint()));
    const double ours = hermitian_gen_det(sing, n);
    CHECK(std::abs(ours - expected) <= 1e-9 * std::max(1.0, std::abs(expected)));
    CHECK(ours >= 0.0);
  }
  // sigma = {1, 1}, n = 3: S = 4.
  CHECK(std::exp(hermitian_gen_det(std::vector<double>{1.0, 1.0}, 3)) == doctest::Approx(4.0));
}
