#pragma once

// Closed-form spectra and determinants for Toeplitz tridiagonal matrices and
// for the scalar and Hermitian delay-matrix families.

#include <complex>
#include <span>
#include <vector>

#include "delaylab/types.hpp"

namespace delaylab {

/// n x n tridiagonal Toeplitz matrix: a on the diagonal, b above, c below.
struct ToeplitzTriSpec {
  Complex a{0.0, 0.0};
  Complex b{0.0, 0.0};
  Complex c{0.0, 0.0};
  int n = 1;
};

/// A complex number held as log-magnitude and phase, so that large
/// determinants do not overflow. log_abs = -inf encodes zero.
struct LogComplex {
  double log_abs = 0.0;
  double phase = 0.0;

  Complex value() const { return std::polar(std::exp(log_abs), phase); }
};

/// a + 2 sqrt(bc) cos(j pi/(n+1)) for j = 1..n, principal square root.
std::vector<Complex> toeplitz_tridiag_eigs(const ToeplitzTriSpec& t);

/// Determinant via the two-root closed form; switches to (n+1)(a/2)^n when
/// |a^2 - 4bc| <= 1e-12 (|a|^2 + 4|b||c|).
LogComplex toeplitz_tridiag_det(const ToeplitzTriSpec& t);

/// Singular values of the scalar delay matrix, descending.
std::vector<double> scalar_singular_values(Complex omega, int n);

/// Gram eigenvalues lambda_k^2 + 2 lambda_k cos(j pi/(n+1)) + 1 as an n x m
/// array (row j-1, column k) for Hermitian W with eigenvalues lambda_k.
RealMatrix hermitian_gram_eigs(std::span<const double> eigvals_w, int n);

/// log of sum_{k=0..n} x^k for x >= 0, evaluated without overflow.
double log_power_sum(double x, int n);

/// log S for the scalar delay matrix: 0.5 log sum_{k=0..n} |omega|^{2k}.
double scalar_gen_det(Complex omega, int n);

/// log S for Hermitian W given its singular values (|eigenvalues|).
double hermitian_gen_det(std::span<const double> sing_w, int n);

}  // namespace delaylab
