#pragma once

// Linear recurrence h_{k+1} = W h_k + y_k + b, its delay-coordinate vectors
// and the block system M psi = phi + 1 (x) b that links them.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "delaylab/delaymat.hpp"
#include "delaylab/types.hpp"

namespace delaylab {

struct RecurrenceConfig {
  ComplexMatrix W;
  ComplexVector b;
  ComplexVector h0;

  int m() const { return static_cast<int>(W.rows()); }
};

/// inputs[k] = y_k for k < T; states[k] = h_k for k <= T.
struct Trace {
  std::vector<ComplexVector> inputs;
  std::vector<ComplexVector> states;

  int m() const { return states.empty() ? 0 : static_cast<int>(states.front().size()); }
  int length() const { return static_cast<int>(inputs.size()); }
};

/// phi = [y_{k-1}; ...; y_{k-n}] (length mn), psi = [h_k; ...; h_{k-n}]
/// (length m(n+1)).
struct DelayVectors {
  int n = 0;
  int m = 0;
  int k = 0;
  ComplexVector phi;
  ComplexVector psi;
};

Trace run_recurrence(const RecurrenceConfig& cfg, const std::vector<ComplexVector>& inputs);

/// Requires n <= k <= T; throws IndexOutOfRange otherwise.
DelayVectors assemble_delay_vectors(const Trace& trace, int k, int n);

/// The block vector 1 (x) b of n copies of b.
ComplexVector stacked_bias(const ComplexVector& b, int n);

/// ||M_signed psi - (phi + 1 (x) b)||_inf where M_signed carries -W.
double verify_delay_relation(const DelaySpec<Complex>& spec, const RecurrenceConfig& cfg, const DelayVectors& dv);

/// Minimum-norm solution of M_signed psi = phi + 1 (x) b.
ComplexVector reconstruct_min_norm(const DelaySpec<Complex>& spec, const ComplexVector& phi, const ComplexVector& b);

/// Solution of the same system with the free trailing block h_{k-n} fixed to
/// `anchor` (e.g. y_{k-n-1} + b when W = 0), by back substitution.
ComplexVector reconstruct_anchored(const DelaySpec<Complex>& spec, const ComplexVector& phi,
                                   const ComplexVector& b, const ComplexVector& anchor);

/// Norm of the component of x orthogonal to the row space of M_signed.
double row_space_residual(const DelaySpec<Complex>& spec, const ComplexVector& x);

enum class SignalKind { Sine, LinearSystem, WhiteNoise };

SignalKind parse_signal_kind(const std::string& name);

struct SignalParams {
  double freq = 0.05;            // base frequency (cycles/step); channel c uses freq * (c + 1)
  double amplitude = 1.0;
  double spectral_radius = 0.9;  // LinearSystem
  double noise_std = 1.0;        // WhiteNoise
};

/// Deterministic test signal of T vectors of length m.
std::vector<ComplexVector> generate_signal(SignalKind kind, int m, int T, std::uint64_t seed,
                                           const SignalParams& params = {});

/// CSV with columns step,channel,re_y,im_y,re_h,im_h; the y fields of the
/// final step (which has a state but no input) are left empty.
void write_trace_csv(const Trace& trace, std::ostream& out);
Trace read_trace_csv(std::istream& in);

}  // namespace delaylab
