#include "delaylab/lrnn.hpp"

#include <cmath>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>

#include "delaylab/csv.hpp"
#include "delaylab/error.hpp"
#include "delaylab/matcore.hpp"

namespace delaylab {

namespace {

void require_dims(const RecurrenceConfig& cfg) {
  const auto m = cfg.W.rows();
  if (m < 1 || cfg.W.cols() != m || cfg.b.size() != m || cfg.h0.size() != m)
    throw Error(ErrorCode::DimensionMismatch, "W, b and h0 must share dimension m");
}

}  // namespace

Trace run_recurrence(const RecurrenceConfig& cfg, const std::vector<ComplexVector>& inputs) {
  require_dims(cfg);
  Trace trace;
  trace.inputs = inputs;
  trace.states.reserve(inputs.size() + 1);
  trace.states.push_back(cfg.h0);
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    if (inputs[k].size() != cfg.W.rows())
      throw Error(ErrorCode::DimensionMismatch, "input " + std::to_string(k) + " has wrong length");
    ComplexVector next = cfg.W * trace.states.back();
    next += inputs[k];
    next += cfg.b;
    trace.states.push_back(std::move(next));
  }
  return trace;
}

DelayVectors assemble_delay_vectors(const Trace& trace, int k, int n) {
  if (n < 1) throw Error(ErrorCode::InvalidParams, "n must be positive");
  if (k < n || k > trace.length())
    throw Error(ErrorCode::IndexOutOfRange, "need n <= k <= T, got k = " + std::to_string(k) +
                                                ", n = " + std::to_string(n) + ", T = " + std::to_string(trace.length()));
  const int m = trace.m();
  DelayVectors dv;
  dv.n = n;
  dv.m = m;
  dv.k = k;
  dv.phi.resize(m * n);
  dv.psi.resize(m * (n + 1));
  for (int l = 0; l < n; ++l) dv.phi.segment(l * m, m) = trace.inputs[static_cast<std::size_t>(k - l - 1)];
  for (int l = 0; l <= n; ++l) dv.psi.segment(l * m, m) = trace.states[static_cast<std::size_t>(k - l)];
  return dv;
}

ComplexVector stacked_bias(const ComplexVector& b, int n) { return b.replicate(n, 1); }

double verify_delay_relation(const DelaySpec<Complex>& spec, const RecurrenceConfig& cfg, const DelayVectors& dv) {
  require_dims(cfg);
  if (cfg.W.rows() != spec.m || dv.m != spec.m || dv.n != spec.n || dv.psi.size() != spec.m * (spec.n + 1) ||
      dv.phi.size() != spec.m * spec.n)
    throw Error(ErrorCode::DimensionMismatch, "spec, config and delay vectors disagree");
  const ComplexMatrix M = build_delay_matrix(spec, WeightSign::Minus);
  return (M * dv.psi - dv.phi - stacked_bias(cfg.b, spec.n)).cwiseAbs().maxCoeff();
}

ComplexVector reconstruct_min_norm(const DelaySpec<Complex>& spec, const ComplexVector& phi, const ComplexVector& b) {
  if (phi.size() != spec.m * spec.n || b.size() != spec.m)
    throw Error(ErrorCode::DimensionMismatch, "phi must have length mn and b length m");
  const ComplexMatrix M = build_delay_matrix(spec, WeightSign::Minus);
  return pseudo_inverse(M) * (phi + stacked_bias(b, spec.n));
}

ComplexVector reconstruct_anchored(const DelaySpec<Complex>& spec, const ComplexVector& phi,
                                   const ComplexVector& b, const ComplexVector& anchor) {
  validate(spec);
  const int n = spec.n, m = spec.m;
  if (phi.size() != m * n || b.size() != m || anchor.size() != m)
    throw Error(ErrorCode::DimensionMismatch, "phi must have length mn, b and anchor length m");
  ComplexVector psi(m * (n + 1));
  psi.segment(n * m, m) = anchor;
  // Block row l reads h_{k-l} - W h_{k-l-1} = y_{k-l-1} + b.
  for (int l = n - 1; l >= 0; --l)
    psi.segment(l * m, m) = phi.segment(l * m, m) + b + spec.W * psi.segment((l + 1) * m, m);
  return psi;
}

double row_space_residual(const DelaySpec<Complex>& spec, const ComplexVector& x) {
  const ComplexMatrix M = build_delay_matrix(spec, WeightSign::Minus);
  if (x.size() != M.cols()) throw Error(ErrorCode::DimensionMismatch, "vector length must be m(n+1)");
  const ComplexVector projected = pseudo_inverse(M) * (M * x);
  return (x - projected).norm();
}

SignalKind parse_signal_kind(const std::string& name) {
  if (name == "sine") return SignalKind::Sine;
  if (name == "linear-system" || name == "linear") return SignalKind::LinearSystem;
  if (name == "white-noise" || name == "noise") return SignalKind::WhiteNoise;
  throw Error(ErrorCode::InvalidParams, "unknown signal kind '" + name + "'");
}

std::vector<ComplexVector> generate_signal(SignalKind kind, int m, int T, std::uint64_t seed,
                                           const SignalParams& params) {
  if (m < 1 || T < 1) throw Error(ErrorCode::InvalidParams, "signal needs m >= 1 and T >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<ComplexVector> out(static_cast<std::size_t>(T), ComplexVector::Zero(m));

  switch (kind) {
    case SignalKind::Sine: {
      if (!std::isfinite(params.freq) || !std::isfinite(params.amplitude))
        throw Error(ErrorCode::InvalidParams, "sine needs finite freq and amplitude");
      std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * std::numbers::pi);
      std::vector<double> phase(static_cast<std::size_t>(m));
      for (auto& p : phase) p = phase_dist(rng);
      for (int k = 0; k < T; ++k)
        for (int c = 0; c < m; ++c)
          out[static_cast<std::size_t>(k)](c) =
              params.amplitude * std::sin(2.0 * std::numbers::pi * params.freq * (c + 1) * k + phase[static_cast<std::size_t>(c)]);
      break;
    }
    case SignalKind::LinearSystem: {
      if (!(params.spectral_radius >= 0.0 && params.spectral_radius < 1.0))
        throw Error(ErrorCode::InvalidParams, "linear system needs spectral radius in [0, 1)");
      RealMatrix a(m, m);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) a(i, j) = normal(rng);
      const double rho = Eigen::EigenSolver<RealMatrix>(a, false).eigenvalues().cwiseAbs().maxCoeff();
      if (rho > 0.0) a *= params.spectral_radius / rho;
      RealVector x(m);
      for (int i = 0; i < m; ++i) x(i) = normal(rng);
      for (int k = 0; k < T; ++k) {
        out[static_cast<std::size_t>(k)] = x.cast<Complex>();
        x = a * x;
      }
      break;
    }
    case SignalKind::WhiteNoise: {
      if (!(params.noise_std >= 0.0)) throw Error(ErrorCode::InvalidParams, "noise_std must be >= 0");
      for (int k = 0; k < T; ++k)
        for (int c = 0; c < m; ++c) out[static_cast<std::size_t>(k)](c) = params.noise_std * normal(rng);
      break;
    }
  }
  return out;
}

void write_trace_csv(const Trace& trace, std::ostream& out) {
  out << "step,channel,re_y,im_y,re_h,im_h\n";
  const int T = trace.length();
  for (int k = 0; k <= T; ++k) {
    const ComplexVector& h = trace.states[static_cast<std::size_t>(k)];
    for (int c = 0; c < trace.m(); ++c) {
      out << k << ',' << c << ',';
      if (k < T) {
        const Complex y = trace.inputs[static_cast<std::size_t>(k)](c);
        out << csv::format_double(y.real()) << ',' << csv::format_double(y.imag());
      } else {
        out << ',';
      }
      out << ',' << csv::format_double(h(c).real()) << ',' << csv::format_double(h(c).imag()) << '\n';
    }
  }
}

Trace read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || csv::trim(line) != "step,channel,re_y,im_y,re_h,im_h")
    throw Error(ErrorCode::IoError, "trace CSV header must be step,channel,re_y,im_y,re_h,im_h");

  struct Row {
    bool has_y = false;
    Complex y, h;
  };
  std::map<int, std::map<int, Row>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    const auto fields = csv::split(line);
    if (fields.size() != 6) throw Error(ErrorCode::IoError, "line " + std::to_string(line_no) + ": expected 6 fields");
    Row r;
    const int step = static_cast<int>(csv::parse_long(fields[0]));
    const int channel = static_cast<int>(csv::parse_long(fields[1]));
    r.has_y = !fields[2].empty();
    if (r.has_y) r.y = Complex(csv::parse_double(fields[2]), csv::parse_double(fields[3]));
    r.h = Complex(csv::parse_double(fields[4]), csv::parse_double(fields[5]));
    rows[step][channel] = r;
  }
  if (rows.empty()) throw Error(ErrorCode::IoError, "trace CSV has no rows");

  const int steps = static_cast<int>(rows.size());
  const int m = static_cast<int>(rows.begin()->second.size());
  Trace trace;
  int expected = 0;
  for (const auto& [step, channels] : rows) {
    if (step != expected++ || static_cast<int>(channels.size()) != m)
      throw Error(ErrorCode::IoError, "trace CSV steps must be contiguous from 0 with m channels each");
    ComplexVector h(m), y(m);
    bool has_y = true;
    for (int c = 0; c < m; ++c) {
      const auto it = channels.find(c);
      if (it == channels.end()) throw Error(ErrorCode::IoError, "missing channel " + std::to_string(c));
      h(c) = it->second.h;
      y(c) = it->second.y;
      has_y = has_y && it->second.has_y;
    }
    trace.states.push_back(h);
    if (step + 1 < steps) {
      if (!has_y) throw Error(ErrorCode::IoError, "missing input at step " + std::to_string(step));
      trace.inputs.push_back(y);
    }
  }
  return trace;
}

}  // namespace delaylab
