#include "delaylab/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "delaylab/bounds.hpp"
#include "delaylab/csv.hpp"
#include "delaylab/delaymat.hpp"
#include "delaylab/error.hpp"
#include "delaylab/experiments.hpp"
#include "delaylab/lrnn.hpp"
#include "delaylab/matcore.hpp"
#include "delaylab/spectra.hpp"

namespace delaylab::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

// Options shared by every subcommand that needs a delay spec.
struct SpecOptions {
  int n = 0;
  int m = 0;
  std::string w_path;
  bool scalar = false;
  std::string omega = "";
  std::string w_class = "auto";

  void attach(CLI::App* app) {
    app->add_option("--n", n, "number of lags")->required()->check(CLI::PositiveNumber);
    app->add_option("--m", m, "state dimension (checked against --w)")->check(CLI::PositiveNumber);
    app->add_option("--w", w_path, "weight matrix file (CSV: rows,cols header, re,im pairs)");
    app->add_flag("--scalar", scalar, "scalar weight given by --omega");
    app->add_option("--omega", omega, "scalar weight RE[+IMj]");
    app->add_option("--class", w_class, "declared class of W")
        ->check(CLI::IsMember({"auto", "scalar", "hermitian", "general", "unitary", "zero"}));
  }
};

WClass detect_class(const ComplexMatrix& w) {
  if (w.rows() == 1) return WClass::Scalar;
  const double scale = detail::max_abs(w);
  if (scale == 0.0) return WClass::Zero;
  if (detail::max_abs(w - w.adjoint()) <= 1e-12 * scale) return WClass::Hermitian;
  if (detail::max_abs(w * w.adjoint() - ComplexMatrix::Identity(w.rows(), w.cols())) <= 1e-10)
    return WClass::Unitary;
  return WClass::General;
}

DelaySpec<Complex> make_cli_spec(const SpecOptions& o) {
  if (o.scalar == !o.w_path.empty()) throw UsageError("give exactly one of --scalar (with --omega) or --w FILE");
  if (o.scalar && o.omega.empty()) throw UsageError("--scalar needs --omega");
  if (!o.scalar && !o.omega.empty()) throw UsageError("--omega needs --scalar");
  ComplexMatrix w = o.scalar ? ComplexMatrix::Constant(1, 1, parse_complex(o.omega)) : csv::load_matrix(o.w_path);
  if (o.m > 0 && o.m != w.rows())
    throw Error(ErrorCode::DimensionMismatch, "--m " + std::to_string(o.m) + " but W has " +
                                                  std::to_string(w.rows()) + " rows");
  WClass cls = WClass::General;
  if (o.w_class == "auto") cls = detect_class(w);
  else if (o.w_class == "scalar") cls = WClass::Scalar;
  else if (o.w_class == "hermitian") cls = WClass::Hermitian;
  else if (o.w_class == "unitary") cls = WClass::Unitary;
  else if (o.w_class == "zero") cls = WClass::Zero;
  DelaySpec<Complex> spec = make_spec(w, o.n, cls);
  validate(spec);
  return spec;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, std::uint64_t fallback = 0) {
  if (flag) return *flag;
  if (const char* env = std::getenv("DELAYLAB_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw UsageError(std::string("DELAYLAB_SEED is not an unsigned integer: '") + env + "'");
  }
  return fallback;
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") out << text;
  else csv::write_atomic(path, text);
}

// Closed-form singular values of M where the class has one, descending.
std::optional<std::vector<double>> closed_form_singular_values(const DelaySpec<Complex>& spec) {
  if (spec.w_class == WClass::Scalar) return scalar_singular_values(spec.W(0, 0), spec.n);
  if (spec.w_class == WClass::Hermitian || spec.w_class == WClass::Zero) {
    const auto f = hermitian_factorization(spec);
    std::vector<double> sv;
    for (Eigen::Index i = 0; i < f.block_eigs.size(); ++i) sv.push_back(std::sqrt(std::max(0.0, f.block_eigs(i))));
    std::sort(sv.begin(), sv.end(), std::greater<>());
    return sv;
  }
  return std::nullopt;
}

double max_rel_deviation(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  const double scale = std::max(a.empty() ? 0.0 : a.front(), 1e-300);
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
  return worst;
}

void print_summary(std::ostream& out, const std::string& prefix, const SpectralSummary& s) {
  out << prefix << "sigma_max " << num(s.sigma_max) << '\n'
      << prefix << "sigma_min " << num(s.sigma_min) << '\n'
      << prefix << "kappa " << num(s.kappa) << '\n'
      << prefix << "log_gen_det " << num(s.full_rank() ? s.gen_det_log : -kInfinity) << '\n'
      << prefix << "rank " << s.rank_numeric << " of " << s.singular_values.size() << '\n';
}

void print_bound_report(std::ostream& out, const BoundReport& r) {
  out << "kappa_bound " << num(r.kappa_bound) << " (" << to_string(r.kappa_regime) << ")\n"
      << "log_det_bound " << num(r.det_bound_log) << " (" << to_string(r.det_regime) << ")\n"
      << "embedding weak " << r.embedding.weak_ok << " case1 " << r.embedding.case1_ok << " case2 "
      << r.embedding.case2_ok << " guaranteed " << r.embedding.guaranteed << " margin " << num(r.embedding.margin)
      << '\n';
}

// ---- build -----------------------------------------------------------------

int cmd_build(const SpecOptions& so, const std::string& what, bool signed_w, const std::string& out_path,
              std::ostream& out) {
  const auto spec = make_cli_spec(so);
  if (what == "gram" && signed_w) throw UsageError("--signed applies to the delay matrix only");
  const ComplexMatrix a =
      what == "gram" ? build_gram(spec) : build_delay_matrix(spec, signed_w ? WeightSign::Minus : WeightSign::Plus);
  std::ostringstream ss;
  csv::write_matrix(a, ss);
  emit(out_path, ss.str(), out);
  return kOk;
}

// ---- spectrum --------------------------------------------------------------

int cmd_spectrum(const SpecOptions& so, const std::string& matrix_path, std::ostream& out) {
  if (!matrix_path.empty()) {
    if (so.scalar || !so.w_path.empty()) throw UsageError("--matrix cannot be combined with a spec");
    const ComplexMatrix a = csv::load_matrix(matrix_path);
    const auto s = spectral_summary(a);
    out << "j oracle\n";
    for (std::size_t j = 0; j < s.singular_values.size(); ++j) out << j + 1 << ' ' << num(s.singular_values[j]) << '\n';
    print_summary(out, "", s);
    return kOk;
  }
  const auto spec = make_cli_spec(so);
  const auto oracle = spectral_summary(build_delay_matrix(spec));
  const auto closed = closed_form_singular_values(spec);
  out << "class " << to_string(spec.w_class) << " n " << spec.n << " m " << spec.m << '\n';
  out << (closed ? "j closed_form oracle\n" : "j oracle\n");
  for (std::size_t j = 0; j < oracle.singular_values.size(); ++j) {
    out << j + 1 << ' ';
    if (closed) out << num((*closed)[j]) << ' ';
    out << num(oracle.singular_values[j]) << '\n';
  }
  print_summary(out, "oracle ", oracle);
  if (!closed) return kOk;
  const double dev = max_rel_deviation(*closed, oracle.singular_values);
  out << "max_rel_deviation " << num(dev) << '\n';
  const double closed_det = spec.w_class == WClass::Scalar ? scalar_gen_det(spec.W(0, 0), spec.n)
                                                           : hermitian_gen_det(singular_values(spec.W), spec.n);
  out << "closed_form log_gen_det " << num(closed_det) << '\n';
  const bool ok = dev <= 1e-9;
  out << (ok ? "match" : "MISMATCH") << '\n';
  return ok ? kOk : kValidationFailure;
}

// ---- bounds ----------------------------------------------------------------

int cmd_bounds(const SpecOptions& so, std::optional<double> smin, std::optional<double> smax, std::ostream& out) {
  if (smin || smax) {
    if (!smin || !smax) throw UsageError("--sigma-min and --sigma-max go together");
    if (so.scalar || !so.w_path.empty()) throw UsageError("give either a spec or --sigma-min/--sigma-max");
    const auto v = embedding_condition(*smin, *smax);
    out << "embedding weak " << v.weak_ok << " case1 " << v.case1_ok << " case2 " << v.case2_ok << " guaranteed "
        << v.guaranteed << " margin " << num(v.margin) << '\n';
    out << "sigma_max_bound " << num(general_smax_bound(*smax)) << '\n';
    if (*smax < 0.5) out << "kappa_bound " << num(general_cond_bound(*smin, *smax)) << " (general_half)\n";
    else out << "kappa_bound inf (not_applicable)\n";
    out << (v.guaranteed ? "embedding guaranteed" : "embedding not guaranteed") << '\n';
    return kOk;
  }
  const auto spec = make_cli_spec(so);
  const auto report = bound_report(spec);
  const auto s = spectral_summary(build_delay_matrix(spec));
  out << "class " << to_string(spec.w_class) << " n " << spec.n << " m " << spec.m << '\n';
  print_bound_report(out, report);
  out << "sigma_max_bound " << num(general_smax_bound(singular_values(spec.W).front())) << '\n';
  print_summary(out, "measured ", s);
  return kOk;
}

// ---- verify ----------------------------------------------------------------

struct Checker {
  std::ostream& out;
  int failures = 0;

  void check(const std::string& name, bool ok, const std::string& detail) {
    out << (ok ? "PASS " : "FAIL ") << name << ": " << detail << '\n';
    if (!ok) ++failures;
  }
  void skip(const std::string& name, const std::string& why) { out << "SKIP " << name << ": " << why << '\n'; }
};

int cmd_verify(const SpecOptions& so, std::uint64_t seed, std::ostream& out) {
  const auto spec = make_cli_spec(so);
  Checker c{out};
  const ComplexMatrix m = build_delay_matrix(spec);
  const auto s = spectral_summary(m);
  const auto sw = singular_values(spec.W);
  const double tol_abs = 1e-12 * std::max(1.0, s.sigma_max * s.sigma_max);

  {
    const double dev = detail::max_abs(build_gram(spec) - m * m.adjoint());
    c.check("gram", dev <= tol_abs, "max|A - M M*| = " + num(dev));
  }
  {
    const auto signed_sv = singular_values(build_delay_matrix(spec, WeightSign::Minus));
    const double dev = max_rel_deviation(s.singular_values, signed_sv);
    c.check("sign_invariance", dev <= 1e-12, "max rel deviation = " + num(dev));
  }
  c.check("sigma_max_bound", s.sigma_max <= general_smax_bound(sw.front()) + 1e-10,
          num(s.sigma_max) + " <= " + num(general_smax_bound(sw.front())));

  if (const auto closed = closed_form_singular_values(spec)) {
    const double dev = max_rel_deviation(*closed, s.singular_values);
    c.check("closed_form", dev <= 1e-9, "max rel deviation = " + num(dev));
  } else {
    c.skip("closed_form", "no closed form for class " + std::string(to_string(spec.w_class)));
  }

  const auto report = bound_report(spec);
  const bool herm_multi = spec.w_class == WClass::Hermitian && spec.m > 1;
  if (report.kappa_regime == KappaRegime::NotApplicable) {
    c.skip("kappa_bound", "no bound for this class and sigma_max");
  } else if (herm_multi && report.kappa_regime == KappaRegime::AtUnit) {
    c.skip("kappa_bound", "unit-singular-value branch is not a valid bound for m > 1");
  } else {
    c.check("kappa_bound", s.kappa <= report.kappa_bound * (1.0 + 1e-9),
            num(s.kappa) + " <= " + num(report.kappa_bound));
  }
  if (report.det_regime == DetRegime::NotApplicable) {
    c.skip("det_bound", "no bound for this class");
  } else if (spec.w_class != WClass::Scalar && report.det_regime == DetRegime::Super1) {
    c.skip("det_bound", "super-unit branch is not a valid bound");
  } else {
    c.check("det_bound", s.gen_det_log <= report.det_bound_log + 1e-9 * std::max(1.0, std::abs(report.det_bound_log)),
            num(s.gen_det_log) + " <= " + num(report.det_bound_log));
  }
  if (report.embedding.guaranteed) c.check("embedding", s.sigma_min >= 1e-8, "sigma_min(M) = " + num(s.sigma_min));
  else c.skip("embedding", "no sufficient condition holds");

  {
    const auto lag = lag_monotonicity_check(spec.W, spec.n, 2 * spec.n);
    c.check("lag_monotonicity", lag.all(),
            "n " + std::to_string(spec.n) + " -> " + std::to_string(2 * spec.n) + ": kappa " + num(lag.first.kappa) +
                " -> " + num(lag.second.kappa));
  }

  if (spec.w_class == WClass::Hermitian || spec.w_class == WClass::Zero || spec.w_class == WClass::Scalar) {
    if (spec.w_class == WClass::Scalar && spec.W(0, 0).imag() != 0.0) {
      c.skip("fast_pinv", "complex scalar weight is not Hermitian");
    } else if (!s.full_rank()) {
      c.skip("fast_pinv", "delay matrix is rank deficient");
    } else {
      const auto f = hermitian_factorization(spec);
      const auto rhs = generate_signal(SignalKind::WhiteNoise, spec.m * spec.n, 1, seed).front();
      const ComplexVector fast = apply_fast_pinv(f, rhs);
      const ComplexVector dense = pseudo_inverse(m) * rhs;
      const double dev = (fast - dense).norm() / std::max(dense.norm(), 1e-300);
      c.check("fast_pinv", dev <= 1e-8, "relative deviation = " + num(dev));
    }
  }

  if (s.full_rank()) {
    RecurrenceConfig cfg{spec.W, ComplexVector::Constant(spec.m, Complex(0.25, -0.5)),
                         ComplexVector::Zero(spec.m)};
    const int T = spec.n + 8;
    const Trace trace = run_recurrence(cfg, generate_signal(SignalKind::WhiteNoise, spec.m, T, seed));
    double worst_rel = 0.0, worst_gap = 0.0;
    for (int k = spec.n; k <= T; ++k) {
      const auto dv = assemble_delay_vectors(trace, k, spec.n);
      const double res = verify_delay_relation(spec, cfg, dv);
      worst_rel = std::max(worst_rel, res / std::max(1.0, dv.psi.cwiseAbs().maxCoeff()));
      const ComplexMatrix ms = build_delay_matrix(spec, WeightSign::Minus);
      const ComplexVector proj = pseudo_inverse(ms) * (ms * dv.psi);
      worst_gap = std::max(worst_gap, (reconstruct_min_norm(spec, dv.phi, cfg.b) - proj).norm());
    }
    c.check("delay_relation", worst_rel <= 1e-10, "max scaled residual = " + num(worst_rel));
    c.check("reconstruction", worst_gap <= 1e-9, "max row-space gap = " + num(worst_gap));
  } else {
    c.skip("delay_relation", "delay matrix is rank deficient");
  }

  out << (c.failures == 0 ? "all checks passed" : std::to_string(c.failures) + " check(s) failed") << '\n';
  return c.failures == 0 ? kOk : kValidationFailure;
}

// ---- simulate --------------------------------------------------------------

struct SimulateOptions {
  std::string signal = "white-noise";
  int T = 64;
  std::string bias = "0";
  std::string input_path;
  std::string trace_out;
  double freq = SignalParams{}.freq;
  double spectral_radius = SignalParams{}.spectral_radius;
};

int cmd_simulate(const SpecOptions& so, const SimulateOptions& o, std::uint64_t seed, std::ostream& out) {
  const auto spec = make_cli_spec(so);
  RecurrenceConfig cfg{spec.W, ComplexVector::Constant(spec.m, parse_complex(o.bias)), ComplexVector::Zero(spec.m)};
  Trace trace;
  if (!o.input_path.empty()) {
    std::istringstream in(csv::read_file(o.input_path));
    const Trace imported = read_trace_csv(in);
    if (imported.m() != spec.m) throw Error(ErrorCode::DimensionMismatch, "trace has m = " + std::to_string(imported.m()));
    cfg.h0 = imported.states.front();
    trace = run_recurrence(cfg, imported.inputs);
    double drift = 0.0;
    for (std::size_t k = 0; k < trace.states.size(); ++k)
      drift = std::max(drift, (trace.states[k] - imported.states[k]).cwiseAbs().maxCoeff());
    out << "imported_state_deviation " << num(drift) << '\n';
  } else {
    if (o.T < 1) throw UsageError("--T must be >= 1");
    SignalParams params;
    params.freq = o.freq;
    params.spectral_radius = o.spectral_radius;
    trace = run_recurrence(cfg, generate_signal(parse_signal_kind(o.signal), spec.m, o.T, seed, params));
  }
  if (trace.length() < spec.n) throw UsageError("trace length must be at least n");
  if (!o.trace_out.empty()) {
    std::ostringstream ss;
    write_trace_csv(trace, ss);
    csv::write_atomic(o.trace_out, ss.str());
  }

  const ComplexMatrix ms = build_delay_matrix(spec, WeightSign::Minus);
  const ComplexMatrix pinv = pseudo_inverse(ms);
  double residual = 0.0, gap = 0.0, null_gap = 0.0;
  for (int k = spec.n; k <= trace.length(); ++k) {
    const auto dv = assemble_delay_vectors(trace, k, spec.n);
    residual = std::max(residual, verify_delay_relation(spec, cfg, dv) / std::max(1.0, dv.psi.cwiseAbs().maxCoeff()));
    const ComplexVector psi_hat = pinv * (dv.phi + stacked_bias(cfg.b, spec.n));
    gap = std::max(gap, (psi_hat - pinv * (ms * dv.psi)).norm());
    null_gap = std::max(null_gap, (psi_hat - dv.psi).norm());
  }
  out << "steps " << trace.length() << " windows " << trace.length() - spec.n + 1 << '\n'
      << "max_delay_residual " << num(residual) << '\n'
      << "max_reconstruction_gap " << num(gap) << '\n'
      << "max_null_space_gap " << num(null_gap) << '\n';
  const bool ok = residual <= 1e-10 && gap <= 1e-9;
  out << (ok ? "ok" : "FAILED") << '\n';
  return ok ? kOk : kValidationFailure;
}

// ---- sweep -----------------------------------------------------------------

struct SweepOptions {
  std::string experiment;
  std::optional<std::uint64_t> seed;
  std::string out_path;
  std::string config_path;
  std::optional<int> threads;
  std::optional<int> samples;
  bool quiet = false;
};

int cmd_sweep(const SweepOptions& o, std::ostream& out, std::ostream& err) {
  nlohmann::json file = nlohmann::json::object();
  if (!o.config_path.empty()) {
    try {
      file = nlohmann::json::parse(csv::read_file(o.config_path));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::InvalidParams, o.config_path + " is not valid JSON: " + e.what());
    }
    if (!file.is_object()) throw Error(ErrorCode::InvalidParams, "config must be a JSON object");
  }
  std::string name = o.experiment;
  if (name.empty() && file.contains("experiment") && file.at("experiment").is_string())
    name = file.at("experiment").get<std::string>();
  if (name.empty()) throw UsageError("sweep needs --experiment or an experiment in --config");
  file.erase("experiment");

  // Experiment defaults, then the file, then explicit flags.
  SweepConfig cfg = default_sweep_config(parse_experiment(name));
  update_from_json(cfg, file.dump());
  std::optional<std::uint64_t> file_seed;
  if (file.contains("seed")) file_seed = cfg.seed;
  cfg.seed = o.seed ? *o.seed : (file_seed ? *file_seed : resolve_seed(std::nullopt));
  if (!o.out_path.empty()) cfg.out_path = o.out_path;
  if (o.threads) cfg.threads = *o.threads;
  if (o.samples) cfg.samples_per_cell = *o.samples;
  if (cfg.out_path.empty()) throw UsageError("sweep needs --out (or out_path in the config)");

  ProgressFn progress;
  if (!o.quiet)
    progress = [&err](std::size_t done, std::size_t total) {
      if (done == total || done % 64 == 0) err << "\r[" << done << '/' << total << "]" << (done == total ? "\n" : "") << std::flush;
    };
  const SweepResult result = run_sweep(cfg, progress);
  write_sweep_outputs(cfg, result);
  out << "wrote " << result.records.size() << " records over " << result.aggregates.size() << " cells to "
      << cfg.out_path << '\n';
  return kOk;
}

}  // namespace

Complex parse_complex(const std::string& text) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  if (s.empty()) throw Error(ErrorCode::InvalidParams, "empty complex number");
  // from_chars rejects a leading '+'.
  auto part = [](const std::string& p) { return csv::parse_double(p.starts_with('+') ? p.substr(1) : p); };
  try {
    if (s.back() != 'j' && s.back() != 'i') return {part(s), 0.0};
    s.pop_back();
    // Split at the last sign that is not a leading sign or part of an exponent.
    std::size_t split = std::string::npos;
    for (std::size_t i = s.size(); i-- > 1;)
      if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
        split = i;
        break;
      }
    if (split == std::string::npos) return {0.0, part(s)};
    return {part(s.substr(0, split)), part(s.substr(split))};
  } catch (const Error&) {
    throw Error(ErrorCode::InvalidParams, "not a complex number (RE[+IMj]): '" + text + "'");
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Delay-matrix analysis for linear recurrent networks"};
  app.name("delaylab");
  app.require_subcommand(1);

  SpecOptions build_spec, spectrum_spec, bounds_spec, verify_spec, simulate_spec;
  std::string build_what = "delay", build_out, spectrum_matrix;
  bool build_signed = false;
  std::optional<double> smin, smax;
  std::optional<std::uint64_t> verify_seed, simulate_seed;
  SimulateOptions sim;
  SweepOptions sweep;
  int region_resolution = 201;
  std::string region_out;

  auto* build = app.add_subcommand("build", "emit the delay matrix or its Gram matrix as CSV");
  build_spec.attach(build);
  build->add_option("--what", build_what, "delay or gram")->check(CLI::IsMember({"delay", "gram"}));
  build->add_flag("--signed", build_signed, "use -W on the super-diagonal (recurrence convention)");
  build->add_option("--out", build_out, "output file (default stdout)");

  auto* spectrum = app.add_subcommand("spectrum", "closed-form and oracle singular values side by side");
  spectrum_spec.attach(spectrum);
  spectrum->get_option("--n")->required(false);
  spectrum->add_option("--matrix", spectrum_matrix, "summarize an arbitrary matrix file instead of a spec");

  auto* bounds = app.add_subcommand("bounds", "bound report for a spec or a singular value range");
  bounds_spec.attach(bounds);
  bounds->get_option("--n")->required(false);
  bounds->add_option("--sigma-min", smin, "smallest singular value of W")->check(CLI::NonNegativeNumber);
  bounds->add_option("--sigma-max", smax, "largest singular value of W")->check(CLI::NonNegativeNumber);

  auto* verify = app.add_subcommand("verify", "run the property checks on a spec");
  verify_spec.attach(verify);
  verify->add_option("--seed", verify_seed, "seed for the random right-hand sides and signals");

  auto* simulate = app.add_subcommand("simulate", "run the recurrence and check the delay relation");
  simulate_spec.attach(simulate);
  simulate->add_option("--signal", sim.signal, "sine, linear-system or white-noise")
      ->check(CLI::IsMember({"sine", "linear-system", "white-noise"}));
  simulate->add_option("--T", sim.T, "number of input steps");
  simulate->add_option("--b", sim.bias, "bias value for every channel, RE[+IMj]");
  simulate->add_option("--freq", sim.freq, "sine base frequency");
  simulate->add_option("--spectral-radius", sim.spectral_radius, "linear-system spectral radius");
  simulate->add_option("--input", sim.input_path, "trace CSV to replay (inputs and h0)");
  simulate->add_option("--trace-out", sim.trace_out, "write the trace CSV here");
  simulate->add_option("--seed", simulate_seed, "signal seed");

  auto* sweep_cmd = app.add_subcommand("sweep", "run a named experiment and write CSV + JSON metadata");
  sweep_cmd->add_option("--experiment", sweep.experiment, "experiment name")
      ->check(CLI::IsMember({"scalar-cond", "scalar-det", "herm-grid", "region", "general-cond", "general-det",
                             "lag-growth", "wclass-spectra"}));
  sweep_cmd->add_option("--seed", sweep.seed, "master seed (fallback: DELAYLAB_SEED, then 0)");
  sweep_cmd->add_option("--out", sweep.out_path, "output CSV path");
  sweep_cmd->add_option("--config", sweep.config_path, "JSON file with SweepConfig fields");
  sweep_cmd->add_option("--threads", sweep.threads, "worker cap (default: machine parallelism)")
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--samples", sweep.samples, "samples per cell")->check(CLI::PositiveNumber);
  sweep_cmd->add_flag("--quiet", sweep.quiet, "no progress counter");

  auto* region = app.add_subcommand("region", "admissible-region boundary curves as CSV");
  region->add_option("--resolution", region_resolution, "number of sigma_min samples on [0, 2]");
  region->add_option("--out", region_out, "output file (default stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (*build) return cmd_build(build_spec, build_what, build_signed, build_out, out);
    if (*spectrum) {
      if (spectrum_matrix.empty() && spectrum_spec.n < 1) throw UsageError("--n is required");
      return cmd_spectrum(spectrum_spec, spectrum_matrix, out);
    }
    if (*bounds) {
      if (!smin && !smax && bounds_spec.n < 1) throw UsageError("--n is required");
      return cmd_bounds(bounds_spec, smin, smax, out);
    }
    if (*verify) return cmd_verify(verify_spec, resolve_seed(verify_seed), out);
    if (*simulate) return cmd_simulate(simulate_spec, sim, resolve_seed(simulate_seed), out);
    if (*sweep_cmd) return cmd_sweep(sweep, out, err);
    if (*region) {
      emit(region_out, format_region_csv(region_curves(region_resolution)), out);
      return kOk;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::InvalidParams ? kUsageError : kValidationFailure;
  }
  return kUsageError;
}

}  // namespace delaylab::cli
