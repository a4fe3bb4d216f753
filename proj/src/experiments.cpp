#include "delaylab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include <Eigen/QR>
#include <json.hpp>

#include "delaylab/csv.hpp"
#include "delaylab/error.hpp"

#ifndef DELAYLAB_VERSION
#define DELAYLAB_VERSION "0.0.0"
#endif

namespace delaylab {

const char* const kVersion = DELAYLAB_VERSION;

namespace {

struct ExperimentName {
  Experiment e;
  const char* name;
};

constexpr ExperimentName kExperimentNames[] = {
    {Experiment::ScalarCond, "scalar-cond"},   {Experiment::ScalarDet, "scalar-det"},
    {Experiment::HermGrid, "herm-grid"},       {Experiment::Region, "region"},
    {Experiment::GeneralCond, "general-cond"}, {Experiment::GeneralDet, "general-det"},
    {Experiment::LagGrowth, "lag-growth"},     {Experiment::WClassSpectra, "wclass-spectra"},
};

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    out[static_cast<std::size_t>(i)] = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
  return out;
}

std::vector<int> range(int lo, int hi) {
  std::vector<int> out;
  for (int i = lo; i <= hi; ++i) out.push_back(i);
  return out;
}

RealMatrix gaussian_matrix(int m, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  RealMatrix a(m, m);
  // Fill order fixed (row-major) so the draw sequence does not depend on storage.
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) a(i, j) = normal(rng);
  return a;
}

RealMatrix orthogonal_from(std::mt19937_64& rng, int m) {
  const Eigen::HouseholderQR<RealMatrix> qr(gaussian_matrix(m, rng));
  RealMatrix q = qr.householderQ();
  // Sign fix makes the distribution Haar.
  const RealMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < m; ++j)
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  return q;
}

/// A cell: coordinates plus the index that feeds seed derivation.
struct Cell {
  SweepRecord coords;
  std::uint64_t draw_index = 0;
  WeightClass weight_class = WeightClass::Gaussian;
};

constexpr double kLn10 = 2.302585092994045684;

double log10_or(double x) { return x > 0.0 ? std::log10(x) : -kInfinity; }

std::vector<Cell> build_cells(const SweepConfig& cfg) {
  const SweepGrids& g = cfg.grids;
  std::vector<Cell> cells;
  auto push = [&](int m, int n, const char* p1n, double p1, const char* p2n, double p2) -> Cell& {
    Cell c;
    c.coords.experiment = cfg.experiment;
    c.coords.m = m;
    c.coords.n = n;
    c.coords.param1_name = p1n;
    c.coords.param1 = p1;
    c.coords.param2_name = p2n;
    c.coords.param2 = p2;
    c.draw_index = cells.size();
    cells.push_back(std::move(c));
    return cells.back();
  };

  switch (cfg.experiment) {
    case Experiment::ScalarCond:
    case Experiment::ScalarDet:
      for (int n : g.n)
        for (double w : g.omega) push(1, n, "omega", w, "", 0.0);
      break;
    case Experiment::HermGrid:
      for (int n : g.n)
        for (double l1 : g.lambda)
          for (double l2 : g.lambda) push(2, n, "lambda1", l1, "lambda2", l2);
      break;
    case Experiment::Region:
      for (int m : g.m)
        for (int n : g.n)
          for (double smin : g.sigma_min)
            for (double smax : g.sigma_max)
              if (smin <= smax) push(m, n, "sigma_min", smin, "sigma_max", smax);
      break;
    case Experiment::GeneralCond:
    case Experiment::GeneralDet:
      for (int m : g.m)
        for (int n : g.n)
          for (double s : g.sigma_max) push(m, n, "sigma_max", s, "", 0.0);
      break;
    case Experiment::LagGrowth: {
      // The same W (per m, sigma_max and sample) is reused along the lag axis.
      const std::size_t ns = g.sigma_max.size();
      for (std::size_t mi = 0; mi < g.m.size(); ++mi)
        for (int n : g.n)
          for (std::size_t si = 0; si < ns; ++si)
            push(g.m[mi], n, "sigma_max", g.sigma_max[si], "", 0.0).draw_index = mi * ns + si;
      break;
    }
    case Experiment::WClassSpectra:
      for (int m : g.m)
        for (int n : g.n)
          for (WeightClass cls : g.classes) {
            const double id = static_cast<double>(cls);
            if (cls == WeightClass::Gaussian) {
              for (double s : g.sigma_max) push(m, n, "class", id, "sigma_max", s).weight_class = cls;
            } else {
              const double intrinsic = cls == WeightClass::Zero ? 0.0 : 1.0;
              push(m, n, "class", id, "sigma_max", intrinsic).weight_class = cls;
            }
          }
      break;
  }
  return cells;
}

template <typename Scalar>
void measure(const DelaySpec<Scalar>& spec, SweepRecord& rec) {
  rec.measured = spectral_summary(build_delay_matrix(spec));
  rec.bounds = bound_report(spec);
}

SweepRecord run_one(const SweepConfig& cfg, const Cell& cell, int sample) {
  SweepRecord rec = cell.coords;
  rec.sample = sample;
  rec.derived_seed = derive_seed(cfg.seed, cell.draw_index, static_cast<std::uint64_t>(sample));
  const auto start = std::chrono::steady_clock::now();
  const int m = rec.m, n = rec.n;

  switch (cfg.experiment) {
    case Experiment::ScalarCond:
    case Experiment::ScalarDet: {
      DelaySpec<double> spec{n, 1, RealMatrix::Constant(1, 1, rec.param1), WClass::Scalar};
      measure(spec, rec);
      break;
    }
    case Experiment::HermGrid: {
      std::mt19937_64 rng(rec.derived_seed);
      const RealMatrix q = orthogonal_from(rng, 2);
      const RealVector lam = (RealVector(2) << rec.param1, rec.param2).finished();
      RealMatrix w = q * lam.asDiagonal() * q.transpose();
      w = (w + w.transpose()).eval() / 2.0;
      measure(DelaySpec<double>{n, 2, w, WClass::Hermitian}, rec);
      break;
    }
    case Experiment::Region: {
      std::mt19937_64 rng(rec.derived_seed);
      const RealMatrix u = orthogonal_from(rng, m);
      const RealMatrix v = orthogonal_from(rng, m);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      RealVector s(m);
      for (int j = 0; j < m; ++j) s(j) = rec.param1 + (rec.param2 - rec.param1) * unit(rng);
      s(0) = rec.param2;
      s(m - 1) = rec.param1;
      measure(DelaySpec<double>{n, m, u * s.asDiagonal() * v.transpose(), WClass::General}, rec);
      break;
    }
    case Experiment::GeneralCond:
    case Experiment::GeneralDet:
    case Experiment::LagGrowth:
      measure(DelaySpec<double>{n, m, gaussian_weight(m, rec.param1, rec.derived_seed), WClass::General}, rec);
      break;
    case Experiment::WClassSpectra: {
      RealMatrix w;
      WClass declared = WClass::General;
      switch (cell.weight_class) {
        case WeightClass::Zero:
          w = RealMatrix::Zero(m, m);
          declared = WClass::Zero;
          break;
        case WeightClass::Identity:
          w = RealMatrix::Identity(m, m);
          declared = WClass::Hermitian;
          break;
        case WeightClass::Unitary:
          w = random_orthogonal(m, rec.derived_seed);
          declared = WClass::Unitary;
          break;
        case WeightClass::Gaussian:
          w = gaussian_weight(m, rec.param2, rec.derived_seed);
          break;
      }
      measure(DelaySpec<double>{n, m, w, declared}, rec);
      break;
    }
  }
  rec.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

CellAggregate aggregate(const SweepRecord* first, int count) {
  CellAggregate a;
  a.cell = first[0];
  a.count = count;
  auto stats = [&](auto get, double& mean, double& var) {
    double sum = 0.0;
    for (int i = 0; i < count; ++i) sum += get(first[i]);
    mean = sum / count;
    double ss = 0.0;
    for (int i = 0; i < count; ++i) {
      const double d = get(first[i]) - mean;
      ss += d * d;
    }
    var = std::isfinite(mean) ? ss / count : std::nan("");
  };
  double unused = 0.0;
  stats([](const SweepRecord& r) { return r.measured.sigma_max; }, a.sigma_max_mean, a.sigma_max_var);
  stats([](const SweepRecord& r) { return r.measured.sigma_min; }, a.sigma_min_mean, a.sigma_min_var);
  stats([](const SweepRecord& r) { return r.measured.kappa; }, a.kappa_mean, a.kappa_var);
  stats([](const SweepRecord& r) { return r.measured.full_rank() ? r.measured.gen_det_log / kLn10 : -kInfinity; },
        a.log10_det_mean, a.log10_det_var);
  stats([](const SweepRecord& r) { return log10_or(r.bounds.kappa_bound); }, a.bound_kappa_log10_mean, unused);
  stats([](const SweepRecord& r) { return r.bounds.det_bound_log / kLn10; }, a.bound_det_log10_mean, unused);
  stats([](const SweepRecord& r) { return r.bounds.embedding.guaranteed ? 1.0 : 0.0; }, a.guaranteed_fraction, unused);
  stats([](const SweepRecord& r) { return r.wall_time_ms; }, a.wall_time_ms_mean, unused);
  return a;
}

void require_nonempty(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::InvalidParams, std::string("grid '") + what + "' must be non-empty");
}

}  // namespace

const char* to_string(Experiment e) {
  for (const auto& [value, name] : kExperimentNames)
    if (value == e) return name;
  return "unknown";
}

Experiment parse_experiment(const std::string& name) {
  for (const auto& [value, n] : kExperimentNames)
    if (name == n) return value;
  throw Error(ErrorCode::InvalidParams, "unknown experiment '" + name + "'");
}

const char* to_string(WeightClass c) {
  switch (c) {
    case WeightClass::Zero: return "zero";
    case WeightClass::Identity: return "identity";
    case WeightClass::Unitary: return "unitary";
    case WeightClass::Gaussian: return "gaussian";
  }
  return "unknown";
}

WeightClass parse_weight_class(const std::string& name) {
  for (WeightClass c : {WeightClass::Zero, WeightClass::Identity, WeightClass::Unitary, WeightClass::Gaussian})
    if (name == to_string(c)) return c;
  throw Error(ErrorCode::InvalidParams, "unknown weight class '" + name + "'");
}

SweepConfig default_sweep_config(Experiment e) {
  SweepConfig cfg;
  cfg.experiment = e;
  SweepGrids& g = cfg.grids;
  switch (e) {
    case Experiment::ScalarCond:
    case Experiment::ScalarDet:
      g.n = {4, 8, 16};
      g.omega = linspace(-2.0, 2.0, 401);
      break;
    case Experiment::HermGrid:
      g.n = {2, 8, 32};
      g.m = {2};
      g.lambda = linspace(-2.0, 2.0, 41);
      break;
    case Experiment::Region:
      g.m = {4};
      g.n = {8};
      g.sigma_min = linspace(0.0, 2.0, 21);
      g.sigma_max = linspace(0.0, 3.0, 31);
      cfg.samples_per_cell = 5;
      break;
    case Experiment::GeneralCond:
      g.m = range(1, 35);
      g.n = {2, 4, 8};
      g.sigma_max = linspace(0.0, 1.0, 35);
      break;
    case Experiment::GeneralDet:
      g.m = range(1, 32);
      g.n = {4, 8, 16};
      g.sigma_max = linspace(0.0, 1.0, 35);
      break;
    case Experiment::LagGrowth:
      g.m = {1, 2, 4, 8};
      g.n = {1, 2, 4, 8};
      g.sigma_max = linspace(0.0, 0.5, 100);
      cfg.samples_per_cell = 100;
      break;
    case Experiment::WClassSpectra:
      g.m = {8};
      g.n = {8};
      g.classes = {WeightClass::Zero, WeightClass::Identity, WeightClass::Unitary, WeightClass::Gaussian};
      g.sigma_max = {1.0, 0.5, 0.25, 0.1, 0.01};
      cfg.samples_per_cell = 10;
      break;
  }
  return cfg;
}

void validate(const SweepConfig& cfg) {
  const SweepGrids& g = cfg.grids;
  if (cfg.samples_per_cell < 1) throw Error(ErrorCode::InvalidParams, "samples_per_cell must be >= 1");
  if (cfg.threads < 0) throw Error(ErrorCode::InvalidParams, "threads must be >= 0");
  require_nonempty(!g.n.empty(), "n");
  for (int n : g.n)
    if (n < 1) throw Error(ErrorCode::InvalidParams, "n values must be positive");
  for (int m : g.m)
    if (m < 1) throw Error(ErrorCode::InvalidParams, "m values must be positive");
  auto finite = [](const std::vector<double>& v) { return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); }); };
  auto nonneg = [](const std::vector<double>& v) { return std::all_of(v.begin(), v.end(), [](double x) { return x >= 0.0; }); };
  if (!finite(g.sigma_max) || !finite(g.sigma_min) || !finite(g.omega) || !finite(g.lambda))
    throw Error(ErrorCode::InvalidParams, "grid values must be finite");
  if (!nonneg(g.sigma_max) || !nonneg(g.sigma_min))
    throw Error(ErrorCode::InvalidParams, "singular value targets must be >= 0");

  switch (cfg.experiment) {
    case Experiment::ScalarCond:
    case Experiment::ScalarDet:
      require_nonempty(!g.omega.empty(), "omega");
      break;
    case Experiment::HermGrid:
      require_nonempty(!g.lambda.empty(), "lambda");
      if (!g.m.empty() && (g.m.size() != 1 || g.m.front() != 2))
        throw Error(ErrorCode::InvalidParams, "herm-grid uses m = 2");
      break;
    case Experiment::Region:
      require_nonempty(!g.m.empty(), "m");
      require_nonempty(!g.sigma_min.empty(), "sigma_min");
      require_nonempty(!g.sigma_max.empty(), "sigma_max");
      break;
    case Experiment::GeneralCond:
    case Experiment::GeneralDet:
    case Experiment::LagGrowth:
      require_nonempty(!g.m.empty(), "m");
      require_nonempty(!g.sigma_max.empty(), "sigma_max");
      break;
    case Experiment::WClassSpectra:
      require_nonempty(!g.m.empty(), "m");
      require_nonempty(!g.classes.empty(), "classes");
      if (std::find(g.classes.begin(), g.classes.end(), WeightClass::Gaussian) != g.classes.end())
        require_nonempty(!g.sigma_max.empty(), "sigma_max");
      break;
  }
}

std::string sweep_config_to_json(const SweepConfig& cfg) {
  nlohmann::json grids = {
      {"n", cfg.grids.n},           {"m", cfg.grids.m},         {"sigma_max", cfg.grids.sigma_max},
      {"sigma_min", cfg.grids.sigma_min}, {"omega", cfg.grids.omega}, {"lambda", cfg.grids.lambda},
  };
  nlohmann::json classes = nlohmann::json::array();
  for (WeightClass c : cfg.grids.classes) classes.push_back(to_string(c));
  grids["classes"] = classes;
  const nlohmann::json j = {
      {"experiment", to_string(cfg.experiment)},
      {"grids", grids},
      {"samples_per_cell", cfg.samples_per_cell},
      {"seed", cfg.seed},
      {"out_path", cfg.out_path},
      {"threads", cfg.threads},
  };
  return j.dump(2);
}

void update_from_json(SweepConfig& cfg, const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidParams, std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::InvalidParams, "config must be a JSON object");
  try {
    // The experiment is applied first so its defaults can be overridden below.
    if (j.contains("experiment")) {
      const Experiment e = parse_experiment(j.at("experiment").get<std::string>());
      if (e != cfg.experiment) {
        const SweepConfig keep = cfg;
        cfg = default_sweep_config(e);
        cfg.seed = keep.seed;
        cfg.out_path = keep.out_path;
        cfg.threads = keep.threads;
      }
    }
    for (const auto& [key, value] : j.items()) {
      if (key == "experiment") continue;
      if (key == "samples_per_cell") cfg.samples_per_cell = value.get<int>();
      else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
      else if (key == "out_path") cfg.out_path = value.get<std::string>();
      else if (key == "threads") cfg.threads = value.get<int>();
      else if (key == "grids") {
        if (!value.is_object()) throw Error(ErrorCode::InvalidParams, "grids must be an object");
        for (const auto& [gk, gv] : value.items()) {
          if (gk == "n") cfg.grids.n = gv.get<std::vector<int>>();
          else if (gk == "m") cfg.grids.m = gv.get<std::vector<int>>();
          else if (gk == "sigma_max") cfg.grids.sigma_max = gv.get<std::vector<double>>();
          else if (gk == "sigma_min") cfg.grids.sigma_min = gv.get<std::vector<double>>();
          else if (gk == "omega") cfg.grids.omega = gv.get<std::vector<double>>();
          else if (gk == "lambda") cfg.grids.lambda = gv.get<std::vector<double>>();
          else if (gk == "classes") {
            cfg.grids.classes.clear();
            for (const auto& c : gv) cfg.grids.classes.push_back(parse_weight_class(c.get<std::string>()));
          } else {
            throw Error(ErrorCode::InvalidParams, "unknown grid '" + gk + "'");
          }
        }
      } else {
        throw Error(ErrorCode::InvalidParams, "unknown config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidParams, std::string("config has a value of the wrong type: ") + e.what());
  }
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t cell, std::uint64_t sample) {
  return splitmix64(splitmix64(splitmix64(master) ^ cell) ^ sample);
}

RealMatrix gaussian_weight(int m, double sigma_max_target, std::uint64_t seed) {
  if (m < 1) throw Error(ErrorCode::InvalidParams, "m must be positive");
  if (!(sigma_max_target >= 0.0) || !std::isfinite(sigma_max_target))
    throw Error(ErrorCode::InvalidParams, "sigma_max target must be finite and >= 0");
  if (sigma_max_target == 0.0) return RealMatrix::Zero(m, m);
  std::mt19937_64 rng(seed);
  RealMatrix a = gaussian_matrix(m, rng);
  const double norm = singular_values(a).front();
  // A Gaussian matrix is almost surely nonzero; redraw in the measure-zero case.
  if (norm == 0.0) return gaussian_weight(m, sigma_max_target, splitmix64(seed));
  a *= sigma_max_target / norm;
  return a;
}

ComplexMatrix random_weight_with_norm(int m, double sigma_max_target, std::uint64_t seed) {
  return gaussian_weight(m, sigma_max_target, seed).cast<Complex>();
}

RealMatrix random_orthogonal(int m, std::uint64_t seed) {
  if (m < 1) throw Error(ErrorCode::InvalidParams, "m must be positive");
  std::mt19937_64 rng(seed);
  return orthogonal_from(rng, m);
}

ComplexMatrix random_weight_class(int m, WeightClass cls, double sigma_max_target, std::uint64_t seed) {
  if (m < 1) throw Error(ErrorCode::InvalidParams, "m must be positive");
  switch (cls) {
    case WeightClass::Zero: return ComplexMatrix::Zero(m, m);
    case WeightClass::Identity: return ComplexMatrix::Identity(m, m);
    case WeightClass::Unitary: return random_orthogonal(m, seed).cast<Complex>();
    case WeightClass::Gaussian: return random_weight_with_norm(m, sigma_max_target, seed);
  }
  throw Error(ErrorCode::InvalidParams, "unknown weight class");
}

SweepResult run_sweep(const SweepConfig& cfg, const ProgressFn& progress) {
  validate(cfg);
  const std::vector<Cell> cells = build_cells(cfg);
  for (const Cell& c : cells)
    if (c.coords.m * c.coords.n > kMaxCellDimension)
      throw Error(ErrorCode::OutOfBudget, std::string(to_string(cfg.experiment)) + " cell m = " +
                                              std::to_string(c.coords.m) + ", n = " + std::to_string(c.coords.n) +
                                              " exceeds mn <= " + std::to_string(kMaxCellDimension));

  const std::size_t samples = static_cast<std::size_t>(cfg.samples_per_cell);
  const std::size_t total = cells.size() * samples;
  SweepResult result;
  result.records.resize(total);

  unsigned workers = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads) : std::thread::hardware_concurrency();
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(total, 1))));

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex mu;
  std::exception_ptr failure;
  auto work = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      {
        std::lock_guard lock(mu);
        if (failure) return;
      }
      try {
        const Cell& cell = cells[i / samples];
        result.records[i] = run_one(cfg, cell, static_cast<int>(i % samples));
      } catch (const Error& e) {
        const Cell& cell = cells[i / samples];
        std::lock_guard lock(mu);
        if (!failure)
          failure = std::make_exception_ptr(Error(e.code(), std::string(e.what()) + " (cell m = " +
                                                                std::to_string(cell.coords.m) + ", n = " +
                                                                std::to_string(cell.coords.n) + ", " +
                                                                cell.coords.param1_name + " = " +
                                                                csv::format_double(cell.coords.param1) + ")"));
        return;
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        return;
      }
      const std::size_t d = ++done;
      if (progress) {
        std::lock_guard lock(mu);
        progress(d, total);
      }
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  result.aggregates.reserve(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c)
    result.aggregates.push_back(aggregate(&result.records[c * samples], cfg.samples_per_cell));
  return result;
}

namespace {

void write_coords(std::ostream& out, const SweepRecord& r) {
  out << to_string(r.experiment) << ',' << r.m << ',' << r.n << ',' << r.param1_name << ','
      << csv::format_double(r.param1) << ',' << r.param2_name << ',';
  if (!r.param2_name.empty()) out << csv::format_double(r.param2);
  out << ',';
}

}  // namespace

std::string format_sweep_csv(const SweepResult& result, bool with_timing) {
  std::ostringstream out;
  out << "experiment,m,n,param1_name,param1,param2_name,param2,sample,seed,sigma_max,sigma_min,"
         "kappa_log10,gen_det_log10,bound_kappa_log10,bound_det_log10,embedding_guaranteed,wall_time_ms\n";
  using csv::format_double;
  for (const SweepRecord& r : result.records) {
    write_coords(out, r);
    const double det = r.measured.full_rank() ? r.measured.gen_det_log / kLn10 : -kInfinity;
    out << r.sample << ',' << r.derived_seed << ',' << format_double(r.measured.sigma_max) << ','
        << format_double(r.measured.sigma_min) << ',' << format_double(log10_or(r.measured.kappa)) << ','
        << format_double(det) << ',' << format_double(log10_or(r.bounds.kappa_bound)) << ','
        << format_double(r.bounds.det_bound_log / kLn10) << ',' << (r.bounds.embedding.guaranteed ? 1 : 0) << ',';
    if (with_timing) out << format_double(r.wall_time_ms);
    out << '\n';
  }
  for (const CellAggregate& a : result.aggregates) {
    write_coords(out, a.cell);
    out << "mean,," << format_double(a.sigma_max_mean) << ',' << format_double(a.sigma_min_mean) << ','
        << format_double(log10_or(a.kappa_mean)) << ',' << format_double(a.log10_det_mean) << ','
        << format_double(a.bound_kappa_log10_mean) << ',' << format_double(a.bound_det_log10_mean) << ','
        << format_double(a.guaranteed_fraction) << ',';
    if (with_timing) out << format_double(a.wall_time_ms_mean);
    out << '\n';
    write_coords(out, a.cell);
    const double kvar = std::isnan(a.kappa_var) ? a.kappa_var : log10_or(a.kappa_var);
    out << "var,," << format_double(a.sigma_max_var) << ',' << format_double(a.sigma_min_var) << ','
        << format_double(kvar) << ',' << format_double(a.log10_det_var) << ",,,,\n";
  }
  return out.str();
}

std::string format_singular_value_csv(const SweepResult& result) {
  std::ostringstream out;
  out << "experiment,m,n,param1_name,param1,param2_name,param2,sample,index,sigma\n";
  for (const SweepRecord& r : result.records)
    for (std::size_t i = 0; i < r.measured.singular_values.size(); ++i) {
      write_coords(out, r);
      out << r.sample << ',' << i << ',' << csv::format_double(r.measured.singular_values[i]) << '\n';
    }
  return out.str();
}

void write_sweep_outputs(const SweepConfig& cfg, const SweepResult& result) {
  if (cfg.out_path.empty()) throw Error(ErrorCode::IoError, "no output path given");
  csv::write_atomic(cfg.out_path, format_sweep_csv(result));
  if (cfg.experiment == Experiment::WClassSpectra)
    csv::write_atomic(cfg.out_path + ".sv.csv", format_singular_value_csv(result));
  nlohmann::json meta = {
      {"config", nlohmann::json::parse(sweep_config_to_json(cfg))},
      {"version", kVersion},
      {"records", result.records.size()},
      {"cells", result.aggregates.size()},
  };
  csv::write_atomic(cfg.out_path + ".json", meta.dump(2) + "\n");
}

namespace {

// Sub-unit refinement: sigma_max admissible when g(sigma_max) <= sigma_min.
double case1_radical(double s) {
  const double num = s * s * s - s * s + 2.0 * s - 1.0;
  const double den = s * s - s + 1.0;
  return num <= 0.0 ? 0.0 : std::sqrt(num / den);
}

double case1_boundary(double sigma_min) {
  if (sigma_min > 1.0) return std::nan("");
  // g is increasing on [0, 1] with g(1) = 1; bisect for the largest admissible sigma_max.
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (case1_radical(mid) <= sigma_min ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace

std::vector<RegionRow> region_curves(int resolution) {
  if (resolution < 2) throw Error(ErrorCode::InvalidParams, "resolution must be >= 2");
  std::vector<RegionRow> rows;
  for (double s : linspace(0.0, 2.0, resolution)) {
    RegionRow r;
    r.sigma_min = s;
    r.weak = 0.5 * (1.0 + s * s);
    r.case1 = s == 1.0 ? 1.0 : case1_boundary(s);
    r.case2 = s >= 1.0 ? s * s - s + 1.0 : std::nan("");
    rows.push_back(r);
  }
  return rows;
}

std::string format_region_csv(const std::vector<RegionRow>& rows) {
  std::ostringstream out;
  out << "sigma_min,sigma_max_weak,sigma_max_case1_boundary,sigma_max_case2\n";
  auto field = [](double x) { return std::isnan(x) ? std::string() : csv::format_double(x); };
  for (const RegionRow& r : rows)
    out << field(r.sigma_min) << ',' << field(r.weak) << ',' << field(r.case1) << ',' << field(r.case2) << '\n';
  return out.str();
}

}  // namespace delaylab
