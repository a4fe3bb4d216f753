#pragma once

// Seeded random weight generators and the sweep drivers for each experiment
// with CSV and JSON sidecar output.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "delaylab/bounds.hpp"
#include "delaylab/types.hpp"

namespace delaylab {

enum class Experiment { ScalarCond, ScalarDet, HermGrid, Region, GeneralCond, GeneralDet, LagGrowth, WClassSpectra };

/// Kebab-case names ("scalar-cond", "lag-growth", ...).
const char* to_string(Experiment e);
Experiment parse_experiment(const std::string& name);

enum class WeightClass { Zero, Identity, Unitary, Gaussian };

const char* to_string(WeightClass c);
WeightClass parse_weight_class(const std::string& name);

struct SweepGrids {
  std::vector<int> n;
  std::vector<int> m;
  std::vector<double> sigma_max;
  std::vector<double> sigma_min;  // Region
  std::vector<double> omega;      // ScalarCond, ScalarDet (real weights)
  std::vector<double> lambda;     // HermGrid, both eigenvalue axes
  std::vector<WeightClass> classes;
};

struct SweepConfig {
  Experiment experiment = Experiment::ScalarCond;
  SweepGrids grids;
  int samples_per_cell = 1;
  std::uint64_t seed = 0;
  std::string out_path;
  int threads = 0;  // 0: machine parallelism
};

/// Default grids of each experiment.
SweepConfig default_sweep_config(Experiment e);

/// Throws InvalidParams on empty grids, non-positive sizes or samples < 1.
void validate(const SweepConfig& cfg);

/// JSON object mirroring the SweepConfig field names.
std::string sweep_config_to_json(const SweepConfig& cfg);
/// Fields absent from the JSON text keep the values already in `cfg`.
/// Throws InvalidParams on malformed JSON or unknown keys.
void update_from_json(SweepConfig& cfg, const std::string& json_text);

struct SweepRecord {
  Experiment experiment = Experiment::ScalarCond;
  int m = 1;
  int n = 1;
  std::string param1_name;
  double param1 = 0.0;
  std::string param2_name;
  double param2 = 0.0;
  int sample = 0;
  std::uint64_t derived_seed = 0;
  SpectralSummary measured;
  BoundReport bounds;
  double wall_time_ms = 0.0;
};

/// Per-cell statistics over samples. Variances are population variances.
struct CellAggregate {
  SweepRecord cell;  // coordinates only
  int count = 0;
  double sigma_max_mean = 0.0, sigma_max_var = 0.0;
  double sigma_min_mean = 0.0, sigma_min_var = 0.0;
  double kappa_mean = 0.0, kappa_var = 0.0;
  double log10_det_mean = 0.0, log10_det_var = 0.0;
  double bound_kappa_log10_mean = 0.0, bound_det_log10_mean = 0.0;
  double guaranteed_fraction = 0.0;
  double wall_time_ms_mean = 0.0;
};

struct SweepResult {
  std::vector<SweepRecord> records;     // cell order, then sample index
  std::vector<CellAggregate> aggregates;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Seed for one (cell, sample) draw.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t cell, std::uint64_t sample);

/// Real Gaussian m x m matrix rescaled to spectral norm `sigma_max_target`.
RealMatrix gaussian_weight(int m, double sigma_max_target, std::uint64_t seed);
ComplexMatrix random_weight_with_norm(int m, double sigma_max_target, std::uint64_t seed);

/// Haar-distributed real orthogonal matrix (QR of a Gaussian matrix).
RealMatrix random_orthogonal(int m, std::uint64_t seed);

/// Zero and Identity exactly; Unitary orthonormalized Gaussian; Gaussian as
/// random_weight_with_norm. The target only affects the Gaussian class.
ComplexMatrix random_weight_class(int m, WeightClass cls, double sigma_max_target, std::uint64_t seed);

/// Largest m*n a sweep cell may use.
inline constexpr int kMaxCellDimension = 512;

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

/// Runs every cell and sample. Does not write files.
SweepResult run_sweep(const SweepConfig& cfg, const ProgressFn& progress = {});

/// Full CSV text: one line per record, then a "mean" and a "var" line per
/// cell. `with_timing = false` blanks the wall_time_ms column.
std::string format_sweep_csv(const SweepResult& result, bool with_timing = true);

/// Singular values of every delay matrix (WClassSpectra histograms):
/// experiment,m,n,param1_name,param1,param2_name,param2,sample,index,sigma.
std::string format_singular_value_csv(const SweepResult& result);

/// Writes cfg.out_path atomically plus "<out_path>.json" (config and
/// version). WClassSpectra also writes "<out_path>.sv.csv".
void write_sweep_outputs(const SweepConfig& cfg, const SweepResult& result);

struct RegionRow {
  double sigma_min = 0.0;
  double weak = 0.0;   // 1/2 (1 + sigma_min^2)
  double case1 = 0.0;  // NaN where the sub-unit refinement does not apply
  double case2 = 0.0;  // NaN where the super-unit refinement does not apply
};

/// Boundary curves of the embedding conditions on sigma_min in [0, 2].
std::vector<RegionRow> region_curves(int resolution);
std::string format_region_csv(const std::vector<RegionRow>& rows);

extern const char* const kVersion;

}  // namespace delaylab
