#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "qfivol/matrix_core.hpp"
#include "qfivol/monotone_functions.hpp"
#include "qfivol/records.hpp"

namespace qfivol {

// ---------------------------------------------------------------------------
// Reproductions of fixed worked examples

struct CheckLine {
  std::string label;
  double value = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct ReproReport {
  std::string title;
  std::vector<CheckLine> checks;
  std::vector<std::string> notes;
  bool passed() const;
  std::string render() const;
};

/// Two-qubit separable mixture vs. Bell state: covariance and f-correlation
/// of the observables A, B for f in {sld, wy, wyd:0.25}.
ReproReport repro_entanglement();

/// Hessian of Var(X)Var(Y) - Cov(X,Y)^2 at the uniform distribution on three
/// points with X = (1,0,-1), Y = (1,-2,1): indefinite.
ReproReport repro_hessian();

/// Random observables on a random pure state: covariance volume equals the
/// qfi volume; plus the near-pure continuity probe.
ReproReport repro_pure_volume(Eigen::Index dim, int n, std::uint64_t seed);

/// One row of `list-functions`.
struct FunctionRow {
  std::string id;
  std::string formula;
  double value_at_zero;
  bool regular;
  std::string tilde_formula;  // "-" when not regular or unknown
};

std::vector<FunctionRow> list_functions();

// ---------------------------------------------------------------------------
// Sweeps

/// Joint ensembles for a sweep sample.
///   complex:    density state, complex-hermitian observables
///   real:       real-density state, real-symmetric observables
///   structured: diagonal state, pauli-like-structured (A, B, C) observables
enum class SweepEnsemble { Complex, Real, Structured };

std::string_view sweep_ensemble_name(SweepEnsemble e);
/// Also accepts the matrix_core tags "complex-hermitian", "density",
/// "real-symmetric", "real-density", "real-density+real-symmetric",
/// "pauli-like-structured".
SweepEnsemble parse_sweep_ensemble(std::string_view tag);

struct Instance {
  DensityMatrix state;
  std::vector<HermitianMatrix> observables;
};

/// Inputs for sample `index`. Every draw is keyed by derive_seed(seed, index):
/// the state uses stream 0 and observable k uses stream k + 1.
Instance draw_instance(SweepEnsemble ensemble, int n, Eigen::Index dim, std::uint64_t seed,
                       std::uint64_t index);

struct SweepConfig {
  int n = 2;
  Eigen::Index dim_lo = 2;
  Eigen::Index dim_hi = 2;
  std::uint64_t samples = 1;
  std::vector<std::string> functions{"sld", "wy", "wyd:0.25"};
  SweepEnsemble ensemble = SweepEnsemble::Complex;
  std::uint64_t seed = 0;
  unsigned parallelism = 1;
  std::filesystem::path out;
  bool decompose = false;
};

/// dim_lo + index mod (dim_hi - dim_lo + 1).
Eigen::Index sample_dim(const SweepConfig& cfg, std::uint64_t index);

struct FunctionStats {
  std::string function;
  double min_gap = 0.0;
  double mean_gap = 0.0;
  std::uint64_t count = 0;
};

struct SweepSummary {
  std::uint64_t samples = 0;
  std::uint64_t records = 0;
  double min_gap = 0.0;
  std::uint64_t argmin_index = 0;
  std::string argmin_function;
  std::uint64_t violations = 0;  // candidate counterexamples
  std::uint64_t proven_violations = 0;
  std::uint64_t monotonicity_failures = 0;
  std::vector<FunctionStats> per_function;
  double elapsed_seconds = 0.0;
};

/// Throws std::invalid_argument for an invalid config (non-regular or
/// unparseable function, bad n/dim/samples).
void validate(const SweepConfig& cfg);

/// Records for one sample index, one per configured function.
std::vector<SampleRecord> evaluate_sample(const SweepConfig& cfg,
                                          const std::vector<MonotoneFunction>& functions,
                                          std::uint64_t index);

/// Runs the sweep, writing one line per record then a summary line to
/// cfg.out. Output bytes depend only on the config minus parallelism.
/// Throws std::runtime_error if the output cannot be written.
SweepSummary run_sweep(const SweepConfig& cfg);

std::string summary_line(const SweepConfig& cfg, const SweepSummary& s);
std::string render_summary(const SweepConfig& cfg, const SweepSummary& s);

/// Recomputes a record from its reproduction fields (seed, index, ensemble,
/// n, dim, function, partner list; the decomposition is recomputed when the
/// record carries one).
SampleRecord replay(const SampleRecord& r);

}  // namespace qfivol
