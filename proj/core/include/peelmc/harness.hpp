#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "peelmc/peeling.hpp"

namespace peelmc {

// Monte Carlo experiment driver. A config describes a grid of (n, mu)
// cells; every cell gets `trials` independent instances of G_k(n, m, ell)
// with m = floor(mu * n^(r-1) / ell^(r-2)), peeled at d = k - r + 2.
// All randomness is derived from master_seed by (cell, trial) index, so a
// run is reproducible and independent of the worker count.

enum class EllRule { sqrt_n, power, fixed };

struct ExperimentConfig {
  std::uint32_t k = 3;
  std::uint32_t r = 3;
  std::vector<std::uint64_t> n_list;
  EllRule ell_rule = EllRule::sqrt_n;
  double ell_beta = 0.5;        // power rule: ell = ceil(n^beta)
  std::uint64_t ell_fixed = 0;  // fixed rule: ell = this constant
  std::vector<double> mu_list;
  std::uint64_t trials = 1;
  std::uint64_t master_seed = 0;
  bool record_traces = false;
  std::string output_path;
  std::uint32_t workers = 0;  // 0: $PEELMC_WORKERS, else hardware count
  std::uint64_t max_incidences = 200'000'000;
  // Outcome cutoffs; desk-scale stand-ins for "almost all" and "order ell".
  double near_full_cutoff = 0.9;
  double near_zero_mult = 3.0;

  void validate() const;
  // Soft range check 1 < ell(n) < n/4 for every n; empty when fine.
  std::vector<std::string> range_warnings() const;
  std::uint64_t ell_of(std::uint64_t n) const;
  std::uint64_t m_of(std::uint64_t n, double mu) const;
  std::uint32_t effective_workers() const;
};

// Ensemble size at density mu: floor(mu * n^(r-1) / ell^(r-2)), computed
// in double. Needs ell >= 1 once r >= 3.
std::uint64_t edges_for(double mu, std::uint64_t n, std::uint32_t r,
                        std::uint64_t ell);

// Flat key = value file, one experiment per file. Keys: k, r, n_list,
// mu_list (comma separated), ell_rule (sqrt_n | power:<beta> | fixed:<c>),
// trials, master_seed, record_traces, output_path, workers,
// max_incidences, near_full_cutoff, near_zero_mult. '#' starts a comment.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_file(const std::string& path);
std::string config_to_json(const ExperimentConfig& cfg);

enum class Outcome { near_zero, partial, near_full };
std::string outcome_name(Outcome outcome);

// near_full when removed >= cutoff * (n - ell) (checked first), near_zero
// when removed <= mult * ell, partial otherwise.
Outcome classify_outcome(std::uint64_t removed, std::uint64_t n,
                         std::uint64_t ell, double near_full_cutoff,
                         double near_zero_mult);

struct TrialRow {
  std::uint32_t k = 0;
  std::uint32_t r = 0;
  std::uint64_t n = 0;
  std::uint64_t ell = 0;
  double mu = 0.0;
  std::uint64_t m = 0;
  std::uint64_t seed = 0;
  std::uint64_t removed_count = 0;  // vertices peeled, not counting ell
  double removed_fraction = 0.0;    // removed_count / (n - ell)
  std::uint64_t survived_to = 0;    // one-vertex steps with E >= 1 throughout
  Outcome outcome = Outcome::near_zero;
};

struct CellTrace {
  std::uint64_t cell = 0;
  PeelTrace trace;
};

struct TrialTable {
  std::vector<TrialRow> rows;
  std::vector<std::string> notes;   // skipped-cell diagnostics
  std::vector<CellTrace> traces;    // first trial per cell, when recorded

  void write_csv(std::ostream& out) const;
  void write_json(std::ostream& out) const;
};

enum class TableFormat { csv, json };

void write_table(const TrialTable& table, const std::string& path,
                 TableFormat format);
TrialTable read_trials_csv(std::istream& in);
TrialTable read_trials_json(std::istream& in);
TrialTable read_trials_file(const std::string& path, TableFormat format);

TrialTable run_trials(const ExperimentConfig& cfg);

// Per-cell transition summary over a finished table.
struct SweepRow {
  std::uint32_t k = 0;
  std::uint32_t r = 0;
  std::uint64_t n = 0;
  std::uint64_t ell = 0;
  double mu = 0.0;
  std::uint64_t m = 0;
  std::uint64_t trials = 0;
  double near_full_fraction = 0.0;
  double near_full_ci_lo = 0.0;   // bootstrap 95% band
  double near_full_ci_hi = 0.0;
  double median_removed_fraction = 0.0;
  double median_ci_lo = 0.0;
  double median_ci_hi = 0.0;
  double mu_c = 0.0;
  bool near_critical = false;     // mu within 1e-9 (rel.) of mu_c
};

struct SweepTable {
  std::vector<SweepRow> rows;
  std::vector<std::string> notes;

  void write_csv(std::ostream& out) const;
  void write_json(std::ostream& out) const;
};

SweepTable sweep_summary(const ExperimentConfig& cfg, const TrialTable& table);
SweepTable sweep_transition(const ExperimentConfig& cfg);

// mu where near_full_fraction first crosses 1/2 at this n, linearly
// interpolated between grid neighbors; empty if the grid never crosses.
std::optional<double> crossing_estimate(const SweepTable& table,
                                        std::uint64_t n);

// Empirical survival of the exact degree-count chain to horizon
// floor(tau * ell), against the analytic bound exp{rate * ell}. The bound
// only applies for tau > tau_star; rows outside that regime carry the
// empirical number and a note but no assertion.
struct SurvivalRow {
  std::uint64_t n = 0;
  std::uint64_t ell = 0;
  double mu = 0.0;
  double tau = 0.0;
  std::uint64_t horizon = 0;
  std::uint64_t trials = 0;
  std::uint64_t survived = 0;
  double empirical = 0.0;
  double std_error = 0.0;
  double bound_exponent = 0.0;  // NaN when not asserted
  double bound = 0.0;           // NaN when not asserted
  bool asserted = false;
  bool consistent = true;       // empirical <= bound + 3 * std_error
  std::string regime;
};

struct SurvivalReport {
  std::uint32_t k = 0;
  std::uint32_t r = 0;
  double tau = 0.0;
  std::vector<SurvivalRow> rows;

  bool all_consistent() const;
  std::string to_json() const;
};

SurvivalReport survival_vs_bound(const ExperimentConfig& cfg, double tau);

// Largest connected component of G_k(n, floor(mu*n), 0) by union-find,
// against the extinction fixed point when one exists. No assertion below
// the connectivity threshold or at small n.
struct GiantReport {
  std::uint32_t k = 0;
  double mu = 0.0;
  std::uint64_t n = 0;
  std::uint64_t trials = 0;
  double mean_fraction = 0.0;
  double std_error = 0.0;
  std::optional<double> predicted_fraction;  // 1 - rho
  std::optional<double> abs_diff;
  bool asserted = false;

  std::string to_json() const;
};

GiantReport giant_component_check(std::uint32_t k, double mu, std::uint64_t n,
                                  std::uint64_t trials,
                                  std::uint64_t master_seed);

std::string library_version();
std::string run_manifest_json(const ExperimentConfig& cfg, double wall_seconds);

}  // namespace peelmc
