#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "peelmc/rng.hpp"

namespace peelmc {

// Degree-count processes for the one-vertex-per-step peeling schedule with
// d = k - r + 2. "Active" edges are those of live degree 1..k-r+1; E
// denotes sum_{j=1}^{k-r+1} j*C_j, the total degree mass of active edges.
// A run "survives" to horizon T when E stayed >= 1 at every step before T.
//
// exact:       the full census [C_0..C_k]; each step removes one uniform
//              live vertex of a uniformly chosen active edge. Distributed
//              exactly like the census of the graph process.
// dominating:  collapses the active classes into one walk E_bar that only
//              ever receives the most generous inflow; its survival
//              probability upper-bounds the exact one.
// dominated:   keeps the high classes but drains E_under with an extra
//              independent removal estimate; survival lower-bounds exact.
struct ChainParams {
  std::uint64_t n = 0;
  std::uint32_t k = 0;
  std::uint32_t r = 0;
  std::uint64_t m = 0;
  std::uint64_t ell = 0;
  std::uint64_t seed = 0;

  void validate() const;
  // Highest active degree class, k - r + 1.
  std::uint32_t low_max() const { return k - r + 1; }
  // Live vertices before step t+1: N(t) = n - ell - t.
  std::int64_t live_at(std::uint64_t t) const {
    return static_cast<std::int64_t>(n) - static_cast<std::int64_t>(ell) -
           static_cast<std::int64_t>(t);
  }
};

// Pr(an edge has j of its k vertices outside a fixed ell-set), i.e. the
// hypergeometric weight C(n-ell, j) C(ell, k-j) / C(n, k). This is the
// live-degree law of one edge after the initial removal, so the census at
// time 0 is Multinomial(m, p_init).
double p_init(std::uint64_t n, std::uint32_t k, std::uint64_t ell, std::uint32_t j);
std::vector<double> p_init_all(std::uint64_t n, std::uint32_t k, std::uint64_t ell);

struct ExactState {
  std::uint64_t t = 0;
  std::vector<std::int64_t> census;  // [C_0..C_k]
  bool frozen = false;

  std::int64_t active_mass(std::uint32_t low_max) const;  // E at time t
  std::int64_t active_count(std::uint32_t low_max) const; // sum of active C_j
};

// State of the dominating walk: tracked classes are j = k-r+2..k, stored
// as tracked[j - (k-r+2)]. tracked[k] never changes; E_bar may go negative.
struct DominatingState {
  std::uint64_t t = 0;
  std::int64_t e_bar = 0;
  std::vector<std::int64_t> tracked;
};

struct DominatedState {
  std::uint64_t t = 0;
  std::int64_t e_under = 0;
  std::vector<std::int64_t> tracked;  // same indexing as DominatingState
};

ExactState init_exact(const ChainParams& params, Rng& rng);
DominatingState init_dominating(const ChainParams& params, Rng& rng);
DominatedState init_dominated(const ChainParams& params, Rng& rng);

// One transition each. step_exact freezes (and returns unchanged) when no
// active edge is left; the other two never freeze. All three throw
// horizon_error when stepping would push N(t) to k or below.
void step_exact(ExactState& state, const ChainParams& params, Rng& rng);
void step_dominating(DominatingState& state, const ChainParams& params, Rng& rng);
void step_dominated(DominatedState& state, const ChainParams& params, Rng& rng);

enum class ChainKind { exact, dominating, dominated };
std::string chain_kind_name(ChainKind kind);

struct ChainStepRow {
  std::uint64_t t = 0;
  std::int64_t chosen = -1;  // exact chain: degree class of the chosen edge
  std::vector<std::int64_t> census;  // untracked classes reported as 0
  std::int64_t e_value = 0;
};

struct ChainTrace {
  ChainKind kind = ChainKind::exact;
  std::uint32_t k = 0;
  std::uint32_t r = 0;
  std::vector<ChainStepRow> rows;

  // Same CSV schema as a peel trace plus a leading `kind` column.
  void write_csv(std::ostream& out) const;
  void write_csv_file(const std::string& path) const;
};

struct ChainRun {
  ChainKind kind = ChainKind::exact;
  bool survived = false;
  std::uint64_t steps_survived = 0;  // first step with E < 1, or T
  std::uint64_t t = 0;
  std::vector<std::int64_t> census;  // at T; untracked classes 0
  std::int64_t e_value = 0;          // at T
  std::optional<ChainTrace> trace;
};

// Runs T steps from a fresh initial state drawn through `rng`.
ChainRun run_chain(ChainKind kind, const ChainParams& params, std::uint64_t horizon,
                   bool record_trace, Rng& rng);

// Graph process vs exact chain, coordinate by coordinate at time T.
struct DivergenceRow {
  std::string coordinate;
  double mean_a = 0.0;  // graph
  double mean_b = 0.0;  // chain
  double stderr_combined = 0.0;
  double z = 0.0;
};

struct DivergenceReport {
  std::uint64_t trials = 0;
  std::uint64_t horizon = 0;
  std::vector<DivergenceRow> rows;

  double max_abs_z() const;
  std::string to_json() const;
};

// Runs `trials` paired simulations: the graph process (one vertex per
// step, capped at T) and the exact chain, on independent derived streams,
// and z-scores every census coordinate, E, and the survival frequency.
DivergenceReport graph_vs_chain_census(const ChainParams& params,
                                       std::uint64_t horizon, std::uint64_t trials);

}  // namespace peelmc
