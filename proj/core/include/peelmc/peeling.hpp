#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "peelmc/hypergraph.hpp"

namespace peelmc {

// d-peeling repeatedly removes "active" edges, those with live degree in
// [1, d-1], together with their remaining vertices, until none are left.
// The surviving vertex set is the unique maximal d-stopping set of the
// graph with its current removals, no matter in which order active edges
// are processed.
//
// batch: scan-and-cascade over a FIFO of active edges; deterministic.
// one_vertex_per_step: each step picks a uniform active edge, then a
// uniform live vertex of it, and removes that single vertex. This is the
// schedule whose edge-census trajectory the degree-count chains model.
enum class PeelSchedule { batch, one_vertex_per_step };

struct PeelConfig {
  std::uint32_t d = 2;
  PeelSchedule schedule = PeelSchedule::batch;
  std::uint64_t rng_seed = 0;  // used by one_vertex_per_step only
  bool record_trace = false;
  // one_vertex_per_step only: stop after this many removals (0 = run to
  // termination). Lets chain comparisons snapshot the census at a fixed t.
  std::uint64_t max_steps = 0;
};

struct PeelStep {
  std::uint64_t t = 0;           // 1-based step count
  std::int64_t chosen_edge = -1; // edge resolved at this step
  std::vector<std::uint32_t> removed_vertices;
  std::vector<std::uint64_t> census_after;  // [C_0..C_k]
  std::uint64_t e_low = 0;  // sum over j in [1, d-1] of j*C_j after the step
};

struct PeelTrace {
  std::uint32_t k = 0;
  std::uint32_t d = 0;
  std::vector<PeelStep> steps;

  // CSV columns: t, chosen_edge, n_removed_this_step, C_0..C_k, E_low.
  void write_csv(std::ostream& out) const;
  void write_csv_file(const std::string& path) const;
};

struct PeelResult {
  std::vector<std::uint32_t> remainder;       // live vertices at termination
  std::vector<std::uint64_t> remainder_edges; // edges with live degree >= d
  std::uint64_t removed_total = 0;            // vertices removed by this run
  std::optional<PeelTrace> trace;
};

// Runs d-peeling on a copy of h.
PeelResult peel(const Hypergraph& h, const PeelConfig& cfg);

// Runs d-peeling on h itself, leaving it at the terminal state.
PeelResult peel_in_place(Hypergraph& h, const PeelConfig& cfg);

// Does every edge meet S in 0 or in >= d live vertices? S must list live,
// in-range vertex ids (duplicates rejected).
bool is_stopping_set(const Hypergraph& h, const std::vector<std::uint32_t>& s,
                     std::uint32_t d);

// Exhaustive maximal d-stopping set over the live vertices (<= 22 of them),
// by decreasing subset size; first hit is the unique maximum.
std::vector<std::uint32_t> max_stopping_set_bruteforce(const Hypergraph& h,
                                                       std::uint32_t d);

// Size classes used when reporting remainder sizes.
enum class SizeClass { empty, small, linear, large };
SizeClass classify_size(std::uint64_t size, std::uint64_t n, double alpha);
std::string size_class_name(SizeClass c);

}  // namespace peelmc
