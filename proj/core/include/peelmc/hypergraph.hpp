#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "peelmc/rng.hpp"

namespace peelmc {

// Parameters of the random ensemble: m hyperedges, each an independent
// uniform k-subset of {0, ..., n-1} (duplicate edges across draws are kept;
// they are distinct edge nodes), followed by removal of the ell
// lowest-indexed vertices. By vertex exchangeability this matches removing
// any fixed ell-set, and it regenerates bit-identically from the seed.
struct EnsembleParams {
  std::uint64_t n = 0;
  std::uint32_t k = 0;
  std::uint64_t m = 0;
  std::uint64_t ell = 0;
  std::uint64_t seed = 0;
  // Generation refuses to allocate more than this many vertex slots (m*k).
  std::uint64_t max_incidences = 200'000'000;

  void validate() const;
};

// A k-uniform multihypergraph with a removal mask. Vertices are ids in
// [0, n); edges keep their k original vertices forever, and live_degree
// tracks how many of them are still present. The incidence lists are CSR
// over vertices so peeling can walk each removal in O(degree).
class Hypergraph {
public:
  static Hypergraph generate(const EnsembleParams& params);

  // Build from explicit edges (each exactly k distinct ids below n),
  // then remove the listed vertices.
  static Hypergraph from_edge_list(std::uint64_t n, std::uint32_t k,
                                   const std::vector<std::vector<std::uint32_t>>& edges,
                                   const std::vector<std::uint32_t>& removed = {});

  // Text format: header "n k m", then m lines of k vertex ids, then an
  // optional trailing line "removed: id id ...".
  static Hypergraph load(std::istream& in);
  static Hypergraph load_file(const std::string& path);
  void save(std::ostream& out) const;
  void save_file(const std::string& path) const;

  std::uint64_t vertex_count() const { return n_; }
  std::uint32_t arity() const { return k_; }
  std::uint64_t edge_count() const { return live_degree_.size(); }

  std::span<const std::uint32_t> edge(std::uint64_t e) const {
    return {edge_vertices_.data() + e * k_, k_};
  }
  std::uint32_t live_degree(std::uint64_t e) const { return live_degree_[e]; }
  std::span<const std::uint32_t> incident_edges(std::uint32_t v) const;

  bool is_removed(std::uint32_t v) const { return removed_[v] != 0; }
  std::uint64_t removed_count() const { return removed_count_; }
  std::uint64_t live_count() const { return n_ - removed_count_; }

  // Marks v removed and decrements the live degree of its incident edges.
  void remove_vertex(std::uint32_t v);

  // Census [C_0, ..., C_k]: C_j is the number of edges with live degree j.
  std::vector<std::uint64_t> degree_census() const;

  std::vector<std::uint32_t> live_vertices() const;
  std::vector<std::uint32_t> removed_vertices() const;

private:
  Hypergraph() = default;
  void build_incidence();

  std::uint64_t n_ = 0;
  std::uint32_t k_ = 0;
  std::vector<std::uint32_t> edge_vertices_;  // m*k, each edge sorted ascending
  std::vector<std::uint32_t> live_degree_;
  std::vector<std::uint64_t> adj_offsets_;
  std::vector<std::uint32_t> adj_edges_;
  std::vector<std::uint8_t> removed_;
  std::uint64_t removed_count_ = 0;
};

}  // namespace peelmc
