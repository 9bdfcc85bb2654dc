#include "peelmc/hypergraph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "peelmc/errors.hpp"

namespace peelmc {

void EnsembleParams::validate() const {
  if (n == 0) throw parameter_error("ensemble: n must be positive");
  if (n > 0xFFFFFFFFull) throw parameter_error("ensemble: n exceeds 32-bit vertex ids");
  if (k == 0 || k > n) throw parameter_error("ensemble: need 1 <= k <= n");
  if (ell >= n) throw parameter_error("ensemble: need ell < n");
  if (m > 0 && static_cast<std::uint64_t>(k) * m > max_incidences)
    throw capacity_error("ensemble: m*k exceeds the incidence cap");
}

namespace {

// Floyd's subset-sampling algorithm: k sequential draws, no rejection,
// exactly uniform over k-subsets of {0, ..., n-1}.
void sample_k_subset(Rng& rng, std::uint64_t n, std::uint32_t k,
                     std::vector<std::uint32_t>& out) {
  out.clear();
  for (std::uint64_t j = n - k; j < n; ++j) {
    const auto t = static_cast<std::uint32_t>(rng.uniform_below(j + 1));
    bool taken = false;
    for (std::uint32_t x : out)
      if (x == t) {
        taken = true;
        break;
      }
    out.push_back(taken ? static_cast<std::uint32_t>(j) : t);
  }
  std::sort(out.begin(), out.end());
}

}  // namespace

Hypergraph Hypergraph::generate(const EnsembleParams& params) {
  params.validate();
  Hypergraph h;
  h.n_ = params.n;
  h.k_ = params.k;
  h.edge_vertices_.reserve(params.m * params.k);
  Rng rng = Rng::stream(params.seed, 0);
  std::vector<std::uint32_t> edge;
  edge.reserve(params.k);
  for (std::uint64_t e = 0; e < params.m; ++e) {
    sample_k_subset(rng, params.n, params.k, edge);
    h.edge_vertices_.insert(h.edge_vertices_.end(), edge.begin(), edge.end());
  }
  h.removed_.assign(params.n, 0);
  for (std::uint64_t v = 0; v < params.ell; ++v) h.removed_[v] = 1;
  h.removed_count_ = params.ell;
  h.build_incidence();
  return h;
}

Hypergraph Hypergraph::from_edge_list(
    std::uint64_t n, std::uint32_t k,
    const std::vector<std::vector<std::uint32_t>>& edges,
    const std::vector<std::uint32_t>& removed) {
  if (n == 0 || n > 0xFFFFFFFFull) throw parameter_error("from_edge_list: bad n");
  if (k == 0 || k > n) throw parameter_error("from_edge_list: need 1 <= k <= n");
  Hypergraph h;
  h.n_ = n;
  h.k_ = k;
  h.edge_vertices_.reserve(edges.size() * k);
  std::vector<std::uint32_t> sorted;
  for (const auto& e : edges) {
    if (e.size() != k) throw format_error("edge does not have exactly k vertices");
    sorted = e;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      if (sorted[i] >= n) throw format_error("edge contains vertex id >= n");
      if (i > 0 && sorted[i] == sorted[i - 1])
        throw format_error("edge contains a duplicate vertex");
    }
    h.edge_vertices_.insert(h.edge_vertices_.end(), sorted.begin(), sorted.end());
  }
  h.removed_.assign(n, 0);
  for (std::uint32_t v : removed) {
    if (v >= n) throw format_error("removed vertex id >= n");
    if (h.removed_[v]) throw format_error("vertex removed twice");
    h.removed_[v] = 1;
  }
  h.removed_count_ = removed.size();
  h.build_incidence();
  return h;
}

void Hypergraph::build_incidence() {
  const std::uint64_t m = edge_vertices_.size() / (k_ == 0 ? 1 : k_);
  adj_offsets_.assign(n_ + 1, 0);
  for (std::uint32_t v : edge_vertices_) ++adj_offsets_[v + 1];
  for (std::uint64_t v = 0; v < n_; ++v) adj_offsets_[v + 1] += adj_offsets_[v];
  adj_edges_.resize(edge_vertices_.size());
  std::vector<std::uint64_t> cursor(adj_offsets_.begin(), adj_offsets_.end() - 1);
  for (std::uint64_t e = 0; e < m; ++e)
    for (std::uint32_t i = 0; i < k_; ++i)
      adj_edges_[cursor[edge_vertices_[e * k_ + i]]++] = static_cast<std::uint32_t>(e);
  live_degree_.assign(m, 0);
  for (std::uint64_t e = 0; e < m; ++e) {
    std::uint32_t deg = 0;
    for (std::uint32_t i = 0; i < k_; ++i)
      deg += removed_[edge_vertices_[e * k_ + i]] ? 0u : 1u;
    live_degree_[e] = deg;
  }
}

std::span<const std::uint32_t> Hypergraph::incident_edges(std::uint32_t v) const {
  return {adj_edges_.data() + adj_offsets_[v],
          adj_edges_.data() + adj_offsets_[v + 1]};
}

void Hypergraph::remove_vertex(std::uint32_t v) {
  if (v >= n_) throw parameter_error("remove_vertex: id out of range");
  if (removed_[v]) throw state_error("remove_vertex: vertex already removed");
  removed_[v] = 1;
  ++removed_count_;
  for (std::uint32_t e : incident_edges(v)) --live_degree_[e];
}

std::vector<std::uint64_t> Hypergraph::degree_census() const {
  std::vector<std::uint64_t> census(k_ + 1, 0);
  for (std::uint32_t deg : live_degree_) ++census[deg];
  return census;
}

std::vector<std::uint32_t> Hypergraph::live_vertices() const {
  std::vector<std::uint32_t> out;
  out.reserve(live_count());
  for (std::uint64_t v = 0; v < n_; ++v)
    if (!removed_[v]) out.push_back(static_cast<std::uint32_t>(v));
  return out;
}

std::vector<std::uint32_t> Hypergraph::removed_vertices() const {
  std::vector<std::uint32_t> out;
  out.reserve(removed_count_);
  for (std::uint64_t v = 0; v < n_; ++v)
    if (removed_[v]) out.push_back(static_cast<std::uint32_t>(v));
  return out;
}

namespace {

bool next_content_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    const auto pos = line.find_first_not_of(" \t\r");
    if (pos != std::string::npos) return true;
  }
  return false;
}

}  // namespace

Hypergraph Hypergraph::load(std::istream& in) {
  std::string line;
  if (!next_content_line(in, line)) throw format_error("edge list: empty input");
  std::uint64_t n = 0, m = 0;
  std::uint32_t k = 0;
  {
    std::istringstream hdr(line);
    std::string extra;
    if (!(hdr >> n >> k >> m) || (hdr >> extra))
      throw format_error("edge list: header must be exactly 'n k m'");
  }
  std::vector<std::vector<std::uint32_t>> edges;
  edges.reserve(m);
  for (std::uint64_t e = 0; e < m; ++e) {
    if (!next_content_line(in, line))
      throw format_error("edge list: fewer than m edge lines");
    std::istringstream row(line);
    std::vector<std::uint32_t> verts;
    std::uint32_t v;
    while (row >> v) verts.push_back(v);
    if (!row.eof()) throw format_error("edge list: non-integer token in edge line");
    if (verts.size() != k)
      throw format_error("edge list: edge line does not hold exactly k ids");
    edges.push_back(std::move(verts));
  }
  std::vector<std::uint32_t> removed;
  if (next_content_line(in, line)) {
    std::istringstream row(line);
    std::string tag;
    row >> tag;
    if (tag != "removed:")
      throw format_error("edge list: unexpected trailing content");
    std::uint32_t v;
    while (row >> v) removed.push_back(v);
    if (!row.eof()) throw format_error("edge list: non-integer token in removed line");
    if (next_content_line(in, line))
      throw format_error("edge list: content after removed line");
  }
  return from_edge_list(n, k, edges, removed);
}

Hypergraph Hypergraph::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open edge list file: " + path);
  return load(in);
}

void Hypergraph::save(std::ostream& out) const {
  out << n_ << ' ' << k_ << ' ' << edge_count() << '\n';
  for (std::uint64_t e = 0; e < edge_count(); ++e) {
    const auto verts = edge(e);
    for (std::uint32_t i = 0; i < k_; ++i)
      out << verts[i] << (i + 1 == k_ ? '\n' : ' ');
  }
  if (removed_count_ > 0) {
    out << "removed:";
    for (std::uint32_t v : removed_vertices()) out << ' ' << v;
    out << '\n';
  }
}

void Hypergraph::save_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open output file: " + path);
  save(out);
  if (!out) throw io_error("failed writing edge list: " + path);
}

}  // namespace peelmc
