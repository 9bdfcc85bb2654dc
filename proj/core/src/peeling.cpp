#include "peelmc/peeling.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <ostream>

#include "peelmc/errors.hpp"

namespace peelmc {

namespace {

void validate_peel_args(const Hypergraph& h, const PeelConfig& cfg) {
  if (cfg.d < 2 || cfg.d > h.arity())
    throw parameter_error("peel: need 2 <= d <= k");
  if (cfg.max_steps != 0 && cfg.schedule != PeelSchedule::one_vertex_per_step)
    throw parameter_error("peel: max_steps requires one_vertex_per_step");
}

std::uint64_t e_low_of(const std::vector<std::uint64_t>& census, std::uint32_t d) {
  std::uint64_t e = 0;
  for (std::uint32_t j = 1; j < d; ++j) e += static_cast<std::uint64_t>(j) * census[j];
  return e;
}

struct PeelEngine {
  Hypergraph& h;
  const std::uint32_t d;
  std::vector<std::uint64_t> census;

  explicit PeelEngine(Hypergraph& graph, std::uint32_t dd)
      : h(graph), d(dd), census(graph.degree_census()) {}

  bool active(std::uint64_t e) const {
    const std::uint32_t deg = h.live_degree(e);
    return deg >= 1 && deg < d;
  }

  // Removes v, keeping the census in sync; reports edges that just went
  // active (live degree hit d-1 from above) through `on_activated`.
  template <typename F>
  void remove_vertex(std::uint32_t v, F&& on_activated) {
    for (std::uint64_t e : h.incident_edges(v)) {
      const std::uint32_t deg = h.live_degree(e);
      --census[deg];
      ++census[deg - 1];
      if (deg == d) on_activated(e);
    }
    h.remove_vertex(v);
  }
};

PeelResult finish(Hypergraph& h, std::uint32_t d, std::uint64_t removed,
                  std::optional<PeelTrace> trace) {
  PeelResult result;
  result.remainder = h.live_vertices();
  for (std::uint64_t e = 0; e < h.edge_count(); ++e)
    if (h.live_degree(e) >= d) result.remainder_edges.push_back(e);
  result.removed_total = removed;
  result.trace = std::move(trace);
  return result;
}

PeelResult peel_batch(Hypergraph& h, const PeelConfig& cfg) {
  PeelEngine engine(h, cfg.d);
  std::optional<PeelTrace> trace;
  if (cfg.record_trace) trace.emplace(PeelTrace{h.arity(), cfg.d, {}});

  std::vector<std::uint64_t> queue;
  for (std::uint64_t e = 0; e < h.edge_count(); ++e)
    if (engine.active(e)) queue.push_back(e);

  std::uint64_t removed = 0;
  std::uint64_t steps = 0;
  std::vector<std::uint32_t> batch;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::uint64_t e = queue[head];
    if (!engine.active(e)) continue;  // degree moved out of range while queued
    batch.clear();
    const auto verts = h.edge(e);
    for (std::uint32_t v : verts)
      if (!h.is_removed(v)) batch.push_back(v);
    for (std::uint32_t v : batch)
      engine.remove_vertex(v, [&](std::uint64_t f) { queue.push_back(f); });
    removed += batch.size();
    if (trace) {
      ++steps;
      trace->steps.push_back(PeelStep{steps, static_cast<std::int64_t>(e), batch,
                                      engine.census,
                                      e_low_of(engine.census, cfg.d)});
    }
  }
  return finish(h, cfg.d, removed, std::move(trace));
}

// Active-edge set with O(1) uniform pick, insert, and erase.
struct ActiveSet {
  std::vector<std::uint32_t> items;
  std::vector<std::uint32_t> pos;  // edge id -> index in items, or npos
  static constexpr std::uint32_t npos = ~0u;

  explicit ActiveSet(std::uint64_t m)
      : pos(static_cast<std::size_t>(m), npos) {}

  void insert(std::uint64_t e) {
    pos[e] = static_cast<std::uint32_t>(items.size());
    items.push_back(static_cast<std::uint32_t>(e));
  }
  void erase(std::uint64_t e) {
    const std::uint32_t idx = pos[e];
    const std::uint32_t last = items.back();
    items[idx] = last;
    pos[last] = idx;
    items.pop_back();
    pos[e] = npos;
  }
  bool contains(std::uint64_t e) const { return pos[e] != npos; }
  bool empty() const { return items.empty(); }
};

PeelResult peel_one_vertex(Hypergraph& h, const PeelConfig& cfg) {
  PeelEngine engine(h, cfg.d);
  std::optional<PeelTrace> trace;
  if (cfg.record_trace) trace.emplace(PeelTrace{h.arity(), cfg.d, {}});

  ActiveSet active(h.edge_count());
  for (std::uint64_t e = 0; e < h.edge_count(); ++e)
    if (engine.active(e)) active.insert(e);

  Rng rng = Rng::stream(cfg.rng_seed, 1);
  std::uint64_t removed = 0;
  std::vector<std::uint32_t> live;
  while (!active.empty() && (cfg.max_steps == 0 || removed < cfg.max_steps)) {
    const std::uint64_t e = active.items[rng.uniform_below(active.items.size())];
    live.clear();
    for (std::uint32_t v : h.edge(e))
      if (!h.is_removed(v)) live.push_back(v);
    const std::uint32_t v = live[rng.uniform_below(live.size())];
    engine.remove_vertex(v, [&](std::uint64_t f) { active.insert(f); });
    // remove_vertex reported activations; edges that dropped to degree 0
    // leave the active set here (the chosen edge e included when it hits 0).
    for (std::uint64_t f : h.incident_edges(v))
      if (active.contains(f) && h.live_degree(f) == 0) active.erase(f);
    ++removed;
    if (trace)
      trace->steps.push_back(PeelStep{removed, static_cast<std::int64_t>(e),
                                      {v}, engine.census,
                                      e_low_of(engine.census, cfg.d)});
  }
  return finish(h, cfg.d, removed, std::move(trace));
}

}  // namespace

PeelResult peel_in_place(Hypergraph& h, const PeelConfig& cfg) {
  validate_peel_args(h, cfg);
  return cfg.schedule == PeelSchedule::batch ? peel_batch(h, cfg)
                                             : peel_one_vertex(h, cfg);
}

PeelResult peel(const Hypergraph& h, const PeelConfig& cfg) {
  Hypergraph copy = h;
  return peel_in_place(copy, cfg);
}

bool is_stopping_set(const Hypergraph& h, const std::vector<std::uint32_t>& s,
                     std::uint32_t d) {
  if (d < 2 || d > h.arity()) throw parameter_error("is_stopping_set: need 2 <= d <= k");
  std::vector<std::uint8_t> member(h.vertex_count(), 0);
  for (std::uint32_t v : s) {
    if (v >= h.vertex_count())
      throw parameter_error("is_stopping_set: vertex id out of range");
    if (h.is_removed(v))
      throw parameter_error("is_stopping_set: set contains a removed vertex");
    if (member[v]) throw parameter_error("is_stopping_set: duplicate vertex");
    member[v] = 1;
  }
  for (std::uint64_t e = 0; e < h.edge_count(); ++e) {
    std::uint32_t hit = 0;
    for (std::uint32_t v : h.edge(e)) hit += member[v];
    if (hit != 0 && hit < d) return false;
  }
  return true;
}

std::vector<std::uint32_t> max_stopping_set_bruteforce(const Hypergraph& h,
                                                       std::uint32_t d) {
  if (d < 2 || d > h.arity())
    throw parameter_error("max_stopping_set_bruteforce: need 2 <= d <= k");
  const std::vector<std::uint32_t> live = h.live_vertices();
  const std::uint32_t L = static_cast<std::uint32_t>(live.size());
  if (L > 22)
    throw capacity_error("max_stopping_set_bruteforce: more than 22 live vertices");

  // Each edge becomes a bitmask over the live-vertex indexing; a subset S
  // qualifies iff popcount(S & mask) is 0 or >= d for every edge.
  std::vector<std::uint32_t> index(h.vertex_count(), 0);
  for (std::uint32_t i = 0; i < L; ++i) index[live[i]] = i;
  std::vector<std::uint32_t> edge_masks;
  edge_masks.reserve(h.edge_count());
  for (std::uint64_t e = 0; e < h.edge_count(); ++e) {
    std::uint32_t mask = 0;
    for (std::uint32_t v : h.edge(e))
      if (!h.is_removed(v)) mask |= 1u << index[v];
    if (mask != 0) edge_masks.push_back(mask);
  }

  const auto qualifies = [&](std::uint32_t subset) {
    for (std::uint32_t mask : edge_masks) {
      const auto hit = static_cast<std::uint32_t>(std::popcount(subset & mask));
      if (hit != 0 && hit < d) return false;
    }
    return true;
  };

  for (std::uint32_t size = L; size > 0; --size) {
    // Gosper's hack walks all subsets of a given popcount in order.
    std::uint64_t subset = (1ull << size) - 1;
    const std::uint64_t limit = 1ull << L;
    while (subset < limit) {
      if (qualifies(static_cast<std::uint32_t>(subset))) {
        std::vector<std::uint32_t> out;
        for (std::uint32_t i = 0; i < L; ++i)
          if (subset & (1ull << i)) out.push_back(live[i]);
        return out;
      }
      const std::uint64_t c = subset & (~subset + 1);
      const std::uint64_t r = subset + c;
      subset = (((r ^ subset) >> 2) / c) | r;
    }
  }
  return {};  // only the empty set qualifies
}

SizeClass classify_size(std::uint64_t size, std::uint64_t n, double alpha) {
  if (!(alpha > 0.0 && alpha < 0.5))
    throw parameter_error("classify_size: need 0 < alpha < 1/2");
  if (size > n) throw parameter_error("classify_size: size exceeds n");
  if (size == 0) return SizeClass::empty;
  const auto small_hi = static_cast<std::uint64_t>(
      std::ceil(alpha * static_cast<double>(n)));
  const auto large_lo = static_cast<std::uint64_t>(
      std::floor((1.0 - alpha) * static_cast<double>(n))) + 1;
  if (size <= small_hi) return SizeClass::small;
  if (size >= large_lo) return SizeClass::large;
  return SizeClass::linear;
}

std::string size_class_name(SizeClass c) {
  switch (c) {
    case SizeClass::empty: return "empty";
    case SizeClass::small: return "small";
    case SizeClass::linear: return "linear";
    case SizeClass::large: return "large";
  }
  return "unknown";
}

void PeelTrace::write_csv(std::ostream& out) const {
  out << "t,chosen_edge,n_removed_this_step";
  for (std::uint32_t j = 0; j <= k; ++j) out << ",C_" << j;
  out << ",E_low\n";
  for (const PeelStep& s : steps) {
    out << s.t << ',' << s.chosen_edge << ',' << s.removed_vertices.size();
    for (std::uint64_t c : s.census_after) out << ',' << c;
    out << ',' << s.e_low << '\n';
  }
}

void PeelTrace::write_csv_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open trace file: " + path);
  write_csv(out);
  if (!out) throw io_error("failed writing trace: " + path);
}

}  // namespace peelmc
