#include <algorithm>
#include <array>
#include <cstdint>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "peelmc/errors.hpp"
#include "peelmc/hypergraph.hpp"

using namespace peelmc;

namespace {

// Small worked instance used across the suite: 5 vertices, 7 triples
// (one of them duplicated), vertex 0 pre-removed.
Hypergraph fixture() {
  return Hypergraph::from_edge_list(
      5, 3,
      {{0, 2, 4}, {0, 1, 3}, {1, 2, 4}, {0, 3, 4}, {1, 2, 4}, {0, 1, 2}, {0, 3, 4}},
      {0});
}

}  // namespace

TEST_CASE("from_edge_list builds the worked instance correctly") {
  Hypergraph h = fixture();
  CHECK(h.vertex_count() == 5);
  CHECK(h.arity() == 3);
  CHECK(h.edge_count() == 7);
  CHECK(h.removed_count() == 1);
  CHECK(h.live_count() == 4);
  CHECK(h.is_removed(0));
  CHECK_FALSE(h.is_removed(1));

  const std::array<std::uint32_t, 7> want_deg = {2, 2, 3, 2, 3, 2, 2};
  for (std::uint64_t e = 0; e < 7; ++e) CHECK(h.live_degree(e) == want_deg[e]);

  const std::vector<std::uint64_t> census = h.degree_census();
  CHECK(census == std::vector<std::uint64_t>{0, 0, 5, 2});

  // Edges are stored sorted regardless of input order.
  auto e0 = h.edge(0);
  CHECK(std::vector<std::uint32_t>(e0.begin(), e0.end()) ==
        std::vector<std::uint32_t>{0, 2, 4});

  CHECK(h.live_vertices() == std::vector<std::uint32_t>{1, 2, 3, 4});
  CHECK(h.removed_vertices() == std::vector<std::uint32_t>{0});
}

TEST_CASE("incident_edges lists every edge containing the vertex") {
  Hypergraph h = fixture();
  auto inc4 = h.incident_edges(4);
  std::vector<std::uint32_t> got(inc4.begin(), inc4.end());
  std::sort(got.begin(), got.end());
  CHECK(got == std::vector<std::uint32_t>{0, 2, 3, 4, 6});

  std::uint64_t total = 0;
  for (std::uint32_t v = 0; v < 5; ++v) total += h.incident_edges(v).size();
  CHECK(total == 7 * 3);
}

TEST_CASE("remove_vertex updates degrees and census; double removal rejected") {
  Hypergraph h = fixture();
  h.remove_vertex(4);
  CHECK(h.removed_count() == 2);
  CHECK(h.degree_census() == std::vector<std::uint64_t>{0, 3, 4, 0});
  CHECK_THROWS_AS(h.remove_vertex(4), state_error);
  CHECK_THROWS_AS(h.remove_vertex(9), parameter_error);
}

TEST_CASE("degree census always sums to the edge count") {
  Hypergraph h = fixture();
  for (std::uint32_t v : {1u, 2u, 3u}) {
    h.remove_vertex(v);
    std::uint64_t sum = 0;
    for (auto c : h.degree_census()) sum += c;
    CHECK(sum == h.edge_count());
  }
}

TEST_CASE("from_edge_list validation") {
  using V = std::vector<std::vector<std::uint32_t>>;
  CHECK_THROWS_AS(Hypergraph::from_edge_list(0, 3, V{}, {}), parameter_error);
  CHECK_THROWS_AS(Hypergraph::from_edge_list(2, 3, V{}, {}), parameter_error);
  CHECK_THROWS_AS(Hypergraph::from_edge_list(5, 3, V{{0, 1}}, {}), format_error);
  CHECK_THROWS_AS(Hypergraph::from_edge_list(5, 3, V{{0, 1, 1}}, {}), format_error);
  CHECK_THROWS_AS(Hypergraph::from_edge_list(5, 3, V{{0, 1, 5}}, {}), format_error);
  CHECK_THROWS_AS(Hypergraph::from_edge_list(5, 3, V{{0, 1, 2}}, {7}), format_error);
  CHECK_THROWS_AS(Hypergraph::from_edge_list(5, 3, V{{0, 1, 2}}, {1, 1}), format_error);
}

TEST_CASE("save/load round trip preserves edges and removals") {
  Hypergraph h = fixture();
  std::stringstream ss;
  h.save(ss);
  Hypergraph g = Hypergraph::load(ss);
  CHECK(g.vertex_count() == h.vertex_count());
  CHECK(g.arity() == h.arity());
  CHECK(g.edge_count() == h.edge_count());
  for (std::uint64_t e = 0; e < h.edge_count(); ++e) {
    auto a = h.edge(e), b = g.edge(e);
    CHECK(std::vector<std::uint32_t>(a.begin(), a.end()) ==
          std::vector<std::uint32_t>(b.begin(), b.end()));
  }
  CHECK(g.removed_vertices() == h.removed_vertices());

  // A second save must be byte-identical.
  std::stringstream ss2;
  g.save(ss2);
  std::stringstream ss3;
  h.save(ss3);
  CHECK(ss2.str() == ss3.str());
}

TEST_CASE("load accepts the documented text format") {
  std::stringstream ss("3 2 2\n0 1\n1 2\nremoved: 2\n");
  Hypergraph h = Hypergraph::load(ss);
  CHECK(h.vertex_count() == 3);
  CHECK(h.arity() == 2);
  CHECK(h.edge_count() == 2);
  CHECK(h.is_removed(2));

  std::stringstream no_removed("4 2 1\n2 3\n");
  Hypergraph g = Hypergraph::load(no_removed);
  CHECK(g.removed_count() == 0);
}

TEST_CASE("load rejects malformed input") {
  auto reject = [](const std::string& text) {
    std::stringstream ss(text);
    CHECK_THROWS_AS(Hypergraph::load(ss), format_error);
  };
  reject("");
  reject("3 2\n0 1\n");                  // missing m
  reject("3 2 1\n0\n");                  // short edge line
  reject("3 2 1\n0 1 2\n");              // long edge line
  reject("3 2 2\n0 1\n");                // fewer edges than promised
  reject("3 2 1\n0 3\n");                // vertex id out of range
  reject("3 2 1\n1 1\n");                // duplicate vertex in edge
  reject("3 2 1\n0 x\n");                // non-numeric token
  reject("3 2 1\n0 1\nremoved: 5\n");    // removed id out of range
  reject("3 2 1\n0 1\ngarbage here\n");  // trailing junk
}

TEST_CASE("generate honors parameters and regenerates from the seed") {
  EnsembleParams p;
  p.n = 50;
  p.k = 4;
  p.m = 200;
  p.ell = 7;
  p.seed = 99;
  Hypergraph a = Hypergraph::generate(p);
  CHECK(a.vertex_count() == 50);
  CHECK(a.arity() == 4);
  CHECK(a.edge_count() == 200);
  CHECK(a.removed_count() == 7);
  for (std::uint32_t v = 0; v < 50; ++v) CHECK(a.is_removed(v) == (v < 7));
  for (std::uint64_t e = 0; e < 200; ++e) {
    auto ed = a.edge(e);
    for (std::size_t i = 0; i + 1 < ed.size(); ++i) CHECK(ed[i] < ed[i + 1]);
    CHECK(ed.back() < 50);
  }

  Hypergraph b = Hypergraph::generate(p);
  std::stringstream sa, sb;
  a.save(sa);
  b.save(sb);
  CHECK(sa.str() == sb.str());

  p.seed = 100;
  Hypergraph c = Hypergraph::generate(p);
  std::stringstream sc;
  c.save(sc);
  CHECK(sc.str() != sa.str());
}

TEST_CASE("generated edges are uniform over k-subsets") {
  // k=2, n=4: six possible pairs, chi-square over a long stream.
  EnsembleParams p;
  p.n = 4;
  p.k = 2;
  p.m = 30000;
  p.ell = 0;
  p.seed = 31337;
  Hypergraph h = Hypergraph::generate(p);
  std::array<std::uint64_t, 16> count{};
  for (std::uint64_t e = 0; e < p.m; ++e) {
    auto ed = h.edge(e);
    count[ed[0] * 4 + ed[1]] += 1;
  }
  const double expect = p.m / 6.0;
  double chi2 = 0.0;
  for (std::uint32_t a = 0; a < 4; ++a)
    for (std::uint32_t b = a + 1; b < 4; ++b) {
      const double d = static_cast<double>(count[a * 4 + b]) - expect;
      chi2 += d * d / expect;
    }
  // df = 5; 0.999 quantile is 20.5.
  CHECK(chi2 < 20.5);
}

TEST_CASE("ensemble validation and the incidence guard") {
  EnsembleParams p;
  p.n = 10;
  p.k = 3;
  p.m = 5;
  p.ell = 0;
  SUBCASE("k of zero") {
    p.k = 0;
    CHECK_THROWS_AS(Hypergraph::generate(p), parameter_error);
  }
  SUBCASE("k above n") {
    p.k = 11;
    CHECK_THROWS_AS(Hypergraph::generate(p), parameter_error);
  }
  SUBCASE("ell at n is rejected") {
    p.ell = 10;
    CHECK_THROWS_AS(Hypergraph::generate(p), parameter_error);
  }
  SUBCASE("incidence cap trips") {
    p.m = 100;
    p.max_incidences = 200;  // needs 300
    CHECK_THROWS_AS(Hypergraph::generate(p), capacity_error);
  }
}
