#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "peelmc/chains.hpp"
#include "peelmc/errors.hpp"
#include "peelmc/numeric.hpp"

using namespace peelmc;

namespace {

ChainParams toy() {
  ChainParams p;
  p.n = 30;
  p.k = 3;
  p.r = 3;
  p.m = 5;
  p.ell = 6;
  p.seed = 0;
  return p;
}

}  // namespace

TEST_CASE("initial degree-class law is hypergeometric and normalized") {
  // One edge keeps j of its 3 vertices when the 6 lowest ids are removed.
  const double denom = choose_small(30, 3);  // 4060
  CHECK(p_init(30, 3, 6, 0) == doctest::Approx(choose_small(6, 3) / denom).epsilon(1e-14));
  CHECK(p_init(30, 3, 6, 1) ==
        doctest::Approx(24.0 * choose_small(6, 2) / denom).epsilon(1e-14));
  CHECK(p_init(30, 3, 6, 3) == doctest::Approx(choose_small(24, 3) / denom).epsilon(1e-14));

  for (std::uint64_t ell : {0ull, 1ull, 6ull, 20ull}) {
    auto p = p_init_all(30, 3, ell);
    REQUIRE(p.size() == 4);
    double sum = 0.0;
    for (double x : p) sum += x;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }

  // Impossible classes carry zero weight.
  CHECK(p_init(30, 3, 1, 1) == 0.0);  // can't lose 2 vertices to a 1-set
  CHECK(p_init(30, 3, 0, 3) == 1.0);

  CHECK_THROWS_AS(p_init(30, 3, 30, 1), parameter_error);
  CHECK_THROWS_AS(p_init(30, 3, 6, 4), parameter_error);
}

TEST_CASE("parameter validation") {
  ChainParams p = toy();
  p.r = 4;  // r > k
  CHECK_THROWS_AS(p.validate(), parameter_error);
  p = toy();
  p.ell = 30;
  CHECK_THROWS_AS(p.validate(), parameter_error);
  p = toy();
  p.ell = 27;  // n - ell = k, one short of a usable pool
  CHECK_THROWS_AS(p.validate(), horizon_error);
  CHECK(toy().low_max() == 1);
  ChainParams q = toy();
  q.r = 2;
  CHECK(q.low_max() == 2);
}

TEST_CASE("exact chain conserves the census total") {
  ChainParams p = toy();
  p.n = 400;
  p.m = 300;
  p.ell = 40;
  Rng rng(1234);
  ExactState st = init_exact(p, rng);
  const auto total = [&] {
    return std::accumulate(st.census.begin(), st.census.end(), std::int64_t{0});
  };
  CHECK(total() == 300);
  for (int s = 0; s < 50 && !st.frozen; ++s) {
    step_exact(st, p, rng);
    CHECK(total() == 300);
    for (std::int64_t c : st.census) CHECK(c >= 0);
  }
}

TEST_CASE("exact chain freezes when no active edge remains, then rejects steps") {
  ChainParams p = toy();
  Rng rng(7);
  ExactState st = init_exact(p, rng);
  // Drive to termination; 5 edges cannot outlast 24 live vertices.
  int guard = 0;
  while (!st.frozen && ++guard < 30) step_exact(st, p, rng);
  REQUIRE(st.frozen);
  CHECK(st.active_count(p.low_max()) == 0);

  const auto census_at_freeze = st.census;
  const auto t_at_freeze = st.t;
  CHECK_THROWS_AS(step_exact(st, p, rng), state_error);
  CHECK(st.census == census_at_freeze);
  CHECK(st.t == t_at_freeze);
}

TEST_CASE("the freezing step itself does not advance time") {
  ChainParams p = toy();
  Rng rng(3);
  ExactState st = init_exact(p, rng);
  while (!st.frozen) {
    const std::uint64_t t_before = st.t;
    const bool was_active = st.active_count(p.low_max()) > 0;
    step_exact(st, p, rng);
    if (st.frozen)
      CHECK(st.t == t_before);  // nothing happened
    else
      CHECK((was_active && st.t == t_before + 1));
  }
}

TEST_CASE("dominating walk drift matches its binomial inflow") {
  // E[e_bar(1) - e_bar(0)] = -1 + low * E[R_{low+1}] with
  // R ~ Binom(C_{low+1}, (low+1)/N).
  ChainParams p = toy();
  p.n = 500;
  p.m = 200;
  p.ell = 50;
  const int trials = 20000;
  KahanSum diff, c2_over_n;
  for (int i = 0; i < trials; ++i) {
    Rng rng(derive_seed(2025, static_cast<std::uint64_t>(i)));
    DominatingState st = init_dominating(p, rng);
    const std::int64_t e0 = st.e_bar;
    const std::int64_t c2 = st.tracked[0];
    step_dominating(st, p, rng);
    diff.add(static_cast<double>(st.e_bar - e0));
    c2_over_n.add(static_cast<double>(c2) * 2.0 / static_cast<double>(p.live_at(0)));
  }
  const double mean_diff = diff.value() / trials;
  const double want = -1.0 + c2_over_n.value() / trials;
  CHECK(std::fabs(mean_diff - want) < 0.02);

  // The top class never changes.
  Rng rng(42);
  DominatingState st = init_dominating(p, rng);
  const std::int64_t top = st.tracked.back();
  for (int s = 0; s < 100; ++s) step_dominating(st, p, rng);
  CHECK(st.tracked.back() == top);
  CHECK(st.t == 100);
}

TEST_CASE("dominated walk keeps E + t nonnegative and drains monotonically") {
  ChainParams p = toy();
  p.n = 500;
  p.m = 200;
  p.ell = 50;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(derive_seed(77, seed));
    DominatedState st = init_dominated(p, rng);
    for (int s = 0; s < 200; ++s) {
      step_dominated(st, p, rng);
      CHECK(st.e_under + static_cast<std::int64_t>(st.t) >= 0);
    }
  }
}

TEST_CASE("stepping beyond the vertex pool raises horizon_error") {
  ChainParams p = toy();  // n - ell = 24, k = 3
  Rng rng(5);
  DominatingState st = init_dominating(p, rng);
  // N(t) = 24 - t must stay above k; the step at t = 21 sees N = 3.
  for (int s = 0; s < 21; ++s) step_dominating(st, p, rng);
  CHECK_THROWS_AS(step_dominating(st, p, rng), horizon_error);

  CHECK_THROWS_AS(run_chain(ChainKind::exact, p, 21, false, rng), horizon_error);
  CHECK_NOTHROW(run_chain(ChainKind::exact, p, 20, false, rng));
}

TEST_CASE("run_chain reports survival against the E >= 1 rule") {
  ChainParams p = toy();
  p.n = 2000;
  p.m = 500;
  p.ell = 100;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(derive_seed(31, seed));
    ChainRun run = run_chain(ChainKind::exact, p, 40, true, rng);
    CHECK(run.t == 40);
    REQUIRE(run.trace.has_value());
    CHECK(run.trace->rows.size() == 40);
    CHECK(run.survived == (run.steps_survived == 40));
    CHECK(run.steps_survived <= 40);
    if (!run.survived) {
      // After death the exact chain freezes, so E stays below 1 and the
      // census never changes again.
      const auto& rows = run.trace->rows;
      for (std::size_t i = run.steps_survived; i < rows.size(); ++i)
        CHECK(rows[i].e_value < 1);
    }
    // e_value in the run must match the last trace row.
    CHECK(run.trace->rows.back().e_value == run.e_value);
  }
}

TEST_CASE("chain trace CSV has the documented shape") {
  ChainParams p = toy();
  Rng rng(9);
  ChainRun run = run_chain(ChainKind::dominating, p, 5, true, rng);
  std::ostringstream out;
  run.trace->write_csv(out);
  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  CHECK(header == "kind,t,chosen_edge,n_removed_this_step,C_0,C_1,C_2,C_3,E_low");
  int rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(line.substr(0, 11) == "dominating,");
  }
  CHECK(rows == 5);
}

TEST_CASE("bounding walks bracket the exact survival frequency") {
  // Coarse version of the ordering check: 3000 runs per kind at a scale
  // where all three survival rates sit strictly inside (0, 1).
  ChainParams p;
  p.n = 2500;
  p.k = 3;
  p.r = 3;
  p.ell = 50;
  p.m = 6250;  // mu = 0.05 at this n, ell
  const std::uint64_t horizon = 25;
  const int trials = 3000;
  double surv[3] = {0, 0, 0};
  const ChainKind kinds[3] = {ChainKind::dominated, ChainKind::exact,
                              ChainKind::dominating};
  for (int kind = 0; kind < 3; ++kind) {
    for (int i = 0; i < trials; ++i) {
      Rng rng(derive_seed(1000 + kind, static_cast<std::uint64_t>(i)));
      if (run_chain(kinds[kind], p, horizon, false, rng).survived)
        surv[kind] += 1.0;
    }
    surv[kind] /= trials;
  }
  // Allow 4 combined standard errors of slack on each inequality.
  const auto se = [&](double f) { return std::sqrt(f * (1 - f) / trials); };
  CHECK(surv[0] <= surv[1] + 4 * std::hypot(se(surv[0]), se(surv[1])));
  CHECK(surv[1] <= surv[2] + 4 * std::hypot(se(surv[1]), se(surv[2])));
}

TEST_CASE("graph process and exact chain agree at a small scale") {
  ChainParams p;
  p.n = 60;
  p.k = 3;
  p.r = 2;
  p.m = 40;
  p.ell = 8;
  p.seed = 4242;
  DivergenceReport rep = graph_vs_chain_census(p, 10, 2000);
  CHECK(rep.trials == 2000);
  CHECK(rep.horizon == 10);
  REQUIRE(rep.rows.size() == 6);  // C_0..C_3, E, survival
  CHECK(rep.max_abs_z() < 5.0);
  CHECK(rep.to_json().find("\"coordinate\"") != std::string::npos);

  CHECK_THROWS_AS(graph_vs_chain_census(p, 10, 0), parameter_error);
}
