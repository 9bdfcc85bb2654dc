#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "peelmc/analysis.hpp"
#include "peelmc/errors.hpp"
#include "peelmc/harness.hpp"
#include "peelmc/rng.hpp"

using namespace peelmc;

namespace {

ExperimentConfig small_cfg() {
  ExperimentConfig cfg;
  cfg.k = 3;
  cfg.r = 3;
  cfg.n_list = {300};
  cfg.mu_list = {0.02, 0.15};
  cfg.trials = 6;
  cfg.master_seed = 12345;
  return cfg;
}

}  // namespace

TEST_CASE("ell rules") {
  ExperimentConfig cfg = small_cfg();
  CHECK(cfg.ell_of(10000) == 100);
  CHECK(cfg.ell_of(10001) == 101);  // ceil
  CHECK(cfg.ell_of(99) == 10);
  CHECK(cfg.ell_of(300) == 18);

  cfg.ell_rule = EllRule::power;
  cfg.ell_beta = 0.6;
  CHECK(cfg.ell_of(100000) == static_cast<std::uint64_t>(std::ceil(std::pow(1e5, 0.6))));

  cfg.ell_rule = EllRule::fixed;
  cfg.ell_fixed = 37;
  CHECK(cfg.ell_of(300) == 37);
}

TEST_CASE("edge-count scaling") {
  CHECK(edges_for(0.15, 10000, 3, 100) == 150000);
  CHECK(edges_for(0.04, 10000, 3, 100) == 40000);
  CHECK(edges_for(1.0, 100000, 2, 0) == 100000);  // ell drops out at r = 2
  CHECK(edges_for(0.0, 10000, 3, 100) == 0);
  // floor semantics
  CHECK(edges_for(0.0833333, 1000, 3, 32) == 2604);

  CHECK_THROWS_AS(edges_for(0.1, 1000, 1, 10), parameter_error);
  CHECK_THROWS_AS(edges_for(-0.1, 1000, 3, 10), parameter_error);
  CHECK_THROWS_AS(edges_for(0.1, 1000, 3, 0), parameter_error);
}

TEST_CASE("outcome classification") {
  // near_full wins when both cutoffs would apply.
  CHECK(classify_outcome(90, 100, 40, 0.9, 3.0) == Outcome::near_full);
  CHECK(classify_outcome(54, 100, 40, 0.9, 3.0) == Outcome::near_full);  // 0.9*60
  CHECK(classify_outcome(53, 100, 40, 0.9, 3.0) == Outcome::near_zero);
  CHECK(classify_outcome(30, 100, 5, 0.9, 3.0) == Outcome::partial);
  CHECK(classify_outcome(15, 100, 5, 0.9, 3.0) == Outcome::near_zero);
  CHECK(classify_outcome(16, 100, 5, 0.9, 3.0) == Outcome::partial);
  CHECK(classify_outcome(0, 100, 5, 0.9, 3.0) == Outcome::near_zero);
  CHECK_THROWS_AS(classify_outcome(5, 100, 100, 0.9, 3.0), parameter_error);
  CHECK(outcome_name(Outcome::near_full) == "near_full");
}

TEST_CASE("config validation") {
  ExperimentConfig cfg = small_cfg();
  CHECK_NOTHROW(cfg.validate());

  SUBCASE("empty n_list") {
    cfg.n_list.clear();
    CHECK_THROWS_AS(cfg.validate(), parameter_error);
  }
  SUBCASE("mu = 0 is allowed, negative is not") {
    cfg.mu_list = {0.0};
    CHECK_NOTHROW(cfg.validate());
    cfg.mu_list = {-0.1};
    CHECK_THROWS_AS(cfg.validate(), parameter_error);
  }
  SUBCASE("zero trials") {
    cfg.trials = 0;
    CHECK_THROWS_AS(cfg.validate(), parameter_error);
  }
  SUBCASE("bad cutoff") {
    cfg.near_full_cutoff = 1.5;
    CHECK_THROWS_AS(cfg.validate(), parameter_error);
  }
  SUBCASE("bad power beta") {
    cfg.ell_rule = EllRule::power;
    cfg.ell_beta = 1.2;
    CHECK_THROWS_AS(cfg.validate(), parameter_error);
  }
  SUBCASE("r above k") {
    cfg.r = 4;
    CHECK_THROWS_AS(cfg.validate(), parameter_error);
  }
}

TEST_CASE("range warnings fire when ell crowds n") {
  ExperimentConfig cfg = small_cfg();
  CHECK(cfg.range_warnings().empty());
  cfg.ell_rule = EllRule::fixed;
  cfg.ell_fixed = 100;  // n/4 = 75
  CHECK(!cfg.range_warnings().empty());
}

TEST_CASE("config file parsing round trip") {
  const std::string text =
      "# experiment grid\n"
      "k = 3\n"
      "r = 3\n"
      "n_list = 1000, 2000\n"
      "mu_list = 0.05, 0.1\n"
      "ell_rule = power:0.6\n"
      "trials = 4\n"
      "master_seed = 99\n"
      "record_traces = true\n"
      "workers = 2\n"
      "max_incidences = 1000000\n"
      "near_full_cutoff = 0.85\n"
      "near_zero_mult = 2.5\n"
      "output_path = /tmp/out.csv\n";
  std::istringstream in(text);
  ExperimentConfig cfg = parse_config(in);
  CHECK(cfg.k == 3);
  CHECK(cfg.n_list == std::vector<std::uint64_t>{1000, 2000});
  CHECK(cfg.mu_list == std::vector<double>{0.05, 0.1});
  CHECK(cfg.ell_rule == EllRule::power);
  CHECK(cfg.ell_beta == 0.6);
  CHECK(cfg.trials == 4);
  CHECK(cfg.master_seed == 99);
  CHECK(cfg.record_traces);
  CHECK(cfg.workers == 2);
  CHECK(cfg.max_incidences == 1000000);
  CHECK(cfg.near_full_cutoff == 0.85);
  CHECK(cfg.near_zero_mult == 2.5);
  CHECK(cfg.output_path == "/tmp/out.csv");

  const std::string js = config_to_json(cfg);
  CHECK(js.find("\"ell_rule\"") != std::string::npos);
  CHECK(js.find("\"mu_list\"") != std::string::npos);

  std::istringstream fixed("k = 3\nr = 3\nn_list = 50\nmu_list = 0.1\nell_rule = fixed:5\n");
  CHECK(parse_config(fixed).ell_fixed == 5);
}

TEST_CASE("config parser rejects junk") {
  auto reject = [](const std::string& text) {
    std::istringstream in(text);
    CHECK_THROWS_AS(parse_config(in), format_error);
  };
  reject("k 3\n");
  reject("unknown_key = 5\nk = 3\nr = 3\nn_list = 10\nmu_list = 0.1\n");
  reject("k = abc\nr = 3\nn_list = 10\nmu_list = 0.1\n");
  reject("k = 3\nr = 3\nn_list = 10\nmu_list = 0.1\nell_rule = cube\n");
}

TEST_CASE("run_trials is deterministic and worker-count independent") {
  ExperimentConfig cfg = small_cfg();
  cfg.workers = 1;
  TrialTable serial = run_trials(cfg);
  cfg.workers = 3;
  TrialTable parallel = run_trials(cfg);

  std::ostringstream a, b;
  serial.write_csv(a);
  parallel.write_csv(b);
  CHECK(a.str() == b.str());
  CHECK(serial.rows.size() == 12);  // 1 n x 2 mu x 6 trials

  // Same config again: bit-identical.
  cfg.workers = 1;
  TrialTable again = run_trials(cfg);
  std::ostringstream c;
  again.write_csv(c);
  CHECK(a.str() == c.str());
}

TEST_CASE("trial rows carry the documented derivation of seeds and sizes") {
  ExperimentConfig cfg = small_cfg();
  TrialTable table = run_trials(cfg);
  REQUIRE(table.rows.size() == 12);
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const TrialRow& row = table.rows[i];
    const std::uint64_t cell = i / 6, trial = i % 6;
    CHECK(row.n == 300);
    CHECK(row.ell == 18);
    CHECK(row.mu == cfg.mu_list[cell]);
    CHECK(row.m == edges_for(row.mu, 300, 3, 18));
    CHECK(row.seed == derive_seed(derive_seed(12345, cell), trial));
    CHECK(row.removed_count <= 300 - 18);
    CHECK(row.removed_fraction ==
          static_cast<double>(row.removed_count) / (300.0 - 18.0));
  }
}

TEST_CASE("mu = 0 yields empty graphs and not a single removal") {
  ExperimentConfig cfg = small_cfg();
  cfg.mu_list = {0.0};
  cfg.trials = 3;
  TrialTable table = run_trials(cfg);
  REQUIRE(table.rows.size() == 3);
  for (const TrialRow& row : table.rows) {
    CHECK(row.m == 0);
    CHECK(row.removed_count == 0);
    CHECK(row.survived_to == 0);
    CHECK(row.outcome == Outcome::near_zero);
  }
}

TEST_CASE("cells over the incidence cap are skipped with a note") {
  ExperimentConfig cfg = small_cfg();
  cfg.max_incidences = 1000;  // mu = 0.15 needs 750 edges * 3 > 1000
  TrialTable table = run_trials(cfg);
  CHECK(table.rows.size() == 6);  // only the mu = 0.02 cell ran
  for (const TrialRow& row : table.rows) CHECK(row.mu == 0.02);
  REQUIRE(!table.notes.empty());
  CHECK(table.notes.front().find("skipped") != std::string::npos);
  // Seeds of surviving cells still use their original cell index.
  CHECK(table.rows[0].seed == derive_seed(derive_seed(12345, 0), 0));
}

TEST_CASE("trace recording keeps one trace per cell") {
  ExperimentConfig cfg = small_cfg();
  cfg.record_traces = true;
  TrialTable table = run_trials(cfg);
  REQUIRE(table.traces.size() == 2);
  CHECK(table.traces[0].cell == 0);
  CHECK(table.traces[1].cell == 1);
}

TEST_CASE("CSV round trip is byte-stable") {
  TrialTable table = run_trials(small_cfg());
  std::ostringstream first;
  table.write_csv(first);
  std::istringstream in(first.str());
  TrialTable back = read_trials_csv(in);
  REQUIRE(back.rows.size() == table.rows.size());
  std::ostringstream second;
  back.write_csv(second);
  CHECK(first.str() == second.str());

  const TrialRow& a = table.rows[3];
  const TrialRow& b = back.rows[3];
  CHECK(a.seed == b.seed);
  CHECK(a.mu == b.mu);  // exact double round trip
  CHECK(a.removed_fraction == b.removed_fraction);
  CHECK(a.outcome == b.outcome);
}

TEST_CASE("JSON round trip is byte-stable") {
  TrialTable table = run_trials(small_cfg());
  std::ostringstream first;
  table.write_json(first);
  std::istringstream in(first.str());
  TrialTable back = read_trials_json(in);
  REQUIRE(back.rows.size() == table.rows.size());
  std::ostringstream second;
  back.write_json(second);
  CHECK(first.str() == second.str());
}

TEST_CASE("malformed tables are rejected") {
  std::istringstream bad_header("a,b,c\n");
  CHECK_THROWS_AS(read_trials_csv(bad_header), format_error);
  std::istringstream short_row(
      "k,r,n,ell,mu,m,seed,removed_count,removed_fraction,survived_to,outcome\n"
      "3,3,100\n");
  CHECK_THROWS_AS(read_trials_csv(short_row), format_error);
  std::istringstream not_array("{\"rows\": 3}");
  CHECK_THROWS_AS(read_trials_json(not_array), format_error);
  std::istringstream junk("][");
  CHECK_THROWS_AS(read_trials_json(junk), format_error);
}

TEST_CASE("sweep summary aggregates a hand-built table") {
  ExperimentConfig cfg;
  cfg.k = 3;
  cfg.r = 3;
  cfg.n_list = {100};
  cfg.mu_list = {0.1};
  cfg.trials = 8;
  cfg.master_seed = 5;

  TrialTable table;
  for (int i = 0; i < 8; ++i) {
    TrialRow row;
    row.k = 3;
    row.r = 3;
    row.n = 100;
    row.ell = 10;
    row.mu = 0.1;
    row.m = edges_for(0.1, 100, 3, 10);
    row.seed = static_cast<std::uint64_t>(i);
    const bool full = i < 4;
    row.removed_count = full ? 88 : 5;
    row.removed_fraction = row.removed_count / 90.0;
    row.survived_to = row.removed_count;
    row.outcome = full ? Outcome::near_full : Outcome::near_zero;
    table.rows.push_back(row);
  }

  SweepTable sweep = sweep_summary(cfg, table);
  REQUIRE(sweep.rows.size() == 1);
  const SweepRow& row = sweep.rows[0];
  CHECK(row.trials == 8);
  CHECK(row.near_full_fraction == 0.5);
  CHECK(row.near_full_ci_lo >= 0.0);
  CHECK(row.near_full_ci_lo <= 0.5);
  CHECK(row.near_full_ci_hi >= 0.5);
  CHECK(row.near_full_ci_hi <= 1.0);
  CHECK(row.median_removed_fraction >= 5.0 / 90.0);
  CHECK(row.median_removed_fraction <= 88.0 / 90.0);
  CHECK(row.mu_c == doctest::Approx(1.0 / 12.0));
  CHECK_FALSE(row.near_critical);

  std::ostringstream csv;
  sweep.write_csv(csv);
  CHECK(csv.str().find("near_full_fraction") != std::string::npos);
}

TEST_CASE("near-critical cells are flagged") {
  ExperimentConfig cfg = small_cfg();
  cfg.mu_list = {1.0 / 12.0};
  cfg.trials = 2;
  SweepTable sweep = sweep_transition(cfg);
  REQUIRE(sweep.rows.size() == 1);
  CHECK(sweep.rows[0].near_critical);
}

TEST_CASE("crossing interpolation") {
  SweepTable table;
  auto add = [&](std::uint64_t n, double mu, double frac) {
    SweepRow row;
    row.n = n;
    row.mu = mu;
    row.near_full_fraction = frac;
    table.rows.push_back(row);
  };
  add(100, 0.1, 0.2);
  add(100, 0.2, 0.8);
  add(200, 0.1, 0.1);
  add(200, 0.2, 0.3);
  auto cross = crossing_estimate(table, 100);
  REQUIRE(cross.has_value());
  CHECK(*cross == doctest::Approx(0.15).epsilon(1e-12));
  CHECK_FALSE(crossing_estimate(table, 200).has_value());
  CHECK_FALSE(crossing_estimate(table, 999).has_value());
}

TEST_CASE("survival report against the analytic bound") {
  ExperimentConfig cfg;
  cfg.k = 3;
  cfg.r = 3;
  cfg.n_list = {2000};
  cfg.mu_list = {0.05};
  cfg.trials = 400;
  cfg.master_seed = 777;

  SurvivalReport rep = survival_vs_bound(cfg, 0.4);
  REQUIRE(rep.rows.size() == 1);
  const SurvivalRow& row = rep.rows[0];
  CHECK(row.ell == 45);
  CHECK(row.horizon == 18);
  CHECK(row.trials == 400);
  CHECK(row.asserted);
  CHECK(row.regime == "bounded");
  CHECK(row.bound > 0.0);
  CHECK(row.empirical >= 0.0);
  CHECK(row.consistent);
  CHECK(rep.all_consistent());
  CHECK(rep.to_json().find("\"bound\"") != std::string::npos);

  // Below the landing point no bound is claimed.
  SurvivalReport low = survival_vs_bound(cfg, 0.1);
  CHECK_FALSE(low.rows[0].asserted);
  CHECK(low.rows[0].regime.find("no bound") != std::string::npos);

  cfg.mu_list = {0.2};  // above mu_c
  CHECK_THROWS_AS(survival_vs_bound(cfg, 0.4), parameter_error);
  cfg.mu_list = {0.05};
  CHECK_THROWS_AS(survival_vs_bound(cfg, 0.0), parameter_error);
}

TEST_CASE("giant component check gates its assertion") {
  GiantReport small = giant_component_check(2, 1.0, 500, 3, 99);
  CHECK(small.predicted_fraction.has_value());
  CHECK_FALSE(small.asserted);  // n too small to assert
  CHECK(small.mean_fraction > 0.0);
  CHECK(small.mean_fraction <= 1.0);
  CHECK(small.to_json().find("\"mean_fraction\"") != std::string::npos);

  GiantReport sub = giant_component_check(2, 0.3, 5000, 2, 99);
  CHECK_FALSE(sub.predicted_fraction.has_value());
  CHECK_FALSE(sub.asserted);

  CHECK_THROWS_AS(giant_component_check(1, 1.0, 100, 1, 0), parameter_error);
  CHECK_THROWS_AS(giant_component_check(2, 0.0, 100, 1, 0), parameter_error);
}

TEST_CASE("manifest and version") {
  CHECK(library_version() == "0.1.0");
  ExperimentConfig cfg = small_cfg();
  const std::string manifest = run_manifest_json(cfg, 1.25);
  CHECK(manifest.find("\"version\"") != std::string::npos);
  CHECK(manifest.find("0.1.0") != std::string::npos);
  CHECK(manifest.find("\"config\"") != std::string::npos);
}
