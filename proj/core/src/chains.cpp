#include "peelmc/chains.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "peelmc/errors.hpp"
#include "peelmc/hypergraph.hpp"
#include "peelmc/numeric.hpp"
#include "peelmc/peeling.hpp"

namespace peelmc {

void ChainParams::validate() const {
  if (n == 0) throw parameter_error("chain: n must be positive");
  if (k < 2) throw parameter_error("chain: need k >= 2");
  if (r < 2 || r > k) throw parameter_error("chain: need 2 <= r <= k");
  if (ell >= n) throw parameter_error("chain: need ell < n");
  if (live_at(0) <= static_cast<std::int64_t>(k))
    throw horizon_error("chain: n - ell must exceed k");
}

double p_init(std::uint64_t n, std::uint32_t k, std::uint64_t ell, std::uint32_t j) {
  if (n == 0 || k == 0 || k > n) throw parameter_error("p_init: need 1 <= k <= n");
  if (ell >= n) throw parameter_error("p_init: need ell < n");
  if (j > k) throw parameter_error("p_init: degree class above k");
  if (j > n - ell || k - j > ell) return 0.0;
  return std::exp(log_choose(n - ell, j) + log_choose(ell, k - j) -
                  log_choose(n, k));
}

std::vector<double> p_init_all(std::uint64_t n, std::uint32_t k, std::uint64_t ell) {
  std::vector<double> p(k + 1);
  for (std::uint32_t j = 0; j <= k; ++j) p[j] = p_init(n, k, ell, j);
  return p;
}

std::int64_t ExactState::active_mass(std::uint32_t low_max) const {
  std::int64_t e = 0;
  for (std::uint32_t j = 1; j <= low_max; ++j)
    e += static_cast<std::int64_t>(j) * census[j];
  return e;
}

std::int64_t ExactState::active_count(std::uint32_t low_max) const {
  std::int64_t c = 0;
  for (std::uint32_t j = 1; j <= low_max; ++j) c += census[j];
  return c;
}

ExactState init_exact(const ChainParams& params, Rng& rng) {
  params.validate();
  ExactState state;
  state.census = sample_multinomial(
      rng, static_cast<std::int64_t>(params.m),
      p_init_all(params.n, params.k, params.ell));
  return state;
}

namespace {

// Projection shared by the two bounding walks: keep C_j for j >= k-r+2,
// collapse the active classes into their degree mass E.
template <typename State>
State project_init(const ChainParams& params, Rng& rng) {
  const ExactState full = init_exact(params, rng);
  State state;
  state.t = 0;
  std::int64_t e = 0;
  for (std::uint32_t j = 1; j <= params.low_max(); ++j)
    e += static_cast<std::int64_t>(j) * full.census[j];
  state.tracked.assign(full.census.begin() + params.low_max() + 1,
                       full.census.end());
  if constexpr (requires(State& s) { s.e_bar; })
    state.e_bar = e;
  else
    state.e_under = e;
  return state;
}

std::int64_t checked_live(const ChainParams& params, std::uint64_t t) {
  const std::int64_t live = params.live_at(t);
  if (live <= static_cast<std::int64_t>(params.k))
    throw horizon_error("chain step: fewer than k+1 live vertices remain");
  return live;
}

}  // namespace

DominatingState init_dominating(const ChainParams& params, Rng& rng) {
  return project_init<DominatingState>(params, rng);
}

DominatedState init_dominated(const ChainParams& params, Rng& rng) {
  return project_init<DominatedState>(params, rng);
}

void step_exact(ExactState& state, const ChainParams& params, Rng& rng) {
  if (state.frozen) throw state_error("step_exact: chain is frozen");
  if (state.census.size() != params.k + 1)
    throw state_error("step_exact: census arity mismatch");
  for (std::int64_t c : state.census)
    if (c < 0) throw state_error("step_exact: negative census entry");

  const std::uint32_t low = params.low_max();
  const std::int64_t active = state.active_count(low);
  if (active == 0) {
    state.frozen = true;
    return;
  }
  const double live = static_cast<double>(checked_live(params, state.t));

  // The removed vertex belongs to one uniformly chosen active edge for
  // sure; class membership of that edge is proportional to C_j.
  std::uint32_t chosen = 1;
  {
    std::int64_t pick =
        static_cast<std::int64_t>(rng.uniform_below(static_cast<std::uint64_t>(active)));
    for (std::uint32_t j = 1; j <= low; ++j) {
      if (pick < state.census[j]) {
        chosen = j;
        break;
      }
      pick -= state.census[j];
    }
  }

  // Every other edge of live degree j contains the removed vertex
  // independently with probability j / N(t).
  std::vector<std::int64_t> flow(params.k + 2, 0);  // flow[j] = R_j
  for (std::uint32_t j = 1; j <= params.k; ++j) {
    std::int64_t count = state.census[j];
    std::int64_t certain = 0;
    if (j == chosen) {
      certain = 1;
      count -= 1;
    }
    flow[j] = certain +
              sample_binomial(rng, count, static_cast<double>(j) / live);
  }

  state.census[params.k] -= flow[params.k];
  for (std::uint32_t j = params.k - 1; j >= 1; --j)
    state.census[j] += flow[j + 1] - flow[j];
  state.census[0] += flow[1];
  ++state.t;
}

void step_dominating(DominatingState& state, const ChainParams& params, Rng& rng) {
  const std::uint32_t low = params.low_max();
  if (state.tracked.size() != params.r - 1)
    throw state_error("step_dominating: tracked class count mismatch");
  const double live = static_cast<double>(checked_live(params, state.t));

  // flow[i] pairs with class j = low+1+i.
  std::vector<std::int64_t> flow(state.tracked.size(), 0);
  for (std::size_t i = 0; i < state.tracked.size(); ++i) {
    const std::uint32_t j = low + 1 + static_cast<std::uint32_t>(i);
    if (state.tracked[i] < 0)
      throw state_error("step_dominating: negative class count");
    flow[i] = sample_binomial(rng, state.tracked[i],
                              static_cast<double>(j) / live);
  }
  state.e_bar += -1 + static_cast<std::int64_t>(low) * flow[0];
  for (std::size_t i = 0; i + 1 < state.tracked.size(); ++i)
    state.tracked[i] += flow[i + 1];
  ++state.t;
}

void step_dominated(DominatedState& state, const ChainParams& params, Rng& rng) {
  const std::uint32_t low = params.low_max();
  if (state.tracked.size() != params.r - 1)
    throw state_error("step_dominated: tracked class count mismatch");
  const std::int64_t live = checked_live(params, state.t);
  const std::int64_t drained = state.e_under + static_cast<std::int64_t>(state.t);
  if (drained < 0)
    throw state_error("step_dominated: negative binomial count E + t");

  std::vector<std::int64_t> flow(state.tracked.size(), 0);
  for (std::size_t i = 0; i < state.tracked.size(); ++i) {
    const std::uint32_t j = low + 1 + static_cast<std::uint32_t>(i);
    if (state.tracked[i] < 0)
      throw state_error("step_dominated: negative class count");
    flow[i] = sample_binomial(rng, state.tracked[i],
                              static_cast<double>(j) / static_cast<double>(live));
  }
  // Overcounted removals from the low classes: one extra candidate per
  // past step, each hitting with probability 1 / (N(t) - k + r).
  const std::int64_t extra = sample_binomial(
      rng, drained,
      1.0 / static_cast<double>(live - static_cast<std::int64_t>(params.k) +
                                static_cast<std::int64_t>(params.r)));
  state.tracked.back() -= flow.back();
  for (std::size_t i = 0; i + 1 < state.tracked.size(); ++i)
    state.tracked[i] += flow[i + 1] - flow[i];
  state.e_under += -1 - extra + static_cast<std::int64_t>(low) * flow[0];
  ++state.t;
}

std::string chain_kind_name(ChainKind kind) {
  switch (kind) {
    case ChainKind::exact: return "exact";
    case ChainKind::dominating: return "dominating";
    case ChainKind::dominated: return "dominated";
  }
  return "unknown";
}

namespace {

std::vector<std::int64_t> padded_census(const ChainParams& params,
                                        const std::vector<std::int64_t>& tracked) {
  std::vector<std::int64_t> census(params.k + 1, 0);
  for (std::size_t i = 0; i < tracked.size(); ++i)
    census[params.low_max() + 1 + i] = tracked[i];
  return census;
}

}  // namespace

ChainRun run_chain(ChainKind kind, const ChainParams& params, std::uint64_t horizon,
                   bool record_trace, Rng& rng) {
  params.validate();
  if (params.live_at(horizon) <= static_cast<std::int64_t>(params.k))
    throw horizon_error("run_chain: horizon too close to n - ell");

  ChainRun run;
  run.kind = kind;
  run.survived = true;
  run.steps_survived = horizon;
  if (record_trace)
    run.trace.emplace(ChainTrace{kind, params.k, params.r, {}});

  const auto note_death = [&](std::int64_t e, std::uint64_t s) {
    if (run.survived && e < 1) {
      run.survived = false;
      run.steps_survived = s;
    }
  };
  const auto record = [&](std::uint64_t t, std::int64_t chosen,
                          std::vector<std::int64_t> census, std::int64_t e) {
    if (run.trace)
      run.trace->rows.push_back(ChainStepRow{t, chosen, std::move(census), e});
  };

  if (kind == ChainKind::exact) {
    ExactState state = init_exact(params, rng);
    for (std::uint64_t s = 0; s < horizon; ++s) {
      note_death(state.active_mass(params.low_max()), s);
      if (!state.frozen) step_exact(state, params, rng);
      record(s + 1, -1, state.census, state.active_mass(params.low_max()));
    }
    run.t = horizon;
    run.census = state.census;
    run.e_value = state.active_mass(params.low_max());
  } else if (kind == ChainKind::dominating) {
    DominatingState state = init_dominating(params, rng);
    for (std::uint64_t s = 0; s < horizon; ++s) {
      note_death(state.e_bar, s);
      step_dominating(state, params, rng);
      record(state.t, -1, padded_census(params, state.tracked), state.e_bar);
    }
    run.t = state.t;
    run.census = padded_census(params, state.tracked);
    run.e_value = state.e_bar;
  } else {
    DominatedState state = init_dominated(params, rng);
    for (std::uint64_t s = 0; s < horizon; ++s) {
      note_death(state.e_under, s);
      step_dominated(state, params, rng);
      record(state.t, -1, padded_census(params, state.tracked), state.e_under);
    }
    run.t = state.t;
    run.census = padded_census(params, state.tracked);
    run.e_value = state.e_under;
  }
  return run;
}

void ChainTrace::write_csv(std::ostream& out) const {
  out << "kind,t,chosen_edge,n_removed_this_step";
  for (std::uint32_t j = 0; j <= k; ++j) out << ",C_" << j;
  out << ",E_low\n";
  const std::string name = chain_kind_name(kind);
  for (const ChainStepRow& row : rows) {
    out << name << ',' << row.t << ',' << row.chosen << ",1";
    for (std::int64_t c : row.census) out << ',' << c;
    out << ',' << row.e_value << '\n';
  }
}

void ChainTrace::write_csv_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open trace file: " + path);
  write_csv(out);
  if (!out) throw io_error("failed writing trace: " + path);
}

double DivergenceReport::max_abs_z() const {
  double hi = 0.0;
  for (const DivergenceRow& row : rows) hi = std::max(hi, std::fabs(row.z));
  return hi;
}

std::string DivergenceReport::to_json() const {
  std::ostringstream out;
  out.precision(17);
  out << "{\n  \"trials\": " << trials << ",\n  \"horizon\": " << horizon
      << ",\n  \"rows\": [\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const DivergenceRow& row = rows[i];
    out << "    {\"coordinate\": \"" << row.coordinate
        << "\", \"mean_a\": " << row.mean_a << ", \"mean_b\": " << row.mean_b
        << ", \"stderr\": " << row.stderr_combined << ", \"z\": " << row.z
        << '}' << (i + 1 < rows.size() ? "," : "") << '\n';
  }
  out << "  ]\n}\n";
  return out.str();
}

DivergenceReport graph_vs_chain_census(const ChainParams& params,
                                       std::uint64_t horizon, std::uint64_t trials) {
  params.validate();
  if (trials == 0) throw parameter_error("graph_vs_chain_census: need trials >= 1");
  const std::uint32_t d = params.k - params.r + 2;
  const std::uint32_t coords = params.k + 1;

  // Per-coordinate samples for both sides: C_0..C_k, E, survival.
  std::vector<std::vector<double>> a(coords + 2), b(coords + 2);
  for (auto& v : a) v.reserve(trials);
  for (auto& v : b) v.reserve(trials);

  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    {
      EnsembleParams gp;
      gp.n = params.n;
      gp.k = params.k;
      gp.m = params.m;
      gp.ell = params.ell;
      gp.seed = derive_seed(params.seed, 2 * trial);
      Hypergraph h = Hypergraph::generate(gp);
      PeelConfig cfg;
      cfg.d = d;
      cfg.schedule = PeelSchedule::one_vertex_per_step;
      cfg.rng_seed = derive_seed(gp.seed, 1);
      cfg.max_steps = horizon;
      const PeelResult res = peel_in_place(h, cfg);
      const auto census = h.degree_census();
      std::int64_t e_low = 0;
      for (std::uint32_t j = 1; j <= params.low_max(); ++j)
        e_low += static_cast<std::int64_t>(j) *
                 static_cast<std::int64_t>(census[j]);
      for (std::uint32_t j = 0; j < coords; ++j)
        a[j].push_back(static_cast<double>(census[j]));
      a[coords].push_back(static_cast<double>(e_low));
      a[coords + 1].push_back(res.removed_total >= horizon ? 1.0 : 0.0);
    }
    {
      Rng rng = Rng::stream(params.seed, 2 * trial + 1);
      const ChainRun run =
          run_chain(ChainKind::exact, params, horizon, false, rng);
      for (std::uint32_t j = 0; j < coords; ++j)
        b[j].push_back(static_cast<double>(run.census[j]));
      b[coords].push_back(static_cast<double>(run.e_value));
      b[coords + 1].push_back(run.survived ? 1.0 : 0.0);
    }
  }

  DivergenceReport report;
  report.trials = trials;
  report.horizon = horizon;
  for (std::uint32_t c = 0; c < coords + 2; ++c) {
    DivergenceRow row;
    row.coordinate = c < coords ? "C_" + std::to_string(c)
                     : c == coords ? "E_low"
                                   : "survival";
    const MeanStderr ma = mean_stderr(a[c]);
    const MeanStderr mb = mean_stderr(b[c]);
    row.mean_a = ma.mean;
    row.mean_b = mb.mean;
    row.stderr_combined = std::sqrt(ma.stderr_mean * ma.stderr_mean +
                                    mb.stderr_mean * mb.stderr_mean);
    const double diff = ma.mean - mb.mean;
    row.z = (row.stderr_combined > 0.0) ? diff / row.stderr_combined
            : (diff == 0.0)             ? 0.0
                          : std::numeric_limits<double>::infinity();
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace peelmc
