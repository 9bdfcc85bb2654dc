#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <vector>

#include "CLI11.hpp"
#include "peelmc/analysis.hpp"
#include "peelmc/chains.hpp"
#include "peelmc/errors.hpp"
#include "peelmc/harness.hpp"
#include "peelmc/hypergraph.hpp"
#include "peelmc/numeric.hpp"
#include "peelmc/peeling.hpp"
#include "peelmc/rng.hpp"

namespace peelmc::cli {
namespace {

// Fixed 12-significant-digit output, so runs diff cleanly.
std::string fmt12(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%#.12g", v);
  return buf;
}

std::string set_string(const std::vector<std::uint32_t>& xs) {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < xs.size(); ++i)
    os << xs[i] << (i + 1 < xs.size() ? ", " : "");
  os << '}';
  return os.str();
}

struct GenerateArgs {
  std::uint64_t n = 0;
  std::uint32_t k = 0;
  std::optional<std::uint64_t> m;
  std::optional<double> mu;
  std::uint32_t r = 0;
  std::uint64_t ell = 0;
  std::uint64_t seed = 0;
  std::uint64_t max_incidences = 200'000'000;
  std::string out_path;
};

int do_generate(const GenerateArgs& a, std::ostream& out, std::ostream& err) {
  std::uint64_t m = 0;
  if (a.m) {
    m = *a.m;
  } else if (a.mu) {
    if (a.r < 2) {
      err << "generate: --mu needs --r\n";
      return 2;
    }
    m = edges_for(*a.mu, a.n, a.r, a.ell);
  } else {
    err << "generate: give --m or --mu\n";
    return 2;
  }
  EnsembleParams ep;
  ep.n = a.n;
  ep.k = a.k;
  ep.m = m;
  ep.ell = a.ell;
  ep.seed = a.seed;
  ep.max_incidences = a.max_incidences;
  const Hypergraph graph = Hypergraph::generate(ep);
  if (a.out_path.empty())
    graph.save(out);
  else
    graph.save_file(a.out_path);
  return 0;
}

struct PeelArgs {
  std::string edges;
  std::uint64_t n = 0;
  std::uint32_t k = 0;
  std::optional<std::uint64_t> m;
  std::optional<double> mu;
  std::uint32_t r = 0;
  std::uint64_t ell = 0;
  std::uint64_t seed = 0;
  std::uint32_t d = 2;
  std::vector<std::uint32_t> remove;
  std::string schedule = "batch";
  std::uint64_t rng_seed = 0;
  std::uint64_t steps = 0;
  std::string trace_path;
};

int do_peel(const PeelArgs& a, std::ostream& out, std::ostream& err) {
  Hypergraph graph = [&] {
    if (!a.edges.empty()) return Hypergraph::load_file(a.edges);
    if (a.n == 0 || a.k == 0)
      throw parameter_error("peel: give --edges or --n/--k with --m or --mu");
    std::uint64_t m = 0;
    if (a.m) {
      m = *a.m;
    } else if (a.mu) {
      if (a.r < 2) throw parameter_error("peel: --mu needs --r");
      m = edges_for(*a.mu, a.n, a.r, a.ell);
    } else {
      throw parameter_error("peel: give --m or --mu");
    }
    EnsembleParams ep;
    ep.n = a.n;
    ep.k = a.k;
    ep.m = m;
    ep.ell = a.ell;
    ep.seed = a.seed;
    return Hypergraph::generate(ep);
  }();

  for (std::uint32_t v : a.remove) {
    if (v >= graph.vertex_count())
      throw parameter_error("peel: --remove id out of range");
    graph.remove_vertex(v);
  }

  PeelConfig pc;
  pc.d = a.d;
  pc.schedule = a.schedule == "one_vertex" ? PeelSchedule::one_vertex_per_step
                                           : PeelSchedule::batch;
  pc.rng_seed = a.rng_seed;
  pc.record_trace = !a.trace_path.empty();
  pc.max_steps = a.steps;
  const PeelResult result = peel_in_place(graph, pc);

  out << "removed = " << graph.removed_count()
      << ", remainder = " << set_string(result.remainder) << "\n";
  out << "remainder_edges = " << result.remainder_edges.size() << "\n";
  if (pc.record_trace && result.trace)
    result.trace->write_csv_file(a.trace_path);
  (void)err;
  return 0;
}

struct ChainArgs {
  std::string kind = "exact";
  std::uint64_t n = 0;
  std::uint32_t k = 0;
  std::uint32_t r = 0;
  std::uint64_t ell = 0;
  std::optional<std::uint64_t> m;
  std::optional<double> mu;
  std::uint64_t horizon = 0;
  std::uint64_t trials = 1;
  std::uint64_t seed = 0;
  std::string trace_path;
};

ChainKind kind_from_name(const std::string& name) {
  if (name == "exact") return ChainKind::exact;
  if (name == "dominating") return ChainKind::dominating;
  return ChainKind::dominated;
}

int do_chain(const ChainArgs& a, std::ostream& out, std::ostream& err) {
  std::uint64_t m = 0;
  if (a.m) {
    m = *a.m;
  } else if (a.mu) {
    m = edges_for(*a.mu, a.n, a.r, a.ell);
  } else {
    err << "chain: give --m or --mu\n";
    return 2;
  }
  if (!a.trace_path.empty() && a.trials != 1)
    throw parameter_error("chain: --trace needs --trials 1");

  ChainParams params;
  params.n = a.n;
  params.k = a.k;
  params.r = a.r;
  params.m = m;
  params.ell = a.ell;
  params.seed = a.seed;
  params.validate();

  const ChainKind kind = kind_from_name(a.kind);
  std::uint64_t survived = 0;
  KahanSum steps_sum, e_sum;
  std::optional<ChainTrace> trace;
  for (std::uint64_t trial = 0; trial < a.trials; ++trial) {
    Rng rng(derive_seed(a.seed, trial));
    ChainRun run =
        run_chain(kind, params, a.horizon, !a.trace_path.empty(), rng);
    if (run.survived) ++survived;
    steps_sum.add(static_cast<double>(run.steps_survived));
    e_sum.add(static_cast<double>(run.e_value));
    if (run.trace) trace = std::move(*run.trace);
  }

  out << "kind = " << chain_kind_name(kind) << "\n";
  out << "trials = " << a.trials << "\n";
  out << "survived = " << survived << "\n";
  out << "survival = "
      << fmt12(static_cast<double>(survived) / static_cast<double>(a.trials))
      << "\n";
  out << "mean_steps_survived = "
      << fmt12(steps_sum.value() / static_cast<double>(a.trials)) << "\n";
  out << "mean_E_T = " << fmt12(e_sum.value() / static_cast<double>(a.trials))
      << "\n";
  if (trace) trace->write_csv_file(a.trace_path);
  return 0;
}

struct MgfArgs {
  std::uint64_t n = 0;
  std::uint32_t k = 0;
  std::uint32_t r = 0;
  std::uint64_t ell = 0;
  std::optional<std::uint64_t> m;
  std::optional<double> mu;
  std::uint64_t t = 0;
  double lambda = 0.0;
  bool plain = false;
  std::uint64_t mc = 0;
  std::uint64_t seed = 0;
};

int do_mgf(const MgfArgs& a, std::ostream& out, std::ostream& err) {
  std::uint64_t m = 0;
  if (a.m) {
    m = *a.m;
  } else if (a.mu) {
    m = edges_for(*a.mu, a.n, a.r, a.ell);
  } else {
    err << "mgf: give --m or --mu\n";
    return 2;
  }
  MgfQuery q;
  q.n = a.n;
  q.k = a.k;
  q.r = a.r;
  q.m = m;
  q.ell = a.ell;
  q.t = a.t;
  q.lambda = a.lambda;
  const MgfValue value =
      a.plain ? mgf_exact_dominating_plain(q) : mgf_exact_dominating(q);
  out << "mgf = " << fmt12(value.value) << "\n";
  out << "log_mgf = " << fmt12(value.log_value) << "\n";

  if (a.mc > 0) {
    ChainParams params;
    params.n = a.n;
    params.k = a.k;
    params.r = a.r;
    params.m = m;
    params.ell = a.ell;
    params.seed = a.seed;
    params.validate();
    const double low = static_cast<double>(a.k - a.r + 1);
    std::vector<double> samples(a.mc);
    for (std::uint64_t i = 0; i < a.mc; ++i) {
      Rng rng(derive_seed(a.seed, i));
      const ChainRun run =
          run_chain(ChainKind::dominating, params, a.t, false, rng);
      const double e_bar = static_cast<double>(run.e_value);
      const double arg =
          a.plain ? a.lambda * e_bar
                  : a.lambda * (e_bar + static_cast<double>(a.t)) / low;
      samples[i] = std::exp(arg);
    }
    const MeanStderr st = mean_stderr(samples);
    out << "mc_estimate = " << fmt12(st.mean) << "\n";
    out << "mc_stderr = " << fmt12(st.stderr_mean) << "\n";
    out << "mc_trials = " << a.mc << "\n";
  }
  return 0;
}

struct ThresholdArgs {
  std::uint32_t k = 0;
  std::uint32_t r = 0;
  std::optional<double> mu;
};

int do_threshold(const ThresholdArgs& a, std::ostream& out) {
  const RateReport report = threshold_report(a.k, a.r, a.mu);
  out << "mu_c = " << fmt12(report.mu_c) << "\n";
  if (a.mu) {
    if (*a.mu < report.mu_c) {
      out << "regime = subcritical\n";
      if (report.tau_star) out << "tau_star = " << fmt12(*report.tau_star) << "\n";
      if (report.subcritical_exponent)
        out << "subcritical_exponent = " << fmt12(*report.subcritical_exponent)
            << "\n";
    } else if (*a.mu > report.mu_c) {
      out << "regime = supercritical\n";
      if (report.supercritical_exponent)
        out << "supercritical_exponent = "
            << fmt12(*report.supercritical_exponent) << "\n";
      if (report.supercritical_exponent_fp)
        out << "supercritical_exponent_fp = "
            << fmt12(*report.supercritical_exponent_fp) << "\n";
      if (report.rho) out << "rho = " << fmt12(*report.rho) << "\n";
      if (report.tau_saddle)
        out << "tau_saddle = " << fmt12(*report.tau_saddle) << "\n";
    } else {
      out << "regime = critical\n";
    }
  }
  out << report.to_json();
  return 0;
}

struct SweepArgs {
  std::string config;
  std::string out_path;
  std::optional<std::uint32_t> workers;
  std::string format = "csv";
};

int do_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg = parse_config_file(a.config);
  if (!a.out_path.empty()) cfg.output_path = a.out_path;
  if (a.workers) cfg.workers = *a.workers;
  cfg.validate();

  const auto t0 = std::chrono::steady_clock::now();
  const TrialTable table = run_trials(cfg);
  const SweepTable sweep = sweep_summary(cfg, table);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  for (const std::string& note : table.notes) err << "note: " << note << "\n";
  const TableFormat format =
      a.format == "json" ? TableFormat::json : TableFormat::csv;

  if (!cfg.output_path.empty()) {
    write_table(table, cfg.output_path, format);
    const std::string sweep_path =
        cfg.output_path +
        (format == TableFormat::csv ? ".sweep.csv" : ".sweep.json");
    {
      std::ofstream sf(sweep_path);
      if (!sf) throw io_error("cannot open for writing: " + sweep_path);
      if (format == TableFormat::csv)
        sweep.write_csv(sf);
      else
        sweep.write_json(sf);
    }
    const std::string manifest_path = cfg.output_path + ".manifest.json";
    {
      std::ofstream mf(manifest_path);
      if (!mf) throw io_error("cannot open for writing: " + manifest_path);
      mf << run_manifest_json(cfg, wall);
    }
    for (const CellTrace& ct : table.traces)
      ct.trace.write_csv_file(cfg.output_path + ".trace" +
                              std::to_string(ct.cell) + ".csv");
    err << "wrote " << cfg.output_path << ", " << sweep_path << ", "
        << manifest_path << "\n";
  }

  if (format == TableFormat::csv)
    sweep.write_csv(out);
  else
    sweep.write_json(out);
  return 0;
}

struct SurvivalArgs {
  std::string config;
  double tau = 0.0;
  std::uint32_t k = 3;
  std::uint32_t r = 3;
  std::optional<std::uint64_t> n;
  std::optional<double> mu;
  std::optional<std::uint64_t> ell;
  std::uint64_t trials = 1000;
  std::uint64_t seed = 0;
};

int do_survival(const SurvivalArgs& a, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg;
  if (!a.config.empty()) {
    cfg = parse_config_file(a.config);
  } else {
    if (!a.n || !a.mu) {
      err << "survival: give --config, or --n and --mu\n";
      return 2;
    }
    cfg.k = a.k;
    cfg.r = a.r;
    cfg.n_list = {*a.n};
    cfg.mu_list = {*a.mu};
    if (a.ell) {
      cfg.ell_rule = EllRule::fixed;
      cfg.ell_fixed = *a.ell;
    }
    cfg.trials = a.trials;
    cfg.master_seed = a.seed;
  }
  const SurvivalReport report = survival_vs_bound(cfg, a.tau);
  out << report.to_json() << "\n";
  if (!report.all_consistent()) {
    err << "survival: empirical survival exceeded the analytic bound\n";
    return 1;
  }
  return 0;
}

struct GiantArgs {
  std::uint32_t k = 2;
  double mu = 0.0;
  std::uint64_t n = 0;
  std::uint64_t trials = 50;
  std::uint64_t seed = 0;
};

int do_giant(const GiantArgs& a, std::ostream& out) {
  const GiantReport report =
      giant_component_check(a.k, a.mu, a.n, a.trials, a.seed);
  out << report.to_json() << "\n";
  return 0;
}

}  // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{
      "Peeling on random k-uniform hypergraphs: generation, degree-count "
      "chains, threshold rates, and Monte Carlo experiments"};
  app.name("peelmc");
  app.require_subcommand(1);

  GenerateArgs gen_args;
  auto* gen = app.add_subcommand(
      "generate", "Sample G_k(n, m, ell) and write it in the text format");
  gen->add_option("--n", gen_args.n, "vertex count")->required();
  gen->add_option("--k", gen_args.k, "edge arity")->required();
  auto* gen_m = gen->add_option("--m", gen_args.m, "edge count");
  auto* gen_mu =
      gen->add_option("--mu", gen_args.mu, "density; m = mu n^(r-1)/ell^(r-2)");
  gen_m->excludes(gen_mu);
  gen_mu->excludes(gen_m);
  gen->add_option("--r", gen_args.r, "scaling exponent for --mu");
  gen->add_option("--ell", gen_args.ell, "initially removed vertices");
  gen->add_option("--seed", gen_args.seed, "ensemble seed");
  gen->add_option("--max-incidences", gen_args.max_incidences,
                  "allocation cap on m*k");
  gen->add_option("--out", gen_args.out_path, "output file (default stdout)");

  PeelArgs peel_args;
  auto* peel_cmd =
      app.add_subcommand("peel", "Run d-peeling and report the remainder");
  peel_cmd->add_option("--edges", peel_args.edges, "graph file to load");
  peel_cmd->add_option("--n", peel_args.n, "vertex count (generate inline)");
  peel_cmd->add_option("--k", peel_args.k, "edge arity (generate inline)");
  auto* peel_m = peel_cmd->add_option("--m", peel_args.m, "edge count");
  auto* peel_mu = peel_cmd->add_option("--mu", peel_args.mu, "density");
  peel_m->excludes(peel_mu);
  peel_mu->excludes(peel_m);
  peel_cmd->add_option("--r", peel_args.r, "scaling exponent for --mu");
  peel_cmd->add_option("--ell", peel_args.ell, "initially removed vertices");
  peel_cmd->add_option("--seed", peel_args.seed, "ensemble seed");
  peel_cmd->add_option("--d", peel_args.d, "peeling degree threshold");
  peel_cmd
      ->add_option("--remove", peel_args.remove,
                   "vertex ids to remove before peeling")
      ->delimiter(',');
  peel_cmd
      ->add_option("--schedule", peel_args.schedule,
                   "batch or one_vertex")
      ->check(CLI::IsMember({"batch", "one_vertex"}));
  peel_cmd->add_option("--rng-seed", peel_args.rng_seed,
                       "stream for the one_vertex schedule");
  peel_cmd->add_option("--steps", peel_args.steps,
                       "stop the one_vertex schedule after this many removals");
  peel_cmd->add_option("--trace", peel_args.trace_path, "write a step CSV here");

  ChainArgs chain_args;
  auto* chain_cmd =
      app.add_subcommand("chain", "Run a degree-count chain to a horizon");
  chain_cmd
      ->add_option("--kind", chain_args.kind,
                   "exact, dominating, or dominated")
      ->check(CLI::IsMember({"exact", "dominating", "dominated"}));
  chain_cmd->add_option("--n", chain_args.n, "vertex count")->required();
  chain_cmd->add_option("--k", chain_args.k, "edge arity")->required();
  chain_cmd->add_option("--r", chain_args.r, "scaling exponent")->required();
  chain_cmd->add_option("--ell", chain_args.ell, "initially removed vertices")
      ->required();
  auto* chain_m = chain_cmd->add_option("--m", chain_args.m, "edge count");
  auto* chain_mu = chain_cmd->add_option("--mu", chain_args.mu, "density");
  chain_m->excludes(chain_mu);
  chain_mu->excludes(chain_m);
  chain_cmd->add_option("--t", chain_args.horizon, "steps to run")->required();
  chain_cmd->add_option("--trials", chain_args.trials, "independent runs");
  chain_cmd->add_option("--seed", chain_args.seed, "master seed");
  chain_cmd->add_option("--trace", chain_args.trace_path,
                        "write a step CSV here (needs --trials 1)");

  MgfArgs mgf_args;
  auto* mgf_cmd = app.add_subcommand(
      "mgf", "Exact moment generating function of the dominating walk");
  mgf_cmd->add_option("--n", mgf_args.n, "vertex count")->required();
  mgf_cmd->add_option("--k", mgf_args.k, "edge arity")->required();
  mgf_cmd->add_option("--r", mgf_args.r, "scaling exponent")->required();
  mgf_cmd->add_option("--ell", mgf_args.ell, "initially removed vertices")
      ->required();
  auto* mgf_m = mgf_cmd->add_option("--m", mgf_args.m, "edge count");
  auto* mgf_mu = mgf_cmd->add_option("--mu", mgf_args.mu, "density");
  mgf_m->excludes(mgf_mu);
  mgf_mu->excludes(mgf_m);
  mgf_cmd->add_option("--t", mgf_args.t, "time")->required();
  mgf_cmd->add_option("--lambda", mgf_args.lambda, "exponent argument");
  mgf_cmd->add_flag("--plain", mgf_args.plain,
                    "report E[exp(lambda E_bar)] instead of the scaled form");
  mgf_cmd->add_option("--mc", mgf_args.mc,
                      "cross-check with this many simulated runs");
  mgf_cmd->add_option("--seed", mgf_args.seed, "master seed for --mc");

  ThresholdArgs th_args;
  auto* th_cmd = app.add_subcommand(
      "threshold", "Critical density and large-deviation exponents");
  th_cmd->add_option("--k", th_args.k, "edge arity")->required();
  th_cmd->add_option("--r", th_args.r, "scaling exponent")->required();
  th_cmd->add_option("--mu", th_args.mu, "density to classify");

  SweepArgs sweep_args;
  auto* sweep_cmd =
      app.add_subcommand("sweep", "Run the experiment grid from a config file");
  sweep_cmd->add_option("--config", sweep_args.config, "key = value file")
      ->required();
  sweep_cmd->add_option("--out", sweep_args.out_path,
                        "override the config output_path");
  sweep_cmd->add_option("--workers", sweep_args.workers,
                        "override the worker count");
  sweep_cmd->add_option("--format", sweep_args.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  SurvivalArgs surv_args;
  auto* surv_cmd = app.add_subcommand(
      "survival", "Empirical chain survival vs the analytic bound");
  surv_cmd->add_option("--config", surv_args.config, "key = value file");
  surv_cmd->add_option("--tau", surv_args.tau, "horizon in units of ell")
      ->required();
  surv_cmd->add_option("--k", surv_args.k, "edge arity");
  surv_cmd->add_option("--r", surv_args.r, "scaling exponent");
  surv_cmd->add_option("--n", surv_args.n, "vertex count");
  surv_cmd->add_option("--mu", surv_args.mu, "density, below mu_c");
  surv_cmd->add_option("--ell", surv_args.ell, "fixed ell (default sqrt n)");
  surv_cmd->add_option("--trials", surv_args.trials, "independent runs");
  surv_cmd->add_option("--seed", surv_args.seed, "master seed");

  GiantArgs giant_args;
  auto* giant_cmd = app.add_subcommand(
      "giant", "Largest connected component vs the fixed-point prediction");
  giant_cmd->add_option("--k", giant_args.k, "edge arity");
  giant_cmd->add_option("--mu", giant_args.mu, "density; m = mu n")->required();
  giant_cmd->add_option("--n", giant_args.n, "vertex count")->required();
  giant_cmd->add_option("--trials", giant_args.trials, "independent runs");
  giant_cmd->add_option("--seed", giant_args.seed, "master seed");

  auto* appx = app.add_subcommand("appendix", "Closed-form side results");
  appx->require_subcommand(1);

  struct {
    std::uint64_t n = 0, m = 0, l = 0;
    std::uint32_t k = 0, d = 2;
  } count_args;
  auto* count_cmd = appx->add_subcommand(
      "count", "log of the expected d-stopping-set count at one size");
  count_cmd->add_option("--n", count_args.n, "vertex count")->required();
  count_cmd->add_option("--k", count_args.k, "edge arity")->required();
  count_cmd->add_option("--m", count_args.m, "edge count")->required();
  count_cmd->add_option("--d", count_args.d, "stopping-set degree");
  count_cmd->add_option("--l", count_args.l, "subset size")->required();

  struct {
    std::uint32_t k = 0;
    double gamma = 0.0, delta = 0.0;
  } lin_args;
  auto* lin_cmd = appx->add_subcommand(
      "linear-rate", "growth rate of expected counts at linear sizes");
  lin_cmd->add_option("--k", lin_args.k, "edge arity")->required();
  lin_cmd->add_option("--gamma", lin_args.gamma, "edges per vertex")->required();
  lin_cmd->add_option("--delta", lin_args.delta, "size fraction")->required();

  struct {
    std::uint32_t k = 0;
    double alpha = 0.0;
  } ling_args;
  auto* ling_cmd = appx->add_subcommand(
      "linear-gamma", "smallest gamma killing all linear sizes");
  ling_cmd->add_option("--k", ling_args.k, "edge arity")->required();
  ling_cmd->add_option("--alpha", ling_args.alpha, "size window edge")
      ->required();

  struct {
    std::uint32_t k = 0;
    double mu = 0.0, delta = 0.0;
  } small_args;
  auto* small_cmd = appx->add_subcommand(
      "small-sets", "first-moment exponent for polynomially small sets");
  small_cmd->add_option("--k", small_args.k, "edge arity")->required();
  small_cmd->add_option("--mu", small_args.mu, "density; m = mu n log n")
      ->required();
  small_cmd->add_option("--delta", small_args.delta, "size scale n^delta");

  struct {
    std::uint32_t k = 0;
    double mu = 0.0;
  } rho_args;
  auto* rho_cmd =
      appx->add_subcommand("giant-rho", "extinction fixed point rho");
  rho_cmd->add_option("--k", rho_args.k, "edge arity")->required();
  rho_cmd->add_option("--mu", rho_args.mu, "density; m = mu n")->required();

  struct {
    std::uint32_t k = 0;
    double mu = 0.0;
  } r2_args;
  auto* r2_cmd =
      appx->add_subcommand("r2-rate", "geometric tail scale in the r = 2 regime");
  r2_cmd->add_option("--k", r2_args.k, "edge arity")->required();
  r2_cmd->add_option("--mu", r2_args.mu, "density below 1/(k(k-1))")->required();

  try {
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen) return do_generate(gen_args, out, err);
    if (*peel_cmd) return do_peel(peel_args, out, err);
    if (*chain_cmd) return do_chain(chain_args, out, err);
    if (*mgf_cmd) return do_mgf(mgf_args, out, err);
    if (*th_cmd) return do_threshold(th_args, out);
    if (*sweep_cmd) return do_sweep(sweep_args, out, err);
    if (*surv_cmd) return do_survival(surv_args, out, err);
    if (*giant_cmd) return do_giant(giant_args, out);
    if (*appx) {
      if (*count_cmd) {
        const double value = expected_stopping_sets_log(
            count_args.n, count_args.k, count_args.m, count_args.d,
            count_args.l);
        out << "log_expected_count = " << fmt12(value) << "\n";
        out << "expected_count = " << fmt12(std::exp(value)) << "\n";
        return 0;
      }
      if (*lin_cmd) {
        out << "rate = "
            << fmt12(linear_ss_rate(lin_args.k, lin_args.gamma, lin_args.delta))
            << "\n";
        return 0;
      }
      if (*ling_cmd) {
        out << "gamma = "
            << fmt12(linear_ss_gamma_alpha(ling_args.k, ling_args.alpha))
            << "\n";
        return 0;
      }
      if (*small_cmd) {
        const SmallSetBound bound =
            small_ss_bound(small_args.k, small_args.mu, small_args.delta);
        out << "delta_mu = " << fmt12(bound.delta_mu) << "\n";
        out << "exponent = " << fmt12(bound.exponent) << "\n";
        return 0;
      }
      if (*rho_cmd) {
        const auto rho = giant_component_rho(rho_args.k, rho_args.mu);
        if (rho) {
          out << "rho = " << fmt12(*rho) << "\n";
          out << "giant_fraction = " << fmt12(1.0 - *rho) << "\n";
        } else {
          out << "rho = none\n";
          out << "note = mu at or below 1/(k(k-1)); no giant component\n";
        }
        return 0;
      }
      if (*r2_cmd) {
        out << "tail_scale = " << fmt12(subcritical_rate_r2(r2_args.k, r2_args.mu))
            << "\n";
        return 0;
      }
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace peelmc::cli
