#include "peelmc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "peelmc/analysis.hpp"
#include "peelmc/chains.hpp"
#include "peelmc/errors.hpp"
#include "peelmc/numeric.hpp"
#include "peelmc/rng.hpp"

#ifndef PEELMC_VERSION
#define PEELMC_VERSION "0.0.0"
#endif

namespace peelmc {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Shortest decimal form that parses back to the identical double, so
// write -> read -> write is byte-stable.
std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char esc[8];
          std::snprintf(esc, sizeof(esc), "\\u%04x", c);
          out += esc;
        } else {
          out += c;
        }
    }
  }
  return out;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

template <typename T>
T parse_integer(const std::string& text, const char* what) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last)
    throw format_error(std::string("bad integer for ") + what + ": " + text);
  return value;
}

double parse_double(const std::string& text, const char* what) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last)
    throw format_error(std::string("bad number for ") + what + ": " + text);
  return value;
}

bool parse_bool(const std::string& text, const char* what) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw format_error(std::string("bad boolean for ") + what + ": " + text);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

double percentile(std::vector<double>& sorted_stats, double q) {
  const std::size_t b = sorted_stats.size();
  const double pos = q * static_cast<double>(b - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  const double w = pos - static_cast<double>(lo);
  return (1.0 - w) * sorted_stats[lo] + w * sorted_stats[hi];
}

double median_of(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t t = xs.size();
  if (t % 2 == 1) return xs[t / 2];
  return 0.5 * (xs[t / 2 - 1] + xs[t / 2]);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (k < 2) throw parameter_error("config: need k >= 2");
  if (r < 2 || r > k) throw parameter_error("config: need 2 <= r <= k");
  if (n_list.empty()) throw parameter_error("config: n_list is empty");
  if (mu_list.empty()) throw parameter_error("config: mu_list is empty");
  for (double mu : mu_list)
    if (!(mu >= 0.0) || !std::isfinite(mu))
      throw parameter_error("config: mu values must be finite and >= 0");
  if (trials < 1) throw parameter_error("config: need trials >= 1");
  if (!(near_full_cutoff > 0.0 && near_full_cutoff < 1.0))
    throw parameter_error("config: near_full_cutoff outside (0, 1)");
  if (!(near_zero_mult >= 0.0))
    throw parameter_error("config: near_zero_mult must be >= 0");
  if (ell_rule == EllRule::power && !(ell_beta > 0.0 && ell_beta < 1.0))
    throw parameter_error("config: power rule needs beta in (0, 1)");
  if (ell_rule == EllRule::fixed && ell_fixed < 1)
    throw parameter_error("config: fixed rule needs ell >= 1");
  if (max_incidences < 1) throw parameter_error("config: max_incidences < 1");
  for (std::uint64_t n : n_list) {
    if (n < k) throw parameter_error("config: n smaller than k");
    const std::uint64_t ell = ell_of(n);
    if (ell >= n) throw parameter_error("config: ell(n) >= n");
  }
}

std::vector<std::string> ExperimentConfig::range_warnings() const {
  std::vector<std::string> out;
  for (std::uint64_t n : n_list) {
    const std::uint64_t ell = ell_of(n);
    if (!(ell > 1 && static_cast<double>(ell) < static_cast<double>(n) / 4.0)) {
      std::ostringstream os;
      os << "ell(" << n << ") = " << ell << " is outside (1, n/4)";
      out.push_back(os.str());
    }
  }
  return out;
}

std::uint64_t ExperimentConfig::ell_of(std::uint64_t n) const {
  switch (ell_rule) {
    case EllRule::fixed:
      return ell_fixed;
    case EllRule::power: {
      const double v = std::pow(static_cast<double>(n), ell_beta);
      auto ell = static_cast<std::uint64_t>(std::ceil(v));
      return std::max<std::uint64_t>(ell, 1);
    }
    case EllRule::sqrt_n:
    default: {
      auto ell = static_cast<std::uint64_t>(
          std::ceil(std::sqrt(static_cast<double>(n))));
      while (ell * ell < n) ++ell;
      while (ell > 1 && (ell - 1) * (ell - 1) >= n) --ell;
      return ell;
    }
  }
}

std::uint64_t edges_for(double mu, std::uint64_t n, std::uint32_t r,
                        std::uint64_t ell) {
  if (r < 2) throw parameter_error("edges_for: need r >= 2");
  if (!(mu >= 0.0) || !std::isfinite(mu))
    throw parameter_error("edges_for: mu must be finite and >= 0");
  if (r > 2 && ell == 0)
    throw parameter_error("edges_for: the mu scaling needs ell >= 1 for r >= 3");
  const double num = mu * std::pow(static_cast<double>(n),
                                   static_cast<double>(r - 1));
  const double md = num / std::pow(static_cast<double>(ell),
                                   static_cast<double>(r - 2));
  if (!(md >= 0.0) || md > 9.0e15)
    throw capacity_error("edge count overflows the supported range");
  return static_cast<std::uint64_t>(std::floor(md));
}

std::uint64_t ExperimentConfig::m_of(std::uint64_t n, double mu) const {
  return edges_for(mu, n, r, ell_of(n));
}

std::uint32_t ExperimentConfig::effective_workers() const {
  if (workers > 0) return workers;
  if (const char* env = std::getenv("PEELMC_WORKERS")) {
    const auto parsed = std::strtoul(env, nullptr, 10);
    if (parsed >= 1) return static_cast<std::uint32_t>(parsed);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  while (std::getline(in, line)) {
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw format_error("config line without '=': " + stripped);
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key == "k") {
      cfg.k = parse_integer<std::uint32_t>(value, "k");
    } else if (key == "r") {
      cfg.r = parse_integer<std::uint32_t>(value, "r");
    } else if (key == "n_list") {
      cfg.n_list.clear();
      for (const auto& item : split(value, ','))
        cfg.n_list.push_back(parse_integer<std::uint64_t>(trim(item), "n_list"));
    } else if (key == "mu_list") {
      cfg.mu_list.clear();
      for (const auto& item : split(value, ','))
        cfg.mu_list.push_back(parse_double(trim(item), "mu_list"));
    } else if (key == "ell_rule") {
      if (value == "sqrt_n") {
        cfg.ell_rule = EllRule::sqrt_n;
      } else if (value.rfind("power:", 0) == 0) {
        cfg.ell_rule = EllRule::power;
        cfg.ell_beta = parse_double(value.substr(6), "ell_rule power");
      } else if (value.rfind("fixed:", 0) == 0) {
        cfg.ell_rule = EllRule::fixed;
        cfg.ell_fixed =
            parse_integer<std::uint64_t>(value.substr(6), "ell_rule fixed");
      } else {
        throw format_error("unknown ell_rule: " + value);
      }
    } else if (key == "trials") {
      cfg.trials = parse_integer<std::uint64_t>(value, "trials");
    } else if (key == "master_seed") {
      cfg.master_seed = parse_integer<std::uint64_t>(value, "master_seed");
    } else if (key == "record_traces") {
      cfg.record_traces = parse_bool(value, "record_traces");
    } else if (key == "output_path") {
      cfg.output_path = value;
    } else if (key == "workers") {
      cfg.workers = parse_integer<std::uint32_t>(value, "workers");
    } else if (key == "max_incidences") {
      cfg.max_incidences = parse_integer<std::uint64_t>(value, "max_incidences");
    } else if (key == "near_full_cutoff") {
      cfg.near_full_cutoff = parse_double(value, "near_full_cutoff");
    } else if (key == "near_zero_mult") {
      cfg.near_zero_mult = parse_double(value, "near_zero_mult");
    } else {
      throw format_error("unknown config key: " + key);
    }
  }
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open config file: " + path);
  return parse_config(in);
}

std::string config_to_json(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "{\"k\": " << cfg.k << ", \"r\": " << cfg.r << ", \"n_list\": [";
  for (std::size_t i = 0; i < cfg.n_list.size(); ++i)
    out << cfg.n_list[i] << (i + 1 < cfg.n_list.size() ? ", " : "");
  out << "], \"ell_rule\": \"";
  switch (cfg.ell_rule) {
    case EllRule::sqrt_n: out << "sqrt_n"; break;
    case EllRule::power: out << "power:" << fmt(cfg.ell_beta); break;
    case EllRule::fixed: out << "fixed:" << cfg.ell_fixed; break;
  }
  out << "\", \"mu_list\": [";
  for (std::size_t i = 0; i < cfg.mu_list.size(); ++i)
    out << fmt(cfg.mu_list[i]) << (i + 1 < cfg.mu_list.size() ? ", " : "");
  out << "], \"trials\": " << cfg.trials
      << ", \"master_seed\": " << cfg.master_seed
      << ", \"record_traces\": " << (cfg.record_traces ? "true" : "false")
      << ", \"output_path\": \"" << json_escape(cfg.output_path) << "\""
      << ", \"workers\": " << cfg.workers
      << ", \"max_incidences\": " << cfg.max_incidences
      << ", \"near_full_cutoff\": " << fmt(cfg.near_full_cutoff)
      << ", \"near_zero_mult\": " << fmt(cfg.near_zero_mult) << "}";
  return out.str();
}

std::string outcome_name(Outcome outcome) {
  switch (outcome) {
    case Outcome::near_zero: return "near_zero";
    case Outcome::partial: return "partial";
    case Outcome::near_full: return "near_full";
  }
  return "near_zero";
}

namespace {

Outcome outcome_from_name(const std::string& name) {
  if (name == "near_zero") return Outcome::near_zero;
  if (name == "partial") return Outcome::partial;
  if (name == "near_full") return Outcome::near_full;
  throw format_error("unknown outcome: " + name);
}

}  // namespace

Outcome classify_outcome(std::uint64_t removed, std::uint64_t n,
                         std::uint64_t ell, double near_full_cutoff,
                         double near_zero_mult) {
  if (ell >= n) throw parameter_error("classify_outcome: ell >= n");
  const double live = static_cast<double>(n - ell);
  if (static_cast<double>(removed) >= near_full_cutoff * live)
    return Outcome::near_full;
  if (static_cast<double>(removed) <=
      near_zero_mult * static_cast<double>(ell))
    return Outcome::near_zero;
  return Outcome::partial;
}

namespace {

constexpr const char* kTrialHeader =
    "k,r,n,ell,mu,m,seed,removed_count,removed_fraction,survived_to,outcome";

}  // namespace

void TrialTable::write_csv(std::ostream& out) const {
  out << kTrialHeader << '\n';
  for (const TrialRow& row : rows) {
    out << row.k << ',' << row.r << ',' << row.n << ',' << row.ell << ','
        << fmt(row.mu) << ',' << row.m << ',' << row.seed << ','
        << row.removed_count << ',' << fmt(row.removed_fraction) << ','
        << row.survived_to << ',' << outcome_name(row.outcome) << '\n';
  }
}

void TrialTable::write_json(std::ostream& out) const {
  out << "[\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const TrialRow& row = rows[i];
    out << "  {\"k\": " << row.k << ", \"r\": " << row.r
        << ", \"n\": " << row.n << ", \"ell\": " << row.ell
        << ", \"mu\": " << fmt(row.mu) << ", \"m\": " << row.m
        << ", \"seed\": " << row.seed
        << ", \"removed_count\": " << row.removed_count
        << ", \"removed_fraction\": " << fmt(row.removed_fraction)
        << ", \"survived_to\": " << row.survived_to << ", \"outcome\": \""
        << outcome_name(row.outcome) << "\"}"
        << (i + 1 < rows.size() ? ",\n" : "\n");
  }
  out << "]\n";
}

void write_table(const TrialTable& table, const std::string& path,
                 TableFormat format) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open for writing: " + path);
  if (format == TableFormat::csv)
    table.write_csv(out);
  else
    table.write_json(out);
  out.flush();
  if (!out) throw io_error("write failed: " + path);
}

TrialTable read_trials_csv(std::istream& in) {
  TrialTable table;
  std::string line;
  if (!std::getline(in, line)) throw format_error("trial csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTrialHeader)
    throw format_error("trial csv: unexpected header: " + line);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 11)
      throw format_error("trial csv: expected 11 fields: " + line);
    TrialRow row;
    row.k = parse_integer<std::uint32_t>(fields[0], "k");
    row.r = parse_integer<std::uint32_t>(fields[1], "r");
    row.n = parse_integer<std::uint64_t>(fields[2], "n");
    row.ell = parse_integer<std::uint64_t>(fields[3], "ell");
    row.mu = parse_double(fields[4], "mu");
    row.m = parse_integer<std::uint64_t>(fields[5], "m");
    row.seed = parse_integer<std::uint64_t>(fields[6], "seed");
    row.removed_count =
        parse_integer<std::uint64_t>(fields[7], "removed_count");
    row.removed_fraction = parse_double(fields[8], "removed_fraction");
    row.survived_to = parse_integer<std::uint64_t>(fields[9], "survived_to");
    row.outcome = outcome_from_name(fields[10]);
    table.rows.push_back(row);
  }
  return table;
}

TrialTable read_trials_json(std::istream& in) {
  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw format_error(std::string("trial json: ") + e.what());
  }
  if (!parsed.is_array()) throw format_error("trial json: expected an array");
  TrialTable table;
  try {
    for (const auto& item : parsed) {
      TrialRow row;
      row.k = item.at("k").get<std::uint32_t>();
      row.r = item.at("r").get<std::uint32_t>();
      row.n = item.at("n").get<std::uint64_t>();
      row.ell = item.at("ell").get<std::uint64_t>();
      row.mu = item.at("mu").get<double>();
      row.m = item.at("m").get<std::uint64_t>();
      row.seed = item.at("seed").get<std::uint64_t>();
      row.removed_count = item.at("removed_count").get<std::uint64_t>();
      row.removed_fraction = item.at("removed_fraction").get<double>();
      row.survived_to = item.at("survived_to").get<std::uint64_t>();
      row.outcome = outcome_from_name(item.at("outcome").get<std::string>());
      table.rows.push_back(row);
    }
  } catch (const nlohmann::json::exception& e) {
    throw format_error(std::string("trial json: ") + e.what());
  }
  return table;
}

TrialTable read_trials_file(const std::string& path, TableFormat format) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open for reading: " + path);
  return format == TableFormat::csv ? read_trials_csv(in)
                                    : read_trials_json(in);
}

namespace {

struct CellSpec {
  std::uint64_t index = 0;  // position in the full n x mu grid
  std::uint64_t n = 0;
  std::uint64_t ell = 0;
  double mu = 0.0;
  std::uint64_t m = 0;
  std::uint64_t seed = 0;  // derive_seed(master, index)
};

struct TrialJob {
  std::size_t cell_slot = 0;  // index into the kept-cell array
  std::uint64_t trial = 0;
  std::size_t row_slot = 0;
};

}  // namespace

TrialTable run_trials(const ExperimentConfig& cfg) {
  cfg.validate();
  TrialTable table;
  for (const std::string& w : cfg.range_warnings()) table.notes.push_back(w);

  std::vector<CellSpec> cells;
  std::uint64_t index = 0;
  for (std::uint64_t n : cfg.n_list) {
    for (double mu : cfg.mu_list) {
      CellSpec cell;
      cell.index = index++;
      cell.n = n;
      cell.ell = cfg.ell_of(n);
      cell.mu = mu;
      cell.m = cfg.m_of(n, mu);
      cell.seed = derive_seed(cfg.master_seed, cell.index);
      const double incid = static_cast<double>(cell.m) * cfg.k;
      if (incid > static_cast<double>(cfg.max_incidences)) {
        std::ostringstream os;
        os << "cell " << cell.index << " skipped: n = " << n << ", mu = "
           << fmt(mu) << " needs " << cell.m << " edges ("
           << static_cast<std::uint64_t>(incid) << " incidences > cap "
           << cfg.max_incidences << ")";
        table.notes.push_back(os.str());
        continue;
      }
      cells.push_back(cell);
    }
  }

  std::vector<TrialJob> jobs;
  jobs.reserve(cells.size() * cfg.trials);
  for (std::size_t c = 0; c < cells.size(); ++c)
    for (std::uint64_t trial = 0; trial < cfg.trials; ++trial)
      jobs.push_back({c, trial, c * cfg.trials + trial});

  table.rows.resize(jobs.size());
  std::vector<std::optional<PeelTrace>> cell_traces(
      cfg.record_traces ? cells.size() : 0);

  const auto run_one = [&](const TrialJob& job) {
    const CellSpec& cell = cells[job.cell_slot];
    EnsembleParams ep;
    ep.n = cell.n;
    ep.k = cfg.k;
    ep.m = cell.m;
    ep.ell = cell.ell;
    ep.seed = derive_seed(cell.seed, job.trial);
    ep.max_incidences = cfg.max_incidences;
    Hypergraph graph = Hypergraph::generate(ep);

    PeelConfig pc;
    pc.d = cfg.k - cfg.r + 2;
    pc.schedule = PeelSchedule::batch;
    pc.record_trace = cfg.record_traces && job.trial == 0;
    PeelResult result = peel_in_place(graph, pc);

    TrialRow row;
    row.k = cfg.k;
    row.r = cfg.r;
    row.n = cell.n;
    row.ell = cell.ell;
    row.mu = cell.mu;
    row.m = cell.m;
    row.seed = ep.seed;
    row.removed_count = result.removed_total;
    row.removed_fraction = static_cast<double>(result.removed_total) /
                           static_cast<double>(cell.n - cell.ell);
    row.survived_to = result.removed_total;
    row.outcome = classify_outcome(row.removed_count, cell.n, cell.ell,
                                   cfg.near_full_cutoff, cfg.near_zero_mult);
    table.rows[job.row_slot] = row;
    if (pc.record_trace && result.trace)
      cell_traces[job.cell_slot] = std::move(*result.trace);
  };

  const std::uint32_t workers = std::min<std::uint64_t>(
      cfg.effective_workers(), std::max<std::size_t>(jobs.size(), 1));
  if (workers <= 1) {
    for (const TrialJob& job : jobs) run_one(job);
  } else {
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&]() {
      for (;;) {
        if (failed.load(std::memory_order_relaxed)) return;
        const std::size_t i = next.fetch_add(1);
        if (i >= jobs.size()) return;
        try {
          run_one(jobs[i]);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          failed.store(true, std::memory_order_relaxed);
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::uint32_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  if (cfg.record_traces) {
    for (std::size_t c = 0; c < cells.size(); ++c)
      if (cell_traces[c])
        table.traces.push_back({cells[c].index, std::move(*cell_traces[c])});
  }
  return table;
}

namespace {

constexpr const char* kSweepHeader =
    "k,r,n,ell,mu,m,trials,near_full_fraction,near_full_ci_lo,"
    "near_full_ci_hi,median_removed_fraction,median_ci_lo,median_ci_hi,"
    "mu_c,near_critical";

}  // namespace

void SweepTable::write_csv(std::ostream& out) const {
  out << kSweepHeader << '\n';
  for (const SweepRow& row : rows) {
    out << row.k << ',' << row.r << ',' << row.n << ',' << row.ell << ','
        << fmt(row.mu) << ',' << row.m << ',' << row.trials << ','
        << fmt(row.near_full_fraction) << ',' << fmt(row.near_full_ci_lo)
        << ',' << fmt(row.near_full_ci_hi) << ','
        << fmt(row.median_removed_fraction) << ',' << fmt(row.median_ci_lo)
        << ',' << fmt(row.median_ci_hi) << ',' << fmt(row.mu_c) << ','
        << (row.near_critical ? "true" : "false") << '\n';
  }
}

void SweepTable::write_json(std::ostream& out) const {
  out << "[\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const SweepRow& row = rows[i];
    out << "  {\"k\": " << row.k << ", \"r\": " << row.r << ", \"n\": "
        << row.n << ", \"ell\": " << row.ell << ", \"mu\": " << fmt(row.mu)
        << ", \"m\": " << row.m << ", \"trials\": " << row.trials
        << ", \"near_full_fraction\": " << fmt(row.near_full_fraction)
        << ", \"near_full_ci_lo\": " << fmt(row.near_full_ci_lo)
        << ", \"near_full_ci_hi\": " << fmt(row.near_full_ci_hi)
        << ", \"median_removed_fraction\": "
        << fmt(row.median_removed_fraction)
        << ", \"median_ci_lo\": " << fmt(row.median_ci_lo)
        << ", \"median_ci_hi\": " << fmt(row.median_ci_hi)
        << ", \"mu_c\": " << fmt(row.mu_c) << ", \"near_critical\": "
        << (row.near_critical ? "true" : "false") << "}"
        << (i + 1 < rows.size() ? ",\n" : "\n");
  }
  out << "]\n";
}

SweepTable sweep_summary(const ExperimentConfig& cfg, const TrialTable& table) {
  SweepTable sweep;
  sweep.notes = table.notes;
  const double mu_c = mu_critical(cfg.k, cfg.r);

  std::size_t start = 0;
  std::uint64_t group = 0;
  while (start < table.rows.size()) {
    std::size_t stop = start;
    while (stop < table.rows.size() &&
           table.rows[stop].n == table.rows[start].n &&
           table.rows[stop].mu == table.rows[start].mu)
      ++stop;
    const std::size_t t = stop - start;

    std::vector<double> full(t), frac(t);
    for (std::size_t i = 0; i < t; ++i) {
      full[i] =
          table.rows[start + i].outcome == Outcome::near_full ? 1.0 : 0.0;
      frac[i] = table.rows[start + i].removed_fraction;
    }

    SweepRow row;
    row.k = table.rows[start].k;
    row.r = table.rows[start].r;
    row.n = table.rows[start].n;
    row.ell = table.rows[start].ell;
    row.mu = table.rows[start].mu;
    row.m = table.rows[start].m;
    row.trials = t;
    double full_sum = 0.0;
    for (double f : full) full_sum += f;
    row.near_full_fraction = full_sum / static_cast<double>(t);
    row.median_removed_fraction = median_of(frac);
    row.mu_c = mu_c;
    row.near_critical = std::fabs(row.mu - mu_c) <= 1e-9 * mu_c;

    // Percentile bootstrap on a stream tied to the group index, so the
    // summary is reproducible no matter how the table was produced.
    const int b = 1000;
    Rng rng = Rng::stream(derive_seed(cfg.master_seed, 0x626f6f74u), group);
    std::vector<double> boot_full(b), boot_median(b);
    std::vector<double> resample(t);
    for (int rep = 0; rep < b; ++rep) {
      double sum = 0.0;
      for (std::size_t i = 0; i < t; ++i) {
        const std::size_t pick = rng.uniform_below(t);
        sum += full[pick];
        resample[i] = frac[pick];
      }
      boot_full[rep] = sum / static_cast<double>(t);
      boot_median[rep] = median_of(resample);
    }
    std::sort(boot_full.begin(), boot_full.end());
    std::sort(boot_median.begin(), boot_median.end());
    row.near_full_ci_lo = percentile(boot_full, 0.025);
    row.near_full_ci_hi = percentile(boot_full, 0.975);
    row.median_ci_lo = percentile(boot_median, 0.025);
    row.median_ci_hi = percentile(boot_median, 0.975);

    sweep.rows.push_back(row);
    start = stop;
    ++group;
  }
  return sweep;
}

SweepTable sweep_transition(const ExperimentConfig& cfg) {
  return sweep_summary(cfg, run_trials(cfg));
}

std::optional<double> crossing_estimate(const SweepTable& table,
                                        std::uint64_t n) {
  std::vector<std::pair<double, double>> points;
  for (const SweepRow& row : table.rows)
    if (row.n == n) points.emplace_back(row.mu, row.near_full_fraction);
  std::sort(points.begin(), points.end());
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const auto [mu_a, f_a] = points[i];
    const auto [mu_b, f_b] = points[i + 1];
    if (f_a == 0.5) return mu_a;
    if ((f_a - 0.5) * (f_b - 0.5) <= 0.0 && f_a != f_b)
      return mu_a + (0.5 - f_a) * (mu_b - mu_a) / (f_b - f_a);
  }
  if (!points.empty() && points.back().second == 0.5)
    return points.back().first;
  return std::nullopt;
}

bool SurvivalReport::all_consistent() const {
  for (const SurvivalRow& row : rows)
    if (!row.consistent) return false;
  return true;
}

std::string SurvivalReport::to_json() const {
  std::ostringstream out;
  out << "{\"k\": " << k << ", \"r\": " << r << ", \"tau\": " << fmt(tau)
      << ", \"rows\": [\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const SurvivalRow& row = rows[i];
    out << "  {\"n\": " << row.n << ", \"ell\": " << row.ell << ", \"mu\": "
        << fmt(row.mu) << ", \"tau\": " << fmt(row.tau) << ", \"horizon\": "
        << row.horizon << ", \"trials\": " << row.trials << ", \"survived\": "
        << row.survived << ", \"empirical\": " << fmt(row.empirical)
        << ", \"std_error\": " << fmt(row.std_error) << ", \"bound_exponent\": "
        << (std::isfinite(row.bound_exponent) ? fmt(row.bound_exponent)
                                              : std::string("null"))
        << ", \"bound\": "
        << (std::isfinite(row.bound) ? fmt(row.bound) : std::string("null"))
        << ", \"asserted\": " << (row.asserted ? "true" : "false")
        << ", \"consistent\": " << (row.consistent ? "true" : "false")
        << ", \"regime\": \"" << json_escape(row.regime) << "\"}"
        << (i + 1 < rows.size() ? ",\n" : "\n");
  }
  out << "]}";
  return out.str();
}

SurvivalReport survival_vs_bound(const ExperimentConfig& cfg, double tau) {
  cfg.validate();
  if (!(tau > 0.0)) throw parameter_error("survival_vs_bound: need tau > 0");
  if (cfg.r < 3)
    throw parameter_error("survival_vs_bound: defined for r >= 3");
  const double mu_c = mu_critical(cfg.k, cfg.r);
  SurvivalReport report;
  report.k = cfg.k;
  report.r = cfg.r;
  report.tau = tau;

  std::uint64_t cell = 0;
  for (std::uint64_t n : cfg.n_list) {
    for (double mu : cfg.mu_list) {
      if (!(mu > 0.0 && mu < mu_c))
        throw parameter_error("survival_vs_bound: mu must lie in (0, mu_c)");
      SurvivalRow row;
      row.n = n;
      row.ell = cfg.ell_of(n);
      row.mu = mu;
      row.tau = tau;
      row.horizon = static_cast<std::uint64_t>(
          std::floor(tau * static_cast<double>(row.ell)));
      row.trials = cfg.trials;

      ChainParams params;
      params.n = n;
      params.k = cfg.k;
      params.r = cfg.r;
      params.m = cfg.m_of(n, mu);
      params.ell = row.ell;
      params.validate();

      const std::uint64_t cell_seed =
          derive_seed(derive_seed(cfg.master_seed, 0x73757276u), cell);
      std::uint64_t survived = 0;
      for (std::uint64_t trial = 0; trial < cfg.trials; ++trial) {
        Rng rng(derive_seed(cell_seed, trial));
        const ChainRun run =
            run_chain(ChainKind::exact, params, row.horizon, false, rng);
        if (run.survived) ++survived;
      }
      row.survived = survived;
      row.empirical =
          static_cast<double>(survived) / static_cast<double>(cfg.trials);
      row.std_error = std::sqrt(row.empirical * (1.0 - row.empirical) /
                                static_cast<double>(cfg.trials));

      const double ts = tau_star(cfg.k, cfg.r, mu).value();
      if (tau > ts && row.horizon >= 1) {
        row.asserted = true;
        row.bound_exponent = subcritical_rate(cfg.k, cfg.r, mu, tau);
        row.bound =
            std::exp(row.bound_exponent * static_cast<double>(row.ell));
        row.consistent = row.empirical <= row.bound + 3.0 * row.std_error;
        row.regime = "bounded";
      } else {
        row.asserted = false;
        row.bound_exponent = kNan;
        row.bound = kNan;
        row.consistent = true;
        row.regime = row.horizon < 1 ? "horizon rounds to zero"
                                     : "tau <= tau_star: no bound asserted";
      }
      report.rows.push_back(row);
      ++cell;
    }
  }
  return report;
}

namespace {

struct UnionFind {
  std::vector<std::uint32_t> parent;
  std::vector<std::uint32_t> size;

  explicit UnionFind(std::uint64_t n) : parent(n), size(n, 1) {
    for (std::uint64_t v = 0; v < n; ++v)
      parent[v] = static_cast<std::uint32_t>(v);
  }
  std::uint32_t find(std::uint32_t v) {
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size[a] < size[b]) std::swap(a, b);
    parent[b] = a;
    size[a] += size[b];
  }
};

}  // namespace

GiantReport giant_component_check(std::uint32_t k, double mu, std::uint64_t n,
                                  std::uint64_t trials,
                                  std::uint64_t master_seed) {
  if (k < 2) throw parameter_error("giant_component_check: need k >= 2");
  if (!(mu > 0.0)) throw parameter_error("giant_component_check: need mu > 0");
  if (n < k) throw parameter_error("giant_component_check: n < k");
  if (trials < 1) throw parameter_error("giant_component_check: trials < 1");

  GiantReport report;
  report.k = k;
  report.mu = mu;
  report.n = n;
  report.trials = trials;

  std::vector<double> fractions(trials);
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    EnsembleParams ep;
    ep.n = n;
    ep.k = k;
    ep.m = static_cast<std::uint64_t>(std::floor(mu * static_cast<double>(n)));
    ep.ell = 0;
    ep.seed = derive_seed(derive_seed(master_seed, 0x6769616eu), trial);
    const Hypergraph graph = Hypergraph::generate(ep);

    UnionFind uf(n);
    for (std::uint64_t e = 0; e < graph.edge_count(); ++e) {
      const auto verts = graph.edge(e);
      for (std::uint32_t i = 1; i < k; ++i) uf.unite(verts[0], verts[i]);
    }
    std::uint32_t largest = 0;
    for (std::uint64_t v = 0; v < n; ++v) {
      const std::uint32_t root = uf.find(static_cast<std::uint32_t>(v));
      largest = std::max(largest, uf.size[root]);
    }
    fractions[trial] = static_cast<double>(largest) / static_cast<double>(n);
  }

  const MeanStderr stats = mean_stderr(fractions);
  report.mean_fraction = stats.mean;
  report.std_error = stats.stderr_mean;
  const auto rho = giant_component_rho(k, mu);
  if (rho) {
    report.predicted_fraction = 1.0 - *rho;
    report.abs_diff = std::fabs(report.mean_fraction - *report.predicted_fraction);
  }
  report.asserted = rho.has_value() && n >= 1000;
  return report;
}

std::string GiantReport::to_json() const {
  std::ostringstream out;
  out << "{\"k\": " << k << ", \"mu\": " << fmt(mu) << ", \"n\": " << n
      << ", \"trials\": " << trials << ", \"mean_fraction\": "
      << fmt(mean_fraction) << ", \"std_error\": " << fmt(std_error)
      << ", \"predicted_fraction\": "
      << (predicted_fraction ? fmt(*predicted_fraction) : std::string("null"))
      << ", \"abs_diff\": "
      << (abs_diff ? fmt(*abs_diff) : std::string("null"))
      << ", \"asserted\": " << (asserted ? "true" : "false") << "}";
  return out.str();
}

std::string library_version() { return PEELMC_VERSION; }

std::string run_manifest_json(const ExperimentConfig& cfg,
                              double wall_seconds) {
  std::ostringstream out;
  out << "{\"version\": \"" << library_version() << "\", \"wall_seconds\": "
      << fmt(wall_seconds) << ", \"config\": " << config_to_json(cfg) << "}\n";
  return out.str();
}

}  // namespace peelmc
