#include "peelmc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "peelmc/chains.hpp"
#include "peelmc/errors.hpp"
#include "peelmc/numeric.hpp"

namespace peelmc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_kr(std::uint32_t k, std::uint32_t r) {
  if (k < 2) throw parameter_error("need k >= 2");
  if (r < 2 || r > k) throw parameter_error("need 2 <= r <= k");
}

double ipow(double base, std::uint32_t e) {
  double out = 1.0;
  while (e > 0) {
    if (e & 1u) out *= base;
    base *= base;
    e >>= 1;
  }
  return out;
}

// (r-2)^(r-2) with the 0^0 = 1 convention used throughout.
double self_power(std::uint32_t a) { return a == 0 ? 1.0 : ipow(a, a); }

}  // namespace

double mu_critical(std::uint32_t k, std::uint32_t r) {
  require_kr(k, r);
  return self_power(r - 2) /
         (static_cast<double>(r) * ipow(static_cast<double>(r - 1), r - 1) *
          choose_small(k, r));
}

double phi(std::uint32_t k, std::uint32_t r, double mu, double lambda, double tau) {
  require_kr(k, r);
  if (!(mu >= 0.0)) throw parameter_error("phi: need mu >= 0");
  if (!(tau >= 0.0)) throw parameter_error("phi: need tau >= 0");
  const double low = static_cast<double>(k - r + 1);
  return mu * std::expm1(low * lambda) * choose_small(k, r - 1) *
             ipow(1.0 + tau, r - 1) -
         lambda * tau;
}

double phi_j(std::uint32_t k, std::uint32_t r, double mu, double lambda,
             double tau, std::uint32_t j) {
  require_kr(k, r);
  if (!(mu >= 0.0)) throw parameter_error("phi_j: need mu >= 0");
  if (!(tau >= 0.0)) throw parameter_error("phi_j: need tau >= 0");
  if (j < k - r + 2 || j > k)
    throw parameter_error("phi_j: class outside [k-r+2, k]");
  return mu * std::expm1(lambda) * choose_small(k, k - j) * ipow(1.0 + tau, k - j);
}

namespace {

// tau / (r C(k,r) (1+tau)^(r-1)), the curve whose peak value is mu_c.
double landing_curve(std::uint32_t k, std::uint32_t r, double tau) {
  return tau / (static_cast<double>(r) * choose_small(k, r) *
                ipow(1.0 + tau, r - 1));
}

// Stationary point of phi in lambda at fixed tau:
// e^{(k-r+1) lambda} = tau / (mu r C(k,r) (1+tau)^{r-1}).
double stationary_lambda(std::uint32_t k, std::uint32_t r, double mu, double tau) {
  return std::log(landing_curve(k, r, tau) / mu) /
         static_cast<double>(k - r + 1);
}

// inf over all real lambda of phi(mu, ., tau), attained at the stationary
// point; the caller restricts to the half-line it cares about.
double phi_at_stationary(std::uint32_t k, std::uint32_t r, double mu, double tau) {
  return phi(k, r, mu, stationary_lambda(k, r, mu, tau), tau);
}

}  // namespace

std::optional<double> tau_star(std::uint32_t k, std::uint32_t r, double mu) {
  require_kr(k, r);
  if (r < 3) throw parameter_error("tau_star: defined for r >= 3");
  if (!(mu > 0.0)) throw parameter_error("tau_star: need mu > 0");
  if (mu >= mu_critical(k, r)) return std::nullopt;
  const double peak = 1.0 / static_cast<double>(r - 2);
  const double root = bisect(
      [&](double tau) { return mu - landing_curve(k, r, tau); }, 1e-300, peak,
      1e-13);
  return root;
}

double subcritical_rate(std::uint32_t k, std::uint32_t r, double mu, double tau) {
  require_kr(k, r);
  if (r < 3) throw parameter_error("subcritical_rate: defined for r >= 3");
  const auto ts = tau_star(k, r, mu);
  if (!ts) throw parameter_error("subcritical_rate: mu is at or above mu_c");
  if (!(tau > *ts)) throw parameter_error("subcritical_rate: need tau > tau_star");

  // Beyond tau_upper the stationary lambda crosses back below 0 and the
  // infimum over lambda > 0 degenerates to 0, so the window stops there.
  double hi = 2.0 / static_cast<double>(r - 2);
  while (landing_curve(k, r, hi) > mu) hi *= 2.0;
  const double tau_upper = bisect(
      [&](double t) { return landing_curve(k, r, t) - mu; },
      1.0 / static_cast<double>(r - 2), hi, 1e-13);

  const double lo = *ts;
  const double up = std::min(tau, tau_upper);
  const auto inner = [&](double t) { return phi_at_stationary(k, r, mu, t); };

  // Coarse scan, then golden refinement around the best cell.
  const int cells = 256;
  double best_t = 0.5 * (lo + up);
  double best = kInf;
  for (int i = 1; i < cells; ++i) {
    const double t = lo + (up - lo) * i / cells;
    const double v = inner(t);
    if (v < best) {
      best = v;
      best_t = t;
    }
  }
  const double width = (up - lo) / cells;
  const double t_min = golden_min(inner, std::max(lo, best_t - width),
                                  std::min(up, best_t + width), 1e-10);
  return std::min(best, inner(t_min));
}

namespace {

// Reduced supercritical system: eliminate rho through the landing
// equation, leaving one equation in tau whose roots are the stationary
// points of the outer optimization.
struct FixedPointCurve {
  std::uint32_t k, r;
  double mu;

  double rho_of(double tau) const {
    return std::pow(landing_curve(k, r, tau) / mu,
                    1.0 / static_cast<double>(k - r + 1));
  }
  double growth_exponent(double tau, double rho) const {
    return mu * choose_small(k, r - 2) * ipow(1.0 + tau, r - 2) *
           static_cast<double>(k - r + 2) *
           (std::pow(rho, static_cast<double>(k - r + 1)) - 1.0);
  }
  double residual(double tau) const {
    const double rho = rho_of(tau);
    return std::log(rho) - growth_exponent(tau, rho);
  }
  double exponent(double tau) const {
    const double rho = rho_of(tau);
    return (1.0 - static_cast<double>(r - 2) * tau) /
           static_cast<double>(r - 1) * std::log(rho);
  }
};

}  // namespace

RateReport supercritical_rate(std::uint32_t k, std::uint32_t r, double mu) {
  require_kr(k, r);
  if (r < 3) throw parameter_error("supercritical_rate: defined for r >= 3");
  RateReport report;
  report.k = k;
  report.r = r;
  report.mu = mu;
  report.mu_c = mu_critical(k, r);
  if (!(mu > report.mu_c))
    throw parameter_error("supercritical_rate: need mu > mu_c");

  // (a) Nested optimization. The inner infimum over lambda < 0 is in
  // closed form (the stationary lambda is negative for every tau once
  // mu > mu_c), leaving a 1-D concave-looking profile to maximize.
  const auto profile = [&](double tau) { return phi_at_stationary(k, r, mu, tau); };
  const double tau_cap = 1e3;
  double hi = 2.0 / static_cast<double>(r - 2);
  double best_t = hi / 2.0;
  double best = -kInf;
  for (;;) {
    const int cells = 512;
    best = -kInf;
    for (int i = 1; i <= cells; ++i) {
      const double t = hi * i / cells;
      const double v = profile(t);
      if (v > best) {
        best = v;
        best_t = t;
      }
    }
    if (best_t < hi * (cells - 1.0) / cells) break;
    if (hi >= tau_cap) {  // maximum sat on the capped boundary
      report.diagnostics.warnings.push_back(
          "tau search capped at 1e3 with the maximum on the boundary");
      break;
    }
    hi = std::min(hi * 2.0, tau_cap);  // widen and rescan
  }
  const double width = hi / 512.0;
  const double t_peak =
      golden_min([&](double t) { return -profile(t); },
                 std::max(1e-12, best_t - width), best_t + width, 1e-11);
  report.supercritical_exponent = std::max(best, profile(t_peak));

  // (b) The fixed-point route: scan the reduced residual for sign
  // changes, bisect each bracket, and keep the stationary point with the
  // largest exponent.
  const FixedPointCurve curve{k, r, mu};
  double best_fp = -kInf;
  double tau_fp = 0.0;
  const int scan = 2048;
  double prev_tau = hi * 1.0 / scan;
  double prev_res = curve.residual(prev_tau);
  int brackets = 0;
  for (int i = 2; i <= scan; ++i) {
    const double t = hi * i / scan;
    const double res = curve.residual(t);
    if (std::isfinite(prev_res) && std::isfinite(res) &&
        std::signbit(prev_res) != std::signbit(res)) {
      ++brackets;
      double root = bisect([&](double x) { return curve.residual(x); },
                           prev_tau, t, 1e-14);
      // Newton polish on the residual.
      for (int it = 0; it < 4; ++it) {
        const double f = curve.residual(root);
        const double h = 1e-7 * std::max(1.0, root);
        const double df =
            (curve.residual(root + h) - curve.residual(root - h)) / (2.0 * h);
        if (df == 0.0 || !std::isfinite(df)) break;
        const double next = root - f / df;
        if (next > prev_tau && next < t) root = next;
      }
      const double value = curve.exponent(root);
      if (value > best_fp) {
        best_fp = value;
        tau_fp = root;
      }
    }
    prev_tau = t;
    prev_res = res;
  }
  report.diagnostics.iterations = brackets;
  if (brackets == 0)
    throw solver_error("supercritical_rate: no fixed point bracketed");

  const double rho = curve.rho_of(tau_fp);
  report.supercritical_exponent_fp = best_fp;
  report.rho = rho;
  report.tau_saddle = tau_fp;
  report.diagnostics.residual_rho =
      std::fabs(rho - std::exp(curve.growth_exponent(tau_fp, rho)));
  report.diagnostics.residual_tau =
      std::fabs(mu * std::pow(rho, static_cast<double>(k - r + 1)) -
                landing_curve(k, r, tau_fp));
  return report;
}

RateReport threshold_report(std::uint32_t k, std::uint32_t r,
                            std::optional<double> mu) {
  require_kr(k, r);
  RateReport report;
  report.k = k;
  report.r = r;
  report.mu_c = mu_critical(k, r);
  if (!mu) return report;
  report.mu = *mu;
  if (!(*mu > 0.0)) throw parameter_error("threshold_report: need mu > 0");
  if (r == 2) {
    if (*mu < report.mu_c)
      report.diagnostics.warnings.push_back(
          "r = 2: survival tail is geometric; see the r2 bound");
    else
      report.diagnostics.warnings.push_back("r = 2: above threshold");
    return report;
  }
  if (*mu < report.mu_c) {
    report.tau_star = tau_star(k, r, *mu);
    // Strongest horizon-free exponent: let the window run to its upper
    // endpoint by passing a tau beyond it.
    report.subcritical_exponent =
        subcritical_rate(k, r, *mu, 1e9);
  } else if (*mu > report.mu_c) {
    RateReport sup = supercritical_rate(k, r, *mu);
    report.supercritical_exponent = sup.supercritical_exponent;
    report.supercritical_exponent_fp = sup.supercritical_exponent_fp;
    report.rho = sup.rho;
    report.tau_saddle = sup.tau_saddle;
    report.diagnostics = sup.diagnostics;
  } else {
    report.diagnostics.warnings.push_back("mu equals mu_c exactly");
  }
  return report;
}

MgfValue mgf_exact_dominating(const MgfQuery& q) {
  ChainParams params;
  params.n = q.n;
  params.k = q.k;
  params.r = q.r;
  params.m = q.m;
  params.ell = q.ell;
  params.validate();
  if (params.live_at(q.t) <= static_cast<std::int64_t>(q.k))
    throw horizon_error("mgf: t too close to n - ell");

  const std::uint32_t low = q.k - q.r + 1;
  // lam[i] is the running exponent for class low+i; lam[0] is the fixed
  // argument attached to the collapsed walk and never changes.
  std::vector<double> lam(q.r, 0.0);
  lam[0] = q.lambda;
  // Walk the transition substitution from the last step back to the first:
  // each pass folds one binomial mixture into the class exponents, using
  // the live count of the step being folded.
  for (std::uint64_t s = 1; s <= q.t; ++s) {
    const double live = static_cast<double>(params.live_at(q.t - s));
    for (std::uint32_t i = q.r - 1; i >= 1; --i) {
      const double p = static_cast<double>(low + i) / live;
      lam[i] += std::log1p(p * std::expm1(lam[i - 1]));
    }
  }

  // Fold the multinomial start through the same mixture, normalizing by
  // the plain hypergeometric mass so lambda = 0 gives exactly 1.
  const std::vector<double> p0 = p_init_all(q.n, q.k, q.ell);
  std::vector<double> base(q.k + 1), shifted(q.k + 1);
  for (std::uint32_t j = 0; j <= q.k; ++j) {
    base[j] = p0[j] > 0.0 ? std::log(p0[j]) : -kInf;
    double w;
    if (j <= low)
      w = q.lambda * static_cast<double>(j) / static_cast<double>(low);
    else
      w = lam[j - low];
    shifted[j] = base[j] + w;
  }
  MgfValue out;
  out.log_value = static_cast<double>(q.m) *
                  (log_sum_exp(shifted) - log_sum_exp(base));
  out.value = std::exp(out.log_value);
  return out;
}

MgfValue mgf_exact_dominating_plain(const MgfQuery& q) {
  MgfQuery scaled = q;
  scaled.lambda = q.lambda * static_cast<double>(q.k - q.r + 1);
  MgfValue out = mgf_exact_dominating(scaled);
  out.log_value -= q.lambda * static_cast<double>(q.t);
  out.value = std::exp(out.log_value);
  return out;
}

double expected_stopping_sets_log(std::uint64_t n, std::uint32_t k,
                                  std::uint64_t m, std::uint32_t d,
                                  std::uint64_t l) {
  if (n == 0 || k == 0 || k > n)
    throw parameter_error("expected_stopping_sets_log: need 1 <= k <= n");
  if (d < 2 || d > k)
    throw parameter_error("expected_stopping_sets_log: need 2 <= d <= k");
  if (l > n) throw parameter_error("expected_stopping_sets_log: l > n");
  const double log_total = log_choose(n, k);
  std::vector<double> terms;
  terms.reserve(k + 2);
  for (std::uint32_t s = 0; s <= k; ++s) {
    if (s != 0 && s < d) continue;
    if (s > l || k - s > n - l) continue;
    terms.push_back(log_choose(l, s) + log_choose(n - l, k - s) - log_total);
  }
  const double log_q = log_sum_exp(terms);
  if (m == 0) return log_choose(n, l);
  return log_choose(n, l) + static_cast<double>(m) * log_q;
}

double linear_ss_rate(std::uint32_t k, double gamma, double delta) {
  if (k < 2) throw parameter_error("linear_ss_rate: need k >= 2");
  if (!(gamma >= 0.0)) throw parameter_error("linear_ss_rate: need gamma >= 0");
  if (!(delta > 0.0 && delta < 1.0))
    throw parameter_error("linear_ss_rate: need 0 < delta < 1");
  const double miss = static_cast<double>(k) * delta * ipow(1.0 - delta, k - 1);
  return entropy_nats(delta) + gamma * std::log1p(-miss);
}

double linear_ss_gamma_alpha(std::uint32_t k, double alpha) {
  if (!(alpha > 0.0 && alpha < 0.5))
    throw parameter_error("linear_ss_gamma_alpha: need 0 < alpha < 1/2");
  const int grid = 4096;
  const auto worst = [&](double gamma) {
    double hi = -kInf;
    for (int i = 0; i <= grid; ++i) {
      const double delta = alpha + (1.0 - 2.0 * alpha) * i / grid;
      hi = std::max(hi, linear_ss_rate(k, gamma, delta));
    }
    return hi;
  };
  double hi = 1.0;
  while (worst(hi) > -1.0) hi *= 2.0;
  return bisect([&](double g) { return worst(g) + 1.0; }, 0.0, hi, 1e-10);
}

SmallSetBound small_ss_bound(std::uint32_t k, double mu, double delta) {
  if (k < 2) throw parameter_error("small_ss_bound: need k >= 2");
  const double muk = mu * static_cast<double>(k);
  if (!(muk >= 1.0))
    throw parameter_error("small_ss_bound: need mu >= 1/k");
  SmallSetBound out;
  out.delta_mu = 1.0 - std::pow(muk, -1.0 / static_cast<double>(k - 1));
  if (delta != 0.0 && !(delta > 0.0 && delta < out.delta_mu))
    throw parameter_error("small_ss_bound: need 0 <= delta < delta_mu");
  out.exponent = 1.0 - muk * ipow(1.0 - delta, k - 1);
  return out;
}

std::optional<double> giant_component_rho(std::uint32_t k, double mu) {
  if (k < 2) throw parameter_error("giant_component_rho: need k >= 2");
  if (!(mu > 0.0)) throw parameter_error("giant_component_rho: need mu > 0");
  const double threshold =
      1.0 / (static_cast<double>(k) * static_cast<double>(k - 1));
  if (mu <= threshold) return std::nullopt;
  const double muk = mu * static_cast<double>(k);
  const auto f = [&](double rho) {
    return rho - std::exp(muk * (ipow(rho, k - 1) - 1.0));
  };
  double hi = 1.0 - 1e-3;
  while (f(hi) <= 0.0 && hi < 1.0 - 1e-15) hi = 0.5 * (hi + 1.0);
  if (f(hi) <= 0.0)
    throw solver_error("giant_component_rho: failed to bracket the root");
  return bisect(f, 1e-300, hi, 1e-14);
}

double subcritical_rate_r2(std::uint32_t k, double mu) {
  if (k < 2) throw parameter_error("subcritical_rate_r2: need k >= 2");
  const double scale = static_cast<double>(k) * static_cast<double>(k - 1) * mu;
  if (!(scale > 0.0 && scale < 1.0))
    throw parameter_error("subcritical_rate_r2: need 0 < k(k-1)mu < 1");
  return scale / (1.0 - scale);
}

namespace {

void json_field(std::ostream& out, const char* name, double value, bool comma) {
  out << "  \"" << name << "\": ";
  if (std::isfinite(value))
    out << value;
  else
    out << "null";
  out << (comma ? ",\n" : "\n");
}

void json_optional(std::ostream& out, const char* name,
                   const std::optional<double>& value, bool comma) {
  out << "  \"" << name << "\": ";
  if (value && std::isfinite(*value))
    out << *value;
  else
    out << "null";
  out << (comma ? ",\n" : "\n");
}

}  // namespace

std::string RateReport::to_json() const {
  std::ostringstream out;
  out.precision(17);
  out << "{\n";
  out << "  \"k\": " << k << ",\n  \"r\": " << r << ",\n";
  json_field(out, "mu", mu, true);
  json_field(out, "mu_c", mu_c, true);
  json_optional(out, "tau_star", tau_star, true);
  json_optional(out, "subcritical_exponent", subcritical_exponent, true);
  json_optional(out, "supercritical_exponent", supercritical_exponent, true);
  json_optional(out, "supercritical_exponent_fixed_point",
                supercritical_exponent_fp, true);
  json_optional(out, "rho", rho, true);
  json_optional(out, "tau_saddle", tau_saddle, true);
  out << "  \"diagnostics\": {\"iterations\": " << diagnostics.iterations
      << ", \"residual_rho\": " << diagnostics.residual_rho
      << ", \"residual_tau\": " << diagnostics.residual_tau
      << ", \"warnings\": [";
  for (std::size_t i = 0; i < diagnostics.warnings.size(); ++i)
    out << '"' << diagnostics.warnings[i] << '"'
        << (i + 1 < diagnostics.warnings.size() ? ", " : "");
  out << "]}\n}\n";
  return out.str();
}

}  // namespace peelmc
