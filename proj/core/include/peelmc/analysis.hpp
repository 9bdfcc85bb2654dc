#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace peelmc {

// Closed-form apparatus for the phase transition of (k-r+2)-peeling when
// the edge count scales as m = mu * n^(r-1) / ell^(r-2). Everything here
// is deterministic numerics; the Monte Carlo side lives in harness.hpp.

// Critical density: mu_c(k, r) = (r-2)^(r-2) / (r (r-1)^(r-1) C(k, r)),
// with the 0^0 = 1 convention at r = 2, where it reduces to 1/(k(k-1)).
double mu_critical(std::uint32_t k, std::uint32_t r);

// Large-deviation rate of the collapsed walk E_bar at scaled time tau:
//   phi(mu, lambda, tau)
//     = mu (e^{(k-r+1) lambda} - 1) C(k, r-1) (1+tau)^{r-1} - lambda tau.
// phi(mu, 0, tau) = 0; it is strictly convex in lambda, and its lambda
// derivative at 0 is mu r C(k, r) (1+tau)^{r-1} - tau.
double phi(std::uint32_t k, std::uint32_t r, double mu, double lambda, double tau);

// Per-class rate for the high census coordinates, j in [k-r+2, k]:
//   phi_j = mu (e^lambda - 1) C(k, k-j) (1+tau)^{k-j}.
double phi_j(std::uint32_t k, std::uint32_t r, double mu, double lambda,
             double tau, std::uint32_t j);

// Subcritical landing point: for r >= 3 and mu < mu_c, the unique root in
// (0, 1/(r-2)) of mu = tau / (r C(k, r) (1+tau)^{r-1}). Empty at or above
// mu_c (returned with no value rather than an error, since callers probe
// both regimes).
std::optional<double> tau_star(std::uint32_t k, std::uint32_t r, double mu);

// Chernoff exponent per removed vertex for surviving past tau * ell steps
// in the subcritical regime: inf over lambda > 0 and tau' in (tau_star,
// tau) of phi. The inner infimum uses the closed-form stationary lambda
// clipped to lambda > 0; the outer one is a coarse grid plus golden
// section. Negative for tau > tau_star; approaches 0 as tau -> tau_star.
double subcritical_rate(std::uint32_t k, std::uint32_t r, double mu, double tau);

struct SolverDiagnostics {
  int iterations = 0;
  double residual_rho = 0.0;  // eq. rho residual at the reported point
  double residual_tau = 0.0;  // eq. tau residual at the reported point
  std::vector<std::string> warnings;
};

// Everything the threshold/rate computation knows about one (k, r, mu).
struct RateReport {
  std::uint32_t k = 0;
  std::uint32_t r = 0;
  double mu = 0.0;
  double mu_c = 0.0;
  std::optional<double> tau_star;
  std::optional<double> subcritical_exponent;      // inf over the full window
  std::optional<double> supercritical_exponent;    // sup_tau inf_{lambda<0} phi
  std::optional<double> supercritical_exponent_fp; // via the (rho, tau) system
  std::optional<double> rho;
  std::optional<double> tau_saddle;
  SolverDiagnostics diagnostics;

  std::string to_json() const;
};

// Supercritical survival exponent, computed two independent ways and both
// reported: (a) nested optimization sup_{tau>0} inf_{lambda<0} phi with the
// closed-form inner minimizer, and (b) the fixed-point system
//   rho = exp{ mu C(k, r-2) (1+tau)^{r-2} (k-r+2) (rho^{k-r+1} - 1) }
//   mu rho^{k-r+1} = tau / (C(k, r) r (1+tau)^{r-1})
// whose solution gives exp{exponent} = rho^{(1-(r-2)tau)/(r-1)}.
// Requires r >= 3 and mu > mu_c.
RateReport supercritical_rate(std::uint32_t k, std::uint32_t r, double mu);

// Composite report used by the CLI: mu_c always, plus whichever regime's
// numbers apply when mu is given.
RateReport threshold_report(std::uint32_t k, std::uint32_t r,
                            std::optional<double> mu);

// Exact moment generating function of the dominating walk, by backward
// substitution through the binomial-mixture transitions; no asymptotics.
struct MgfQuery {
  std::uint64_t n = 0;
  std::uint32_t k = 0;
  std::uint32_t r = 0;
  std::uint64_t m = 0;
  std::uint64_t ell = 0;
  std::uint64_t t = 0;
  double lambda = 0.0;
};

struct MgfValue {
  double log_value = 0.0;
  double value = 0.0;
};

// E[exp{lambda (E_bar(t) + t) / (k-r+1)}] with lambda = q.lambda.
MgfValue mgf_exact_dominating(const MgfQuery& q);

// The untransformed moment E[exp{lambda E_bar(t)}].
MgfValue mgf_exact_dominating_plain(const MgfQuery& q);

// log E[number of d-stopping sets of size l] in G_k(n, m, 0):
//   log C(n, l) + m log( sum_{s in {0} u [d, k]} C(l,s) C(n-l, k-s) / C(n,k) ).
// Returns -inf when no edge placement is compatible (and m >= 1).
double expected_stopping_sets_log(std::uint64_t n, std::uint32_t k,
                                  std::uint64_t m, std::uint32_t d,
                                  std::uint64_t l);

// Exponential growth rate of the expected 2-stopping-set count at linear
// size delta*n with m = gamma*n edges: h(delta) + gamma log(1 - k delta
// (1-delta)^{k-1}).
double linear_ss_rate(std::uint32_t k, double gamma, double delta);

// Smallest gamma whose linear rate stays at or below -1 across
// [alpha, 1-alpha], by bisection over a dense delta grid.
double linear_ss_gamma_alpha(std::uint32_t k, double alpha);

// First-moment decay exponent for small 2-stopping sets at size scale
// n^delta when m = mu n log n: exponent 1 - mu k (1-delta)^{k-1}, valid
// for delta below delta_mu = 1 - (mu k)^{-1/(k-1)}.
struct SmallSetBound {
  double exponent = 0.0;
  double delta_mu = 0.0;
};
SmallSetBound small_ss_bound(std::uint32_t k, double mu, double delta);

// Extinction fixed point rho = exp{mu k (rho^{k-1} - 1)} in (0, 1); the
// giant component covers a (1 - rho) fraction of vertices when
// mu > 1/(k(k-1)), and no such root exists below that.
std::optional<double> giant_component_rho(std::uint32_t k, double mu);

// r = 2 subcritical tail scale: k(k-1)mu / (1 - k(k-1)mu) for
// mu < 1/(k(k-1)); survival beyond tau*ell decays geometrically past it.
double subcritical_rate_r2(std::uint32_t k, double mu);

}  // namespace peelmc
