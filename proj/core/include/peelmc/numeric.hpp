#pragma once

#include <cmath>
#include <cstdint>
#include <span>

#include "peelmc/errors.hpp"

namespace peelmc {

// log C(n, k); -inf when k > n. Uses exact integer arithmetic for small
// cases and lgamma otherwise, so closed-form constants built from small
// binomials are exact to the ulp.
double log_choose(std::uint64_t n, std::uint64_t k);

// C(n, k) as a double; exact whenever the value fits in 2^53.
double choose_small(std::uint64_t n, std::uint64_t k);

// log(sum_i exp(x_i)) with the usual max shift; -inf for an empty or
// all -inf input. Accumulates with compensated summation.
double log_sum_exp(std::span<const double> xs);

// Natural-log binary entropy -x log x - (1-x) log(1-x) on [0, 1].
double entropy_nats(double x);

// Neumaier-compensated running sum, for long Monte Carlo reductions.
struct KahanSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::fabs(sum) >= std::fabs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }

  double value() const { return sum + comp; }
};

// Sample mean / standard error of the mean over a double sequence.
struct MeanStderr {
  double mean = 0.0;
  double stderr_mean = 0.0;
  std::uint64_t count = 0;
};
MeanStderr mean_stderr(std::span<const double> xs);

// Root of f on [lo, hi] by bisection. f(lo) and f(hi) must straddle zero.
// Runs until the bracket is below xtol (plus a hard iteration cap).
template <typename F>
double bisect(F&& f, double lo, double hi, double xtol) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (std::signbit(flo) == std::signbit(fhi))
    throw solver_error("bisect: endpoints do not bracket a root");
  for (int it = 0; it < 200 && hi - lo > xtol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = f(mid);
    if (fmid == 0.0) return mid;
    if (std::signbit(fmid) == std::signbit(flo)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Minimum of a unimodal f on [lo, hi] by golden-section search.
template <typename F>
double golden_min(F&& f, double lo, double hi, double xtol) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 400 && b - a > xtol; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace peelmc
