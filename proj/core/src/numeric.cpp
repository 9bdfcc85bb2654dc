#include "peelmc/numeric.hpp"

#include <algorithm>
#include <limits>

namespace peelmc {

double choose_small(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0.0;
  if (k > n - k) k = n - k;
  double result = 1.0;
  for (std::uint64_t i = 1; i <= k; ++i) {
    result *= static_cast<double>(n - k + i);
    result /= static_cast<double>(i);
  }
  return result;
}

double log_choose(std::uint64_t n, std::uint64_t k) {
  if (k > n) return -std::numeric_limits<double>::infinity();
  if (k == 0 || k == n) return 0.0;
  // The multiplicative product is exact while it stays under 2^53; the
  // threshold below keeps C(62, 31) and everything smaller on that path.
  if (n <= 62) return std::log(choose_small(n, k));
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  return std::lgamma(nd + 1.0) - std::lgamma(kd + 1.0) -
         std::lgamma(nd - kd + 1.0);
}

double log_sum_exp(std::span<const double> xs) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double x : xs) hi = std::max(hi, x);
  if (!std::isfinite(hi)) return hi;
  KahanSum acc;
  for (double x : xs) acc.add(std::exp(x - hi));
  return hi + std::log(acc.value());
}

double entropy_nats(double x) {
  if (!(x >= 0.0 && x <= 1.0))
    throw parameter_error("entropy_nats: argument outside [0, 1]");
  double h = 0.0;
  if (x > 0.0) h -= x * std::log(x);
  if (x < 1.0) h -= (1.0 - x) * std::log(1.0 - x);
  return h;
}

MeanStderr mean_stderr(std::span<const double> xs) {
  MeanStderr out;
  out.count = xs.size();
  if (xs.empty()) return out;
  KahanSum sum;
  for (double x : xs) sum.add(x);
  out.mean = sum.value() / static_cast<double>(xs.size());
  if (xs.size() < 2) return out;
  KahanSum sq;
  for (double x : xs) {
    const double d = x - out.mean;
    sq.add(d * d);
  }
  const double var =
      sq.value() / static_cast<double>(xs.size() - 1);
  out.stderr_mean = std::sqrt(var / static_cast<double>(xs.size()));
  return out;
}

}  // namespace peelmc
