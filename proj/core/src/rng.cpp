#include "peelmc/rng.hpp"

#include <cmath>
#include <limits>

#include "peelmc/errors.hpp"

namespace peelmc {

namespace {

inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t state = master;
  std::uint64_t h = splitmix64_next(state);
  state = h ^ stream;
  splitmix64_next(state);
  return splitmix64_next(state);
}

Rng::Rng(std::uint64_t seed) : seed_(seed) {
  std::uint64_t state = seed;
  for (auto& word : s_) word = splitmix64_next(state);
  // xoshiro256** must not start from the all-zero state; splitmix64 makes
  // that astronomically unlikely, but keep the guard explicit.
  if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 0x9E3779B97F4A7C15ULL;
}

Rng Rng::stream(std::uint64_t master, std::uint64_t stream) {
  return Rng(derive_seed(master, stream));
}

std::uint64_t Rng::next() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

std::uint64_t Rng::uniform_below(std::uint64_t bound) {
  if (bound == 0) throw parameter_error("uniform_below: bound must be nonzero");
  // Lemire multiply-shift with rejection; exactly uniform.
  unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (-bound) % bound;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(next()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double Rng::uniform01() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

namespace {

// CDF inversion by sequential search, for p <= 1/2 and n*p below ~10.
// Expected work is O(n*p) pmf steps.
std::int64_t binomial_inversion(Rng& rng, std::int64_t n, double p) {
  const double ratio = p / (1.0 - p);
  double pmf = std::exp(static_cast<double>(n) * std::log1p(-p));
  double cdf = pmf;
  const double u = rng.uniform01();
  std::int64_t x = 0;
  while (u > cdf && x < n) {
    ++x;
    pmf *= ratio * (static_cast<double>(n - x + 1) / static_cast<double>(x));
    cdf += pmf;
    if (pmf <= 0.0) break;  // deep-tail underflow; u was astronomically close to 1
  }
  return x;
}

// BTRS (binomial transformed rejection with squeeze), Hoermann 1993.
// Requires p <= 1/2 and n*p >= 10. The hat-function accept/reject is
// exact; the squeeze step only short-circuits the lgamma evaluation.
std::int64_t binomial_btrs(Rng& rng, std::int64_t n, double p) {
  const double nd = static_cast<double>(n);
  const double q = 1.0 - p;
  const double spq = std::sqrt(nd * p * q);
  const double b = 1.15 + 2.53 * spq;
  const double a = -0.0873 + 0.0248 * b + 0.01 * p;
  const double c = nd * p + 0.5;
  const double v_r = 0.92 - 4.2 / b;
  const double alpha = (2.83 + 5.1 / b) * spq;
  const double lpq = std::log(p / q);
  const auto mode = static_cast<std::int64_t>(std::floor((nd + 1.0) * p));
  const double h = std::lgamma(static_cast<double>(mode) + 1.0) +
                   std::lgamma(static_cast<double>(n - mode) + 1.0);
  for (;;) {
    const double u = rng.uniform01() - 0.5;
    const double v = rng.uniform01();
    const double us = 0.5 - std::fabs(u);
    const double kf = std::floor((2.0 * a / us + b) * u + c);
    if (kf < 0.0 || kf > nd) continue;
    const auto k = static_cast<std::int64_t>(kf);
    if (us >= 0.07 && v <= v_r) return k;
    const double log_accept = h - std::lgamma(kf + 1.0) -
                              std::lgamma(nd - kf + 1.0) +
                              (kf - static_cast<double>(mode)) * lpq;
    if (std::log(v * alpha / (a / (us * us) + b)) <= log_accept) return k;
  }
}

}  // namespace

std::int64_t sample_binomial(Rng& rng, std::int64_t n, double p) {
  if (n < 0) throw parameter_error("sample_binomial: negative count");
  if (!(p >= 0.0 && p <= 1.0))
    throw parameter_error("sample_binomial: p outside [0, 1]");
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;
  const bool flipped = p > 0.5;
  const double ps = flipped ? 1.0 - p : p;
  const std::int64_t x = (static_cast<double>(n) * ps < 10.0)
                             ? binomial_inversion(rng, n, ps)
                             : binomial_btrs(rng, n, ps);
  return flipped ? n - x : x;
}

std::vector<std::int64_t> sample_multinomial(Rng& rng, std::int64_t n,
                                             const std::vector<double>& p) {
  if (p.empty()) throw parameter_error("sample_multinomial: empty pmf");
  for (double pj : p)
    if (!(pj >= 0.0 && pj <= 1.0))
      throw parameter_error("sample_multinomial: entry outside [0, 1]");
  std::vector<std::int64_t> out(p.size(), 0);
  std::int64_t left = n;
  double mass = 1.0;
  for (std::size_t j = 0; j + 1 < p.size() && left > 0; ++j) {
    double cond = (mass > 0.0) ? p[j] / mass : 1.0;
    if (cond > 1.0) cond = 1.0;
    if (cond < 0.0) cond = 0.0;
    out[j] = sample_binomial(rng, left, cond);
    left -= out[j];
    mass -= p[j];
  }
  out.back() += left;
  return out;
}

}  // namespace peelmc
