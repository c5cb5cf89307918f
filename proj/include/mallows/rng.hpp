#pragma once

#include <cstdint>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace mallows {

// Splittable random stream: xoshiro256++ state seeded through SplitMix64
// from a derivation key. Streams are value types; derive(id) produces a
// child stream that is a pure function of (parent key, id) and does not
// consume parent state, so per-assessor / per-batch substreams can be
// created in any order (or in parallel) with identical results.
//
// All distribution code is written out here rather than taken from
// <random> because the standard distributions are implementation-defined
// and the project requires bit-identical output across toolchains.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : key_(mix_(seed, 0x9e3779b97f4a7c15ull)) {
    seed_state_();
  }

  RngStream derive(std::uint64_t id) const {
    return RngStream(mix_(key_, id), FromKey{});
  }
  RngStream derive(std::uint64_t id1, std::uint64_t id2) const {
    return RngStream(mix_(mix_(key_, id1), id2), FromKey{});
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl_(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl_(s_[3], 45);
    return result;
  }

  // Uniform on [0,1), 53-bit resolution.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0,1]; safe as a log() argument.
  double uniform_pos() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

  // Uniform integer on [lo, hi], both inclusive, rejection-debiased.
  long uniform_int(long lo, long hi) {
    if (lo > hi) throw std::invalid_argument("uniform_int: empty range");
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1u;
    if (span == 0)  // full 64-bit range
      return static_cast<long>(next_u64());
    const std::uint64_t reject_below = (-span) % span;  // 2^64 mod span
    std::uint64_t r;
    do {
      r = next_u64();
    } while (r < reject_below);
    return lo + static_cast<long>(r % span);
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Box-Muller; both uniforms drawn every call so the draw count per
  // normal() is fixed (no cached spare, keeps replay reasoning simple).
  double normal() {
    const double u1 = uniform_pos();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  double exponential(double rate) {
    if (rate <= 0) throw std::invalid_argument("exponential: rate must be positive");
    return -std::log(uniform_pos()) / rate;
  }

  // Marsaglia-Tsang for shape >= 1, boosted for shape < 1.
  double gamma(double shape, double scale) {
    if (shape <= 0 || scale <= 0) throw std::invalid_argument("gamma: parameters must be positive");
    if (shape < 1.0) {
      const double u = uniform_pos();
      return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform01();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * scale;
    }
  }

  double beta(double a, double b) {
    const double x = gamma(a, 1.0);
    const double y = gamma(b, 1.0);
    return x / (x + y);
  }

  std::vector<double> dirichlet(const std::vector<double>& conc) {
    std::vector<double> g(conc.size());
    double total = 0;
    for (std::size_t i = 0; i < conc.size(); ++i) {
      g[i] = gamma(conc[i], 1.0);
      total += g[i];
    }
    for (double& v : g) v /= total;
    return g;
  }

  // Density proportional to x^{-shape-1} exp(-scale/x); mean scale/(shape-1).
  double inverse_gamma(double shape, double scale) {
    return 1.0 / gamma(shape, 1.0 / scale);
  }

  // Fisher-Yates.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (long i = static_cast<long>(v.size()) - 1; i > 0; --i) {
      const long j = uniform_int(0, i);
      std::swap(v[static_cast<std::size_t>(i)], v[static_cast<std::size_t>(j)]);
    }
  }

  // Categorical draw from unnormalized log weights (log-sum-exp inside).
  int categorical_from_log(const std::vector<double>& logw);

  std::uint64_t key() const { return key_; }

 private:
  struct FromKey {};
  RngStream(std::uint64_t key, FromKey) : key_(key) { seed_state_(); }

  static std::uint64_t rotl_(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  static std::uint64_t splitmix_(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  static std::uint64_t mix_(std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = a ^ (b + 0x632be59bd9b4e019ull + (a << 6) + (a >> 2));
    return splitmix_(x);
  }

  void seed_state_() {
    std::uint64_t x = key_;
    for (auto& s : s_) s = splitmix_(x);
  }

  std::uint64_t key_;
  std::uint64_t s_[4];
};

// Numerically safe log(sum(exp(v))) with a running max.
double log_sum_exp(const std::vector<double>& v);

inline int RngStream::categorical_from_log(const std::vector<double>& logw) {
  const double lse = log_sum_exp(logw);
  const double u = uniform01();
  double acc = 0;
  for (std::size_t c = 0; c < logw.size(); ++c) {
    acc += std::exp(logw[c] - lse);
    if (u < acc) return static_cast<int>(c);
  }
  return static_cast<int>(logw.size()) - 1;  // guard rounding at the top end
}

}  // namespace mallows
