#include "mallows/proposal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mallows {

int max_leap(int n) { return (n + 1) / 2; }

LeapSupport leap_support(int n, int L, int rho_u) {
  if (n < 2) throw ValidationError("leap_support: need n >= 2");
  if (L < 1 || L > max_leap(n))
    throw ValidationError("leap_support: L must lie in {1,...,ceil(n/2)}");
  if (rho_u < 1 || rho_u > n) throw ValidationError("leap_support: rank out of range");
  LeapSupport s;
  if (L + 1 <= rho_u && rho_u <= n - L) {
    s.lo = rho_u - L;
    s.hi = rho_u + L;
  } else if (rho_u <= L) {
    s.lo = 1;
    s.hi = std::min(2 * L, n);
  } else {
    s.lo = std::max(n - 2 * L + 1, 1);
    s.hi = n;
  }
  s.size = s.hi - s.lo;  // rho_u is always inside [lo, hi]
  return s;
}

Ranking apply_leap_shift(const Ranking& rho, int u, int new_rank) {
  const int n = rho.size();
  if (u < 0 || u >= n) throw ValidationError("apply_leap_shift: item out of range");
  if (new_rank < 1 || new_rank > n) throw ValidationError("apply_leap_shift: rank out of range");
  std::vector<int> r = rho.ranks();
  const int old_rank = r[static_cast<std::size_t>(u)];
  if (new_rank > old_rank) {
    for (int i = 0; i < n; ++i) {
      int& ri = r[static_cast<std::size_t>(i)];
      if (ri > old_rank && ri <= new_rank) --ri;
    }
  } else if (new_rank < old_rank) {
    for (int i = 0; i < n; ++i) {
      int& ri = r[static_cast<std::size_t>(i)];
      if (ri >= new_rank && ri < old_rank) ++ri;
    }
  }
  r[static_cast<std::size_t>(u)] = new_rank;
  return Ranking::unchecked(std::move(r));
}

LeapProposal leap_and_shift(const Ranking& rho, int L, RngStream& rng) {
  const int n = rho.size();
  const int u = static_cast<int>(rng.uniform_int(0, n - 1));
  const LeapSupport s = leap_support(n, L, rho.rank_of(u));
  // Draw uniformly from [lo, hi] minus the current rank.
  int r = static_cast<int>(rng.uniform_int(s.lo, s.hi - 1));
  if (r >= rho.rank_of(u)) ++r;
  return {apply_leap_shift(rho, u, r), u, r};
}

double leap_pmf(const Ranking& rho, const std::vector<int>& rho_star, int L) {
  const int n = rho.size();
  if (static_cast<int>(rho_star.size()) != n)
    throw ValidationError("leap_pmf: size mismatch");
  int u = -1;
  for (int i = 0; i < n; ++i) {
    if (rho_star[static_cast<std::size_t>(i)] != rho.rank_of(i)) {
      if (u >= 0) return 0.0;  // more than one coordinate moved
      u = i;
    }
  }
  if (u < 0) return 0.0;  // rho_star == rho, excluded by construction
  const int r = rho_star[static_cast<std::size_t>(u)];
  if (r < 1 || r > n) return 0.0;
  const LeapSupport s = leap_support(n, L, rho.rank_of(u));
  if (r < s.lo || r > s.hi) return 0.0;
  return 1.0 / n / s.size;
}

double leap_shift_transition_log_prob(const Ranking& rho, const Ranking& rho_prime, int L) {
  const int n = rho.size();
  if (rho_prime.size() != n) throw ValidationError("transition probability: size mismatch");
  double p = 0;
  for (int u = 0; u < n; ++u) {
    const int r = rho_prime.rank_of(u);
    if (r == rho.rank_of(u)) continue;
    const LeapSupport s = leap_support(n, L, rho.rank_of(u));
    if (r < s.lo || r > s.hi) continue;
    if (apply_leap_shift(rho, u, r) == rho_prime) p += 1.0 / n / s.size;
  }
  return p > 0 ? std::log(p) : -std::numeric_limits<double>::infinity();
}

}  // namespace mallows
