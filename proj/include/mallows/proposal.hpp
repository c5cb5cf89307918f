#pragma once

#include "mallows/ranking.hpp"
#include "mallows/rng.hpp"

namespace mallows {

// Leap support for an item currently at rank rho_u: the candidate interval
// [lo, hi] minus the current rank. The three cases are evaluated in their
// stated order: interior (L+1 <= rho_u <= n-L), then low boundary
// (rho_u <= L), then high boundary. Boundary windows are clamped to [1, n],
// which only matters when L is at its ceil(n/2) maximum and n is odd; for
// n = 2L both boundary cases degenerate to the full range, so the case
// order is immaterial there.
struct LeapSupport {
  int lo = 0;
  int hi = 0;
  int size = 0;  // |[lo,hi]| minus the current rank, always hi - lo
};

LeapSupport leap_support(int n, int L, int rho_u);

int max_leap(int n);  // ceil(n/2)

// Deterministic shift step: item u takes new_rank and the ranks strictly
// between close ranks toward the vacated slot. With d = new_rank - old:
// d > 0 decrements ranks in (old, new], d < 0 increments ranks in
// [new, old). new_rank == old returns an unchanged copy.
Ranking apply_leap_shift(const Ranking& rho, int u, int new_rank);

struct LeapProposal {
  Ranking rho;
  int item = 0;
  int new_rank = 0;
};

// One leap-and-shift move: u uniform over items, new rank uniform over the
// leap support. The result is always a valid permutation at Ulam distance 1
// from the input.
LeapProposal leap_and_shift(const Ranking& rho, int L, RngStream& rng);

// Probability that the leap step (before the shift) produces the vector
// rho_star, i.e. rho with exactly one coordinate changed to a value inside
// that item's support. Normalized per case: (1/n) * 1/|S_u|. The flat
// 1/(2nL) weight holds only in the interior case, where |S_u| = 2L.
double leap_pmf(const Ranking& rho, const std::vector<int>& rho_star, int L);

// log P(one full leap-and-shift move maps rho to rho_prime), summing over
// every (item, new rank) pair whose shift lands on rho_prime; -inf if
// unreachable. Used by the exact-proposal-ratio diagnostic mode.
double leap_shift_transition_log_prob(const Ranking& rho, const Ranking& rho_prime, int L);

}  // namespace mallows
