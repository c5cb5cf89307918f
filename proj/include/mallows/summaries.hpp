#pragma once

#include <vector>

#include "mallows/ranking.hpp"

namespace mallows {

// p[i][k-1] = posterior P(item i holds rank k). Rows sum to 1; column sums
// equal 1 as well since every sample is a complete permutation.
struct MarginalRankMatrix {
  int n = 0;
  std::vector<std::vector<double>> p;

  double at(int item, int rank) const { return p[static_cast<std::size_t>(item)][static_cast<std::size_t>(rank - 1)]; }
};

MarginalRankMatrix marginal_rank_matrix(const std::vector<Ranking>& samples);

// Expected number of items placed at their reference rank:
// sum_i P(rho_i = rho_true,i | data).
double trace_statistic(const MarginalRankMatrix& M, const Ranking& rho_true);

// Greedy cumulative-probability ordering: step k picks the unchosen item
// with the largest P(rank <= k), ties to the lowest item index. The reported
// cumulative value is that item's P(rank <= k); the sequence need not be
// nondecreasing.
struct CpEntry {
  int item = 0;
  double cumulative = 0;
};
std::vector<CpEntry> cp_ordering(const MarginalRankMatrix& M);

// Highest-density credible set over ranks: add ranks by decreasing marginal
// probability (ties to the lower rank) until the requested mass is covered.
// Reported both as the raw set and as its spanning interval.
struct DiscreteCredibleSet {
  int item = -1;
  double level = 0;
  std::vector<int> ranks;  // ascending
  int lo = 0;
  int hi = 0;
  double mass = 0;
};
DiscreteCredibleSet hpdi(const std::vector<double>& rank_marginal, double level, int item = -1);

// Shortest interval covering >= level of the draws; for continuous
// quantities such as the dispersion.
struct CredibleInterval {
  double lo = 0;
  double hi = 0;
  double level = 0;
};
CredibleInterval shortest_interval(std::vector<double> draws, double level);

// Per item: P(rank <= t).
std::vector<double> top_t_probability(const std::vector<Ranking>& samples, int t);

// Fraction of draws whose top-t item set equals the reference top-t set.
double top_t_set_match(const std::vector<Ranking>& samples, const Ranking& rho_true, int t);

// p_less[i][j] = P(rho_i < rho_j); dominates[i][j] = 1 when item i's rank
// CDF is pointwise >= item j's with strict inequality somewhere. The strict
// clause keeps the flagged relation a partial order when CDFs coincide.
struct DominanceResult {
  int n = 0;
  std::vector<std::vector<double>> p_less;
  std::vector<std::vector<char>> dominates;
};
DominanceResult dominance_matrix(const std::vector<Ranking>& samples);

// P(item b preferred to item a by assessor j | data), from the augmented
// complete rankings: the fraction of draws ranking b above a.
double preference_predictive(const std::vector<std::vector<Ranking>>& augmented_samples, int j,
                             int a, int b);

// Most frequent sampled ranking; ties broken by first occurrence.
Ranking map_ranking(const std::vector<Ranking>& samples);

}  // namespace mallows
