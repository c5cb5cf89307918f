#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "mallows/preferences.hpp"
#include "mallows/sampler.hpp"

namespace mallows {

// A row with possibly missing ranks. entries[i] = rank of item i, or 0 for
// missing. Observed values must be distinct and in 1..n.
class PartialRanking {
 public:
  static constexpr int kMissing = 0;
  explicit PartialRanking(std::vector<int> entries);

  int n() const { return static_cast<int>(entries_.size()); }
  const std::vector<int>& entries() const { return entries_; }
  int entry(int item) const { return entries_[static_cast<std::size_t>(item)]; }
  bool observed(int item) const { return entry(item) != kMissing; }
  bool complete() const { return missing_items_.empty(); }
  int n_missing() const { return static_cast<int>(missing_items_.size()); }
  const std::vector<int>& missing_items() const { return missing_items_; }
  const std::vector<int>& free_ranks() const { return free_ranks_; }

  // Membership in the fill-in set: complete rankings agreeing with every
  // observed entry.
  bool admits(const Ranking& r) const;

 private:
  std::vector<int> entries_;
  std::vector<int> missing_items_;  // ascending item index
  std::vector<int> free_ranks_;     // ascending unused ranks
};

// Weak ordering: ordered groups of tied items, jointly a partition of the
// item set. Group g occupies the rank block just below group g-1.
class TieSet {
 public:
  TieSet(int n, std::vector<std::vector<int>> groups);
  int n() const { return n_; }
  const std::vector<std::vector<int>>& groups() const { return groups_; }
  bool respects(const Ranking& r) const;  // group blocks in order

 private:
  int n_;
  std::vector<std::vector<int>> groups_;
};

using AugSource = std::variant<PartialRanking, PreferenceConstraintSet, TieSet>;

int source_n(const AugSource& s);

// Uniform draw from the fill-in set: observed ranks kept, missing items get
// a random permutation of the unused ranks. Doubles as the Gibbs proposal.
Ranking init_fill_in(const PartialRanking& partial, RngStream& rng);

// A consistent starting ranking for preference data: topological order with
// random tie-breaking among unordered items.
Ranking init_consistent(const PreferenceConstraintSet& c, RngStream& rng);

// Uniform ranks within each tied group's rank block.
Ranking resample_ties(const TieSet& ties, RngStream& rng);

// One augmentation move for a partially ranked assessor: propose uniformly
// on the fill-in set, accept with exp(-(alpha/n) (d(prop,rho) - d(cur,rho))).
// dist_total, when given, tracks the summed distance over all assessors.
bool gibbs_augment_partial(Ranking& aug_j, const PartialRanking& partial, double alpha,
                           const Ranking& rho, Metric m, RngStream& rng,
                           long long* dist_total = nullptr);

// Leap move restricted by the assessor's preference bounds: a constrained
// item draws its new rank uniformly from the open interval between its
// bounds (current rank included, so the move can be a no-op); an
// unconstrained item draws from 1..n. Shift step as in the consensus leap.
Ranking constrained_leap(const Ranking& cur, const PreferenceConstraintSet& c, RngStream& rng);

// Constrained leap wrapped in the same exponential acceptance.
bool mh_augment_preference(Ranking& aug_j, const PreferenceConstraintSet& c, double alpha,
                           const Ranking& rho, Metric m, RngStream& rng,
                           long long* dist_total = nullptr);

// Unconditional tie redraw at the resampling interval.
void resample_tie_state(Ranking& aug_j, const TieSet& ties, const Ranking& rho, Metric m,
                        RngStream& rng, long long* dist_total = nullptr);

// Augmented-data chain: alternates an augmentation sweep over assessors with
// the (rho, alpha) updates of the base sampler, all on the current complete
// rankings. keep_augmented stores the per-assessor rankings at each retained
// draw (needed for predictive preference queries).
PosteriorSamples run_chain_partial(const std::vector<AugSource>& data, Metric m,
                                   const Priors& priors, const Tuning& tuning,
                                   const LogPartitionTable& table, bool keep_augmented = false);

}  // namespace mallows
