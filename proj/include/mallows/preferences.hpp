#pragma once

#include <utility>
#include <vector>

#include "mallows/ranking.hpp"

namespace mallows {

// upper is preferred to lower.
struct PreferencePair {
  int lower = 0;
  int upper = 0;
  bool operator==(const PreferencePair&) const = default;
  auto operator<=>(const PreferencePair&) const = default;
};

struct CycleError : ValidationError {
  CycleError(std::string msg, std::vector<int> cyc)
      : ValidationError(std::move(msg)), cycle(std::move(cyc)) {}
  std::vector<int> cycle;  // item indices, first == last
};

// An assessor's pairwise preferences, stored as their transitive closure.
// Construction closes the input set and rejects cycles with a witness.
class PreferenceConstraintSet {
 public:
  PreferenceConstraintSet(int n_items, std::vector<PreferencePair> pairs, int assessor_id = 0);

  int n() const { return n_; }
  int assessor() const { return assessor_; }
  bool empty() const { return pairs_.size() == 0; }
  const std::vector<PreferencePair>& pairs() const { return pairs_; }          // closed, sorted
  const std::vector<int>& constrained_items() const { return constrained_; }   // sorted
  bool constrains(int item) const;
  // Items preferred to `item` / items `item` is preferred to, in the closure.
  const std::vector<int>& better_than(int item) const { return better_[static_cast<std::size_t>(item)]; }
  const std::vector<int>& worse_than(int item) const { return worse_[static_cast<std::size_t>(item)]; }

 private:
  int n_;
  int assessor_;
  std::vector<PreferencePair> pairs_;
  std::vector<int> constrained_;
  std::vector<std::vector<int>> better_;
  std::vector<std::vector<int>> worse_;
};

PreferenceConstraintSet transitive_closure(int n_items, std::vector<PreferencePair> pairs,
                                           int assessor_id = 0);

// True iff every preferred item has the strictly better (smaller) rank.
bool is_consistent(const Ranking& r, const PreferenceConstraintSet& c);

// (l, r) with l = max rank among items preferred to u (0 if none) and
// r = min rank among items u is preferred to (n+1 if none). For a
// consistent ranking, l < rank(u) < r.
std::pair<int, int> rank_bounds(const PreferenceConstraintSet& c, const Ranking& ranks, int u);

}  // namespace mallows
