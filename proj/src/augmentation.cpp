#include "mallows/augmentation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>

namespace mallows {

PartialRanking::PartialRanking(std::vector<int> entries) : entries_(std::move(entries)) {
  const int n = static_cast<int>(entries_.size());
  if (n < 1) throw ValidationError("partial ranking has no items");
  std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
  for (int i = 0; i < n; ++i) {
    const int v = entries_[static_cast<std::size_t>(i)];
    if (v == kMissing) {
      missing_items_.push_back(i);
      continue;
    }
    if (v < 1 || v > n) {
      throw ValidationError("partial ranking entry " + std::to_string(v) + " outside 1.." +
                            std::to_string(n));
    }
    if (used[static_cast<std::size_t>(v)]) {
      throw ValidationError("partial ranking repeats rank " + std::to_string(v));
    }
    used[static_cast<std::size_t>(v)] = 1;
  }
  for (int r = 1; r <= n; ++r) {
    if (!used[static_cast<std::size_t>(r)]) free_ranks_.push_back(r);
  }
}

bool PartialRanking::admits(const Ranking& r) const {
  if (r.size() != n()) return false;
  for (int i = 0; i < n(); ++i) {
    if (observed(i) && r.rank_of(i) != entries_[static_cast<std::size_t>(i)]) return false;
  }
  return true;
}

TieSet::TieSet(int n, std::vector<std::vector<int>> groups) : n_(n), groups_(std::move(groups)) {
  if (n_ < 1) throw ValidationError("tie set has no items");
  std::vector<char> seen(static_cast<std::size_t>(n_), 0);
  int count = 0;
  for (const auto& g : groups_) {
    if (g.empty()) throw ValidationError("tie set contains an empty group");
    for (int item : g) {
      if (item < 0 || item >= n_) {
        throw ValidationError("tie group item index " + std::to_string(item) + " outside 0.." +
                              std::to_string(n_ - 1));
      }
      if (seen[static_cast<std::size_t>(item)]) {
        throw ValidationError("tie groups repeat item " + std::to_string(item));
      }
      seen[static_cast<std::size_t>(item)] = 1;
      ++count;
    }
  }
  if (count != n_) throw ValidationError("tie groups do not cover all items");
}

bool TieSet::respects(const Ranking& r) const {
  if (r.size() != n_) return false;
  int offset = 0;
  for (const auto& g : groups_) {
    const int k = static_cast<int>(g.size());
    for (int item : g) {
      const int rank = r.rank_of(item);
      if (rank <= offset || rank > offset + k) return false;
    }
    offset += k;
  }
  return true;
}

int source_n(const AugSource& s) {
  return std::visit([](const auto& v) { return v.n(); }, s);
}

Ranking init_fill_in(const PartialRanking& partial, RngStream& rng) {
  std::vector<int> ranks = partial.entries();
  std::vector<int> free = partial.free_ranks();
  rng.shuffle(free);
  const auto& missing = partial.missing_items();
  for (std::size_t k = 0; k < missing.size(); ++k) {
    ranks[static_cast<std::size_t>(missing[k])] = free[k];
  }
  return Ranking::unchecked(std::move(ranks));
}

Ranking init_consistent(const PreferenceConstraintSet& c, RngStream& rng) {
  const int n = c.n();
  std::vector<int> indegree(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    indegree[static_cast<std::size_t>(i)] = static_cast<int>(c.better_than(i).size());
  }
  std::vector<int> available;
  for (int i = 0; i < n; ++i) {
    if (indegree[static_cast<std::size_t>(i)] == 0) available.push_back(i);
  }
  std::vector<int> ranks(static_cast<std::size_t>(n), 0);
  for (int rank = 1; rank <= n; ++rank) {
    const int pick = rng.uniform_int(0, static_cast<int>(available.size()) - 1);
    const int item = available[static_cast<std::size_t>(pick)];
    available[static_cast<std::size_t>(pick)] = available.back();
    available.pop_back();
    ranks[static_cast<std::size_t>(item)] = rank;
    for (int w : c.worse_than(item)) {
      if (--indegree[static_cast<std::size_t>(w)] == 0) available.push_back(w);
    }
  }
  return Ranking::unchecked(std::move(ranks));
}

Ranking resample_ties(const TieSet& ties, RngStream& rng) {
  std::vector<int> ranks(static_cast<std::size_t>(ties.n()), 0);
  int offset = 0;
  for (const auto& g : ties.groups()) {
    const int k = static_cast<int>(g.size());
    std::vector<int> block(static_cast<std::size_t>(k));
    std::iota(block.begin(), block.end(), offset + 1);
    rng.shuffle(block);
    for (int j = 0; j < k; ++j) {
      ranks[static_cast<std::size_t>(g[static_cast<std::size_t>(j)])] =
          block[static_cast<std::size_t>(j)];
    }
    offset += k;
  }
  return Ranking::unchecked(std::move(ranks));
}

namespace {

// Shared exponential accept step for augmentation proposals. Always consumes
// one uniform so a stream replays identically whatever the decision.
bool accept_augmented(Ranking& aug_j, Ranking&& prop, double alpha, const Ranking& rho, Metric m,
                      RngStream& rng, long long* dist_total) {
  const long long d_old = rank_distance(m, aug_j, rho);
  const long long d_new = rank_distance(m, prop, rho);
  const double log_ratio = -(alpha / aug_j.size()) * double(d_new - d_old);
  const double u = rng.uniform_pos();
  if (std::log(u) < log_ratio) {
    aug_j = std::move(prop);
    if (dist_total) *dist_total += d_new - d_old;
    return true;
  }
  return false;
}

}  // namespace

bool gibbs_augment_partial(Ranking& aug_j, const PartialRanking& partial, double alpha,
                           const Ranking& rho, Metric m, RngStream& rng, long long* dist_total) {
  if (partial.complete()) return false;
  return accept_augmented(aug_j, init_fill_in(partial, rng), alpha, rho, m, rng, dist_total);
}

Ranking constrained_leap(const Ranking& cur, const PreferenceConstraintSet& c, RngStream& rng) {
  const int n = cur.size();
  const int u = rng.uniform_int(0, n - 1);
  int lo = 1;
  int hi = n;
  if (c.constrains(u)) {
    const auto [l, r] = rank_bounds(c, cur, u);
    lo = l + 1;
    hi = r - 1;
  }
  const int new_rank = rng.uniform_int(lo, hi);
  return apply_leap_shift(cur, u, new_rank);
}

bool mh_augment_preference(Ranking& aug_j, const PreferenceConstraintSet& c, double alpha,
                           const Ranking& rho, Metric m, RngStream& rng, long long* dist_total) {
  return accept_augmented(aug_j, constrained_leap(aug_j, c, rng), alpha, rho, m, rng, dist_total);
}

void resample_tie_state(Ranking& aug_j, const TieSet& ties, const Ranking& rho, Metric m,
                        RngStream& rng, long long* dist_total) {
  Ranking prop = resample_ties(ties, rng);
  if (dist_total) *dist_total += rank_distance(m, prop, rho) - rank_distance(m, aug_j, rho);
  aug_j = std::move(prop);
}

namespace {

Ranking initial_state(const AugSource& s, RngStream& rng) {
  if (const auto* p = std::get_if<PartialRanking>(&s)) return init_fill_in(*p, rng);
  if (const auto* c = std::get_if<PreferenceConstraintSet>(&s)) return init_consistent(*c, rng);
  return resample_ties(std::get<TieSet>(s), rng);
}

}  // namespace

PosteriorSamples run_chain_partial(const std::vector<AugSource>& data, Metric m,
                                   const Priors& priors, const Tuning& tuning,
                                   const LogPartitionTable& table, bool keep_augmented) {
  if (data.empty()) throw ValidationError("no assessors");
  const int n = source_n(data.front());
  if (n < 2) throw ValidationError("need at least two items");
  for (const auto& s : data) {
    if (source_n(s) != n) throw ValidationError("assessors rank different numbers of items");
  }
  if (table.n != n) throw ValidationError("partition table built for a different n");
  if (table.metric != m) throw ValidationError("partition table built for a different metric");
  tuning.validate(n);

  const int N = static_cast<int>(data.size());
  RngStream root(tuning.seed);
  RngStream init_rng = root.derive(0);
  RngStream rho_rng = root.derive(1);
  RngStream alpha_rng = root.derive(2);
  RngStream aug_root = root.derive(3);

  std::vector<Ranking> aug;
  aug.reserve(static_cast<std::size_t>(N));
  for (const auto& s : data) aug.push_back(initial_state(s, init_rng));

  Ranking rho = Ranking::random(n, init_rng);
  double alpha = tuning.alpha_init;
  if (alpha < 0) {
    alpha = std::clamp(1.0 / priors.lambda, table.alpha.front(), table.alpha.back());
  } else if (alpha < table.alpha.front() || alpha > table.alpha.back()) {
    throw ValidationError("alpha_init outside the partition table range");
  }
  long long dist = total_distance(aug, rho, m);

  PosteriorSamples out;
  long sweeps_done = 0;
  for (long it = 1; it <= tuning.iterations; ++it) {
    for (int rep = 0; rep < tuning.aug_frequency; ++rep) {
      ++sweeps_done;
      const bool tie_due = sweeps_done % tuning.tie_interval == 0;
      for (int j = 0; j < N; ++j) {
        RngStream s = aug_root.derive(static_cast<std::uint64_t>(sweeps_done),
                                      static_cast<std::uint64_t>(j));
        const AugSource& src = data[static_cast<std::size_t>(j)];
        if (const auto* p = std::get_if<PartialRanking>(&src)) {
          if (p->complete()) continue;
          out.diag.aug_proposals += 1;
          if (gibbs_augment_partial(aug[static_cast<std::size_t>(j)], *p, alpha, rho, m, s, &dist)) {
            out.diag.aug_accepts += 1;
          }
        } else if (const auto* c = std::get_if<PreferenceConstraintSet>(&src)) {
          out.diag.aug_proposals += 1;
          if (mh_augment_preference(aug[static_cast<std::size_t>(j)], *c, alpha, rho, m, s, &dist)) {
            out.diag.aug_accepts += 1;
          }
        } else if (tie_due) {
          resample_tie_state(aug[static_cast<std::size_t>(j)], std::get<TieSet>(src), rho, m, s,
                             &dist);
        }
      }
    }
    mh_step_rho(rho, dist, alpha, aug, m, tuning.leap, tuning.exact_proposal_ratio, rho_rng,
                out.diag);
    mh_step_alpha(alpha, dist, N, priors.lambda, tuning.sigma_alpha, table, alpha_rng, out.diag);
    if (it > tuning.burn_in && (it - tuning.burn_in) % tuning.thinning == 0) {
      out.iteration.push_back(it);
      out.alpha.push_back(alpha);
      out.rho.push_back(rho);
      if (keep_augmented) out.augmented.push_back(aug);
    }
  }
  if (out.diag.range_warning()) {
    std::fprintf(stderr,
                 "warning: %.1f%% of dispersion proposals fell outside the partition table grid\n",
                 100.0 * out.diag.range_reject_rate());
  }
  return out;
}

}  // namespace mallows
