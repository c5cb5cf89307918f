#include "mallows/summaries.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace mallows {

MarginalRankMatrix marginal_rank_matrix(const std::vector<Ranking>& samples) {
  if (samples.empty()) throw ValidationError("no samples");
  const int n = samples.front().size();
  MarginalRankMatrix M;
  M.n = n;
  M.p.assign(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), 0.0));
  for (const auto& r : samples) {
    if (r.size() != n) throw ValidationError("samples rank different numbers of items");
    for (int i = 0; i < n; ++i) {
      M.p[static_cast<std::size_t>(i)][static_cast<std::size_t>(r.rank_of(i) - 1)] += 1.0;
    }
  }
  for (auto& row : M.p) {
    for (auto& v : row) v /= double(samples.size());
  }
  return M;
}

double trace_statistic(const MarginalRankMatrix& M, const Ranking& rho_true) {
  if (rho_true.size() != M.n) throw ValidationError("reference ranking has the wrong length");
  double total = 0;
  for (int i = 0; i < M.n; ++i) total += M.at(i, rho_true.rank_of(i));
  return total;
}

std::vector<CpEntry> cp_ordering(const MarginalRankMatrix& M) {
  const int n = M.n;
  std::vector<char> chosen(static_cast<std::size_t>(n), 0);
  std::vector<double> cum(static_cast<std::size_t>(n), 0.0);
  std::vector<CpEntry> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) {
    for (int i = 0; i < n; ++i) cum[static_cast<std::size_t>(i)] += M.at(i, k);
    int best = -1;
    for (int i = 0; i < n; ++i) {
      if (chosen[static_cast<std::size_t>(i)]) continue;
      if (best < 0 || cum[static_cast<std::size_t>(i)] > cum[static_cast<std::size_t>(best)]) best = i;
    }
    chosen[static_cast<std::size_t>(best)] = 1;
    out.push_back({best, cum[static_cast<std::size_t>(best)]});
  }
  return out;
}

DiscreteCredibleSet hpdi(const std::vector<double>& rank_marginal, double level, int item) {
  if (rank_marginal.empty()) throw ValidationError("empty marginal");
  if (!(level > 0 && level <= 1)) throw ValidationError("level must be in (0, 1]");
  const int n = static_cast<int>(rank_marginal.size());
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return rank_marginal[static_cast<std::size_t>(a)] > rank_marginal[static_cast<std::size_t>(b)];
  });
  DiscreteCredibleSet out;
  out.item = item;
  out.level = level;
  double mass = 0;
  for (int idx : order) {
    out.ranks.push_back(idx + 1);
    mass += rank_marginal[static_cast<std::size_t>(idx)];
    if (mass >= level - 1e-12) break;
  }
  std::sort(out.ranks.begin(), out.ranks.end());
  out.lo = out.ranks.front();
  out.hi = out.ranks.back();
  out.mass = mass;
  return out;
}

CredibleInterval shortest_interval(std::vector<double> draws, double level) {
  if (draws.empty()) throw ValidationError("no draws");
  if (!(level > 0) || !(level <= 1)) throw ValidationError("level must be in (0, 1]");
  std::sort(draws.begin(), draws.end());
  const std::size_t total = draws.size();
  const std::size_t need = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(level * double(total) - 1e-12)));
  CredibleInterval best{draws.front(), draws.back(), level};
  double best_width = draws.back() - draws.front();
  for (std::size_t lo = 0; lo + need <= total; ++lo) {
    const double width = draws[lo + need - 1] - draws[lo];
    if (width < best_width) {
      best_width = width;
      best.lo = draws[lo];
      best.hi = draws[lo + need - 1];
    }
  }
  return best;
}

std::vector<double> top_t_probability(const std::vector<Ranking>& samples, int t) {
  if (samples.empty()) throw ValidationError("no samples");
  const int n = samples.front().size();
  if (t < 1 || t > n) throw ValidationError("top-t cutoff outside 1..n");
  std::vector<double> p(static_cast<std::size_t>(n), 0.0);
  for (const auto& r : samples) {
    for (int i = 0; i < n; ++i) {
      if (r.rank_of(i) <= t) p[static_cast<std::size_t>(i)] += 1.0;
    }
  }
  for (auto& v : p) v /= double(samples.size());
  return p;
}

double top_t_set_match(const std::vector<Ranking>& samples, const Ranking& rho_true, int t) {
  if (samples.empty()) throw ValidationError("no samples");
  const int n = rho_true.size();
  if (t < 1 || t > n) throw ValidationError("top-t cutoff outside 1..n");
  long hits = 0;
  for (const auto& r : samples) {
    bool match = true;
    for (int i = 0; i < n && match; ++i) {
      match = (r.rank_of(i) <= t) == (rho_true.rank_of(i) <= t);
    }
    hits += match;
  }
  return double(hits) / double(samples.size());
}

DominanceResult dominance_matrix(const std::vector<Ranking>& samples) {
  if (samples.empty()) throw ValidationError("no samples");
  const int n = samples.front().size();
  DominanceResult out;
  out.n = n;
  out.p_less.assign(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), 0.0));
  out.dominates.assign(static_cast<std::size_t>(n), std::vector<char>(static_cast<std::size_t>(n), 0));

  // cdf[i][r-1] = P(rho_i <= r)
  std::vector<std::vector<double>> cdf(static_cast<std::size_t>(n),
                                       std::vector<double>(static_cast<std::size_t>(n), 0.0));
  for (const auto& s : samples) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (s.rank_of(i) < s.rank_of(j)) out.p_less[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] += 1.0;
      }
      cdf[static_cast<std::size_t>(i)][static_cast<std::size_t>(s.rank_of(i) - 1)] += 1.0;
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) out.p_less[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] /= double(samples.size());
  }
  for (auto& row : cdf) {
    double run = 0;
    for (auto& v : row) {
      run += v / double(samples.size());
      v = run;
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      bool all_geq = true;
      bool any_strict = false;
      for (int r = 0; r < n; ++r) {
        const double ci = cdf[static_cast<std::size_t>(i)][static_cast<std::size_t>(r)];
        const double cj = cdf[static_cast<std::size_t>(j)][static_cast<std::size_t>(r)];
        if (ci < cj) {
          all_geq = false;
          break;
        }
        if (ci > cj) any_strict = true;
      }
      out.dominates[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = all_geq && any_strict;
    }
  }
  return out;
}

double preference_predictive(const std::vector<std::vector<Ranking>>& augmented_samples, int j,
                             int a, int b) {
  if (augmented_samples.empty()) throw ValidationError("no augmented samples");
  if (a == b) throw ValidationError("preference query needs two distinct items");
  long hits = 0;
  for (const auto& draw : augmented_samples) {
    if (j < 0 || j >= static_cast<int>(draw.size())) throw ValidationError("assessor index out of range");
    const Ranking& r = draw[static_cast<std::size_t>(j)];
    hits += r.rank_of(b) < r.rank_of(a);
  }
  return double(hits) / double(augmented_samples.size());
}

Ranking map_ranking(const std::vector<Ranking>& samples) {
  if (samples.empty()) throw ValidationError("no samples");
  std::map<std::vector<int>, std::pair<long, std::size_t>> counts;  // count, first index
  for (std::size_t t = 0; t < samples.size(); ++t) {
    auto [it, inserted] = counts.try_emplace(samples[t].ranks(), 0, t);
    it->second.first += 1;
  }
  const std::vector<int>* best = nullptr;
  long best_count = -1;
  std::size_t best_first = 0;
  for (const auto& [ranks, info] : counts) {
    if (info.first > best_count || (info.first == best_count && info.second < best_first)) {
      best = &ranks;
      best_count = info.first;
      best_first = info.second;
    }
  }
  return Ranking::unchecked(*best);
}

}  // namespace mallows
