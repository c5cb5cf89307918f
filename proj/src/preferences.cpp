#include "mallows/preferences.hpp"

#include <algorithm>
#include <string>

namespace mallows {

namespace {

// Extract one cycle from the subgraph of nodes Kahn's algorithm could not
// peel off. Follows arbitrary outgoing edges until a node repeats.
std::vector<int> find_cycle(const std::vector<std::vector<int>>& adj,
                            const std::vector<char>& in_cycle_region, int start) {
  std::vector<int> path;
  std::vector<int> pos_in_path(adj.size(), -1);
  int cur = start;
  for (;;) {
    if (pos_in_path[static_cast<std::size_t>(cur)] >= 0) {
      std::vector<int> cycle(path.begin() + pos_in_path[static_cast<std::size_t>(cur)], path.end());
      cycle.push_back(cur);
      return cycle;
    }
    pos_in_path[static_cast<std::size_t>(cur)] = static_cast<int>(path.size());
    path.push_back(cur);
    int next = -1;
    for (int v : adj[static_cast<std::size_t>(cur)]) {
      if (in_cycle_region[static_cast<std::size_t>(v)]) {
        next = v;
        break;
      }
    }
    cur = next;
  }
}

}  // namespace

PreferenceConstraintSet::PreferenceConstraintSet(int n_items, std::vector<PreferencePair> pairs,
                                                 int assessor_id)
    : n_(n_items), assessor_(assessor_id) {
  if (n_ < 1) throw ValidationError("PreferenceConstraintSet: n must be >= 1");
  const std::size_t un = static_cast<std::size_t>(n_);
  std::vector<std::vector<int>> adj(un);  // upper -> lower ("beats")
  std::vector<std::vector<char>> edge(un, std::vector<char>(un, 0));
  for (const auto& p : pairs) {
    if (p.lower == p.upper)
      throw ValidationError("preference pair relates an item to itself (item index " +
                            std::to_string(p.lower) + ")");
    if (p.lower < 0 || p.lower >= n_ || p.upper < 0 || p.upper >= n_)
      throw ValidationError("preference pair item index out of range");
    if (!edge[static_cast<std::size_t>(p.upper)][static_cast<std::size_t>(p.lower)]) {
      edge[static_cast<std::size_t>(p.upper)][static_cast<std::size_t>(p.lower)] = 1;
      adj[static_cast<std::size_t>(p.upper)].push_back(p.lower);
    }
  }

  // Kahn's algorithm; leftover in-degrees mark a cycle region.
  std::vector<int> indeg(un, 0);
  for (int u = 0; u < n_; ++u)
    for (int v : adj[static_cast<std::size_t>(u)]) ++indeg[static_cast<std::size_t>(v)];
  std::vector<int> order;
  order.reserve(un);
  std::vector<int> queue;
  for (int u = 0; u < n_; ++u)
    if (indeg[static_cast<std::size_t>(u)] == 0) queue.push_back(u);
  while (!queue.empty()) {
    const int u = queue.back();
    queue.pop_back();
    order.push_back(u);
    for (int v : adj[static_cast<std::size_t>(u)])
      if (--indeg[static_cast<std::size_t>(v)] == 0) queue.push_back(v);
  }
  if (static_cast<int>(order.size()) != n_) {
    std::vector<char> region(un, 0);
    int start = -1;
    for (int u = 0; u < n_; ++u)
      if (indeg[static_cast<std::size_t>(u)] > 0) {
        region[static_cast<std::size_t>(u)] = 1;
        if (start < 0) start = u;
      }
    std::vector<int> cycle = find_cycle(adj, region, start);
    std::string msg = "inconsistent preferences for assessor " + std::to_string(assessor_) +
                      ": cycle";
    for (int v : cycle) msg += " " + std::to_string(v);
    throw CycleError(std::move(msg), std::move(cycle));
  }

  // Reachability in reverse topological order gives the closure.
  std::vector<std::vector<char>> reach(un, std::vector<char>(un, 0));
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const int u = *it;
    for (int v : adj[static_cast<std::size_t>(u)]) {
      reach[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] = 1;
      const auto& rv = reach[static_cast<std::size_t>(v)];
      auto& ru = reach[static_cast<std::size_t>(u)];
      for (int w = 0; w < n_; ++w)
        if (rv[static_cast<std::size_t>(w)]) ru[static_cast<std::size_t>(w)] = 1;
    }
  }

  better_.assign(un, {});
  worse_.assign(un, {});
  std::vector<char> touched(un, 0);
  for (int u = 0; u < n_; ++u)
    for (int v = 0; v < n_; ++v)
      if (reach[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)]) {
        pairs_.push_back({v, u});
        worse_[static_cast<std::size_t>(u)].push_back(v);
        better_[static_cast<std::size_t>(v)].push_back(u);
        touched[static_cast<std::size_t>(u)] = touched[static_cast<std::size_t>(v)] = 1;
      }
  std::sort(pairs_.begin(), pairs_.end());
  for (int u = 0; u < n_; ++u)
    if (touched[static_cast<std::size_t>(u)]) constrained_.push_back(u);
}

bool PreferenceConstraintSet::constrains(int item) const {
  return std::binary_search(constrained_.begin(), constrained_.end(), item);
}

PreferenceConstraintSet transitive_closure(int n_items, std::vector<PreferencePair> pairs,
                                           int assessor_id) {
  return PreferenceConstraintSet(n_items, std::move(pairs), assessor_id);
}

bool is_consistent(const Ranking& r, const PreferenceConstraintSet& c) {
  if (r.size() != c.n()) throw ValidationError("is_consistent: size mismatch");
  for (const auto& p : c.pairs())
    if (r.rank_of(p.upper) >= r.rank_of(p.lower)) return false;
  return true;
}

std::pair<int, int> rank_bounds(const PreferenceConstraintSet& c, const Ranking& ranks, int u) {
  if (ranks.size() != c.n()) throw ValidationError("rank_bounds: size mismatch");
  int l = 0;
  for (int v : c.better_than(u)) l = std::max(l, ranks.rank_of(v));
  int r = c.n() + 1;
  for (int v : c.worse_than(u)) r = std::min(r, ranks.rank_of(v));
  return {l, r};
}

}  // namespace mallows
