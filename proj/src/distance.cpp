#include "mallows/distance.hpp"

#include <cstdlib>

namespace mallows {

Metric metric_from_string(const std::string& s) {
  if (s == "footrule") return Metric::Footrule;
  if (s == "kendall") return Metric::Kendall;
  if (s == "spearman") return Metric::Spearman;
  throw ValidationError("unknown metric '" + s + "' (expected footrule, kendall or spearman)");
}

std::string to_string(Metric m) {
  switch (m) {
    case Metric::Footrule: return "footrule";
    case Metric::Kendall: return "kendall";
    case Metric::Spearman: return "spearman";
  }
  return "?";
}

namespace {

void check_same_n(const Ranking& r, const Ranking& p) {
  if (r.size() != p.size())
    throw ValidationError("distance: rankings have different lengths");
}

// Inversions of v by mergesort, counting pairs (i<j) with v[i] > v[j].
long count_inversions(std::vector<int>& v, std::vector<int>& buf, int lo, int hi) {
  if (hi - lo < 2) return 0;
  const int mid = (lo + hi) / 2;
  long inv = count_inversions(v, buf, lo, mid) + count_inversions(v, buf, mid, hi);
  int a = lo, b = mid, out = lo;
  while (a < mid && b < hi) {
    if (v[static_cast<std::size_t>(a)] <= v[static_cast<std::size_t>(b)]) {
      buf[static_cast<std::size_t>(out++)] = v[static_cast<std::size_t>(a++)];
    } else {
      inv += mid - a;
      buf[static_cast<std::size_t>(out++)] = v[static_cast<std::size_t>(b++)];
    }
  }
  while (a < mid) buf[static_cast<std::size_t>(out++)] = v[static_cast<std::size_t>(a++)];
  while (b < hi) buf[static_cast<std::size_t>(out++)] = v[static_cast<std::size_t>(b++)];
  for (int i = lo; i < hi; ++i) v[static_cast<std::size_t>(i)] = buf[static_cast<std::size_t>(i)];
  return inv;
}

}  // namespace

long footrule_distance(const Ranking& r, const Ranking& p) {
  check_same_n(r, p);
  long d = 0;
  for (int i = 0; i < r.size(); ++i) d += std::abs(r.rank_of(i) - p.rank_of(i));
  return d;
}

long spearman_distance(const Ranking& r, const Ranking& p) {
  check_same_n(r, p);
  long d = 0;
  for (int i = 0; i < r.size(); ++i) {
    const long t = r.rank_of(i) - p.rank_of(i);
    d += t * t;
  }
  return d;
}

long kendall_distance(const Ranking& r, const Ranking& p) {
  check_same_n(r, p);
  const int n = r.size();
  // v[k] = rank under R of the item that P places at rank k+1; the number
  // of inversions of v is exactly the number of discordant pairs.
  std::vector<int> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(p.rank_of(i) - 1)] = r.rank_of(i);
  std::vector<int> buf(static_cast<std::size_t>(n));
  return count_inversions(v, buf, 0, n);
}

long rank_distance(Metric m, const Ranking& r, const Ranking& p) {
  switch (m) {
    case Metric::Footrule: return footrule_distance(r, p);
    case Metric::Kendall: return kendall_distance(r, p);
    case Metric::Spearman: return spearman_distance(r, p);
  }
  return 0;
}

bool has_element_distance(Metric m) { return m != Metric::Kendall; }

long element_distance(Metric m, int r, int p) {
  switch (m) {
    case Metric::Footrule: return std::abs(r - p);
    case Metric::Spearman: {
      const long t = r - p;
      return t * t;
    }
    case Metric::Kendall:
      throw std::logic_error("element_distance: Kendall has no per-element decomposition");
  }
  return 0;
}

long max_element_distance(Metric m, int n) {
  return element_distance(m, n, 1);
}

}  // namespace mallows
