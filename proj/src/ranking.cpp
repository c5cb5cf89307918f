#include "mallows/ranking.hpp"

#include <algorithm>
#include <numeric>

namespace mallows {

bool is_permutation_vector(const std::vector<int>& r) {
  const int n = static_cast<int>(r.size());
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (int v : r) {
    if (v < 1 || v > n) return false;
    if (seen[static_cast<std::size_t>(v - 1)]) return false;
    seen[static_cast<std::size_t>(v - 1)] = 1;
  }
  return true;
}

Ranking::Ranking(std::vector<int> ranks) : r_(std::move(ranks)) {
  if (r_.empty()) throw ValidationError("Ranking: empty rank vector");
  if (!is_permutation_vector(r_))
    throw ValidationError("Ranking: rank vector is not a permutation of 1..n");
}

Ranking Ranking::identity(int n) {
  std::vector<int> r(static_cast<std::size_t>(n));
  std::iota(r.begin(), r.end(), 1);
  return Ranking(std::move(r), Unchecked{});
}

Ranking Ranking::random(int n, RngStream& rng) {
  std::vector<int> r(static_cast<std::size_t>(n));
  std::iota(r.begin(), r.end(), 1);
  rng.shuffle(r);
  return Ranking(std::move(r), Unchecked{});
}

std::vector<int> Ranking::ordering() const {
  std::vector<int> ord(r_.size());
  for (int i = 0; i < size(); ++i) ord[static_cast<std::size_t>(r_[static_cast<std::size_t>(i)] - 1)] = i;
  return ord;
}

ItemCatalog::ItemCatalog(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw ValidationError("ItemCatalog: no labels");
  std::vector<std::string> sorted = labels_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw ValidationError("ItemCatalog: duplicate label");
}

ItemCatalog ItemCatalog::letters(int n) {
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    if (i < 26)
      labels.push_back(std::string(1, static_cast<char>('A' + i)));
    else
      labels.push_back(std::string(1, static_cast<char>('A' + i % 26)) + std::to_string(i / 26));
  }
  return ItemCatalog(std::move(labels));
}

ItemCatalog ItemCatalog::numbered(int n) {
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) labels.push_back("item" + std::to_string(i + 1));
  return ItemCatalog(std::move(labels));
}

int ItemCatalog::index_of(const std::string& label) const {
  for (int i = 0; i < size(); ++i)
    if (labels_[static_cast<std::size_t>(i)] == label) return i;
  throw ValidationError("ItemCatalog: unknown label '" + label + "'");
}

bool ItemCatalog::contains(const std::string& label) const {
  return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

}  // namespace mallows
