#pragma once

#include <compare>
#include <string>
#include <vector>

#include "mallows/rng.hpp"

namespace mallows {

// Thrown for malformed inputs (bad permutations, bad CSV cells, shape
// mismatches). The CLI maps it to exit code 2.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

bool is_permutation_vector(const std::vector<int>& r);

// A complete ranking of n items: ranks[i] is the rank of item i, 1 = best.
// Immutable after construction.
class Ranking {
 public:
  explicit Ranking(std::vector<int> ranks);
  static Ranking identity(int n);
  static Ranking unchecked(std::vector<int> ranks) { return Ranking(std::move(ranks), Unchecked{}); }
  static Ranking random(int n, RngStream& rng);

  int size() const { return static_cast<int>(r_.size()); }
  int rank_of(int item) const { return r_[static_cast<std::size_t>(item)]; }
  const std::vector<int>& ranks() const { return r_; }

  // ordering[k] = item holding rank k+1.
  std::vector<int> ordering() const;

  bool operator==(const Ranking& o) const = default;
  auto operator<=>(const Ranking& o) const = default;

 private:
  struct Unchecked {};
  Ranking(std::vector<int> ranks, Unchecked) : r_(std::move(ranks)) {}
  std::vector<int> r_;
};

// Ordered list of unique item labels; position in the list is the item
// index used everywhere internally.
class ItemCatalog {
 public:
  ItemCatalog() = default;
  explicit ItemCatalog(std::vector<std::string> labels);
  static ItemCatalog letters(int n);     // A..Z, then A1.. for larger n
  static ItemCatalog numbered(int n);    // item1..itemN

  int size() const { return static_cast<int>(labels_.size()); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(int i) const { return labels_[static_cast<std::size_t>(i)]; }
  int index_of(const std::string& label) const;  // throws ValidationError if absent
  bool contains(const std::string& label) const;

  bool operator==(const ItemCatalog& o) const { return labels_ == o.labels_; }

 private:
  std::vector<std::string> labels_;
};

}  // namespace mallows
