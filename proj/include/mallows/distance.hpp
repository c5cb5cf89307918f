#pragma once

#include <string>

#include "mallows/ranking.hpp"

namespace mallows {

enum class Metric { Footrule, Kendall, Spearman };

Metric metric_from_string(const std::string& s);
std::string to_string(Metric m);

// All three metrics are right-invariant, so the model's normalizing
// constant does not depend on the consensus ranking.
long footrule_distance(const Ranking& r, const Ranking& p);   // sum |R_i - P_i|
long spearman_distance(const Ranking& r, const Ranking& p);   // sum (R_i - P_i)^2
long kendall_distance(const Ranking& r, const Ranking& p);    // discordant pairs, O(n log n)

long rank_distance(Metric m, const Ranking& r, const Ranking& p);

// Per-coordinate distance, needed by the sequential importance sampler.
// Kendall has no such decomposition.
bool has_element_distance(Metric m);
long element_distance(Metric m, int r, int p);
long max_element_distance(Metric m, int n);

}  // namespace mallows
