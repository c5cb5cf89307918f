#pragma once

#include <cstdint>
#include <vector>

#include "mallows/distance.hpp"
#include "mallows/partition.hpp"
#include "mallows/proposal.hpp"
#include "mallows/ranking.hpp"
#include "mallows/rng.hpp"

namespace mallows {

struct Priors {
  double lambda = 0.1;  // exponential rate on alpha; the rho prior is uniform
};

// Footrule and Kendall share a rate; Spearman distances grow like n^2 per
// coordinate, so its rate scales with n.
double default_lambda(Metric m, int n);
double default_sigma_alpha(Metric m);

struct Tuning {
  int leap = 1;
  double sigma_alpha = 0.04;
  double sigma_beta = 0.04;  // dynamic model only
  long iterations = 100000;
  long burn_in = 10000;
  int thinning = 10;
  std::uint64_t seed = 1;
  bool exact_proposal_ratio = false;  // diagnostic mode: apply the full q-ratio
  int aug_frequency = 1;              // augmentation sweeps per (rho, alpha) update
  int tie_interval = 10;              // sweeps between tie resampling
  double alpha_init = -1;             // negative: 1/lambda clamped into the table range

  void validate(int n) const;
};

struct ChainDiagnostics {
  long rho_proposals = 0;
  long rho_accepts = 0;
  long alpha_proposals = 0;
  long alpha_accepts = 0;
  long alpha_range_rejects = 0;  // proposals outside the partition table grid
  long aug_proposals = 0;
  long aug_accepts = 0;

  double rho_accept_rate() const { return rho_proposals ? double(rho_accepts) / double(rho_proposals) : 0.0; }
  double aug_accept_rate() const { return aug_proposals ? double(aug_accepts) / double(aug_proposals) : 0.0; }
  double alpha_accept_rate() const { return alpha_proposals ? double(alpha_accepts) / double(alpha_proposals) : 0.0; }
  double range_reject_rate() const { return alpha_proposals ? double(alpha_range_rejects) / double(alpha_proposals) : 0.0; }
  // More than 1% range rejections means the table grid is too narrow.
  bool range_warning() const { return range_reject_rate() > 0.01; }
};

struct PosteriorSamples {
  std::vector<long> iteration;
  std::vector<double> alpha;
  std::vector<Ranking> rho;
  // Per retained draw, per assessor: the augmented complete rankings.
  // Filled only when a partial-data chain is asked to keep them.
  std::vector<std::vector<Ranking>> augmented;
  ChainDiagnostics diag;
  std::size_t size() const { return alpha.size(); }
};

long long total_distance(const std::vector<Ranking>& data, const Ranking& rho, Metric m);

// One consensus move. dist_cur caches total_distance(data, rho, m) and is
// kept in sync. Returns whether the proposal was accepted.
bool mh_step_rho(Ranking& rho, long long& dist_cur, double alpha,
                 const std::vector<Ranking>& data, Metric m, int L, bool exact_ratio,
                 RngStream& rng, ChainDiagnostics& diag);

// One dispersion move: Gaussian walk, exponential prior, N copies of the
// partition function. Negative proposals are rejected outright; proposals
// off the table grid are rejected and counted.
bool mh_step_alpha(double& alpha, long long dist_cur, int N, double lambda, double sigma_alpha,
                   const LogPartitionTable& table, RngStream& rng, ChainDiagnostics& diag);

PosteriorSamples run_chain(const std::vector<Ranking>& data, Metric m, const Priors& priors,
                           const Tuning& tuning, const LogPartitionTable& table);

// Synthetic data: N independent walks of n_leap leap-and-shift moves away
// from rho_true.
std::vector<Ranking> generate_by_perturbation(const Ranking& rho_true, int N, int n_leap, int L,
                                              std::uint64_t seed);

// Draws from the model itself at fixed (rho, alpha) by a long leap-and-shift
// chain: burn-in, then one draw every `spacing` moves. Defaults: burn-in
// 100*n, spacing 3*n.
std::vector<Ranking> sample_mallows(const Ranking& rho, double alpha, Metric m, int N,
                                    std::uint64_t seed, long burn_in = -1, int spacing = -1,
                                    int L = 1);

}  // namespace mallows
