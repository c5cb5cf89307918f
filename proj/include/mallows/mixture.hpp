#pragma once

#include <vector>

#include "mallows/augmentation.hpp"
#include "mallows/sampler.hpp"

namespace mallows {

struct MixturePriors {
  double lambda = 0.1;  // shared exponential rate on every alpha_c
  double psi = 2.0;     // symmetric Dirichlet concentration on tau
  void validate() const;
};

// The published acceptance formula for the cluster dispersions carries no
// proposal-density ratio even though the Beta-scaled and shifted-uniform
// proposals are asymmetric. AsPublished implements that formula verbatim;
// Corrected adds the ratios.
enum class AlphaProposalMode { AsPublished, Corrected };

struct MixtureDiagnostics {
  long rho_proposals = 0;
  long rho_accepts = 0;
  long alpha_proposals = 0;
  long alpha_accepts = 0;
  long alpha_range_rejects = 0;
  long degenerate_support_events = 0;  // alpha proposal support narrower than 1e-6
  long aug_proposals = 0;
  long aug_accepts = 0;

  double rho_accept_rate() const { return rho_proposals ? double(rho_accepts) / double(rho_proposals) : 0.0; }
  double alpha_accept_rate() const { return alpha_proposals ? double(alpha_accepts) / double(alpha_proposals) : 0.0; }
  double range_reject_rate() const { return alpha_proposals ? double(alpha_range_rejects) / double(alpha_proposals) : 0.0; }
  bool range_warning() const { return range_reject_rate() > 0.01; }
};

struct MixtureState {
  std::vector<Ranking> rho;   // one center per cluster
  std::vector<double> alpha;  // strictly increasing
  std::vector<double> tau;    // simplex point
  std::vector<int> z;         // cluster label per assessor, 0-based

  int n_clusters() const { return static_cast<int>(alpha.size()); }
  std::vector<int> counts() const;
  bool ordered() const;  // alpha_1 < ... < alpha_C
};

struct MixtureSamples {
  int C = 0;
  int N = 0;
  std::vector<long> iteration;
  std::vector<std::vector<double>> alpha;    // draw -> C values
  std::vector<std::vector<double>> tau;      // draw -> C values
  std::vector<std::vector<Ranking>> rho;     // draw -> C centers
  std::vector<std::vector<int>> z;           // draw -> N labels
  std::vector<std::vector<Ranking>> augmented;  // draw -> N rankings, if kept
  MixtureDiagnostics diag;
  std::size_t size() const { return iteration.size(); }
};

std::vector<double> gibbs_tau(const std::vector<int>& counts, double psi, RngStream& rng);

// log tau_c - log Z(alpha_c) - (alpha_c/n) d(R_j, rho_c), one entry per
// cluster. gibbs_z draws the label from these after normalization.
std::vector<double> cluster_log_weights(const Ranking& R_j, const MixtureState& s,
                                        const LogPartitionTable& table, Metric m);
int gibbs_z(const Ranking& R_j, const MixtureState& s, const LogPartitionTable& table, Metric m,
            RngStream& rng);

// Consensus move for one cluster against its current members.
bool mh_rho_cluster(MixtureState& s, int c, const std::vector<Ranking>& data, Metric m, int L,
                    RngStream& rng, MixtureDiagnostics& diag);

// Dispersion move for one cluster. Proposal by position: interior clusters
// draw uniformly between their neighbors, the lowest draws alpha_2 * B(5,2),
// the highest draws U(alpha_{C-1}, alpha_C + 1), and a lone cluster uses the
// Gaussian walk of the base sampler. The ordering constraint holds by
// construction; proposals that would still break it (only possible after a
// degenerate-support clamp) are rejected.
bool mh_alpha_cluster(MixtureState& s, int c, const std::vector<Ranking>& data, Metric m,
                      double lambda, double sigma_alpha, AlphaProposalMode mode,
                      const LogPartitionTable& table, RngStream& rng, MixtureDiagnostics& diag);

MixtureSamples run_mixture_chain(const std::vector<AugSource>& data, int C, Metric m,
                                 const MixturePriors& priors, const Tuning& tuning,
                                 const LogPartitionTable& table,
                                 AlphaProposalMode mode = AlphaProposalMode::AsPublished,
                                 bool keep_augmented = false);
MixtureSamples run_mixture_chain(const std::vector<Ranking>& data, int C, Metric m,
                                 const MixturePriors& priors, const Tuning& tuning,
                                 const LogPartitionTable& table,
                                 AlphaProposalMode mode = AlphaProposalMode::AsPublished);

// One value per retained draw: sum over assessors of the squared distance to
// their assigned center. The elbow over C in this statistic guides the
// choice of cluster count.
std::vector<double> within_cluster_ss(const MixtureSamples& samples,
                                      const std::vector<Ranking>& data, Metric m);

// Supervised classification: labels are fixed on the training assessors and
// Gibbs-sampled on the test assessors. Shared mode fits one dispersion for
// all classes (Gaussian walk); PerClass gives each class its own, with no
// ordering constraint.
enum class ClassifyAlphaMode { Shared, PerClass };

struct ClassifyResult {
  int n_classes = 0;
  std::vector<std::vector<double>> probability;  // test assessor -> class
  std::vector<int> map_label;                    // argmax, ties to the lowest class
  MixtureDiagnostics diag;
};

ClassifyResult classify(const std::vector<Ranking>& train, const std::vector<int>& labels,
                        const std::vector<Ranking>& test, Metric m, const MixturePriors& priors,
                        const Tuning& tuning, const LogPartitionTable& table,
                        ClassifyAlphaMode mode = ClassifyAlphaMode::Shared);

}  // namespace mallows
