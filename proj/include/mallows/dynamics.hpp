#pragma once

#include <variant>
#include <vector>

#include "mallows/augmentation.hpp"
#include "mallows/sampler.hpp"

namespace mallows {

struct DynamicPriors {
  double lambda = 0.1;       // rate for alpha^(0)
  double lambda_beta = 0.1;  // rate for beta; same value by default
  double a = 1.0;            // inverse-gamma shape for sigma_alpha^2
  double b = 1.0;            // inverse-gamma scale
  void validate() const;
};

// One observed ranking, or a weak ordering whose within-block order gets
// resampled during the run.
using TimedObservation = std::variant<Ranking, TieSet>;

struct TimedData {
  std::vector<std::vector<TimedObservation>> slices;  // slices[t], N_t >= 0 allowed

  int T() const { return static_cast<int>(slices.size()) - 1; }
  int n_items() const;  // from the first observation; throws if there is none
  std::vector<int> counts() const;
};

struct DynamicState {
  std::vector<Ranking> rho;   // T+1 latent consensus rankings
  std::vector<double> alpha;  // T+1 dispersions
  double beta = 0;            // transition dispersion
  double sigma_alpha_sq = 0;  // random-walk variance of alpha
};

struct DynamicDiagnostics {
  long rho_proposals = 0;
  long rho_accepts = 0;
  long alpha_proposals = 0;
  long alpha_accepts = 0;
  long alpha_range_rejects = 0;
  long beta_proposals = 0;
  long beta_accepts = 0;
  long beta_range_rejects = 0;

  double rho_accept_rate() const { return rho_proposals ? double(rho_accepts) / double(rho_proposals) : 0.0; }
  double alpha_accept_rate() const { return alpha_proposals ? double(alpha_accepts) / double(alpha_proposals) : 0.0; }
  double beta_accept_rate() const { return beta_proposals ? double(beta_accepts) / double(beta_proposals) : 0.0; }
  double range_reject_rate() const {
    const long total = alpha_proposals + beta_proposals;
    return total ? double(alpha_range_rejects + beta_range_rejects) / double(total) : 0.0;
  }
  bool range_warning() const { return range_reject_rate() > 0.01; }
};

struct DynamicSamples {
  int T = 0;
  std::vector<long> iteration;
  std::vector<std::vector<double>> alpha;  // draw -> T+1 values
  std::vector<std::vector<Ranking>> rho;   // draw -> T+1 rankings
  std::vector<double> beta;
  std::vector<double> sigma_alpha_sq;
  DynamicDiagnostics diag;
  std::size_t size() const { return iteration.size(); }
};

// Consensus move at slice t. The log acceptance combines the data term at t
// with the Mallows transition to both neighbors; a boundary slice drops the
// absent neighbor. `resolved` holds the current complete rankings per slice.
bool mh_rho_t(DynamicState& s, int t, const std::vector<std::vector<Ranking>>& resolved, Metric m,
              int L, RngStream& rng, DynamicDiagnostics& diag);

// Dispersion move at slice t: Gaussian proposal, data term at t, Gaussian
// random-walk terms to both neighbors, exponential prior on slice 0 only.
bool mh_alpha_t(DynamicState& s, int t, const std::vector<std::vector<Ranking>>& resolved, Metric m,
                double lambda, double sigma_alpha_walk, const LogPartitionTable& table,
                RngStream& rng, DynamicDiagnostics& diag);

// Transition-dispersion move: Gaussian walk against
// Z_n(beta)^{-T} exp[-(beta/n) sum_t d(rho_t, rho_{t-1}) - lambda beta].
bool mh_beta(DynamicState& s, Metric m, double lambda_beta, double sigma_beta,
             const LogPartitionTable& table, RngStream& rng, DynamicDiagnostics& diag);

// Conjugate draw: IG(a + T/2, b + half the sum of squared alpha increments).
double gibbs_sigma_alpha(const DynamicState& s, double a, double b, RngStream& rng);

DynamicSamples run_dynamic_chain(const TimedData& data, Metric m, const DynamicPriors& priors,
                                 const Tuning& tuning, const LogPartitionTable& table);

// Posterior mean rank per slice and item: out[t][i] = E[rho_i^(t) | data].
std::vector<std::vector<double>> mean_rank_trajectory(const DynamicSamples& samples);

}  // namespace mallows
