#include "mallows/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace mallows {

void DynamicPriors::validate() const {
  if (!(lambda > 0)) throw ValidationError("lambda must be positive");
  if (!(lambda_beta > 0)) throw ValidationError("lambda_beta must be positive");
  if (!(a > 0) || !(b > 0)) throw ValidationError("inverse-gamma hyperparameters must be positive");
}

namespace {

int observation_n(const TimedObservation& o) {
  return std::visit([](const auto& v) { return v.n(); }, o);
}

}  // namespace

int TimedData::n_items() const {
  for (const auto& slice : slices) {
    if (!slice.empty()) return std::visit([](const auto& v) { return v.n(); }, slice.front());
  }
  throw ValidationError("timed data contains no observations");
}

std::vector<int> TimedData::counts() const {
  std::vector<int> out;
  out.reserve(slices.size());
  for (const auto& slice : slices) out.push_back(static_cast<int>(slice.size()));
  return out;
}

namespace {

long long slice_distance(const std::vector<Ranking>& slice, const Ranking& rho, Metric m) {
  long long total = 0;
  for (const auto& r : slice) total += rank_distance(m, r, rho);
  return total;
}

}  // namespace

bool mh_rho_t(DynamicState& s, int t, const std::vector<std::vector<Ranking>>& resolved, Metric m,
              int L, RngStream& rng, DynamicDiagnostics& diag) {
  Ranking& rho = s.rho[static_cast<std::size_t>(t)];
  const int T = static_cast<int>(s.rho.size()) - 1;
  const int n = rho.size();
  const LeapProposal prop = leap_and_shift(rho, L, rng);

  double log_ratio = -s.alpha[static_cast<std::size_t>(t)] / n *
                     double(slice_distance(resolved[static_cast<std::size_t>(t)], prop.rho, m) -
                            slice_distance(resolved[static_cast<std::size_t>(t)], rho, m));
  if (t > 0) {
    const Ranking& prev = s.rho[static_cast<std::size_t>(t - 1)];
    log_ratio -= s.beta / n * double(rank_distance(m, prop.rho, prev) - rank_distance(m, rho, prev));
  }
  if (t < T) {
    const Ranking& next = s.rho[static_cast<std::size_t>(t + 1)];
    log_ratio -= s.beta / n * double(rank_distance(m, next, prop.rho) - rank_distance(m, next, rho));
  }
  diag.rho_proposals += 1;
  const double u = rng.uniform_pos();
  if (std::log(u) < log_ratio) {
    rho = prop.rho;
    diag.rho_accepts += 1;
    return true;
  }
  return false;
}

bool mh_alpha_t(DynamicState& s, int t, const std::vector<std::vector<Ranking>>& resolved, Metric m,
                double lambda, double sigma_alpha_walk, const LogPartitionTable& table,
                RngStream& rng, DynamicDiagnostics& diag) {
  const int T = static_cast<int>(s.alpha.size()) - 1;
  const int n = table.n;
  const double cur = s.alpha[static_cast<std::size_t>(t)];
  const double prop = cur + sigma_alpha_walk * rng.normal();
  diag.alpha_proposals += 1;
  if (prop < 0) {
    rng.uniform_pos();
    return false;
  }
  if (prop < table.alpha.front() || prop > table.alpha.back()) {
    diag.alpha_range_rejects += 1;
    rng.uniform_pos();
    return false;
  }

  const long long dist = slice_distance(resolved[static_cast<std::size_t>(t)], s.rho[static_cast<std::size_t>(t)], m);
  const double n_t = double(resolved[static_cast<std::size_t>(t)].size());
  double log_ratio = -n_t * (table.evaluate(prop) - table.evaluate(cur)) -
                     (prop - cur) / n * double(dist);
  const double var2 = 2.0 * s.sigma_alpha_sq;
  if (t > 0) {
    const double prev = s.alpha[static_cast<std::size_t>(t - 1)];
    log_ratio -= ((prop - prev) * (prop - prev) - (cur - prev) * (cur - prev)) / var2;
  } else {
    log_ratio -= lambda * (prop - cur);
  }
  if (t < T) {
    const double next = s.alpha[static_cast<std::size_t>(t + 1)];
    log_ratio -= ((next - prop) * (next - prop) - (next - cur) * (next - cur)) / var2;
  }
  const double u = rng.uniform_pos();
  if (std::log(u) < log_ratio) {
    s.alpha[static_cast<std::size_t>(t)] = prop;
    diag.alpha_accepts += 1;
    return true;
  }
  return false;
}

bool mh_beta(DynamicState& s, Metric m, double lambda_beta, double sigma_beta,
             const LogPartitionTable& table, RngStream& rng, DynamicDiagnostics& diag) {
  const int T = static_cast<int>(s.rho.size()) - 1;
  const int n = table.n;
  const double cur = s.beta;
  const double prop = cur + sigma_beta * rng.normal();
  diag.beta_proposals += 1;
  if (prop < 0) {
    rng.uniform_pos();
    return false;
  }
  if (prop < table.alpha.front() || prop > table.alpha.back()) {
    diag.beta_range_rejects += 1;
    rng.uniform_pos();
    return false;
  }
  long long trans = 0;
  for (int t = 1; t <= T; ++t) {
    trans += rank_distance(m, s.rho[static_cast<std::size_t>(t)], s.rho[static_cast<std::size_t>(t - 1)]);
  }
  const double log_ratio = -double(T) * (table.evaluate(prop) - table.evaluate(cur)) -
                           (prop - cur) / n * double(trans) - lambda_beta * (prop - cur);
  const double u = rng.uniform_pos();
  if (std::log(u) < log_ratio) {
    s.beta = prop;
    diag.beta_accepts += 1;
    return true;
  }
  return false;
}

double gibbs_sigma_alpha(const DynamicState& s, double a, double b, RngStream& rng) {
  const int T = static_cast<int>(s.alpha.size()) - 1;
  double ssq = 0;
  for (int t = 1; t <= T; ++t) {
    const double inc = s.alpha[static_cast<std::size_t>(t)] - s.alpha[static_cast<std::size_t>(t - 1)];
    ssq += inc * inc;
  }
  return rng.inverse_gamma(a + 0.5 * T, b + 0.5 * ssq);
}

DynamicSamples run_dynamic_chain(const TimedData& data, Metric m, const DynamicPriors& priors,
                                 const Tuning& tuning, const LogPartitionTable& table) {
  if (data.slices.empty()) throw ValidationError("timed data has no slices");
  priors.validate();
  const int n = data.n_items();
  if (n < 2) throw ValidationError("need at least two items");
  for (const auto& slice : data.slices) {
    for (const auto& o : slice) {
      if (observation_n(o) != n) throw ValidationError("observations rank different numbers of items");
    }
  }
  if (table.n != n) throw ValidationError("partition table built for a different n");
  if (table.metric != m) throw ValidationError("partition table built for a different metric");
  tuning.validate(n);

  const int T = data.T();
  RngStream root(tuning.seed);
  RngStream init_rng = root.derive(0);
  RngStream rho_rng = root.derive(1);
  RngStream alpha_rng = root.derive(2);
  RngStream beta_rng = root.derive(3);
  RngStream sigma_rng = root.derive(4);
  RngStream tie_root = root.derive(5);

  std::vector<std::vector<Ranking>> resolved(static_cast<std::size_t>(T) + 1);
  bool any_ties = false;
  for (int t = 0; t <= T; ++t) {
    for (const auto& o : data.slices[static_cast<std::size_t>(t)]) {
      if (const auto* r = std::get_if<Ranking>(&o)) {
        resolved[static_cast<std::size_t>(t)].push_back(*r);
      } else {
        resolved[static_cast<std::size_t>(t)].push_back(resample_ties(std::get<TieSet>(o), init_rng));
        any_ties = true;
      }
    }
  }

  DynamicState state;
  state.rho.reserve(static_cast<std::size_t>(T) + 1);
  for (int t = 0; t <= T; ++t) state.rho.push_back(Ranking::random(n, init_rng));
  double alpha0 = tuning.alpha_init;
  if (alpha0 < 0) {
    alpha0 = std::clamp(1.0 / priors.lambda, table.alpha.front(), table.alpha.back());
  } else if (alpha0 < table.alpha.front() || alpha0 > table.alpha.back()) {
    throw ValidationError("alpha_init outside the partition table range");
  }
  state.alpha.assign(static_cast<std::size_t>(T) + 1, alpha0);
  state.beta = std::clamp(1.0 / priors.lambda_beta, table.alpha.front(), table.alpha.back());
  state.sigma_alpha_sq = priors.b / (priors.a + 1.0);

  DynamicSamples out;
  out.T = T;
  for (long it = 1; it <= tuning.iterations; ++it) {
    if (any_ties && it % tuning.tie_interval == 0) {
      std::uint64_t obs_index = 0;
      for (int t = 0; t <= T; ++t) {
        const auto& slice = data.slices[static_cast<std::size_t>(t)];
        for (std::size_t j = 0; j < slice.size(); ++j, ++obs_index) {
          if (const auto* ties = std::get_if<TieSet>(&slice[j])) {
            RngStream rng = tie_root.derive(static_cast<std::uint64_t>(it), obs_index);
            resample_tie_state(resolved[static_cast<std::size_t>(t)][j], *ties,
                               state.rho[static_cast<std::size_t>(t)], m, rng);
          }
        }
      }
    }
    for (int t = 0; t <= T; ++t) mh_rho_t(state, t, resolved, m, tuning.leap, rho_rng, out.diag);
    for (int t = 0; t <= T; ++t) {
      mh_alpha_t(state, t, resolved, m, priors.lambda, tuning.sigma_alpha, table, alpha_rng,
                 out.diag);
    }
    mh_beta(state, m, priors.lambda_beta, tuning.sigma_beta, table, beta_rng, out.diag);
    state.sigma_alpha_sq = gibbs_sigma_alpha(state, priors.a, priors.b, sigma_rng);
    if (it > tuning.burn_in && (it - tuning.burn_in) % tuning.thinning == 0) {
      out.iteration.push_back(it);
      out.alpha.push_back(state.alpha);
      out.rho.push_back(state.rho);
      out.beta.push_back(state.beta);
      out.sigma_alpha_sq.push_back(state.sigma_alpha_sq);
    }
  }
  if (out.diag.range_warning()) {
    std::fprintf(stderr,
                 "warning: %.1f%% of dispersion proposals fell outside the partition table grid\n",
                 100.0 * out.diag.range_reject_rate());
  }
  return out;
}

std::vector<std::vector<double>> mean_rank_trajectory(const DynamicSamples& samples) {
  if (samples.size() == 0) throw ValidationError("no samples");
  const int T = samples.T;
  const int n = samples.rho.front().front().size();
  std::vector<std::vector<double>> mean(static_cast<std::size_t>(T) + 1,
                                        std::vector<double>(static_cast<std::size_t>(n), 0.0));
  for (const auto& draw : samples.rho) {
    for (int t = 0; t <= T; ++t) {
      for (int i = 0; i < n; ++i) {
        mean[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)] +=
            draw[static_cast<std::size_t>(t)].rank_of(i);
      }
    }
  }
  for (auto& row : mean) {
    for (auto& v : row) v /= double(samples.size());
  }
  return mean;
}

}  // namespace mallows
