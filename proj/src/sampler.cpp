#include "mallows/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

namespace mallows {

double default_lambda(Metric m, int n) {
  return m == Metric::Spearman ? n / 20.0 : 0.1;
}

double default_sigma_alpha(Metric m) {
  return m == Metric::Spearman ? 0.0016 : 0.04;
}

void Tuning::validate(int n) const {
  if (leap < 1 || leap > max_leap(n))
    throw ValidationError("tuning: leap size must lie in {1,...,ceil(n/2)}");
  if (sigma_alpha <= 0) throw ValidationError("tuning: sigma_alpha must be positive");
  if (iterations < 1) throw ValidationError("tuning: iterations must be >= 1");
  if (burn_in < 0 || burn_in >= iterations)
    throw ValidationError("tuning: burn_in must lie in [0, iterations)");
  if (thinning < 1) throw ValidationError("tuning: thinning must be >= 1");
  if (aug_frequency < 1) throw ValidationError("tuning: aug_frequency must be >= 1");
  if (tie_interval < 1) throw ValidationError("tuning: tie_interval must be >= 1");
}

long long total_distance(const std::vector<Ranking>& data, const Ranking& rho, Metric m) {
  long long d = 0;
  for (const auto& r : data) d += rank_distance(m, r, rho);
  return d;
}

bool mh_step_rho(Ranking& rho, long long& dist_cur, double alpha,
                 const std::vector<Ranking>& data, Metric m, int L, bool exact_ratio,
                 RngStream& rng, ChainDiagnostics& diag) {
  ++diag.rho_proposals;
  LeapProposal prop = leap_and_shift(rho, L, rng);
  const long long dist_prop = total_distance(data, prop.rho, m);
  double log_ratio = -(alpha / rho.size()) * static_cast<double>(dist_prop - dist_cur);
  if (exact_ratio) {
    log_ratio += leap_shift_transition_log_prob(prop.rho, rho, L) -
                 leap_shift_transition_log_prob(rho, prop.rho, L);
  }
  if (std::log(rng.uniform_pos()) < log_ratio) {
    rho = std::move(prop.rho);
    dist_cur = dist_prop;
    ++diag.rho_accepts;
    return true;
  }
  return false;
}

bool mh_step_alpha(double& alpha, long long dist_cur, int N, double lambda, double sigma_alpha,
                   const LogPartitionTable& table, RngStream& rng, ChainDiagnostics& diag) {
  ++diag.alpha_proposals;
  const double prop = alpha + sigma_alpha * rng.normal();
  if (prop < 0) {
    rng.uniform_pos();  // keep the per-step draw count fixed
    return false;
  }
  if (!table.in_range(prop)) {
    ++diag.alpha_range_rejects;
    rng.uniform_pos();
    return false;
  }
  const double log_ratio = -static_cast<double>(N) * (table.evaluate(prop) - table.evaluate(alpha)) -
                           lambda * (prop - alpha) -
                           (prop - alpha) / table.n * static_cast<double>(dist_cur);
  if (std::log(rng.uniform_pos()) < log_ratio) {
    alpha = prop;
    ++diag.alpha_accepts;
    return true;
  }
  return false;
}

namespace {

double initial_alpha(const Tuning& tuning, double lambda, const LogPartitionTable& table) {
  if (tuning.alpha_init >= 0) {
    if (!table.in_range(tuning.alpha_init))
      throw ValidationError("tuning: alpha_init lies outside the partition table range");
    return tuning.alpha_init;
  }
  return std::clamp(1.0 / lambda, table.alpha_min(), table.alpha_max());
}

}  // namespace

PosteriorSamples run_chain(const std::vector<Ranking>& data, Metric m, const Priors& priors,
                           const Tuning& tuning, const LogPartitionTable& table) {
  const int n = table.n;
  if (n < 2) throw ValidationError("run_chain: need n >= 2");
  for (const auto& r : data)
    if (r.size() != n) throw ValidationError("run_chain: data size does not match the table n");
  tuning.validate(n);
  if (priors.lambda <= 0) throw ValidationError("run_chain: lambda must be positive");

  RngStream root(tuning.seed);
  RngStream init_rng = root.derive(0);
  RngStream rho_rng = root.derive(1);
  RngStream alpha_rng = root.derive(2);

  Ranking rho = Ranking::random(n, init_rng);
  double alpha = initial_alpha(tuning, priors.lambda, table);
  long long dist = total_distance(data, rho, m);
  const int N = static_cast<int>(data.size());

  PosteriorSamples out;
  const long keep = (tuning.iterations - tuning.burn_in) / tuning.thinning;
  out.iteration.reserve(static_cast<std::size_t>(keep));
  out.alpha.reserve(static_cast<std::size_t>(keep));
  out.rho.reserve(static_cast<std::size_t>(keep));

  for (long it = 1; it <= tuning.iterations; ++it) {
    mh_step_rho(rho, dist, alpha, data, m, tuning.leap, tuning.exact_proposal_ratio, rho_rng,
                out.diag);
    mh_step_alpha(alpha, dist, N, priors.lambda, tuning.sigma_alpha, table, alpha_rng, out.diag);
    if (it > tuning.burn_in && (it - tuning.burn_in) % tuning.thinning == 0) {
      out.iteration.push_back(it);
      out.alpha.push_back(alpha);
      out.rho.push_back(rho);
    }
  }
  if (out.diag.range_warning())
    std::cerr << "warning: " << 100.0 * out.diag.range_reject_rate()
              << "% of alpha proposals fell outside the partition table grid; "
                 "rebuild the table with a wider alpha range\n";
  return out;
}

std::vector<Ranking> generate_by_perturbation(const Ranking& rho_true, int N, int n_leap, int L,
                                              std::uint64_t seed) {
  if (N < 0) throw ValidationError("generate_by_perturbation: N must be nonnegative");
  if (n_leap < 0) throw ValidationError("generate_by_perturbation: n_leap must be nonnegative");
  RngStream root(seed);
  std::vector<Ranking> out;
  out.reserve(static_cast<std::size_t>(N));
  for (int j = 0; j < N; ++j) {
    RngStream rng = root.derive(static_cast<std::uint64_t>(j));
    Ranking r = rho_true;
    for (int s = 0; s < n_leap; ++s) r = leap_and_shift(r, L, rng).rho;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<Ranking> sample_mallows(const Ranking& rho, double alpha, Metric m, int N,
                                    std::uint64_t seed, long burn_in, int spacing, int L) {
  if (alpha < 0) throw NumericError("sample_mallows: alpha must be nonnegative");
  if (N < 0) throw ValidationError("sample_mallows: N must be nonnegative");
  const int n = rho.size();
  if (burn_in < 0) burn_in = 100L * n;
  if (spacing < 1) spacing = 3 * n;
  RngStream rng = RngStream(seed).derive(0xda7a);
  Ranking cur = Ranking::random(n, rng);
  long long dist = rank_distance(m, cur, rho);
  std::vector<Ranking> dummy{rho};
  ChainDiagnostics diag;
  auto step = [&] {
    // Single-datum target exp(-alpha/n d(R, rho)): Z cancels, so no table.
    mh_step_rho(cur, dist, alpha, dummy, m, L, false, rng, diag);
  };
  for (long i = 0; i < burn_in; ++i) step();
  std::vector<Ranking> out;
  out.reserve(static_cast<std::size_t>(N));
  for (int k = 0; k < N; ++k) {
    for (int s = 0; s < spacing; ++s) step();
    out.push_back(cur);
  }
  return out;
}

}  // namespace mallows
