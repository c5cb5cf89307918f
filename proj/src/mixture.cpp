#include "mallows/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace mallows {

namespace {

constexpr double kMinSupportWidth = 1e-6;

long long cluster_distance_sum(const std::vector<Ranking>& data, const std::vector<int>& z, int c,
                               const Ranking& rho, Metric m) {
  long long total = 0;
  for (std::size_t j = 0; j < data.size(); ++j) {
    if (z[j] == c) total += rank_distance(m, data[j], rho);
  }
  return total;
}

double log_beta52_pdf(double x) {
  // B(5,2): Gamma(7)/(Gamma(5)Gamma(2)) x^4 (1-x)
  return std::lgamma(7.0) - std::lgamma(5.0) - std::lgamma(2.0) + 4.0 * std::log(x) +
         std::log1p(-x);
}

void check_ordering(const MixtureState& s) {
  if (!s.ordered()) throw std::logic_error("cluster dispersion ordering violated");
}

}  // namespace

void MixturePriors::validate() const {
  if (!(lambda > 0)) throw ValidationError("lambda must be positive");
  if (!(psi > 0)) throw ValidationError("psi must be positive");
}

std::vector<int> MixtureState::counts() const {
  std::vector<int> n_c(static_cast<std::size_t>(n_clusters()), 0);
  for (int label : z) n_c[static_cast<std::size_t>(label)] += 1;
  return n_c;
}

bool MixtureState::ordered() const {
  for (std::size_t c = 1; c < alpha.size(); ++c) {
    if (!(alpha[c - 1] < alpha[c])) return false;
  }
  return true;
}

std::vector<double> gibbs_tau(const std::vector<int>& counts, double psi, RngStream& rng) {
  std::vector<double> conc(counts.size());
  for (std::size_t c = 0; c < counts.size(); ++c) conc[c] = psi + counts[c];
  return rng.dirichlet(conc);
}

std::vector<double> cluster_log_weights(const Ranking& R_j, const MixtureState& s,
                                        const LogPartitionTable& table, Metric m) {
  const int C = s.n_clusters();
  const int n = R_j.size();
  std::vector<double> lw(static_cast<std::size_t>(C));
  for (int c = 0; c < C; ++c) {
    const double tau_c = s.tau[static_cast<std::size_t>(c)];
    const double log_tau = tau_c > 0 ? std::log(tau_c) : -std::numeric_limits<double>::infinity();
    const double alpha_c = s.alpha[static_cast<std::size_t>(c)];
    const long long d = rank_distance(m, R_j, s.rho[static_cast<std::size_t>(c)]);
    lw[static_cast<std::size_t>(c)] = log_tau - table.evaluate(alpha_c) - alpha_c / n * double(d);
  }
  return lw;
}

int gibbs_z(const Ranking& R_j, const MixtureState& s, const LogPartitionTable& table, Metric m,
            RngStream& rng) {
  return rng.categorical_from_log(cluster_log_weights(R_j, s, table, m));
}

bool mh_rho_cluster(MixtureState& s, int c, const std::vector<Ranking>& data, Metric m, int L,
                    RngStream& rng, MixtureDiagnostics& diag) {
  Ranking& rho = s.rho[static_cast<std::size_t>(c)];
  const LeapProposal prop = leap_and_shift(rho, L, rng);
  long long delta = 0;
  for (std::size_t j = 0; j < data.size(); ++j) {
    if (s.z[j] != c) continue;
    delta += rank_distance(m, data[j], prop.rho) - rank_distance(m, data[j], rho);
  }
  const double alpha_c = s.alpha[static_cast<std::size_t>(c)];
  const double log_ratio = -alpha_c / rho.size() * double(delta);
  diag.rho_proposals += 1;
  const double u = rng.uniform_pos();
  if (std::log(u) < log_ratio) {
    rho = prop.rho;
    diag.rho_accepts += 1;
    return true;
  }
  return false;
}

bool mh_alpha_cluster(MixtureState& s, int c, const std::vector<Ranking>& data, Metric m,
                      double lambda, double sigma_alpha, AlphaProposalMode mode,
                      const LogPartitionTable& table, RngStream& rng, MixtureDiagnostics& diag) {
  const int C = s.n_clusters();
  const double cur = s.alpha[static_cast<std::size_t>(c)];
  diag.alpha_proposals += 1;

  double prop = 0;
  double log_q_correction = 0;
  if (C == 1) {
    prop = cur + sigma_alpha * rng.normal();
  } else if (c == 0) {
    double scale = s.alpha[1];
    if (scale < kMinSupportWidth) {
      scale = kMinSupportWidth;
      diag.degenerate_support_events += 1;
    }
    prop = scale * rng.beta(5.0, 2.0);
    if (mode == AlphaProposalMode::Corrected) {
      log_q_correction = log_beta52_pdf(cur / scale) - log_beta52_pdf(prop / scale);
    }
  } else if (c == C - 1) {
    const double lo = s.alpha[static_cast<std::size_t>(c - 1)];
    const double hi = cur + 1.0;
    prop = rng.uniform(lo, hi);
    if (mode == AlphaProposalMode::Corrected) {
      const double rev_hi = prop + 1.0;
      if (cur >= rev_hi) return false;  // reverse move could not reach here
      log_q_correction = std::log(hi - lo) - std::log(rev_hi - lo);
    }
  } else {
    const double lo = s.alpha[static_cast<std::size_t>(c - 1)];
    double hi = s.alpha[static_cast<std::size_t>(c + 1)];
    if (hi - lo < kMinSupportWidth) {
      hi = lo + kMinSupportWidth;
      diag.degenerate_support_events += 1;
    }
    prop = rng.uniform(lo, hi);
  }

  if (prop <= 0) return false;
  if (c > 0 && prop <= s.alpha[static_cast<std::size_t>(c - 1)]) return false;
  if (c < C - 1 && prop >= s.alpha[static_cast<std::size_t>(c + 1)]) return false;
  if (prop < table.alpha.front() || prop > table.alpha.back()) {
    diag.alpha_range_rejects += 1;
    return false;
  }

  int n_c = 0;
  for (int label : s.z) n_c += label == c;
  const long long dist = cluster_distance_sum(data, s.z, c, s.rho[static_cast<std::size_t>(c)], m);
  const int n = table.n;
  const double log_ratio = -double(n_c) * (table.evaluate(prop) - table.evaluate(cur)) -
                           lambda * (prop - cur) - (prop - cur) / n * double(dist) +
                           log_q_correction;
  const double u = rng.uniform_pos();
  if (std::log(u) < log_ratio) {
    s.alpha[static_cast<std::size_t>(c)] = prop;
    diag.alpha_accepts += 1;
    return true;
  }
  return false;
}

namespace {

std::vector<double> spread_alpha_init(int C, double lambda, const LogPartitionTable& table,
                                      double alpha_init) {
  std::vector<double> alpha(static_cast<std::size_t>(C));
  if (C == 1) {
    alpha[0] = alpha_init >= 0
                   ? alpha_init
                   : std::clamp(1.0 / lambda, table.alpha.front(), table.alpha.back());
    if (alpha[0] < table.alpha.front() || alpha[0] > table.alpha.back()) {
      throw ValidationError("alpha_init outside the partition table range");
    }
    return alpha;
  }
  for (int c = 0; c < C; ++c) {
    const double raw = (0.5 + double(c + 1) / double(C + 1)) / lambda;
    alpha[static_cast<std::size_t>(c)] =
        std::clamp(raw, table.alpha.front(), table.alpha.back());
  }
  for (int c = 1; c < C; ++c) {
    auto& a = alpha[static_cast<std::size_t>(c)];
    if (a <= alpha[static_cast<std::size_t>(c - 1)]) {
      a = alpha[static_cast<std::size_t>(c - 1)] + 1e-6;
    }
  }
  if (alpha.back() > table.alpha.back()) {
    throw ValidationError("partition table range too narrow to seed ordered dispersions");
  }
  return alpha;
}

void augmentation_sweep(std::vector<Ranking>& aug, const std::vector<AugSource>& data,
                        const MixtureState& s, Metric m, long sweep_id, int tie_interval,
                        RngStream& aug_root, MixtureDiagnostics& diag) {
  const bool tie_due = sweep_id % tie_interval == 0;
  for (std::size_t j = 0; j < data.size(); ++j) {
    RngStream rng = aug_root.derive(static_cast<std::uint64_t>(sweep_id), j);
    const int c = s.z[j];
    const double alpha_c = s.alpha[static_cast<std::size_t>(c)];
    const Ranking& rho_c = s.rho[static_cast<std::size_t>(c)];
    if (const auto* p = std::get_if<PartialRanking>(&data[j])) {
      if (p->complete()) continue;
      diag.aug_proposals += 1;
      if (gibbs_augment_partial(aug[j], *p, alpha_c, rho_c, m, rng)) diag.aug_accepts += 1;
    } else if (const auto* pc = std::get_if<PreferenceConstraintSet>(&data[j])) {
      diag.aug_proposals += 1;
      if (mh_augment_preference(aug[j], *pc, alpha_c, rho_c, m, rng)) diag.aug_accepts += 1;
    } else if (tie_due) {
      resample_tie_state(aug[j], std::get<TieSet>(data[j]), rho_c, m, rng);
    }
  }
}

}  // namespace

MixtureSamples run_mixture_chain(const std::vector<AugSource>& data, int C, Metric m,
                                 const MixturePriors& priors, const Tuning& tuning,
                                 const LogPartitionTable& table, AlphaProposalMode mode,
                                 bool keep_augmented) {
  if (data.empty()) throw ValidationError("no assessors");
  if (C < 1) throw ValidationError("need at least one cluster");
  priors.validate();
  const int n = source_n(data.front());
  if (n < 2) throw ValidationError("need at least two items");
  for (const auto& s : data) {
    if (source_n(s) != n) throw ValidationError("assessors rank different numbers of items");
  }
  if (table.n != n) throw ValidationError("partition table built for a different n");
  if (table.metric != m) throw ValidationError("partition table built for a different metric");
  tuning.validate(n);

  const int N = static_cast<int>(data.size());
  RngStream root(tuning.seed);
  RngStream init_rng = root.derive(0);
  RngStream rho_rng = root.derive(1);
  RngStream alpha_rng = root.derive(2);
  RngStream aug_root = root.derive(3);
  RngStream tau_rng = root.derive(4);
  RngStream z_rng = root.derive(5);

  const bool any_augmented = std::any_of(data.begin(), data.end(), [](const AugSource& s) {
    const auto* p = std::get_if<PartialRanking>(&s);
    return p == nullptr || !p->complete();
  });

  MixtureState state;
  state.rho.reserve(static_cast<std::size_t>(C));
  for (int c = 0; c < C; ++c) state.rho.push_back(Ranking::random(n, init_rng));
  state.alpha = spread_alpha_init(C, priors.lambda, table, tuning.alpha_init);
  state.tau.assign(static_cast<std::size_t>(C), 1.0 / C);
  state.z.resize(static_cast<std::size_t>(N));
  for (auto& label : state.z) label = init_rng.uniform_int(0, C - 1);

  std::vector<Ranking> aug;
  aug.reserve(static_cast<std::size_t>(N));
  for (const auto& s : data) {
    if (const auto* p = std::get_if<PartialRanking>(&s)) {
      aug.push_back(init_fill_in(*p, init_rng));
    } else if (const auto* pc = std::get_if<PreferenceConstraintSet>(&s)) {
      aug.push_back(init_consistent(*pc, init_rng));
    } else {
      aug.push_back(resample_ties(std::get<TieSet>(s), init_rng));
    }
  }

  MixtureSamples out;
  out.C = C;
  out.N = N;
  for (long it = 1; it <= tuning.iterations; ++it) {
    if (any_augmented) {
      augmentation_sweep(aug, state, m, it, tuning.tie_interval, aug_root, out.diag);
    }
    for (int c = 0; c < C; ++c) {
      mh_rho_cluster(state, c, aug, m, tuning.leap, rho_rng, out.diag);
      mh_alpha_cluster(state, c, aug, m, priors.lambda, tuning.sigma_alpha, mode, table, alpha_rng,
                       out.diag);
    }
    check_ordering(state);
    state.tau = gibbs_tau(state.counts(), priors.psi, tau_rng);
    for (int j = 0; j < N; ++j) {
      state.z[static_cast<std::size_t>(j)] =
          gibbs_z(aug[static_cast<std::size_t>(j)], state, table, m, z_rng);
    }
    if (it > tuning.burn_in && (it - tuning.burn_in) % tuning.thinning == 0) {
      out.iteration.push_back(it);
      out.alpha.push_back(state.alpha);
      out.tau.push_back(state.tau);
      out.rho.push_back(state.rho);
      out.z.push_back(state.z);
      if (keep_augmented && any_augmented) out.augmented.push_back(aug);
    }
  }
  if (out.diag.range_warning()) {
    std::fprintf(stderr,
                 "warning: %.1f%% of dispersion proposals fell outside the partition table grid\n",
                 100.0 * out.diag.range_reject_rate());
  }
  return out;
}

MixtureSamples run_mixture_chain(const std::vector<Ranking>& data, int C, Metric m,
                                 const MixturePriors& priors, const Tuning& tuning,
                                 const LogPartitionTable& table, AlphaProposalMode mode) {
  std::vector<AugSource> sources;
  sources.reserve(data.size());
  for (const auto& r : data) sources.emplace_back(PartialRanking(r.ranks()));
  return run_mixture_chain(sources, C, m, priors, tuning, table, mode, false);
}

std::vector<double> within_cluster_ss(const MixtureSamples& samples,
                                      const std::vector<Ranking>& data, Metric m) {
  if (static_cast<int>(data.size()) != samples.N) {
    throw ValidationError("data size does not match the sampled chain");
  }
  std::vector<double> ss;
  ss.reserve(samples.size());
  for (std::size_t t = 0; t < samples.size(); ++t) {
    double total = 0;
    for (std::size_t j = 0; j < data.size(); ++j) {
      const int c = samples.z[t][j];
      const double d = double(rank_distance(m, data[j], samples.rho[t][static_cast<std::size_t>(c)]));
      total += d * d;
    }
    ss.push_back(total);
  }
  return ss;
}

ClassifyResult classify(const std::vector<Ranking>& train, const std::vector<int>& labels,
                        const std::vector<Ranking>& test, Metric m, const MixturePriors& priors,
                        const Tuning& tuning, const LogPartitionTable& table,
                        ClassifyAlphaMode mode) {
  if (train.empty()) throw ValidationError("no training assessors");
  if (labels.size() != train.size()) throw ValidationError("one label per training assessor required");
  if (test.empty()) throw ValidationError("no test assessors");
  priors.validate();
  const int n = train.front().size();
  for (const auto& r : train) {
    if (r.size() != n) throw ValidationError("assessors rank different numbers of items");
  }
  for (const auto& r : test) {
    if (r.size() != n) throw ValidationError("assessors rank different numbers of items");
  }
  if (table.n != n) throw ValidationError("partition table built for a different n");
  if (table.metric != m) throw ValidationError("partition table built for a different metric");
  tuning.validate(n);

  int K = 0;
  for (int label : labels) {
    if (label < 0) throw ValidationError("class labels must be nonnegative");
    K = std::max(K, label + 1);
  }
  const int n_train = static_cast<int>(train.size());
  const int n_test = static_cast<int>(test.size());
  const int N = n_train + n_test;

  std::vector<Ranking> all;
  all.reserve(static_cast<std::size_t>(N));
  all.insert(all.end(), train.begin(), train.end());
  all.insert(all.end(), test.begin(), test.end());

  RngStream root(tuning.seed);
  RngStream init_rng = root.derive(0);
  RngStream rho_rng = root.derive(1);
  RngStream alpha_rng = root.derive(2);
  RngStream tau_rng = root.derive(4);
  RngStream z_rng = root.derive(5);

  std::vector<Ranking> rho;
  rho.reserve(static_cast<std::size_t>(K));
  for (int c = 0; c < K; ++c) rho.push_back(Ranking::random(n, init_rng));
  const double alpha0 = tuning.alpha_init >= 0
                            ? tuning.alpha_init
                            : std::clamp(1.0 / priors.lambda, table.alpha.front(), table.alpha.back());
  if (alpha0 < table.alpha.front() || alpha0 > table.alpha.back()) {
    throw ValidationError("alpha_init outside the partition table range");
  }
  std::vector<double> alpha(static_cast<std::size_t>(K), alpha0);
  std::vector<double> tau(static_cast<std::size_t>(K), 1.0 / K);
  std::vector<int> z(static_cast<std::size_t>(N));
  for (int j = 0; j < n_train; ++j) z[static_cast<std::size_t>(j)] = labels[static_cast<std::size_t>(j)];
  for (int j = n_train; j < N; ++j) z[static_cast<std::size_t>(j)] = init_rng.uniform_int(0, K - 1);

  ChainDiagnostics cd;
  std::vector<std::vector<long>> hits(static_cast<std::size_t>(n_test),
                                      std::vector<long>(static_cast<std::size_t>(K), 0));
  long n_draws = 0;

  for (long it = 1; it <= tuning.iterations; ++it) {
    for (int c = 0; c < K; ++c) {
      const Ranking& cur = rho[static_cast<std::size_t>(c)];
      const LeapProposal prop = leap_and_shift(cur, tuning.leap, rho_rng);
      long long delta = 0;
      for (int j = 0; j < N; ++j) {
        if (z[static_cast<std::size_t>(j)] != c) continue;
        delta += rank_distance(m, all[static_cast<std::size_t>(j)], prop.rho) -
                 rank_distance(m, all[static_cast<std::size_t>(j)], cur);
      }
      cd.rho_proposals += 1;
      const double u = rho_rng.uniform_pos();
      if (std::log(u) < -alpha[static_cast<std::size_t>(c)] / n * double(delta)) {
        rho[static_cast<std::size_t>(c)] = prop.rho;
        cd.rho_accepts += 1;
      }
    }
    if (mode == ClassifyAlphaMode::Shared) {
      long long dist = 0;
      for (int j = 0; j < N; ++j) {
        dist += rank_distance(m, all[static_cast<std::size_t>(j)],
                              rho[static_cast<std::size_t>(z[static_cast<std::size_t>(j)])]);
      }
      double a = alpha[0];
      mh_step_alpha(a, dist, N, priors.lambda, tuning.sigma_alpha, table, alpha_rng, cd);
      std::fill(alpha.begin(), alpha.end(), a);
    } else {
      for (int c = 0; c < K; ++c) {
        long long dist = 0;
        int n_c = 0;
        for (int j = 0; j < N; ++j) {
          if (z[static_cast<std::size_t>(j)] != c) continue;
          dist += rank_distance(m, all[static_cast<std::size_t>(j)], rho[static_cast<std::size_t>(c)]);
          n_c += 1;
        }
        mh_step_alpha(alpha[static_cast<std::size_t>(c)], dist, n_c, priors.lambda,
                      tuning.sigma_alpha, table, alpha_rng, cd);
      }
    }
    std::vector<int> counts(static_cast<std::size_t>(K), 0);
    for (int label : z) counts[static_cast<std::size_t>(label)] += 1;
    tau = gibbs_tau(counts, priors.psi, tau_rng);
    for (int j = n_train; j < N; ++j) {
      std::vector<double> lw(static_cast<std::size_t>(K));
      for (int c = 0; c < K; ++c) {
        const double log_tau = tau[static_cast<std::size_t>(c)] > 0
                                   ? std::log(tau[static_cast<std::size_t>(c)])
                                   : -std::numeric_limits<double>::infinity();
        const long long d = rank_distance(m, all[static_cast<std::size_t>(j)],
                                          rho[static_cast<std::size_t>(c)]);
        lw[static_cast<std::size_t>(c)] = log_tau - table.evaluate(alpha[static_cast<std::size_t>(c)]) -
                                          alpha[static_cast<std::size_t>(c)] / n * double(d);
      }
      z[static_cast<std::size_t>(j)] = z_rng.categorical_from_log(lw);
    }
    if (it > tuning.burn_in && (it - tuning.burn_in) % tuning.thinning == 0) {
      n_draws += 1;
      for (int j = 0; j < n_test; ++j) {
        hits[static_cast<std::size_t>(j)][static_cast<std::size_t>(z[static_cast<std::size_t>(n_train + j)])] += 1;
      }
    }
  }
  if (n_draws == 0) throw ValidationError("no retained draws; lower burn_in or thinning");

  ClassifyResult out;
  out.n_classes = K;
  out.probability.assign(static_cast<std::size_t>(n_test),
                         std::vector<double>(static_cast<std::size_t>(K), 0.0));
  out.map_label.resize(static_cast<std::size_t>(n_test));
  for (int j = 0; j < n_test; ++j) {
    int best = 0;
    for (int c = 0; c < K; ++c) {
      const double p = double(hits[static_cast<std::size_t>(j)][static_cast<std::size_t>(c)]) / double(n_draws);
      out.probability[static_cast<std::size_t>(j)][static_cast<std::size_t>(c)] = p;
      if (hits[static_cast<std::size_t>(j)][static_cast<std::size_t>(c)] >
          hits[static_cast<std::size_t>(j)][static_cast<std::size_t>(best)]) {
        best = c;
      }
    }
    out.map_label[static_cast<std::size_t>(j)] = best;
  }
  out.diag.rho_proposals = cd.rho_proposals;
  out.diag.rho_accepts = cd.rho_accepts;
  out.diag.alpha_proposals = cd.alpha_proposals;
  out.diag.alpha_accepts = cd.alpha_accepts;
  out.diag.alpha_range_rejects = cd.alpha_range_rejects;
  return out;
}

}  // namespace mallows
