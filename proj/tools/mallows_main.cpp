#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "mallows/augmentation.hpp"
#include "mallows/dynamics.hpp"
#include "mallows/io.hpp"
#include "mallows/mixture.hpp"
#include "mallows/partition.hpp"
#include "mallows/proposal.hpp"
#include "mallows/sampler.hpp"
#include "mallows/summaries.hpp"

namespace fs = std::filesystem;
using namespace mallows;

namespace {

std::string fmt(double v) { return format_double(v); }

struct ChainOpts {
  double lambda = -1;       // negative: metric default
  double sigma_alpha = -1;  // negative: metric default
  int leap = 1;
  long iterations = 100000;
  long burn_in = 10000;
  int thinning = 10;
  std::uint64_t seed = 1;
  double alpha_init = -1;
  bool exact_ratio = false;
  int aug_frequency = 1;
  int tie_interval = 10;
};

void add_chain_options(CLI::App* sub, ChainOpts& o) {
  sub->add_option("--lambda", o.lambda, "Exponential prior rate on the dispersion (default by metric)");
  sub->add_option("--sigma-alpha", o.sigma_alpha, "Dispersion walk width (default by metric)");
  sub->add_option("--leap", o.leap, "Leap size L")->check(CLI::PositiveNumber);
  sub->add_option("--iterations", o.iterations, "MCMC iterations");
  sub->add_option("--burn-in", o.burn_in, "Burn-in iterations");
  sub->add_option("--thinning", o.thinning, "Keep every k-th draw");
  sub->add_option("--seed", o.seed, "RNG seed");
  sub->add_option("--alpha-init", o.alpha_init, "Starting dispersion (default 1/lambda)");
  sub->add_flag("--exact-ratio", o.exact_ratio, "Apply the full proposal-density ratio (diagnostic)");
  sub->add_option("--aug-frequency", o.aug_frequency, "Augmentation sweeps per update");
  sub->add_option("--tie-interval", o.tie_interval, "Sweeps between tie resampling");
}

double resolved_lambda(const ChainOpts& o, Metric m, int n) {
  return o.lambda >= 0 ? o.lambda : default_lambda(m, n);
}

double resolved_sigma_alpha(const ChainOpts& o, Metric m) {
  return o.sigma_alpha >= 0 ? o.sigma_alpha : default_sigma_alpha(m);
}

Tuning make_tuning(const ChainOpts& o, Metric m) {
  Tuning t;
  t.leap = o.leap;
  t.sigma_alpha = resolved_sigma_alpha(o, m);
  t.iterations = o.iterations;
  t.burn_in = o.burn_in;
  t.thinning = o.thinning;
  t.seed = o.seed;
  t.exact_proposal_ratio = o.exact_ratio;
  t.aug_frequency = o.aug_frequency;
  t.tie_interval = o.tie_interval;
  t.alpha_init = o.alpha_init;
  return t;
}

void chain_config(std::map<std::string, std::string>& cfg, const ChainOpts& o, Metric m, int n) {
  cfg["lambda"] = fmt(resolved_lambda(o, m, n));
  cfg["sigma-alpha"] = fmt(resolved_sigma_alpha(o, m));
  cfg["leap"] = std::to_string(o.leap);
  cfg["iterations"] = std::to_string(o.iterations);
  cfg["burn-in"] = std::to_string(o.burn_in);
  cfg["thinning"] = std::to_string(o.thinning);
  cfg["seed"] = std::to_string(o.seed);
  cfg["alpha-init"] = fmt(o.alpha_init);
  cfg["exact-ratio"] = o.exact_ratio ? "1" : "0";
  cfg["aug-frequency"] = std::to_string(o.aug_frequency);
  cfg["tie-interval"] = std::to_string(o.tie_interval);
}

fs::path prepare_out_dir(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw ValidationError("cannot create output directory " + dir);
  return p;
}

void write_config_echo(const fs::path& path, const std::map<std::string, std::string>& cfg) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  for (const auto& [k, v] : cfg) out << k << "=" << v << "\n";
}

void write_kv_file(const fs::path& path, const std::vector<std::pair<std::string, std::string>>& kv) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  for (const auto& [k, v] : kv) out << k << "=" << v << "\n";
}

std::uint64_t chain_seed(std::uint64_t seed, int chain) {
  if (chain <= 1) return seed;
  RngStream root(seed);
  RngStream s = root.derive(0x9ec4, static_cast<std::uint64_t>(chain));
  return s.next_u64();
}

std::string chain_suffix(int chain) { return chain <= 1 ? "" : "_" + std::to_string(chain); }

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
}

double sd_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0;
  const double m = mean_of(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / double(v.size() - 1));
}

// ---------------------------------------------------------------- table ----

struct TableBuildOpts {
  int n = 0;
  std::string metric;
  std::string method;
  long long K = 100000;
  double grid_min = 0.01;
  double grid_max = 20.0;
  int grid_points = 100;
  std::uint64_t seed = 1;
  int threads = 1;
  int enum_cap = 10;
  std::string ladder;
  std::string out_dir;
};

int run_table_build(const TableBuildOpts& o) {
  const Metric metric = metric_from_string(o.metric);
  const PartitionMethod method = partition_method_from_string(o.method);
  const auto grid = linspace(o.grid_min, o.grid_max, o.grid_points);
  const fs::path dir = prepare_out_dir(o.out_dir);

  LogPartitionTable table;
  if (!o.ladder.empty()) {
    if (method != PartitionMethod::ImportanceSampling) {
      throw ValidationError("--ladder requires --method importance");
    }
    std::vector<long long> ks;
    std::stringstream ss(o.ladder);
    std::string cell;
    while (std::getline(ss, cell, ',')) ks.push_back(std::stoll(cell));
    if (ks.size() < 2) throw ValidationError("--ladder needs at least two sample counts");
    LogPartitionTable prev;
    for (std::size_t i = 0; i < ks.size(); ++i) {
      LogPartitionTable cur =
          build_partition_table(o.n, metric, method, grid, ks[i], o.seed, o.threads, o.enum_cap);
      if (i > 0) {
        std::printf("K=%lld epsilon=%s\n", ks[i], fmt(grid_convergence_check(prev, cur)).c_str());
      }
      prev = std::move(cur);
    }
    table = std::move(prev);
  } else {
    table = build_partition_table(o.n, metric, method, grid, o.K, o.seed, o.threads, o.enum_cap);
  }

  std::map<std::string, std::string> cfg{
      {"n", std::to_string(o.n)},       {"metric", o.metric},
      {"method", o.method},             {"K", std::to_string(o.K)},
      {"grid-min", fmt(o.grid_min)},    {"grid-max", fmt(o.grid_max)},
      {"grid-points", std::to_string(o.grid_points)},
      {"seed", std::to_string(o.seed)}, {"enum-cap", std::to_string(o.enum_cap)},
  };
  if (!o.ladder.empty()) cfg["ladder"] = o.ladder;
  save_partition_table((dir / "table.json").string(), table);
  write_config_echo(dir / "config.txt", cfg);
  save_manifest((dir / "manifest.json").string(), "table build", cfg, {"table.json", "config.txt"});
  std::printf("table written: n=%d metric=%s method=%s points=%d\n", table.n,
              to_string(table.metric).c_str(), to_string(table.method).c_str(),
              static_cast<int>(table.alpha.size()));
  return 0;
}

struct TableCheckOpts {
  std::string table_path;
  double tol = -1;
  int enum_cap = 10;
};

int run_table_check(const TableCheckOpts& o) {
  const LogPartitionTable table = load_partition_table(o.table_path);
  std::printf("n=%d metric=%s method=%s points=%d fit_residual=%s\n", table.n,
              to_string(table.metric).c_str(), to_string(table.method).c_str(),
              static_cast<int>(table.alpha.size()), fmt(table.fit_residual).c_str());
  double max_rel = -1;
  if (table.metric == Metric::Kendall) {
    max_rel = 0;
    for (std::size_t i = 0; i < table.alpha.size(); ++i) {
      const double exact = kendall_log_partition(table.n, table.alpha[i]);
      max_rel = std::max(max_rel, std::fabs(table.log_z[i] - exact) / std::fabs(exact));
    }
    std::printf("max_rel_err_vs_closed_form=%s\n", fmt(max_rel).c_str());
  } else if (table.n <= o.enum_cap) {
    max_rel = 0;
    for (std::size_t i = 0; i < table.alpha.size(); ++i) {
      const double exact = exact_log_partition(table.n, table.alpha[i], table.metric, o.enum_cap);
      max_rel = std::max(max_rel, std::fabs(table.log_z[i] - exact) / std::fabs(exact));
    }
    std::printf("max_rel_err_vs_exact=%s\n", fmt(max_rel).c_str());
  } else {
    std::printf("no exact reference available at n=%d; structural checks only\n", table.n);
  }
  if (o.tol >= 0 && max_rel >= 0 && max_rel > o.tol) {
    throw NumericError("table error " + fmt(max_rel) + " exceeds tolerance " + fmt(o.tol));
  }
  std::printf("ok\n");
  return 0;
}

// ------------------------------------------------------------------ fit ----

struct FitOpts {
  std::string data_path;
  std::string preferences_path;
  std::string items_path;
  std::string metric;
  std::string table_path;
  ChainOpts chain;
  bool keep_augmented = false;
  int chains = 1;
  std::string out_dir;
};

void write_diagnostics(const fs::path& path, const ChainDiagnostics& d) {
  write_kv_file(path, {
                          {"rho_proposals", std::to_string(d.rho_proposals)},
                          {"rho_accepts", std::to_string(d.rho_accepts)},
                          {"rho_accept_rate", fmt(d.rho_accept_rate())},
                          {"alpha_proposals", std::to_string(d.alpha_proposals)},
                          {"alpha_accepts", std::to_string(d.alpha_accepts)},
                          {"alpha_accept_rate", fmt(d.alpha_accept_rate())},
                          {"alpha_range_rejects", std::to_string(d.alpha_range_rejects)},
                          {"aug_proposals", std::to_string(d.aug_proposals)},
                          {"aug_accepts", std::to_string(d.aug_accepts)},
                          {"aug_accept_rate", fmt(d.aug_accept_rate())},
                      });
}

int run_fit(const FitOpts& o) {
  if (o.data_path.empty() == o.preferences_path.empty()) {
    throw ValidationError("exactly one of --data or --preferences is required");
  }
  const Metric metric = metric_from_string(o.metric);
  const LogPartitionTable table = load_partition_table(o.table_path);

  ItemCatalog items;
  std::vector<AugSource> sources;
  bool all_complete = true;
  if (!o.data_path.empty()) {
    RankMatrixData data = load_rank_matrix(o.data_path);
    items = data.items;
    for (auto& row : data.rows) {
      all_complete = all_complete && row.complete();
      sources.emplace_back(std::move(row));
    }
  } else {
    PreferenceData prefs = o.items_path.empty()
                               ? load_preferences(o.preferences_path)
                               : load_preferences(o.preferences_path, load_item_list(o.items_path));
    items = prefs.items;
    for (auto& a : prefs.assessors) sources.emplace_back(std::move(a));
    all_complete = false;
  }
  const int n = items.size();

  Priors priors;
  priors.lambda = resolved_lambda(o.chain, metric, n);
  const Tuning base_tuning = make_tuning(o.chain, metric);

  std::map<std::string, std::string> cfg;
  if (!o.data_path.empty()) cfg["data"] = o.data_path;
  if (!o.preferences_path.empty()) cfg["preferences"] = o.preferences_path;
  if (!o.items_path.empty()) cfg["items"] = o.items_path;
  cfg["metric"] = o.metric;
  cfg["table"] = o.table_path;
  cfg["keep-augmented"] = o.keep_augmented ? "1" : "0";
  cfg["chains"] = std::to_string(o.chains);
  chain_config(cfg, o.chain, metric, n);

  const fs::path dir = prepare_out_dir(o.out_dir);
  std::vector<std::string> outputs{"config.txt"};

  std::vector<PosteriorSamples> results(static_cast<std::size_t>(o.chains));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(o.chains));
  auto run_one = [&](int chain) {
    try {
      Tuning t = base_tuning;
      t.seed = chain_seed(o.chain.seed, chain);
      if (all_complete) {
        std::vector<Ranking> complete;
        complete.reserve(sources.size());
        for (const auto& s : sources) {
          complete.push_back(Ranking::unchecked(std::get<PartialRanking>(s).entries()));
        }
        results[static_cast<std::size_t>(chain - 1)] = run_chain(complete, metric, priors, t, table);
      } else {
        results[static_cast<std::size_t>(chain - 1)] =
            run_chain_partial(sources, metric, priors, t, table, o.keep_augmented);
      }
    } catch (...) {
      errors[static_cast<std::size_t>(chain - 1)] = std::current_exception();
    }
  };
  {
    std::vector<std::thread> workers;
    for (int chain = 2; chain <= o.chains; ++chain) workers.emplace_back(run_one, chain);
    run_one(1);
    for (auto& w : workers) w.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  for (int chain = 1; chain <= o.chains; ++chain) {
    const auto& samples = results[static_cast<std::size_t>(chain - 1)];
    const std::string suffix = chain_suffix(chain);
    std::map<std::string, std::string> meta{
        {"metric", o.metric},
        {"lambda", fmt(priors.lambda)},
        {"seed", std::to_string(chain_seed(o.chain.seed, chain))},
    };
    const std::string samples_name = "samples" + suffix + ".txt";
    save_static_samples((dir / samples_name).string(), samples, items, meta);
    outputs.push_back(samples_name);
    const std::string diag_name = "diagnostics" + suffix + ".txt";
    write_diagnostics(dir / diag_name, samples.diag);
    outputs.push_back(diag_name);
    if (o.keep_augmented && !samples.augmented.empty()) {
      const std::string aug_name = "augmented" + suffix + ".txt";
      save_augmented_samples((dir / aug_name).string(), samples.iteration, samples.augmented, items,
                             meta);
      outputs.push_back(aug_name);
    }
    std::printf("chain %d: %zu draws, rho accept %.3f, alpha accept %.3f\n", chain, samples.size(),
                samples.diag.rho_accept_rate(), samples.diag.alpha_accept_rate());
  }

  write_config_echo(dir / "config.txt", cfg);
  std::sort(outputs.begin(), outputs.end());
  save_manifest((dir / "manifest.json").string(), "fit", cfg, outputs);
  return 0;
}

// ---------------------------------------------------------- fit-mixture ----

struct FitMixtureOpts {
  std::string data_path;
  std::string preferences_path;
  std::string items_path;
  std::string metric;
  std::string table_path;
  int C = 1;
  double psi = 2.0;
  std::string mode = "published";
  ChainOpts chain;
  bool keep_augmented = false;
  std::string out_dir;
};

int run_fit_mixture(const FitMixtureOpts& o) {
  if (o.data_path.empty() == o.preferences_path.empty()) {
    throw ValidationError("exactly one of --data or --preferences is required");
  }
  const Metric metric = metric_from_string(o.metric);
  const LogPartitionTable table = load_partition_table(o.table_path);
  AlphaProposalMode mode;
  if (o.mode == "published") {
    mode = AlphaProposalMode::AsPublished;
  } else if (o.mode == "corrected") {
    mode = AlphaProposalMode::Corrected;
  } else {
    throw ValidationError("unknown proposal mode '" + o.mode + "' (published|corrected)");
  }

  ItemCatalog items;
  std::vector<AugSource> sources;
  std::vector<Ranking> complete;
  bool all_complete = true;
  if (!o.data_path.empty()) {
    RankMatrixData data = load_rank_matrix(o.data_path);
    items = data.items;
    for (auto& row : data.rows) {
      all_complete = all_complete && row.complete();
      if (row.complete()) complete.push_back(Ranking::unchecked(row.entries()));
      sources.emplace_back(std::move(row));
    }
  } else {
    PreferenceData prefs = o.items_path.empty()
                               ? load_preferences(o.preferences_path)
                               : load_preferences(o.preferences_path, load_item_list(o.items_path));
    items = prefs.items;
    for (auto& a : prefs.assessors) sources.emplace_back(std::move(a));
    all_complete = false;
  }
  const int n = items.size();

  MixturePriors priors;
  priors.lambda = resolved_lambda(o.chain, metric, n);
  priors.psi = o.psi;
  const Tuning tuning = make_tuning(o.chain, metric);

  MixtureSamples samples =
      run_mixture_chain(sources, o.C, metric, priors, tuning, table, mode, o.keep_augmented);

  std::map<std::string, std::string> cfg;
  if (!o.data_path.empty()) cfg["data"] = o.data_path;
  if (!o.preferences_path.empty()) cfg["preferences"] = o.preferences_path;
  if (!o.items_path.empty()) cfg["items"] = o.items_path;
  cfg["metric"] = o.metric;
  cfg["table"] = o.table_path;
  cfg["C"] = std::to_string(o.C);
  cfg["psi"] = fmt(o.psi);
  cfg["mode"] = o.mode;
  cfg["keep-augmented"] = o.keep_augmented ? "1" : "0";
  chain_config(cfg, o.chain, metric, n);

  const fs::path dir = prepare_out_dir(o.out_dir);
  std::vector<std::string> outputs{"config.txt", "samples_mixture.txt", "diagnostics.txt"};
  std::map<std::string, std::string> meta{{"metric", o.metric},
                                          {"lambda", fmt(priors.lambda)},
                                          {"psi", fmt(o.psi)},
                                          {"mode", o.mode},
                                          {"seed", std::to_string(o.chain.seed)}};
  save_mixture_samples((dir / "samples_mixture.txt").string(), samples, items, meta);
  write_kv_file(dir / "diagnostics.txt",
                {
                    {"rho_proposals", std::to_string(samples.diag.rho_proposals)},
                    {"rho_accept_rate", fmt(samples.diag.rho_accept_rate())},
                    {"alpha_proposals", std::to_string(samples.diag.alpha_proposals)},
                    {"alpha_accept_rate", fmt(samples.diag.alpha_accept_rate())},
                    {"alpha_range_rejects", std::to_string(samples.diag.alpha_range_rejects)},
                    {"degenerate_support_events", std::to_string(samples.diag.degenerate_support_events)},
                    {"aug_proposals", std::to_string(samples.diag.aug_proposals)},
                    {"aug_accept_rate", fmt(samples.diag.aug_accept_rate())},
                });
  if (all_complete) {
    const auto ss = within_cluster_ss(samples, complete, metric);
    std::ofstream out(dir / "wcss.txt");
    if (!out) throw ValidationError("cannot write wcss.txt");
    for (std::size_t t = 0; t < ss.size(); ++t) {
      out << samples.iteration[t] << " " << fmt(ss[t]) << "\n";
    }
    outputs.push_back("wcss.txt");
  }
  if (o.keep_augmented && !samples.augmented.empty()) {
    save_augmented_samples((dir / "augmented.txt").string(), samples.iteration, samples.augmented,
                           items, meta);
    outputs.push_back("augmented.txt");
  }
  write_config_echo(dir / "config.txt", cfg);
  std::sort(outputs.begin(), outputs.end());
  save_manifest((dir / "manifest.json").string(), "fit-mixture", cfg, outputs);
  std::printf("%zu draws, rho accept %.3f, alpha accept %.3f\n", samples.size(),
              samples.diag.rho_accept_rate(), samples.diag.alpha_accept_rate());
  return 0;
}

// ---------------------------------------------------------- fit-dynamic ----

struct FitDynamicOpts {
  std::string data_path;
  std::string metric;
  std::string table_path;
  double a = 1.0;
  double b = 1.0;
  double lambda_beta = -1;
  double sigma_beta = 0.04;
  ChainOpts chain;
  std::string out_dir;
};

int run_fit_dynamic(const FitDynamicOpts& o) {
  const Metric metric = metric_from_string(o.metric);
  const LogPartitionTable table = load_partition_table(o.table_path);
  TimedRankData data = load_timed_ranks(o.data_path);
  const int n = data.items.size();

  DynamicPriors priors;
  priors.lambda = resolved_lambda(o.chain, metric, n);
  priors.lambda_beta = o.lambda_beta >= 0 ? o.lambda_beta : priors.lambda;
  priors.a = o.a;
  priors.b = o.b;
  Tuning tuning = make_tuning(o.chain, metric);
  tuning.sigma_beta = o.sigma_beta;

  DynamicSamples samples = run_dynamic_chain(data.data, metric, priors, tuning, table);

  std::map<std::string, std::string> cfg{
      {"data", o.data_path},      {"metric", o.metric},
      {"table", o.table_path},    {"a", fmt(o.a)},
      {"b", fmt(o.b)},            {"lambda-beta", fmt(priors.lambda_beta)},
      {"sigma-beta", fmt(o.sigma_beta)},
  };
  chain_config(cfg, o.chain, metric, n);

  const fs::path dir = prepare_out_dir(o.out_dir);
  std::map<std::string, std::string> meta{{"metric", o.metric},
                                          {"lambda", fmt(priors.lambda)},
                                          {"lambda_beta", fmt(priors.lambda_beta)},
                                          {"seed", std::to_string(o.chain.seed)}};
  save_dynamic_samples((dir / "samples_dynamic.txt").string(), samples, data.items, meta);
  write_kv_file(dir / "diagnostics.txt",
                {
                    {"rho_proposals", std::to_string(samples.diag.rho_proposals)},
                    {"rho_accept_rate", fmt(samples.diag.rho_accept_rate())},
                    {"alpha_proposals", std::to_string(samples.diag.alpha_proposals)},
                    {"alpha_accept_rate", fmt(samples.diag.alpha_accept_rate())},
                    {"alpha_range_rejects", std::to_string(samples.diag.alpha_range_rejects)},
                    {"beta_proposals", std::to_string(samples.diag.beta_proposals)},
                    {"beta_accept_rate", fmt(samples.diag.beta_accept_rate())},
                    {"beta_range_rejects", std::to_string(samples.diag.beta_range_rejects)},
                });
  {
    const auto traj = mean_rank_trajectory(samples);
    std::ofstream out(dir / "trajectory.csv");
    if (!out) throw ValidationError("cannot write trajectory.csv");
    out << "t,item,mean_rank\n";
    for (std::size_t t = 0; t < traj.size(); ++t) {
      for (int i = 0; i < n; ++i) {
        out << t << "," << data.items.label(i) << "," << fmt(traj[t][static_cast<std::size_t>(i)])
            << "\n";
      }
    }
  }
  write_config_echo(dir / "config.txt", cfg);
  std::vector<std::string> outputs{"config.txt", "diagnostics.txt", "samples_dynamic.txt",
                                   "trajectory.csv"};
  save_manifest((dir / "manifest.json").string(), "fit-dynamic", cfg, outputs);
  std::printf("%zu draws over T=%d slices, rho accept %.3f\n", samples.size(), samples.T,
              samples.diag.rho_accept_rate());
  return 0;
}

// ------------------------------------------------------------- summarize ----

struct SummarizeOpts {
  std::string samples_path;
  std::string rho_true_path;
  double level = 0.9;
  int top_t = 0;
  std::string out_dir;
};

void write_static_summaries(const fs::path& dir, const SampleFile& f, const SummarizeOpts& o,
                            std::vector<std::string>& outputs) {
  const auto& samples = f.static_samples;
  const int n = f.items.size();
  const MarginalRankMatrix M = marginal_rank_matrix(samples.rho);

  {
    std::ofstream out(dir / "marginals.csv");
    out << "item,rank,probability\n";
    for (int i = 0; i < n; ++i) {
      for (int k = 1; k <= n; ++k) {
        out << f.items.label(i) << "," << k << "," << fmt(M.at(i, k)) << "\n";
      }
    }
    outputs.push_back("marginals.csv");
  }
  {
    std::ofstream out(dir / "heat.dat");
    out << "# rank item probability\n";
    for (int i = 0; i < n; ++i) {
      for (int k = 1; k <= n; ++k) out << k << " " << (i + 1) << " " << fmt(M.at(i, k)) << "\n";
      out << "\n";
    }
    outputs.push_back("heat.dat");
  }
  {
    std::ofstream out(dir / "cdf.dat");
    out << "# rank cumulative, one block per item\n";
    for (int i = 0; i < n; ++i) {
      out << "# item " << f.items.label(i) << "\n";
      double run = 0;
      for (int k = 1; k <= n; ++k) {
        run += M.at(i, k);
        out << k << " " << fmt(run) << "\n";
      }
      out << "\n";
    }
    outputs.push_back("cdf.dat");
  }
  {
    const auto cp = cp_ordering(M);
    std::ofstream out(dir / "cp.csv");
    out << "position,item,cumulative_probability\n";
    for (std::size_t k = 0; k < cp.size(); ++k) {
      out << (k + 1) << "," << f.items.label(cp[k].item) << "," << fmt(cp[k].cumulative) << "\n";
    }
    outputs.push_back("cp.csv");
  }
  {
    std::ofstream out(dir / "hpdi.csv");
    out << "item,lo,hi,mass,ranks\n";
    for (int i = 0; i < n; ++i) {
      const auto set = hpdi(M.p[static_cast<std::size_t>(i)], o.level, i);
      out << f.items.label(i) << "," << set.lo << "," << set.hi << "," << fmt(set.mass) << ",";
      for (std::size_t k = 0; k < set.ranks.size(); ++k) out << (k ? " " : "") << set.ranks[k];
      out << "\n";
    }
    outputs.push_back("hpdi.csv");
  }
  if (o.top_t > 0) {
    const auto p = top_t_probability(samples.rho, o.top_t);
    std::ofstream out(dir / "topt.csv");
    out << "item,probability\n";
    for (int i = 0; i < n; ++i) {
      out << f.items.label(i) << "," << fmt(p[static_cast<std::size_t>(i)]) << "\n";
    }
    outputs.push_back("topt.csv");
  }
  {
    const auto dom = dominance_matrix(samples.rho);
    std::ofstream out(dir / "dominance.csv");
    out << "item_i,item_j,p_i_before_j,dominates\n";
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        out << f.items.label(i) << "," << f.items.label(j) << ","
            << fmt(dom.p_less[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) << ","
            << int(dom.dominates[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) << "\n";
      }
    }
    outputs.push_back("dominance.csv");
  }
  {
    const auto hpd = shortest_interval(samples.alpha, o.level);
    write_kv_file(dir / "alpha_summary.txt", {
                                                 {"mean", fmt(mean_of(samples.alpha))},
                                                 {"sd", fmt(sd_of(samples.alpha))},
                                                 {"hpd_lo", fmt(hpd.lo)},
                                                 {"hpd_hi", fmt(hpd.hi)},
                                                 {"level", fmt(o.level)},
                                             });
    outputs.push_back("alpha_summary.txt");
  }
  {
    const Ranking map = map_ranking(samples.rho);
    std::ofstream out(dir / "map.csv");
    out << "item,rank\n";
    for (int i = 0; i < n; ++i) out << f.items.label(i) << "," << map.rank_of(i) << "\n";
    outputs.push_back("map.csv");
  }
  if (!o.rho_true_path.empty()) {
    RankMatrixData truth = load_rank_matrix(o.rho_true_path);
    if (truth.items.labels() != f.items.labels()) {
      throw ValidationError("reference ranking items do not match the samples");
    }
    const auto rows = complete_rows(truth.rows);
    if (rows.size() != 1) throw ValidationError("reference file must contain exactly one row");
    write_kv_file(dir / "trace.txt", {{"trace", fmt(trace_statistic(M, rows.front()))}});
    outputs.push_back("trace.txt");
  }
}

void write_mixture_summaries(const fs::path& dir, const SampleFile& f, const SummarizeOpts& o,
                             std::vector<std::string>& outputs) {
  const auto& samples = f.mixture_samples;
  const int n = f.items.size();
  const int C = samples.C;
  const int N = samples.N;
  if (samples.size() == 0) throw ValidationError("no draws in sample file");

  {
    std::ofstream out(dir / "marginals.csv");
    out << "cluster,item,rank,probability\n";
    for (int c = 0; c < C; ++c) {
      std::vector<Ranking> centers;
      centers.reserve(samples.size());
      for (std::size_t t = 0; t < samples.size(); ++t) {
        centers.push_back(samples.rho[t][static_cast<std::size_t>(c)]);
      }
      const auto M = marginal_rank_matrix(centers);
      for (int i = 0; i < n; ++i) {
        for (int k = 1; k <= n; ++k) {
          out << (c + 1) << "," << f.items.label(i) << "," << k << "," << fmt(M.at(i, k)) << "\n";
        }
      }
    }
    outputs.push_back("marginals.csv");
  }
  {
    std::ofstream out(dir / "centers_map.csv");
    out << "cluster,item,rank\n";
    for (int c = 0; c < C; ++c) {
      std::vector<Ranking> centers;
      centers.reserve(samples.size());
      for (std::size_t t = 0; t < samples.size(); ++t) {
        centers.push_back(samples.rho[t][static_cast<std::size_t>(c)]);
      }
      const Ranking map = map_ranking(centers);
      for (int i = 0; i < n; ++i) {
        out << (c + 1) << "," << f.items.label(i) << "," << map.rank_of(i) << "\n";
      }
    }
    outputs.push_back("centers_map.csv");
  }
  {
    std::ofstream alpha_out(dir / "alpha_summary.csv");
    std::ofstream tau_out(dir / "tau_summary.csv");
    alpha_out << "cluster,mean,sd,hpd_lo,hpd_hi,level\n";
    tau_out << "cluster,mean,sd,hpd_lo,hpd_hi,level\n";
    for (int c = 0; c < C; ++c) {
      std::vector<double> a, tv;
      a.reserve(samples.size());
      tv.reserve(samples.size());
      for (std::size_t t = 0; t < samples.size(); ++t) {
        a.push_back(samples.alpha[t][static_cast<std::size_t>(c)]);
        tv.push_back(samples.tau[t][static_cast<std::size_t>(c)]);
      }
      const auto ha = shortest_interval(a, o.level);
      const auto ht = shortest_interval(tv, o.level);
      alpha_out << (c + 1) << "," << fmt(mean_of(a)) << "," << fmt(sd_of(a)) << "," << fmt(ha.lo)
                << "," << fmt(ha.hi) << "," << fmt(o.level) << "\n";
      tau_out << (c + 1) << "," << fmt(mean_of(tv)) << "," << fmt(sd_of(tv)) << "," << fmt(ht.lo)
              << "," << fmt(ht.hi) << "," << fmt(o.level) << "\n";
    }
    outputs.push_back("alpha_summary.csv");
    outputs.push_back("tau_summary.csv");
  }
  {
    std::ofstream out(dir / "assignments.csv");
    out << "assessor";
    for (int c = 1; c <= C; ++c) out << ",p_cluster" << c;
    out << ",map\n";
    for (int j = 0; j < N; ++j) {
      std::vector<long> hits(static_cast<std::size_t>(C), 0);
      for (std::size_t t = 0; t < samples.size(); ++t) {
        hits[static_cast<std::size_t>(samples.z[t][static_cast<std::size_t>(j)])] += 1;
      }
      out << (j + 1);
      int best = 0;
      for (int c = 0; c < C; ++c) {
        out << "," << fmt(double(hits[static_cast<std::size_t>(c)]) / double(samples.size()));
        if (hits[static_cast<std::size_t>(c)] > hits[static_cast<std::size_t>(best)]) best = c;
      }
      out << "," << (best + 1) << "\n";
    }
    outputs.push_back("assignments.csv");
  }
}

void write_dynamic_summaries(const fs::path& dir, const SampleFile& f, const SummarizeOpts& o,
                             std::vector<std::string>& outputs) {
  const auto& samples = f.dynamic_samples;
  const int n = f.items.size();
  const int T = samples.T;
  if (samples.size() == 0) throw ValidationError("no draws in sample file");

  {
    const auto traj = mean_rank_trajectory(samples);
    std::ofstream out(dir / "trajectory.csv");
    out << "t,item,mean_rank\n";
    for (int t = 0; t <= T; ++t) {
      for (int i = 0; i < n; ++i) {
        out << t << "," << f.items.label(i) << ","
            << fmt(traj[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)]) << "\n";
      }
    }
    outputs.push_back("trajectory.csv");
  }
  {
    std::ofstream out(dir / "marginals.csv");
    out << "t,item,rank,probability\n";
    for (int t = 0; t <= T; ++t) {
      std::vector<Ranking> slice;
      slice.reserve(samples.size());
      for (std::size_t k = 0; k < samples.size(); ++k) {
        slice.push_back(samples.rho[k][static_cast<std::size_t>(t)]);
      }
      const auto M = marginal_rank_matrix(slice);
      for (int i = 0; i < n; ++i) {
        for (int k = 1; k <= n; ++k) {
          out << t << "," << f.items.label(i) << "," << k << "," << fmt(M.at(i, k)) << "\n";
        }
      }
    }
    outputs.push_back("marginals.csv");
  }
  {
    std::ofstream out(dir / "alpha_summary.csv");
    out << "t,mean,sd,hpd_lo,hpd_hi,level\n";
    for (int t = 0; t <= T; ++t) {
      std::vector<double> a;
      a.reserve(samples.size());
      for (std::size_t k = 0; k < samples.size(); ++k) {
        a.push_back(samples.alpha[k][static_cast<std::size_t>(t)]);
      }
      const auto h = shortest_interval(a, o.level);
      out << t << "," << fmt(mean_of(a)) << "," << fmt(sd_of(a)) << "," << fmt(h.lo) << ","
          << fmt(h.hi) << "," << fmt(o.level) << "\n";
    }
    outputs.push_back("alpha_summary.csv");
  }
  {
    const auto hb = shortest_interval(samples.beta, o.level);
    write_kv_file(dir / "beta_summary.txt", {
                                                {"mean", fmt(mean_of(samples.beta))},
                                                {"sd", fmt(sd_of(samples.beta))},
                                                {"hpd_lo", fmt(hb.lo)},
                                                {"hpd_hi", fmt(hb.hi)},
                                                {"level", fmt(o.level)},
                                            });
    const auto hs = shortest_interval(samples.sigma_alpha_sq, o.level);
    write_kv_file(dir / "sigma_alpha_summary.txt",
                  {
                      {"mean", fmt(mean_of(samples.sigma_alpha_sq))},
                      {"sd", fmt(sd_of(samples.sigma_alpha_sq))},
                      {"hpd_lo", fmt(hs.lo)},
                      {"hpd_hi", fmt(hs.hi)},
                      {"level", fmt(o.level)},
                  });
    outputs.push_back("beta_summary.txt");
    outputs.push_back("sigma_alpha_summary.txt");
  }
}

int run_summarize(const SummarizeOpts& o) {
  const SampleFile f = load_samples(o.samples_path);
  const fs::path dir = prepare_out_dir(o.out_dir);
  std::vector<std::string> outputs{"config.txt"};
  if (f.kind == "static") {
    if (f.static_samples.size() == 0) throw ValidationError("no draws in sample file");
    write_static_summaries(dir, f, o, outputs);
  } else if (f.kind == "mixture") {
    write_mixture_summaries(dir, f, o, outputs);
  } else if (f.kind == "dynamic") {
    write_dynamic_summaries(dir, f, o, outputs);
  } else {
    throw ValidationError("cannot summarize sample kind '" + f.kind +
                          "' (use predict for augmented samples)");
  }
  std::map<std::string, std::string> cfg{{"samples", o.samples_path},
                                         {"level", fmt(o.level)},
                                         {"top-t", std::to_string(o.top_t)}};
  if (!o.rho_true_path.empty()) cfg["rho-true"] = o.rho_true_path;
  write_config_echo(dir / "config.txt", cfg);
  std::sort(outputs.begin(), outputs.end());
  save_manifest((dir / "manifest.json").string(), "summarize", cfg, outputs);
  std::printf("summaries written for %s samples\n", f.kind.c_str());
  return 0;
}

// --------------------------------------------------------------- predict ----

struct PredictOpts {
  std::string samples_path;
  std::string pairs_path;
  std::string out_dir;
};

int run_predict(const PredictOpts& o) {
  const SampleFile f = load_samples(o.samples_path);
  if (f.kind != "augmented") {
    throw ValidationError("predict needs an augmented sample file, got kind '" + f.kind + "'");
  }
  if (f.augmented.empty()) throw ValidationError("no augmented draws in sample file");
  const int N = static_cast<int>(f.augmented.front().size());

  const auto lines_raw = load_preferences(o.pairs_path, f.items);
  // load_preferences groups and closes; for queries keep the raw rows instead
  (void)lines_raw;

  std::ifstream in(o.pairs_path);
  if (!in) throw ValidationError("cannot open " + o.pairs_path);
  const fs::path dir = prepare_out_dir(o.out_dir);
  std::ofstream out(dir / "predictions.csv");
  if (!out) throw ValidationError("cannot write predictions.csv");
  out << "assessor,less_preferred,more_preferred,probability\n";

  std::string line;
  std::size_t row = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (first) {
      first = false;
      if (cells.size() == 3 && cells[0] == "assessor") continue;
    }
    if (cells.size() != 3) {
      throw ValidationError(o.pairs_path + " row " + std::to_string(row) +
                            ": expected assessor,less_preferred,more_preferred");
    }
    const int assessor = std::stoi(cells[0]);
    if (assessor < 1 || assessor > N) {
      throw ValidationError(o.pairs_path + " row " + std::to_string(row) + ": assessor " +
                            std::to_string(assessor) + " out of 1.." + std::to_string(N));
    }
    const int a = f.items.index_of(cells[1]);
    const int b = f.items.index_of(cells[2]);
    const double p = preference_predictive(f.augmented, assessor - 1, a, b);
    out << assessor << "," << cells[1] << "," << cells[2] << "," << fmt(p) << "\n";
  }

  std::map<std::string, std::string> cfg{{"samples", o.samples_path}, {"pairs", o.pairs_path}};
  write_config_echo(dir / "config.txt", cfg);
  save_manifest((dir / "manifest.json").string(), "predict", cfg,
                {"config.txt", "predictions.csv"});
  return 0;
}

// --------------------------------------------------------------- classify ----

struct ClassifyOpts {
  std::string train_path;
  std::string labels_path;
  std::string test_path;
  std::string truth_path;
  std::string metric;
  std::string table_path;
  std::string alpha_mode = "shared";
  double psi = 2.0;
  ChainOpts chain;
  std::string out_dir;
};

int run_classify(const ClassifyOpts& o) {
  const Metric metric = metric_from_string(o.metric);
  const LogPartitionTable table = load_partition_table(o.table_path);
  RankMatrixData train_data = load_rank_matrix(o.train_path);
  RankMatrixData test_data = load_rank_matrix(o.test_path);
  if (train_data.items.labels() != test_data.items.labels()) {
    throw ValidationError("training and test files name different items");
  }
  const auto train = complete_rows(train_data.rows);
  const auto test = complete_rows(test_data.rows);
  std::vector<int> labels = load_labels(o.labels_path);
  for (auto& l : labels) {
    if (l < 1) throw ValidationError("class labels are 1-based positive integers");
    l -= 1;
  }

  ClassifyAlphaMode mode;
  if (o.alpha_mode == "shared") {
    mode = ClassifyAlphaMode::Shared;
  } else if (o.alpha_mode == "per-class") {
    mode = ClassifyAlphaMode::PerClass;
  } else {
    throw ValidationError("unknown alpha mode '" + o.alpha_mode + "' (shared|per-class)");
  }

  const int n = train_data.items.size();
  MixturePriors priors;
  priors.lambda = resolved_lambda(o.chain, metric, n);
  priors.psi = o.psi;
  const Tuning tuning = make_tuning(o.chain, metric);

  const ClassifyResult res = classify(train, labels, test, metric, priors, tuning, table, mode);

  const fs::path dir = prepare_out_dir(o.out_dir);
  std::vector<std::string> outputs{"config.txt", "probabilities.csv"};
  {
    std::ofstream out(dir / "probabilities.csv");
    if (!out) throw ValidationError("cannot write probabilities.csv");
    out << "assessor";
    for (int c = 1; c <= res.n_classes; ++c) out << ",p_class" << c;
    out << ",map\n";
    for (std::size_t j = 0; j < res.probability.size(); ++j) {
      out << (j + 1);
      for (int c = 0; c < res.n_classes; ++c) {
        out << "," << fmt(res.probability[j][static_cast<std::size_t>(c)]);
      }
      out << "," << (res.map_label[j] + 1) << "\n";
    }
  }
  if (!o.truth_path.empty()) {
    std::vector<int> truth = load_labels(o.truth_path);
    if (truth.size() != test.size()) throw ValidationError("one truth label per test assessor required");
    long correct = 0;
    for (std::size_t j = 0; j < truth.size(); ++j) {
      correct += (truth[j] - 1) == res.map_label[j];
    }
    write_kv_file(dir / "accuracy.txt",
                  {{"correct", std::to_string(correct)},
                   {"total", std::to_string(truth.size())},
                   {"accuracy", fmt(double(correct) / double(truth.size()))}});
    outputs.push_back("accuracy.txt");
    if (res.n_classes == 2) {
      // ROC for class 2 as the positive class: thresholds at observed scores
      std::vector<double> scores;
      for (const auto& p : res.probability) scores.push_back(p[1]);
      std::vector<double> thresholds = scores;
      std::sort(thresholds.begin(), thresholds.end());
      thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
      std::ofstream out(dir / "roc.csv");
      out << "threshold,tpr,fpr\n";
      long pos = 0, neg = 0;
      for (int t : truth) (t == 2 ? pos : neg) += 1;
      for (double thr : thresholds) {
        long tp = 0, fp = 0;
        for (std::size_t j = 0; j < scores.size(); ++j) {
          if (scores[j] >= thr) (truth[j] == 2 ? tp : fp) += 1;
        }
        out << fmt(thr) << "," << fmt(pos ? double(tp) / double(pos) : 0.0) << ","
            << fmt(neg ? double(fp) / double(neg) : 0.0) << "\n";
      }
      outputs.push_back("roc.csv");
    }
  }

  std::map<std::string, std::string> cfg{
      {"train", o.train_path},   {"labels", o.labels_path}, {"test", o.test_path},
      {"metric", o.metric},      {"table", o.table_path},   {"alpha-mode", o.alpha_mode},
      {"psi", fmt(o.psi)},
  };
  if (!o.truth_path.empty()) cfg["truth"] = o.truth_path;
  chain_config(cfg, o.chain, metric, n);
  write_config_echo(dir / "config.txt", cfg);
  std::sort(outputs.begin(), outputs.end());
  save_manifest((dir / "manifest.json").string(), "classify", cfg, outputs);
  return 0;
}

// --------------------------------------------------------------- simulate ----

struct SimulateOpts {
  int n = 0;
  int N = 0;
  double alpha = 3.0;
  std::string metric = "footrule";
  std::string generator = "model";
  int n_leap = 0;
  int leap = 1;
  std::uint64_t seed = 1;
  std::string rho = "identity";
  std::string rho_file;
  std::string out_dir;
};

int run_simulate(const SimulateOpts& o) {
  ItemCatalog items;
  Ranking rho_true = Ranking::identity(std::max(o.n, 2));
  if (!o.rho_file.empty()) {
    RankMatrixData data = load_rank_matrix(o.rho_file);
    const auto rows = complete_rows(data.rows);
    if (rows.size() != 1) throw ValidationError("--rho-file must contain exactly one row");
    items = data.items;
    rho_true = rows.front();
  } else {
    if (o.n < 2) throw ValidationError("--n must be at least 2");
    items = ItemCatalog::letters(o.n);
    if (o.rho == "identity") {
      rho_true = Ranking::identity(o.n);
    } else if (o.rho == "random") {
      RngStream rng(o.seed ^ 0x5eedu);
      rho_true = Ranking::random(o.n, rng);
    } else {
      throw ValidationError("--rho must be identity or random (or use --rho-file)");
    }
  }
  if (o.N < 1) throw ValidationError("--N must be positive");

  std::vector<Ranking> rows;
  if (o.generator == "model") {
    const Metric metric = metric_from_string(o.metric);
    rows = sample_mallows(rho_true, o.alpha, metric, o.N, o.seed);
  } else if (o.generator == "perturb") {
    rows = generate_by_perturbation(rho_true, o.N, o.n_leap, o.leap, o.seed);
  } else {
    throw ValidationError("unknown generator '" + o.generator + "' (model|perturb)");
  }

  const fs::path dir = prepare_out_dir(o.out_dir);
  save_rank_matrix((dir / "data.csv").string(), rows, items);
  {
    std::ofstream out(dir / "truth.csv");
    if (!out) throw ValidationError("cannot write truth.csv");
    for (int i = 0; i < items.size(); ++i) out << (i ? "," : "") << items.label(i);
    out << "\n";
    for (int i = 0; i < items.size(); ++i) out << (i ? "," : "") << rho_true.rank_of(i);
    out << "\n";
  }

  std::map<std::string, std::string> cfg{
      {"n", std::to_string(rho_true.size())},
      {"N", std::to_string(o.N)},
      {"alpha", fmt(o.alpha)},
      {"metric", o.metric},
      {"generator", o.generator},
      {"n-leap", std::to_string(o.n_leap)},
      {"leap", std::to_string(o.leap)},
      {"seed", std::to_string(o.seed)},
      {"rho", o.rho_file.empty() ? o.rho : std::string("file")},
  };
  if (!o.rho_file.empty()) cfg["rho-file"] = o.rho_file;
  write_config_echo(dir / "config.txt", cfg);
  save_manifest((dir / "manifest.json").string(), "simulate", cfg,
                {"config.txt", "data.csv", "truth.csv"});
  std::printf("wrote %d rankings of %d items\n", o.N, rho_true.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian Mallows rank inference"};
  app.require_subcommand(1);

  auto* table_cmd = app.add_subcommand("table", "Partition function tables");
  table_cmd->require_subcommand(1);

  TableBuildOpts tb;
  auto* build = table_cmd->add_subcommand("build", "Estimate log Z on an alpha grid");
  build->add_option("--n", tb.n, "Number of items")->required();
  build->add_option("--metric", tb.metric, "footrule|spearman|kendall")->required();
  build->add_option("--method", tb.method, "closed_form|exact|importance")->required();
  build->add_option("--K", tb.K, "Monte Carlo samples per grid point");
  build->add_option("--grid-min", tb.grid_min, "Smallest grid alpha");
  build->add_option("--grid-max", tb.grid_max, "Largest grid alpha");
  build->add_option("--grid-points", tb.grid_points, "Grid size");
  build->add_option("--seed", tb.seed, "RNG seed");
  build->add_option("--threads", tb.threads, "Worker threads for the sampler");
  build->add_option("--enum-cap", tb.enum_cap, "Largest n allowed for exact enumeration");
  build->add_option("--ladder", tb.ladder, "Comma-separated K values; prints convergence epsilons");
  build->add_option("--out-dir", tb.out_dir, "Output directory")->required();
  build->set_config("--config");

  TableCheckOpts tc;
  auto* check = table_cmd->add_subcommand("check", "Validate a stored table");
  check->add_option("--table", tc.table_path, "Table file")->required();
  check->add_option("--tol", tc.tol, "Fail when the reference error exceeds this");
  check->add_option("--enum-cap", tc.enum_cap, "Largest n allowed for exact enumeration");

  FitOpts fo;
  auto* fit = app.add_subcommand("fit", "Posterior sampling for one population");
  fit->add_option("--data", fo.data_path, "Rank matrix CSV (NA for missing)");
  fit->add_option("--preferences", fo.preferences_path, "Pairwise preference CSV");
  fit->add_option("--items", fo.items_path, "Item list for preference data");
  fit->add_option("--metric", fo.metric, "footrule|spearman|kendall")->required();
  fit->add_option("--table", fo.table_path, "Partition table file")->required();
  fit->add_flag("--keep-augmented", fo.keep_augmented, "Store augmented rankings per draw");
  fit->add_option("--chains", fo.chains, "Independent chains run in parallel")->check(CLI::PositiveNumber);
  fit->add_option("--out-dir", fo.out_dir, "Output directory")->required();
  add_chain_options(fit, fo.chain);
  fit->set_config("--config");

  FitMixtureOpts fm;
  auto* fitm = app.add_subcommand("fit-mixture", "Posterior sampling for a cluster mixture");
  fitm->add_option("--data", fm.data_path, "Rank matrix CSV (NA for missing)");
  fitm->add_option("--preferences", fm.preferences_path, "Pairwise preference CSV");
  fitm->add_option("--items", fm.items_path, "Item list for preference data");
  fitm->add_option("--metric", fm.metric, "footrule|spearman|kendall")->required();
  fitm->add_option("--table", fm.table_path, "Partition table file")->required();
  fitm->add_option("--C", fm.C, "Cluster count")->required()->check(CLI::PositiveNumber);
  fitm->add_option("--psi", fm.psi, "Dirichlet concentration");
  fitm->add_option("--mode", fm.mode, "published|corrected dispersion acceptance");
  fitm->add_flag("--keep-augmented", fm.keep_augmented, "Store augmented rankings per draw");
  fitm->add_option("--out-dir", fm.out_dir, "Output directory")->required();
  add_chain_options(fitm, fm.chain);
  fitm->set_config("--config");

  FitDynamicOpts fd;
  auto* fitd = app.add_subcommand("fit-dynamic", "Posterior sampling for time-dependent ranks");
  fitd->add_option("--data", fd.data_path, "Timed rank CSV")->required();
  fitd->add_option("--metric", fd.metric, "footrule|spearman|kendall")->required();
  fitd->add_option("--table", fd.table_path, "Partition table file")->required();
  fitd->add_option("--a", fd.a, "Inverse-gamma shape");
  fitd->add_option("--b", fd.b, "Inverse-gamma scale");
  fitd->add_option("--lambda-beta", fd.lambda_beta, "Rate for beta (default: same as lambda)");
  fitd->add_option("--sigma-beta", fd.sigma_beta, "Beta walk width");
  fitd->add_option("--out-dir", fd.out_dir, "Output directory")->required();
  add_chain_options(fitd, fd.chain);
  fitd->set_config("--config");

  SummarizeOpts so;
  auto* summ = app.add_subcommand("summarize", "Posterior summaries from a sample file");
  summ->add_option("--samples", so.samples_path, "Sample file")->required();
  summ->add_option("--rho-true", so.rho_true_path, "One-row reference ranking CSV");
  summ->add_option("--level", so.level, "Credible level");
  summ->add_option("--top-t", so.top_t, "Also write P(rank <= t)");
  summ->add_option("--out-dir", so.out_dir, "Output directory")->required();

  PredictOpts po;
  auto* pred = app.add_subcommand("predict", "Predictive preference probabilities");
  pred->add_option("--samples", po.samples_path, "Augmented sample file")->required();
  pred->add_option("--pairs", po.pairs_path, "Query CSV: assessor,less_preferred,more_preferred")->required();
  pred->add_option("--out-dir", po.out_dir, "Output directory")->required();

  ClassifyOpts co;
  auto* cls = app.add_subcommand("classify", "Assign test assessors to labeled classes");
  cls->add_option("--train", co.train_path, "Training rank matrix CSV")->required();
  cls->add_option("--labels", co.labels_path, "Training labels, one per line")->required();
  cls->add_option("--test", co.test_path, "Test rank matrix CSV")->required();
  cls->add_option("--truth", co.truth_path, "Held-out labels for accuracy/ROC");
  cls->add_option("--metric", co.metric, "footrule|spearman|kendall")->required();
  cls->add_option("--table", co.table_path, "Partition table file")->required();
  cls->add_option("--alpha-mode", co.alpha_mode, "shared|per-class dispersion");
  cls->add_option("--psi", co.psi, "Dirichlet concentration");
  cls->add_option("--out-dir", co.out_dir, "Output directory")->required();
  add_chain_options(cls, co.chain);
  cls->set_config("--config");

  SimulateOpts sim;
  auto* simc = app.add_subcommand("simulate", "Generate synthetic rank data");
  simc->add_option("--n", sim.n, "Number of items");
  simc->add_option("--N", sim.N, "Number of assessors")->required();
  simc->add_option("--alpha", sim.alpha, "Dispersion for the model generator");
  simc->add_option("--metric", sim.metric, "footrule|spearman|kendall");
  simc->add_option("--generator", sim.generator, "model|perturb");
  simc->add_option("--n-leap", sim.n_leap, "Perturbation moves per assessor");
  simc->add_option("--leap", sim.leap, "Leap size L for the perturb generator");
  simc->add_option("--seed", sim.seed, "RNG seed");
  simc->add_option("--rho", sim.rho, "identity|random reference ranking");
  simc->add_option("--rho-file", sim.rho_file, "One-row reference ranking CSV");
  simc->add_option("--out-dir", sim.out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (build->parsed()) return run_table_build(tb);
    if (check->parsed()) return run_table_check(tc);
    if (fit->parsed()) return run_fit(fo);
    if (fitm->parsed()) return run_fit_mixture(fm);
    if (fitd->parsed()) return run_fit_dynamic(fd);
    if (summ->parsed()) return run_summarize(so);
    if (pred->parsed()) return run_predict(po);
    if (cls->parsed()) return run_classify(co);
    if (simc->parsed()) return run_simulate(sim);
  } catch (const AlphaRangeError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 1;
  }
  return 0;
}
