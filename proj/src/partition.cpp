#include "mallows/partition.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "mallows/rng.hpp"

namespace mallows {

PartitionMethod partition_method_from_string(const std::string& s) {
  if (s == "closed_form") return PartitionMethod::ClosedForm;
  if (s == "exact_enum") return PartitionMethod::ExactEnum;
  if (s == "importance_sampling") return PartitionMethod::ImportanceSampling;
  if (s == "imported") return PartitionMethod::Imported;
  throw ValidationError("unknown partition method '" + s + "'");
}

std::string to_string(PartitionMethod m) {
  switch (m) {
    case PartitionMethod::ClosedForm: return "closed_form";
    case PartitionMethod::ExactEnum: return "exact_enum";
    case PartitionMethod::ImportanceSampling: return "importance_sampling";
    case PartitionMethod::Imported: return "imported";
  }
  return "?";
}

double kendall_log_partition(int n, double alpha) {
  if (n < 1) throw ValidationError("kendall_log_partition: n must be >= 1");
  if (alpha < 0) throw NumericError("kendall_log_partition: alpha must be nonnegative");
  // Z_n = prod_{i=1}^{n} sum_{j=0}^{i-1} exp(-alpha j / n); every summand is
  // in (0,1], so the inner sums stay in [1, n] and need no rescaling.
  double log_z = 0;
  for (int i = 1; i <= n; ++i) {
    double s = 0;
    for (int j = 0; j < i; ++j) s += std::exp(-alpha * j / n);
    log_z += std::log(s);
  }
  return log_z;
}

namespace {

long distance_to_reference(Metric m, const std::vector<int>& v, const std::vector<int>& ref) {
  const int n = static_cast<int>(v.size());
  long d = 0;
  switch (m) {
    case Metric::Footrule:
      for (int i = 0; i < n; ++i) d += std::abs(v[static_cast<std::size_t>(i)] - ref[static_cast<std::size_t>(i)]);
      return d;
    case Metric::Spearman:
      for (int i = 0; i < n; ++i) {
        const long t = v[static_cast<std::size_t>(i)] - ref[static_cast<std::size_t>(i)];
        d += t * t;
      }
      return d;
    case Metric::Kendall:
      for (int i = 0; i < n; ++i)
        for (int k = i + 1; k < n; ++k) {
          const long a = v[static_cast<std::size_t>(i)] - v[static_cast<std::size_t>(k)];
          const long b = ref[static_cast<std::size_t>(i)] - ref[static_cast<std::size_t>(k)];
          if ((a > 0 && b < 0) || (a < 0 && b > 0)) ++d;
        }
      return d;
  }
  return 0;
}

double enumerate_log_partition(const std::vector<int>& ref, double alpha, Metric m) {
  const int n = static_cast<int>(ref.size());
  std::vector<int> v(static_cast<std::size_t>(n));
  std::iota(v.begin(), v.end(), 1);
  // Every term is exp(-alpha d / n) <= 1 and there are at most cap! <= 3.7e6
  // of them, so plain accumulation cannot overflow.
  double sum = 0;
  do {
    sum += std::exp(-alpha * distance_to_reference(m, v, ref) / n);
  } while (std::next_permutation(v.begin(), v.end()));
  return std::log(sum);
}

}  // namespace

double exact_log_partition(int n, double alpha, Metric m, int cap) {
  if (n < 1) throw ValidationError("exact_log_partition: n must be >= 1");
  if (alpha < 0) throw NumericError("exact_log_partition: alpha must be nonnegative");
  if (n > cap)
    throw NumericError("exact_log_partition: n=" + std::to_string(n) +
                       " exceeds the enumeration cap " + std::to_string(cap));
  std::vector<int> ref(static_cast<std::size_t>(n));
  std::iota(ref.begin(), ref.end(), 1);
  return enumerate_log_partition(ref, alpha, m);
}

double exact_log_partition_ref(const Ranking& reference, double alpha, Metric m, int cap) {
  if (alpha < 0) throw NumericError("exact_log_partition: alpha must be nonnegative");
  if (reference.size() > cap)
    throw NumericError("exact_log_partition: n exceeds the enumeration cap");
  return enumerate_log_partition(reference.ranks(), alpha, m);
}

namespace {

constexpr long long kBatchSize = 8192;

struct BatchStats {
  double max_lw = -std::numeric_limits<double>::infinity();
  double s1 = 0;  // sum exp(lw - max_lw)
  double s2 = 0;  // sum exp(2(lw - max_lw))
};

BatchStats importance_batch(int n, double alpha, Metric metric, long long count, RngStream rng,
                            const std::vector<double>& exp_table) {
  std::vector<double> lws;
  lws.reserve(static_cast<std::size_t>(count));
  std::vector<int> avail;
  std::vector<double> w(static_cast<std::size_t>(n));
  for (long long k = 0; k < count; ++k) {
    avail.resize(static_cast<std::size_t>(n));
    std::iota(avail.begin(), avail.end(), 1);
    double log_q = 0;
    long d_total = 0;
    for (int pos = n; pos >= 2; --pos) {
      // Shift by the row minimum so the largest weight is exactly 1; the
      // shift cancels in the normalized conditional.
      long dmin = std::numeric_limits<long>::max();
      for (int r : avail) dmin = std::min(dmin, element_distance(metric, r, pos));
      double total = 0;
      for (std::size_t idx = 0; idx < avail.size(); ++idx) {
        w[idx] = exp_table[static_cast<std::size_t>(element_distance(metric, avail[idx], pos) - dmin)];
        total += w[idx];
      }
      const double u = rng.uniform01() * total;
      std::size_t pick = avail.size() - 1;
      double acc = 0;
      for (std::size_t idx = 0; idx < avail.size(); ++idx) {
        acc += w[idx];
        if (u < acc) {
          pick = idx;
          break;
        }
      }
      log_q += std::log(w[pick] / total);
      d_total += element_distance(metric, avail[pick], pos);
      avail.erase(avail.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    d_total += element_distance(metric, avail[0], 1);
    lws.push_back(-(alpha / n) * d_total - log_q);
  }
  BatchStats st;
  for (double lw : lws) st.max_lw = std::max(st.max_lw, lw);
  for (double lw : lws) {
    const double a = std::exp(lw - st.max_lw);
    st.s1 += a;
    st.s2 += a * a;
  }
  return st;
}

}  // namespace

ImportanceEstimate importance_sample_log_partition(int n, double alpha, Metric metric, long long K,
                                                   std::uint64_t seed, int threads) {
  if (n < 1) throw ValidationError("importance_sample_log_partition: n must be >= 1");
  if (alpha < 0) throw NumericError("importance_sample_log_partition: alpha must be nonnegative");
  if (K < 1) throw ValidationError("importance_sample_log_partition: K must be >= 1");
  if (!has_element_distance(metric))
    throw ValidationError(
        "importance_sample_log_partition: the Kendall metric has no per-element distance; "
        "use the closed form instead");

  std::vector<double> exp_table(static_cast<std::size_t>(max_element_distance(metric, n)) + 1);
  for (std::size_t v = 0; v < exp_table.size(); ++v)
    exp_table[v] = std::exp(-(alpha / n) * static_cast<double>(v));

  const long long n_batches = (K + kBatchSize - 1) / kBatchSize;
  std::vector<BatchStats> stats(static_cast<std::size_t>(n_batches));
  RngStream root(seed);

  auto run_range = [&](long long stride_start, long long stride) {
    for (long long b = stride_start; b < n_batches; b += stride) {
      const long long count = std::min(kBatchSize, K - b * kBatchSize);
      stats[static_cast<std::size_t>(b)] =
          importance_batch(n, alpha, metric, count, root.derive(static_cast<std::uint64_t>(b)),
                           exp_table);
    }
  };

  const int use_threads = static_cast<int>(std::min<long long>(std::max(threads, 1), n_batches));
  if (use_threads <= 1) {
    run_range(0, 1);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(use_threads));
    for (int t = 0; t < use_threads; ++t) pool.emplace_back(run_range, t, use_threads);
    for (auto& th : pool) th.join();
  }

  // Deterministic merge in batch order.
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& st : stats) m = std::max(m, st.max_lw);
  double s1 = 0, s2 = 0;
  for (const auto& st : stats) {
    const double shift = std::exp(st.max_lw - m);
    s1 += st.s1 * shift;
    s2 += st.s2 * shift * shift;
  }

  ImportanceEstimate est;
  const double mean_a = s1 / static_cast<double>(K);
  est.log_z = m + std::log(mean_a);
  if (K > 1) {
    const double var_a = std::max(0.0, (s2 - s1 * s1 / static_cast<double>(K)) /
                                           static_cast<double>(K - 1));
    est.std_error = std::sqrt(var_a / static_cast<double>(K)) / mean_a;
  }
  return est;
}

double grid_convergence_check(const LogPartitionTable& old_table,
                              const LogPartitionTable& new_table) {
  if (old_table.n != new_table.n || old_table.metric != new_table.metric)
    throw ValidationError("grid_convergence_check: tables describe different models");
  if (old_table.alpha.size() != new_table.alpha.size())
    throw ValidationError("grid_convergence_check: grids have different sizes");
  double eps = 0;
  for (std::size_t i = 0; i < old_table.alpha.size(); ++i) {
    if (std::abs(old_table.alpha[i] - new_table.alpha[i]) > 1e-12)
      throw ValidationError("grid_convergence_check: grids have different alpha knots");
    const double denom = std::abs(old_table.log_z[i]);
    const double diff = std::abs(new_table.log_z[i] - old_table.log_z[i]);
    eps = std::max(eps, denom > 0 ? diff / denom : diff);
  }
  return eps;
}

std::vector<double> fit_polynomial(const std::vector<double>& x, const std::vector<double>& y,
                                   int degree) {
  if (degree < 0) throw ValidationError("fit_polynomial: negative degree");
  if (x.size() != y.size()) throw ValidationError("fit_polynomial: size mismatch");
  if (static_cast<int>(x.size()) < degree + 2)
    throw ValidationError("fit_polynomial: need at least degree+2 points");
  const double lo = x.front(), hi = x.back();
  if (!(hi > lo)) throw ValidationError("fit_polynomial: x must be strictly increasing");

  // Fit in t = s*x + c mapped to [-1,1] for conditioning, then expand the
  // coefficients back to the raw variable.
  const double s = 2.0 / (hi - lo);
  const double c = -(hi + lo) / (hi - lo);
  const int rows = static_cast<int>(x.size());
  Eigen::MatrixXd vand(rows, degree + 1);
  for (int i = 0; i < rows; ++i) {
    const double t = s * x[static_cast<std::size_t>(i)] + c;
    double p = 1;
    for (int k = 0; k <= degree; ++k) {
      vand(i, k) = p;
      p *= t;
    }
  }
  Eigen::VectorXd rhs(rows);
  for (int i = 0; i < rows; ++i) rhs(i) = y[static_cast<std::size_t>(i)];
  const Eigen::VectorXd b = vand.colPivHouseholderQr().solve(rhs);

  // (s x + c)^k expanded binomially.
  std::vector<double> out(static_cast<std::size_t>(degree) + 1, 0.0);
  std::vector<double> binom(static_cast<std::size_t>(degree) + 1, 0.0);
  for (int k = 0; k <= degree; ++k) {
    binom[0] = 1;
    for (int j = k; j >= 1; --j)
      binom[static_cast<std::size_t>(j)] =
          (j == k ? 1.0 : binom[static_cast<std::size_t>(j)] + binom[static_cast<std::size_t>(j - 1)]);
    double c_pow = 1;  // c^{k-j}, built from j=k downward
    std::vector<double> term(static_cast<std::size_t>(k) + 1);
    for (int j = k; j >= 0; --j) {
      term[static_cast<std::size_t>(j)] = binom[static_cast<std::size_t>(j)] * c_pow;
      c_pow *= c;
    }
    double s_pow = 1;  // s^j
    for (int j = 0; j <= k; ++j) {
      out[static_cast<std::size_t>(j)] += b(k) * term[static_cast<std::size_t>(j)] * s_pow;
      s_pow *= s;
    }
  }
  return out;
}

double eval_polynomial(const std::vector<double>& coeffs, double x) {
  double v = 0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * x + *it;
  return v;
}

std::vector<double> linspace(double lo, double hi, int points) {
  if (points < 2) throw ValidationError("linspace: need at least 2 points");
  std::vector<double> v(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i)
    v[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (points - 1);
  return v;
}

std::vector<double> default_alpha_grid() { return linspace(0.01, 20.0, 100); }

double LogPartitionTable::evaluate(double a) const {
  if (!in_range(a))
    throw AlphaRangeError("alpha=" + std::to_string(a) + " outside the fitted table range [" +
                              std::to_string(alpha_min()) + ", " + std::to_string(alpha_max()) +
                              "]; rebuild the table with a wider grid",
                          a);
  return eval_polynomial(poly, a);
}

void LogPartitionTable::validate() const {
  if (n < 1) throw ValidationError("partition table: n must be >= 1");
  if (alpha.empty() || alpha.size() != log_z.size())
    throw ValidationError("partition table: grid shape mismatch");
  for (std::size_t i = 1; i < alpha.size(); ++i) {
    if (!(alpha[i] > alpha[i - 1]))
      throw ValidationError("partition table: alpha grid must be strictly increasing");
    if (!(log_z[i] < log_z[i - 1]))
      throw NumericError("partition table: log Z must be strictly decreasing in alpha");
  }
  if (method == PartitionMethod::ClosedForm && metric != Metric::Kendall)
    throw ValidationError("partition table: closed_form is only available for Kendall");
  if (method == PartitionMethod::ImportanceSampling && !has_element_distance(metric))
    throw ValidationError("partition table: importance sampling is unavailable for Kendall");
  if (!poly.empty()) {
    double resid = 0;
    for (std::size_t i = 0; i < alpha.size(); ++i)
      resid = std::max(resid, std::abs(eval_polynomial(poly, alpha[i]) - log_z[i]));
    if (resid > fit_residual + 1e-9)
      throw NumericError("partition table: polynomial does not reproduce the grid");
  }
  // Each self-computable method must hit log(n!) exactly at alpha=0.
  const double log_nfact = std::lgamma(static_cast<double>(n) + 1.0);
  double at_zero = 0;
  switch (method) {
    case PartitionMethod::ClosedForm:
      at_zero = kendall_log_partition(n, 0.0);
      break;
    case PartitionMethod::ExactEnum:
      at_zero = exact_log_partition(n, 0.0, metric, n);
      break;
    case PartitionMethod::ImportanceSampling:
      at_zero = importance_sample_log_partition(n, 0.0, metric, 1, seed).log_z;
      break;
    case PartitionMethod::Imported:
      return;  // no generator to query
  }
  if (std::abs(at_zero - log_nfact) > 1e-9)
    throw NumericError("partition table: generator disagrees with log n! at alpha=0");
}

LogPartitionTable build_partition_table(int n, Metric metric, PartitionMethod method,
                                        const std::vector<double>& grid, long long K,
                                        std::uint64_t seed, int threads, int enum_cap) {
  LogPartitionTable t;
  t.n = n;
  t.metric = metric;
  t.method = method;
  t.alpha = grid;
  t.seed = seed;
  t.log_z.reserve(grid.size());
  switch (method) {
    case PartitionMethod::ClosedForm:
      if (metric != Metric::Kendall)
        throw ValidationError("table build: closed_form requires the Kendall metric");
      for (double a : grid) t.log_z.push_back(kendall_log_partition(n, a));
      break;
    case PartitionMethod::ExactEnum:
      for (double a : grid) t.log_z.push_back(exact_log_partition(n, a, metric, enum_cap));
      break;
    case PartitionMethod::ImportanceSampling: {
      if (K < 1) throw ValidationError("table build: importance sampling needs K >= 1");
      t.sample_count = K;
      RngStream root(seed);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const std::uint64_t point_seed = root.derive(i).key();
        t.log_z.push_back(
            importance_sample_log_partition(n, grid[i], metric, K, point_seed, threads).log_z);
      }
      break;
    }
    case PartitionMethod::Imported:
      throw ValidationError("table build: use import_partition_table for imported grids");
  }
  t.poly = fit_polynomial(t.alpha, t.log_z, 10);
  for (std::size_t i = 0; i < t.alpha.size(); ++i)
    t.fit_residual = std::max(t.fit_residual, std::abs(eval_polynomial(t.poly, t.alpha[i]) - t.log_z[i]));
  t.validate();
  return t;
}

LogPartitionTable import_partition_table(int n, Metric metric, std::vector<double> grid_alpha,
                                         std::vector<double> grid_log_z) {
  LogPartitionTable t;
  t.n = n;
  t.metric = metric;
  t.method = PartitionMethod::Imported;
  t.alpha = std::move(grid_alpha);
  t.log_z = std::move(grid_log_z);
  t.poly = fit_polynomial(t.alpha, t.log_z, 10);
  for (std::size_t i = 0; i < t.alpha.size(); ++i)
    t.fit_residual = std::max(t.fit_residual, std::abs(eval_polynomial(t.poly, t.alpha[i]) - t.log_z[i]));
  t.validate();
  return t;
}

}  // namespace mallows
