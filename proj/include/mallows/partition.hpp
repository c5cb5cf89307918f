#pragma once

#include <cstdint>
#include <vector>

#include "mallows/distance.hpp"
#include "mallows/ranking.hpp"

namespace mallows {

// Thrown when a number leaves the supported range (alpha off the fitted
// grid, enumeration above the cap). The CLI maps it to exit code 3.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AlphaRangeError : NumericError {
  AlphaRangeError(const std::string& msg, double a) : NumericError(msg), alpha(a) {}
  double alpha;
};

enum class PartitionMethod { ClosedForm, ExactEnum, ImportanceSampling, Imported };

PartitionMethod partition_method_from_string(const std::string& s);
std::string to_string(PartitionMethod m);

// log Z_n(alpha) on a grid, with a degree-10 polynomial fitted through the
// grid for evaluation at arbitrary alpha inside the range. Immutable after
// build; shared read-only between chains.
struct LogPartitionTable {
  int n = 0;
  Metric metric = Metric::Footrule;
  PartitionMethod method = PartitionMethod::ClosedForm;
  std::vector<double> alpha;   // strictly increasing
  std::vector<double> log_z;   // same length
  std::vector<double> poly;    // c0..c_deg in raw alpha
  long long sample_count = 0;  // K per grid point (importance sampling only)
  std::uint64_t seed = 0;
  double fit_residual = 0;     // max abs residual of poly on the grid

  double alpha_min() const { return alpha.front(); }
  double alpha_max() const { return alpha.back(); }
  bool in_range(double a) const { return a >= alpha_min() && a <= alpha_max(); }

  // Polynomial evaluation; throws AlphaRangeError outside [alpha_min, alpha_max].
  double evaluate(double a) const;

  // Structural checks: grid monotone in alpha, log Z decreasing, polynomial
  // reproducing the grid within fit_residual (plus slack), and for
  // self-computable methods the alpha=0 value against log n!.
  void validate() const;
};

double kendall_log_partition(int n, double alpha);

// Brute-force log Z over all n! permutations; reference is the identity
// (right-invariance makes the choice irrelevant).
double exact_log_partition(int n, double alpha, Metric m, int cap = 10);
double exact_log_partition_ref(const Ranking& reference, double alpha, Metric m, int cap = 10);

struct ImportanceEstimate {
  double log_z = 0;
  double std_error = 0;  // delta-method s.e. of log_z from linear-scale weight variance
};

// Sequential importance sampler: coordinates drawn from position n down to
// 2 with conditionals proportional to exp{-(alpha/n) d_elem(rank, position)}
// over unused ranks; position 1 is forced. Batches of fixed size use
// seed-derived substreams and are merged in batch order, so the result is
// independent of thread count.
ImportanceEstimate importance_sample_log_partition(int n, double alpha, Metric m, long long K,
                                                   std::uint64_t seed, int threads = 1);

// Max over shared grid points of |logZ_new - logZ_old| / |logZ_old|.
double grid_convergence_check(const LogPartitionTable& old_table,
                              const LogPartitionTable& new_table);

// Least-squares polynomial fit (Chebyshev-scaled internally, coefficients
// returned in the raw variable).
std::vector<double> fit_polynomial(const std::vector<double>& x, const std::vector<double>& y,
                                   int degree);
double eval_polynomial(const std::vector<double>& coeffs, double x);

std::vector<double> linspace(double lo, double hi, int points);
std::vector<double> default_alpha_grid();  // 100 points on [0.01, 20]

LogPartitionTable build_partition_table(int n, Metric metric, PartitionMethod method,
                                        const std::vector<double>& grid, long long K = 0,
                                        std::uint64_t seed = 0, int threads = 1,
                                        int enum_cap = 10);

// Wrap externally computed grid values (method = Imported) and fit the poly.
LogPartitionTable import_partition_table(int n, Metric metric, std::vector<double> grid_alpha,
                                         std::vector<double> grid_log_z);

}  // namespace mallows
