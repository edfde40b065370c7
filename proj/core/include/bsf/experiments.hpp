#pragma once

// Seeded replicate experiments: posterior consistency over an n grid and the known-K0
// misclassification rate over an SNR grid. Replicates run on worker threads; results are
// stored by (grid index, replicate) so output never depends on the worker count.

#include <cstdint>
#include <functional>
#include <vector>

#include "bsf/oracle_lab.hpp"
#include "bsf/posterior.hpp"
#include "bsf/sampler.hpp"

namespace bsf {

enum class ExperimentMode { exact, mcmc };

struct Quartiles {
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
};

/// Linear-interpolation quartiles of a non-empty sample.
Quartiles quartiles(std::vector<double> values);

/// Seed of replicate r at grid point g.
std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t grid_key, std::uint64_t r);

/// Runs fn(0..count-1) on up to `workers` threads; result i is fn(i). Rethrows the first failure.
template <class R>
std::vector<R> run_indexed(int count, int workers, const std::function<R(int)>& fn);

struct ScheduleSpec {
  enum class Kind { corollary, miller, fixed };
  Kind kind = Kind::corollary;
  double alpha = 0.5;
  double iota = 1.0;
  Schedule fixed;

  Schedule at(const GaussianOracleSpec& spec, int n) const;
};

struct ConsistencyPlan {
  std::function<OracleSample(int n, std::uint64_t seed)> generate;
  std::function<BsfConfig(int n)> config_for;
  int k0 = 1;
  Phi phi;
  std::vector<int> n_grid;
  int replicates = 1;
  std::uint64_t master_seed = 0;
  ExperimentMode mode = ExperimentMode::exact;
  ChainSchedule chain;
  int workers = 1;

  void validate() const;
};

ConsistencyPlan gaussian_consistency_plan(const GaussianOracleSpec& spec, const ScheduleSpec& schedule);
/// Riemannian Gaussian kernel with bandwidth sigma and flat root; log(delta lambda) fixed.
ConsistencyPlan spd_consistency_plan(const ObjectOracleSpec& spec, double sigma, double log_zeta,
                                     double log_delta_lambda);

struct ConsistencyRow {
  int n = 0;
  int replicate = 0;
  std::uint64_t seed = 0;
  double sigma2 = 0.0;
  double log_delta_lambda = 0.0;
  double prob_truth = 0.0;
  double prob_k0 = 0.0;
  bool d_member = false;
  double log_eps_over_gamma = 0.0;
  int map_k = 0;
  int map_hamming = 0;
};

struct ConsistencyAggregate {
  int n = 0;
  int replicates = 0;
  Quartiles prob_truth;
  Quartiles prob_k0;
  Quartiles map_hamming;
  double d_member_rate = 0.0;
  double map_exact_rate = 0.0;
};

struct ConsistencyResult {
  std::vector<ConsistencyRow> rows;
  std::vector<ConsistencyAggregate> aggregates;
};

ConsistencyResult consistency_experiment(const ConsistencyPlan& plan);

struct MisclassPlan {
  GaussianOracleSpec base;
  std::vector<double> snr_grid;
  int n = 10;
  int replicates = 1;
  std::uint64_t master_seed = 0;
  double kappa = 0.25;
  int tail_draws = 20000;
  int workers = 1;

  void validate() const;
};

/// sigma2 = kappa * min(D^2 / (n log(K0 + 1)), Lambda_max); kappa * Lambda_max when D = 0.
double misclass_sigma2(const GaussianOracleSpec& spec, int n, double kappa);

struct MisclassRow {
  double snr = 0.0;
  int replicate = 0;
  std::uint64_t seed = 0;
  double sigma2 = 0.0;
  double expected_hamming = 0.0;
  double log_lemma_bound = 0.0;
  double log_lemma_bound_gaussian = 0.0;
  bool bound_below_n = false;
  bool within_bound = true;
};

struct MisclassAggregate {
  double snr = 0.0;
  int replicates = 0;
  Quartiles expected_hamming;
  double log_theorem_bound = 0.0;
  int bound_applicable = 0;
  int bound_violations = 0;
};

struct MisclassResult {
  std::vector<MisclassRow> rows;
  std::vector<MisclassAggregate> aggregates;
};

MisclassResult misclassification_experiment(const MisclassPlan& plan);

/// log of exp{-(a'-b')/(2 sigma2) + n log(K0+1)} + n^3 [max P(D_kl^2 < a') + max P(D_kk^2 > b')],
/// minimized over a quantile grid for (a', b'); tails estimated from `draws` Monte Carlo pairs.
double misclass_theorem_log_bound(const GaussianOracleSpec& spec, int n, double sigma2, int draws,
                                  std::uint64_t seed);

}  // namespace bsf

#include "bsf/detail/run_indexed.hpp"
