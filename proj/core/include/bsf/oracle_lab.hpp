#pragma once

// Oracle data generators, separation thresholds and the closed-form bounds used by the
// consistency and misclassification experiments.

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "bsf/common.hpp"
#include "bsf/dataset.hpp"
#include "bsf/kernels.hpp"
#include "bsf/partitions.hpp"

namespace bsf {

struct GaussianOracleSpec {
  std::vector<Eigen::VectorXd> means;
  std::vector<Eigen::MatrixXd> covariances;
  /// Mixing weights; empty means balanced contiguous cluster counts.
  std::vector<double> weights;

  int k0() const { return static_cast<int>(means.size()); }
  int dim() const;
  double lambda_max() const;
  /// Minimum pairwise mean distance; 0 when K0 = 1.
  double min_mean_distance() const;
  double snr() const;
  void validate() const;

  /// Means rescaled about their centroid so that min distance / sqrt(Lambda_max) = snr.
  GaussianOracleSpec with_snr(double snr) const;
  /// K0 = 2 in p dimensions: means -/+ (snr/2) e_1, identity covariances.
  static GaussianOracleSpec symmetric_pair(double snr, int p);
  /// One standard normal component in p dimensions.
  static GaussianOracleSpec standard_normal(int p);
};

struct ObjectOracleSpec {
  std::vector<Eigen::MatrixXd> means;
  std::vector<double> noise_scales;
  /// Tail exponent; recorded, not used by the generator.
  double nu = 2.0;
  std::vector<double> weights;

  int k0() const { return static_cast<int>(means.size()); }
  int dim() const;
  void validate() const;
};

struct OracleSample {
  Dataset data;
  Partition truth;
};

/// Cluster sizes for n points: balanced contiguous when the spec has no weights.
std::vector<int> balanced_counts(int n, int k0);

OracleSample generate_gaussian(const GaussianOracleSpec& spec, int n, std::uint64_t seed);
OracleSample generate_spd(const ObjectOracleSpec& spec, int n, std::uint64_t seed);

struct Phi {
  double c1 = 1.0;
  double c2 = 1.0;
  double iota1 = 1.0;
  double iota2 = 0.5;

  /// (1, 1, 1, iota / 2).
  static Phi defaults(double iota = 1.0);
  void validate() const;
};

struct SeparationThresholds {
  Phi phi;
  std::optional<double> a_n;  // absent when K0 = 1
  double b_n = 0.0;
  double log_rho = 0.0;  // -log(delta lambda zeta)
  bool feasible = true;  // false when b_n <= 0
};

SeparationThresholds compute_thresholds(double sigma2, int k0, const Phi& phi,
                                        double log_delta_lambda, double log_zeta, int n);

/// Pairwise separation of a labeled dataset. Empty pair sets give min_cross_d2 = +inf,
/// log_eps = -inf (no cross pairs) and max_within_d2 = -inf, log_gamma = +inf (no within pairs).
struct SeparationStats {
  double log_eps = kNegInf;
  double log_gamma = -kNegInf;
  double min_cross_d2 = -kNegInf;
  double max_within_d2 = kNegInf;
};

SeparationStats separation_stats(const Dataset& data, const Partition& truth,
                                 const KernelSpec& kernel);

struct MembershipResult {
  bool member = false;
  SeparationStats stats;
};

MembershipResult check_D_membership(const Dataset& data, const Partition& truth,
                                    const KernelSpec& kernel, const SeparationThresholds& t);

/// log eps - log gamma + n log(K0 + 1).
double misclassification_log_bound(const SeparationStats& stats, int k0, int n);
/// -(min_cross_d2 - max_within_d2) / (2 sigma2) + n log(K0 + 1).
double misclassification_log_bound_gaussian(const SeparationStats& stats, double sigma2, int k0,
                                            int n);

struct Schedule {
  double sigma2 = 1.0;
  double log_delta = 0.0;
  double log_lambda = 0.0;

  double log_delta_lambda() const { return log_delta + log_lambda; }
};

/// sigma2 = [SNR / sqrt(p v log n)]^{2 alpha} Lambda_max log n / (n log(K0 + 1 + iota)),
/// log(delta lambda) = -n log(K0 + 1 + iota) - (p/2) log sigma2 (carried by lambda, delta = 1).
Schedule corollary_schedule(const GaussianOracleSpec& spec, int n, double alpha, double iota);
/// delta = 1, sigma2 = 1, lambda = 3^{-n}.
Schedule miller_schedule(int n);

/// log of exp{-(p/2)[a/p - 1 - log(a/p)]}, a bound on P(chi2_p > a) for a > p.
double chi_square_log_tail_bound(double a, double p);

/// Closed-form upper bound (log) on Pi(not truth | y) / Pi(truth | y), summing the single-ratio
/// bound over K with K^n / K0! assignments per K. Requires eps <= gamma (flat root);
/// returns nullopt otherwise.
std::optional<double> posterior_odds_log_bound(const SeparationStats& stats, int k0, int n,
                                               double log_delta_lambda);

}  // namespace bsf
