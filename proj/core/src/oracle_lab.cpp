#include "bsf/oracle_lab.hpp"

#include <algorithm>
#include <numeric>

namespace bsf {

int GaussianOracleSpec::dim() const {
  return means.empty() ? 0 : static_cast<int>(means.front().size());
}

double GaussianOracleSpec::lambda_max() const {
  double out = 0.0;
  for (const auto& c : covariances) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c, Eigen::EigenvaluesOnly);
    out = std::max(out, eig.eigenvalues().maxCoeff());
  }
  return out;
}

double GaussianOracleSpec::min_mean_distance() const {
  if (k0() < 2) return 0.0;
  double out = std::numeric_limits<double>::infinity();
  for (int k = 0; k < k0(); ++k)
    for (int l = k + 1; l < k0(); ++l) out = std::min(out, (means[k] - means[l]).norm());
  return out;
}

double GaussianOracleSpec::snr() const { return min_mean_distance() / std::sqrt(lambda_max()); }

void GaussianOracleSpec::validate() const {
  if (k0() < 1) throw InvalidArgument("oracle needs at least one component");
  if (covariances.size() != means.size()) {
    throw InvalidArgument("oracle needs one covariance per mean");
  }
  const int p = dim();
  if (p < 1) throw InvalidArgument("oracle means must be non-empty vectors");
  for (int k = 0; k < k0(); ++k) {
    if (means[k].size() != p || covariances[k].rows() != p || covariances[k].cols() != p) {
      throw InvalidArgument("oracle component " + std::to_string(k) + " has mismatched dimensions");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(covariances[k]);
    if (llt.info() != Eigen::Success || !covariances[k].isApprox(covariances[k].transpose())) {
      throw InvalidArgument("oracle covariance " + std::to_string(k) + " is not SPD");
    }
  }
  if (!weights.empty()) {
    if (weights.size() != means.size()) throw InvalidArgument("oracle needs one weight per mean");
    for (double w : weights)
      if (!(w > 0.0)) throw InvalidArgument("oracle weights must be positive");
  }
}

GaussianOracleSpec GaussianOracleSpec::with_snr(double target) const {
  validate();
  if (target < 0.0) throw InvalidArgument("SNR must be non-negative");
  GaussianOracleSpec out = *this;
  if (k0() < 2) return out;
  Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim());
  for (const auto& m : means) centroid += m;
  centroid /= k0();
  const double d = min_mean_distance();
  if (!(d > 0.0)) throw InvalidArgument("cannot rescale coincident means to a target SNR");
  const double factor = target * std::sqrt(lambda_max()) / d;
  for (auto& m : out.means) m = centroid + factor * (m - centroid);
  return out;
}

GaussianOracleSpec GaussianOracleSpec::symmetric_pair(double snr, int p) {
  if (p < 1) throw InvalidArgument("dimension must be positive");
  GaussianOracleSpec s;
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(p);
  e1(0) = 0.5 * snr;
  s.means = {-e1, e1};
  s.covariances = {Eigen::MatrixXd::Identity(p, p), Eigen::MatrixXd::Identity(p, p)};
  return s;
}

GaussianOracleSpec GaussianOracleSpec::standard_normal(int p) {
  if (p < 1) throw InvalidArgument("dimension must be positive");
  GaussianOracleSpec s;
  s.means = {Eigen::VectorXd::Zero(p)};
  s.covariances = {Eigen::MatrixXd::Identity(p, p)};
  return s;
}

int ObjectOracleSpec::dim() const {
  return means.empty() ? 0 : static_cast<int>(means.front().rows());
}

void ObjectOracleSpec::validate() const {
  if (k0() < 1) throw InvalidArgument("oracle needs at least one component");
  if (noise_scales.size() != means.size()) {
    throw InvalidArgument("oracle needs one noise scale per mean");
  }
  for (int k = 0; k < k0(); ++k) {
    if (means[k].rows() != dim()) throw InvalidArgument("oracle means have mismatched sizes");
    SpdMatrix check(means[k]);
    if (!(noise_scales[k] >= 0.0)) throw InvalidArgument("noise scales must be non-negative");
  }
  if (!(nu > 0.0)) throw InvalidArgument("tail exponent must be positive");
  if (!weights.empty()) {
    if (weights.size() != means.size()) throw InvalidArgument("oracle needs one weight per mean");
    for (double w : weights)
      if (!(w > 0.0)) throw InvalidArgument("oracle weights must be positive");
  }
}

std::vector<int> balanced_counts(int n, int k0) {
  if (k0 < 1 || n < k0) throw InvalidArgument("need n >= K0 >= 1 for non-empty oracle clusters");
  std::vector<int> counts(k0, n / k0);
  for (int k = 0; k < n % k0; ++k) ++counts[k];
  return counts;
}

namespace {

std::vector<int> oracle_labels(int n, int k0, const std::vector<double>& weights, Rng& rng) {
  std::vector<int> z;
  z.reserve(n);
  if (weights.empty()) {
    const auto counts = balanced_counts(n, k0);
    for (int k = 0; k < k0; ++k) z.insert(z.end(), counts[k], k);
  } else {
    std::discrete_distribution<int> pick(weights.begin(), weights.end());
    for (int i = 0; i < n; ++i) z.push_back(pick(rng));
  }
  return z;
}

}  // namespace

OracleSample generate_gaussian(const GaussianOracleSpec& spec, int n, std::uint64_t seed) {
  spec.validate();
  if (n < 1) throw InvalidArgument("n must be positive");
  Rng rng(seed);
  const auto z = oracle_labels(n, spec.k0(), spec.weights, rng);
  std::vector<Eigen::MatrixXd> chol;
  for (const auto& c : spec.covariances) chol.push_back(Eigen::LLT<Eigen::MatrixXd>(c).matrixL());
  std::normal_distribution<double> normal;
  std::vector<Eigen::VectorXd> pts;
  pts.reserve(n);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd e(spec.dim());
    for (int d = 0; d < spec.dim(); ++d) e(d) = normal(rng);
    pts.push_back(spec.means[z[i]] + chol[z[i]] * e);
  }
  return {Dataset::euclidean(std::move(pts)), Partition::from_labels(z)};
}

OracleSample generate_spd(const ObjectOracleSpec& spec, int n, std::uint64_t seed) {
  spec.validate();
  if (n < 1) throw InvalidArgument("n must be positive");
  Rng rng(seed);
  const auto z = oracle_labels(n, spec.k0(), spec.weights, rng);
  const int m = spec.dim();
  std::vector<Eigen::MatrixXd> halves;
  for (const auto& mu : spec.means) halves.push_back(spd_sqrt(mu));
  std::normal_distribution<double> normal;
  std::vector<Eigen::MatrixXd> pts;
  pts.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double s = spec.noise_scales[z[i]];
    Eigen::MatrixXd t(m, m);
    for (int a = 0; a < m; ++a) {
      t(a, a) = s * normal(rng);
      for (int b = a + 1; b < m; ++b) t(a, b) = t(b, a) = s * std::sqrt(0.5) * normal(rng);
    }
    if (s == 0.0) {
      pts.push_back(spec.means[z[i]]);
    } else {
      Eigen::MatrixXd p = halves[z[i]] * sym_exp(t) * halves[z[i]];
      pts.push_back(0.5 * (p + p.transpose()));
    }
  }
  return {Dataset::spd(std::move(pts)), Partition::from_labels(z)};
}

Phi Phi::defaults(double iota) {
  if (!(iota > 0.0)) throw InvalidArgument("iota must be positive");
  return Phi{1.0, 1.0, 1.0, iota / 2.0};
}

void Phi::validate() const {
  if (!(c1 > 0.0 && c2 > 0.0 && iota1 > 0.0 && iota2 > 0.0)) {
    throw InvalidArgument("phi = (c1, c2, iota1, iota2) must be positive");
  }
}

SeparationThresholds compute_thresholds(double sigma2, int k0, const Phi& phi,
                                        double log_delta_lambda, double log_zeta, int n) {
  phi.validate();
  if (!(sigma2 > 0.0)) throw InvalidArgument("sigma2 must be positive");
  if (k0 < 1) throw InvalidArgument("K0 must be positive");
  SeparationThresholds t;
  t.phi = phi;
  t.log_rho = -log_delta_lambda - log_zeta;
  const double common = -log_delta_lambda + log_zeta;
  if (k0 >= 2) {
    t.a_n = 2.0 * sigma2 * (n * std::log(k0 - 1 + phi.iota1) + common - std::log(phi.c1));
  }
  t.b_n = 2.0 * sigma2 * (-n * std::log(k0 + 1 + phi.iota2) + common + std::log(phi.c2));
  t.feasible = t.b_n > 0.0;
  return t;
}

SeparationStats separation_stats(const Dataset& data, const Partition& truth,
                                 const KernelSpec& kernel) {
  if (truth.size() != data.size()) throw InvalidArgument("truth size does not match data");
  const int p = data.kind() == PayloadKind::euclidean ? data.dim() : 0;
  const double log_zeta = kernel.log_normalizer(p);
  SeparationStats s;
  double max_cross_log = kNegInf;
  double min_within_log = -kNegInf;
  for (int i = 0; i < data.size(); ++i) {
    for (int j = i + 1; j < data.size(); ++j) {
      const double d2 = squared_distance(data[i], data[j], kernel);
      const double lk = log_zeta - d2 / (2.0 * kernel.sigma * kernel.sigma);
      if (truth.label(i) == truth.label(j)) {
        s.max_within_d2 = std::max(s.max_within_d2, d2);
        min_within_log = std::min(min_within_log, lk);
      } else {
        s.min_cross_d2 = std::min(s.min_cross_d2, d2);
        max_cross_log = std::max(max_cross_log, lk);
      }
    }
  }
  s.log_eps = max_cross_log;
  s.log_gamma = min_within_log;
  return s;
}

MembershipResult check_D_membership(const Dataset& data, const Partition& truth,
                                    const KernelSpec& kernel, const SeparationThresholds& t) {
  MembershipResult r;
  r.stats = separation_stats(data, truth, kernel);
  const bool cross_ok = !t.a_n || r.stats.min_cross_d2 >= *t.a_n;
  const bool within_ok = r.stats.max_within_d2 <= t.b_n;
  r.member = cross_ok && within_ok;
  return r;
}

double misclassification_log_bound(const SeparationStats& stats, int k0, int n) {
  return stats.log_eps - stats.log_gamma + n * std::log(k0 + 1.0);
}

double misclassification_log_bound_gaussian(const SeparationStats& stats, double sigma2, int k0,
                                            int n) {
  return -(stats.min_cross_d2 - stats.max_within_d2) / (2.0 * sigma2) + n * std::log(k0 + 1.0);
}

Schedule corollary_schedule(const GaussianOracleSpec& spec, int n, double alpha, double iota) {
  spec.validate();
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
  if (!(iota > 0.0)) throw InvalidArgument("iota must be positive");
  if (n < 2) throw InvalidArgument("corollary schedule needs n >= 2");
  const double p = spec.dim();
  const double log_n = std::log(static_cast<double>(n));
  const double growth = std::log(spec.k0() + 1.0 + iota);
  const double ratio = spec.snr() / std::sqrt(std::max(p, log_n));
  Schedule s;
  s.sigma2 = std::pow(ratio, 2.0 * alpha) * spec.lambda_max() * log_n / (n * growth);
  if (!(s.sigma2 > 0.0)) throw InvalidArgument("corollary schedule needs SNR > 0");
  s.log_delta = 0.0;
  s.log_lambda = -n * growth - 0.5 * p * std::log(s.sigma2);
  return s;
}

Schedule miller_schedule(int n) {
  Schedule s;
  s.sigma2 = 1.0;
  s.log_delta = 0.0;
  s.log_lambda = -n * std::log(3.0);
  return s;
}

double chi_square_log_tail_bound(double a, double p) {
  if (!(p > 0.0) || !(a > p)) throw InvalidArgument("chi-square tail bound needs a > p > 0");
  const double r = a / p;
  return -0.5 * p * (r - 1.0 - std::log(r));
}

std::optional<double> posterior_odds_log_bound(const SeparationStats& stats, int k0, int n,
                                               double log_delta_lambda) {
  if (k0 < 1 || n < k0) throw InvalidArgument("need n >= K0 >= 1");
  if (stats.log_eps > stats.log_gamma) return std::nullopt;
  // coefficient * value with the convention 0 * inf = 0
  auto lin = [](double coef, double value) { return coef == 0.0 ? 0.0 : coef * value; };
  const double log_n = std::log(static_cast<double>(n));
  const double log_n_eps = log_n + stats.log_eps;
  const double tail = stats.log_eps == kNegInf
                          ? 0.0
                          : (k0 - 1) * std::exp(log_n_eps - stats.log_gamma);
  LogSumAccumulator total;
  for (int k = 1; k <= n; ++k) {
    const int lo = k == k0 ? k0 + 1 : std::max(k, k0);
    const int hi = std::min(k * k0, n);
    if (lo > hi) continue;
    double best = kNegInf;
    for (int ks : {lo, hi}) {
      best = std::max(best, lin(k - k0, log_delta_lambda) + lin(ks - k, log_n_eps) -
                                lin(ks - k0, stats.log_gamma));
    }
    total.add(n * std::log(static_cast<double>(k)) - log_factorial(k0) + best + tail);
  }
  return total.value();
}

}  // namespace bsf
