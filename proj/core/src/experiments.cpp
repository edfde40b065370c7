#include "bsf/experiments.hpp"

#include <algorithm>
#include <map>

namespace bsf {

Quartiles quartiles(std::vector<double> values) {
  if (values.empty()) throw InvalidArgument("quartiles of an empty sample");
  std::sort(values.begin(), values.end());
  auto at = [&](double q) {
    const double pos = q * (values.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - lo) * (values[hi] - values[lo]);
  };
  return {at(0.25), at(0.5), at(0.75)};
}

std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t grid_key, std::uint64_t r) {
  return derive_seed(derive_seed(master, grid_key), r);
}

Schedule ScheduleSpec::at(const GaussianOracleSpec& spec, int n) const {
  switch (kind) {
    case Kind::corollary: return corollary_schedule(spec, n, alpha, iota);
    case Kind::miller: return miller_schedule(n);
    case Kind::fixed: return fixed;
  }
  return fixed;
}

void ConsistencyPlan::validate() const {
  if (!generate || !config_for) throw InvalidArgument("experiment needs a generator and a config");
  if (n_grid.empty()) throw InvalidArgument("n grid must be non-empty");
  for (int n : n_grid)
    if (n < 1) throw InvalidArgument("grid sizes must be positive");
  if (replicates < 1) throw InvalidArgument("replicates must be at least 1");
  if (k0 < 1) throw InvalidArgument("K0 must be positive");
  if (workers < 1) throw InvalidArgument("workers must be at least 1");
  phi.validate();
  if (mode == ExperimentMode::mcmc) chain.validate();
}

ConsistencyPlan gaussian_consistency_plan(const GaussianOracleSpec& spec, const ScheduleSpec& schedule) {
  spec.validate();
  ConsistencyPlan plan;
  plan.k0 = spec.k0();
  plan.phi = Phi::defaults(schedule.iota);
  plan.generate = [spec](int n, std::uint64_t seed) { return generate_gaussian(spec, n, seed); };
  plan.config_for = [spec, schedule](int n) {
    const Schedule s = schedule.at(spec, n);
    BsfConfig cfg;
    cfg.kernel = KernelSpec::euclidean(std::sqrt(s.sigma2));
    cfg.log_delta = s.log_delta;
    cfg.log_lambda = s.log_lambda;
    return cfg;
  };
  return plan;
}

ConsistencyPlan spd_consistency_plan(const ObjectOracleSpec& spec, double sigma, double log_zeta,
                                     double log_delta_lambda) {
  spec.validate();
  ConsistencyPlan plan;
  plan.k0 = spec.k0();
  plan.generate = [spec](int n, std::uint64_t seed) { return generate_spd(spec, n, seed); };
  plan.config_for = [sigma, log_zeta, log_delta_lambda](int) {
    BsfConfig cfg;
    cfg.kernel = KernelSpec::spd(sigma, log_zeta);
    cfg.log_lambda = log_delta_lambda;
    return cfg;
  };
  return plan;
}

namespace {

ConsistencyRow consistency_replicate(const ConsistencyPlan& plan, int n, int r) {
  ConsistencyRow row;
  row.n = n;
  row.replicate = r;
  row.seed = replicate_seed(plan.master_seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(r));
  const OracleSample sample = plan.generate(n, row.seed);
  const BsfConfig cfg = plan.config_for(n);
  const BsfModel model(sample.data, cfg);
  row.sigma2 = cfg.kernel.sigma * cfg.kernel.sigma;
  row.log_delta_lambda = cfg.log_delta_lambda();

  const int p = sample.data.kind() == PayloadKind::euclidean ? sample.data.dim() : 0;
  const auto thresholds = compute_thresholds(row.sigma2, plan.k0, plan.phi, row.log_delta_lambda,
                                             cfg.kernel.log_normalizer(p), n);
  const auto membership = check_D_membership(sample.data, sample.truth, cfg.kernel, thresholds);
  row.d_member = membership.member;
  row.log_eps_over_gamma = membership.stats.log_eps - membership.stats.log_gamma;

  const int k_truth = sample.truth.num_blocks();
  Partition map = sample.truth;
  if (plan.mode == ExperimentMode::exact) {
    PosteriorOptions opts;
    opts.truth = sample.truth;
    opts.retain_entries = false;
    const PosteriorTable table = exact_posterior(model, opts);
    row.prob_truth = *table.truth_probability;
    row.prob_k0 = k_truth < static_cast<int>(table.k_marginal.size()) ? table.k_marginal[k_truth] : 0.0;
    map = table.map;
  } else {
    const ChainSummary summary = run_chain(model, plan.chain, derive_seed(row.seed, 1));
    std::map<Partition, std::uint64_t> freq;
    for (const auto& s : summary.samples()) ++freq[s];
    const double total = static_cast<double>(summary.retained());
    row.prob_truth = freq.count(sample.truth) ? freq[sample.truth] / total : 0.0;
    const auto& hist = summary.k_histogram();
    row.prob_k0 = k_truth < static_cast<int>(hist.size()) ? hist[k_truth] / total : 0.0;
    std::uint64_t best = 0;
    for (const auto& [part, count] : freq) {
      if (count > best) {
        best = count;
        map = part;
      }
    }
  }
  row.map_k = map.num_blocks();
  row.map_hamming = hamming_distance(map, sample.truth);
  return row;
}

}  // namespace

ConsistencyResult consistency_experiment(const ConsistencyPlan& plan) {
  plan.validate();
  const int per_n = plan.replicates;
  const int total = static_cast<int>(plan.n_grid.size()) * per_n;
  std::function<ConsistencyRow(int)> task = [&](int idx) {
    return consistency_replicate(plan, plan.n_grid[idx / per_n], idx % per_n);
  };
  ConsistencyResult result;
  result.rows = run_indexed(total, plan.workers, task);
  for (std::size_t g = 0; g < plan.n_grid.size(); ++g) {
    ConsistencyAggregate agg;
    agg.n = plan.n_grid[g];
    agg.replicates = per_n;
    std::vector<double> truth, k0, ham;
    int members = 0;
    int exact = 0;
    for (int r = 0; r < per_n; ++r) {
      const auto& row = result.rows[g * per_n + r];
      truth.push_back(row.prob_truth);
      k0.push_back(row.prob_k0);
      ham.push_back(row.map_hamming);
      members += row.d_member;
      exact += row.map_hamming == 0;
    }
    agg.prob_truth = quartiles(truth);
    agg.prob_k0 = quartiles(k0);
    agg.map_hamming = quartiles(ham);
    agg.d_member_rate = static_cast<double>(members) / per_n;
    agg.map_exact_rate = static_cast<double>(exact) / per_n;
    result.aggregates.push_back(agg);
  }
  return result;
}

void MisclassPlan::validate() const {
  base.validate();
  if (base.k0() < 2) throw InvalidArgument("misclassification needs K0 >= 2");
  if (snr_grid.empty()) throw InvalidArgument("SNR grid must be non-empty");
  for (double s : snr_grid)
    if (!(s >= 0.0)) throw InvalidArgument("SNR values must be non-negative");
  if (n < base.k0()) throw InvalidArgument("n must be at least K0");
  if (replicates < 1) throw InvalidArgument("replicates must be at least 1");
  if (!(kappa > 0.0)) throw InvalidArgument("kappa must be positive");
  if (tail_draws < 1) throw InvalidArgument("tail_draws must be positive");
  if (workers < 1) throw InvalidArgument("workers must be at least 1");
}

double misclass_sigma2(const GaussianOracleSpec& spec, int n, double kappa) {
  const double lam = spec.lambda_max();
  const double d = spec.min_mean_distance();
  if (d == 0.0) return kappa * lam;
  return kappa * std::min(d * d / (n * std::log(spec.k0() + 1.0)), lam);
}

namespace {

std::vector<double> sorted_sq_norms(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                                    int draws, Rng& rng) {
  const Eigen::MatrixXd l = Eigen::LLT<Eigen::MatrixXd>(cov).matrixL();
  std::normal_distribution<double> normal;
  std::vector<double> out(draws);
  Eigen::VectorXd e(mean.size());
  for (int t = 0; t < draws; ++t) {
    for (int d = 0; d < e.size(); ++d) e(d) = normal(rng);
    out[t] = (mean + l * e).squaredNorm();
  }
  std::sort(out.begin(), out.end());
  return out;
}

double fraction_below(const std::vector<double>& sorted, double x) {
  return static_cast<double>(std::lower_bound(sorted.begin(), sorted.end(), x) - sorted.begin()) /
         sorted.size();
}

double fraction_above(const std::vector<double>& sorted, double x) {
  return static_cast<double>(sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), x)) /
         sorted.size();
}

}  // namespace

double misclass_theorem_log_bound(const GaussianOracleSpec& spec, int n, double sigma2, int draws,
                                  std::uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  const int k0 = spec.k0();
  std::vector<std::vector<double>> cross, within;
  for (int k = 0; k < k0; ++k) {
    within.push_back(sorted_sq_norms(Eigen::VectorXd::Zero(spec.dim()), 2.0 * spec.covariances[k], draws, rng));
    for (int l = k + 1; l < k0; ++l) {
      cross.push_back(sorted_sq_norms(spec.means[k] - spec.means[l],
                                      spec.covariances[k] + spec.covariances[l], draws, rng));
    }
  }
  const std::vector<double> grid = {0.0, 1e-4, 1e-3, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.5};
  const double n3 = std::pow(static_cast<double>(n), 3.0);
  const double combinatorial = n * std::log(k0 + 1.0);
  double best = std::numeric_limits<double>::infinity();
  for (double qa : grid) {
    double a = std::numeric_limits<double>::infinity();
    for (const auto& c : cross) a = std::min(a, c[static_cast<std::size_t>(qa * (c.size() - 1))]);
    double pa = 0.0;
    for (const auto& c : cross) pa = std::max(pa, fraction_below(c, a));
    for (double qb : grid) {
      double b = 0.0;
      for (const auto& w : within) b = std::max(b, w[static_cast<std::size_t>((1.0 - qb) * (w.size() - 1))]);
      if (!(a > b)) continue;
      double pb = 0.0;
      for (const auto& w : within) pb = std::max(pb, fraction_above(w, b));
      const double first = -(a - b) / (2.0 * sigma2) + combinatorial;
      const double tails = pa + pb > 0.0 ? std::log(n3 * (pa + pb)) : kNegInf;
      best = std::min(best, log_add_exp(first, tails));
    }
  }
  return best;
}

MisclassResult misclassification_experiment(const MisclassPlan& plan) {
  plan.validate();
  const int per = plan.replicates;
  const int k0 = plan.base.k0();
  std::vector<GaussianOracleSpec> specs;
  std::vector<double> sigma2s;
  for (double snr : plan.snr_grid) {
    specs.push_back(plan.base.with_snr(snr));
    sigma2s.push_back(misclass_sigma2(specs.back(), plan.n, plan.kappa));
  }
  const double log_n = std::log(static_cast<double>(plan.n));

  std::function<MisclassRow(int)> task = [&](int idx) {
    const int g = idx / per;
    MisclassRow row;
    row.snr = plan.snr_grid[g];
    row.replicate = idx % per;
    row.seed = replicate_seed(plan.master_seed, static_cast<std::uint64_t>(g), static_cast<std::uint64_t>(row.replicate));
    row.sigma2 = sigma2s[g];
    const OracleSample sample = generate_gaussian(specs[g], plan.n, row.seed);
    BsfConfig cfg;
    cfg.kernel = KernelSpec::euclidean(std::sqrt(row.sigma2));
    const BsfModel model(sample.data, cfg);
    PosteriorOptions opts;
    opts.bounds = {k0, k0};
    opts.truth = sample.truth;
    opts.retain_entries = false;
    opts.expected_hamming = true;
    row.expected_hamming = *exact_posterior(model, opts).expected_hamming;
    const auto stats = separation_stats(sample.data, sample.truth, cfg.kernel);
    row.log_lemma_bound = misclassification_log_bound(stats, k0, plan.n);
    row.log_lemma_bound_gaussian = misclassification_log_bound_gaussian(stats, row.sigma2, k0, plan.n);
    row.bound_below_n = row.log_lemma_bound < log_n;
    row.within_bound = !row.bound_below_n || row.expected_hamming <= std::exp(row.log_lemma_bound);
    return row;
  };

  MisclassResult result;
  result.rows = run_indexed(static_cast<int>(plan.snr_grid.size()) * per, plan.workers, task);
  for (std::size_t g = 0; g < plan.snr_grid.size(); ++g) {
    MisclassAggregate agg;
    agg.snr = plan.snr_grid[g];
    agg.replicates = per;
    std::vector<double> eh;
    for (int r = 0; r < per; ++r) {
      const auto& row = result.rows[g * per + r];
      eh.push_back(row.expected_hamming);
      agg.bound_applicable += row.bound_below_n;
      agg.bound_violations += !row.within_bound;
    }
    agg.expected_hamming = quartiles(eh);
    agg.log_theorem_bound = misclass_theorem_log_bound(
        specs[g], plan.n, sigma2s[g], plan.tail_draws,
        replicate_seed(plan.master_seed, g, 0xB0D5ULL));
    result.aggregates.push_back(agg);
  }
  return result;
}

}  // namespace bsf
