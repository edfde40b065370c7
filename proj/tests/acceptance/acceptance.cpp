// Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "bsf/experiments.hpp"
#include "bsf/forest_linalg.hpp"
#include "bsf/kernels.hpp"
#include "bsf/oracle_lab.hpp"
#include "bsf/posterior.hpp"
#include "bsf/sampler.hpp"
#include "bsf/theory_check.hpp"
#include "cli.hpp"
#include "oracles.hpp"

using namespace bsf;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, bool pass, const std::string& what, const std::string& detail) {
  std::printf("%s criterion %d: %s | %s\n", pass ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
  std::fflush(stdout);
  failures += !pass;
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

void kirchhoff() {
  const auto t0 = Clock::now();
  const LemmaReport r = verify_det_identity(500, 20240101);
  const double secs = seconds_since(t0);
  report(1, r.pass && secs < 30.0, "Kirchhoff identity on 500 random graphs",
         "max rel err " + fmt("%.3e", r.max_violation) + ", " + fmt("%.2f", secs) + " s");
}

void lemma_suite() {
  const auto t0 = Clock::now();
  const std::uint64_t seed = 7;
  const std::vector<LemmaReport> reports{
      verify_eigen_shift(1000, derive_seed(seed, 1)),        verify_matrix_det_lemma(1000, derive_seed(seed, 2)),
      verify_ratio_bound_coarse(1000, derive_seed(seed, 3)), verify_ratio_bound_fine(1000, derive_seed(seed, 4)),
      verify_forest_factorization(1000, derive_seed(seed, 5))};
  const double secs = seconds_since(t0);
  bool pass = secs < 120.0;
  std::string detail;
  for (const auto& r : reports) {
    pass = pass && r.pass && r.trials == 1000;
    detail += r.id + "=" + fmt("%.2e", r.max_violation) + " ";
  }
  report(2, pass, "lemma suite, 1000 trials each", detail + fmt("%.2f", secs) + " s");
}

void worked_example() {
  // f12 / (delta lambda) = 9 from data: points 0 and 1 under a unit Gaussian kernel
  const Dataset d = Dataset::euclidean({Eigen::VectorXd::Constant(1, 0.0), Eigen::VectorXd::Constant(1, 1.0)});
  BsfConfig cfg;
  cfg.kernel = KernelSpec::euclidean(1.0);
  const double log_f = -0.5 - 0.5 * std::log(2 * M_PI);
  cfg.log_lambda = log_f - std::log(9.0);
  const auto t = exact_posterior(d, cfg);
  const double e1 = std::abs(t.entries[0].probability - 0.9);
  const double e2 = std::abs(t.entries[1].probability - 0.1);
  const BsfModel m(d, cfg);
  const double odds = std::exp(m.log_posterior_ratio(Partition::parse("0,0"), Partition::parse("0,1")));
  report(3, t.entries.size() == 2 && t.entries[0].partition == Partition::parse("0,0") && e1 <= 1e-12 && e2 <= 1e-12,
         "n=2 worked example (0.9, 0.1)",
         "P(together)=" + fmt("%.17g", t.entries[0].probability) + " P(split)=" + fmt("%.17g", t.entries[1].probability) +
             " odds=" + fmt("%.15g", odds));
}

std::map<std::vector<int>, double> to_map(const std::vector<Partition>& samples) {
  std::map<std::vector<int>, double> m;
  for (const auto& p : samples) m[{p.labels().begin(), p.labels().end()}] += 1.0 / samples.size();
  return m;
}

void sampler_exactness() {
  const auto t0 = Clock::now();
  bool pass = true;
  std::string detail;
  for (int n : {6, 8}) {
    for (std::uint64_t seed : {101, 202, 303}) {
      const OracleSample s = generate_gaussian(GaussianOracleSpec::symmetric_pair(4.0, 2), n, seed);
      BsfConfig cfg;
      cfg.kernel = KernelSpec::euclidean(1.0);
      cfg.log_lambda = -2.0;
      const BsfModel model(s.data, cfg);
      const auto table = exact_posterior(model);
      std::map<std::vector<int>, double> exact;
      for (const auto& e : table.entries) exact[{e.partition.labels().begin(), e.partition.labels().end()}] = e.probability;
      const auto chain = run_chain(model, ChainSchedule{50000, 0, 1, 1000}, derive_seed(seed, 9));
      const double tv = oracle::total_variation(to_map(chain.samples()), exact);
      pass = pass && tv <= 0.05;
      detail += "n" + std::to_string(n) + "/s" + std::to_string(seed) + " TV=" + fmt("%.4f", tv) + " ";
    }
  }
  // n = 3 stationarity of every exact transition kernel
  double worst = 0.0;
  for (std::uint64_t seed : {1, 2, 3}) {
    const OracleSample s = generate_gaussian(GaussianOracleSpec::symmetric_pair(1.0, 2), 3, seed);
    BsfConfig cfg;
    cfg.log_lambda = -1.0;
    const BsfModel model(s.data, cfg);
    const auto table = exact_posterior(model);
    auto gap = [&](auto row) {
      std::map<Partition, double> next;
      for (const auto& e : table.entries)
        for (const auto& [to, p] : row(e.partition)) next[to] += e.probability * p;
      double g = 0.0;
      for (const auto& e : table.entries) g = std::max(g, std::abs(next[e.partition] - e.probability));
      return g;
    };
    for (int i = 0; i < 3; ++i) worst = std::max(worst, gap([&](const Partition& p) { return gibbs_site_transition(model, p, i); }));
    worst = std::max(worst, gap([&](const Partition& p) { return split_merge_transition(model, p); }));
  }
  pass = pass && worst <= 1e-8;
  report(4, pass, "sampler vs exact enumeration",
         detail + "n3 stationarity gap=" + fmt("%.2e", worst) + " " + fmt("%.1f", seconds_since(t0)) + " s");
}

void miller_toy() {
  const auto t0 = Clock::now();
  auto plan = gaussian_consistency_plan(GaussianOracleSpec::standard_normal(1),
                                        ScheduleSpec{ScheduleSpec::Kind::miller, 0.5, 1.0, {}});
  plan.n_grid = {4, 6, 8, 10, 12};
  plan.replicates = 50;
  plan.master_seed = 2024;
  plan.workers = 1;
  const auto r = consistency_experiment(plan);
  bool monotone = true;
  std::string detail;
  for (std::size_t g = 0; g < r.aggregates.size(); ++g) {
    if (g > 0 && r.aggregates[g].prob_k0.median < r.aggregates[g - 1].prob_k0.median) monotone = false;
    detail += "n" + std::to_string(r.aggregates[g].n) + "=" + fmt("%.5f", r.aggregates[g].prob_k0.median) + " ";
  }
  const double last = r.aggregates.back().prob_k0.median;
  const double secs = seconds_since(t0);
  report(5, monotone && last >= 0.99 && secs < 600.0, "Miller toy median P(K=1) trend",
         detail + fmt("%.1f", secs) + " s");
}

void separated_gaussian() {
  const int n = 12;
  const auto spec = GaussianOracleSpec::symmetric_pair(20.0, 2);
  auto plan = gaussian_consistency_plan(spec, ScheduleSpec{ScheduleSpec::Kind::corollary, 0.5, 1.0, {}});
  plan.n_grid = {n};
  plan.replicates = 50;
  plan.master_seed = 11;
  plan.workers = 1;
  const auto r = consistency_experiment(plan);
  const auto& a = r.aggregates.front();
  const Schedule s = corollary_schedule(spec, n, 0.5, 1.0);
  const Phi phi = Phi::defaults(1.0);
  const double log_zeta = KernelSpec::euclidean(std::sqrt(s.sigma2)).log_normalizer(2);
  const auto th = compute_thresholds(s.sigma2, 2, phi, s.log_delta_lambda(), log_zeta, n);
  // smallest c2 with b_n > 0 under this schedule
  const double min_log_c2 = -(th.b_n / (2 * s.sigma2));
  report(6, a.map_exact_rate >= 0.95 && a.d_member_rate >= 0.90, "separated Gaussian recovery, SNR 20, n=12",
         "MAP exact rate=" + fmt("%.2f", a.map_exact_rate) + " D-membership rate=" + fmt("%.2f", a.d_member_rate) +
             " sigma2=" + fmt("%.4f", s.sigma2) + " b_n=" + fmt("%.4f", th.b_n) +
             (th.feasible ? std::string(" feasible")
                          : " infeasible: b_n<=0 for every dataset, needs c2>" + fmt("%.4f", std::exp(min_log_c2))));
}

void misclassification() {
  MisclassPlan plan;
  plan.base = GaussianOracleSpec::symmetric_pair(1.0, 2);
  plan.snr_grid = {2, 5, 10, 20};
  plan.n = 10;
  plan.replicates = 30;
  plan.master_seed = 5;
  plan.workers = 1;
  const auto r = misclassification_experiment(plan);
  bool decreasing = true;
  int violations = 0, applicable = 0;
  std::string detail;
  for (std::size_t g = 0; g < r.aggregates.size(); ++g) {
    const auto& a = r.aggregates[g];
    if (g > 0 && a.expected_hamming.median > r.aggregates[g - 1].expected_hamming.median) decreasing = false;
    violations += a.bound_violations;
    applicable += a.bound_applicable;
    detail += "snr" + fmt("%g", a.snr) + "=" + fmt("%.3g", a.expected_hamming.median) + " ";
  }
  const double at20 = r.aggregates.back().expected_hamming.median;
  report(7, decreasing && at20 <= 1e-12 && violations == 0, "misclassification decay, known K0, n=10",
         detail + "bound applicable rows=" + std::to_string(applicable) + " violations=" + std::to_string(violations));
}

void chi_square() {
  Rng rng(99);
  bool pass = true;
  int pairs = 0;
  double worst_margin = 1.0;
  for (double p : {1.0, 2.0, 3.0, 5.0, 8.0}) {
    std::chi_squared_distribution<double> chi(p);
    std::vector<double> x(1000000);
    for (auto& v : x) v = chi(rng);
    for (double mult : {1.2, 1.5, 2.5, 4.0}) {
      const double a = mult * p;
      double tail = 0.0;
      for (double v : x) tail += v > a;
      tail /= x.size();
      const double bound = std::exp(chi_square_log_tail_bound(a, p));
      pass = pass && tail <= bound;
      worst_margin = std::min(worst_margin, bound - tail);
      ++pairs;
    }
  }
  const double hand = std::exp(chi_square_log_tail_bound(4.0, 2.0));
  pass = pass && pairs == 20 && std::abs(hand - 0.7358) <= 1e-3;
  report(8, pass, "chi-square tail bound", std::to_string(pairs) + " pairs, min margin " + fmt("%.4g", worst_margin) +
                                               ", bound(4,2)=" + fmt("%.6f", hand));
}

void spd_pipeline() {
  ObjectOracleSpec spec;
  spec.means = {Eigen::MatrixXd::Identity(2, 2), Eigen::Vector2d(std::exp(3.0), std::exp(-3.0)).asDiagonal()};
  spec.noise_scales = {0.1, 0.1};
  auto plan = spd_consistency_plan(spec, 0.5, 0.0, -10.0);
  plan.n_grid = {10};
  plan.replicates = 30;
  plan.master_seed = 3;
  plan.workers = 1;
  const auto r = consistency_experiment(plan);
  int good = 0;
  for (const auto& row : r.rows) good += row.prob_truth >= 0.9;
  const double rate = static_cast<double>(good) / r.rows.size();

  Rng rng(17);
  std::normal_distribution<double> g;
  auto random_spd = [&] {
    Eigen::MatrixXd a(3, 3);
    for (int i = 0; i < 9; ++i) a(i / 3, i % 3) = g(rng);
    return Eigen::MatrixXd(a * a.transpose() + 0.3 * Eigen::MatrixXd::Identity(3, 3));
  };
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const auto p1 = random_spd(), p2 = random_spd();
    Eigen::MatrixXd a(3, 3);
    for (int i = 0; i < 9; ++i) a(i / 3, i % 3) = g(rng);
    while (std::abs(a.determinant()) < 0.1) a += Eigen::MatrixXd::Identity(3, 3);
    worst = std::max(worst, std::abs(spd_geodesic_distance(Eigen::MatrixXd(a * p1 * a.transpose()), Eigen::MatrixXd(a * p2 * a.transpose())) -
                                     spd_geodesic_distance(p1, p2)));
  }
  report(9, rate >= 0.9 && worst <= 1e-8, "SPD pipeline, n=10",
         "P(truth)>=0.9 in " + std::to_string(good) + "/30, affine invariance max err " + fmt("%.2e", worst));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void determinism() {
  const fs::path base = fs::temp_directory_path() / "bsf_acceptance_determinism";
  fs::remove_all(base);
  const std::string config = std::string(BSF_CONFIG_DIR) + "/miller_toy.json";
  std::vector<std::string> dirs;
  bool ok = true;
  for (auto [tag, workers] : std::vector<std::pair<std::string, std::string>>{{"w1a", "1"}, {"w1b", "1"}, {"w4", "4"}}) {
    const std::string out = (base / tag).string();
    std::ostringstream so, se;
    const int code = cli::run_cli({"bsf", "experiment", "--config", config, "--out", out, "--seed", "424242",
                                   "--workers", workers},
                                  so, se);
    ok = ok && code == 0;
    dirs.push_back(out);
  }
  bool same = ok;
  for (const char* f : {"consistency_rows.csv", "consistency_aggregate.csv"}) {
    const std::string ref = slurp(fs::path(dirs[0]) / f);
    same = same && !ref.empty();
    for (std::size_t i = 1; i < dirs.size(); ++i) same = same && slurp(fs::path(dirs[i]) / f) == ref;
  }
  fs::remove_all(base);
  report(10, same, "experiment CSVs byte-identical", "two runs with 1 worker and one with 4 workers");
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  const std::vector<void (*)()> criteria{kirchhoff, lemma_suite, worked_example, sampler_exactness, miller_toy,
                                         separated_gaussian, misclassification, chi_square, spd_pipeline, determinism};
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    try {
      criteria[i]();
    } catch (const std::exception& e) {
      report(static_cast<int>(i + 1), false, "threw", e.what());
    }
  }
  std::printf("%d of %zu criteria failed, %.1f s total\n", failures, criteria.size(), seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
