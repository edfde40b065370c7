#include "bsf/theory_check.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "bsf/common.hpp"
#include "bsf/forest_linalg.hpp"
#include "bsf/partitions.hpp"

namespace bsf {

namespace {

using Trial = std::function<double(Rng&)>;

LemmaReport run_trials(std::string id, int trials, std::uint64_t seed, const Trial& trial) {
  if (trials < 1) throw InvalidArgument("trials must be >= 1");
  LemmaReport report;
  report.id = std::move(id);
  report.trials = trials;
  report.tolerance = kLemmaTolerance;
  report.max_violation = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(t));
    Rng rng(s);
    const double v = trial(rng);
    // NaN counts as the worst possible outcome
    if (std::isnan(v) || v > report.max_violation) {
      report.max_violation = std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
      report.worst_seed = s;
    }
  }
  report.pass = report.max_violation <= report.tolerance;
  return report;
}

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

// Random symmetric log weights with entries U(lo, hi).
Eigen::MatrixXd random_log_weights(Rng& rng, int n, double lo, double hi) {
  Eigen::MatrixXd lw = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) lw(i, j) = lw(j, i) = uniform(rng, lo, hi);
  return lw;
}

// Every one of the K labels is used at least once.
Partition random_partition(Rng& rng, int n, int k) {
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) labels[i] = i < k ? i : uniform_int(rng, 0, k - 1);
  std::shuffle(labels.begin(), labels.end(), rng);
  return Partition::from_labels(labels);
}

double log_block_det(const WeightMatrix& w, std::span<const int> block) {
  // log |L_V + J/|V||
  return std::log(static_cast<double>(block.size())) + log_tree_weight(w.log_weights(), block);
}

double rel_gap(double log_a, double log_b) { return std::abs(std::expm1(log_a - log_b)); }

}  // namespace

LemmaReport verify_eigen_shift(int trials, std::uint64_t seed) {
  return run_trials("eigen_shift", trials, seed, [](Rng& rng) {
    const int n = uniform_int(rng, 2, 8);
    const WeightMatrix w(random_log_weights(rng, n, -2.0, 1.0));
    const WeightedLaplacian l = build_laplacian(w);
    const double a = uniform(rng, -2.0, 2.0);
    const double b = uniform(rng, -2.0, 2.0);
    Eigen::MatrixXd m = l.matrix();
    m.diagonal().array() += a;
    m.array() += b;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    Eigen::VectorXd direct = es.eigenvalues();
    std::sort(direct.data(), direct.data() + n);
    const Eigen::VectorXd predicted = shifted_spectrum(l, a, b);
    const double scale = std::max(1.0, direct.cwiseAbs().maxCoeff());
    return (direct - predicted).cwiseAbs().maxCoeff() / scale;
  });
}

LemmaReport verify_det_identity(int trials, std::uint64_t seed) {
  return run_trials("det_identity", trials, seed, [](Rng& rng) {
    const int n = uniform_int(rng, 2, 8);
    const WeightMatrix w(random_log_weights(rng, n, -4.0, 2.0));
    const WeightedLaplacian l = build_laplacian(w);
    const double log_n = std::log(static_cast<double>(n));
    const double ref = log_det_L_plus_J_dense(l);
    double worst = rel_gap(log_det_L_plus_J(l), ref);
    for (int i = 0; i < n; ++i) worst = std::max(worst, rel_gap(log_n + log_det_minor(l, i), ref));
    worst = std::max(worst, rel_gap(log_n + spanning_tree_weight_bruteforce(w), ref));
    return worst;
  });
}

LemmaReport verify_matrix_det_lemma(int trials, std::uint64_t seed) {
  return run_trials("matrix_det_lemma", trials, seed, [](Rng& rng) {
    const int n = uniform_int(rng, 2, 8);
    std::normal_distribution<double> g;
    auto gaussian = [&](int r, int c) {
      Eigen::MatrixXd x(r, c);
      for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) x(i, j) = g(rng);
      return x;
    };
    const Eigen::MatrixXd q1 = Eigen::HouseholderQR<Eigen::MatrixXd>(gaussian(n, n)).householderQ();
    const Eigen::MatrixXd q2 = Eigen::HouseholderQR<Eigen::MatrixXd>(gaussian(n, n)).householderQ();
    Eigen::VectorXd s(n);
    for (int i = 0; i < n; ++i) s[i] = uniform(rng, 0.5, 2.0);
    const Eigen::MatrixXd m = q1 * s.asDiagonal() * q2.transpose();
    const Eigen::VectorXd a = gaussian(n, 1);
    const Eigen::VectorXd b = gaussian(n, 1);
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
    const double det_m = lu.determinant();
    const double quad = b.dot(lu.solve(a));
    const double lhs = (m + a * b.transpose()).determinant();
    const double rhs = det_m * (1.0 + quad);
    return std::abs(lhs - rhs) / (std::abs(det_m) * (1.0 + std::abs(quad)));
  });
}

LemmaReport verify_ratio_bound_coarse(int trials, std::uint64_t seed) {
  return run_trials("ratio_bound_coarse", trials, seed, [](Rng& rng) {
    const int n = uniform_int(rng, 2, 10);
    const int k = uniform_int(rng, 1, std::min(4, n));
    const double log_gamma = uniform(rng, -4.0, 1.0);
    // every weight at least gamma
    Eigen::MatrixXd lw = random_log_weights(rng, n, 0.0, 3.0);
    lw.array() += log_gamma;
    const WeightMatrix w(lw);
    const Partition p = random_partition(rng, n, k);
    double lhs = -log_det_L_plus_J(build_laplacian(w));
    for (const auto& block : p.blocks()) lhs += log_block_det(w, block);
    const double rhs = -(k - 1) * (std::log(static_cast<double>(n)) + log_gamma);
    return lhs - rhs;
  });
}

LemmaReport verify_ratio_bound_fine(int trials, std::uint64_t seed) {
  return run_trials("ratio_bound_fine", trials, seed, [](Rng& rng) {
    const int n = uniform_int(rng, 2, 10);
    const int k = uniform_int(rng, 1, std::min(4, n));
    const Partition p = random_partition(rng, n, k);
    const double eps = std::exp(uniform(rng, -4.0, 1.0));
    const double u = std::exp(uniform(rng, -3.0, 1.0));
    Eigen::MatrixXd raw = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double x = uniform(rng, 0.0, 1.0);
        // within in [eps, 2 eps + u), cross in (0, eps]
        raw(i, j) = raw(j, i) = p.label(i) == p.label(j) ? eps + x * (eps + u) : eps * (1.0 - x);
      }
    }
    const WeightMatrix w = WeightMatrix::from_weights(raw);
    double lhs = log_det_L_plus_J(build_laplacian(w));
    double rhs = (k - 1) * std::log(n * eps);
    for (const auto& block : p.blocks()) {
      lhs -= log_block_det(w, block);
      const int ni = static_cast<int>(block.size());
      if (ni < 2) continue;
      const Eigen::VectorXd lam = laplacian_spectrum(build_laplacian(w, block));
      for (int j = 1; j < ni; ++j) rhs += std::log1p((n - ni) * eps / lam[j]);
    }
    return lhs - rhs;
  });
}

LemmaReport verify_forest_factorization(int trials, std::uint64_t seed) {
  return run_trials("forest_factorization", trials, seed, [](Rng& rng) {
    const int n = uniform_int(rng, 2, 9);
    const int k = uniform_int(rng, 1, std::min(4, n));
    const WeightMatrix w(random_log_weights(rng, n, -3.0, 1.0));
    const Partition p = random_partition(rng, n, k);
    const double lhs = log_det_minor(build_laplacian(w), 0);
    double rhs = k > 1 ? log_det_minor(coarsened_laplacian(w, p), 0) : 0.0;
    for (const auto& block : p.blocks()) rhs += log_tree_weight(w.log_weights(), block);
    double violation = rhs - lhs;
    if (k == 1) violation = std::max(violation, rel_gap(lhs, rhs));
    if (n <= 6) {
      // trees whose restriction to every block is a spanning tree of that block
      LogSumAccumulator acc;
      std::vector<int> inside(static_cast<std::size_t>(k));
      for_each_labeled_tree(n, [&](std::span<const std::pair<int, int>> edges) {
        std::fill(inside.begin(), inside.end(), 0);
        double log_prod = 0.0;
        for (auto [a, b] : edges) {
          if (p.label(a) == p.label(b)) ++inside[p.label(a)];
          log_prod += w.log_weight(a, b);
        }
        for (int c = 0; c < k; ++c)
          if (inside[c] != p.sizes()[c] - 1) return;
        acc.add(log_prod);
      });
      violation = std::max(violation, rel_gap(acc.value(), rhs));
    }
    return violation;
  });
}

std::vector<LemmaReport> verify_all(int trials, std::uint64_t seed) {
  return {verify_eigen_shift(trials, derive_seed(seed, 1)),
          verify_det_identity(trials, derive_seed(seed, 2)),
          verify_matrix_det_lemma(trials, derive_seed(seed, 3)),
          verify_ratio_bound_coarse(trials, derive_seed(seed, 4)),
          verify_ratio_bound_fine(trials, derive_seed(seed, 5)),
          verify_forest_factorization(trials, derive_seed(seed, 6))};
}

}  // namespace bsf
