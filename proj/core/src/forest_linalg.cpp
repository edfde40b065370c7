#include "bsf/forest_linalg.hpp"

#include <algorithm>
#include <numeric>

#include "bsf/common.hpp"

namespace bsf {

namespace {

// Below this relative log weight the double path could lose products to underflow.
constexpr double kLinearPathFloor = -300.0;

void check_symmetric_finite(const Eigen::MatrixXd& lw) {
  if (lw.rows() != lw.cols() || lw.rows() == 0) {
    throw InvalidArgument("weight matrix must be square and non-empty");
  }
  const int n = static_cast<int>(lw.rows());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (!std::isfinite(lw(i, j)) || !std::isfinite(lw(j, i))) {
        throw NumericalError("non-finite log weight between " + std::to_string(i) + " and " +
                             std::to_string(j));
      }
      if (std::abs(lw(i, j) - lw(j, i)) > 1e-10 * std::max(1.0, std::abs(lw(i, j)))) {
        throw InvalidArgument("weight matrix is not symmetric");
      }
    }
  }
}

// Eliminates vertices 0..m-2 of the complete graph with relative log weights `lw` (all <= 0)
// and returns the log product of pivots, i.e. log |L[m-1]| in relative units.
double eliminate_linear(const Eigen::MatrixXd& lw) {
  // only the strict lower triangle is read and updated, column by column
  const int m = static_cast<int>(lw.rows());
  Eigen::MatrixXd w = lw.array().exp().matrix();
  double log_det = 0.0;
  for (int k = 0; k + 1 < m; ++k) {
    const double d = w.col(k).tail(m - k - 1).sum();
    if (!(d > 0.0)) throw NumericalError("zero pivot in Laplacian elimination");
    log_det += std::log(d);
    for (int j = k + 1; j + 1 < m; ++j) {
      const double wjk = w(j, k) / d;
      w.col(j).tail(m - j - 1) += wjk * w.col(k).tail(m - j - 1);
    }
  }
  return log_det;
}

double eliminate_log(Eigen::MatrixXd lw) {
  const int m = static_cast<int>(lw.rows());
  double log_det = 0.0;
  for (int k = 0; k + 1 < m; ++k) {
    LogSumAccumulator acc;
    for (int j = k + 1; j < m; ++j) acc.add(lw(j, k));
    const double log_d = acc.value();
    if (!std::isfinite(log_d)) throw NumericalError("zero pivot in Laplacian elimination");
    log_det += log_d;
    for (int j = k + 1; j + 1 < m; ++j) {
      const double base = lw(j, k) - log_d;
      for (int i = j + 1; i < m; ++i) lw(i, j) = log_add_exp(lw(i, j), lw(i, k) + base);
    }
  }
  return log_det;
}

// Relative weights in [.., 0] and the scale; the diagonal is set to -inf.
double rescale(Eigen::MatrixXd& lw) {
  const int m = static_cast<int>(lw.rows());
  double c = kNegInf;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (i != j) c = std::max(c, lw(i, j));
  if (m < 2) c = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) lw(i, j) = i == j ? kNegInf : lw(i, j) - c;
  }
  return c;
}

// log |L[m-1]| of relative weights lw, already rescaled (max off-diagonal 0).
double log_minor_relative(const Eigen::MatrixXd& lw) {
  const int m = static_cast<int>(lw.rows());
  if (m == 1) return 0.0;
  double lo = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) lo = std::min(lo, lw(i, j));
  if (lo == kNegInf) throw NumericalError("Laplacian of a graph with a zero-weight edge");
  return lo > kLinearPathFloor ? eliminate_linear(lw) : eliminate_log(lw);
}

Eigen::MatrixXd gather(const Eigen::MatrixXd& lw, std::span<const int> idx) {
  const int m = static_cast<int>(idx.size());
  Eigen::MatrixXd out(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) out(a, b) = lw(idx[a], idx[b]);
  return out;
}

Eigen::MatrixXd laplacian_from_weights(const Eigen::MatrixXd& w) {
  Eigen::MatrixXd l = -w;
  l.diagonal().setZero();
  for (int i = 0; i < l.rows(); ++i) l(i, i) = -l.row(i).sum();
  return l;
}

}  // namespace

WeightMatrix::WeightMatrix(Eigen::MatrixXd log_weights) : log_w_(std::move(log_weights)) {
  check_symmetric_finite(log_w_);
  log_w_.diagonal().setConstant(kNegInf);
}

WeightMatrix WeightMatrix::from_dataset(const Dataset& data, const KernelSpec& kernel) {
  kernel.validate();
  const int n = data.size();
  Eigen::MatrixXd lw(n, n);
  for (int i = 0; i < n; ++i) {
    lw(i, i) = 0.0;
    for (int j = i + 1; j < n; ++j) {
      lw(i, j) = log_gaussian_kernel(data[i], data[j], kernel);
      lw(j, i) = lw(i, j);
    }
  }
  return WeightMatrix(std::move(lw));
}

WeightMatrix WeightMatrix::from_weights(const Eigen::MatrixXd& weights) {
  Eigen::MatrixXd lw = weights;
  for (int i = 0; i < lw.rows(); ++i) {
    for (int j = 0; j < lw.cols(); ++j) {
      if (i == j) {
        lw(i, j) = 0.0;
      } else if (!(weights(i, j) > 0.0)) {
        throw InvalidArgument("weights must be strictly positive");
      } else {
        lw(i, j) = std::log(weights(i, j));
      }
    }
  }
  return WeightMatrix(std::move(lw));
}

WeightedLaplacian::WeightedLaplacian(Eigen::MatrixXd relative_log_weights, double log_scale)
    : rel_(std::move(relative_log_weights)), log_scale_(log_scale) {
  rel_.diagonal().setConstant(kNegInf);
}

Eigen::MatrixXd WeightedLaplacian::scaled_matrix() const {
  return laplacian_from_weights(rel_.array().exp().matrix());
}

Eigen::MatrixXd WeightedLaplacian::matrix() const {
  return laplacian_from_weights((rel_.array() + log_scale_).exp().matrix());
}

WeightedLaplacian build_laplacian(const WeightMatrix& w, std::span<const int> subset) {
  if (subset.empty()) throw InvalidArgument("Laplacian of an empty subset");
  for (int i : subset) {
    if (i < 0 || i >= w.size()) throw InvalidArgument("subset index out of range");
  }
  Eigen::MatrixXd lw = gather(w.log_weights(), subset);
  const double c = rescale(lw);
  return WeightedLaplacian(std::move(lw), c);
}

WeightedLaplacian build_laplacian(const WeightMatrix& w) {
  std::vector<int> all(w.size());
  std::iota(all.begin(), all.end(), 0);
  return build_laplacian(w, all);
}

WeightedLaplacian build_laplacian(const Dataset& data, std::span<const int> subset,
                                  const KernelSpec& kernel) {
  if (subset.empty()) throw InvalidArgument("Laplacian of an empty subset");
  const int m = static_cast<int>(subset.size());
  Eigen::MatrixXd lw = Eigen::MatrixXd::Zero(m, m);
  for (int a = 0; a < m; ++a) {
    for (int b = a + 1; b < m; ++b) {
      if (subset[a] < 0 || subset[a] >= data.size() || subset[b] < 0 || subset[b] >= data.size()) {
        throw InvalidArgument("subset index out of range");
      }
      lw(a, b) = lw(b, a) = log_gaussian_kernel(data[subset[a]], data[subset[b]], kernel);
    }
  }
  check_symmetric_finite(lw);
  const double c = rescale(lw);
  return WeightedLaplacian(std::move(lw), c);
}

double log_det_minor(const WeightedLaplacian& l, int drop) {
  const int n = l.size();
  if (n < 2) throw InvalidArgument("principal minor needs n >= 2");
  if (drop < 0 || drop >= n) throw InvalidArgument("minor index out of range");
  std::vector<int> order;
  order.reserve(n);
  for (int i = 0; i < n; ++i)
    if (i != drop) order.push_back(i);
  order.push_back(drop);
  Eigen::MatrixXd lw = gather(l.relative_log_weights(), order);
  // The relative weights need not have max 0 (e.g. coarsened Laplacians); rescale locally.
  const double c = rescale(lw);
  return log_minor_relative(lw) + (n - 1) * (c + l.log_scale());
}

double log_det_L_plus_J(const WeightedLaplacian& l) {
  const int n = l.size();
  if (n == 1) return 0.0;
  return std::log(static_cast<double>(n)) + log_det_minor(l, n - 1);
}

double log_det_L_plus_J_dense(const WeightedLaplacian& l) {
  const int n = l.size();
  Eigen::MatrixXd m = l.scaled_matrix();
  m.array() += 1.0 / n;
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) throw NumericalError("L + J/n is not numerically positive definite");
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum() + (n - 1) * l.log_scale();
}

double log_tree_weight(const Eigen::MatrixXd& log_w, std::span<const int> subset) {
  if (subset.empty()) throw InvalidArgument("tree weight of an empty subset");
  if (subset.size() == 1) return 0.0;
  Eigen::MatrixXd lw = gather(log_w, subset);
  const double c = rescale(lw);
  return log_minor_relative(lw) + (static_cast<double>(subset.size()) - 1.0) * c;
}

Eigen::VectorXd laplacian_spectrum(const WeightedLaplacian& l) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(l.matrix(), Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw NumericalError("Laplacian eigendecomposition failed");
  return eig.eigenvalues();
}

Eigen::VectorXd shifted_spectrum(const WeightedLaplacian& l, double a, double b) {
  const int n = l.size();
  Eigen::VectorXd lam = laplacian_spectrum(l);
  Eigen::VectorXd out(n);
  out(0) = n * b + a;
  for (int i = 1; i < n; ++i) out(i) = lam(i) + a;
  std::sort(out.begin(), out.end());
  return out;
}

void for_each_labeled_tree(int n,
                           const std::function<void(std::span<const std::pair<int, int>>)>& visit) {
  if (n < 1) throw InvalidArgument("tree enumeration needs n >= 1");
  if (n > kTreeEnumerationCap) {
    throw CapExceeded("spanning tree enumeration is capped at n = " +
                      std::to_string(kTreeEnumerationCap));
  }
  std::vector<std::pair<int, int>> edges;
  if (n == 1) {
    visit(edges);
    return;
  }
  const int len = n - 2;
  std::vector<int> seq(len, 0);
  std::vector<int> degree(n);
  while (true) {
    // Pruefer decoding
    edges.clear();
    std::fill(degree.begin(), degree.end(), 1);
    for (int s : seq) ++degree[s];
    for (int s : seq) {
      int leaf = 0;
      while (degree[leaf] != 1) ++leaf;
      edges.emplace_back(leaf, s);
      --degree[leaf];
      --degree[s];
    }
    int u = -1;
    for (int i = 0; i < n; ++i) {
      if (degree[i] != 1) continue;
      if (u < 0) {
        u = i;
      } else {
        edges.emplace_back(u, i);
        break;
      }
    }
    visit(edges);
    int pos = 0;
    while (pos < len && ++seq[pos] == n) seq[pos++] = 0;
    if (pos == len) break;
  }
}

double spanning_tree_weight_bruteforce(const WeightMatrix& w) {
  LogSumAccumulator acc;
  for_each_labeled_tree(w.size(), [&](std::span<const std::pair<int, int>> edges) {
    double log_prod = 0.0;
    for (auto [a, b] : edges) log_prod += w.log_weight(a, b);
    acc.add(log_prod);
  });
  return acc.value();
}

WeightedLaplacian coarsened_laplacian(const WeightMatrix& w, const Partition& partition) {
  if (partition.size() != w.size()) throw InvalidArgument("partition size does not match weights");
  const auto blocks = partition.blocks();
  const int k = static_cast<int>(blocks.size());
  Eigen::MatrixXd tau = Eigen::MatrixXd::Zero(k, k);
  for (int s = 0; s < k; ++s) {
    for (int t = s + 1; t < k; ++t) {
      LogSumAccumulator acc;
      for (int i : blocks[s])
        for (int j : blocks[t]) acc.add(w.log_weight(i, j));
      tau(s, t) = tau(t, s) = acc.value();
    }
  }
  const double c = rescale(tau);
  return WeightedLaplacian(std::move(tau), c);
}

}  // namespace bsf
