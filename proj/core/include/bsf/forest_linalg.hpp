#pragma once

// Weighted Laplacians of complete graphs, their determinants and spanning-tree weights.
//
// Determinants are taken by eliminating vertices one at a time from the weighted graph
// (Schur complement of a Laplacian is again a Laplacian). Every pivot is a sum of positive
// weights, so no cancellation occurs and tiny weights keep full relative accuracy.

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "bsf/dataset.hpp"
#include "bsf/kernels.hpp"
#include "bsf/partitions.hpp"

namespace bsf {

/// Symmetric matrix of log f_ij; the diagonal is ignored.
class WeightMatrix {
 public:
  explicit WeightMatrix(Eigen::MatrixXd log_weights);
  static WeightMatrix from_dataset(const Dataset& data, const KernelSpec& kernel);
  /// Strictly positive raw weights.
  static WeightMatrix from_weights(const Eigen::MatrixXd& weights);

  int size() const { return static_cast<int>(log_w_.rows()); }
  double log_weight(int i, int j) const { return log_w_(i, j); }
  const Eigen::MatrixXd& log_weights() const { return log_w_; }

 private:
  Eigen::MatrixXd log_w_;
};

/// L_ij = -A_ij, L_ii = sum_j A_ij, stored as weights relative to exp(log_scale).
class WeightedLaplacian {
 public:
  WeightedLaplacian(Eigen::MatrixXd relative_log_weights, double log_scale);

  int size() const { return static_cast<int>(rel_.rows()); }
  double log_scale() const { return log_scale_; }
  /// Relative log weights, all <= 0 when built from a subset maximum; diagonal is -inf.
  const Eigen::MatrixXd& relative_log_weights() const { return rel_; }
  /// L / exp(log_scale).
  Eigen::MatrixXd scaled_matrix() const;
  /// L in original weights (may overflow for extreme scales).
  Eigen::MatrixXd matrix() const;

 private:
  Eigen::MatrixXd rel_;
  double log_scale_;
};

WeightedLaplacian build_laplacian(const WeightMatrix& w, std::span<const int> subset);
WeightedLaplacian build_laplacian(const WeightMatrix& w);
WeightedLaplacian build_laplacian(const Dataset& data, std::span<const int> subset,
                                  const KernelSpec& kernel);

/// log |L[drop]| in original weights. Requires n >= 2.
double log_det_minor(const WeightedLaplacian& l, int drop);
/// log |L + J/n| = log n + log |L[i]|; 0 for n = 1.
double log_det_L_plus_J(const WeightedLaplacian& l);
/// Same quantity by a dense Cholesky factorization of L~ + J/n; an independent route.
double log_det_L_plus_J_dense(const WeightedLaplacian& l);

/// log of the total spanning-tree weight of the complete graph on `subset`, i.e. log|L_V[1]|.
/// Zero for a single vertex.
double log_tree_weight(const Eigen::MatrixXd& log_w, std::span<const int> subset);

/// Ascending eigenvalues of L (original weights).
Eigen::VectorXd laplacian_spectrum(const WeightedLaplacian& l);
/// Predicted ascending spectrum of L + aI + bJ: {lambda_i + a, i >= 2} and n b + a.
Eigen::VectorXd shifted_spectrum(const WeightedLaplacian& l, double a, double b);

inline constexpr int kTreeEnumerationCap = 9;

/// Visits every labeled spanning tree of the complete graph on n vertices (n^{n-2} of them)
/// as a list of n-1 edges. Throws CapExceeded above kTreeEnumerationCap.
void for_each_labeled_tree(int n, const std::function<void(std::span<const std::pair<int, int>>)>& visit);

/// log of the sum over labeled spanning trees of edge-weight products, by Pruefer sequences.
double spanning_tree_weight_bruteforce(const WeightMatrix& w);

/// K x K Laplacian with aggregated weights tau_st = sum over i in V_s, j in V_t of f_ij.
WeightedLaplacian coarsened_laplacian(const WeightMatrix& w, const Partition& partition);

}  // namespace bsf
