#pragma once

// Gaussian-type conditional kernels and the flat root kernel, all in log domain.

#include <Eigen/Dense>

#include "bsf/dataset.hpp"

namespace bsf {

enum class KernelFamily { euclidean_gaussian, riemannian_gaussian_spd, graph_laplacian_gaussian };

enum class GraphMetric { riemannian, frobenius };

struct KernelSpec {
  KernelFamily family = KernelFamily::euclidean_gaussian;
  double sigma = 1.0;
  /// log of the normalizer for manifold families; ignored (derived from p) for euclidean.
  double log_zeta = 0.0;
  double eta = 0.1;
  GraphMetric graph_metric = GraphMetric::riemannian;

  static KernelSpec euclidean(double sigma);
  static KernelSpec spd(double sigma, double log_zeta = 0.0);
  static KernelSpec graph(double sigma, double eta, GraphMetric metric = GraphMetric::riemannian,
                          double log_zeta = 0.0);

  /// log ζ(σ); for the euclidean family this is -(p/2)log 2π - p log σ.
  double log_normalizer(int p) const;
  void validate() const;
  PayloadKind payload_kind() const;
};

struct RootKernel {
  double delta = 1.0;
};

double squared_distance(const Point& a, const Point& b, const KernelSpec& spec);
double log_gaussian_kernel(const Point& a, const Point& b, const KernelSpec& spec);
double log_root_kernel(const Point& y, const RootKernel& root);

double spd_geodesic_distance_squared(const Eigen::MatrixXd& p1, const Eigen::MatrixXd& p2);
double spd_geodesic_distance(const Eigen::MatrixXd& p1, const Eigen::MatrixXd& p2);
double spd_geodesic_distance(const Point& p1, const Point& p2);
double graph_distance(const Point& l1, const Point& l2, double eta,
                      GraphMetric metric = GraphMetric::riemannian);

// Symmetric matrix functions via eigendecomposition; eigenvalues clamped at 1e-12 where a log
// or inverse is taken.
Eigen::MatrixXd spd_sqrt(const Eigen::MatrixXd& p);
Eigen::MatrixXd spd_inv_sqrt(const Eigen::MatrixXd& p);
Eigen::MatrixXd spd_log(const Eigen::MatrixXd& p);
Eigen::MatrixXd sym_exp(const Eigen::MatrixXd& s);

/// Karcher mean under the affine-invariant metric by fixed-point iteration in the tangent space.
Eigen::MatrixXd frechet_mean(const std::vector<Eigen::MatrixXd>& points, int max_iters = 200,
                             double tol = 1e-12);

}  // namespace bsf
