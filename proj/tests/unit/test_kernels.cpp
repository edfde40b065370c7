#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "bsf/common.hpp"
#include "bsf/dataset.hpp"
#include "bsf/kernels.hpp"

using namespace bsf;

namespace {

Point vec(std::initializer_list<double> v) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double a : v) x[i++] = a;
  return x;
}

Eigen::MatrixXd random_spd(Rng& rng, int m) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) a(i, j) = g(rng);
  return a * a.transpose() + 0.5 * Eigen::MatrixXd::Identity(m, m);
}

// Independent oracle: eigenvalues of A^{-1} B from a general eigensolver.
double geodesic_oracle(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(a.inverse() * b);
  double s = 0.0;
  for (int i = 0; i < a.rows(); ++i) s += std::pow(std::log(es.eigenvalues()[i].real()), 2);
  return std::sqrt(s);
}

Eigen::MatrixXd graph_laplacian(const std::vector<std::pair<int, int>>& edges, int m) {
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(m, m);
  for (auto [a, b] : edges) {
    l(a, b) -= 1;
    l(b, a) -= 1;
    l(a, a) += 1;
    l(b, b) += 1;
  }
  return l;
}

}  // namespace

TEST(EuclideanKernel, StandardNormalAtZero) {
  const auto k = KernelSpec::euclidean(1.0);
  EXPECT_NEAR(log_gaussian_kernel(vec({0.3}), vec({0.3}), k), -0.5 * std::log(2 * M_PI), 1e-15);
}

TEST(EuclideanKernel, HandValue) {
  const auto k = KernelSpec::euclidean(2.0);
  // d^2 = 8, sigma = 2: exponent -1; zeta = (2 pi)^{-1} 2^{-2}
  const double log_zeta = -std::log(2 * M_PI) - 2 * std::log(2.0);
  EXPECT_NEAR(log_gaussian_kernel(vec({0, 0}), vec({2, 2}), k), log_zeta - 1.0, 1e-14);
  EXPECT_NEAR(k.log_normalizer(2), log_zeta, 1e-15);
}

TEST(EuclideanKernel, SymmetricAndMonotone) {
  const auto k = KernelSpec::euclidean(0.7);
  const Point a = vec({1, 2, 3}), b = vec({-1, 0.5, 2}), c = vec({4, 4, 4});
  EXPECT_EQ(log_gaussian_kernel(a, b, k), log_gaussian_kernel(b, a, k));
  EXPECT_GT(log_gaussian_kernel(a, b, k), log_gaussian_kernel(a, c, k));
}

TEST(EuclideanKernel, NormalizerIntegratesToOne) {
  const double sigma = 0.8;
  const auto k = KernelSpec::euclidean(sigma);
  // trapezoid quadrature over +-12 sigma
  const int steps = 200000;
  const double lo = -12 * sigma, h = 24 * sigma / steps;
  double s = 0.0;
  for (int i = 0; i <= steps; ++i) {
    const double x = lo + i * h;
    const double f = std::exp(log_gaussian_kernel(vec({x}), vec({0.0}), k));
    s += (i == 0 || i == steps) ? 0.5 * f : f;
  }
  EXPECT_NEAR(s * h, 1.0, 1e-6);
}

TEST(EuclideanKernel, HalvingSigmaQuadruplesExponent) {
  const Point a = vec({0.1, -0.4}), b = vec({1.3, 0.9});
  const auto k1 = KernelSpec::euclidean(1.5);
  const auto k2 = KernelSpec::euclidean(0.75);
  const double e1 = log_gaussian_kernel(a, b, k1) - k1.log_normalizer(2);
  const double e2 = log_gaussian_kernel(a, b, k2) - k2.log_normalizer(2);
  EXPECT_NEAR(e2, 4 * e1, 1e-12);
}

TEST(EuclideanKernel, DimensionMismatchThrows) {
  const auto k = KernelSpec::euclidean(1.0);
  EXPECT_THROW(log_gaussian_kernel(vec({1}), vec({1, 2}), k), InvalidArgument);
}

TEST(Kernel, InvalidSpecThrows) {
  EXPECT_THROW(KernelSpec::euclidean(0.0).validate(), InvalidArgument);
  EXPECT_THROW(KernelSpec::euclidean(-1.0).validate(), InvalidArgument);
}

TEST(RootKernel, Flat) {
  EXPECT_EQ(log_root_kernel(vec({5}), RootKernel{1.0}), 0.0);
  EXPECT_DOUBLE_EQ(log_root_kernel(vec({5}), RootKernel{0.5}), std::log(0.5));
}

TEST(SpdDistance, ClosedForms) {
  const Eigen::MatrixXd i2 = Eigen::MatrixXd::Identity(2, 2);
  const Eigen::MatrixXd d = Eigen::Vector2d(std::exp(2.0), std::exp(2.0)).asDiagonal();
  EXPECT_NEAR(spd_geodesic_distance(i2, i2), 0.0, 1e-14);
  EXPECT_NEAR(spd_geodesic_distance(i2, d), 2 * std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(spd_geodesic_distance_squared(i2, d), 8.0, 1e-11);
}

TEST(SpdDistance, MatchesGeneralEigenOracleAndIsSymmetric) {
  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    const auto a = random_spd(rng, 3), b = random_spd(rng, 3);
    EXPECT_NEAR(spd_geodesic_distance(a, b), geodesic_oracle(a, b), 1e-9);
    EXPECT_NEAR(spd_geodesic_distance(a, b), spd_geodesic_distance(b, a), 1e-10);
  }
}

TEST(SpdDistance, AffineInvariance) {
  Rng rng(11);
  std::normal_distribution<double> g;
  for (int t = 0; t < 100; ++t) {
    const auto p1 = random_spd(rng, 3), p2 = random_spd(rng, 3);
    Eigen::MatrixXd a(3, 3);
    for (int i = 0; i < 9; ++i) a(i / 3, i % 3) = g(rng);
    a += 2.0 * Eigen::MatrixXd::Identity(3, 3);
    if (std::abs(a.determinant()) < 1e-2) continue;
    EXPECT_NEAR(spd_geodesic_distance(Eigen::MatrixXd(a * p1 * a.transpose()), Eigen::MatrixXd(a * p2 * a.transpose())),
                spd_geodesic_distance(p1, p2), 1e-8);
  }
}

TEST(SpdMatrixPayload, RejectsNonSpd) {
  Eigen::MatrixXd asym(2, 2);
  asym << 1, 0.5, 0.4, 1;
  EXPECT_THROW(SpdMatrix{asym}, InvalidArgument);
  Eigen::MatrixXd indef(2, 2);
  indef << 1, 2, 2, 1;
  EXPECT_THROW(SpdMatrix{indef}, InvalidArgument);
}

TEST(GraphDistance, PathVersusTriangle) {
  const double eta = 0.1;
  const Eigen::MatrixXd path = graph_laplacian({{0, 1}, {1, 2}}, 3);
  const Eigen::MatrixXd tri = graph_laplacian({{0, 1}, {1, 2}, {0, 2}}, 3);
  const Point l1 = GraphLaplacian(path), l2 = GraphLaplacian(tri);
  const Eigen::MatrixXd i3 = Eigen::MatrixXd::Identity(3, 3);
  EXPECT_NEAR(graph_distance(l1, l2, eta), geodesic_oracle(path + eta * i3, tri + eta * i3), 1e-9);
  EXPECT_NEAR(graph_distance(l1, l1, eta), 0.0, 1e-12);
}

TEST(GraphDistance, FrobeniusMode) {
  const Point l1 = GraphLaplacian(graph_laplacian({{0, 1}}, 2));
  const Point l2 = GraphLaplacian(Eigen::MatrixXd::Zero(2, 2));
  EXPECT_NEAR(graph_distance(l1, l2, 0.1, GraphMetric::frobenius), 2.0, 1e-15);
}

TEST(MatrixFunctions, LogExpRoundTrip) {
  Rng rng(5);
  const auto p = random_spd(rng, 4);
  EXPECT_LT((sym_exp(spd_log(p)) - p).norm(), 1e-10 * p.norm());
  const auto s = spd_sqrt(p);
  EXPECT_LT((s * s - p).norm(), 1e-10 * p.norm());
  EXPECT_LT((spd_inv_sqrt(p) * s - Eigen::MatrixXd::Identity(4, 4)).norm(), 1e-10);
}

TEST(FrechetMean, CommutingMatricesGiveLogEuclideanMean) {
  // diagonal matrices commute: mean is exp of the averaged logs
  std::vector<Eigen::MatrixXd> pts;
  Eigen::Vector2d acc = Eigen::Vector2d::Zero();
  for (double t : {-1.0, 0.5, 2.0}) {
    const Eigen::Vector2d logs(t, -2 * t + 0.3);
    acc += logs;
    pts.push_back(logs.array().exp().matrix().asDiagonal());
  }
  const Eigen::MatrixXd expect = (acc / 3).array().exp().matrix().asDiagonal();
  EXPECT_LT((frechet_mean(pts) - expect).norm(), 1e-10);
}
