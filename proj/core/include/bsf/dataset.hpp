#pragma once

#include <Eigen/Dense>
#include <string>
#include <variant>
#include <vector>

namespace bsf {

/// Symmetric positive definite matrix; the constructor enforces the invariant.
class SpdMatrix {
 public:
  static constexpr double kSymmetryTol = 1e-10;
  static constexpr double kMinEigenvalue = 1e-12;

  explicit SpdMatrix(Eigen::MatrixXd m);
  const Eigen::MatrixXd& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }

 private:
  Eigen::MatrixXd m_;
};

/// Symmetric matrix with zero row sums (a graph Laplacian).
class GraphLaplacian {
 public:
  static constexpr double kTol = 1e-10;

  explicit GraphLaplacian(Eigen::MatrixXd m);
  const Eigen::MatrixXd& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }

 private:
  Eigen::MatrixXd m_;
};

using Point = std::variant<Eigen::VectorXd, SpdMatrix, GraphLaplacian>;

enum class PayloadKind { euclidean, spd, graph_laplacian };

std::string to_string(PayloadKind kind);

/// Ordered list of points sharing one payload kind and one dimension.
class Dataset {
 public:
  static Dataset euclidean(std::vector<Eigen::VectorXd> points);
  static Dataset spd(std::vector<Eigen::MatrixXd> matrices);
  static Dataset graph_laplacians(std::vector<Eigen::MatrixXd> matrices);
  /// Points must already share kind and dimension.
  static Dataset from_points(std::vector<Point> points);

  PayloadKind kind() const { return kind_; }
  int size() const { return static_cast<int>(points_.size()); }
  /// p for euclidean payloads, m for m x m matrix payloads.
  int dim() const { return dim_; }
  const Point& operator[](int i) const { return points_[static_cast<std::size_t>(i)]; }
  const std::vector<Point>& points() const { return points_; }

 private:
  Dataset(PayloadKind kind, int dim, std::vector<Point> points)
      : kind_(kind), dim_(dim), points_(std::move(points)) {}

  PayloadKind kind_;
  int dim_;
  std::vector<Point> points_;
};

PayloadKind kind_of(const Point& p);

}  // namespace bsf
