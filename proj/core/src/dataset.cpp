#include "bsf/dataset.hpp"

#include <cstdio>

#include "bsf/common.hpp"

namespace bsf {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

void require_finite_square(const Eigen::MatrixXd& m, const char* what) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw InvalidArgument(std::string(what) + " payload must be a non-empty square matrix");
  }
  if (!m.allFinite()) throw InvalidArgument(std::string(what) + " payload has non-finite entries");
}

bool is_symmetric(const Eigen::MatrixXd& m, double tol) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

}  // namespace

SpdMatrix::SpdMatrix(Eigen::MatrixXd m) : m_(std::move(m)) {
  require_finite_square(m_, "SPD");
  if (!is_symmetric(m_, kSymmetryTol)) throw InvalidArgument("SPD payload is not symmetric");
  m_ = 0.5 * (m_ + m_.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m_, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() <= kMinEigenvalue) {
    throw InvalidArgument("SPD payload has an eigenvalue <= 1e-12");
  }
}

GraphLaplacian::GraphLaplacian(Eigen::MatrixXd m) : m_(std::move(m)) {
  require_finite_square(m_, "graph Laplacian");
  if (!is_symmetric(m_, kTol)) throw InvalidArgument("graph Laplacian payload is not symmetric");
  const double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
  if (m_.rowwise().sum().cwiseAbs().maxCoeff() > kTol * scale) {
    throw InvalidArgument("graph Laplacian payload has non-zero row sums");
  }
  m_ = 0.5 * (m_ + m_.transpose());
}

std::string to_string(PayloadKind kind) {
  switch (kind) {
    case PayloadKind::euclidean: return "euclidean";
    case PayloadKind::spd: return "spd";
    case PayloadKind::graph_laplacian: return "laplacian";
  }
  return "unknown";
}

PayloadKind kind_of(const Point& p) {
  return static_cast<PayloadKind>(p.index());
}

Dataset Dataset::euclidean(std::vector<Eigen::VectorXd> points) {
  std::vector<Point> pts;
  pts.reserve(points.size());
  for (auto& v : points) pts.emplace_back(std::move(v));
  return from_points(std::move(pts));
}

Dataset Dataset::spd(std::vector<Eigen::MatrixXd> matrices) {
  std::vector<Point> pts;
  pts.reserve(matrices.size());
  for (auto& m : matrices) pts.emplace_back(SpdMatrix(std::move(m)));
  return from_points(std::move(pts));
}

Dataset Dataset::graph_laplacians(std::vector<Eigen::MatrixXd> matrices) {
  std::vector<Point> pts;
  pts.reserve(matrices.size());
  for (auto& m : matrices) pts.emplace_back(GraphLaplacian(std::move(m)));
  return from_points(std::move(pts));
}

Dataset Dataset::from_points(std::vector<Point> points) {
  if (points.empty()) throw InvalidArgument("dataset must contain at least one point");
  const PayloadKind kind = kind_of(points.front());
  auto dim_of = [](const Point& p) {
    return std::visit(
        [](const auto& x) -> int {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Eigen::VectorXd>) {
            return static_cast<int>(x.size());
          } else {
            return x.dim();
          }
        },
        p);
  };
  const int dim = dim_of(points.front());
  if (dim == 0) throw InvalidArgument("points must have positive dimension");
  for (const auto& p : points) {
    if (kind_of(p) != kind) throw InvalidArgument("dataset mixes payload kinds");
    if (dim_of(p) != dim) throw InvalidArgument("dataset points have mismatched dimensions");
    if (const auto* v = std::get_if<Eigen::VectorXd>(&p); v && !v->allFinite()) {
      throw InvalidArgument("euclidean payload has non-finite entries");
    }
  }
  return Dataset(kind, dim, std::move(points));
}

}  // namespace bsf
