#include "bsf/kernels.hpp"

#include <numbers>

#include "bsf/common.hpp"

namespace bsf {

namespace {

constexpr double kEigFloor = 1e-12;

template <class F>
Eigen::MatrixXd spectral_map(const Eigen::MatrixXd& s, F f) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
  if (eig.info() != Eigen::Success) throw NumericalError("symmetric eigendecomposition failed");
  Eigen::VectorXd d = eig.eigenvalues().unaryExpr(f);
  return eig.eigenvectors() * d.asDiagonal() * eig.eigenvectors().transpose();
}

const Eigen::MatrixXd& matrix_payload(const Point& p) {
  if (const auto* s = std::get_if<SpdMatrix>(&p)) return s->matrix();
  if (const auto* g = std::get_if<GraphLaplacian>(&p)) return g->matrix();
  throw InvalidArgument("expected a matrix payload");
}

}  // namespace

KernelSpec KernelSpec::euclidean(double sigma) {
  KernelSpec k;
  k.family = KernelFamily::euclidean_gaussian;
  k.sigma = sigma;
  k.validate();
  return k;
}

KernelSpec KernelSpec::spd(double sigma, double log_zeta) {
  KernelSpec k;
  k.family = KernelFamily::riemannian_gaussian_spd;
  k.sigma = sigma;
  k.log_zeta = log_zeta;
  k.validate();
  return k;
}

KernelSpec KernelSpec::graph(double sigma, double eta, GraphMetric metric, double log_zeta) {
  KernelSpec k;
  k.family = KernelFamily::graph_laplacian_gaussian;
  k.sigma = sigma;
  k.eta = eta;
  k.graph_metric = metric;
  k.log_zeta = log_zeta;
  k.validate();
  return k;
}

void KernelSpec::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidArgument("kernel sigma must be positive");
  if (!std::isfinite(log_zeta)) throw InvalidArgument("kernel log_zeta must be finite");
  if (family == KernelFamily::graph_laplacian_gaussian && !(eta > 0.0)) {
    throw InvalidArgument("graph kernel eta must be positive");
  }
}

double KernelSpec::log_normalizer(int p) const {
  if (family == KernelFamily::euclidean_gaussian) {
    return -0.5 * p * std::log(2.0 * std::numbers::pi) - p * std::log(sigma);
  }
  return log_zeta;
}

PayloadKind KernelSpec::payload_kind() const {
  switch (family) {
    case KernelFamily::euclidean_gaussian: return PayloadKind::euclidean;
    case KernelFamily::riemannian_gaussian_spd: return PayloadKind::spd;
    case KernelFamily::graph_laplacian_gaussian: return PayloadKind::graph_laplacian;
  }
  return PayloadKind::euclidean;
}

Eigen::MatrixXd spd_sqrt(const Eigen::MatrixXd& p) {
  return spectral_map(p, [](double x) { return std::sqrt(std::max(x, kEigFloor)); });
}

Eigen::MatrixXd spd_inv_sqrt(const Eigen::MatrixXd& p) {
  return spectral_map(p, [](double x) { return 1.0 / std::sqrt(std::max(x, kEigFloor)); });
}

Eigen::MatrixXd spd_log(const Eigen::MatrixXd& p) {
  return spectral_map(p, [](double x) { return std::log(std::max(x, kEigFloor)); });
}

Eigen::MatrixXd sym_exp(const Eigen::MatrixXd& s) {
  return spectral_map(s, [](double x) { return std::exp(x); });
}

double spd_geodesic_distance_squared(const Eigen::MatrixXd& p1, const Eigen::MatrixXd& p2) {
  if (p1.rows() != p2.rows() || p1.cols() != p2.cols()) {
    throw InvalidArgument("SPD distance between matrices of different sizes");
  }
  // Eigenvalues of P1^{-1/2} P2 P1^{-1/2} are those of the pencil (P2, P1).
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(p2, p1, Eigen::EigenvaluesOnly);
  if (ges.info() != Eigen::Success) throw InvalidArgument("SPD distance requires SPD inputs");
  double acc = 0.0;
  for (double ev : ges.eigenvalues()) {
    const double l = std::log(std::max(ev, kEigFloor));
    acc += l * l;
  }
  return acc;
}

double spd_geodesic_distance(const Eigen::MatrixXd& p1, const Eigen::MatrixXd& p2) {
  return std::sqrt(spd_geodesic_distance_squared(p1, p2));
}

double spd_geodesic_distance(const Point& p1, const Point& p2) {
  const auto* a = std::get_if<SpdMatrix>(&p1);
  const auto* b = std::get_if<SpdMatrix>(&p2);
  if (!a || !b) throw InvalidArgument("SPD distance requires SPD payloads");
  return spd_geodesic_distance(a->matrix(), b->matrix());
}

namespace {

double graph_distance_squared(const Eigen::MatrixXd& l1, const Eigen::MatrixXd& l2, double eta,
                              GraphMetric metric) {
  if (l1.rows() != l2.rows()) throw InvalidArgument("graph distance between different sizes");
  if (metric == GraphMetric::frobenius) return (l1 - l2).squaredNorm();
  if (!(eta > 0.0)) throw InvalidArgument("graph distance requires eta > 0");
  const auto shift = eta * Eigen::MatrixXd::Identity(l1.rows(), l1.cols());
  return spd_geodesic_distance_squared(l1 + shift, l2 + shift);
}

}  // namespace

double graph_distance(const Point& l1, const Point& l2, double eta, GraphMetric metric) {
  const auto* a = std::get_if<GraphLaplacian>(&l1);
  const auto* b = std::get_if<GraphLaplacian>(&l2);
  if (!a || !b) throw InvalidArgument("graph distance requires Laplacian payloads");
  return std::sqrt(graph_distance_squared(a->matrix(), b->matrix(), eta, metric));
}

double squared_distance(const Point& a, const Point& b, const KernelSpec& spec) {
  if (kind_of(a) != spec.payload_kind() || kind_of(b) != spec.payload_kind()) {
    throw InvalidArgument("payload does not match kernel family");
  }
  switch (spec.family) {
    case KernelFamily::euclidean_gaussian: {
      const auto& x = std::get<Eigen::VectorXd>(a);
      const auto& y = std::get<Eigen::VectorXd>(b);
      if (x.size() != y.size()) throw InvalidArgument("euclidean points of different dimension");
      if (!x.allFinite() || !y.allFinite()) throw InvalidArgument("non-finite payload");
      return (x - y).squaredNorm();
    }
    case KernelFamily::riemannian_gaussian_spd:
      return spd_geodesic_distance_squared(matrix_payload(a), matrix_payload(b));
    case KernelFamily::graph_laplacian_gaussian:
      return graph_distance_squared(matrix_payload(a), matrix_payload(b), spec.eta,
                                    spec.graph_metric);
  }
  return 0.0;
}

double log_gaussian_kernel(const Point& a, const Point& b, const KernelSpec& spec) {
  const int p = kind_of(a) == PayloadKind::euclidean
                    ? static_cast<int>(std::get<Eigen::VectorXd>(a).size())
                    : 0;
  const double d2 = squared_distance(a, b, spec);
  return spec.log_normalizer(p) - d2 / (2.0 * spec.sigma * spec.sigma);
}

double log_root_kernel(const Point&, const RootKernel& root) {
  if (!(root.delta > 0.0)) throw InvalidArgument("root level delta must be positive");
  return std::log(root.delta);
}

Eigen::MatrixXd frechet_mean(const std::vector<Eigen::MatrixXd>& points, int max_iters,
                             double tol) {
  if (points.empty()) throw InvalidArgument("Frechet mean of an empty set");
  Eigen::MatrixXd mean = points.front();
  for (int it = 0; it < max_iters; ++it) {
    const Eigen::MatrixXd half = spd_sqrt(mean);
    const Eigen::MatrixXd inv_half = spd_inv_sqrt(mean);
    Eigen::MatrixXd step = Eigen::MatrixXd::Zero(mean.rows(), mean.cols());
    for (const auto& p : points) {
      Eigen::MatrixXd w = inv_half * p * inv_half;
      step += spd_log(0.5 * (w + w.transpose()));
    }
    step /= static_cast<double>(points.size());
    mean = half * sym_exp(step) * half;
    mean = 0.5 * (mean + mean.transpose());
    if (step.norm() < tol) break;
  }
  return mean;
}

}  // namespace bsf
