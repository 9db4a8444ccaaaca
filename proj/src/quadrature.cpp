#include "sklab/quadrature.hpp"

#include <Eigen/Dense>

namespace sklab {

QuadratureRule build_rule(int order) {
  if (order < 2 || order > 512)
    throw std::invalid_argument("build_rule: order must be in [2, 512], got " +
                                std::to_string(order));

  // Jacobi matrix of the monic Hermite recurrence He_{n+1} = x He_n - n He_{n-1}:
  // zero diagonal, off-diagonal sqrt(k). Eigenvalues are the probabilist nodes,
  // weights are squared first eigenvector components.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    const double b = std::sqrt(static_cast<double>(k));
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("build_rule: eigensolver failed");

  QuadratureRule rule;
  rule.order = order;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  for (int i = 0; i < order; ++i) {
    rule.nodes[i] = eig.eigenvalues()(i);
    const double v0 = eig.eigenvectors()(0, i);
    rule.weights[i] = v0 * v0;
  }

  // Symmetrize node pairs and weights; the measure is even.
  for (int i = 0; i < order / 2; ++i) {
    const int j = order - 1 - i;
    const double s = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    rule.nodes[i] = -s;
    rule.nodes[j] = s;
    const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.weights[i] = w;
    rule.weights[j] = w;
  }
  if (order % 2 == 1) rule.nodes[order / 2] = 0.0;

  double wsum = 0.0;
  for (double w : rule.weights) wsum += w;
  for (double& w : rule.weights) w /= wsum;
  return rule;
}

const QuadratureRule& default_rule() {
  static const QuadratureRule rule = build_rule(64);
  return rule;
}

const QuadratureRule& dense_rule() {
  static const QuadratureRule rule = build_rule(384);
  return rule;
}

LegendreRule build_legendre(int order) {
  if (order < 2 || order > 512)
    throw std::invalid_argument("build_legendre: order out of range");
  LegendreRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Newton on P_n from the Chebyshev-like initial guess.
    double x = std::cos(M_PI * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[order - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weights[i] = w;
    rule.weights[order - 1 - i] = w;
  }
  return rule;
}

}  // namespace sklab
