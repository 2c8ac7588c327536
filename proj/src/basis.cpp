#include "expdg/basis.hpp"

#include <cmath>
#include <stdexcept>

namespace expdg {

namespace {

// Legendre polynomial P_k and derivative at x via the three-term recurrence.
std::pair<double, double> legendre(int k, double x) {
  double p0 = 1.0, p1 = x;
  if (k == 0) return {p0, 0.0};
  double dp0 = 0.0, dp1 = 1.0;
  for (int n = 1; n < k; ++n) {
    const double p2 = ((2 * n + 1) * x * p1 - n * p0) / (n + 1);
    const double dp2 = dp0 + (2 * n + 1) * p1;
    p0 = p1; p1 = p2;
    dp0 = dp1; dp1 = dp2;
  }
  return {p1, dp1};
}

Eigen::VectorXd barycentric_weights(const Eigen::VectorXd& nodes) {
  const int n = static_cast<int>(nodes.size());
  Eigen::VectorXd w = Eigen::VectorXd::Ones(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (j != i) w[i] /= (nodes[i] - nodes[j]);
  return w;
}

}  // namespace

NodalBasis lgl_basis(int order) {
  if (order < 1 || order > 20)
    throw std::invalid_argument("lgl_basis: order must be in [1, 20]");
  const int n = order + 1;
  NodalBasis basis;
  basis.order = order;
  basis.nodes.resize(n);
  basis.weights.resize(n);

  basis.nodes[0] = -1.0;
  basis.nodes[order] = 1.0;
  // Interior LGL nodes are the roots of P'_k; Newton from Chebyshev guesses.
  for (int i = 1; i < order; ++i) {
    double x = -std::cos(M_PI * i / order);
    for (int it = 0; it < 100; ++it) {
      // P'_k and P''_k from the Legendre ODE: (1-x^2)P'' = 2xP' - k(k+1)P.
      auto [p, dp] = legendre(order, x);
      const double d2p = (2.0 * x * dp - order * (order + 1) * p) / (1.0 - x * x);
      const double dx = dp / d2p;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    basis.nodes[i] = x;
  }
  // Enforce exact symmetry about 0.
  for (int i = 0; i < n / 2; ++i) {
    const double s = 0.5 * (basis.nodes[n - 1 - i] - basis.nodes[i]);
    basis.nodes[i] = -s;
    basis.nodes[n - 1 - i] = s;
  }
  if (n % 2 == 1) basis.nodes[n / 2] = 0.0;

  for (int i = 0; i < n; ++i) {
    auto [p, dp] = legendre(order, basis.nodes[i]);
    basis.weights[i] = 2.0 / (order * (order + 1) * p * p);
  }

  // Differentiation via barycentric weights: exact for degree-k polynomials.
  const Eigen::VectorXd bw = barycentric_weights(basis.nodes);
  basis.diff_matrix.setZero(n, n);
  for (int i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      basis.diff_matrix(i, j) = (bw[j] / bw[i]) / (basis.nodes[i] - basis.nodes[j]);
      row_sum += basis.diff_matrix(i, j);
    }
    basis.diff_matrix(i, i) = -row_sum;  // derivative of constants vanishes
  }
  return basis;
}

QuadratureRule gauss_quadrature(int num_points) {
  if (num_points < 1)
    throw std::invalid_argument("gauss_quadrature: need at least one point");
  QuadratureRule rule;
  rule.points.resize(num_points);
  rule.weights.resize(num_points);
  rule.exact_degree = 2 * num_points - 1;
  // Newton on P_n with Chebyshev initial guesses.
  for (int i = 0; i < num_points; ++i) {
    double x = -std::cos(M_PI * (i + 0.75) / (num_points + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      auto [p, d] = legendre(num_points, x);
      dp = d;
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.points[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  // Symmetrize.
  const int n = num_points;
  for (int i = 0; i < n / 2; ++i) {
    const double s = 0.5 * (rule.points[n - 1 - i] - rule.points[i]);
    rule.points[i] = -s;
    rule.points[n - 1 - i] = s;
    const double w = 0.5 * (rule.weights[i] + rule.weights[n - 1 - i]);
    rule.weights[i] = rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.points[n / 2] = 0.0;
  return rule;
}

QuadratureRule lgl_quadrature(const NodalBasis& basis) {
  QuadratureRule rule;
  rule.points = basis.nodes;
  rule.weights = basis.weights;
  rule.exact_degree = 2 * basis.order - 1;
  return rule;
}

Eigen::VectorXd lagrange_values(const NodalBasis& basis, double x) {
  const int n = basis.num_nodes();
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  // Exact hit on a node short-circuits the barycentric form.
  for (int i = 0; i < n; ++i) {
    if (x == basis.nodes[i]) {
      v[i] = 1.0;
      return v;
    }
  }
  const Eigen::VectorXd bw = barycentric_weights(basis.nodes);
  double denom = 0.0;
  for (int i = 0; i < n; ++i) {
    v[i] = bw[i] / (x - basis.nodes[i]);
    denom += v[i];
  }
  v /= denom;
  return v;
}

Eigen::MatrixXd interpolation_matrix(const NodalBasis& basis,
                                     const Eigen::VectorXd& points) {
  Eigen::MatrixXd m(points.size(), basis.num_nodes());
  for (Eigen::Index q = 0; q < points.size(); ++q)
    m.row(q) = lagrange_values(basis, points[q]).transpose();
  return m;
}

}  // namespace expdg
