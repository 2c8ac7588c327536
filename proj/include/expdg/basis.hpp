#pragma once

#include <Eigen/Dense>

namespace expdg {

/// Legendre-Gauss-Lobatto nodal basis on the reference interval [-1,1]:
/// nodes, quadrature weights and the exact Lagrange differentiation matrix.
struct NodalBasis {
  int order = 0;                 // polynomial degree k
  Eigen::VectorXd nodes;         // k+1 LGL nodes, ascending, endpoints included
  Eigen::VectorXd weights;       // LGL quadrature weights, sum = 2
  Eigen::MatrixXd diff_matrix;   // D(i,j) = dl_j/dx at node i

  int num_nodes() const { return order + 1; }
};

/// Gauss-Legendre rule on [-1,1].
struct QuadratureRule {
  Eigen::VectorXd points;
  Eigen::VectorXd weights;
  int exact_degree = 0;  // highest polynomial degree integrated exactly
};

NodalBasis lgl_basis(int order);
QuadratureRule gauss_quadrature(int num_points);

/// Quadrature rule sitting on the LGL nodes themselves (collocation).
QuadratureRule lgl_quadrature(const NodalBasis& basis);

/// Values of the k+1 Lagrange interpolants of `basis` at point x in [-1,1].
Eigen::VectorXd lagrange_values(const NodalBasis& basis, double x);

/// Interpolation matrix from basis nodes to an arbitrary point set:
/// row q holds the Lagrange values at points[q].
Eigen::MatrixXd interpolation_matrix(const NodalBasis& basis,
                                     const Eigen::VectorXd& points);

}  // namespace expdg
