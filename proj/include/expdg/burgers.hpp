#pragma once

#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "expdg/mesh.hpp"
#include "expdg/split_operator.hpp"

namespace expdg {

enum class FluxKind { lax_friedrichs, entropy };

struct BurgersConfig {
  double kappa = 0.03;
  FluxKind flux = FluxKind::lax_friedrichs;
  double sigma = 0.0;           // entropy-flux jump penalty
  bool sigma_adaptive = false;  // sigma = kappa/100 + h max|u^-+| per face
  bool over_integrate = false;  // Gauss rule exact for the cubic volume terms
  std::function<double(double)> source;  // steady forcing (manufactured runs)
};

/// Entropy interface flux (u^2/2)* = (1/3)(<u^2/2> + <u>^2) + (sigma/h)[u].
double entropy_flux(double u_minus, double u_plus, double jump, double sigma,
                    double h);

/// Lax-Friedrichs interface flux <u^2/2> + max(|u^-|,|u^+|)/2 [u].
double lax_friedrichs_flux(double u_minus, double u_plus, double jump);

/// Semi-discrete DG operators for 1d viscous Burgers, frozen at a reference
/// state: L carries the linearized flux u~ u - kappa u_x, N the remainder.
class BurgersOperator {
 public:
  BurgersOperator(const Mesh& mesh, const NodalBasis& basis, BurgersConfig cfg,
                  Eigen::VectorXd utilde);

  Eigen::VectorXd apply_linear(const Eigen::VectorXd& u) const;
  Eigen::VectorXd apply_nonlinear(const Eigen::VectorXd& u) const;

  /// L + N evaluated directly: the reference-state terms cancel algebraically,
  /// so this needs no frozen data and serves the RK baselines cheaply.
  Eigen::VectorXd full_rhs(const Eigen::VectorXd& u) const;

  /// Auxiliary gradient q from the local central-flux system.
  Eigen::VectorXd gradient(const Eigen::VectorXd& u) const;

  /// Broken L2 inner product under this operator's volume quadrature.
  double inner_product(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;

  /// sum over faces of (sigma/h) [u]^2 with this operator's penalty values.
  double penalty_seminorm_sq(const Eigen::VectorXd& u) const;

  /// ||u_x||^2 + sum over faces (1/h)[u]^2.
  double dg_norm_sq(const Eigen::VectorXd& u) const;

  Eigen::Index dim() const { return dim_; }
  const Mesh& mesh() const { return *mesh_; }

 private:
  struct FaceFrozen {
    double ut_minus = 0, ut_plus = 0;  // reference-state traces
    double diss = 0;                   // max(|u~^-|, |u~^+|) / 2
    double sigma_over_h = 0;
    double inv_h = 0;
  };

  double face_linear_flux(const FaceFrozen& fd, double um, double up,
                          double jump) const;
  double face_nonlinear_flux(const FaceFrozen& fd, double um, double up,
                             double jump) const;
  void trace_values(const Eigen::VectorXd& u, int face_index, double& um,
                    double& up) const;

  const Mesh* mesh_;
  const NodalBasis* basis_;
  BurgersConfig cfg_;
  Eigen::VectorXd utilde_;
  Eigen::Index dim_ = 0;
  int np_ = 0;

  Eigen::MatrixXd interp_;       // quad points x nodes
  Eigen::MatrixXd dinterp_;      // derivative at quad points
  Eigen::VectorXd wq_;
  Eigen::MatrixXd grad_vol_;     // interp^T W dinterp, nodal -> load vector
  Eigen::MatrixXd lift_vol_;     // dinterp^T W, quad values -> load vector
  Eigen::LDLT<Eigen::MatrixXd> mass_;
  Eigen::MatrixXd utilde_q_;     // reference state at quad points, per element
  std::vector<FaceFrozen> faces_;
  Eigen::VectorXd source_weak_;  // (s, l_j) per element, empty when no source
};

SplitOperator burgers_split_operator(const Mesh& mesh, const NodalBasis& basis,
                                     const BurgersConfig& cfg,
                                     Eigen::VectorXd utilde);

/// L + N built at u~ = u: the reference-state independent full right-hand side.
Eigen::VectorXd burgers_full_rhs(const Mesh& mesh, const NodalBasis& basis,
                                 const BurgersConfig& cfg,
                                 const Eigen::VectorXd& u);

Eigen::VectorXd burgers_gradient(const Mesh& mesh, const NodalBasis& basis,
                                 const BurgersConfig& cfg,
                                 const Eigen::VectorXd& u);

}  // namespace expdg
