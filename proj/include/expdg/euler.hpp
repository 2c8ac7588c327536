#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "expdg/mesh.hpp"
#include "expdg/split_operator.hpp"

namespace expdg {

/// Conservative 2d Euler state (rho, rho u, rho v, rho E).
using EulerState = Eigen::Vector4d;

struct EulerPrimitives {
  double rho, u, v, p, a, H;
};

struct VortexParams {
  double alpha = 2.0;
  double lambda = 0.05;
  double u_inf = 0.2, v_inf = 0.0;
  double rho_inf = 1.0, T_inf = 1.0, p_inf = 1.0;
  double xc = 5.0, yc = 0.0;
  // Periodic images of the translating vortex; <= 0 disables wrapping.
  double wrap_lx = 10.0, wrap_ly = 10.0;
};

enum class EulerFluxKind { roe, lax_friedrichs };

struct EulerConfig {
  double gamma = 1.4;
  EulerFluxKind flux = EulerFluxKind::roe;
  VortexParams vortex;
};

bool admissible(const EulerState& q, double gamma);
EulerPrimitives primitives(const EulerState& q, double gamma);

/// Columns are the x- and y-direction fluxes of (rho, rho u, rho v, rho E).
Eigen::Matrix<double, 4, 2> euler_flux(const EulerState& q, double gamma);

/// Jacobian of q -> F(q) . n at the given state and unit normal.
Eigen::Matrix4d flux_jacobian(const EulerState& q, const Eigen::Vector2d& n,
                              double gamma);

struct RoeAverage {
  double rho, u, v, H, a;
};
RoeAverage roe_average(const EulerState& q_minus, const EulerState& q_plus,
                       double gamma);

/// |A| = R |Lambda| R^-1 with the analytic eigenvector basis at a Roe state.
Eigen::Matrix4d abs_flux_jacobian(const RoeAverage& avg,
                                  const Eigen::Vector2d& n, double gamma);

/// Roe numerical normal flux <F(q)> . n + |A(q*_Roe)| (q^- - q^+) / 2.
EulerState roe_flux(const EulerState& q_minus, const EulerState& q_plus,
                    const Eigen::Vector2d& n, double gamma);

/// Lax-Friedrichs normal flux: the dissipation is max(|u.n| + a) over the two
/// traces times the state jump, applied to every component.
EulerState euler_lax_friedrichs_flux(const EulerState& q_minus,
                                     const EulerState& q_plus,
                                     const Eigen::Vector2d& n, double gamma);

/// Exact translating-vortex solution in conservative variables.
EulerState isentropic_vortex(double x, double y, double t,
                             const EulerConfig& cfg);

/// Semi-discrete DG operators for 2d Euler, frozen at a reference state:
/// L applies the frozen flux Jacobian with Roe dissipation evaluated from the
/// reference traces, N the full-flux remainder.
class EulerOperator {
 public:
  EulerOperator(const Mesh& mesh, const NodalBasis& basis, EulerConfig cfg,
                Eigen::VectorXd qtilde);

  Eigen::VectorXd apply_linear(const Eigen::VectorXd& q) const;
  Eigen::VectorXd apply_nonlinear(const Eigen::VectorXd& q) const;

  Eigen::Index dim() const { return dim_; }

 private:
  void rhs_faces(const Eigen::VectorXd& q, bool linear_part,
                 Eigen::VectorXd& r) const;
  void apply_inverse_mass(Eigen::VectorXd& r) const;

  const Mesh* mesh_;
  const NodalBasis* basis_;
  EulerConfig cfg_;
  Eigen::Index dim_ = 0;
  int np1_ = 0;  // nodes per axis
  int np_ = 0;   // nodes per element

  std::vector<Eigen::Matrix4d> jac_x_, jac_y_;  // per volume node
  struct FaceFrozen {
    Eigen::Matrix4d a_minus, a_plus;  // A(q~ traces, n^-)
    Eigen::Matrix4d a_abs;  // |A(q~*_Roe, n^-)|, or the LF wave speed times I
  };
  std::vector<FaceFrozen> face_frozen_;  // per face, per face node
};

SplitOperator euler_split_operator(const Mesh& mesh, const NodalBasis& basis,
                                   const EulerConfig& cfg,
                                   Eigen::VectorXd qtilde);

/// L + N built at q~ = q (reference-state independent Roe-flux DG RHS).
Eigen::VectorXd euler_full_rhs(const Mesh& mesh, const NodalBasis& basis,
                               const EulerConfig& cfg, const Eigen::VectorXd& q);

}  // namespace expdg
