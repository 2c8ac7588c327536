#include "expdg/burgers.hpp"

#include <cmath>
#include <stdexcept>

namespace expdg {

double entropy_flux(double u_minus, double u_plus, double jump, double sigma,
                    double h) {
  const double avg_half_sq = 0.25 * (u_minus * u_minus + u_plus * u_plus);
  const double avg = 0.5 * (u_minus + u_plus);
  return (avg_half_sq + avg * avg) / 3.0 + (sigma / h) * jump;
}

double lax_friedrichs_flux(double u_minus, double u_plus, double jump) {
  const double avg_half_sq = 0.25 * (u_minus * u_minus + u_plus * u_plus);
  return avg_half_sq + 0.5 * std::max(std::abs(u_minus), std::abs(u_plus)) * jump;
}

BurgersOperator::BurgersOperator(const Mesh& mesh, const NodalBasis& basis,
                                 BurgersConfig cfg, Eigen::VectorXd utilde)
    : mesh_(&mesh), basis_(&basis), cfg_(std::move(cfg)),
      utilde_(std::move(utilde)) {
  if (mesh.dim != 1)
    throw std::invalid_argument("BurgersOperator: 1d meshes only");
  if (!(cfg_.kappa > 0.0))
    throw std::invalid_argument("BurgersOperator: kappa must be positive");
  if (cfg_.sigma < 0.0)
    throw std::invalid_argument("BurgersOperator: sigma must be nonnegative");
  np_ = basis.num_nodes();
  dim_ = static_cast<Eigen::Index>(mesh.num_elements()) * np_;
  if (utilde_.size() != dim_)
    throw std::invalid_argument("BurgersOperator: reference state size mismatch");
  if (!utilde_.allFinite())
    throw std::invalid_argument("BurgersOperator: reference state not finite");

  const int k = basis.order;
  QuadratureRule quad;
  if (cfg_.over_integrate) {
    // Exact for the cubic volume integrands of degree 3k - 1.
    quad = gauss_quadrature((3 * k + 2 + 1) / 2);
    interp_ = interpolation_matrix(basis, quad.points);
  } else {
    quad = lgl_quadrature(basis);
    interp_ = Eigen::MatrixXd::Identity(np_, np_);
  }
  wq_ = quad.weights;
  dinterp_ = interp_ * basis.diff_matrix;
  grad_vol_ = interp_.transpose() * wq_.asDiagonal() * dinterp_;
  lift_vol_ = dinterp_.transpose() * wq_.asDiagonal();
  mass_.compute(interp_.transpose() * wq_.asDiagonal() * interp_);

  const int ne = mesh.num_elements();
  utilde_q_.resize(wq_.size(), ne);
  for (int e = 0; e < ne; ++e)
    utilde_q_.col(e) = interp_ * utilde_.segment(e * np_, np_);

  faces_.resize(mesh.faces.size());
  for (size_t f = 0; f < mesh.faces.size(); ++f) {
    const Face& face = mesh.faces[f];
    FaceFrozen& fd = faces_[f];
    const int own_node = face.owner_side == 0 ? 0 : k;
    fd.ut_minus = utilde_[face.owner * np_ + own_node];
    if (face.neighbor >= 0) {
      const int nb_node = face.neighbor_side == 0 ? 0 : k;
      fd.ut_plus = utilde_[face.neighbor * np_ + nb_node];
    } else {
      fd.ut_plus = 0.0;  // dirichlet ghost
    }
    fd.diss = 0.5 * std::max(std::abs(fd.ut_minus), std::abs(fd.ut_plus));
    fd.inv_h = 1.0 / face.h_owner;
    const double sigma =
        cfg_.sigma_adaptive
            ? cfg_.kappa / 100.0 +
                  face.h_owner * std::max(std::abs(fd.ut_minus), std::abs(fd.ut_plus))
            : cfg_.sigma;
    fd.sigma_over_h = sigma * fd.inv_h;
  }

  if (cfg_.source) {
    source_weak_.resize(dim_);
    Eigen::VectorXd sq(wq_.size());
    for (int e = 0; e < ne; ++e) {
      const Element& el = mesh.elements[e];
      for (Eigen::Index q = 0; q < wq_.size(); ++q) {
        const double x = el.x0 + 0.5 * (quad.points[q] + 1.0) * el.hx;
        sq[q] = cfg_.source(x);
      }
      source_weak_.segment(e * np_, np_) =
          0.5 * el.hx * interp_.transpose() * (wq_.asDiagonal() * sq);
    }
  }
}

void BurgersOperator::trace_values(const Eigen::VectorXd& u, int face_index,
                                   double& um, double& up) const {
  const Face& face = mesh_->faces[face_index];
  const int k = basis_->order;
  um = u[face.owner * np_ + (face.owner_side == 0 ? 0 : k)];
  up = face.neighbor >= 0
           ? u[face.neighbor * np_ + (face.neighbor_side == 0 ? 0 : k)]
           : 0.0;
}

Eigen::VectorXd BurgersOperator::gradient(const Eigen::VectorXd& u) const {
  const int ne = mesh_->num_elements();
  Eigen::VectorXd r(dim_);
  for (int e = 0; e < ne; ++e)
    r.segment(e * np_, np_).noalias() = grad_vol_ * u.segment(e * np_, np_);

  for (size_t f = 0; f < mesh_->faces.size(); ++f) {
    const Face& face = mesh_->faces[f];
    double um, up;
    trace_values(u, static_cast<int>(f), um, up);
    // Central flux u** = <u>; dirichlet boundaries take u** = 0.
    const double ustar = face.neighbor >= 0 ? 0.5 * (um + up) : 0.0;
    const int k = basis_->order;
    r[face.owner * np_ + (face.owner_side == 0 ? 0 : k)] +=
        face.normal * (ustar - um);
    if (face.neighbor >= 0)
      r[face.neighbor * np_ + (face.neighbor_side == 0 ? 0 : k)] -=
          face.normal * (ustar - up);
  }

  Eigen::VectorXd q(dim_);
  for (int e = 0; e < ne; ++e)
    q.segment(e * np_, np_) = (2.0 / mesh_->elements[e].hx) *
                              mass_.solve(r.segment(e * np_, np_));
  return q;
}

double BurgersOperator::face_linear_flux(const FaceFrozen& fd, double um,
                                         double up, double jump) const {
  return 0.5 * (fd.ut_minus * um + fd.ut_plus * up) + fd.diss * jump;
}

double BurgersOperator::face_nonlinear_flux(const FaceFrozen& fd, double um,
                                            double up, double jump) const {
  if (cfg_.flux == FluxKind::lax_friedrichs)
    return lax_friedrichs_flux(um, up, jump);
  const double avg_half_sq = 0.25 * (um * um + up * up);
  const double avg = 0.5 * (um + up);
  return (avg_half_sq + avg * avg) / 3.0 + fd.sigma_over_h * jump;
}

Eigen::VectorXd BurgersOperator::apply_linear(const Eigen::VectorXd& u) const {
  const Eigen::VectorXd q = gradient(u);
  const int ne = mesh_->num_elements();
  const int k = basis_->order;
  Eigen::VectorXd r(dim_);
  Eigen::VectorXd gq(wq_.size());
  for (int e = 0; e < ne; ++e) {
    gq.noalias() = cfg_.kappa * (interp_ * q.segment(e * np_, np_));
    gq.array() -= utilde_q_.col(e).array() *
                  (interp_ * u.segment(e * np_, np_)).array();
    r.segment(e * np_, np_).noalias() = -(lift_vol_ * gq);
  }

  for (size_t f = 0; f < mesh_->faces.size(); ++f) {
    const Face& face = mesh_->faces[f];
    const FaceFrozen& fd = faces_[f];
    double um, up, qm, qp;
    trace_values(u, static_cast<int>(f), um, up);
    trace_values(q, static_cast<int>(f), qm, qp);
    const double jump = face.normal * (um - up);
    // q** is central on interior faces and one-sided at dirichlet boundaries.
    const double qstar = face.neighbor >= 0 ? 0.5 * (qm + qp) : qm;
    const double flux = cfg_.kappa * qstar - face_linear_flux(fd, um, up, jump);
    r[face.owner * np_ + (face.owner_side == 0 ? 0 : k)] += face.normal * flux;
    if (face.neighbor >= 0)
      r[face.neighbor * np_ + (face.neighbor_side == 0 ? 0 : k)] -=
          face.normal * flux;
  }

  Eigen::VectorXd out(dim_);
  for (int e = 0; e < ne; ++e)
    out.segment(e * np_, np_) = (2.0 / mesh_->elements[e].hx) *
                                mass_.solve(r.segment(e * np_, np_));
  return out;
}

Eigen::VectorXd BurgersOperator::apply_nonlinear(const Eigen::VectorXd& u) const {
  const int ne = mesh_->num_elements();
  const int k = basis_->order;
  Eigen::VectorXd r(dim_);
  Eigen::VectorXd uq(wq_.size());
  for (int e = 0; e < ne; ++e) {
    uq.noalias() = interp_ * u.segment(e * np_, np_);
    const Eigen::VectorXd gq =
        (utilde_q_.col(e).array() * uq.array() - 0.5 * uq.array().square())
            .matrix();
    r.segment(e * np_, np_).noalias() = -(lift_vol_ * gq);
  }
  if (source_weak_.size() > 0) r += source_weak_;

  for (size_t f = 0; f < mesh_->faces.size(); ++f) {
    const Face& face = mesh_->faces[f];
    const FaceFrozen& fd = faces_[f];
    double um, up;
    trace_values(u, static_cast<int>(f), um, up);
    const double jump = face.normal * (um - up);
    const double flux = face_linear_flux(fd, um, up, jump) -
                        face_nonlinear_flux(fd, um, up, jump);
    r[face.owner * np_ + (face.owner_side == 0 ? 0 : k)] += face.normal * flux;
    if (face.neighbor >= 0)
      r[face.neighbor * np_ + (face.neighbor_side == 0 ? 0 : k)] -=
          face.normal * flux;
  }

  Eigen::VectorXd out(dim_);
  for (int e = 0; e < ne; ++e)
    out.segment(e * np_, np_) = (2.0 / mesh_->elements[e].hx) *
                                mass_.solve(r.segment(e * np_, np_));
  return out;
}

Eigen::VectorXd BurgersOperator::full_rhs(const Eigen::VectorXd& u) const {
  const Eigen::VectorXd q = gradient(u);
  const int ne = mesh_->num_elements();
  const int k = basis_->order;
  Eigen::VectorXd r(dim_);
  Eigen::VectorXd uq(wq_.size());
  for (int e = 0; e < ne; ++e) {
    uq.noalias() = interp_ * u.segment(e * np_, np_);
    const Eigen::VectorXd gq =
        (cfg_.kappa * (interp_ * q.segment(e * np_, np_)).array() -
         0.5 * uq.array().square())
            .matrix();
    r.segment(e * np_, np_).noalias() = -(lift_vol_ * gq);
  }
  if (source_weak_.size() > 0) r += source_weak_;

  for (size_t f = 0; f < mesh_->faces.size(); ++f) {
    const Face& face = mesh_->faces[f];
    double um, up, qm, qp;
    trace_values(u, static_cast<int>(f), um, up);
    trace_values(q, static_cast<int>(f), qm, qp);
    const double jump = face.normal * (um - up);
    const double qstar = face.neighbor >= 0 ? 0.5 * (qm + qp) : qm;
    double fstar;
    if (cfg_.flux == FluxKind::lax_friedrichs) {
      fstar = lax_friedrichs_flux(um, up, jump);
    } else {
      const double sigma_over_h =
          cfg_.sigma_adaptive
              ? cfg_.kappa / (100.0 * face.h_owner) +
                    std::max(std::abs(um), std::abs(up))
              : cfg_.sigma / face.h_owner;
      const double avg_half_sq = 0.25 * (um * um + up * up);
      const double avg = 0.5 * (um + up);
      fstar = (avg_half_sq + avg * avg) / 3.0 + sigma_over_h * jump;
    }
    const double flux = cfg_.kappa * qstar - fstar;
    r[face.owner * np_ + (face.owner_side == 0 ? 0 : k)] += face.normal * flux;
    if (face.neighbor >= 0)
      r[face.neighbor * np_ + (face.neighbor_side == 0 ? 0 : k)] -=
          face.normal * flux;
  }

  Eigen::VectorXd out(dim_);
  for (int e = 0; e < ne; ++e)
    out.segment(e * np_, np_) = (2.0 / mesh_->elements[e].hx) *
                                mass_.solve(r.segment(e * np_, np_));
  return out;
}

double BurgersOperator::inner_product(const Eigen::VectorXd& a,
                                      const Eigen::VectorXd& b) const {
  double sum = 0.0;
  for (int e = 0; e < mesh_->num_elements(); ++e) {
    const Eigen::VectorXd aq = interp_ * a.segment(e * np_, np_);
    const Eigen::VectorXd bq = interp_ * b.segment(e * np_, np_);
    sum += 0.5 * mesh_->elements[e].hx *
           (wq_.array() * aq.array() * bq.array()).sum();
  }
  return sum;
}

double BurgersOperator::penalty_seminorm_sq(const Eigen::VectorXd& u) const {
  double sum = 0.0;
  for (size_t f = 0; f < mesh_->faces.size(); ++f) {
    const Face& face = mesh_->faces[f];
    double um, up;
    trace_values(u, static_cast<int>(f), um, up);
    const double jump = face.normal * (um - up);
    sum += faces_[f].sigma_over_h * jump * jump;
  }
  return sum;
}

double BurgersOperator::dg_norm_sq(const Eigen::VectorXd& u) const {
  double sum = 0.0;
  for (int e = 0; e < mesh_->num_elements(); ++e) {
    const double jac = 2.0 / mesh_->elements[e].hx;
    const Eigen::VectorXd uxq = jac * (dinterp_ * u.segment(e * np_, np_));
    sum += 0.5 * mesh_->elements[e].hx *
           (wq_.array() * uxq.array() * uxq.array()).sum();
  }
  for (size_t f = 0; f < mesh_->faces.size(); ++f) {
    const Face& face = mesh_->faces[f];
    double um, up;
    trace_values(u, static_cast<int>(f), um, up);
    const double jump = face.normal * (um - up);
    sum += faces_[f].inv_h * jump * jump;
  }
  return sum;
}

SplitOperator burgers_split_operator(const Mesh& mesh, const NodalBasis& basis,
                                     const BurgersConfig& cfg,
                                     Eigen::VectorXd utilde) {
  auto op = std::make_shared<BurgersOperator>(mesh, basis, cfg, std::move(utilde));
  SplitOperator split;
  split.dim = op->dim();
  split.linear = [op](const Eigen::VectorXd& u) { return op->apply_linear(u); };
  split.nonlinear = [op](const Eigen::VectorXd& u) {
    return op->apply_nonlinear(u);
  };
  return split;
}

Eigen::VectorXd burgers_full_rhs(const Mesh& mesh, const NodalBasis& basis,
                                 const BurgersConfig& cfg,
                                 const Eigen::VectorXd& u) {
  const BurgersOperator op(mesh, basis, cfg,
                           Eigen::VectorXd::Zero(u.size()));
  return op.full_rhs(u);
}

Eigen::VectorXd burgers_gradient(const Mesh& mesh, const NodalBasis& basis,
                                 const BurgersConfig& cfg,
                                 const Eigen::VectorXd& u) {
  const BurgersOperator op(mesh, basis, cfg, u);
  return op.gradient(u);
}

}  // namespace expdg
