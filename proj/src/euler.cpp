#include "expdg/euler.hpp"

#include <cmath>
#include <stdexcept>

namespace expdg {

bool admissible(const EulerState& q, double gamma) {
  if (!(q[0] > 0.0)) return false;
  const double p =
      (gamma - 1.0) * (q[3] - 0.5 * (q[1] * q[1] + q[2] * q[2]) / q[0]);
  return p > 0.0;
}

EulerPrimitives primitives(const EulerState& q, double gamma) {
  EulerPrimitives pr;
  pr.rho = q[0];
  pr.u = q[1] / q[0];
  pr.v = q[2] / q[0];
  pr.p = (gamma - 1.0) * (q[3] - 0.5 * pr.rho * (pr.u * pr.u + pr.v * pr.v));
  pr.a = std::sqrt(gamma * pr.p / pr.rho);
  pr.H = (q[3] + pr.p) / pr.rho;
  return pr;
}

Eigen::Matrix<double, 4, 2> euler_flux(const EulerState& q, double gamma) {
  if (!admissible(q, gamma))
    throw std::domain_error("euler_flux: inadmissible state");
  const EulerPrimitives pr = primitives(q, gamma);
  Eigen::Matrix<double, 4, 2> f;
  f(0, 0) = q[1];
  f(1, 0) = q[1] * pr.u + pr.p;
  f(2, 0) = q[2] * pr.u;
  f(3, 0) = q[0] * pr.u * pr.H;
  f(0, 1) = q[2];
  f(1, 1) = q[1] * pr.v;
  f(2, 1) = q[2] * pr.v + pr.p;
  f(3, 1) = q[0] * pr.v * pr.H;
  return f;
}

namespace {

Eigen::Matrix4d jacobian_from_primitives(const EulerPrimitives& pr,
                                         const Eigen::Vector2d& n,
                                         double gamma) {
  const double gm1 = gamma - 1.0;
  const double u = pr.u, v = pr.v;
  const double un = u * n[0] + v * n[1];
  const double phi = 0.5 * gm1 * (u * u + v * v);
  const double H = pr.H;
  Eigen::Matrix4d a;
  a(0, 0) = 0.0;
  a(0, 1) = n[0];
  a(0, 2) = n[1];
  a(0, 3) = 0.0;

  a(1, 0) = phi * n[0] - u * un;
  a(1, 1) = u * n[0] - gm1 * n[0] * u + un;
  a(1, 2) = u * n[1] - gm1 * n[0] * v;
  a(1, 3) = gm1 * n[0];

  a(2, 0) = phi * n[1] - v * un;
  a(2, 1) = v * n[0] - gm1 * n[1] * u;
  a(2, 2) = v * n[1] - gm1 * n[1] * v + un;
  a(2, 3) = gm1 * n[1];

  a(3, 0) = (phi - H) * un;
  a(3, 1) = H * n[0] - gm1 * u * un;
  a(3, 2) = H * n[1] - gm1 * v * un;
  a(3, 3) = gamma * un;
  return a;
}

Eigen::Matrix4d abs_jacobian_from(const double rho, const double u,
                                  const double v, const double H,
                                  const double a, const Eigen::Vector2d& n,
                                  double gamma) {
  const double gm1 = gamma - 1.0;
  const double un = u * n[0] + v * n[1];
  const double ut = -u * n[1] + v * n[0];
  const double phi = 0.5 * gm1 * (u * u + v * v);
  const double a2 = a * a;

  Eigen::Matrix4d r;
  r.col(0) << 1.0, u - a * n[0], v - a * n[1], H - a * un;
  r.col(1) << 1.0, u, v, 0.5 * (u * u + v * v);
  r.col(2) << 0.0, -n[1], n[0], ut;
  r.col(3) << 1.0, u + a * n[0], v + a * n[1], H + a * un;

  const Eigen::RowVector4d dp(phi, -gm1 * u, -gm1 * v, gm1);
  const Eigen::RowVector4d dun(-un / rho, n[0] / rho, n[1] / rho, 0.0);
  const Eigen::RowVector4d dut(-ut / rho, -n[1] / rho, n[0] / rho, 0.0);
  Eigen::Matrix4d rinv;
  rinv.row(0) = (dp - rho * a * dun) / (2.0 * a2);
  rinv.row(1) = Eigen::RowVector4d(1, 0, 0, 0) - dp / a2;
  rinv.row(2) = rho * dut;
  rinv.row(3) = (dp + rho * a * dun) / (2.0 * a2);

  const Eigen::Vector4d lam(std::abs(un - a), std::abs(un), std::abs(un),
                            std::abs(un + a));
  return r * lam.asDiagonal() * rinv;
}

}  // namespace

Eigen::Matrix4d flux_jacobian(const EulerState& q, const Eigen::Vector2d& n,
                              double gamma) {
  if (!admissible(q, gamma))
    throw std::domain_error("flux_jacobian: inadmissible state");
  return jacobian_from_primitives(primitives(q, gamma), n, gamma);
}

RoeAverage roe_average(const EulerState& q_minus, const EulerState& q_plus,
                       double gamma) {
  if (!admissible(q_minus, gamma) || !admissible(q_plus, gamma))
    throw std::domain_error("roe_average: inadmissible state");
  const EulerPrimitives pm = primitives(q_minus, gamma);
  const EulerPrimitives pp = primitives(q_plus, gamma);
  const double sm = std::sqrt(pm.rho), sp = std::sqrt(pp.rho);
  RoeAverage avg;
  avg.rho = sm * sp;
  avg.u = (sm * pm.u + sp * pp.u) / (sm + sp);
  avg.v = (sm * pm.v + sp * pp.v) / (sm + sp);
  avg.H = (sm * pm.H + sp * pp.H) / (sm + sp);
  const double a2 =
      (gamma - 1.0) * (avg.H - 0.5 * (avg.u * avg.u + avg.v * avg.v));
  if (!(a2 > 0.0)) throw std::domain_error("roe_average: inadmissible pair");
  avg.a = std::sqrt(a2);
  return avg;
}

Eigen::Matrix4d abs_flux_jacobian(const RoeAverage& avg,
                                  const Eigen::Vector2d& n, double gamma) {
  return abs_jacobian_from(avg.rho, avg.u, avg.v, avg.H, avg.a, n, gamma);
}

EulerState roe_flux(const EulerState& q_minus, const EulerState& q_plus,
                    const Eigen::Vector2d& n, double gamma) {
  const RoeAverage avg = roe_average(q_minus, q_plus, gamma);
  const Eigen::Matrix<double, 4, 2> fm = euler_flux(q_minus, gamma);
  const Eigen::Matrix<double, 4, 2> fp = euler_flux(q_plus, gamma);
  const EulerState favg = 0.5 * ((fm + fp) * n);
  return favg + 0.5 * abs_flux_jacobian(avg, n, gamma) * (q_minus - q_plus);
}

EulerState euler_lax_friedrichs_flux(const EulerState& q_minus,
                                     const EulerState& q_plus,
                                     const Eigen::Vector2d& n, double gamma) {
  const EulerPrimitives pm = primitives(q_minus, gamma);
  const EulerPrimitives pp = primitives(q_plus, gamma);
  const double cm = std::abs(pm.u * n[0] + pm.v * n[1]) + pm.a;
  const double cp = std::abs(pp.u * n[0] + pp.v * n[1]) + pp.a;
  const Eigen::Matrix<double, 4, 2> fm = euler_flux(q_minus, gamma);
  const Eigen::Matrix<double, 4, 2> fp = euler_flux(q_plus, gamma);
  return 0.5 * ((fm + fp) * n) +
         0.5 * std::max(cm, cp) * (q_minus - q_plus);
}

EulerState isentropic_vortex(double x, double y, double t,
                             const EulerConfig& cfg) {
  const VortexParams& vp = cfg.vortex;
  const double gamma = cfg.gamma;
  const double cp = gamma / (gamma - 1.0);
  double xt = x - vp.xc - vp.u_inf * t;
  double yt = y - vp.yc - vp.v_inf * t;
  if (vp.wrap_lx > 0.0) xt -= vp.wrap_lx * std::round(xt / vp.wrap_lx);
  if (vp.wrap_ly > 0.0) yt -= vp.wrap_ly * std::round(yt / vp.wrap_ly);
  const double r2 = xt * xt + yt * yt;
  const double s = vp.lambda / (2.0 * M_PI);
  const double e1 = std::exp(0.5 * vp.alpha * (1.0 - r2));
  const double u = vp.u_inf - s * yt * e1;
  const double v = vp.v_inf + s * xt * e1;
  const double T =
      vp.T_inf - s * s / (2.0 * vp.alpha * cp) * std::exp(vp.alpha * (1.0 - r2));
  const double rho = vp.rho_inf * std::pow(T / vp.T_inf, 1.0 / (gamma - 1.0));
  const double p = vp.p_inf * std::pow(T / vp.T_inf, gamma / (gamma - 1.0));
  EulerState q;
  q[0] = rho;
  q[1] = rho * u;
  q[2] = rho * v;
  q[3] = p / (gamma - 1.0) + 0.5 * rho * (u * u + v * v);
  return q;
}

EulerOperator::EulerOperator(const Mesh& mesh, const NodalBasis& basis,
                             EulerConfig cfg, Eigen::VectorXd qtilde)
    : mesh_(&mesh), basis_(&basis), cfg_(cfg) {
  if (mesh.dim != 2) throw std::invalid_argument("EulerOperator: 2d meshes only");
  if (mesh.bc != BoundaryKind::periodic)
    throw std::invalid_argument("EulerOperator: periodic boundaries only");
  np1_ = basis.num_nodes();
  np_ = np1_ * np1_;
  dim_ = static_cast<Eigen::Index>(mesh.num_elements()) * np_ * 4;
  if (qtilde.size() != dim_)
    throw std::invalid_argument("EulerOperator: reference state size mismatch");

  const int ne = mesh.num_elements();
  jac_x_.resize(static_cast<size_t>(ne) * np_);
  jac_y_.resize(static_cast<size_t>(ne) * np_);
  const Eigen::Vector2d ex(1, 0), ey(0, 1);
  auto node_state = [&](int e, int node) {
    EulerState q;
    for (int c = 0; c < 4; ++c) q[c] = qtilde[e * np_ * 4 + c * np_ + node];
    return q;
  };
  for (int e = 0; e < ne; ++e) {
    for (int node = 0; node < np_; ++node) {
      const EulerState q = node_state(e, node);
      if (!admissible(q, cfg.gamma))
        throw std::domain_error("EulerOperator: inadmissible reference state");
      const EulerPrimitives pr = primitives(q, cfg.gamma);
      jac_x_[e * np_ + node] = jacobian_from_primitives(pr, ex, cfg.gamma);
      jac_y_[e * np_ + node] = jacobian_from_primitives(pr, ey, cfg.gamma);
    }
  }

  face_frozen_.resize(mesh.faces.size() * np1_);
  for (size_t f = 0; f < mesh.faces.size(); ++f) {
    const Face& face = mesh.faces[f];
    const Eigen::Vector2d n =
        face.axis == 0 ? Eigen::Vector2d(face.normal, 0)
                       : Eigen::Vector2d(0, face.normal);
    const auto own = face_node_indices(mesh, basis, face, true);
    const auto nbr = face_node_indices(mesh, basis, face, false);
    for (int fn = 0; fn < np1_; ++fn) {
      const EulerState qm = node_state(face.owner, own[fn]);
      const EulerState qp = node_state(face.neighbor, nbr[fn]);
      FaceFrozen& fd = face_frozen_[f * np1_ + fn];
      const EulerPrimitives pm = primitives(qm, cfg.gamma);
      const EulerPrimitives pp = primitives(qp, cfg.gamma);
      fd.a_minus = jacobian_from_primitives(pm, n, cfg.gamma);
      fd.a_plus = jacobian_from_primitives(pp, n, cfg.gamma);
      if (cfg.flux == EulerFluxKind::roe) {
        const RoeAverage avg = roe_average(qm, qp, cfg.gamma);
        fd.a_abs = abs_flux_jacobian(avg, n, cfg.gamma);
      } else {
        const double cm = std::abs(pm.u * n[0] + pm.v * n[1]) + pm.a;
        const double cp = std::abs(pp.u * n[0] + pp.v * n[1]) + pp.a;
        fd.a_abs = std::max(cm, cp) * Eigen::Matrix4d::Identity();
      }
    }
  }
}

void EulerOperator::apply_inverse_mass(Eigen::VectorXd& r) const {
  const Eigen::VectorXd& w = basis_->weights;
  for (int e = 0; e < mesh_->num_elements(); ++e) {
    const Element& el = mesh_->elements[e];
    const double scale = 4.0 / (el.hx * el.hy);
    for (int c = 0; c < 4; ++c) {
      double* block = r.data() + e * np_ * 4 + c * np_;
      for (int j = 0; j < np1_; ++j)
        for (int i = 0; i < np1_; ++i)
          block[j * np1_ + i] *= scale / (w[i] * w[j]);
    }
  }
}

void EulerOperator::rhs_faces(const Eigen::VectorXd& q, bool linear_part,
                              Eigen::VectorXd& r) const {
  const Eigen::VectorXd& w = basis_->weights;
  for (size_t f = 0; f < mesh_->faces.size(); ++f) {
    const Face& face = mesh_->faces[f];
    const Eigen::Vector2d n =
        face.axis == 0 ? Eigen::Vector2d(face.normal, 0)
                       : Eigen::Vector2d(0, face.normal);
    const auto own = face_node_indices(*mesh_, *basis_, face, true);
    const auto nbr = face_node_indices(*mesh_, *basis_, face, false);
    const double half_edge = 0.5 * face.measure;
    for (int fn = 0; fn < np1_; ++fn) {
      EulerState qm, qp;
      for (int c = 0; c < 4; ++c) {
        qm[c] = q[face.owner * np_ * 4 + c * np_ + own[fn]];
        qp[c] = q[face.neighbor * np_ * 4 + c * np_ + nbr[fn]];
      }
      const FaceFrozen& fd = face_frozen_[f * np1_ + fn];
      // Linear numerical flux <A~ q> . n + |A~| (q^- - q^+)/2 along n^-.
      EulerState flux = 0.5 * (fd.a_minus * qm + fd.a_plus * qp) +
                        0.5 * (fd.a_abs * (qm - qp));
      // N carries the full numerical flux minus the linear flux; the scatter
      // signs below are those of the L face term, which N enters negated.
      if (!linear_part) {
        const EulerState full =
            cfg_.flux == EulerFluxKind::roe
                ? roe_flux(qm, qp, n, cfg_.gamma)
                : euler_lax_friedrichs_flux(qm, qp, n, cfg_.gamma);
        flux = full - flux;
      }
      const double fw = half_edge * w[fn];
      for (int c = 0; c < 4; ++c) {
        r[face.owner * np_ * 4 + c * np_ + own[fn]] -= fw * flux[c];
        r[face.neighbor * np_ * 4 + c * np_ + nbr[fn]] += fw * flux[c];
      }
    }
  }
}

Eigen::VectorXd EulerOperator::apply_linear(const Eigen::VectorXd& q) const {
  const Eigen::MatrixXd& d = basis_->diff_matrix;
  const Eigen::VectorXd& w = basis_->weights;
  Eigen::VectorXd r = Eigen::VectorXd::Zero(dim_);
  Eigen::MatrixXd fx(np_, 4), fy(np_, 4);

  for (int e = 0; e < mesh_->num_elements(); ++e) {
    const Element& el = mesh_->elements[e];
    for (int node = 0; node < np_; ++node) {
      EulerState qn;
      for (int c = 0; c < 4; ++c) qn[c] = q[e * np_ * 4 + c * np_ + node];
      fx.row(node) = (jac_x_[e * np_ + node] * qn).transpose();
      fy.row(node) = (jac_y_[e * np_ + node] * qn).transpose();
    }
    for (int c = 0; c < 4; ++c) {
      double* rb = r.data() + e * np_ * 4 + c * np_;
      // (F, dv/dx): rows of constant j, D acting on the i index.
      for (int j = 0; j < np1_; ++j) {
        const double sy = 0.5 * el.hy * w[j];
        for (int m = 0; m < np1_; ++m) {
          double acc = 0.0;
          for (int i = 0; i < np1_; ++i)
            acc += w[i] * d(i, m) * fx(j * np1_ + i, c);
          rb[j * np1_ + m] += sy * acc;
        }
      }
      // (F, dv/dy): columns of constant i, D acting on the j index.
      for (int i = 0; i < np1_; ++i) {
        const double sx = 0.5 * el.hx * w[i];
        for (int m = 0; m < np1_; ++m) {
          double acc = 0.0;
          for (int j = 0; j < np1_; ++j)
            acc += w[j] * d(j, m) * fy(j * np1_ + i, c);
          rb[m * np1_ + i] += sx * acc;
        }
      }
    }
  }

  rhs_faces(q, true, r);
  apply_inverse_mass(r);
  return r;
}

Eigen::VectorXd EulerOperator::apply_nonlinear(const Eigen::VectorXd& q) const {
  const Eigen::MatrixXd& d = basis_->diff_matrix;
  const Eigen::VectorXd& w = basis_->weights;
  Eigen::VectorXd r = Eigen::VectorXd::Zero(dim_);
  Eigen::MatrixXd fx(np_, 4), fy(np_, 4);

  for (int e = 0; e < mesh_->num_elements(); ++e) {
    const Element& el = mesh_->elements[e];
    for (int node = 0; node < np_; ++node) {
      EulerState qn;
      for (int c = 0; c < 4; ++c) qn[c] = q[e * np_ * 4 + c * np_ + node];
      const EulerPrimitives pr = primitives(qn, cfg_.gamma);
      // Full flux minus the frozen linear flux.
      EulerState fxc, fyc;
      fxc << qn[1], qn[1] * pr.u + pr.p, qn[2] * pr.u, qn[0] * pr.u * pr.H;
      fyc << qn[2], qn[1] * pr.v, qn[2] * pr.v + pr.p, qn[0] * pr.v * pr.H;
      fx.row(node) = (fxc - jac_x_[e * np_ + node] * qn).transpose();
      fy.row(node) = (fyc - jac_y_[e * np_ + node] * qn).transpose();
    }
    for (int c = 0; c < 4; ++c) {
      double* rb = r.data() + e * np_ * 4 + c * np_;
      for (int j = 0; j < np1_; ++j) {
        const double sy = 0.5 * el.hy * w[j];
        for (int m = 0; m < np1_; ++m) {
          double acc = 0.0;
          for (int i = 0; i < np1_; ++i)
            acc += w[i] * d(i, m) * fx(j * np1_ + i, c);
          rb[j * np1_ + m] += sy * acc;
        }
      }
      for (int i = 0; i < np1_; ++i) {
        const double sx = 0.5 * el.hx * w[i];
        for (int m = 0; m < np1_; ++m) {
          double acc = 0.0;
          for (int j = 0; j < np1_; ++j)
            acc += w[j] * d(j, m) * fy(j * np1_ + i, c);
          rb[m * np1_ + i] += sx * acc;
        }
      }
    }
  }

  rhs_faces(q, false, r);
  apply_inverse_mass(r);
  return r;
}

SplitOperator euler_split_operator(const Mesh& mesh, const NodalBasis& basis,
                                   const EulerConfig& cfg,
                                   Eigen::VectorXd qtilde) {
  auto op = std::make_shared<EulerOperator>(mesh, basis, cfg, std::move(qtilde));
  SplitOperator split;
  split.dim = op->dim();
  split.linear = [op](const Eigen::VectorXd& q) { return op->apply_linear(q); };
  split.nonlinear = [op](const Eigen::VectorXd& q) {
    return op->apply_nonlinear(q);
  };
  return split;
}

Eigen::VectorXd euler_full_rhs(const Mesh& mesh, const NodalBasis& basis,
                               const EulerConfig& cfg,
                               const Eigen::VectorXd& q) {
  const EulerOperator op(mesh, basis, cfg, q);
  return op.apply_linear(q) + op.apply_nonlinear(q);
}

}  // namespace expdg
