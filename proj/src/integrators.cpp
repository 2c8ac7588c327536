#include "expdg/integrators.hpp"

#include <cmath>
#include <stdexcept>

namespace expdg {

bool is_exponential(IntegratorKind kind) {
  switch (kind) {
    case IntegratorKind::exp_euler:
    case IntegratorKind::epi2:
    case IntegratorKind::exprb32:
    case IntegratorKind::exprb42:
      return true;
    default:
      return false;
  }
}

IntegratorKind integrator_from_name(const std::string& name) {
  if (name == "exp_euler") return IntegratorKind::exp_euler;
  if (name == "epi2") return IntegratorKind::epi2;
  if (name == "exprb32") return IntegratorKind::exprb32;
  if (name == "exprb42") return IntegratorKind::exprb42;
  if (name == "rk2") return IntegratorKind::rk2;
  if (name == "rk3") return IntegratorKind::rk3;
  if (name == "rk4") return IntegratorKind::rk4;
  throw std::invalid_argument("unknown integrator '" + name + "'");
}

std::string integrator_name(IntegratorKind kind) {
  switch (kind) {
    case IntegratorKind::exp_euler: return "exp_euler";
    case IntegratorKind::epi2: return "epi2";
    case IntegratorKind::exprb32: return "exprb32";
    case IntegratorKind::exprb42: return "exprb42";
    case IntegratorKind::rk2: return "rk2";
    case IntegratorKind::rk3: return "rk3";
    case IntegratorKind::rk4: return "rk4";
  }
  return "?";
}

namespace {

PhiCombinationResult combine(const SplitOperator& op,
                             std::vector<Eigen::VectorXd> b, double dt,
                             const KrylovSettings& ks) {
  PhiCombinationProblem prob;
  prob.op = op.linear;
  prob.b = std::move(b);
  prob.dt = dt;
  prob.tol = ks.tol;
  prob.max_basis = ks.max_basis;
  prob.orth_length = ks.orth_length;
  return phi_combination(prob);
}

void add_stats(KrylovStats* stats, const KrylovStats& s) {
  if (!stats) return;
  stats->iterations += s.iterations;
  stats->substeps += s.substeps;
}

}  // namespace

Eigen::VectorXd step_exp_euler(const SplitOperator& op, const Eigen::VectorXd& u,
                               double dt, const KrylovSettings& ks,
                               KrylovStats* stats) {
  // u + dt phi_1(dt L) N(u) plus the homogeneous part e^{dt L} u in one call.
  auto res = combine(op, {u, op.nonlinear(u)}, dt, ks);
  add_stats(stats, res.stats);
  return res.value;
}

Eigen::VectorXd step_epi2(const SplitOperator& op, const Eigen::VectorXd& u,
                          double dt, const KrylovSettings& ks,
                          KrylovStats* stats) {
  const Eigen::VectorXd r = op.linear(u) + op.nonlinear(u);
  auto res = combine(op, {Eigen::VectorXd::Zero(u.size()), r}, dt, ks);
  add_stats(stats, res.stats);
  return u + res.value;
}

Eigen::VectorXd step_exprb32(const SplitOperator& op, const Eigen::VectorXd& u,
                             double dt, const KrylovSettings& ks,
                             KrylovStats* stats) {
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(u.size());
  const Eigen::VectorXd nu = op.nonlinear(u);
  const Eigen::VectorXd r = op.linear(u) + nu;
  auto stage = combine(op, {zero, r}, dt, ks);
  add_stats(stats, stage.stats);
  const Eigen::VectorXd d2 = op.nonlinear(u + stage.value) - nu;
  // dt phi_1 R + 2 dt phi_3 D realized as one combination.
  auto full = combine(op, {zero, r, zero, (2.0 / (dt * dt)) * d2}, dt, ks);
  add_stats(stats, full.stats);
  return u + full.value;
}

Eigen::VectorXd step_exprb42(const SplitOperator& op, const Eigen::VectorXd& u,
                             double dt, const KrylovSettings& ks,
                             KrylovStats* stats) {
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(u.size());
  const Eigen::VectorXd nu = op.nonlinear(u);
  const Eigen::VectorXd r = op.linear(u) + nu;
  auto stage = combine(op, {zero, r}, 0.75 * dt, ks);
  add_stats(stats, stage.stats);
  const Eigen::VectorXd d2 = op.nonlinear(u + stage.value) - nu;
  auto full =
      combine(op, {zero, r, zero, (32.0 / 9.0 / (dt * dt)) * d2}, dt, ks);
  add_stats(stats, full.stats);
  return u + full.value;
}

Eigen::VectorXd step_rk(IntegratorKind kind, const RhsAction& rhs,
                        const Eigen::VectorXd& u, double dt) {
  switch (kind) {
    case IntegratorKind::rk2: {
      const Eigen::VectorXd k1 = rhs(u);
      const Eigen::VectorXd k2 = rhs(u + dt * k1);
      return u + 0.5 * dt * (k1 + k2);
    }
    case IntegratorKind::rk3: {
      const Eigen::VectorXd u1 = u + dt * rhs(u);
      const Eigen::VectorXd u2 = 0.75 * u + 0.25 * (u1 + dt * rhs(u1));
      return (1.0 / 3.0) * u + (2.0 / 3.0) * (u2 + dt * rhs(u2));
    }
    case IntegratorKind::rk4: {
      const Eigen::VectorXd k1 = rhs(u);
      const Eigen::VectorXd k2 = rhs(u + 0.5 * dt * k1);
      const Eigen::VectorXd k3 = rhs(u + 0.5 * dt * k2);
      const Eigen::VectorXd k4 = rhs(u + dt * k3);
      return u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    default:
      throw std::invalid_argument("step_rk: not an RK kind");
  }
}

IntegrationResult integrate(const SplitProblem& problem, IntegratorKind kind,
                            Eigen::VectorXd u0, const TimeLoopConfig& cfg) {
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("integrate: dt must be positive");
  if (cfg.t_final < cfg.dt)
    throw std::invalid_argument("integrate: t_final must be at least dt");

  IntegrationResult res;
  res.u = std::move(u0);
  res.max_abs = res.u.size() ? res.u.cwiseAbs().maxCoeff() : 0.0;
  const double blow_up_scale = 1e10 * (1.0 + res.max_abs);

  SplitOperator frozen;
  if (kind == IntegratorKind::exp_euler) frozen = problem.linearize(res.u);

  KrylovStats stats;
  const double t_end = cfg.t_final * (1.0 - 1e-14);
  while (res.t < t_end) {
    const double dt = std::min(cfg.dt, cfg.t_final - res.t);
    bool failed = false;
    try {
      switch (kind) {
        case IntegratorKind::exp_euler:
          res.u = step_exp_euler(frozen, res.u, dt, cfg.krylov, &stats);
          break;
        case IntegratorKind::epi2:
          res.u = step_epi2(problem.linearize(res.u), res.u, dt, cfg.krylov,
                            &stats);
          break;
        case IntegratorKind::exprb32:
          res.u = step_exprb32(problem.linearize(res.u), res.u, dt, cfg.krylov,
                               &stats);
          break;
        case IntegratorKind::exprb42:
          res.u = step_exprb42(problem.linearize(res.u), res.u, dt, cfg.krylov,
                               &stats);
          break;
        default:
          res.u = step_rk(kind, problem.rhs, res.u, dt);
      }
    } catch (const KrylovError&) {
      failed = true;
    } catch (const std::domain_error&) {
      failed = true;  // inadmissible state reached inside a stage
    }
    res.t += dt;
    ++res.steps;
    const double amax =
        res.u.allFinite() ? res.u.cwiseAbs().maxCoeff()
                          : std::numeric_limits<double>::infinity();
    if (failed || !std::isfinite(amax) || amax > blow_up_scale) {
      res.status = RunStatus::blew_up;
      res.blow_up_step = res.steps;
      break;
    }
    res.max_abs = std::max(res.max_abs, amax);
    if (cfg.snapshot_every > 0 && res.steps % cfg.snapshot_every == 0)
      res.snapshots.emplace_back(res.t, res.u);
    if (cfg.on_step) cfg.on_step(res.steps, res.t, amax, stats.iterations);
  }
  res.krylov_iterations = stats.iterations;
  return res;
}

}  // namespace expdg
