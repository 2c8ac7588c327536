#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "expdg/phi.hpp"
#include "expdg/split_operator.hpp"

namespace expdg {

enum class IntegratorKind { exp_euler, epi2, exprb32, exprb42, rk2, rk3, rk4 };

bool is_exponential(IntegratorKind kind);
IntegratorKind integrator_from_name(const std::string& name);
std::string integrator_name(IntegratorKind kind);

struct KrylovSettings {
  double tol = 1e-12;
  int max_basis = 128;
  int orth_length = 128;  // full Arnoldi by default
};

Eigen::VectorXd step_exp_euler(const SplitOperator& op, const Eigen::VectorXd& u,
                               double dt, const KrylovSettings& ks,
                               KrylovStats* stats = nullptr);
Eigen::VectorXd step_epi2(const SplitOperator& op, const Eigen::VectorXd& u,
                          double dt, const KrylovSettings& ks,
                          KrylovStats* stats = nullptr);
Eigen::VectorXd step_exprb32(const SplitOperator& op, const Eigen::VectorXd& u,
                             double dt, const KrylovSettings& ks,
                             KrylovStats* stats = nullptr);
Eigen::VectorXd step_exprb42(const SplitOperator& op, const Eigen::VectorXd& u,
                             double dt, const KrylovSettings& ks,
                             KrylovStats* stats = nullptr);

using RhsAction = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Heun (rk2), Shu-Osher SSP (rk3) or the classical four-stage rule (rk4)
/// applied to the reference-state independent full right-hand side.
Eigen::VectorXd step_rk(IntegratorKind kind, const RhsAction& rhs,
                        const Eigen::VectorXd& u, double dt);

/// Problem binding the time loop integrates: a splitting factory evaluated at
/// a reference state, plus the full right-hand side for the RK baselines.
struct SplitProblem {
  Eigen::Index dim = 0;
  std::function<SplitOperator(const Eigen::VectorXd& ref)> linearize;
  RhsAction rhs;
};

enum class RunStatus { completed, blew_up };

struct TimeLoopConfig {
  double dt = 0.1;
  double t_final = 1.0;
  KrylovSettings krylov;
  int snapshot_every = 0;  // 0: keep no intermediate states
  // Per-step diagnostics: (step, t, max-norm of u, Krylov iterations so far).
  std::function<void(int, double, double, long)> on_step;
};

struct IntegrationResult {
  Eigen::VectorXd u;
  double t = 0.0;
  RunStatus status = RunStatus::completed;
  int steps = 0;
  long krylov_iterations = 0;
  int blow_up_step = -1;
  double max_abs = 0.0;  // running max of the nodal max-norm, initial included
  std::vector<std::pair<double, Eigen::VectorXd>> snapshots;
};

/// Steps u0 to t_final with a shortened final step when needed. Exponential
/// integrators rebuild the splitting at u^n each step, except exp_euler whose
/// operator stays frozen at the initial state (the fixed-splitting scheme the
/// first-order estimate describes). A non-finite or diverging state stops the
/// loop with a blow-up status instead of an exception.
IntegrationResult integrate(const SplitProblem& problem, IntegratorKind kind,
                            Eigen::VectorXd u0, const TimeLoopConfig& cfg);

}  // namespace expdg
