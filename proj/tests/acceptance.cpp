// Acceptance suite: runs every advertised guarantee end to end and prints one
// pass/fail line per criterion. Returns the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "expdg/burgers.hpp"
#include "expdg/euler.hpp"
#include "expdg/harness.hpp"
#include "expdg/integrators.hpp"
#include "expdg/phi.hpp"
#include "test_util.hpp"

using namespace expdg;

namespace {

int g_failures = 0;

bool near(double value, double target, double tol) {
  return std::isfinite(value) && std::abs(value - target) <= tol;
}

bool within_factor(double value, double target, double factor) {
  return std::isfinite(value) && value > target / factor &&
         value < target * factor;
}

void report(int id, const std::string& name, bool pass,
            const std::string& detail) {
  std::printf("[%s] criterion %2d: %s | %s\n", pass ? "PASS" : "FAIL", id,
              name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof(buf), f, args);
  va_end(args);
  return buf;
}

Eigen::MatrixXd matrix_with_spectrum(std::mt19937& rng, int n, double lo,
                                     double hi, double nonnormality) {
  std::uniform_real_distribution<double> eig(lo, hi);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) t(i, i) = eig(rng);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) t(i, j) = nonnormality * gauss(rng);
  Eigen::MatrixXd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = gauss(rng);
  const Eigen::MatrixXd q =
      Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
  return q * t * q.transpose();
}

// ---------------------------------------------------------------------------
// 1. phi-engine oracle equivalence.
void criterion_1() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937 rng(20240601);
  std::uniform_int_distribution<int> size(10, 100);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double worst = 0.0;
  int cases = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = size(rng);
    const Eigen::MatrixXd m = matrix_with_spectrum(rng, n, -50.0, 2.0, 1.0);
    std::vector<Eigen::VectorXd> b;
    for (int i = 0; i <= 3; ++i) {
      Eigen::VectorXd v(n);
      for (int j = 0; j < n; ++j) v[j] = gauss(rng);
      b.push_back(v);
    }
    const double dt = 1.0;
    const auto family = phi_dense_family(3, dt * m);
    Eigen::VectorXd expect = Eigen::VectorXd::Zero(n);
    for (int i = 0; i <= 3; ++i)
      expect += std::pow(dt, i) * (family[i] * b[i]);

    PhiCombinationProblem prob;
    prob.op = [&m](const Eigen::VectorXd& v) { return (m * v).eval(); };
    prob.b = b;
    prob.dt = dt;
    prob.tol = 1e-10;
    const auto res = phi_combination(prob);
    worst = std::max(worst, (res.value - expect).norm() / expect.norm());
    ++cases;
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  report(1, "phi-engine oracle equivalence",
         worst <= 1e-8 && secs < 60.0,
         fmt("%d cases, worst relative deviation %.2e, %.1f s", cases, worst,
             secs));
}

// ---------------------------------------------------------------------------
// 2 & 3. Manufactured-solution spatial convergence.
ExperimentResult run_mms(int k, const std::string& flux, double sigma) {
  ExperimentConfig cfg;
  cfg.problem = "burgers-mms";
  cfg.integrator = "exprb32";
  cfg.k = k;
  cfg.ne = {20, 40, 80, 160};
  cfg.dt = {5e-5};
  cfg.t_final = 0.01;
  cfg.flux = flux;
  cfg.sigma = sigma;
  return run_experiment(cfg);
}

void criterion_2() {
  const ExperimentResult r2 = run_mms(2, "lf", 0.0);
  const double published[4] = {2.630e-6, 3.210e-7, 3.966e-8, 4.916e-9};
  bool pass = true;
  std::string detail;
  for (int i = 0; i < 4; ++i) {
    if (!within_factor(r2.rows[i].error[0], published[i], 2.0)) pass = false;
    if (i > 0 && !near(r2.rows[i].order[0], 3.0, 0.3)) pass = false;
  }
  detail = fmt("k=2 errors %.3e %.3e %.3e %.3e, orders %.3f %.3f %.3f",
               r2.rows[0].error[0], r2.rows[1].error[0], r2.rows[2].error[0],
               r2.rows[3].error[0], r2.rows[1].order[0], r2.rows[2].order[0],
               r2.rows[3].order[0]);

  const ExperimentResult r4 = run_mms(4, "lf", 0.0);
  for (int i = 1; i < 4; ++i)
    if (!near(r4.rows[i].order[0], 5.0, 0.3)) pass = false;
  detail += fmt("; k=4 orders %.3f %.3f %.3f", r4.rows[1].order[0],
                r4.rows[2].order[0], r4.rows[3].order[0]);
  report(2, "manufactured-solution spatial convergence", pass, detail);
}

void criterion_3() {
  const ExperimentResult r = run_mms(3, "ef", 0.0);
  bool pass = true;
  for (int i = 1; i < 4; ++i)
    if (!near(r.rows[i].order[0], 3.0, 0.2)) pass = false;
  report(3, "odd-order suboptimality (k=3, EF, sigma=0)", pass,
         fmt("orders %.3f %.3f %.3f", r.rows[1].order[0], r.rows[2].order[0],
             r.rows[3].order[0]));
}

// ---------------------------------------------------------------------------
// 4. Temporal convergence on the smooth problem.
void criterion_4() {
  auto run = [](const std::string& integ) {
    ExperimentConfig cfg;
    cfg.problem = "burgers-smooth";
    cfg.integrator = integ;
    cfg.k = 4;
    cfg.ne = {40};
    cfg.dt = {0.5, 0.25, 0.1, 0.05, 0.01};
    cfg.t_final = 1.0;
    cfg.flux = "lf";
    cfg.reference = "generate";
    cfg.ref_k = 4;  // same mesh isolates the temporal error
    cfg.ref_dt = 1e-5;
    cfg.ref_dir = "acceptance_refs";
    return run_experiment(cfg);
  };
  const ExperimentResult epi2 = run("epi2");
  const ExperimentResult exprb32 = run("exprb32");
  bool pass = true;
  for (const auto& r : {epi2, exprb32})
    for (const auto& row : r.rows)
      if (row.status != "ok") pass = false;
  // Orders on the finer pairs of the sweep (the published values themselves
  // only reach the asymptotic rate from the third pair on).
  for (size_t i = 3; i < epi2.rows.size(); ++i)
    if (!near(epi2.rows[i].order[0], 2.0, 0.3)) pass = false;
  for (size_t i = 3; i < exprb32.rows.size(); ++i)
    if (!near(exprb32.rows[i].order[0], 3.0, 0.3)) pass = false;
  const double e_fine = epi2.rows.back().error[0];
  if (!within_factor(e_fine, 4.943e-6, 3.0)) pass = false;
  report(4, "temporal convergence, smooth problem", pass,
         fmt("EPI2 orders %.3f %.3f %.3f (err@0.01 %.3e), EXPRB32 orders "
             "%.3f %.3f %.3f",
             epi2.rows[2].order[0], epi2.rows[3].order[0],
             epi2.rows[4].order[0], e_fine, exprb32.rows[2].order[0],
             exprb32.rows[3].order[0], exprb32.rows[4].order[0]));
}

// ---------------------------------------------------------------------------
// 5. Large-Courant stability of EPI2 vs RK2 blow-up.
void criterion_5() {
  ExperimentConfig cfg;
  cfg.problem = "burgers-smooth";
  cfg.k = 4;
  cfg.ne = {40};
  cfg.t_final = 1.0;
  cfg.flux = "ef";
  cfg.sigma = 3e-4;
  cfg.reference = "none";

  ProblemContext ctx = make_problem(cfg, 40, 4);
  TimeLoopConfig tl;
  tl.dt = 0.1;
  tl.t_final = 1.0;
  const double initial_max = ctx.u0.cwiseAbs().maxCoeff();
  const IntegrationResult epi2 =
      integrate(ctx.split, IntegratorKind::epi2, ctx.u0, tl);

  FieldState s0 = make_state(*ctx.mesh, *ctx.basis, 1);
  s0.values = ctx.u0;
  const CourantNumbers cr =
      courant_numbers(s0, *ctx.basis, 0.1, ctx.burgers.kappa, false);

  tl.dt = 2e-4;
  const IntegrationResult rk2 =
      integrate(ctx.split, IntegratorKind::rk2, ctx.u0, tl);

  const bool pass = epi2.status == RunStatus::completed &&
                    epi2.max_abs <= 1.05 * initial_max &&
                    std::abs(cr.cr_d - 161.0) < 2.0 &&
                    rk2.status == RunStatus::blew_up;
  report(5, "large-Courant stability (EPI2) and RK2 blow-up", pass,
         fmt("Cr_d=%.1f, EPI2 %s with max|u| ratio %.4f; RK2 %s at step %d",
             cr.cr_d,
             epi2.status == RunStatus::completed ? "completed" : "blew up",
             epi2.max_abs / initial_max,
             rk2.status == RunStatus::blew_up ? "blew up" : "completed",
             rk2.blow_up_step));
}

// ---------------------------------------------------------------------------
// 6. Discrete energy identity with the entropy flux.
void criterion_6() {
  std::mt19937 rng(616);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double worst = 0.0;
  int trials = 0;
  for (int k = 1; k <= 6; ++k) {
    const NodalBasis basis = lgl_basis(k);
    const Mesh mesh = build_interval_mesh(0, 1, 8, BoundaryKind::periodic);
    BurgersConfig bc;
    bc.kappa = 0.04;
    bc.flux = FluxKind::entropy;
    bc.sigma = 2e-3;
    bc.over_integrate = true;
    const Eigen::Index n = 8 * (k + 1);
    for (int t = 0; t < 17; ++t) {
      Eigen::VectorXd u(n);
      for (Eigen::Index i = 0; i < n; ++i) u[i] = gauss(rng);
      const BurgersOperator op(mesh, basis, bc, u);
      const Eigen::VectorXd rhs = op.apply_linear(u) + op.apply_nonlinear(u);
      const Eigen::VectorXd q = op.gradient(u);
      const double lhs = op.inner_product(u, rhs) +
                         bc.kappa * op.inner_product(q, q) +
                         op.penalty_seminorm_sq(u);
      const double scale = 1.0 + op.inner_product(u, u);
      worst = std::max(worst, std::abs(lhs) / scale);
      ++trials;
    }
  }
  report(6, "discrete energy identity (EF, over-integrated)", worst <= 1e-10,
         fmt("%d trials, worst residual %.2e (tolerance 1e-10)", trials, worst));
}

// ---------------------------------------------------------------------------
// 7. Splitting invariance for Burgers and Euler.
void criterion_7() {
  std::mt19937 rng(707);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double worst = 0.0;

  {
    const NodalBasis basis = lgl_basis(3);
    const Mesh mesh = build_interval_mesh(0, 1, 9, BoundaryKind::periodic);
    BurgersConfig bc;
    bc.kappa = 0.02;
    bc.flux = FluxKind::entropy;
    bc.sigma = 3e-4;
    const Eigen::Index n = 9 * 4;
    for (int t = 0; t < 25; ++t) {
      Eigen::VectorXd u(n), r1(n), r2(n);
      for (Eigen::Index i = 0; i < n; ++i) u[i] = gauss(rng);
      Eigen::VectorXd ua(n), ub(n);
      for (Eigen::Index i = 0; i < n; ++i) ua[i] = gauss(rng);
      for (Eigen::Index i = 0; i < n; ++i) ub[i] = gauss(rng);
      const BurgersOperator op1(mesh, basis, bc, ua);
      const BurgersOperator op2(mesh, basis, bc, ub);
      r1 = op1.apply_linear(u) + op1.apply_nonlinear(u);
      r2 = op2.apply_linear(u) + op2.apply_nonlinear(u);
      worst = std::max(worst, (r1 - r2).norm() / r1.norm());
    }
  }
  {
    const NodalBasis basis = lgl_basis(2);
    const Mesh mesh = build_quad_mesh(0, 10, -5, 5, 3, 3, BoundaryKind::periodic);
    const EulerConfig ec;
    const int np = 9, ne = 9;
    std::uniform_real_distribution<double> rho(0.5, 2.0), vel(-1.0, 1.0),
        pres(0.5, 2.0);
    auto random_field = [&]() {
      Eigen::VectorXd q(ne * np * 4);
      for (int e = 0; e < ne; ++e)
        for (int n2 = 0; n2 < np; ++n2) {
          const double r = rho(rng), u = vel(rng), v = vel(rng), p = pres(rng);
          q[e * np * 4 + 0 * np + n2] = r;
          q[e * np * 4 + 1 * np + n2] = r * u;
          q[e * np * 4 + 2 * np + n2] = r * v;
          q[e * np * 4 + 3 * np + n2] = p / 0.4 + 0.5 * r * (u * u + v * v);
        }
      return q;
    };
    for (int t = 0; t < 25; ++t) {
      const Eigen::VectorXd q = random_field();
      const EulerOperator op1(mesh, basis, ec, random_field());
      const EulerOperator op2(mesh, basis, ec, random_field());
      const Eigen::VectorXd r1 = op1.apply_linear(q) + op1.apply_nonlinear(q);
      const Eigen::VectorXd r2 = op2.apply_linear(q) + op2.apply_nonlinear(q);
      worst = std::max(worst, (r1 - r2).norm() / r1.norm());
    }
  }
  report(7, "splitting invariance (Burgers and Euler)", worst <= 1e-11,
         fmt("50 random triples, worst relative deviation %.2e", worst));
}

// ---------------------------------------------------------------------------
// 8. Euler isentropic-vortex spatial convergence (desk-scaled sweep).
void criterion_8() {
  const double published_orders[3] = {0.376, 1.276, 2.705};
  bool pass = true;
  std::string detail;
  for (int k = 1; k <= 3; ++k) {
    ExperimentConfig cfg;
    cfg.problem = "euler-vortex";
    cfg.integrator = "exprb42";
    cfg.k = k;
    cfg.ne = {256, 1024};
    cfg.dt = {0.01};
    cfg.t_final = 1.0;
    const ExperimentResult r = run_experiment(cfg);
    const double order = r.rows[1].order[0];  // rho component
    if (!near(order, published_orders[k - 1], 0.5)) pass = false;
    detail += fmt("k=%d rho order %.3f (target %.3f); ", k, order,
                  published_orders[k - 1]);
    if (k == 2) {
      const double err = r.rows[1].error[0];
      if (!within_factor(err, 1.201e-4, 3.0)) pass = false;
      detail += fmt("k=2 err@h/2 %.3e (target 1.201e-4); ", err);
    }
  }
  report(8, "Euler vortex spatial convergence", pass, detail);
}

// ---------------------------------------------------------------------------
// 9. Integrator order suite on the stiff scalar ODE and smooth Burgers.
void criterion_9() {
  bool pass = true;
  std::string detail;

  {  // Scalar ODE y' = -10 y + y^2.
    const double lambda = -10.0, y0 = 0.2, t_final = 1.0;
    const SplitProblem prob = testing::scalar_ode_problem(lambda);
    const double ref = testing::tiny_step_rk4(lambda, y0, t_final, 1e-6);
    auto order_of = [&](IntegratorKind kind) {
      std::vector<double> errors;
      for (double dt : {0.1, 0.05, 0.025}) {
        TimeLoopConfig cfg;
        cfg.dt = dt;
        cfg.t_final = t_final;
        const IntegrationResult r =
            integrate(prob, kind, Eigen::VectorXd::Constant(1, y0), cfg);
        errors.push_back(std::abs(r.u[0] - ref));
      }
      return std::log2(errors[1] / errors[2]);
    };
    const double o1 = order_of(IntegratorKind::exp_euler);
    const double o2 = order_of(IntegratorKind::epi2);
    const double o3 = order_of(IntegratorKind::exprb32);
    const double o4 = order_of(IntegratorKind::exprb42);
    if (!near(o1, 1.0, 0.2) || !near(o2, 2.0, 0.2) || !near(o3, 3.0, 0.3) ||
        !near(o4, 4.0, 0.4))
      pass = false;
    detail += fmt("ODE orders %.2f/%.2f/%.2f/%.2f; ", o1, o2, o3, o4);
  }

  {  // Smooth Burgers at k=3, ne=20.
    auto order_of = [&](const std::string& integ, double expected,
                        double tol) {
      ExperimentConfig cfg;
      cfg.problem = "burgers-smooth";
      cfg.integrator = integ;
      cfg.k = 3;
      cfg.ne = {20};
      cfg.dt = {0.4, 0.2, 0.1, 0.05};
      cfg.t_final = 1.0;
      cfg.flux = "lf";
      cfg.reference = "generate";
      cfg.ref_k = 3;
      cfg.ref_dt = 1e-5;
      cfg.ref_dir = "acceptance_refs";
      const ExperimentResult r = run_experiment(cfg);
      const double order = r.rows.back().order[0];
      if (!near(order, expected, tol)) pass = false;
      return order;
    };
    const double b1 = order_of("exp_euler", 1.0, 0.2);
    const double b2 = order_of("epi2", 2.0, 0.2);
    const double b3 = order_of("exprb32", 3.0, 0.3);
    const double b4 = order_of("exprb42", 4.0, 0.4);
    detail += fmt("Burgers orders %.2f/%.2f/%.2f/%.2f", b1, b2, b3, b4);
  }
  report(9, "integrator order suite", pass, detail);
}

// ---------------------------------------------------------------------------
// 10. Exponential-Euler combined space-time estimate.
void criterion_10() {
  // dt proportional to h across a 3-point joint sweep; total error must
  // decay at first order or better.
  ReferenceSpec spec;
  spec.problem = "burgers-smooth";
  spec.flux = "lf";
  spec.over_integrate = true;
  spec.kappa = 0.03;
  spec.integrator = "rk4";
  spec.k = 6;
  spec.ne = 80;
  spec.dt = 5e-6;
  spec.t_final = 1.0;
  const ReferenceData ref = generate_reference(spec, "acceptance_refs");

  std::vector<double> errors, scales;
  for (auto [ne, dt] : std::vector<std::pair<int, double>>{
           {10, 0.2}, {20, 0.1}, {40, 0.05}}) {
    ExperimentConfig cfg;
    cfg.problem = "burgers-smooth";
    cfg.k = 2;
    cfg.flux = "lf";
    ProblemContext ctx = make_problem(cfg, ne, 2);
    TimeLoopConfig tl;
    tl.dt = dt;
    tl.t_final = 1.0;
    const IntegrationResult run =
        integrate(ctx.split, IntegratorKind::exp_euler, ctx.u0, tl);
    FieldState s = make_state(*ctx.mesh, *ctx.basis, 1);
    s.values = run.u;
    errors.push_back(l2_error(s, *ctx.basis, ref.state, *ref.basis)[0]);
    scales.push_back(dt);
  }
  const auto orders = observed_order(errors, scales);
  const bool pass = std::isfinite(orders[0]) && std::isfinite(orders[1]) &&
                    orders[0] >= 1.0 && orders[1] >= 1.0;
  report(10, "exponential-Euler combined estimate (dt ~ h)", pass,
         fmt("errors %.3e %.3e %.3e, joint orders %.3f %.3f", errors[0],
             errors[1], errors[2], orders[0], orders[1]));
}

// ---------------------------------------------------------------------------
// 11. Conservation of the semi-discrete RHS.
void criterion_11() {
  std::mt19937 rng(1111);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double worst = 0.0;

  {
    const NodalBasis basis = lgl_basis(4);
    const Mesh mesh = build_interval_mesh(0, 1, 12, BoundaryKind::periodic);
    for (auto flux : {FluxKind::lax_friedrichs, FluxKind::entropy}) {
      BurgersConfig bc;
      bc.kappa = 0.03;
      bc.flux = flux;
      bc.sigma = 3e-4;
      const Eigen::Index n = 12 * 5;
      for (int t = 0; t < 10; ++t) {
        Eigen::VectorXd u(n);
        for (Eigen::Index i = 0; i < n; ++i) u[i] = gauss(rng);
        const BurgersOperator op(mesh, basis, bc, u);
        const Eigen::VectorXd rhs = op.apply_linear(u) + op.apply_nonlinear(u);
        const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
        worst = std::max(worst, std::abs(op.inner_product(ones, rhs)) /
                                    (1.0 + rhs.norm()));
      }
    }
  }
  {
    const NodalBasis basis = lgl_basis(2);
    const Mesh mesh = build_quad_mesh(0, 10, -5, 5, 4, 4, BoundaryKind::periodic);
    const EulerConfig ec;
    const int np = 9, ne = 16;
    std::uniform_real_distribution<double> rho(0.5, 2.0), vel(-1.0, 1.0),
        pres(0.5, 2.0);
    for (int t = 0; t < 10; ++t) {
      Eigen::VectorXd q(ne * np * 4);
      for (int e = 0; e < ne; ++e)
        for (int n2 = 0; n2 < np; ++n2) {
          const double r = rho(rng), u = vel(rng), v = vel(rng), p = pres(rng);
          q[e * np * 4 + 0 * np + n2] = r;
          q[e * np * 4 + 1 * np + n2] = r * u;
          q[e * np * 4 + 2 * np + n2] = r * v;
          q[e * np * 4 + 3 * np + n2] = p / 0.4 + 0.5 * r * (u * u + v * v);
        }
      const EulerOperator op(mesh, basis, ec, q);
      const Eigen::VectorXd rhs = op.apply_linear(q) + op.apply_nonlinear(q);
      const Eigen::VectorXd& w = basis.weights;
      for (int c = 0; c < 4; ++c) {
        double mean_rate = 0.0;
        for (int e = 0; e < ne; ++e) {
          const Element& el = mesh.elements[e];
          for (int j = 0; j < 3; ++j)
            for (int i = 0; i < 3; ++i)
              mean_rate += 0.25 * el.hx * el.hy * w[i] * w[j] *
                           rhs[e * np * 4 + c * np + j * 3 + i];
        }
        worst = std::max(worst, std::abs(mean_rate) / (1.0 + rhs.norm()));
      }
    }
  }
  report(11, "conservation of the semi-discrete RHS", worst <= 1e-11,
         fmt("worst normalized mean rate %.2e", worst));
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  if (g_failures == 0)
    std::printf("all acceptance criteria passed\n");
  else
    std::printf("%d acceptance criteria FAILED\n", g_failures);
  return g_failures;
}
