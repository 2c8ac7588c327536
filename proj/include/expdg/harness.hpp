#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "expdg/burgers.hpp"
#include "expdg/euler.hpp"
#include "expdg/integrators.hpp"
#include "expdg/mesh.hpp"

namespace expdg {

/// Experiment description; list-valued ne/dt fields drive convergence sweeps.
struct ExperimentConfig {
  std::string problem = "burgers-smooth";
  std::string integrator = "epi2";
  int k = 4;
  std::vector<int> ne = {40};
  std::vector<double> dt = {0.01};
  double t_final = 1.0;
  std::string flux;  // burgers: lf | ef (default lf); euler: roe | lf (default roe)
  double sigma = 0.0;
  bool sigma_adaptive = false;
  // Consistent mass + exact cubic volume terms; defaults on for the Burgers
  // problems, whose published stability thresholds and error constants match
  // the exactly integrated operator.
  std::optional<bool> over_integrate;
  double kappa = -1.0;  // < 0: problem default
  double krylov_tol = 1e-12;
  int krylov_max_basis = 128;
  int krylov_orth = 128;
  std::string reference;  // exact | generate | none ("" = problem default)
  // Defaults keep tiny-step RK4 inside its stability region for the
  // consistently integrated operator while staying far below measured errors.
  int ref_k = 6;
  double ref_dt = 5e-6;
  std::string ref_integrator = "rk4";
  int ref_ne = 0;  // 0: same mesh as the run
  std::string ref_dir = "refs";
  std::string out;  // CSV path, empty writes to stdout only
};

/// One sweep point of a convergence study.
struct ConvergenceRow {
  double scale = 0;  // h or dt
  Eigen::VectorXd error;
  Eigen::VectorXd order;  // NaN on the first row of a sweep
  double cr_a = 0, cr_d = 0;
  long krylov_iters = 0;
  double wallclock_s = 0;
  std::string status = "ok";
};

struct ExperimentResult {
  std::vector<std::string> comp_names;
  std::vector<ConvergenceRow> rows;
  std::string csv;
};

/// Fully assembled problem instance: mesh, basis, splitting and initial data.
struct ProblemContext {
  std::shared_ptr<Mesh> mesh;
  std::shared_ptr<NodalBasis> basis;
  int components = 1;
  std::vector<std::string> comp_names;
  SplitProblem split;
  Eigen::VectorXd u0;
  // Exact solution (x, y, t, comp); empty for problems without one.
  std::function<double(double, double, double, int)> exact;
  bool is_euler = false;
  BurgersConfig burgers;
  EulerConfig euler;
};

ProblemContext make_problem(const ExperimentConfig& cfg, int ne, int k);

/// Broken L2 error per component against an analytic reference, with
/// over-integrated quadrature (degree >= 2k + 2).
Eigen::VectorXd l2_error(const FieldState& state, const NodalBasis& basis,
                         const std::function<double(double, double, int)>& ref);

/// Error against a discrete reference evaluated at this state's quadrature
/// points (the reference mesh need not match).
Eigen::VectorXd l2_error(const FieldState& state, const NodalBasis& basis,
                         const FieldState& reference,
                         const NodalBasis& ref_basis);

/// order_i = log(e_{i-1}/e_i) / log(h_{i-1}/h_i), defined from the second
/// entry on.
std::vector<double> observed_order(const std::vector<double>& errors,
                                   const std::vector<double>& scales);

struct CourantNumbers {
  double cr_a = 0, cr_d = 0;
};
CourantNumbers courant_numbers(const FieldState& state, const NodalBasis& basis,
                               double dt, double kappa, bool euler,
                               double gamma = 1.4);

struct ReferenceSpec {
  std::string problem;
  std::string flux = "lf";
  double sigma = 0;
  bool sigma_adaptive = false;
  bool over_integrate = false;
  double kappa = 0.03;
  std::string integrator = "rk4";
  int k = 8;
  int ne = 40;
  double dt = 1e-5;
  double t_final = 1.0;
};

struct ReferenceData {
  std::shared_ptr<Mesh> mesh;
  std::shared_ptr<NodalBasis> basis;
  FieldState state;
};

std::string reference_filename(const ReferenceSpec& spec);
void save_reference(const std::string& path, const ReferenceSpec& spec,
                    const FieldState& state);
ReferenceData load_reference(const std::string& path,
                             const ReferenceSpec& expected);

/// Runs the reference integration, or reuses a stored file whose metadata
/// matches. Files live under `dir` and are written atomically.
ReferenceData generate_reference(const ReferenceSpec& spec,
                                 const std::string& dir);

ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Flat key = value file (# comments); keys mirror the CLI option names.
void apply_config_file(const std::string& path, ExperimentConfig& cfg);

}  // namespace expdg
