#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "expdg/harness.hpp"

namespace {

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::istringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
  return out;
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::istringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Matrix-free exponential DG solver for conservation laws"};
  app.require_subcommand(1);

  CLI::App* run = app.add_subcommand(
      "run", "Run an experiment (single point or ne/dt convergence sweep)");

  std::string config_path, problem, integrator, flux, sigma_str, reference,
      ref_integrator, ref_dir, out, ne_str, dt_str;
  int k = 0, krylov_max_basis = 0, krylov_orth = 0, ref_k = 0, ref_ne = -1;
  bool oi_on = false, oi_off = false;
  double t_final = -1, kappa = -1, krylov_tol = -1, ref_dt = -1;

  run->add_option("--config", config_path, "flat key = value config file");
  run->add_option("--problem", problem,
                  "burgers-mms | burgers-smooth | burgers-shock | euler-vortex");
  run->add_option("--integrator", integrator,
                  "exp_euler | epi2 | exprb32 | exprb42 | rk2 | rk3 | rk4");
  run->add_option("--k", k, "polynomial order");
  run->add_option("--ne", ne_str, "element count, or comma list for a sweep");
  run->add_option("--dt", dt_str, "time step, or comma list for a sweep");
  run->add_option("--tfinal", t_final, "final time");
  run->add_option("--flux", flux, "lf | ef (Burgers nonlinear flux)");
  run->add_option("--sigma", sigma_str, "entropy-flux penalty, or 'adaptive'");
  run->add_option("--kappa", kappa, "viscosity (Burgers)");
  run->add_flag("--over-integrate", oi_on,
                "consistent mass matrix and exact cubic volume terms "
                "(default on for Burgers problems)");
  run->add_flag("--no-over-integrate", oi_off, "LGL collocation throughout");
  run->add_option("--krylov-tol", krylov_tol, "phi-combination tolerance");
  run->add_option("--krylov-max-basis", krylov_max_basis, "max Krylov basis");
  run->add_option("--krylov-orth", krylov_orth,
                  "orthogonalization window (>= max basis: full Arnoldi)");
  run->add_option("--reference", reference, "exact | generate | none");
  run->add_option("--ref-k", ref_k, "reference run order");
  run->add_option("--ref-dt", ref_dt, "reference run time step");
  run->add_option("--ref-integrator", ref_integrator, "reference integrator");
  run->add_option("--ref-ne", ref_ne, "reference element count (0: same)");
  run->add_option("--ref-dir", ref_dir, "reference cache directory");
  run->add_option("--out", out, "CSV output path");

  CLI11_PARSE(app, argc, argv);

  try {
    expdg::ExperimentConfig cfg;
    if (!config_path.empty()) expdg::apply_config_file(config_path, cfg);
    if (!problem.empty()) cfg.problem = problem;
    if (!integrator.empty()) cfg.integrator = integrator;
    if (k > 0) cfg.k = k;
    if (!ne_str.empty()) cfg.ne = parse_int_list(ne_str);
    if (!dt_str.empty()) cfg.dt = parse_double_list(dt_str);
    if (t_final >= 0) cfg.t_final = t_final;
    if (!flux.empty()) cfg.flux = flux;
    if (!sigma_str.empty()) {
      if (sigma_str == "adaptive")
        cfg.sigma_adaptive = true;
      else
        cfg.sigma = std::stod(sigma_str);
    }
    if (kappa >= 0) cfg.kappa = kappa;
    if (oi_on) cfg.over_integrate = true;
    else if (oi_off) cfg.over_integrate = false;
    if (krylov_tol > 0) cfg.krylov_tol = krylov_tol;
    if (krylov_max_basis > 0) cfg.krylov_max_basis = krylov_max_basis;
    if (krylov_orth > 0) cfg.krylov_orth = krylov_orth;
    if (!reference.empty()) cfg.reference = reference;
    if (ref_k > 0) cfg.ref_k = ref_k;
    if (ref_dt > 0) cfg.ref_dt = ref_dt;
    if (!ref_integrator.empty()) cfg.ref_integrator = ref_integrator;
    if (ref_ne >= 0) cfg.ref_ne = ref_ne;
    if (!ref_dir.empty()) cfg.ref_dir = ref_dir;
    if (!out.empty()) cfg.out = out;

    const expdg::ExperimentResult result = expdg::run_experiment(cfg);
    std::cout << result.csv;
    if (!cfg.out.empty()) std::cerr << "wrote " << cfg.out << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
