#include "expdg/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace expdg {

namespace {

double mms_solution(double x) { return std::sin(x * x) * x * (x - 1.0); }

double mms_solution_dx(double x) {
  return 2.0 * x * std::cos(x * x) * (x * x - x) +
         std::sin(x * x) * (2.0 * x - 1.0);
}

double mms_solution_dxx(double x) {
  const double s = std::sin(x * x), c = std::cos(x * x);
  return 2.0 * c * (x * x - x) - 4.0 * x * x * s * (x * x - x) +
         4.0 * x * c * (2.0 * x - 1.0) + 2.0 * s;
}

double smooth_initial(double x) {
  const double s = std::sin(2.0 * M_PI * x);
  return s * s * s * std::pow(1.0 - x, 1.5);
}

FluxKind flux_from_name(const std::string& name) {
  if (name == "lf") return FluxKind::lax_friedrichs;
  if (name == "ef") return FluxKind::entropy;
  throw std::invalid_argument("unknown flux '" + name + "' (use lf or ef)");
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

ProblemContext make_problem(const ExperimentConfig& cfg, int ne, int k) {
  ProblemContext ctx;
  ctx.basis = std::make_shared<NodalBasis>(lgl_basis(k));
  const QuadratureRule proj_quad = gauss_quadrature(k + 2);

  if (cfg.problem == "euler-vortex") {
    const int nx = static_cast<int>(std::lround(std::sqrt(double(ne))));
    if (nx * nx != ne)
      throw std::invalid_argument("euler-vortex: ne must be a perfect square");
    ctx.mesh = std::make_shared<Mesh>(
        build_quad_mesh(0, 10, -5, 5, nx, nx, BoundaryKind::periodic));
    ctx.is_euler = true;
    ctx.components = 4;
    ctx.comp_names = {"rho", "rhou", "rhov", "rhoE"};
    ctx.euler = EulerConfig{};
    if (cfg.flux == "lf")
      ctx.euler.flux = EulerFluxKind::lax_friedrichs;
    else if (!cfg.flux.empty() && cfg.flux != "roe")
      throw std::invalid_argument("euler-vortex flux must be roe or lf");
    const EulerConfig ecfg = ctx.euler;
    ctx.exact = [ecfg](double x, double y, double t, int comp) {
      return isentropic_vortex(x, y, t, ecfg)[comp];
    };
    FieldState ic = l2_project_system(
        [&ecfg](double x, double y) {
          return Eigen::VectorXd(isentropic_vortex(x, y, 0.0, ecfg));
        },
        4, *ctx.mesh, *ctx.basis, proj_quad);
    ctx.u0 = ic.values;
    auto mesh = ctx.mesh;
    auto basis = ctx.basis;
    ctx.split.dim = ctx.u0.size();
    ctx.split.linearize = [mesh, basis, ecfg](const Eigen::VectorXd& ref) {
      return euler_split_operator(*mesh, *basis, ecfg, ref);
    };
    ctx.split.rhs = [mesh, basis, ecfg](const Eigen::VectorXd& q) {
      return euler_full_rhs(*mesh, *basis, ecfg, q);
    };
    return ctx;
  }

  // Viscous Burgers family on (0,1) with zero Dirichlet data.
  BurgersConfig bc;
  bc.flux = flux_from_name(cfg.flux.empty() ? "lf" : cfg.flux);
  bc.sigma = cfg.sigma;
  bc.sigma_adaptive = cfg.sigma_adaptive;
  bc.over_integrate = cfg.over_integrate.value_or(true);
  std::function<double(double)> initial;

  if (cfg.problem == "burgers-mms") {
    bc.kappa = cfg.kappa >= 0.0 ? cfg.kappa : 0.03;
    const double kap = bc.kappa;
    bc.source = [kap](double x) {
      return mms_solution(x) * mms_solution_dx(x) - kap * mms_solution_dxx(x);
    };
    initial = mms_solution;
    ctx.exact = [](double x, double, double, int) { return mms_solution(x); };
  } else if (cfg.problem == "burgers-smooth") {
    bc.kappa = cfg.kappa >= 0.0 ? cfg.kappa : 0.03;
    initial = smooth_initial;
  } else if (cfg.problem == "burgers-shock") {
    bc.kappa = cfg.kappa >= 0.0 ? cfg.kappa : 0.002;
    if (ne % 2 != 0)
      throw std::invalid_argument(
          "burgers-shock: ne must be even so a mesh line sits on x = 0.5");
    // A uniform penalty under-dissipates the steep interface; follow the
    // state-adaptive sigma unless one was given explicitly.
    if (bc.flux == FluxKind::entropy && bc.sigma == 0.0 && !bc.sigma_adaptive)
      bc.sigma_adaptive = true;
    initial = [](double x) { return std::sin(2.0 * M_PI * x); };
  } else {
    throw std::invalid_argument("unknown problem '" + cfg.problem + "'");
  }

  ctx.mesh = std::make_shared<Mesh>(
      build_interval_mesh(0.0, 1.0, ne, BoundaryKind::dirichlet_zero));
  ctx.components = 1;
  ctx.comp_names = {"u"};
  ctx.burgers = bc;
  FieldState ic = l2_project(initial, *ctx.mesh, *ctx.basis, proj_quad);
  ctx.u0 = ic.values;
  auto mesh = ctx.mesh;
  auto basis = ctx.basis;
  ctx.split.dim = ctx.u0.size();
  ctx.split.linearize = [mesh, basis, bc](const Eigen::VectorXd& ref) {
    return burgers_split_operator(*mesh, *basis, bc, ref);
  };
  // The full RHS needs no reference state; one operator serves every call.
  auto full_op = std::make_shared<BurgersOperator>(
      *mesh, *basis, bc, Eigen::VectorXd::Zero(ctx.u0.size()));
  ctx.split.rhs = [mesh, basis, full_op](const Eigen::VectorXd& u) {
    return full_op->full_rhs(u);
  };
  return ctx;
}

Eigen::VectorXd l2_error(const FieldState& state, const NodalBasis& basis,
                         const std::function<double(double, double, int)>& ref) {
  const Mesh& mesh = *state.mesh;
  const QuadratureRule quad = gauss_quadrature(basis.order + 2);
  const Eigen::MatrixXd iq = interpolation_matrix(basis, quad.points);
  const Eigen::Index nq = quad.points.size();
  Eigen::VectorXd err2 = Eigen::VectorXd::Zero(state.components);

  if (mesh.dim == 1) {
    for (int e = 0; e < mesh.num_elements(); ++e) {
      const Element& el = mesh.elements[e];
      for (int c = 0; c < state.components; ++c) {
        const Eigen::VectorXd uq = iq * state.component(e, c);
        for (Eigen::Index q = 0; q < nq; ++q) {
          const double x = el.x0 + 0.5 * (quad.points[q] + 1.0) * el.hx;
          const double d = uq[q] - ref(x, 0.0, c);
          err2[c] += 0.5 * el.hx * quad.weights[q] * d * d;
        }
      }
    }
    return err2.cwiseSqrt();
  }

  const int np1 = basis.num_nodes();
  Eigen::MatrixXd nodal(np1, np1);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Element& el = mesh.elements[e];
    for (int c = 0; c < state.components; ++c) {
      const auto block = state.component(e, c);
      for (int j = 0; j < np1; ++j)
        for (int i = 0; i < np1; ++i) nodal(i, j) = block[j * np1 + i];
      const Eigen::MatrixXd uq = iq * nodal * iq.transpose();  // (qx, qy)
      for (Eigen::Index qy = 0; qy < nq; ++qy) {
        const double y = el.y0 + 0.5 * (quad.points[qy] + 1.0) * el.hy;
        for (Eigen::Index qx = 0; qx < nq; ++qx) {
          const double x = el.x0 + 0.5 * (quad.points[qx] + 1.0) * el.hx;
          const double d = uq(qx, qy) - ref(x, y, c);
          err2[c] += 0.25 * el.hx * el.hy * quad.weights[qx] *
                     quad.weights[qy] * d * d;
        }
      }
    }
  }
  return err2.cwiseSqrt();
}

Eigen::VectorXd l2_error(const FieldState& state, const NodalBasis& basis,
                         const FieldState& reference,
                         const NodalBasis& ref_basis) {
  if (state.components != reference.components)
    throw std::invalid_argument("l2_error: component count mismatch");
  return l2_error(state, basis,
                  [&reference, &ref_basis](double x, double y, int c) {
                    return evaluate(reference, ref_basis, x, y, c);
                  });
}

std::vector<double> observed_order(const std::vector<double>& errors,
                                   const std::vector<double>& scales) {
  if (errors.size() != scales.size() || errors.size() < 2)
    throw std::invalid_argument("observed_order: need matching lists, length >= 2");
  for (double e : errors)
    if (!(e > 0.0)) throw std::invalid_argument("observed_order: nonpositive error");
  for (double s : scales)
    if (!(s > 0.0)) throw std::invalid_argument("observed_order: nonpositive scale");
  std::vector<double> orders;
  for (size_t i = 1; i < errors.size(); ++i)
    orders.push_back(std::log(errors[i - 1] / errors[i]) /
                     std::log(scales[i - 1] / scales[i]));
  return orders;
}

CourantNumbers courant_numbers(const FieldState& state, const NodalBasis& basis,
                               double dt, double kappa, bool euler,
                               double gamma) {
  const double dx = min_node_spacing(*state.mesh, basis);
  double c = 0.0;
  const int np = state.nodes_per_element();
  for (int e = 0; e < state.mesh->num_elements(); ++e) {
    for (int n = 0; n < np; ++n) {
      if (euler) {
        EulerState q;
        for (int comp = 0; comp < 4; ++comp) q[comp] = state.at(e, n, comp);
        const EulerPrimitives pr = primitives(q, gamma);
        c = std::max(c, std::max(std::abs(pr.u), std::abs(pr.v)) + pr.a);
      } else {
        c = std::max(c, std::abs(state.at(e, n, 0)));
      }
    }
  }
  CourantNumbers cr;
  cr.cr_a = c * dt / dx;
  cr.cr_d = kappa * dt / (dx * dx);
  return cr;
}

std::string reference_filename(const ReferenceSpec& spec) {
  std::ostringstream name;
  name << spec.problem << "_" << spec.flux;
  if (spec.sigma_adaptive)
    name << "_sadapt";
  else if (spec.sigma != 0.0)
    name << "_s" << spec.sigma;
  if (spec.over_integrate) name << "_oi";
  name << "_kap" << spec.kappa << "_" << spec.integrator << "_k" << spec.k
       << "_ne" << spec.ne << "_dt" << spec.dt << "_t" << spec.t_final
       << ".ref";
  return name.str();
}

namespace {

void write_header(std::ostream& os, const ReferenceSpec& spec,
                  Eigen::Index size, int components) {
  os << "expdg-reference-v1\n";
  os << "problem " << spec.problem << "\n";
  os << "flux " << spec.flux << "\n";
  os << "sigma " << format_double(spec.sigma) << "\n";
  os << "sigma_adaptive " << (spec.sigma_adaptive ? 1 : 0) << "\n";
  os << "over_integrate " << (spec.over_integrate ? 1 : 0) << "\n";
  os << "kappa " << format_double(spec.kappa) << "\n";
  os << "integrator " << spec.integrator << "\n";
  os << "k " << spec.k << "\n";
  os << "ne " << spec.ne << "\n";
  os << "dt " << format_double(spec.dt) << "\n";
  os << "t_final " << format_double(spec.t_final) << "\n";
  os << "components " << components << "\n";
  os << "size " << size << "\n";
}

ExperimentConfig config_for_reference(const ReferenceSpec& spec) {
  ExperimentConfig cfg;
  cfg.problem = spec.problem;
  cfg.flux = spec.flux;
  cfg.sigma = spec.sigma;
  cfg.sigma_adaptive = spec.sigma_adaptive;
  cfg.over_integrate = spec.over_integrate;
  cfg.kappa = spec.kappa;
  return cfg;
}

}  // namespace

void save_reference(const std::string& path, const ReferenceSpec& spec,
                    const FieldState& state) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp);
    if (!os) throw std::runtime_error("cannot write reference file " + tmp);
    write_header(os, spec, state.values.size(), state.components);
    for (Eigen::Index i = 0; i < state.values.size(); ++i)
      os << format_double(state.values[i]) << "\n";
  }
  std::filesystem::rename(tmp, path);
}

ReferenceData load_reference(const std::string& path,
                             const ReferenceSpec& expected) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open reference file " + path);
  std::string line;
  std::getline(is, line);
  if (line != "expdg-reference-v1")
    throw std::runtime_error("reference file format mismatch: " + path);

  std::map<std::string, std::string> hdr;
  Eigen::Index size = 0;
  int components = 0;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string key, value;
    ls >> key >> value;
    hdr[key] = value;
    if (key == "size") {
      size = std::stoll(value);
      break;
    }
    if (key == "components") components = std::stoi(value);
  }

  auto mismatch = [&](const std::string& what) {
    throw std::runtime_error("reference metadata mismatch (" + what + ") in " +
                             path);
  };
  if (hdr["problem"] != expected.problem) mismatch("problem");
  if (hdr["flux"] != expected.flux) mismatch("flux");
  if (std::stod(hdr["sigma"]) != expected.sigma) mismatch("sigma");
  if (std::stoi(hdr["sigma_adaptive"]) != (expected.sigma_adaptive ? 1 : 0))
    mismatch("sigma_adaptive");
  if (std::stoi(hdr["over_integrate"]) != (expected.over_integrate ? 1 : 0))
    mismatch("over_integrate");
  if (std::stod(hdr["kappa"]) != expected.kappa) mismatch("kappa");
  if (hdr["integrator"] != expected.integrator) mismatch("integrator");
  if (std::stoi(hdr["k"]) != expected.k) mismatch("k");
  if (std::stoi(hdr["ne"]) != expected.ne) mismatch("ne");
  if (std::stod(hdr["dt"]) != expected.dt) mismatch("dt");
  if (std::stod(hdr["t_final"]) != expected.t_final) mismatch("t_final");

  ReferenceData data;
  const ExperimentConfig cfg = config_for_reference(expected);
  ProblemContext ctx = make_problem(cfg, expected.ne, expected.k);
  data.mesh = ctx.mesh;
  data.basis = ctx.basis;
  data.state = make_state(*data.mesh, *data.basis, components);
  if (data.state.values.size() != size)
    throw std::runtime_error("reference size mismatch in " + path);
  for (Eigen::Index i = 0; i < size; ++i) {
    if (!std::getline(is, line))
      throw std::runtime_error("truncated reference file " + path);
    data.state.values[i] = std::stod(line);
  }
  return data;
}

ReferenceData generate_reference(const ReferenceSpec& spec,
                                 const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::string path =
      (std::filesystem::path(dir) / reference_filename(spec)).string();
  if (std::filesystem::exists(path)) return load_reference(path, spec);

  const ExperimentConfig cfg = config_for_reference(spec);
  ProblemContext ctx = make_problem(cfg, spec.ne, spec.k);
  TimeLoopConfig tl;
  tl.dt = spec.dt;
  tl.t_final = spec.t_final;
  IntegrationResult run = integrate(
      ctx.split, integrator_from_name(spec.integrator), ctx.u0, tl);
  if (run.status != RunStatus::completed)
    throw std::runtime_error(
        "reference run blew up at step " + std::to_string(run.blow_up_step) +
        " (explicit reference integrators need ref_dt below their stability "
        "limit; reduce --ref-dt or lower --ref-k)");
  FieldState state = make_state(*ctx.mesh, *ctx.basis, ctx.components);
  state.values = run.u;
  save_reference(path, spec, state);

  ReferenceData data;
  data.mesh = ctx.mesh;
  data.basis = ctx.basis;
  data.state = std::move(state);
  return data;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  ExperimentResult result;
  const IntegratorKind kind = integrator_from_name(cfg.integrator);

  const bool spatial_sweep = cfg.ne.size() > 1;
  if (spatial_sweep && cfg.dt.size() > 1)
    throw std::invalid_argument("sweep either ne or dt, not both");
  const size_t points = spatial_sweep ? cfg.ne.size() : cfg.dt.size();

  for (size_t i = 0; i < points; ++i) {
    const int ne = spatial_sweep ? cfg.ne[i] : cfg.ne.front();
    const double dt = spatial_sweep ? cfg.dt.front() : cfg.dt[i];
    ProblemContext ctx = make_problem(cfg, ne, cfg.k);
    if (result.comp_names.empty()) result.comp_names = ctx.comp_names;

    TimeLoopConfig tl;
    tl.dt = dt;
    tl.t_final = cfg.t_final;
    tl.krylov.tol = cfg.krylov_tol;
    tl.krylov.max_basis = cfg.krylov_max_basis;
    tl.krylov.orth_length = cfg.krylov_orth;

    FieldState initial = make_state(*ctx.mesh, *ctx.basis, ctx.components);
    initial.values = ctx.u0;
    const CourantNumbers cr =
        courant_numbers(initial, *ctx.basis, dt,
                        ctx.is_euler ? 0.0 : ctx.burgers.kappa, ctx.is_euler,
                        ctx.euler.gamma);

    const auto t0 = std::chrono::steady_clock::now();
    IntegrationResult run = integrate(ctx.split, kind, ctx.u0, tl);
    const auto t1 = std::chrono::steady_clock::now();

    ConvergenceRow row;
    const bool temporal_sweep = !spatial_sweep && cfg.dt.size() > 1;
    row.scale = temporal_sweep ? dt : ctx.mesh->elements.front().hx;
    row.cr_a = cr.cr_a;
    row.cr_d = cr.cr_d;
    row.krylov_iters = run.krylov_iterations;
    row.wallclock_s = std::chrono::duration<double>(t1 - t0).count();
    row.error = Eigen::VectorXd::Constant(
        ctx.components, std::numeric_limits<double>::quiet_NaN());
    row.order = row.error;

    if (run.status == RunStatus::blew_up) {
      row.status = "blow_up";
    } else {
      FieldState final_state = make_state(*ctx.mesh, *ctx.basis, ctx.components);
      final_state.values = run.u;
      std::string ref_mode = cfg.reference;
      if (ref_mode.empty()) ref_mode = ctx.exact ? "exact" : "generate";
      if (ref_mode == "exact") {
        if (!ctx.exact)
          throw std::invalid_argument("no exact solution for " + cfg.problem);
        const double tf = cfg.t_final;
        auto exact = ctx.exact;
        row.error = l2_error(final_state, *ctx.basis,
                             [exact, tf](double x, double y, int c) {
                               return exact(x, y, tf, c);
                             });
      } else if (ref_mode == "generate") {
        ReferenceSpec spec;
        spec.problem = cfg.problem;
        spec.flux = cfg.flux.empty() ? (ctx.is_euler ? "roe" : "lf") : cfg.flux;
        spec.sigma = cfg.sigma;
        spec.sigma_adaptive = ctx.burgers.sigma_adaptive;
        spec.over_integrate = ctx.burgers.over_integrate && !ctx.is_euler;
        spec.kappa = ctx.is_euler ? 0.0 : ctx.burgers.kappa;
        spec.integrator = cfg.ref_integrator;
        spec.k = cfg.ref_k;
        spec.ne = cfg.ref_ne > 0 ? cfg.ref_ne : ne;
        spec.dt = cfg.ref_dt;
        spec.t_final = cfg.t_final;
        ReferenceData ref = generate_reference(spec, cfg.ref_dir);
        row.error = l2_error(final_state, *ctx.basis, ref.state, *ref.basis);
      } else if (ref_mode != "none") {
        throw std::invalid_argument("unknown reference mode '" + ref_mode + "'");
      }
    }
    result.rows.push_back(std::move(row));
  }

  // Orders between consecutive valid rows.
  for (size_t i = 1; i < result.rows.size(); ++i) {
    ConvergenceRow& cur = result.rows[i];
    const ConvergenceRow& prev = result.rows[i - 1];
    for (Eigen::Index c = 0; c < cur.error.size(); ++c) {
      if (cur.error[c] > 0 && prev.error[c] > 0)
        cur.order[c] = std::log(prev.error[c] / cur.error[c]) /
                       std::log(prev.scale / cur.scale);
    }
  }

  std::ostringstream csv;
  csv << "scale";
  for (const auto& c : result.comp_names) csv << ",error_" << c;
  for (const auto& c : result.comp_names) csv << ",order_" << c;
  csv << ",cr_a,cr_d,krylov_iters,wallclock_s,status\n";
  for (const auto& row : result.rows) {
    csv << format_double(row.scale);
    for (Eigen::Index c = 0; c < row.error.size(); ++c)
      csv << "," << (std::isfinite(row.error[c]) ? format_double(row.error[c]) : "");
    for (Eigen::Index c = 0; c < row.order.size(); ++c)
      csv << "," << (std::isfinite(row.order[c]) ? format_double(row.order[c]) : "");
    csv << "," << format_double(row.cr_a) << "," << format_double(row.cr_d)
        << "," << row.krylov_iters << "," << format_double(row.wallclock_s)
        << "," << row.status << "\n";
  }
  result.csv = csv.str();

  if (!cfg.out.empty()) {
    std::ofstream os(cfg.out);
    if (!os) throw std::runtime_error("cannot write " + cfg.out);
    os << result.csv;
  }
  return result;
}

void apply_config_file(const std::string& path, ExperimentConfig& cfg) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config file " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                 ": expected key = value");
      continue;
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    auto split_list = [](const std::string& s) {
      std::vector<std::string> out;
      std::istringstream ss(s);
      std::string item;
      while (std::getline(ss, item, ',')) out.push_back(item);
      return out;
    };
    if (key == "problem") cfg.problem = value;
    else if (key == "integrator") cfg.integrator = value;
    else if (key == "k") cfg.k = std::stoi(value);
    else if (key == "ne") {
      cfg.ne.clear();
      for (const auto& s : split_list(value)) cfg.ne.push_back(std::stoi(s));
    } else if (key == "dt") {
      cfg.dt.clear();
      for (const auto& s : split_list(value)) cfg.dt.push_back(std::stod(s));
    } else if (key == "tfinal") cfg.t_final = std::stod(value);
    else if (key == "flux") cfg.flux = value;
    else if (key == "sigma") {
      if (value == "adaptive") cfg.sigma_adaptive = true;
      else cfg.sigma = std::stod(value);
    } else if (key == "kappa") cfg.kappa = std::stod(value);
    else if (key == "over_integrate") cfg.over_integrate = (value == "1" || value == "true");
    else if (key == "krylov_tol") cfg.krylov_tol = std::stod(value);
    else if (key == "krylov_max_basis") cfg.krylov_max_basis = std::stoi(value);
    else if (key == "krylov_orth") cfg.krylov_orth = std::stoi(value);
    else if (key == "reference") cfg.reference = value;
    else if (key == "ref_k") cfg.ref_k = std::stoi(value);
    else if (key == "ref_dt") cfg.ref_dt = std::stod(value);
    else if (key == "ref_integrator") cfg.ref_integrator = value;
    else if (key == "ref_ne") cfg.ref_ne = std::stoi(value);
    else if (key == "ref_dir") cfg.ref_dir = value;
    else if (key == "out") cfg.out = value;
    else
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": unknown key '" + key + "'");
  }
}

}  // namespace expdg
