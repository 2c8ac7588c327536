#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "expdg/harness.hpp"

using namespace expdg;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("expdg_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("observed_order") {
  // Paper's k=1 LF rows reproduce the published rate.
  const auto o1 = observed_order({4.093e-4, 1.223e-4}, {1.0 / 20, 1.0 / 40});
  CHECK(o1[0] == doctest::Approx(1.743).epsilon(1e-3));

  const auto o2 = observed_order({2.0, 2.0}, {1.0, 0.5});
  CHECK(o2[0] == doctest::Approx(0.0));

  const auto o3 = observed_order({8.0, 1.0}, {2.0, 1.0});
  CHECK(o3[0] == doctest::Approx(3.0));

  CHECK_THROWS_AS(observed_order({1.0}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(observed_order({1.0, -1.0}, {1.0, 0.5}), std::invalid_argument);

  // Invariance under uniform scaling of errors and of scales.
  const auto base = observed_order({1e-2, 1e-3, 1e-4}, {4.0, 2.0, 1.0});
  const auto scaled = observed_order({5e-2, 5e-3, 5e-4}, {8.0, 4.0, 2.0});
  for (size_t i = 0; i < base.size(); ++i)
    CHECK(base[i] == doctest::Approx(scaled[i]).epsilon(1e-13));
}

TEST_CASE("l2_error basics") {
  const NodalBasis b = lgl_basis(4);
  const Mesh mesh = build_interval_mesh(0, 1, 10, BoundaryKind::periodic);
  const QuadratureRule quad = gauss_quadrature(8);

  SUBCASE("state equals reference") {
    const FieldState s = l2_project(
        [](double x) { return std::cos(x); }, mesh, b, quad);
    const Eigen::VectorXd e = l2_error(s, b, s, b);
    CHECK(e[0] < 1e-14);
  }

  SUBCASE("unit constant against zero") {
    FieldState s = make_state(mesh, b, 1);
    s.values.setOnes();
    const Eigen::VectorXd e =
        l2_error(s, b, [](double, double, int) { return 0.0; });
    CHECK(e[0] == doctest::Approx(1.0).epsilon(1e-13));
  }

  SUBCASE("projection error of sin(2 pi x) decays at order 5") {
    std::vector<double> errors, scales;
    for (int ne : {10, 20, 40}) {
      const Mesh m = build_interval_mesh(0, 1, ne, BoundaryKind::periodic);
      const FieldState s = l2_project(
          [](double x) { return std::sin(2 * M_PI * x); }, m, b, quad);
      errors.push_back(l2_error(s, b, [](double x, double, int) {
                         return std::sin(2 * M_PI * x);
                       })[0]);
      scales.push_back(1.0 / ne);
    }
    const auto orders = observed_order(errors, scales);
    for (double o : orders) CHECK(o == doctest::Approx(5.0).epsilon(0.06));
  }
}

TEST_CASE("courant numbers") {
  const NodalBasis b = lgl_basis(4);
  const Mesh mesh = build_interval_mesh(0, 1, 40, BoundaryKind::dirichlet_zero);

  SUBCASE("diffusion number matches the published convention") {
    FieldState s = make_state(mesh, b, 1);
    s.values.setZero();
    const CourantNumbers cr = courant_numbers(s, b, 0.1, 0.03, false);
    CHECK(cr.cr_d == doctest::Approx(161.0).epsilon(1e-3));
    CHECK(cr.cr_a == doctest::Approx(0.0));
  }

  SUBCASE("zero state, zero viscosity") {
    FieldState s = make_state(mesh, b, 1);
    const CourantNumbers cr = courant_numbers(s, b, 0.1, 0.0, false);
    CHECK(cr.cr_a == 0.0);
    CHECK(cr.cr_d == 0.0);
  }

  SUBCASE("euler speed is |u| + a at the mean flow") {
    const NodalBasis b1 = lgl_basis(1);
    const Mesh m2 = build_quad_mesh(0, 10, -5, 5, 4, 4, BoundaryKind::periodic);
    FieldState s = make_state(m2, b1, 4);
    const double rhoE = 1.0 / 0.4 + 0.5 * 0.04;
    for (int e = 0; e < 16; ++e)
      for (int n = 0; n < 4; ++n) {
        s.at(e, n, 0) = 1.0;
        s.at(e, n, 1) = 0.2;
        s.at(e, n, 2) = 0.0;
        s.at(e, n, 3) = rhoE;
      }
    const double dt = 0.5;
    const CourantNumbers cr = courant_numbers(s, b1, dt, 0.0, true, 1.4);
    const double c = 0.2 + std::sqrt(1.4);
    CHECK(c == doctest::Approx(1.3832).epsilon(1e-4));
    const double dx = min_node_spacing(m2, b1);
    CHECK(cr.cr_a == doctest::Approx(c * dt / dx).epsilon(1e-13));
  }
}

TEST_CASE("reference files") {
  TempDir tmp;
  ReferenceSpec spec;
  spec.problem = "burgers-smooth";
  spec.flux = "lf";
  spec.kappa = 0.03;
  spec.integrator = "rk4";
  spec.k = 3;
  spec.ne = 10;
  spec.dt = 1e-3;
  spec.t_final = 0.01;

  SUBCASE("generate, reload, and bit-identical regeneration") {
    const ReferenceData a = generate_reference(spec, tmp.path.string());
    const std::string path =
        (tmp.path / reference_filename(spec)).string();
    REQUIRE(std::filesystem::exists(path));
    std::ifstream f1(path);
    const std::string contents1((std::istreambuf_iterator<char>(f1)),
                                std::istreambuf_iterator<char>());
    // Self-comparison is exactly zero.
    CHECK(l2_error(a.state, *a.basis, a.state, *a.basis)[0] < 1e-15);

    std::filesystem::remove(path);
    const ReferenceData b = generate_reference(spec, tmp.path.string());
    std::ifstream f2(path);
    const std::string contents2((std::istreambuf_iterator<char>(f2)),
                                std::istreambuf_iterator<char>());
    CHECK(contents1 == contents2);
    CHECK((a.state.values - b.state.values).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("metadata mismatch on reuse is an error") {
    generate_reference(spec, tmp.path.string());
    ReferenceSpec other = spec;
    other.kappa = 0.05;
    // Different metadata hashes to a different filename; force a clash.
    std::filesystem::rename(tmp.path / reference_filename(spec),
                            tmp.path / reference_filename(other));
    CHECK_THROWS_WITH_AS(generate_reference(other, tmp.path.string()),
                         doctest::Contains("metadata mismatch"),
                         std::runtime_error);
  }

  SUBCASE("dt-refinement consistency of the reference itself") {
    ReferenceSpec coarse = spec;
    coarse.dt = 5e-4;
    ReferenceSpec fine = spec;
    fine.dt = 2.5e-4;
    const ReferenceData a = generate_reference(coarse, tmp.path.string());
    const ReferenceData b = generate_reference(fine, tmp.path.string());
    CHECK(l2_error(a.state, *a.basis, b.state, *b.basis)[0] < 1e-9);
  }
}

TEST_CASE("run_experiment smoke tests") {
  TempDir tmp;

  SUBCASE("manufactured solution, single row, exact reference") {
    ExperimentConfig cfg;
    cfg.problem = "burgers-mms";
    cfg.integrator = "exprb32";
    cfg.k = 2;
    cfg.ne = {10};
    cfg.dt = {1e-3};
    cfg.t_final = 0.01;
    cfg.flux = "lf";
    const ExperimentResult res = run_experiment(cfg);
    REQUIRE(res.rows.size() == 1);
    CHECK(res.rows[0].status == "ok");
    CHECK(res.rows[0].error[0] > 0.0);
    CHECK(res.rows[0].error[0] < 1e-3);
    CHECK(res.rows[0].krylov_iters > 0);
  }

  SUBCASE("csv round-trips the values") {
    ExperimentConfig cfg;
    cfg.problem = "burgers-mms";
    cfg.integrator = "epi2";
    cfg.k = 1;
    cfg.ne = {8, 16};
    cfg.dt = {1e-3};
    cfg.t_final = 0.01;
    cfg.out = (tmp.path / "rows.csv").string();
    const ExperimentResult res = run_experiment(cfg);
    REQUIRE(res.rows.size() == 2);

    std::ifstream is(cfg.out);
    std::string header, line1, line2;
    std::getline(is, header);
    std::getline(is, line1);
    std::getline(is, line2);
    CHECK(header ==
          "scale,error_u,order_u,cr_a,cr_d,krylov_iters,wallclock_s,status");
    // Parse the error field back and compare bits.
    auto field = [](const std::string& line, int idx) {
      std::istringstream ss(line);
      std::string item;
      for (int i = 0; i <= idx; ++i) std::getline(ss, item, ',');
      return item;
    };
    CHECK(std::stod(field(line1, 1)) == res.rows[0].error[0]);
    CHECK(std::stod(field(line2, 1)) == res.rows[1].error[0]);
    CHECK(field(line1, 2).empty());  // no order on the first row
    CHECK(std::stod(field(line2, 2)) == res.rows[1].order[0]);
  }

  SUBCASE("blow-up reported as a row, not a crash") {
    ExperimentConfig cfg;
    cfg.problem = "burgers-smooth";
    cfg.integrator = "rk2";
    cfg.k = 4;
    cfg.ne = {40};
    cfg.dt = {2e-4};
    cfg.t_final = 1.0;
    cfg.over_integrate = true;
    cfg.reference = "none";
    const ExperimentResult res = run_experiment(cfg);
    REQUIRE(res.rows.size() == 1);
    CHECK(res.rows[0].status == "blow_up");
  }

  SUBCASE("shock problem rejects odd element counts") {
    ExperimentConfig cfg;
    cfg.problem = "burgers-shock";
    cfg.ne = {41};
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
  }
}

TEST_CASE("config file parsing") {
  TempDir tmp;
  const std::string path = (tmp.path / "exp.cfg").string();
  {
    std::ofstream os(path);
    os << "# comment line\n";
    os << "problem = burgers-shock\n";
    os << "integrator = exprb42\n";
    os << "k = 3\n";
    os << "ne = 40,80\n";
    os << "dt = 5e-5\n";
    os << "tfinal = 1\n";
    os << "flux = ef\n";
    os << "sigma = adaptive\n";
    os << "kappa = 0.002\n";
  }
  ExperimentConfig cfg;
  apply_config_file(path, cfg);
  CHECK(cfg.problem == "burgers-shock");
  CHECK(cfg.integrator == "exprb42");
  CHECK(cfg.k == 3);
  CHECK(cfg.ne == std::vector<int>{40, 80});
  CHECK(cfg.dt.size() == 1);
  CHECK(cfg.flux == "ef");
  CHECK(cfg.sigma_adaptive);
  CHECK(cfg.kappa == doctest::Approx(0.002));

  {
    std::ofstream os(path);
    os << "nonsense_key = 1\n";
  }
  ExperimentConfig bad;
  CHECK_THROWS_AS(apply_config_file(path, bad), std::runtime_error);
}
