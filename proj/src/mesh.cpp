#include "expdg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace expdg {

namespace {

std::vector<double> uniform_breaks(double a, double b, int n) {
  std::vector<double> xs(n + 1);
  for (int i = 0; i <= n; ++i) xs[i] = a + (b - a) * i / n;
  xs[n] = b;
  return xs;
}

void check_grading(const std::vector<double>& g, double lo, double hi) {
  if (g.front() != lo || g.back() != hi)
    throw std::invalid_argument("grading list must span the domain");
  for (size_t i = 1; i < g.size(); ++i)
    if (g[i] <= g[i - 1])
      throw std::invalid_argument("grading list must be strictly increasing");
}

int locate(const std::vector<double>& breaks, double x) {
  const int n = static_cast<int>(breaks.size()) - 1;
  auto it = std::upper_bound(breaks.begin(), breaks.end(), x);
  int i = static_cast<int>(it - breaks.begin()) - 1;
  return std::clamp(i, 0, n - 1);
}

}  // namespace

double Mesh::domain_measure() const {
  double m = 0.0;
  for (const auto& e : elements) m += e.measure;
  return m;
}

Mesh build_interval_mesh(double a, double b, int ne, BoundaryKind bc) {
  if (!(a < b)) throw std::invalid_argument("degenerate interval");
  if (ne < 1) throw std::invalid_argument("need at least one element");
  Mesh mesh;
  mesh.dim = 1;
  mesh.nx = ne;
  mesh.bc = bc;
  mesh.xs = uniform_breaks(a, b, ne);
  mesh.elements.resize(ne);
  for (int i = 0; i < ne; ++i) {
    Element& e = mesh.elements[i];
    e.x0 = mesh.xs[i];
    e.x1 = mesh.xs[i + 1];
    e.hx = e.x1 - e.x0;
    e.measure = e.hx;
  }
  // Interior faces between i-1 and i; owner on the low side.
  for (int i = 1; i < ne; ++i) {
    Face f;
    f.owner = i - 1;
    f.neighbor = i;
    f.owner_side = 1;
    f.neighbor_side = 0;
    f.normal = 1.0;
    f.h_owner = mesh.elements[i - 1].hx;
    mesh.faces.push_back(f);
  }
  if (bc == BoundaryKind::periodic) {
    Face f;
    f.owner = ne - 1;
    f.neighbor = 0;
    f.owner_side = 1;
    f.neighbor_side = 0;
    f.normal = 1.0;
    f.h_owner = mesh.elements[ne - 1].hx;
    mesh.faces.push_back(f);
  } else {
    Face left;
    left.owner = 0;
    left.neighbor = -1;
    left.owner_side = 0;
    left.normal = -1.0;
    left.h_owner = mesh.elements[0].hx;
    mesh.faces.push_back(left);
    Face right;
    right.owner = ne - 1;
    right.neighbor = -1;
    right.owner_side = 1;
    right.normal = 1.0;
    right.h_owner = mesh.elements[ne - 1].hx;
    mesh.faces.push_back(right);
  }
  return mesh;
}

Mesh build_quad_mesh(double x0, double x1, double y0, double y1, int nx, int ny,
                     BoundaryKind bc, const std::vector<double>& grade_x,
                     const std::vector<double>& grade_y) {
  if (!(x0 < x1) || !(y0 < y1)) throw std::invalid_argument("degenerate box");
  if (nx < 1 || ny < 1) throw std::invalid_argument("need at least one element per axis");
  Mesh mesh;
  mesh.dim = 2;
  mesh.bc = bc;
  if (!grade_x.empty()) {
    check_grading(grade_x, x0, x1);
    mesh.xs = grade_x;
    nx = static_cast<int>(grade_x.size()) - 1;
  } else {
    mesh.xs = uniform_breaks(x0, x1, nx);
  }
  if (!grade_y.empty()) {
    check_grading(grade_y, y0, y1);
    mesh.ys = grade_y;
    ny = static_cast<int>(grade_y.size()) - 1;
  } else {
    mesh.ys = uniform_breaks(y0, y1, ny);
  }
  mesh.nx = nx;
  mesh.ny = ny;

  mesh.elements.resize(static_cast<size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      Element& e = mesh.elements[j * nx + i];
      e.x0 = mesh.xs[i];
      e.x1 = mesh.xs[i + 1];
      e.y0 = mesh.ys[j];
      e.y1 = mesh.ys[j + 1];
      e.hx = e.x1 - e.x0;
      e.hy = e.y1 - e.y0;
      e.measure = e.hx * e.hy;
    }
  }

  auto elem = [nx](int i, int j) { return j * nx + i; };
  // Faces with x-normal.
  for (int j = 0; j < ny; ++j) {
    for (int i = 1; i < nx; ++i) {
      Face f;
      f.axis = 0;
      f.owner = elem(i - 1, j);
      f.neighbor = elem(i, j);
      f.owner_side = 1;
      f.neighbor_side = 0;
      f.normal = 1.0;
      f.h_owner = mesh.elements[f.owner].hx;
      f.measure = mesh.elements[f.owner].hy;
      mesh.faces.push_back(f);
    }
    if (bc == BoundaryKind::periodic) {
      Face f;
      f.axis = 0;
      f.owner = elem(nx - 1, j);
      f.neighbor = elem(0, j);
      f.owner_side = 1;
      f.neighbor_side = 0;
      f.normal = 1.0;
      f.h_owner = mesh.elements[f.owner].hx;
      f.measure = mesh.elements[f.owner].hy;
      mesh.faces.push_back(f);
    } else {
      Face lo, hi;
      lo.axis = 0;
      lo.owner = elem(0, j);
      lo.neighbor = -1;
      lo.owner_side = 0;
      lo.normal = -1.0;
      lo.h_owner = mesh.elements[lo.owner].hx;
      lo.measure = mesh.elements[lo.owner].hy;
      hi.axis = 0;
      hi.owner = elem(nx - 1, j);
      hi.neighbor = -1;
      hi.owner_side = 1;
      hi.normal = 1.0;
      hi.h_owner = mesh.elements[hi.owner].hx;
      hi.measure = mesh.elements[hi.owner].hy;
      mesh.faces.push_back(lo);
      mesh.faces.push_back(hi);
    }
  }
  // Faces with y-normal.
  for (int i = 0; i < nx; ++i) {
    for (int j = 1; j < ny; ++j) {
      Face f;
      f.axis = 1;
      f.owner = elem(i, j - 1);
      f.neighbor = elem(i, j);
      f.owner_side = 1;
      f.neighbor_side = 0;
      f.normal = 1.0;
      f.h_owner = mesh.elements[f.owner].hy;
      f.measure = mesh.elements[f.owner].hx;
      mesh.faces.push_back(f);
    }
    if (bc == BoundaryKind::periodic) {
      Face f;
      f.axis = 1;
      f.owner = elem(i, ny - 1);
      f.neighbor = elem(i, 0);
      f.owner_side = 1;
      f.neighbor_side = 0;
      f.normal = 1.0;
      f.h_owner = mesh.elements[f.owner].hy;
      f.measure = mesh.elements[f.owner].hx;
      mesh.faces.push_back(f);
    } else {
      Face lo, hi;
      lo.axis = 1;
      lo.owner = elem(i, 0);
      lo.neighbor = -1;
      lo.owner_side = 0;
      lo.normal = -1.0;
      lo.h_owner = mesh.elements[lo.owner].hy;
      lo.measure = mesh.elements[lo.owner].hx;
      hi.axis = 1;
      hi.owner = elem(i, ny - 1);
      hi.neighbor = -1;
      hi.owner_side = 1;
      hi.normal = 1.0;
      hi.h_owner = mesh.elements[hi.owner].hy;
      hi.measure = mesh.elements[hi.owner].hx;
      mesh.faces.push_back(lo);
      mesh.faces.push_back(hi);
    }
  }
  return mesh;
}

double min_node_spacing(const Mesh& mesh, const NodalBasis& basis) {
  double min_gap = 2.0;  // reference-interval gap
  for (int i = 0; i < basis.order; ++i)
    min_gap = std::min(min_gap, basis.nodes[i + 1] - basis.nodes[i]);
  double dx = std::numeric_limits<double>::infinity();
  for (const auto& e : mesh.elements) {
    dx = std::min(dx, e.hx * min_gap / 2.0);
    if (mesh.dim == 2) dx = std::min(dx, e.hy * min_gap / 2.0);
  }
  return dx;
}

FieldState make_state(const Mesh& mesh, const NodalBasis& basis, int components) {
  FieldState s;
  s.mesh = &mesh;
  s.order = basis.order;
  s.components = components;
  const int np = mesh.dim == 2 ? basis.num_nodes() * basis.num_nodes()
                               : basis.num_nodes();
  s.values = Eigen::VectorXd::Zero(
      static_cast<Eigen::Index>(mesh.num_elements()) * np * components);
  return s;
}

std::vector<int> face_node_indices(const Mesh& mesh, const NodalBasis& basis,
                                   const Face& face, bool owner_side) {
  const int np1 = basis.num_nodes();
  const int side = owner_side ? face.owner_side : face.neighbor_side;
  std::vector<int> idx;
  if (mesh.dim == 1) {
    idx.push_back(side == 0 ? 0 : basis.order);
    return idx;
  }
  idx.reserve(np1);
  if (face.axis == 0) {
    const int i = side == 0 ? 0 : basis.order;
    for (int j = 0; j < np1; ++j) idx.push_back(j * np1 + i);
  } else {
    const int j = side == 0 ? 0 : basis.order;
    for (int i = 0; i < np1; ++i) idx.push_back(j * np1 + i);
  }
  return idx;
}

FaceTraces face_traces(const FieldState& state, const NodalBasis& basis,
                       int face_index) {
  const Mesh& mesh = *state.mesh;
  const Face& face = mesh.faces.at(face_index);
  const auto own = face_node_indices(mesh, basis, face, true);
  const int nfn = static_cast<int>(own.size());
  FaceTraces tr;
  tr.minus.resize(nfn, state.components);
  tr.plus.setZero(nfn, state.components);
  for (int c = 0; c < state.components; ++c)
    for (int n = 0; n < nfn; ++n)
      tr.minus(n, c) = state.at(face.owner, own[n], c);
  if (face.neighbor >= 0) {
    const auto nb = face_node_indices(mesh, basis, face, false);
    for (int c = 0; c < state.components; ++c)
      for (int n = 0; n < nfn; ++n)
        tr.plus(n, c) = state.at(face.neighbor, nb[n], c);
  }
  return tr;
}

Eigen::VectorXd face_jump(const FieldState& state, const NodalBasis& basis,
                          int face_index, int comp) {
  const Face& face = state.mesh->faces.at(face_index);
  const FaceTraces tr = face_traces(state, basis, face_index);
  // [v] = v^- n^- + v^+ n^+ with n^+ = -n^-; boundary plus-trace is the
  // dirichlet ghost (zero), so [v] reduces to v n there.
  return face.normal * (tr.minus.col(comp) - tr.plus.col(comp));
}

namespace {

// Solves the element mass system for the projection coefficients along one
// axis; `mass` is the reference-interval mass matrix of the quadrature.
Eigen::MatrixXd reference_mass(const NodalBasis& basis,
                               const QuadratureRule& quad) {
  const Eigen::MatrixXd iq = interpolation_matrix(basis, quad.points);
  return iq.transpose() * quad.weights.asDiagonal() * iq;
}

}  // namespace

FieldState l2_project(const std::function<double(double, double)>& f,
                      const Mesh& mesh, const NodalBasis& basis,
                      const QuadratureRule& quad, int components, int comp) {
  if (quad.exact_degree < 2 * basis.order)
    throw std::invalid_argument(
        "l2_project: quadrature must integrate degree 2k exactly");
  FieldState s = make_state(mesh, basis, components);
  const int np1 = basis.num_nodes();
  const Eigen::MatrixXd iq = interpolation_matrix(basis, quad.points);
  const Eigen::LDLT<Eigen::MatrixXd> mass(reference_mass(basis, quad));
  const Eigen::Index nq = quad.points.size();

  if (mesh.dim == 1) {
    Eigen::VectorXd fq(nq);
    for (int e = 0; e < mesh.num_elements(); ++e) {
      const Element& el = mesh.elements[e];
      for (Eigen::Index q = 0; q < nq; ++q) {
        const double x = el.x0 + 0.5 * (quad.points[q] + 1.0) * el.hx;
        fq[q] = f(x, 0.0);
      }
      // (h/2) cancels between the load vector and the mass matrix.
      s.component(e, comp) =
          mass.solve(iq.transpose() * (quad.weights.asDiagonal() * fq));
    }
    return s;
  }

  // 2d tensor product: project along x per quadrature line, then along y.
  Eigen::MatrixXd fq(nq, nq);          // (qx, qy)
  Eigen::MatrixXd cx(np1, nq);         // x-coefficients per y-quad line
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Element& el = mesh.elements[e];
    for (Eigen::Index qy = 0; qy < nq; ++qy) {
      const double y = el.y0 + 0.5 * (quad.points[qy] + 1.0) * el.hy;
      for (Eigen::Index qx = 0; qx < nq; ++qx) {
        const double x = el.x0 + 0.5 * (quad.points[qx] + 1.0) * el.hx;
        fq(qx, qy) = f(x, y);
      }
    }
    for (Eigen::Index qy = 0; qy < nq; ++qy)
      cx.col(qy) = mass.solve(iq.transpose() *
                              (quad.weights.asDiagonal() * fq.col(qy)));
    auto block = s.component(e, comp);
    for (int i = 0; i < np1; ++i) {
      const Eigen::VectorXd line = cx.row(i).transpose();
      const Eigen::VectorXd cy =
          mass.solve(iq.transpose() * (quad.weights.asDiagonal() * line));
      for (int j = 0; j < np1; ++j) block[j * np1 + i] = cy[j];
    }
  }
  return s;
}

FieldState l2_project(const std::function<double(double)>& f, const Mesh& mesh,
                      const NodalBasis& basis, const QuadratureRule& quad) {
  if (mesh.dim != 1)
    throw std::invalid_argument("scalar-of-x projection needs a 1d mesh");
  return l2_project([&f](double x, double) { return f(x); }, mesh, basis, quad);
}

FieldState l2_project_system(
    const std::function<Eigen::VectorXd(double, double)>& f, int components,
    const Mesh& mesh, const NodalBasis& basis, const QuadratureRule& quad) {
  FieldState s = make_state(mesh, basis, components);
  for (int c = 0; c < components; ++c) {
    FieldState sc = l2_project(
        [&f, c](double x, double y) { return f(x, y)[c]; }, mesh, basis, quad,
        components, c);
    s.values += sc.values;
  }
  return s;
}

double evaluate(const FieldState& state, const NodalBasis& basis, double x,
                double y, int comp) {
  const Mesh& mesh = *state.mesh;
  const int np1 = basis.num_nodes();
  if (mesh.dim == 1) {
    const int e = locate(mesh.xs, x);
    const Element& el = mesh.elements[e];
    const double r = 2.0 * (x - el.x0) / el.hx - 1.0;
    return lagrange_values(basis, r).dot(state.component(e, comp));
  }
  const int i = locate(mesh.xs, x);
  const int j = locate(mesh.ys, y);
  const int e = j * mesh.nx + i;
  const Element& el = mesh.elements[e];
  const double rx = 2.0 * (x - el.x0) / el.hx - 1.0;
  const double ry = 2.0 * (y - el.y0) / el.hy - 1.0;
  const Eigen::VectorXd lx = lagrange_values(basis, rx);
  const Eigen::VectorXd ly = lagrange_values(basis, ry);
  const auto block = state.component(e, comp);
  double v = 0.0;
  for (int jj = 0; jj < np1; ++jj)
    for (int ii = 0; ii < np1; ++ii) v += ly[jj] * lx[ii] * block[jj * np1 + ii];
  return v;
}

}  // namespace expdg
