#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "expdg/basis.hpp"

namespace expdg {

enum class BoundaryKind { periodic, dirichlet_zero };

struct Element {
  double x0 = 0, x1 = 0;  // axis-aligned bounds; y unused in 1D
  double y0 = 0, y1 = 0;
  double hx = 0, hy = 0;
  double measure = 0;
};

/// A unique mesh face. The owner sits on the negative side of the normal
/// except at non-periodic domain boundaries, where the owner is the single
/// adjacent element and the normal points out of the domain.
struct Face {
  int owner = -1;
  int neighbor = -1;       // -1 at a dirichlet_zero boundary
  int axis = 0;            // 0: normal along x, 1: normal along y
  double normal = 1.0;     // owner-side unit normal component (+-1)
  int owner_side = 1;      // 0: low end of owner along axis, 1: high end
  int neighbor_side = 0;
  double h_owner = 0;      // owner size along the normal axis (penalty scale)
  double measure = 1.0;    // 1 in 1d, edge length in 2d
};

struct Mesh {
  int dim = 1;
  int nx = 0, ny = 1;
  std::vector<double> xs, ys;  // axis breakpoints, size nx+1 / ny+1
  std::vector<Element> elements;
  std::vector<Face> faces;
  BoundaryKind bc = BoundaryKind::periodic;

  int num_elements() const { return static_cast<int>(elements.size()); }
  double domain_measure() const;
};

Mesh build_interval_mesh(double a, double b, int ne, BoundaryKind bc);

/// Tensor-product quad mesh of [x0,x1] x [y0,y1]. Optional grading lists
/// replace the uniform axis breakpoints (they must span the domain).
Mesh build_quad_mesh(double x0, double x1, double y0, double y1, int nx, int ny,
                     BoundaryKind bc,
                     const std::vector<double>& grade_x = {},
                     const std::vector<double>& grade_y = {});

/// Minimum physical distance between adjacent LGL nodes over all elements
/// (checked per axis in 2d).
double min_node_spacing(const Mesh& mesh, const NodalBasis& basis);

/// Per-element nodal coefficients of an m-component field.
/// Layout: element-major, then component, then node (x-fastest in 2d).
struct FieldState {
  const Mesh* mesh = nullptr;
  int order = 0;
  int components = 1;
  Eigen::VectorXd values;

  int nodes_per_element() const {
    int np = order + 1;
    return mesh->dim == 2 ? np * np : np;
  }
  Eigen::Index block_size() const {
    return static_cast<Eigen::Index>(nodes_per_element()) * components;
  }
  double& at(int elem, int node, int comp = 0) {
    return values[elem * block_size() + comp * nodes_per_element() + node];
  }
  double at(int elem, int node, int comp = 0) const {
    return values[elem * block_size() + comp * nodes_per_element() + node];
  }
  auto component(int elem, int comp = 0) {
    return values.segment(elem * block_size() + comp * nodes_per_element(),
                          nodes_per_element());
  }
  auto component(int elem, int comp = 0) const {
    return values.segment(elem * block_size() + comp * nodes_per_element(),
                          nodes_per_element());
  }
};

FieldState make_state(const Mesh& mesh, const NodalBasis& basis, int components);

/// Volume-node indices of the face nodes on one side of a face, ordered so
/// owner and neighbor lists align node-for-node (conforming tensor meshes).
std::vector<int> face_node_indices(const Mesh& mesh, const NodalBasis& basis,
                                   const Face& face, bool owner_side);

/// Owner and exterior traces on a face, per face node and component.
/// dirichlet_zero boundaries return a zero exterior trace.
struct FaceTraces {
  Eigen::MatrixXd minus;  // (face nodes) x components
  Eigen::MatrixXd plus;
};
FaceTraces face_traces(const FieldState& state, const NodalBasis& basis,
                       int face_index);

/// Signed jump [v] = v^- n^- + v^+ n^+ of a scalar component on a face,
/// one value per face node.
Eigen::VectorXd face_jump(const FieldState& state, const NodalBasis& basis,
                          int face_index, int comp = 0);

/// L2 projection of an analytic function onto the broken polynomial space.
/// The quadrature must integrate degree 2k exactly for a true projection.
FieldState l2_project(const std::function<double(double, double)>& f,
                      const Mesh& mesh, const NodalBasis& basis,
                      const QuadratureRule& quad, int components = 1,
                      int comp = 0);
FieldState l2_project(const std::function<double(double)>& f, const Mesh& mesh,
                      const NodalBasis& basis, const QuadratureRule& quad);

/// Project a multi-component function (2d) in one pass.
FieldState l2_project_system(
    const std::function<Eigen::VectorXd(double, double)>& f, int components,
    const Mesh& mesh, const NodalBasis& basis, const QuadratureRule& quad);

/// Evaluate a component of the field at a physical point (element located by
/// binary search; points on element boundaries take the lower element).
double evaluate(const FieldState& state, const NodalBasis& basis, double x,
                double y = 0.0, int comp = 0);

}  // namespace expdg
