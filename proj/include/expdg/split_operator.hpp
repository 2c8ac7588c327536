#pragma once

#include <Eigen/Dense>

#include "expdg/phi.hpp"

namespace expdg {

/// Matrix-free pair (L action, N evaluation) frozen at a reference state.
/// L must be linear; L + N is the full semi-discrete right-hand side and is
/// independent of the reference state the pair was built from.
struct SplitOperator {
  Eigen::Index dim = 0;
  LinearAction linear;
  LinearAction nonlinear;

  Eigen::VectorXd full_rhs(const Eigen::VectorXd& u) const {
    return linear(u) + nonlinear(u);
  }
};

}  // namespace expdg
