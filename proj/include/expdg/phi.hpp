#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace expdg {

using LinearAction = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// phi_0(tau) = exp(tau); phi_i(tau) = int_0^1 exp((1-z) tau) z^(i-1)/(i-1)! dz.
double phi_scalar(int i, double tau);

/// Dense matrix exponential (scaling-and-squaring with Pade approximant).
Eigen::MatrixXd expm(const Eigen::MatrixXd& m);

/// phi_0(M)..phi_p(M) from a single exponential of the block-augmented matrix
/// [[M, I, 0, ...], [0, 0, I, ...], ...]: block (0, j) of its exponential is
/// phi_j(M). Oracle-grade reference for the Krylov engine.
std::vector<Eigen::MatrixXd> phi_dense_family(int p, const Eigen::MatrixXd& m);
Eigen::MatrixXd phi_dense(int i, const Eigen::MatrixXd& m);

struct KrylovStats {
  long iterations = 0;  // operator applications
  int substeps = 0;
};

struct KrylovFactorization {
  Eigen::MatrixXd basis;       // n x (m+1), columns v_1 .. v_{m+1}
  Eigen::MatrixXd hessenberg;  // (m+1) x m
  double seed_norm = 0;
  int m = 0;
  bool invariant_subspace = false;  // happy breakdown before reaching m
};

/// Arnoldi (orth_length >= m) or incomplete-orthogonalization factorization
/// of the Krylov space span{seed, L seed, ...}.
KrylovFactorization krylov_build(const LinearAction& op,
                                 const Eigen::VectorXd& seed, int m,
                                 int orth_length);

struct PhiCombinationProblem {
  LinearAction op;                  // v -> L v
  std::vector<Eigen::VectorXd> b;   // b_0 .. b_p, p <= 4 used by integrators
  double dt = 1.0;
  double tol = 1e-12;
  int max_basis = 128;
  int orth_length = 128;  // >= max_basis: full Arnoldi (default); small
                          // windows select incomplete orthogonalization
  int max_substeps = 40;
  int initial_basis = 16;
};

struct PhiCombinationResult {
  Eigen::VectorXd value;
  KrylovStats stats;
};

class KrylovError : public std::runtime_error {
 public:
  KrylovError(const std::string& what, double estimate)
      : std::runtime_error(what), last_estimate(estimate) {}
  double last_estimate;
};

/// Adaptive Krylov evaluation of sum_i dt^i phi_i(dt L) b_i via the
/// exponential of the augmented operator, with substepping when the
/// generalized-residual estimate exceeds the tolerance budget.
PhiCombinationResult phi_combination(const PhiCombinationProblem& prob);

}  // namespace expdg
