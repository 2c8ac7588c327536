#include "expdg/phi.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace expdg {

namespace {

double factorial(int i) {
  double f = 1.0;
  for (int j = 2; j <= i; ++j) f *= j;
  return f;
}

}  // namespace

double phi_scalar(int i, double tau) {
  if (i < 0 || i > 6) throw std::invalid_argument("phi_scalar: i must be in [0, 6]");
  if (i == 0) return std::exp(tau);
  if (std::abs(tau) < 4.0) {
    // Taylor series phi_i(tau) = sum_j tau^j / (j+i)!; no cancellation issues
    // in this range.
    double term = 1.0 / factorial(i);
    double sum = term;
    for (int j = 1; j < 60; ++j) {
      term *= tau / (i + j);
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  // Upward recurrence phi_{k+1} = (phi_k - 1/k!)/tau, stable for |tau| >= 4.
  double phi = std::exp(tau);
  for (int k = 0; k < i; ++k) phi = (phi - 1.0 / factorial(k)) / tau;
  return phi;
}

Eigen::MatrixXd expm(const Eigen::MatrixXd& m) { return m.exp(); }

std::vector<Eigen::MatrixXd> phi_dense_family(int p, const Eigen::MatrixXd& m) {
  const Eigen::Index n = m.rows();
  if (m.cols() != n) throw std::invalid_argument("phi_dense: square matrix required");
  if (p == 0) return {expm(m)};
  const Eigen::Index big = (p + 1) * n;
  Eigen::MatrixXd block = Eigen::MatrixXd::Zero(big, big);
  block.topLeftCorner(n, n) = m;
  for (int j = 0; j < p; ++j)
    block.block(j * n, (j + 1) * n, n, n) = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd e = expm(block);
  std::vector<Eigen::MatrixXd> family;
  family.reserve(p + 1);
  for (int j = 0; j <= p; ++j) family.push_back(e.block(0, j * n, n, n));
  return family;
}

Eigen::MatrixXd phi_dense(int i, const Eigen::MatrixXd& m) {
  if (i < 0 || i > 6) throw std::invalid_argument("phi_dense: i must be in [0, 6]");
  return phi_dense_family(i, m).back();
}

namespace {

// Incrementally extendable Arnoldi/IOP factorization of a linear action.
struct ArnoldiWorkspace {
  Eigen::MatrixXd V;  // n x (mmax+1)
  Eigen::MatrixXd H;  // (mmax+1) x mmax
  int m = 0;
  double beta = 0;
  bool breakdown = false;

  void reset(const Eigen::VectorXd& seed, int mmax) {
    V.resize(seed.size(), mmax + 1);
    H.setZero(mmax + 1, mmax);
    beta = seed.norm();
    V.col(0) = seed / beta;
    m = 0;
    breakdown = false;
  }

  // Extends the factorization to `target` columns; returns the number of
  // operator applications performed.
  long extend(const LinearAction& op, int target, int window) {
    long applies = 0;
    const int mmax = static_cast<int>(H.cols());
    while (m < target && !breakdown) {
      Eigen::VectorXd w = op(V.col(m));
      ++applies;
      const double pre_norm = w.norm();
      const bool full = window >= mmax;
      const int j0 = full ? 0 : std::max(0, m + 1 - window);
      const int passes = full ? 2 : 1;
      for (int pass = 0; pass < passes; ++pass) {
        for (int j = j0; j <= m; ++j) {
          const double hjm = V.col(j).dot(w);
          w -= hjm * V.col(j);
          H(j, m) += hjm;
        }
      }
      const double hnext = w.norm();
      H(m + 1, m) = hnext;
      ++m;
      if (hnext <= 1e-14 * std::max(pre_norm, 1e-300)) {
        H(m, m - 1) = 0.0;
        breakdown = true;
        break;
      }
      V.col(m) = w / hnext;
    }
    return applies;
  }
};

}  // namespace

KrylovFactorization krylov_build(const LinearAction& op,
                                 const Eigen::VectorXd& seed, int m,
                                 int orth_length) {
  if (seed.norm() == 0.0) throw std::invalid_argument("krylov_build: zero seed");
  ArnoldiWorkspace ws;
  ws.reset(seed, m);
  ws.extend(op, m, orth_length >= m ? m : orth_length);
  KrylovFactorization fact;
  fact.m = ws.m;
  fact.seed_norm = ws.beta;
  fact.invariant_subspace = ws.breakdown;
  fact.basis = ws.V.leftCols(ws.m + (ws.breakdown ? 0 : 1));
  fact.hessenberg = ws.H.topLeftCorner(ws.m + 1, ws.m);
  return fact;
}

PhiCombinationResult phi_combination(const PhiCombinationProblem& prob) {
  if (prob.b.empty()) throw std::invalid_argument("phi_combination: empty b list");
  if (!(prob.dt > 0.0)) throw std::invalid_argument("phi_combination: dt must be positive");
  const Eigen::Index n = prob.b.front().size();
  const int p = static_cast<int>(prob.b.size()) - 1;
  for (const auto& bi : prob.b)
    if (bi.size() != n) throw std::invalid_argument("phi_combination: inconsistent sizes");

  PhiCombinationResult res;
  res.value = Eigen::VectorXd::Zero(n);
  bool any = false;
  for (const auto& bi : prob.b) any = any || bi.norm() > 0.0;
  if (!any) return res;

  const Eigen::Index dim = n + p;
  const double dt = prob.dt;
  // Action of the dt-scaled augmented operator [[L, B],[0, J]] with
  // B = [b_p, ..., b_1] and J the nilpotent shift.
  auto aug_op = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd y(dim);
    y.head(n) = prob.op(x.head(n));
    for (int j = 0; j < p; ++j) y.head(n) += x[n + j] * prob.b[p - j];
    for (int j = 0; j + 1 < p; ++j) y[n + j] = x[n + j + 1];
    if (p > 0) y[n + p - 1] = 0.0;
    return (dt * y).eval();
  };

  Eigen::VectorXd w(dim);
  w.head(n) = prob.b[0];
  if (p > 0) {
    w.tail(p).setZero();
    w[dim - 1] = 1.0;
  }

  const double tol = std::max(prob.tol, 5e-15);
  const int mmax = std::min<int>(prob.max_basis, static_cast<int>(dim));
  // Incomplete orthogonalization pays off only when the problem is large;
  // tiny systems rely on the exact invariant-subspace breakdown instead.
  const bool full_orth =
      prob.orth_length >= mmax || dim <= std::max(prob.initial_basis, 16);
  const int window = full_orth ? mmax : prob.orth_length;
  // Incomplete orthogonalization keeps the factorization relation but lets
  // the basis conditioning degrade as it grows; past this size we shrink the
  // substep instead of growing the space.
  const int grow_cap = full_orth ? mmax : std::min(mmax, 32);

  ArnoldiWorkspace ws;
  double t = 0.0;  // progress through the unit interval
  double h = 1.0;  // current substep
  int m = std::min(prob.initial_basis, mmax);
  double last_estimate = 0.0;

  while (t < 1.0 - 1e-14) {
    if (res.stats.substeps >= prob.max_substeps)
      throw KrylovError("phi_combination: no convergence within substep budget",
                        last_estimate);
    const double beta = w.norm();
    if (beta == 0.0) break;  // nothing left to propagate
    if (!std::isfinite(beta))
      throw KrylovError("phi_combination: non-finite input", beta);
    ws.reset(w, mmax);
    res.stats.iterations += ws.extend(aug_op, m, window);
    double avnorm = 0.0;
    if (!ws.breakdown) {
      avnorm = aug_op(ws.V.col(ws.m)).norm();
      ++res.stats.iterations;
    }

    bool accepted = false;
    while (!accepted) {
      const int mc = ws.m;

      // Extended Hessenberg whose exponential carries the solution column and
      // the two corrected error terms of the residual expansion: row mc picks
      // up the integrated residual, row mc+1 its once-more-integrated mate.
      Eigen::MatrixXd hbar = Eigen::MatrixXd::Zero(mc + 2, mc + 2);
      hbar.topLeftCorner(mc + 1, mc) = ws.H.topLeftCorner(mc + 1, mc);
      hbar(mc + 1, mc) = 1.0;
      const Eigen::MatrixXd f = expm(h * hbar);

      double err_loc = 0.0;
      if (!ws.breakdown) {
        const double p1 = std::abs(beta * f(mc, 0));
        const double p2 = std::abs(beta * f(mc + 1, 0)) * avnorm;
        if (p1 > 10.0 * p2)
          err_loc = p2;
        else if (p1 > p2)
          err_loc = p1 * p2 / (p1 - p2);
        else
          err_loc = p1;
      }
      last_estimate = err_loc;

      if (ws.breakdown || err_loc <= 0.5 * tol * beta * h) {
        w.noalias() = ws.V.leftCols(mc) * (beta * f.col(0).head(mc));
        t += h;
        ++res.stats.substeps;
        // The augmentation tail evolves independently of the head and has the
        // closed form (dt t)^(p-1-j)/(p-1-j)!; resetting it removes any
        // projection error in those components.
        for (int j = 0; j < p; ++j) {
          double v = 1.0;
          for (int q = 1; q <= p - 1 - j; ++q) v *= dt * t / q;
          w[n + j] = v;
        }
        accepted = true;
        if (err_loc < 1e-3 * tol * beta * h) h *= 2.0;
        h = std::min(h, 1.0 - t);
      } else if (mc < grow_cap) {
        m = std::min(grow_cap, std::max(mc + 1, (3 * mc) / 2));
        res.stats.iterations += ws.extend(aug_op, m, window);
        if (!ws.breakdown) {
          avnorm = aug_op(ws.V.col(ws.m)).norm();
          ++res.stats.iterations;
        }
      } else {
        // Halving reuses the factorization; only the small exponential is
        // recomputed.
        h *= 0.5;
        if (h < 1e-12)
          throw KrylovError("phi_combination: substep underflow", err_loc);
      }
    }
  }

  res.value = w.head(n);
  return res;
}

}  // namespace expdg
