#pragma once

// Newton solver for u^3 - div(exp(a) grad u) = f and the coercivity probe of
// its linearization.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <random>
#include <vector>

#include "nwidth/pde.hpp"

namespace nwidth {

struct NewtonOptions {
  double tol = 1e-10;  // dual-norm residual target
  int max_iter = 30;
};

struct NewtonReport {
  std::vector<double> residuals;  // dual-norm residual after each iterate
  int iterations = 0;
  bool converged = false;
};

// Residual G(u) = u^3 + A(exp(a)) u - f at the nodes; Newton with exact
// Jacobian 3 diag(u^2) + A(exp(a)), initial guess from the linear solve and
// step halving whenever the residual fails to decrease.
inline Field solve_semilinear(const Eigen::VectorXd& a, const Field& f,
                              const Grid& g, NewtonOptions opts = {},
                              NewtonReport* report = nullptr) {
  if (a.size() != g.coeff_size())
    throw PreconditionError("coefficient vector size does not match grid");
  const Eigen::VectorXd exp_a = a.array().exp();
  const Eigen::SparseMatrix<double> A = assemble<double>(g, exp_a);
  Energy energy(g);

  auto residual = [&](const Eigen::VectorXd& u) -> Eigen::VectorXd {
    return u.array().cube().matrix() + A * u - f.values;
  };
  auto residual_norm = [&](const Eigen::VectorXd& r) {
    return energy.dual_norm(r);
  };

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> lin(A);
  Eigen::VectorXd u = lin.solve(f.values);
  Eigen::VectorXd r = residual(u);
  double rn = residual_norm(r);
  NewtonReport local;
  local.residuals.push_back(rn);

  Eigen::SparseMatrix<double> jac = A;  // pattern reused, diagonal updated
  for (int it = 0; it < opts.max_iter && rn > opts.tol; ++it) {
    jac = A;
    for (int k = 0; k < u.size(); ++k)
      jac.coeffRef(k, k) += 3.0 * u[k] * u[k];
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> fact(jac);
    if (fact.info() != Eigen::Success)
      throw DomainError("semilinear Jacobian factorization failed");
    const Eigen::VectorXd step = fact.solve(r);

    double damping = 1.0;
    Eigen::VectorXd u_next;
    Eigen::VectorXd r_next;
    double rn_next = rn;
    for (int halvings = 0; halvings < 12; ++halvings) {
      u_next = u - damping * step;
      r_next = residual(u_next);
      rn_next = residual_norm(r_next);
      if (rn_next < rn) break;
      damping *= 0.5;
    }
    if (!(rn_next < rn)) {
      if (report) *report = local;
      throw NewtonDivergenceError("Newton iteration stalled at residual " +
                                      std::to_string(rn),
                                  local.residuals);
    }
    u = u_next;
    r = r_next;
    rn = rn_next;
    local.residuals.push_back(rn);
    local.iterations = it + 1;
  }
  local.converged = rn <= opts.tol;
  if (report) *report = local;
  if (!local.converged)
    throw NewtonDivergenceError(
        "Newton did not reach tol " + std::to_string(opts.tol) + " in " +
            std::to_string(opts.max_iter) + " iterations",
        local.residuals);
  return {g, u};
}

struct CoercivityResult {
  double lower_bound;  // smallest Rayleigh quotient found
  double threshold;    // exp(-||a||_inf)
  bool pass;
};

// Estimates min_v sigma(v,v)/||v||_Y^2 for the linearized operator
// 3 diag(u^2) + A(exp(a)) by scanning random directions and refining with
// inverse iteration on the pencil against the unit stiffness.
inline CoercivityResult coercivity_check(const Eigen::VectorXd& a,
                                         const Field& u, const Grid& g,
                                         std::uint64_t seed = 20240913ull) {
  const Eigen::VectorXd exp_a = a.array().exp();
  Eigen::SparseMatrix<double> jac = assemble<double>(g, exp_a);
  for (int k = 0; k < u.values.size(); ++k)
    jac.coeffRef(k, k) += 3.0 * u.values[k] * u.values[k];
  const Energy energy(g);
  const Eigen::SparseMatrix<double>& A1 = energy.stiffness();

  auto rayleigh = [&](const Eigen::VectorXd& v) {
    const double num = v.dot(jac * v);
    const double den = v.dot(A1 * v);
    return num / den;
  };

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int dim = g.field_size();
  Eigen::VectorXd best(dim);
  double best_q = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd v(dim);
    for (int k = 0; k < dim; ++k) v[k] = normal(rng);
    const double q = rayleigh(v);
    if (q < best_q) {
      best_q = q;
      best = v;
    }
  }

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> fact(jac);
  Eigen::VectorXd v = best;
  for (int it = 0; it < 20; ++it) {
    v = fact.solve(A1 * v);
    v /= v.norm();
    best_q = std::min(best_q, rayleigh(v));
  }

  const double threshold = std::exp(-sup_norm(a));
  return {best_q, threshold, best_q >= threshold - 1e-8};
}

}  // namespace nwidth
