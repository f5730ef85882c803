#pragma once

// Second-order finite-difference machinery for -div(a grad u) = f with
// homogeneous Dirichlet data: assembly, direct solves (real Cholesky,
// complex LU), the discrete energy/dual norms and the derivative solve.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <cmath>
#include <complex>
#include <memory>
#include <string>
#include <vector>

#include "nwidth/grid.hpp"

namespace nwidth {

// Sparse operator for the bilinear form sum_edges a_e (u_p - u_q)^2 / h^2.
// Linear in the edge-midpoint coefficient vector and exactly symmetric.
template <class Scalar>
Eigen::SparseMatrix<Scalar> assemble(const Grid& g,
                                     const Eigen::VectorX<Scalar>& coeff) {
  if (coeff.size() != g.coeff_size())
    throw PreconditionError("coefficient vector size does not match grid");
  const double inv_h2 = static_cast<double>(g.n + 1) * (g.n + 1);
  std::vector<Eigen::Triplet<Scalar>> trips;
  if (g.dim == 1) {
    trips.reserve(3 * g.n);
    for (int i = 0; i < g.n; ++i) {
      trips.emplace_back(i, i, (coeff[i] + coeff[i + 1]) * inv_h2);
      if (i > 0) trips.emplace_back(i, i - 1, -coeff[i] * inv_h2);
      if (i < g.n - 1) trips.emplace_back(i, i + 1, -coeff[i + 1] * inv_h2);
    }
  } else {
    trips.reserve(5 * g.field_size());
    for (int iy = 1; iy <= g.n; ++iy) {
      for (int ix = 1; ix <= g.n; ++ix) {
        const int row = (iy - 1) * g.n + (ix - 1);
        const Scalar cl = coeff[g.h_edge(ix - 1, iy)];
        const Scalar cr = coeff[g.h_edge(ix, iy)];
        const Scalar cb = coeff[g.v_edge(ix, iy - 1)];
        const Scalar ct = coeff[g.v_edge(ix, iy)];
        trips.emplace_back(row, row, (cl + cr + cb + ct) * inv_h2);
        if (ix > 1) trips.emplace_back(row, row - 1, -cl * inv_h2);
        if (ix < g.n) trips.emplace_back(row, row + 1, -cr * inv_h2);
        if (iy > 1) trips.emplace_back(row, row - g.n, -cb * inv_h2);
        if (iy < g.n) trips.emplace_back(row, row + g.n, -ct * inv_h2);
      }
    }
  }
  Eigen::SparseMatrix<Scalar> A(g.field_size(), g.field_size());
  A.setFromTriplets(trips.begin(), trips.end());
  return A;
}

namespace detail {
template <class Scalar>
struct SolverFor {
  using type = Eigen::SimplicialLDLT<Eigen::SparseMatrix<Scalar>>;
};
template <>
struct SolverFor<Complex> {
  // complex-symmetric, not Hermitian: general sparse LU
  using type = Eigen::SparseLU<Eigen::SparseMatrix<Complex>>;
};
}  // namespace detail

inline double min_real_part(const Eigen::VectorXd& coeff) {
  return coeff.minCoeff();
}
inline double min_real_part(const Eigen::VectorXcd& coeff) {
  return coeff.real().minCoeff();
}

// Assembled + factorized diffusion operator. Immutable after construction;
// concurrent solve() calls against one factorization are safe.
template <class Scalar>
class DiffusionOperator {
 public:
  DiffusionOperator(const Grid& g, const Eigen::VectorX<Scalar>& coeff)
      : grid_(g), matrix_(assemble<Scalar>(g, coeff)) {
    factor_.compute(matrix_);
    if (factor_.info() != Eigen::Success)
      throw DomainError("diffusion operator factorization failed");
  }

  // Direct solve with one iterative-refinement pass; keeps the relative
  // residual well under 1e-12 for admissible coefficients.
  Eigen::VectorX<Scalar> solve(const Eigen::VectorX<Scalar>& rhs) const {
    Eigen::VectorX<Scalar> x = factor_.solve(rhs);
    Eigen::VectorX<Scalar> r = rhs - matrix_ * x;
    x += factor_.solve(r);
    return x;
  }

  Eigen::VectorX<Scalar> apply(const Eigen::VectorX<Scalar>& v) const {
    return matrix_ * v;
  }

  const Eigen::SparseMatrix<Scalar>& matrix() const { return matrix_; }
  const Grid& grid() const { return grid_; }

 private:
  Grid grid_;
  Eigen::SparseMatrix<Scalar> matrix_;
  typename detail::SolverFor<Scalar>::type factor_;
};

template <class Scalar>
void require_elliptic(const Eigen::VectorX<Scalar>& coeff) {
  const double m = min_real_part(coeff);
  if (!(m > 0))
    throw NotEllipticError(
        "coefficient not elliptic: min Re(a) = " + std::to_string(m), m);
}

template <class Scalar>
FieldT<Scalar> solve_diffusion(const Eigen::VectorX<Scalar>& coeff,
                               const FieldT<Scalar>& f, const Grid& g) {
  require_elliptic(coeff);
  DiffusionOperator<Scalar> op(g, coeff);
  return {g, op.solve(f.values)};
}

// Unit-coefficient stiffness with its Cholesky factor: the discrete H^1_0
// geometry every norm, dual norm and coordinate map runs through.
class Energy {
 public:
  explicit Energy(const Grid& g)
      : grid_(g), stiffness_(assemble<double>(g, constant_coefficient(g, 1.0))) {
    llt_.compute(stiffness_);
    if (llt_.info() != Eigen::Success)
      throw DomainError("energy factorization failed");
  }

  const Grid& grid() const { return grid_; }
  const Eigen::SparseMatrix<double>& stiffness() const { return stiffness_; }

  // sqrt(h^m v' A1 v); the h^m weight makes it consistent with the integral
  // |grad v|^2 as the grid refines.
  double norm(const Eigen::VectorXd& v) const {
    return std::sqrt(std::max(0.0, scale() * v.dot(stiffness_ * v)));
  }
  double norm(const Eigen::VectorXcd& v) const {
    const Eigen::VectorXcd Av = stiffness_ * v;
    return std::sqrt(std::max(0.0, scale() * v.dot(Av).real()));
  }

  double inner(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
    return scale() * u.dot(stiffness_ * v);
  }

  Eigen::VectorXd unit_solve(const Eigen::VectorXd& f) const {
    Eigen::VectorXd x = llt_.solve(f);
    x += llt_.solve(f - stiffness_ * x);
    return x;
  }

  // ||f||_{Y'} realized exactly at the discrete level: energy norm of the
  // unit-coefficient solve.
  double dual_norm(const Eigen::VectorXd& f) const { return norm(unit_solve(f)); }

  // Energy-orthonormal coordinates: with P A1 P' = L L', returns
  // sqrt(h^m) L' P v, so plain Euclidean geometry on coordinates equals the
  // energy geometry on fields.
  Eigen::VectorXd coords(const Eigen::VectorXd& v) const {
    Eigen::VectorXd pv = llt_.permutationP() * v;
    return std::sqrt(scale()) *
           (llt_.matrixL().adjoint() * pv).eval();
  }

 private:
  double scale() const { return std::pow(grid_.spacing(), grid_.dim); }

  Grid grid_;
  Eigen::SparseMatrix<double> stiffness_;
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt_;
};

inline double energy_norm(const Grid& g, const Eigen::VectorXd& v) {
  return Energy(g).norm(v);
}

inline double dual_norm(const Field& f) { return Energy(f.grid).dual_norm(f.values); }

// B = ||f||_{Y'} / r, the uniform solution bound over coefficients with
// Re(a) >= r.
inline double apriori_bound(const Field& f, double r) {
  if (!(r > 0)) throw DomainError("apriori_bound requires r > 0");
  return dual_norm(f) / r;
}

inline double apriori_bound(const Energy& energy, const Field& f, double r) {
  if (!(r > 0)) throw DomainError("apriori_bound requires r > 0");
  return energy.dual_norm(f.values) / r;
}

// Directional derivative of a -> u(a): solves the same operator against the
// right-hand side -A(w) u(a).
template <class Scalar>
FieldT<Scalar> frechet_apply(const Eigen::VectorX<Scalar>& a,
                             const FieldT<Scalar>& u_a,
                             const Eigen::VectorX<Scalar>& w, const Grid& g) {
  require_elliptic(a);
  DiffusionOperator<Scalar> op(g, a);
  Eigen::VectorX<Scalar> rhs = -(assemble<Scalar>(g, w) * u_a.values);
  return {g, op.solve(rhs)};
}

}  // namespace nwidth
