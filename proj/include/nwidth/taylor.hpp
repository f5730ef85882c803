#pragma once

// Coefficients of the power series of the affine diffusion solution map, the
// nu-dependent polydisc design and the disc/multinomial a-priori bounds.
//
// Differentiating (A0 + sum_j z_j A_j) u(z) = f nu times at z = 0 and
// normalizing by nu! gives the recursion the table is built from:
//     A0 v_0 = f,      A0 v_nu = - sum_{j : nu_j > 0} A_j v_{nu - e_j}.
// The full derivation is written out in docs/taylor_recursion.md.

#include <Eigen/Dense>
#include <cmath>
#include <unordered_map>
#include <vector>

#include "nwidth/multiindex.hpp"
#include "nwidth/parallel.hpp"
#include "nwidth/problem.hpp"

namespace nwidth {

// Radius budget, uniform bound and multinomial weights for one affine
// family. eps is the largest radius keeping min Re(a) >= r/2 on every
// admissible polydisc (the designs below spend exactly 0.6*eps of weighted
// radius), so B = dual_norm(f) / (r/2) bounds the solution there.
struct BoundContext {
  double epsilon = 0;
  double solution_bound = 0;          // B
  double r_eff = 0;                   // r / 2
  std::vector<double> star_norms;     // direction norms entering the design
  std::vector<double> dbar;           // e * 10 * norm_j / (6 eps)
};

inline std::vector<double> dbar_sequence(const std::vector<double>& star_norms,
                                         double eps) {
  if (!(eps > 0)) throw PreconditionError("dbar_sequence requires eps > 0");
  std::vector<double> dbar(star_norms.size());
  for (std::size_t j = 0; j < star_norms.size(); ++j)
    dbar[j] = std::exp(1.0) * 10 * star_norms[j] / (6 * eps);
  return dbar;
}

inline BoundContext make_bound_context(const Problem& p, const Energy& energy) {
  if (p.kind != ProblemKind::affine)
    throw PreconditionError("bound context is defined for affine families");
  BoundContext ctx;
  const double r = p.ellipticity_floor;
  ctx.epsilon = 5.0 * r / 6.0;
  ctx.r_eff = r / 2;
  ctx.solution_bound = energy.dual_norm(p.load.values) / ctx.r_eff;
  ctx.star_norms = p.box.norms;
  ctx.dbar = dbar_sequence(ctx.star_norms, ctx.epsilon);
  return ctx;
}

// Table of series coefficients over a downward closed index set, with their
// energy norms. Iteration order is the canonical graded order.
struct TaylorTable {
  std::vector<MultiIndex> indices;
  std::vector<Eigen::VectorXd> coefficients;
  std::vector<double> norms;
  std::unordered_map<MultiIndex, int, MultiIndexHash> position;
  Grid grid;

  const Eigen::VectorXd& coefficient(const MultiIndex& nu) const {
    auto it = position.find(nu);
    if (it == position.end())
      throw PreconditionError("coefficient not in table: " + nu.str());
    return coefficients[it->second];
  }
  double norm(const MultiIndex& nu) const {
    auto it = position.find(nu);
    if (it == position.end())
      throw PreconditionError("coefficient not in table: " + nu.str());
    return norms[it->second];
  }
  std::vector<std::pair<MultiIndex, double>> norm_list() const {
    std::vector<std::pair<MultiIndex, double>> out;
    out.reserve(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i)
      out.emplace_back(indices[i], norms[i]);
    return out;
  }
};

// Builds the table layer by layer in total degree, reusing one factorization
// of A0 for every right-hand side. Solves within a layer are independent and
// run on the worker pool; the resulting table does not depend on the thread
// count.
inline TaylorTable compute_taylor(const Problem& p, const IndexSet& lambda,
                                  const Energy& energy, int threads = 1) {
  if (p.kind != ProblemKind::affine)
    throw PreconditionError("Taylor recursion is defined for affine families");
  for (const auto& nu : lambda.members()) {
    for (const auto& [j, e] : nu.entries()) {
      if (!lambda.contains(nu.lowered(j)))
        throw PreconditionError("index set not downward closed: missing parent " +
                                nu.lowered(j).str() + " of " + nu.str());
      if (j > p.box.truncation())
        throw PreconditionError("index " + nu.str() +
                                " involves a direction beyond the box");
    }
  }

  TaylorTable table;
  table.grid = p.grid;
  table.indices = lambda.members();
  std::sort(table.indices.begin(), table.indices.end(), graded_before);
  table.coefficients.resize(table.indices.size());
  table.norms.resize(table.indices.size());
  for (std::size_t i = 0; i < table.indices.size(); ++i)
    table.position.emplace(table.indices[i], static_cast<int>(i));

  require_elliptic(p.box.offset);
  DiffusionOperator<double> op0(p.grid, p.box.offset);
  std::vector<Eigen::SparseMatrix<double>> direction_ops;
  direction_ops.reserve(p.box.truncation());
  for (int j = 0; j < p.box.truncation(); ++j)
    direction_ops.push_back(
        assemble<double>(p.grid, Eigen::VectorXd(p.box.directions.col(j))));

  // contiguous degree layers (indices are sorted by degree already)
  std::size_t begin = 0;
  while (begin < table.indices.size()) {
    std::size_t end = begin;
    const int degree = table.indices[begin].degree();
    while (end < table.indices.size() && table.indices[end].degree() == degree)
      ++end;
    parallel_for(end - begin, threads, [&](std::size_t k) {
      const std::size_t i = begin + k;
      const MultiIndex& nu = table.indices[i];
      Eigen::VectorXd rhs;
      if (nu.is_zero()) {
        rhs = p.load.values;
      } else {
        rhs = Eigen::VectorXd::Zero(p.grid.field_size());
        for (const auto& [j, e] : nu.entries())
          rhs -= direction_ops[j - 1] *
                 table.coefficients[table.position.at(nu.lowered(j))];
      }
      table.coefficients[i] = op0.solve(rhs);
      table.norms[i] = energy.norm(table.coefficients[i]);
    });
    begin = end;
  }
  return table;
}

// Polydisc radii tuned to nu: rho_j = 1 + (6 eps / (10 ||psi_j||)) nu_j/|nu|,
// which spends sum (rho_j - 1) ||psi_j|| = 0.6 eps exactly.
inline std::vector<double> rho_design(const MultiIndex& nu, double eps,
                                      const std::vector<double>& star_norms) {
  const int total = nu.degree();
  if (total == 0)
    throw DomainError("rho design is undefined for the zero index; use the plain bound");
  std::vector<double> rho(star_norms.size(), 1.0);
  for (const auto& [j, e] : nu.entries()) {
    if (j > static_cast<int>(star_norms.size()) || !(star_norms[j - 1] > 0))
      throw DomainError("rho design needs a positive norm for coordinate " +
                        std::to_string(j));
    rho[j - 1] =
        1.0 + (6 * eps) / (10 * star_norms[j - 1]) * (static_cast<double>(e) / total);
  }
  return rho;
}

// B prod_j rho_j^{-nu_j}; factors with nu_j = 0 contribute 1.
inline double cauchy_bound(const MultiIndex& nu, double B,
                           const std::vector<double>& rho) {
  double out = B;
  for (const auto& [j, e] : nu.entries()) {
    if (j > static_cast<int>(rho.size()))
      throw PreconditionError("rho sequence shorter than the index support");
    if (!(rho[j - 1] >= 1)) throw PreconditionError("cauchy_bound requires rho_j >= 1");
    out *= std::pow(rho[j - 1], -static_cast<double>(e));
  }
  return out;
}

// B (|nu|!/nu!) prod_j dbar_j^{nu_j}.
inline double factorial_bound(const MultiIndex& nu, double B,
                              const std::vector<double>& dbar,
                              int degree_cap = 40) {
  double out = B * factorial_ratio(nu, degree_cap);
  for (const auto& [j, e] : nu.entries()) {
    if (j > static_cast<int>(dbar.size()) || !(dbar[j - 1] > 0))
      throw DomainError("factorial bound needs a positive weight for coordinate " +
                        std::to_string(j));
    out *= std::pow(dbar[j - 1], static_cast<double>(e));
  }
  return out;
}

struct SummabilityReport {
  double dbar_l1 = 0;
  bool condition_ok = false;  // ||dbar||_1 <= 1
  double lp_value = 0;
  bool lp_ok = false;  // finite lp quasi-norm (always true at finite length)
};

inline SummabilityReport summability_check(const std::vector<double>& star_norms,
                                           double eps, double p) {
  if (!(p > 0 && p < 1))
    throw DomainError("summability_check requires p in (0,1)");
  SummabilityReport rep;
  const std::vector<double> dbar = dbar_sequence(star_norms, eps);
  for (double d : dbar) rep.dbar_l1 += d;
  rep.condition_ok = rep.dbar_l1 <= 1.0;
  rep.lp_value = lp_quasinorm(dbar, p);
  rep.lp_ok = std::isfinite(rep.lp_value);
  return rep;
}

// Partial sum sum_{nu in lambda_n} v_nu y^nu.
template <class Scalar>
FieldT<Scalar> taylor_evaluate(const TaylorTable& table, const IndexSet& lambda_n,
                               const Eigen::VectorX<Scalar>& y) {
  Eigen::VectorX<Scalar> acc = Eigen::VectorX<Scalar>::Zero(table.grid.field_size());
  for (const auto& nu : lambda_n.members()) {
    Scalar monomial = Scalar(1);
    for (const auto& [j, e] : nu.entries()) {
      if (j > y.size())
        throw PreconditionError("evaluation point shorter than index support");
      monomial *= std::pow(y[j - 1], e);
    }
    acc += monomial * table.coefficient(nu).template cast<Scalar>();
  }
  return {table.grid, acc};
}

// Upper bound on sum_{nu not in lambda} ||v_nu||: the multinomial theorem
// collapses the total sum of factorial bounds to B / (1 - ||dbar||_1), and
// the in-lambda part is subtracted term by term. Requires ||dbar||_1 < 1.
inline double taylor_tail_bound(const BoundContext& ctx, const IndexSet& lambda,
                                int degree_cap = 60) {
  double q = 0;
  for (double d : ctx.dbar) q += d;
  if (!(q < 1))
    return std::numeric_limits<double>::infinity();
  double total = ctx.solution_bound / (1 - q);
  for (const auto& nu : lambda.members())
    total -= factorial_bound(nu, ctx.solution_bound, ctx.dbar, degree_cap);
  return std::max(0.0, total);
}

}  // namespace nwidth
