#pragma once

// Parametric problems over a coefficient box: affine diffusion and the
// semilinear cubic variant, plus the plateau-bump direction family used by
// the bundled studies.

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "nwidth/boxparam.hpp"
#include "nwidth/pde.hpp"
#include "nwidth/semilinear.hpp"

namespace nwidth {

enum class ProblemKind { affine, semilinear };

// Coefficient family a(y) = abar + sum_j y_j psi_j with the load and grid it
// is solved on. For the affine kind the floor min(abar - sum |psi_j|) must be
// positive so every |y_j| <= 1 (real or complex) stays elliptic.
struct Problem {
  ProblemKind kind = ProblemKind::affine;
  Grid grid;
  BoxParametrization box;
  Field load;
  double ellipticity_floor = 0;
};

inline double coefficient_floor(const Grid& g, const BoxParametrization& box) {
  Eigen::VectorXd slack = box.offset;
  for (int j = 0; j < box.truncation(); ++j)
    slack -= box.directions.col(j).cwiseAbs();
  return slack.minCoeff();
}

inline Problem make_affine_problem(const Grid& g, Eigen::VectorXd abar,
                                   Eigen::MatrixXd directions, Field load) {
  Problem p{ProblemKind::affine, g,
            make_box(std::move(abar), std::move(directions)), std::move(load),
            0.0};
  p.ellipticity_floor = coefficient_floor(g, p.box);
  if (!(p.ellipticity_floor > 0))
    throw NotEllipticError("affine family is not uniformly elliptic: floor = " +
                               std::to_string(p.ellipticity_floor),
                           p.ellipticity_floor);
  return p;
}

inline Problem make_semilinear_problem(const Grid& g, Eigen::VectorXd abar,
                                       Eigen::MatrixXd directions, Field load) {
  Problem p{ProblemKind::semilinear, g,
            make_box(std::move(abar), std::move(directions)), std::move(load),
            0.0};
  p.ellipticity_floor = coefficient_floor(g, p.box);  // informational only
  return p;
}

template <class Scalar>
Eigen::VectorX<Scalar> coefficient_at(const Problem& p,
                                      const Eigen::VectorX<Scalar>& y) {
  if (y.size() != p.box.truncation())
    throw PreconditionError("parameter vector length does not match the box");
  Eigen::VectorX<Scalar> a = p.box.offset.cast<Scalar>();
  for (int j = 0; j < p.box.truncation(); ++j)
    a += y[j] * p.box.directions.col(j).cast<Scalar>();
  return a;
}

// Solution at a real parameter point, dispatching on the problem kind.
inline Field solve_at(const Problem& p, const Eigen::VectorXd& y) {
  const Eigen::VectorXd a = coefficient_at<double>(p, y);
  if (p.kind == ProblemKind::affine) return solve_diffusion<double>(a, p.load, p.grid);
  return solve_semilinear(a, p.load, p.grid);
}

// Disjoint plateau bumps tiling (0,1) along x: bump j is 1 on the middle half
// of slot [(j-1)/J, j/J] with linear ramps, so ||psi_j||_sup = c j^{-s}
// exactly once the grid resolves the plateaus (n + 1 >= 2 J).
inline double bump_profile(double x, int j, int count) {
  const double w = 1.0 / count;
  const double t = (x - (j - 1) * w) / w;
  if (t <= 0 || t >= 1) return 0;
  return std::min(1.0, std::min(4 * t, 4 * (1 - t)));
}

inline Eigen::MatrixXd bump_directions(const Grid& g, int count, double s,
                                       double c) {
  if (count < 1) throw PreconditionError("bump family needs count >= 1");
  if (g.n + 1 < 2 * count)
    throw PreconditionError("grid too coarse to resolve " +
                            std::to_string(count) + " bumps");
  Eigen::MatrixXd dirs(g.coeff_size(), count);
  for (int j = 1; j <= count; ++j) {
    const double scale = c * std::pow(static_cast<double>(j), -s);
    dirs.col(j - 1) = make_coefficient(g, [&](double x, double) {
      return scale * bump_profile(x, j, count);
    });
  }
  return dirs;
}

}  // namespace nwidth
