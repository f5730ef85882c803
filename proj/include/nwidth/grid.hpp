#pragma once

// Uniform Dirichlet grids on the unit interval/square, nodal fields and
// edge-midpoint coefficient vectors.

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <string>

#include "nwidth/errors.hpp"

namespace nwidth {

using Complex = std::complex<double>;

// Interior nodes only; boundary values are implicitly zero. Coefficients live
// at edge midpoints (the sites the difference stencil reads), which keeps
// operator assembly linear in the coefficient vector.
struct Grid {
  int dim = 1;  // 1 or 2
  int n = 2;    // interior nodes per axis

  Grid() = default;
  Grid(int dim_, int n_) : dim(dim_), n(n_) {
    if (dim != 1 && dim != 2) throw PreconditionError("grid dimension must be 1 or 2");
    if (n < 2) throw PreconditionError("grid needs at least 2 interior nodes per axis");
  }

  double spacing() const { return 1.0 / (n + 1); }
  int field_size() const { return dim == 1 ? n : n * n; }
  int coeff_size() const { return dim == 1 ? n + 1 : 2 * n * (n + 1); }

  // interior node k -> coordinates
  std::array<double, 2> node(int k) const {
    const double h = spacing();
    if (dim == 1) return {(k + 1) * h, 0.0};
    const int ix = k % n + 1, iy = k / n + 1;
    return {ix * h, iy * h};
  }

  // Edge layout in 2D: horizontal edges ((ix,iy)-(ix+1,iy), ix=0..n, iy=1..n)
  // first, then vertical edges ((ix,iy)-(ix,iy+1), ix=1..n, iy=0..n).
  int h_edge(int ix, int iy) const { return (iy - 1) * (n + 1) + ix; }
  int v_edge(int ix, int iy) const { return n * (n + 1) + (ix - 1) * (n + 1) + iy; }

  // coefficient site k -> coordinates (edge midpoint)
  std::array<double, 2> coeff_site(int k) const {
    const double h = spacing();
    if (dim == 1) return {(k + 0.5) * h, 0.0};
    const int per_dir = n * (n + 1);
    if (k < per_dir) {
      const int iy = k / (n + 1) + 1, ix = k % (n + 1);
      return {(ix + 0.5) * h, iy * h};
    }
    const int k2 = k - per_dir;
    const int ix = k2 / (n + 1) + 1, iy = k2 % (n + 1);
    return {ix * h, (iy + 0.5) * h};
  }

  bool operator==(const Grid&) const = default;
};

template <class Scalar>
struct FieldT {
  Grid grid;
  Eigen::VectorX<Scalar> values;  // length grid.field_size()
};

using Field = FieldT<double>;
using ComplexField = FieldT<Complex>;

inline Field make_field(const Grid& g,
                        const std::function<double(double, double)>& f) {
  Field out{g, Eigen::VectorXd(g.field_size())};
  for (int k = 0; k < g.field_size(); ++k) {
    auto [x, y] = g.node(k);
    out.values[k] = f(x, y);
  }
  return out;
}

inline Eigen::VectorXd make_coefficient(
    const Grid& g, const std::function<double(double, double)>& a) {
  Eigen::VectorXd out(g.coeff_size());
  for (int k = 0; k < g.coeff_size(); ++k) {
    auto [x, y] = g.coeff_site(k);
    out[k] = a(x, y);
  }
  return out;
}

inline Eigen::VectorXd constant_coefficient(const Grid& g, double value) {
  return Eigen::VectorXd::Constant(g.coeff_size(), value);
}

template <class Derived>
double sup_norm(const Eigen::MatrixBase<Derived>& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

// Named loads accepted by configs and the field file format.
inline Field load_preset(const Grid& g, const std::string& name) {
  if (name == "const1") return make_field(g, [](double, double) { return 1.0; });
  if (name == "sinpi") {
    if (g.dim == 1)
      return make_field(g, [](double x, double) { return std::sin(M_PI * x); });
    return make_field(g, [](double x, double y) {
      return std::sin(M_PI * x) * std::sin(M_PI * y);
    });
  }
  throw ConfigError("unknown load preset '" + name + "'");
}

}  // namespace nwidth
