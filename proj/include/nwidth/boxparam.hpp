#pragma once

// Box parametrizations b + sum_j z_j psi_j with recorded sup norms, the
// level-basis embedding that turns approximation-rate data into a box, and
// the localization/covering construction over complex polydisc nets.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "nwidth/grid.hpp"

namespace nwidth {

// Offset plus finitely many directions; directions beyond the stored columns
// are identically zero. Recorded norms are the sup norms of the columns.
struct BoxParametrization {
  Eigen::VectorXd offset;     // b
  Eigen::MatrixXd directions; // columns psi_1..psi_J_act
  std::vector<double> norms;  // ||psi_j||_sup, same order

  int truncation() const { return static_cast<int>(directions.cols()); }
};

inline BoxParametrization make_box(Eigen::VectorXd offset,
                                   Eigen::MatrixXd directions) {
  if (directions.size() > 0 && offset.size() != directions.rows())
    throw PreconditionError("box offset and directions disagree in dimension");
  BoxParametrization box{std::move(offset), std::move(directions), {}};
  box.norms.reserve(box.directions.cols());
  for (int j = 0; j < box.directions.cols(); ++j)
    box.norms.push_back(sup_norm(box.directions.col(j)));
  return box;
}

// Smallest J with sum_{j>J} norms < eps/10; 0 when even the full sum is
// already below the cut.
inline int tail_cut(const std::vector<double>& norms, double eps) {
  if (!(eps > 0)) throw PreconditionError("tail_cut requires eps > 0");
  double tail = 0;
  for (double v : norms) tail += v;
  if (tail < eps / 10) return 0;
  for (std::size_t j = 0; j < norms.size(); ++j) {
    tail -= norms[j];
    if (tail < eps / 10) return static_cast<int>(j) + 1;
  }
  return static_cast<int>(norms.size());
}

// eta = eps / (10 sum_{j<=J} norms).
inline double net_spacing(const std::vector<double>& norms, int J, double eps) {
  if (J < 1 || J > static_cast<int>(norms.size()))
    throw PreconditionError("net_spacing needs 1 <= J <= #norms");
  double head = 0;
  for (int j = 0; j < J; ++j) head += norms[j];
  if (!(head > 0))
    throw DegenerateBoxError("net_spacing: head norms sum to zero");
  return eps / (10 * head);
}

// Net of the closed unit disc: centers of square cells of spacing eta*sqrt(2)
// anchored at the origin, keeping every cell that can meet the disc
// (|center|^2 <= (1+eta)^2 (1+1e-12)). Any disc point lies within its cell's
// half-diagonal, i.e. within eta of a kept center; kept centers sit at most
// eta outside the disc.
struct DiscNet {
  double eta = 0;
  double cell = 0;                          // eta * sqrt(2)
  std::vector<std::pair<int, int>> cells;   // kept (p, q), sorted
  std::vector<Complex> points;              // matching cell centers

  Complex center_of(int p, int q) const {
    return {(p + 0.5) * cell, (q + 0.5) * cell};
  }
  // Index of the cell containing z.
  std::pair<int, int> locate(Complex z) const {
    return {static_cast<int>(std::floor(z.real() / cell)),
            static_cast<int>(std::floor(z.imag() / cell))};
  }
};

inline DiscNet unit_disc_net(double eta) {
  if (!(eta > 0)) throw PreconditionError("unit_disc_net requires eta > 0");
  DiscNet net;
  net.eta = eta;
  net.cell = eta * std::sqrt(2.0);
  const double keep2 = (1 + eta) * (1 + eta) * (1 + 1e-12);
  const int extent = static_cast<int>(std::ceil((1 + eta) / net.cell)) + 1;
  for (int p = -extent; p < extent; ++p) {
    for (int q = -extent; q < extent; ++q) {
      const Complex c = net.center_of(p, q);
      if (c.real() * c.real() + c.imag() * c.imag() <= keep2) {
        net.cells.emplace_back(p, q);
        net.points.push_back(c);
      }
    }
  }
  return net;
}

struct CoveringOptions {
  int j_cap = 6;
  // Per-coordinate proximity tolerance, relative to eta; absorbs rounding at
  // exact-distance boundary cases.
  double retain_slack = 1e-9;
};

struct Covering {
  double epsilon = 0;
  int J = 0;
  double eta = 0;
  std::vector<Eigen::VectorXcd> center_coords;  // z' per retained center (length J)
  Eigen::MatrixXcd centers;                     // b_i = offset + sum z'_j psi_j
  std::vector<double> star_norms;               // eta-scaled head, tail as-is
};

// Net points of the head polydisc that are eta-close (per coordinate) to at
// least one sample; samples stand in for the compact set, so the retained
// center list under-approximates the ideal one.
inline Covering build_covering(const BoxParametrization& box, double eps,
                               const std::vector<Eigen::VectorXcd>& sample_K,
                               CoveringOptions opts = {}) {
  Covering cov;
  cov.epsilon = eps;
  cov.J = tail_cut(box.norms, eps);

  cov.star_norms = box.norms;
  if (cov.J == 0) {
    // No head coordinates to localize: single box around the offset.
    cov.center_coords.emplace_back(Eigen::VectorXcd(0));
    cov.centers = box.offset.cast<Complex>();
    return cov;
  }

  cov.eta = net_spacing(box.norms, cov.J, eps);
  for (int j = 0; j < cov.J; ++j) cov.star_norms[j] *= cov.eta;

  const DiscNet net = unit_disc_net(cov.eta);
  if (cov.J > opts.j_cap) {
    const double predicted =
        std::pow(static_cast<double>(net.points.size()), cov.J);
    throw CombinatorialBlowupError(
        "covering needs J = " + std::to_string(cov.J) + " > cap " +
            std::to_string(opts.j_cap) + "; predicted net size " +
            std::to_string(predicted),
        predicted);
  }

  const double tol = cov.eta * (1 + opts.retain_slack);
  std::set<std::vector<int>> retained;  // flattened (p,q) pairs, deterministic
  std::vector<std::vector<int>> per_coord(cov.J);
  for (const auto& z : sample_K) {
    if (z.size() < cov.J)
      throw PreconditionError("sample coordinate vector shorter than J");
    bool feasible = true;
    for (int j = 0; j < cov.J && feasible; ++j) {
      per_coord[j].clear();
      for (std::size_t k = 0; k < net.points.size(); ++k) {
        if (std::abs(z[j] - net.points[k]) <= tol)
          per_coord[j].push_back(static_cast<int>(k));
      }
      feasible = !per_coord[j].empty();
    }
    if (!feasible) continue;
    // product of per-coordinate candidates
    std::vector<std::size_t> idx(cov.J, 0);
    while (true) {
      std::vector<int> key(2 * cov.J);
      for (int j = 0; j < cov.J; ++j) {
        const auto& cell = net.cells[per_coord[j][idx[j]]];
        key[2 * j] = cell.first;
        key[2 * j + 1] = cell.second;
      }
      retained.insert(std::move(key));
      int j = 0;
      for (; j < cov.J; ++j) {
        if (++idx[j] < per_coord[j].size()) break;
        idx[j] = 0;
      }
      if (j == cov.J) break;
    }
  }

  cov.center_coords.reserve(retained.size());
  cov.centers.resize(box.offset.size(), static_cast<Eigen::Index>(retained.size()));
  Eigen::Index col = 0;
  for (const auto& key : retained) {
    Eigen::VectorXcd z(cov.J);
    for (int j = 0; j < cov.J; ++j)
      z[j] = net.center_of(key[2 * j], key[2 * j + 1]);
    Eigen::VectorXcd b = box.offset.cast<Complex>();
    for (int j = 0; j < cov.J; ++j) b += z[j] * box.directions.col(j).cast<Complex>();
    cov.center_coords.push_back(z);
    cov.centers.col(col++) = b;
  }
  return cov;
}

struct StarNormCheck {
  bool ok;
  double margin;  // 2 eps / 10 - sum of star norms
};

inline StarNormCheck star_norm_check(const Covering& cov) {
  double sum = 0;
  for (double v : cov.star_norms) sum += v;
  const double budget = 2 * cov.epsilon / 10;
  return {sum <= budget, budget - sum};
}

// Directions C 2^{-sk} phi_{k,l} under the pairing j = 2^k + l - 1, built
// from per-level orthonormal bases and the per-level approximation errors
// e_k = C 2^{-sk}. When the error sequence is geometric the recorded norms
// are checked against the 2^s C j^{-s} decay they must satisfy.
inline BoxParametrization box_embedding(const std::vector<double>& approx_errors,
                                        const std::vector<Eigen::MatrixXd>& bases) {
  if (bases.empty() || approx_errors.size() != bases.size())
    throw PreconditionError("box_embedding needs one error per basis level");
  const Eigen::Index rows = bases[0].rows();
  int total = 0;
  for (std::size_t k = 0; k < bases.size(); ++k) {
    if (bases[k].rows() != rows)
      throw PreconditionError("basis levels live in different spaces");
    if (bases[k].cols() != (1 << k))
      throw PreconditionError("level " + std::to_string(k) + " must have 2^k columns");
    Eigen::MatrixXd gram = bases[k].transpose() * bases[k];
    gram -= Eigen::MatrixXd::Identity(gram.rows(), gram.cols());
    if (gram.cwiseAbs().maxCoeff() > 1e-8)
      throw DomainError("level " + std::to_string(k) + " basis is not orthonormal");
    total += static_cast<int>(bases[k].cols());
  }
  Eigen::MatrixXd dirs(rows, total);
  for (std::size_t k = 0; k < bases.size(); ++k) {
    for (int l = 1; l <= bases[k].cols(); ++l) {
      const int j = (1 << k) + l - 1;  // 1-based direction index
      dirs.col(j - 1) = approx_errors[k] * bases[k].col(l - 1);
    }
  }
  BoxParametrization box = make_box(Eigen::VectorXd::Zero(rows), std::move(dirs));

  if (approx_errors.size() >= 2 && approx_errors[0] > 0) {
    const double ratio = approx_errors[1] / approx_errors[0];
    bool geometric = ratio > 0 && ratio < 1;
    for (std::size_t k = 2; k < approx_errors.size() && geometric; ++k)
      geometric = std::abs(approx_errors[k] - approx_errors[k - 1] * ratio) <=
                  1e-9 * approx_errors[0];
    if (geometric) {
      const double s = -std::log2(ratio);
      const double C = approx_errors[0];
      for (int j = 1; j <= box.truncation(); ++j) {
        const double cap = std::pow(2.0, s) * C * std::pow(j, -s);
        if (box.norms[j - 1] > cap * (1 + 1e-12))
          throw DomainError("embedded direction " + std::to_string(j) +
                            " violates the j^{-s} norm decay");
      }
    }
  }
  return box;
}

// sum_{j>n} norms: the box tail that dominates the width of the box itself.
inline double box_width_bound(const std::vector<double>& norms, int n) {
  if (n < 0) throw PreconditionError("box_width_bound requires n >= 0");
  double s = 0;
  for (std::size_t j = static_cast<std::size_t>(n); j < norms.size(); ++j)
    s += norms[j];
  return s;
}

// Suggested localization radius when the admissible set is {Re(a) > r}: half
// the smallest slack of the sampled coefficients over that boundary.
inline double suggest_epsilon(const BoxParametrization& box, double r,
                              const std::vector<Eigen::VectorXd>& sample_params) {
  double slack = std::numeric_limits<double>::infinity();
  for (const auto& y : sample_params) {
    if (y.size() < box.truncation())
      throw PreconditionError("sample parameter vector shorter than the box");
    Eigen::VectorXd a = box.offset;
    for (int j = 0; j < box.truncation(); ++j) a += y[j] * box.directions.col(j);
    slack = std::min(slack, a.minCoeff() - r);
  }
  if (!(slack > 0))
    throw DomainError("sampled set touches the admissibility boundary");
  return slack / 2;
}

}  // namespace nwidth
