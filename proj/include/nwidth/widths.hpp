#pragma once

// Snapshot-based width estimates of a solution manifold: the rms SVD
// surrogate, strong-greedy worst-case decay, log-log rate fitting and the
// rate-transfer verdict.

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "nwidth/parallel.hpp"
#include "nwidth/problem.hpp"

namespace nwidth {

enum class Sampler { random, tensor, halton };

inline Sampler sampler_from_name(const std::string& name) {
  if (name == "random") return Sampler::random;
  if (name == "tensor") return Sampler::tensor;
  if (name == "halton") return Sampler::halton;
  throw ConfigError("unknown sampler '" + name + "'");
}

struct SnapshotSet {
  Grid grid;
  Eigen::MatrixXd params;  // J_act x m
  Eigen::MatrixXd fields;  // field_size x m
  Eigen::MatrixXd coords;  // energy-orthonormal coordinates, field_size x m
};

namespace detail {

inline double halton_radical_inverse(std::uint64_t i, std::uint64_t base) {
  double inv = 1.0 / static_cast<double>(base);
  double f = inv, value = 0;
  while (i > 0) {
    value += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return value;
}

inline std::uint64_t nth_prime(int k) {
  static const std::uint64_t primes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29,
                                         31, 37, 41, 43, 47, 53, 59, 61, 67, 71,
                                         73, 79, 83, 89, 97, 101, 103, 107, 109, 113};
  if (k < 0 || k >= static_cast<int>(std::size(primes)))
    throw DomainError("halton sampler supports at most 30 coordinates");
  return primes[k];
}

inline Eigen::MatrixXd draw_parameters(int J, Sampler sampler, int m,
                                       std::uint64_t seed) {
  if (m < 2) throw PreconditionError("sampling needs m >= 2");
  switch (sampler) {
    case Sampler::random: {
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> uni(-1.0, 1.0);
      Eigen::MatrixXd params(J, m);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < J; ++j) params(j, i) = uni(rng);
      return params;
    }
    case Sampler::tensor: {
      // m points per axis, m^J total
      const double total = std::pow(static_cast<double>(m), J);
      if (total > 20000)
        throw DomainError("tensor grid would need " + std::to_string(total) +
                          " snapshots; use fewer points or another sampler");
      const int count = static_cast<int>(total);
      Eigen::MatrixXd params(J, count);
      for (int i = 0; i < count; ++i) {
        int rest = i;
        for (int j = 0; j < J; ++j) {
          const int idx = rest % m;
          rest /= m;
          params(j, i) = -1.0 + 2.0 * idx / (m - 1);
        }
      }
      return params;
    }
    case Sampler::halton: {
      Eigen::MatrixXd params(J, m);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < J; ++j)
          params(j, i) =
              2.0 * halton_radical_inverse(static_cast<std::uint64_t>(i) + 1,
                                           nth_prime(j)) -
              1.0;
      return params;
    }
  }
  throw DomainError("unreachable sampler");
}

}  // namespace detail

// Solves the problem at sampled parameter points of the real cube [-1,1]^J.
// Deterministic for a fixed seed; snapshot solves run on the worker pool.
inline SnapshotSet sample_snapshots(const Problem& p, Sampler sampler, int m,
                                    std::uint64_t seed, const Energy& energy,
                                    int threads = 1) {
  SnapshotSet snap;
  snap.grid = p.grid;
  snap.params = detail::draw_parameters(p.box.truncation(), sampler, m, seed);
  const int count = static_cast<int>(snap.params.cols());
  snap.fields.resize(p.grid.field_size(), count);
  parallel_for(count, threads, [&](std::size_t i) {
    snap.fields.col(static_cast<Eigen::Index>(i)) =
        solve_at(p, snap.params.col(static_cast<Eigen::Index>(i))).values;
  });
  snap.coords.resize(snap.fields.rows(), count);
  for (int i = 0; i < count; ++i)
    snap.coords.col(i) = energy.coords(snap.fields.col(i));
  return snap;
}

// Entry n is sqrt(sum_{k>n} sigma_k^2 / m): the rms residual of the best
// n-dimensional space for the sampled set in the energy norm. Length
// min(m, dim) + 1; the last entry is zero.
inline std::vector<double> svd_widths(const SnapshotSet& snap) {
  const int m = static_cast<int>(snap.coords.cols());
  Eigen::BDCSVD<Eigen::MatrixXd> svd(snap.coords);
  const Eigen::VectorXd sigma = svd.singularValues();
  const int K = static_cast<int>(sigma.size());
  std::vector<double> widths(K + 1, 0.0);
  double acc = 0;
  for (int k = K - 1; k >= 0; --k) {
    acc += sigma[k] * sigma[k];
    widths[k] = std::sqrt(acc / m);
  }
  return widths;
}

// Strong greedy on the sampled set: entry n is the largest energy-norm
// projection error onto the span of the first n selected snapshots. Ties go
// to the lowest snapshot index.
inline std::vector<double> greedy_widths(const SnapshotSet& snap, int n_max) {
  const int m = static_cast<int>(snap.coords.cols());
  if (n_max > m)
    throw PreconditionError("greedy_widths requires n_max <= snapshot count");
  Eigen::MatrixXd residual = snap.coords;
  std::vector<double> sequence;
  sequence.reserve(n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    int pick = 0;
    double worst = -1;
    for (int i = 0; i < m; ++i) {
      const double err = residual.col(i).norm();
      if (err > worst) {
        worst = err;
        pick = i;
      }
    }
    sequence.push_back(worst);
    if (n == n_max) break;
    if (!(worst > 0)) {
      // exact finite rank: nothing left to select
      sequence.insert(sequence.end(), n_max - n, 0.0);
      break;
    }
    Eigen::VectorXd q = residual.col(pick) / worst;
    // two projection passes keep the residuals numerically orthogonal
    residual -= q * (q.transpose() * residual);
    residual -= q * (q.transpose() * residual);
  }
  return sequence;
}

struct RateFit {
  double slope = 0;
  double intercept = 0;
  double r2 = 0;
  int n_min = 0, n_max = 0;
};

// Least squares on (log n, log d_n) for n in [n_min, n_max]; d_seq[n] is the
// value at n (entry 0 = no approximation space).
inline RateFit fit_rate(const std::vector<double>& d_seq, int n_min, int n_max) {
  if (n_min < 1 || n_max < n_min ||
      n_max >= static_cast<int>(d_seq.size()))
    throw PreconditionError("fit window out of range");
  for (int n = n_min; n <= n_max; ++n) {
    if (!(d_seq[n] > 0))
      throw DomainError("nonpositive width inside the fit window: exact finite rank at n = " +
                        std::to_string(n));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  const int count = n_max - n_min + 1;
  for (int n = n_min; n <= n_max; ++n) {
    const double x = std::log(static_cast<double>(n));
    const double y = std::log(d_seq[n]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double denom = count * sxx - sx * sx;
  RateFit fit;
  fit.n_min = n_min;
  fit.n_max = n_max;
  fit.slope = (count * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / count;
  const double ss_res = syy - sy * sy / count -
                        fit.slope * (sxy - sx * sy / count);
  const double ss_tot = syy - sy * sy / count;
  fit.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

struct Verdict {
  double s_input = 0;
  double delta = 0;
  double t_required = 0;  // s - 1 - delta
  double t_observed = 0;  // -slope of the greedy decay
  bool pass = false;
};

inline Verdict rate_transfer_verdict(double s, const RateFit& greedy_fit,
                                     double delta) {
  Verdict v;
  v.s_input = s;
  v.delta = delta;
  v.t_required = s - 1 - delta;
  v.t_observed = -greedy_fit.slope;
  v.pass = greedy_fit.slope <= -v.t_required;
  return v;
}

struct WidthReport {
  std::vector<double> svd_rms;
  std::vector<double> greedy_max;
  RateFit svd_fit;
  RateFit greedy_fit;
  Verdict verdict;
};

// Largest energy-norm projection error of the snapshots onto the span of the
// given fields (used to audit spaces built from series coefficients).
inline double max_projection_error(const SnapshotSet& snap, const Energy& energy,
                                   const std::vector<Eigen::VectorXd>& span) {
  Eigen::MatrixXd basis(snap.coords.rows(), span.size());
  for (std::size_t k = 0; k < span.size(); ++k)
    basis.col(static_cast<Eigen::Index>(k)) = energy.coords(span[k]);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis);
  Eigen::MatrixXd Q = qr.householderQ() *
                      Eigen::MatrixXd::Identity(basis.rows(), basis.cols());
  double worst = 0;
  for (int i = 0; i < snap.coords.cols(); ++i) {
    Eigen::VectorXd r = snap.coords.col(i) - Q * (Q.transpose() * snap.coords.col(i));
    worst = std::max(worst, r.norm());
  }
  return worst;
}

}  // namespace nwidth
