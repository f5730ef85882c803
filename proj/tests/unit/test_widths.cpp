#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "nwidth/taylor.hpp"
#include "nwidth/widths.hpp"

using namespace nwidth;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Problem single_constant_problem(const Grid& g, double c) {
  Eigen::MatrixXd dirs(g.coeff_size(), 1);
  dirs.col(0) = constant_coefficient(g, c);
  return make_affine_problem(g, constant_coefficient(g, 1.0), dirs,
                             load_preset(g, "const1"));
}

}  // namespace

TEST_CASE("sampling preconditions and determinism") {
  Grid g(1, 31);
  Energy energy(g);
  Problem p = single_constant_problem(g, 0.5);
  CHECK_THROWS_AS(sample_snapshots(p, Sampler::random, 1, 1, energy),
                  PreconditionError);

  SnapshotSet a = sample_snapshots(p, Sampler::random, 12, 42, energy);
  SnapshotSet b = sample_snapshots(p, Sampler::random, 12, 42, energy);
  CHECK((a.params - b.params).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.fields - b.fields).cwiseAbs().maxCoeff() == 0.0);

  SnapshotSet grid5 = sample_snapshots(p, Sampler::tensor, 5, 1, energy);
  REQUIRE(grid5.params.cols() == 5);
  const double expected[] = {-1.0, -0.5, 0.0, 0.5, 1.0};
  for (int i = 0; i < 5; ++i)
    CHECK_THAT(grid5.params(0, i), WithinAbs(expected[i], 1e-15));

  SnapshotSet threaded = sample_snapshots(p, Sampler::random, 12, 42, energy, 4);
  CHECK((a.fields - threaded.fields).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("svd widths: degenerate families") {
  Grid g(1, 31);
  Energy energy(g);

  SECTION("identical snapshots") {
    Problem p = single_constant_problem(g, 1e-30);
    SnapshotSet snap = sample_snapshots(p, Sampler::random, 8, 3, energy);
    auto widths = svd_widths(snap);
    CHECK(widths[0] > 0);
    for (std::size_t n = 1; n < widths.size(); ++n)
      CHECK(widths[n] <= 1e-12 * widths[0]);
  }

  SECTION("rank-1 manifold from one constant direction") {
    Problem p = single_constant_problem(g, 0.5);
    SnapshotSet snap = sample_snapshots(p, Sampler::random, 20, 5, energy);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(snap.coords);
    const auto& sigma = svd.singularValues();
    CHECK(sigma[1] / sigma[0] <= 1e-10);
  }

  SECTION("affine manifold has rank 2") {
    // u(y) = u0 + y u1 via two snapshots combined linearly
    SnapshotSet snap;
    snap.grid = g;
    std::mt19937_64 rng(9);
    std::normal_distribution<double> normal;
    Eigen::VectorXd u0(g.field_size()), u1(g.field_size());
    for (int k = 0; k < g.field_size(); ++k) {
      u0[k] = normal(rng);
      u1[k] = normal(rng);
    }
    const int m = 9;
    snap.params.resize(1, m);
    snap.fields.resize(g.field_size(), m);
    snap.coords.resize(g.field_size(), m);
    for (int i = 0; i < m; ++i) {
      const double y = -1.0 + 2.0 * i / (m - 1);
      snap.params(0, i) = y;
      snap.fields.col(i) = u0 + y * u1;
      snap.coords.col(i) = energy.coords(snap.fields.col(i));
    }
    auto widths = svd_widths(snap);
    CHECK(widths[1] > 1e-8);
    for (std::size_t n = 2; n < widths.size(); ++n)
      CHECK(widths[n] <= 1e-12 * widths[0]);
  }
}

TEST_CASE("greedy on an orthonormal family") {
  Grid g(1, 12);
  SnapshotSet snap;
  snap.grid = g;
  const int m = 5;
  snap.params.resize(1, m);
  snap.fields.resize(g.field_size(), m);
  snap.coords = Eigen::MatrixXd::Zero(g.field_size(), m);
  for (int i = 0; i < m; ++i) snap.coords(i, i) = 1.0;  // orthonormal coords

  auto greedy = greedy_widths(snap, m);
  for (int n = 0; n < m; ++n) CHECK_THAT(greedy[n], WithinAbs(1.0, 1e-12));
  CHECK(greedy[m] <= 1e-12);

  auto svd = svd_widths(snap);
  for (int n = 0; n <= m; ++n)
    CHECK_THAT(svd[n], WithinAbs(std::sqrt(double(m - n) / m), 1e-12));
}

TEST_CASE("greedy vs svd ordering, monotonicity, reproducibility") {
  Grid g(1, 63);
  Energy energy(g);
  Problem p = make_affine_problem(
      g, constant_coefficient(g, 1.0), bump_directions(g, 6, 2.0, 0.8),
      load_preset(g, "const1"));
  SnapshotSet snap = sample_snapshots(p, Sampler::random, 40, 123, energy);

  auto svd = svd_widths(snap);
  auto greedy = greedy_widths(snap, 30);
  for (std::size_t n = 0; n + 1 < svd.size(); ++n)
    CHECK(svd[n + 1] <= svd[n] * (1 + 1e-12) + 1e-15);
  for (std::size_t n = 0; n + 1 < greedy.size(); ++n)
    CHECK(greedy[n + 1] <= greedy[n] * (1 + 1e-12) + 1e-15);
  for (std::size_t n = 0; n < greedy.size() && n < svd.size(); ++n)
    CHECK(greedy[n] >= svd[n] * (1 - 1e-10) - 1e-15);

  auto greedy2 = greedy_widths(snap, 30);
  CHECK(greedy == greedy2);

  CHECK_THROWS_AS(greedy_widths(snap, 60), PreconditionError);
}

TEST_CASE("fit_rate") {
  std::vector<double> d(101, 0.0);
  for (int n = 1; n <= 100; ++n) d[n] = std::pow(n, -2.0);
  auto fit = fit_rate(d, 5, 100);
  CHECK_THAT(fit.slope, WithinAbs(-2.0, 1e-12));
  CHECK_THAT(fit.r2, WithinAbs(1.0, 1e-12));

  for (int n = 1; n <= 100; ++n) d[n] = 7.5 * std::pow(n, -2.0);
  auto scaled = fit_rate(d, 5, 100);
  CHECK_THAT(scaled.slope, WithinAbs(-2.0, 1e-12));
  CHECK_THAT(scaled.intercept, WithinAbs(std::log(7.5), 1e-10));

  for (int n = 1; n <= 100; ++n) d[n] = std::pow(n, -2.0) + std::pow(n, -3.0);
  auto mixed = fit_rate(d, 10, 100);
  CHECK(mixed.slope >= -2.1);
  CHECK(mixed.slope <= -1.95);

  d[50] = 0.0;
  CHECK_THROWS_WITH(fit_rate(d, 10, 100),
                    Catch::Matchers::ContainsSubstring("n = 50"));
  CHECK_THROWS_AS(fit_rate(d, 0, 10), PreconditionError);
}

TEST_CASE("rate transfer verdict") {
  RateFit steep;
  steep.slope = -3.0;
  Verdict pass = rate_transfer_verdict(3.0, steep, 0.25);
  CHECK(pass.pass);
  CHECK_THAT(pass.t_required, WithinAbs(1.75, 1e-15));

  RateFit shallow;
  shallow.slope = -0.5;
  CHECK(!rate_transfer_verdict(3.0, shallow, 0.25).pass);
}

TEST_CASE("series-coefficient space obeys the selection tail bound") {
  Grid g(1, 63);
  Energy energy(g);
  Problem p = make_affine_problem(
      g, constant_coefficient(g, 1.0), bump_directions(g, 4, 2.0, 0.3),
      load_preset(g, "const1"));
  BoundContext ctx = make_bound_context(p, energy);
  IndexSet lambda = enumerate_indices(
      4, 5, [](const MultiIndex&) { return 1.0; }, 0.0);
  TaylorTable table = compute_taylor(p, lambda, energy);

  IndexSet lambda_n = n_term_select(table.norm_list(), 10);
  std::vector<Eigen::VectorXd> span;
  for (const auto& nu : lambda_n.members())
    span.push_back(table.coefficient(nu));

  SnapshotSet snap = sample_snapshots(p, Sampler::random, 30, 7, energy);
  const double observed = max_projection_error(snap, energy, span);

  double outside = taylor_tail_bound(ctx, lambda);  // beyond the table
  for (const auto& nu : table.indices)
    if (!lambda_n.contains(nu)) outside += table.norm(nu);
  CHECK(observed <= outside + 1e-10);
}
