#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "nwidth/boxparam.hpp"

using namespace nwidth;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<double> inverse_square_norms(int count) {
  std::vector<double> norms(count);
  for (int j = 1; j <= count; ++j) norms[j - 1] = 1.0 / (double(j) * j);
  return norms;
}

Complex random_disc_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  while (true) {
    Complex z(uni(rng), uni(rng));
    if (std::abs(z) <= 1.0) return z;
  }
}

}  // namespace

TEST_CASE("tail_cut") {
  CHECK(tail_cut(inverse_square_norms(1000000), 1.0) == 10);
  CHECK(tail_cut(std::vector<double>(50, 0.0), 0.5) == 0);
  CHECK(tail_cut({0.5, 0.3, 0.001, 0.0}, 1.0) == 2);
}

TEST_CASE("net_spacing") {
  CHECK_THAT(net_spacing({1.0}, 1, 1.0), WithinRel(0.1, 1e-15));
  auto norms = inverse_square_norms(10);
  double head = 0;
  for (double v : norms) head += v;
  CHECK_THAT(net_spacing(norms, 10, 1.0), WithinRel(1.0 / (10 * head), 1e-15));
  CHECK_THAT(net_spacing({0.05, 0.05}, 2, 1.0), WithinRel(1.0, 1e-15));
  CHECK_THROWS_AS(net_spacing({0.0, 0.0}, 2, 1.0), DegenerateBoxError);
}

TEST_CASE("disc net covers the closed unit disc") {
  std::mt19937_64 rng(3);
  for (double eta : {0.7, 0.31, 0.11}) {
    DiscNet net = unit_disc_net(eta);
    const double keep2 = (1 + eta) * (1 + eta) * (1 + 1e-12);
    for (int trial = 0; trial < 1000; ++trial) {
      const Complex z = random_disc_point(rng);
      auto [p, q] = net.locate(z);
      const Complex c = net.center_of(p, q);
      CHECK(std::abs(z - c) <= eta * (1 + 1e-12));
      CHECK(std::norm(c) <= keep2);  // the rounded cell is always kept
    }
  }
}

TEST_CASE("covering of a degenerate box") {
  Eigen::MatrixXd dirs = Eigen::MatrixXd::Zero(4, 3);
  BoxParametrization box = make_box(Eigen::VectorXd::Ones(4), dirs);
  Covering cov = build_covering(box, 0.5, {});
  CHECK(cov.J == 0);
  CHECK(cov.centers.cols() == 1);
  CHECK((cov.centers.col(0).real() - box.offset).norm() == 0.0);
  auto check = star_norm_check(cov);
  CHECK(check.ok);
  CHECK_THAT(check.margin, WithinRel(2 * 0.5 / 10, 1e-15));
}

TEST_CASE("single-coordinate covering matches the enumeration oracle") {
  // norms (0.1): J = 1, eta = 1
  Eigen::MatrixXd dirs(2, 1);
  dirs.col(0) << 0.1, 0.05;
  BoxParametrization box = make_box(Eigen::VectorXd::Zero(2), dirs);

  // samples: projections of every kept net point onto the disc
  DiscNet net = unit_disc_net(1.0);
  std::vector<Eigen::VectorXcd> samples;
  for (const Complex& c : net.points) {
    Eigen::VectorXcd z(1);
    z[0] = std::abs(c) > 1 ? c / std::abs(c) : c;
    samples.push_back(z);
  }
  Covering cov = build_covering(box, 1.0, samples);
  CHECK_THAT(cov.eta, WithinRel(1.0, 1e-15));

  // oracle: direct grid enumeration with the documented keep rule
  int oracle = 0;
  const double cell = 1.0 * std::sqrt(2.0);
  const double keep2 = 4.0 * (1 + 1e-12);
  for (int p = -4; p < 4; ++p)
    for (int q = -4; q < 4; ++q) {
      const double re = (p + 0.5) * cell, im = (q + 0.5) * cell;
      if (re * re + im * im <= keep2) ++oracle;
    }
  CHECK(static_cast<int>(cov.centers.cols()) == oracle);
}

TEST_CASE("two-coordinate covering has product structure") {
  // norms (0.1, 0.1), eps = 1: J = 2, eta = 0.5
  Eigen::MatrixXd dirs(3, 2);
  dirs.col(0) << 0.1, 0.0, 0.0;
  dirs.col(1) << 0.0, 0.1, 0.02;
  BoxParametrization box = make_box(Eigen::VectorXd::Zero(3), dirs);

  DiscNet net = unit_disc_net(0.5);
  std::vector<Eigen::VectorXcd> samples;
  for (const Complex& c1 : net.points)
    for (const Complex& c2 : net.points) {
      Eigen::VectorXcd z(2);
      z[0] = std::abs(c1) > 1 ? c1 / std::abs(c1) : c1;
      z[1] = std::abs(c2) > 1 ? c2 / std::abs(c2) : c2;
      samples.push_back(z);
    }
  Covering cov = build_covering(box, 1.0, samples);
  CHECK(cov.J == 2);
  CHECK_THAT(cov.eta, WithinRel(0.5, 1e-15));
  CHECK(static_cast<int>(cov.centers.cols()) ==
        static_cast<int>(net.points.size() * net.points.size()));

  auto check = star_norm_check(cov);
  CHECK(check.ok);
  // eta * (0.1 + 0.1) = eps/10, well under the 2 eps/10 budget
  CHECK_THAT(check.margin, WithinAbs(0.1, 1e-12));
}

TEST_CASE("covering invariants and sample coverage") {
  Eigen::MatrixXd dirs(2, 5);
  dirs.setZero();
  const double norms[] = {0.21, 0.13, 0.08, 0.004, 0.002};
  for (int j = 0; j < 5; ++j) dirs(0, j) = norms[j];
  BoxParametrization box = make_box(Eigen::VectorXd::Ones(2), dirs);

  std::mt19937_64 rng(11);
  std::vector<Eigen::VectorXcd> samples;
  for (int i = 0; i < 1000; ++i) {
    Eigen::VectorXcd z(5);
    for (int j = 0; j < 5; ++j) z[j] = random_disc_point(rng);
    samples.push_back(z);
  }
  const double eps = 1.0;
  Covering cov = build_covering(box, eps, samples);
  REQUIRE(cov.J == 2);  // tail 0.08 + 0.004 + 0.002 = 0.086 < 0.1
  double tail = 0;
  for (std::size_t j = cov.J; j < box.norms.size(); ++j) tail += box.norms[j];
  CHECK(tail < eps / 10);
  if (cov.J > 0) {
    double shorter_tail = tail + box.norms[cov.J - 1];
    CHECK(shorter_tail >= eps / 10);
    double head = 0;
    for (int j = 0; j < cov.J; ++j) head += box.norms[j];
    CHECK_THAT(cov.eta, WithinRel(eps / (10 * head), 1e-15));
  }
  double star_sum = 0;
  for (double v : cov.star_norms) star_sum += v;
  CHECK(star_sum <= 2 * eps / 10 + 1e-15);

  // every sample is covered in the per-coordinate sense
  for (const auto& z : samples) {
    bool covered = false;
    for (const auto& zc : cov.center_coords) {
      double worst = 0;
      for (int j = 0; j < cov.J; ++j)
        worst = std::max(worst, std::abs(z[j] - zc[j]));
      if (worst <= cov.eta * (1 + 1e-9)) {
        covered = true;
        break;
      }
    }
    CHECK(covered);
  }
}

TEST_CASE("star norm check rejects an engineered violation") {
  Eigen::MatrixXd dirs(2, 2);
  dirs.setZero();
  dirs(0, 0) = 0.1;
  dirs(0, 1) = 0.1;
  BoxParametrization box = make_box(Eigen::VectorXd::Zero(2), dirs);
  std::vector<Eigen::VectorXcd> samples{Eigen::VectorXcd::Zero(2)};
  Covering cov = build_covering(box, 1.0, samples);
  REQUIRE(star_norm_check(cov).ok);
  for (double& v : cov.star_norms) v *= 3;  // pretend eta was tripled
  CHECK(!star_norm_check(cov).ok);
}

TEST_CASE("box embedding") {
  const int dim = 31;
  SECTION("single level is the identity case") {
    Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(dim, 1);
    basis(4, 0) = 1.0;
    BoxParametrization box = box_embedding({1.0}, {basis});
    REQUIRE(box.truncation() == 1);
    CHECK((box.directions.col(0) - basis.col(0)).norm() == 0.0);
    CHECK_THAT(box.norms[0], WithinRel(1.0, 1e-15));
  }

  SECTION("two levels follow the j = 2^k + l - 1 pairing") {
    Eigen::MatrixXd b0 = Eigen::MatrixXd::Zero(dim, 1);
    b0(0, 0) = 1.0;
    Eigen::MatrixXd b1 = Eigen::MatrixXd::Zero(dim, 2);
    b1(1, 0) = 1.0;
    b1(2, 1) = 1.0;
    BoxParametrization box = box_embedding({1.0, 0.25}, {b0, b1});
    REQUIRE(box.truncation() == 3);
    CHECK(box.directions(0, 0) == 1.0);    // j = 1 <- (k=0, l=1)
    CHECK(box.directions(1, 1) == 0.25);   // j = 2 <- (k=1, l=1)
    CHECK(box.directions(2, 2) == 0.25);   // j = 3 <- (k=1, l=2)
  }

  SECTION("five levels satisfy the decay contract") {
    const double s = 2.0, C = 1.0;
    std::vector<double> errors;
    std::vector<Eigen::MatrixXd> bases;
    int used = 0;
    for (int k = 0; k < 5; ++k) {
      errors.push_back(C * std::pow(2.0, -s * k));
      Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(dim, 1 << k);
      for (int l = 0; l < (1 << k); ++l) basis(used++, l) = 1.0;
      bases.push_back(basis);
    }
    BoxParametrization box = box_embedding(errors, bases);
    double worst = 0;
    for (int j = 1; j <= box.truncation(); ++j)
      worst = std::max(worst, std::pow(j, s) * box.norms[j - 1] /
                                  (std::pow(2.0, s) * C));
    CHECK(worst <= 1.0);
  }

  SECTION("non-orthonormal bases are rejected") {
    Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(dim, 1);
    bad(0, 0) = 1.1;
    CHECK_THROWS_AS(box_embedding({1.0}, {bad}), DomainError);
  }
}

TEST_CASE("box width bound") {
  CHECK(box_width_bound({1.0, 0.5}, 2) == 0.0);
  auto norms = inverse_square_norms(1000);
  double expected = 0;
  for (int j = 11; j <= 1000; ++j) expected += 1.0 / (double(j) * j);
  CHECK_THAT(box_width_bound(norms, 10), WithinRel(expected, 1e-12));
  double full = 0;
  for (double v : norms) full += v;
  CHECK_THAT(box_width_bound(norms, 0), WithinRel(full, 1e-12));
}

TEST_CASE("covering cap guard") {
  Eigen::MatrixXd dirs = Eigen::MatrixXd::Zero(2, 8);
  for (int j = 0; j < 8; ++j) dirs(0, j) = 0.05;
  BoxParametrization box = make_box(Eigen::VectorXd::Zero(2), dirs);
  CoveringOptions opts;
  opts.j_cap = 3;
  try {
    build_covering(box, 1.0, {}, opts);  // J = 8 needed
    FAIL("expected blowup refusal");
  } catch (const CombinatorialBlowupError& e) {
    CHECK(e.predicted_centers > 0);
  }
}

TEST_CASE("suggest_epsilon") {
  Eigen::MatrixXd dirs = Eigen::MatrixXd::Zero(5, 1);
  dirs(0, 0) = 0.5;
  BoxParametrization box = make_box(Eigen::VectorXd::Ones(5), dirs);
  std::vector<Eigen::VectorXd> samples;
  for (double y : {-1.0, 0.0, 1.0}) {
    Eigen::VectorXd v(1);
    v[0] = y;
    samples.push_back(v);
  }
  CHECK_THAT(suggest_epsilon(box, 0.2, samples), WithinRel(0.15, 1e-12));
  CHECK_THROWS_AS(suggest_epsilon(box, 0.5, samples), DomainError);
}
