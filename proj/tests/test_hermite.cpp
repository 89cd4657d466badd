#include "doctest.h"

#include <cmath>
#include <limits>
#include <numbers>

#include "oracles.hpp"
#include "weylkit/errors.hpp"
#include "weylkit/hermite.hpp"

using namespace weylkit;

TEST_CASE("hermite functions match the polynomial closed form") {
  std::vector<double> buf(40);
  for (double x : {-6.5, -2.0, -0.3, 0.0, 0.7, 3.1, 9.0}) {
    hermite_functions(x, buf);
    for (int k = 0; k < 40; ++k) {
      const double ref = oracle::hermite(k, x);
      CHECK(buf[k] == doctest::Approx(ref).epsilon(1e-11).scale(1e-14));
      CHECK(hermite_function(k, x) == doctest::Approx(buf[k]).epsilon(1e-14));
    }
  }
}

TEST_CASE("hermite_eval examples") {
  HermiteBasis b1(1, 1.0, 8);
  const double x0[] = {0.0};
  CHECK(hermite_eval(b1, {0}, x0) == doctest::Approx(std::pow(std::numbers::pi, -0.25)).epsilon(1e-15));
  CHECK(std::abs(hermite_eval(b1, {1}, x0)) < 1e-15);

  HermiteBasis b4(1, 4.0, 8);
  CHECK(hermite_eval(b4, {0}, x0) ==
        doctest::Approx(std::sqrt(2.0) * std::pow(std::numbers::pi, -0.25)).epsilon(1e-14));

  HermiteBasis b2(2, -0.5, 6);
  const double p[] = {0.4, -1.3};
  const double ref = oracle::hermite_scaled(2, -0.5, 0.4) * oracle::hermite_scaled(5, -0.5, -1.3);
  CHECK(hermite_eval(b2, {2, 5}, p) == doctest::Approx(ref).epsilon(1e-13));
}

TEST_CASE("hermite_eval scaling consistency") {
  HermiteBasis unit(2, 1.0, 10);
  for (double lambda : {2.0, 0.5, -1.0, -3.0}) {
    HermiteBasis b(2, lambda, 10);
    const double s = std::sqrt(std::abs(lambda));
    for (int f = 0; f < b.size(); f += 7) {
      const auto alpha = b.multi_index(f);
      const double x[] = {0.3, -1.1};
      const double xs[] = {s * 0.3, -s * 1.1};
      const double expect = std::sqrt(std::abs(lambda)) * hermite_eval(unit, alpha, xs);
      CHECK(hermite_eval(b, alpha, x) == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("hermite_eval errors") {
  HermiteBasis b(1, 1.0, 4);
  const double x[] = {0.0};
  const double bad[] = {std::numeric_limits<double>::infinity()};
  CHECK_THROWS_AS(hermite_eval(b, {4}, x), IndexError);
  CHECK_THROWS_AS(hermite_eval(b, {-1}, x), IndexError);
  CHECK_THROWS_AS(hermite_eval(b, {0}, bad), DomainError);
}

TEST_CASE("basis construction errors") {
  CHECK_THROWS_AS(HermiteBasis(1, 0.0, 8), DomainError);
  CHECK_THROWS_AS(HermiteBasis(1, std::nan(""), 8), DomainError);
  CHECK_THROWS_AS(HermiteBasis(1, 1.0, 0), DomainError);
  CHECK_THROWS_AS(HermiteBasis(3, 1.0, 4), UnsupportedError);
  CHECK_THROWS_AS(HermiteBasis(1, 1.0, 8, 23), DomainError);
  CHECK(HermiteBasis(1, 1.0, 8).quad_size() == 24);
  CHECK(HermiteBasis(1, 1.0, 8, 40).quad_size() == 40);
}

TEST_CASE("build_quadrature examples") {
  const auto one = build_quadrature(1);
  REQUIRE(one.nodes.size() == 1);
  CHECK(one.nodes[0] == 0.0);
  CHECK(one.weights[0] == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-15));
  CHECK_THROWS_AS(build_quadrature(0), DomainError);

  const auto r = build_quadrature(20);
  double ortho = 0.0, moment = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    const double x = r.nodes[i];
    CHECK(r.weights[i] > 0.0);
    CHECK(r.nodes[i] == doctest::Approx(-r.nodes[r.nodes.size() - 1 - i]).epsilon(1e-14));
    ortho += r.weights[i] * oracle::hermite(3, x) * oracle::hermite(5, x);
    moment += r.weights[i] * x * x * std::exp(-x * x);
  }
  CHECK(std::abs(ortho) < 1e-12);
  CHECK(std::abs(moment - std::sqrt(std::numbers::pi) / 2.0) < 1e-12);
}

TEST_CASE("quadrature exactness for polynomial times Gaussian") {
  // int x^{2j} e^{-x^2} dx = Gamma(j + 1/2)
  for (int size : {5, 12, 33, 64}) {
    const auto r = build_quadrature(size);
    for (int j = 0; 2 * j <= 2 * size - 1; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < r.nodes.size(); ++i)
        s += r.weights[i] * std::pow(r.nodes[i], 2 * j) * std::exp(-r.nodes[i] * r.nodes[i]);
      CHECK(s == doctest::Approx(std::tgamma(j + 0.5)).epsilon(1e-11));
    }
  }
}

TEST_CASE("discrete Gram matrix is the identity") {
  for (double lambda : {1.0, 2.0, 0.5, -1.0}) {
    for (int n : {1, 2}) {
      HermiteBasis b(n, lambda, n == 1 ? 24 : 12);
      const Eigen::MatrixXd G = quadrature_gram(b);
      const double err = (G - Eigen::MatrixXd::Identity(b.size(), b.size())).cwiseAbs().maxCoeff();
      CHECK(err <= 1e-10);
    }
  }
}

TEST_CASE("hermite operator eigenvalues") {
  CHECK(hermite_operator_check(HermiteBasis(1, 1.0, 8), {0}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(hermite_operator_check(HermiteBasis(1, 2.0, 8), {2}) == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(hermite_operator_check(HermiteBasis(2, 1.0, 8), {1, 1}) == doctest::Approx(6.0).epsilon(1e-12));

  for (double lambda : {1.0, 2.0, 0.5, -1.0}) {
    HermiteBasis b(1, lambda, 24);
    for (int k = 0; k <= 21; ++k) {
      const double expect = (2.0 * k + 1.0) * std::abs(lambda);
      CHECK(std::abs(hermite_operator_check(b, {k}) - expect) <= 1e-8 * expect);
    }
    CHECK_THROWS_AS(hermite_operator_check(b, {23}), TruncationError);
  }
  HermiteBasis b2(2, -2.0, 6);
  CHECK(hermite_operator_check(b2, {3, 4}) == doctest::Approx(32.0).epsilon(1e-12));
  CHECK_THROWS_AS(hermite_operator_check(b2, {5, 0}), TruncationError);
}

TEST_CASE("hermite operator matrix is diagonal away from the cap") {
  HermiteBasis b(1, 0.5, 10);
  const Eigen::MatrixXd H = hermite_operator_matrix(b);
  for (int i = 0; i + 1 < 10; ++i)
    for (int j = 0; j + 1 < 10; ++j)
      CHECK(std::abs(H(i, j) - (i == j ? (2 * i + 1) * 0.5 : 0.0)) < 1e-12);
}

TEST_CASE("coefficient vectors") {
  HermiteBasis b(1, 1.0, 6);
  HermiteBasis other(1, 2.0, 6);
  auto e2 = CoeffVector::unit(b, {2});
  CHECK(e2.lives_in(b));
  CHECK_FALSE(e2.lives_in(other));
  CHECK(e2.norm() == 1.0);
  CHECK_THROWS_AS(e2.inner(CoeffVector::unit(other, {2})), ContractError);
  CVector c = CVector::Zero(6);
  c(0) = cplx(1.0, 2.0);
  c(3) = -0.5;
  CoeffVector f(b, c);
  CHECK(f.inner(CoeffVector::unit(b, {0})) == cplx(1.0, 2.0));
  const double x[] = {0.8};
  const cplx expect = cplx(1.0, 2.0) * oracle::hermite(0, 0.8) - 0.5 * oracle::hermite(3, 0.8);
  CHECK(std::abs(coeff_eval(b, f, x) - expect) < 1e-14);
  CHECK_THROWS_AS(CoeffVector(b, CVector::Zero(5)), ContractError);
}
