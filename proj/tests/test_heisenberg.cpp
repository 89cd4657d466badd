#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "weylkit/errors.hpp"
#include "weylkit/heisenberg.hpp"
#include "weylkit/linalg.hpp"

using namespace weylkit;

namespace {

const double kTwoPi = 2.0 * std::numbers::pi;
const double kLambdas[] = {1.0, 2.0, 0.5, -1.0};

// Test grid whose extent scales with the Gaussian width of the lambda-basis.
GridCn scaled_grid(double lambda, int M = 64) { return GridCn(1, 14.0 / std::sqrt(std::abs(lambda)), M); }

}  // namespace

TEST_CASE("schrodinger matrix at the origin is the identity") {
  for (int n : {1, 2}) {
    HermiteBasis b(n, -2.0, 6);
    const std::vector<double> z(2 * n, 0.0);
    const auto P = schrodinger_matrix(b, z);
    CHECK((P.matrix - CMatrix::Identity(b.size(), b.size())).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(P.truncation_residual < 1e-14);
    CHECK_FALSE(P.sigma_index.has_value());
  }
}

TEST_CASE("schrodinger matrix ground entry is a Gaussian") {
  HermiteBasis b(1, 1.0, 24);
  const double pts[5][2] = {{0.5, 0.0}, {-1.0, 2.0}, {3.0, -1.5}, {0.0, -4.0}, {5.5, 2.5}};
  for (const auto& p : pts) {
    // Independent oracle: trapezoid quadrature of the defining integral.
    const cplx trap = oracle::schrodinger_entry(1.0, 0, 0, p[0], p[1]);
    const double gauss = std::exp(-(p[0] * p[0] + p[1] * p[1]) / 4.0);
    CHECK(std::abs(trap - gauss) < 1e-12);
    const auto P = schrodinger_matrix(b, p);
    CHECK(std::abs(P.matrix(0, 0) - gauss) < 1e-12);
  }
}

TEST_CASE("schrodinger matrix against independent oracles") {
  for (double lambda : kLambdas) {
    HermiteBasis b(1, lambda, 10);
    for (double x : {-3.0, 0.4, 2.2}) {
      for (double y : {-1.7, 0.0, 2.9}) {
        const double z[] = {x, y};
        const auto P = schrodinger_matrix(b, z);
        for (int a = 0; a < 10; ++a)
          for (int c = 0; c < 10; ++c)
            CHECK(std::abs(P.matrix(c, a) - oracle::schrodinger_entry(lambda, a, c, x, y)) < 1e-11);
      }
    }
  }
  // Closed form at lambda = 1, well outside the default rule's range.
  HermiteBasis b(1, 1.0, 16);
  const double z[] = {9.0, -2.0};
  const auto P = schrodinger_matrix(b, z);
  for (int a = 0; a < 16; ++a)
    for (int c = 0; c < 16; ++c)
      CHECK(std::abs(P.matrix(c, a) - oracle::displacement_entry(a, c, 9.0, -2.0)) < 1e-12);
}

TEST_CASE("schrodinger matrix for n = 2 factorises over axes") {
  HermiteBasis b(2, 0.5, 5);
  const double z[] = {0.3, -1.2, 2.0, 0.7};
  const auto P = schrodinger_matrix(b, z);
  for (int i = 0; i < b.size(); ++i)
    for (int j = 0; j < b.size(); ++j) {
      const auto be = b.multi_index(i), al = b.multi_index(j);
      const cplx ref = oracle::schrodinger_entry(0.5, al[0], be[0], 0.3, -1.2) *
                       oracle::schrodinger_entry(0.5, al[1], be[1], 2.0, 0.7);
      CHECK(std::abs(P.matrix(i, j) - ref) < 1e-11);
    }
}

TEST_CASE("unitarity up to truncation") {
  // Column alpha of P(z) loses the mass of D(z) phi_alpha beyond the cap.  Columns
  // whose oracle tail is below 1e-10 must have unit norm within 1e-8.
  const int N = 24;
  HermiteBasis b(1, 1.0, N);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int tested = 0;
  for (int s = 0; s < 20; ++s) {
    double x, y;
    do {
      x = 6.0 * u(rng);
      y = 6.0 * u(rng);
    } while (x * x + y * y > 36.0);
    const double z[] = {x, y};
    const auto P = schrodinger_matrix(b, z);
    CMatrix full(64, N);
    for (int a = 0; a < N; ++a)
      for (int c = 0; c < 64; ++c) full(c, a) = oracle::displacement_entry(a, c, x, y);
    for (int a = 0; a < N; ++a) {
      const double tail = full.col(a).tail(64 - N).squaredNorm();
      if (tail > 1e-10) continue;
      CHECK(std::abs(P.matrix.col(a).norm() - 1.0) < 1e-8);
      ++tested;
    }
    // The reported residual is the measured defect, which the oracle reproduces.
    const CMatrix head = full.topRows(N);
    const double defect = (head.adjoint() * head - CMatrix::Identity(N, N)).cwiseAbs().maxCoeff();
    CHECK(std::abs(P.truncation_residual - defect) < 1e-9);
  }
  CHECK(tested >= 10);
}

TEST_CASE("schrodinger matrix errors") {
  HermiteBasis b(1, 1.0, 4);
  const double bad[] = {std::nan(""), 0.0};
  const double wrong[] = {0.0, 0.0, 0.0, 0.0};
  CHECK_THROWS_AS(schrodinger_matrix(b, bad), DomainError);
  CHECK_THROWS_AS(schrodinger_matrix(b, wrong), ContractError);
}

TEST_CASE("special hermite examples") {
  HermiteBasis b(1, 1.0, 12);
  const double zero[] = {0.0, 0.0};
  CHECK(std::abs(special_hermite(b, {0}, {0}, zero) - 1.0 / std::sqrt(kTwoPi)) < 1e-15);
  CHECK_THROWS_AS(special_hermite(b, {12}, {0}, zero), IndexError);

  GridCn g(1, 12.0, 128);
  auto phi = [&](int a, int c) {
    CMatrix K = CMatrix::Zero(12, 12);
    K(c, a) = 1.0 / std::sqrt(kTwoPi);
    return matrix_coefficient(b, K, g);
  };
  const auto p00 = phi(0, 0), p11 = phi(1, 1), p01 = phi(0, 1);
  CHECK(std::abs(p00.inner(p11)) < 1e-6);
  CHECK(std::abs(p01.norm2() - 1.0) < 1e-6);
  const auto idx = g.flat(std::vector<int>{64 + 10, 64 - 4});
  CHECK(std::abs(p01.values(idx) - special_hermite(b, {0}, {1}, g.point(idx))) < 1e-13);
}

TEST_CASE("fourier wigner transform") {
  HermiteBasis b(1, 1.0, 10);
  GridCn g(1, 12.0, 96);
  const auto e0 = CoeffVector::unit(b, {0});
  const auto T00 = fourier_wigner(b, e0, e0, g);
  for (std::size_t i = 0; i < g.size(); i += 97) {
    const auto p = g.point(i);
    CHECK(std::abs(T00.values(i) - std::exp(-(p[0] * p[0] + p[1] * p[1]) / 4.0)) < 1e-12);
  }
  const auto T01 = fourier_wigner(b, e0, CoeffVector::unit(b, {1}), g);
  CHECK(std::abs(T01.inner(T00)) < 1e-6);

  std::mt19937_64 rng(3);
  for (int t = 0; t < 10; ++t) {
    const auto f1 = random_coeffs(b, 6, rng), f2 = random_coeffs(b, 6, rng);
    const auto g1 = random_coeffs(b, 6, rng), g2 = random_coeffs(b, 6, rng);
    const auto A = fourier_wigner(b, f1, g1, g);
    const auto B = fourier_wigner(b, f2, g2, g);
    const double nrm = kTwoPi * f1.norm() * f1.norm() * g1.norm() * g1.norm();
    CHECK(std::abs(A.norm2() - nrm) <= 1e-5 * nrm);
    const cplx expect = kTwoPi * f1.inner(f2) * std::conj(g1.inner(g2));
    CHECK(std::abs(A.inner(B) - expect) <= 1e-5 * kTwoPi * f1.norm() * f2.norm() * g1.norm() * g2.norm());
  }
  HermiteBasis other(1, 2.0, 10);
  CHECK_THROWS_AS(fourier_wigner(b, CoeffVector::unit(other, {0}), e0, g), ContractError);
}

TEST_CASE("weyl transform of basis functions and zero") {
  HermiteBasis b(1, 1.0, 8);
  GridCn g(1, 12.0, 96);
  CHECK(weyl_transform(b, GridFunction(g)).hs_norm() == 0.0);
  for (auto [a, c] : {std::pair{0, 0}, std::pair{2, 5}, std::pair{7, 1}}) {
    CMatrix K = CMatrix::Zero(8, 8);
    K(c, a) = 1.0 / std::sqrt(kTwoPi);
    const auto F = matrix_coefficient(b, K, g).conj();  // conj(phi_{a c})
    CMatrix expect = CMatrix::Zero(8, 8);
    expect(c, a) = std::sqrt(kTwoPi);
    CHECK((weyl_transform(b, F).matrix - expect).cwiseAbs().maxCoeff() < 1e-5);
  }
}

TEST_CASE("weyl transform matches the pointwise double sum") {
  for (int n : {1, 2}) {
    HermiteBasis b(n, n == 1 ? -0.5 : 2.0, 4);
    GridCn g(n, 3.0, 8);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd;
    GridFunction F(g);
    for (auto& v : F.values) v = cplx(nd(rng), nd(rng));
    CMatrix ref = CMatrix::Zero(b.size(), b.size());
    for (std::size_t i = 0; i < g.size(); ++i)
      ref += g.cell_weight() * F.values(i) * schrodinger_matrix(b, g.point(i)).matrix;
    CHECK(relative_error(weyl_transform(b, F).matrix, ref) < 1e-12);
  }
}

TEST_CASE("inverse weyl round trip, plancherel and adjoint law") {
  for (double lambda : kLambdas) {
    HermiteBasis b(1, lambda, 8);
    const GridCn g = scaled_grid(lambda);
    std::mt19937_64 rng(17);
    for (int t = 0; t < 5; ++t) {
      const CMatrix A = random_band_matrix(b, 4, rng);
      const auto F = inverse_weyl(b, A, g);
      const auto W = weyl_transform(b, F);
      CHECK(relative_error(W.matrix, A) < 1e-8);
      CHECK(std::abs(W.matrix.squaredNorm() - plancherel_constant(b) * F.norm2()) <=
            1e-5 * W.matrix.squaredNorm());
      const auto Wstar = weyl_transform(b, F.star());
      CHECK((Wstar.matrix - W.matrix.adjoint()).norm() <= 1e-8 * std::sqrt(F.norm2()));
    }
  }
}

TEST_CASE("n = 2 weyl transform plancherel") {
  HermiteBasis b(2, 1.0, 4);
  GridCn g(2, 8.0, 48);
  std::mt19937_64 rng(23);
  const CMatrix A = random_band_matrix(b, 3, rng);
  const auto F = inverse_weyl(b, A, g);
  const auto W = weyl_transform(b, F);
  // L = 8 clips the Gaussian tails at about 1e-7.
  CHECK(relative_error(W.matrix, A) < 1e-6);
  CHECK(std::abs(W.matrix.squaredNorm() - kTwoPi * kTwoPi * F.norm2()) <= 1e-5 * W.matrix.squaredNorm());
}

TEST_CASE("twisted convolution fast path agrees with the double sum") {
  std::mt19937_64 rng(29);
  std::normal_distribution<double> nd;
  for (int n : {1, 2}) {
    GridCn g(n, 4.0, n == 1 ? 16 : 8);
    GridFunction F(g), H(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto p = g.point(i);
      bool inner = true;
      for (double c : p) inner = inner && std::abs(c) <= 3.0;
      if (!inner) continue;
      F.values(i) = cplx(nd(rng), nd(rng));
      H.values(i) = cplx(nd(rng), nd(rng));
    }
    const std::vector<double> lambda = n == 1 ? std::vector<double>{-0.7} : std::vector<double>{1.3, -0.4};
    const auto fast = twisted_convolution(lambda, F, H);
    const auto slow = twisted_convolution_direct(lambda, F, H);
    CHECK((fast.values - slow.values).cwiseAbs().maxCoeff() <= 1e-10 * slow.values.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("twisted convolution product law") {
  for (double lambda : kLambdas) {
    HermiteBasis b(1, lambda, 8);
    const GridCn g = scaled_grid(lambda);
    std::mt19937_64 rng(31);
    for (int t = 0; t < 3; ++t) {
      const auto F = inverse_weyl(b, random_band_matrix(b, 4, rng), g);
      const auto H = inverse_weyl(b, random_band_matrix(b, 4, rng), g);
      const auto C = twisted_convolution(lambda, F, H);
      const CMatrix lhs = weyl_transform(b, C).matrix;
      const CMatrix rhs = weyl_transform(b, F).matrix * weyl_transform(b, H).matrix;
      CHECK(relative_error(lhs, rhs) <= 1e-5);
    }
    const auto F = inverse_weyl(b, random_band_matrix(b, 4, rng), g);
    CHECK(twisted_convolution(lambda, F, GridFunction(g)).values.norm() == 0.0);
  }
}

TEST_CASE("twisted convolution is not commutative") {
  HermiteBasis b(1, 1.0, 4);
  const GridCn g = scaled_grid(1.0, 48);
  CMatrix K01 = CMatrix::Zero(4, 4), K10 = CMatrix::Zero(4, 4);
  K01(1, 0) = K10(0, 1) = 1.0 / std::sqrt(kTwoPi);
  const auto F = matrix_coefficient(b, K01, g).conj();
  const auto H = matrix_coefficient(b, K10, g).conj();
  const auto FH = twisted_convolution(1.0, F, H);
  const auto HF = twisted_convolution(1.0, H, F);
  CHECK((FH.values - HF.values).norm() > 0.1 * FH.values.norm());
}

TEST_CASE("twisted convolution rejects functions reaching the boundary") {
  GridCn g(1, 4.0, 16);
  const auto F = GridFunction::sample(g, [](std::span<const double> p) {
    return cplx(std::exp(-0.1 * (p[0] * p[0] + p[1] * p[1])));
  });
  GridFunction H = F;
  try {
    twisted_convolution(1.0, F, H);
    FAIL("expected a precondition error");
  } catch (const PreconditionError& e) {
    CHECK(e.measured() == doctest::Approx(boundary_mass_fraction(F)));
    CHECK(e.measured() > kTwistedTailLimit);
  }
  GridCn other(1, 4.0, 18);
  CHECK_THROWS_AS(twisted_convolution(1.0, F, GridFunction(other)), ContractError);
}
