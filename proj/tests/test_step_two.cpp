#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "weylkit/errors.hpp"
#include "weylkit/linalg.hpp"
#include "weylkit/step_two.hpp"

using namespace weylkit;

namespace {

const double kTwoPi = 2.0 * std::numbers::pi;

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(v.size());
  int i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

Eigen::VectorXd random_unit(int k, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Eigen::VectorXd w(k);
  for (int i = 0; i < k; ++i) w(i) = nd(rng);
  return w.normalized();
}

GridCn omega_grid(const SymplecticDecomp& d, double width, int M) {
  return GridCn(d.pairs(), width / std::sqrt(d.d.back()), M);
}

}  // namespace

TEST_CASE("bilinear form examples") {
  const auto H = heisenberg_algebra();
  const Eigen::MatrixXd B = bilinear_form(H, vec({3.0}));
  CHECK(B(0, 1) == 3.0);
  CHECK(B(1, 0) == -3.0);
  CHECK(B(0, 0) == 0.0);
  CHECK(bilinear_form(H, vec({0.0})).norm() == 0.0);
  CHECK_THROWS_AS(bilinear_form(H, vec({1.0, 2.0})), ContractError);

  const auto Q = quaternionic_h_type_algebra();
  std::mt19937_64 rng(71);
  for (int t = 0; t < 10; ++t) {
    const Eigen::VectorXd w = random_unit(3, rng);
    const Eigen::MatrixXd Bq = bilinear_form(Q, w);
    CHECK((Bq + Bq.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((Bq * Bq + Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("symplectic decomposition examples") {
  const auto H = heisenberg_algebra();
  const auto d3 = symplectic_decompose(H, vec({3.0}));
  REQUIRE(d3.pairs() == 1);
  CHECK(d3.d[0] == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(d3.p_omega == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(d3.radical_dim == 0);
  CHECK(d3.metivier());
  CHECK(std::abs(d3.X(0, 0) - 1.0) < 1e-14);
  CHECK(std::abs(d3.Y(1, 0) - 1.0) < 1e-14);

  const auto Q = quaternionic_h_type_algebra();
  const Eigen::VectorXd w = 2.0 * vec({0.6, 0.0, 0.8});
  const auto dq = symplectic_decompose(Q, w);
  REQUIRE(dq.pairs() == 2);
  CHECK(dq.d[0] == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(dq.d[1] == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(dq.p_omega == doctest::Approx(4.0).epsilon(1e-13));
  CHECK(dq.tie);
  // Independent oracle: singular values of B, which come in equal pairs.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(bilinear_form(Q, w));
  for (int i = 0; i < 4; ++i) CHECK(svd.singularValues()(i) == doctest::Approx(dq.d[i / 2]).epsilon(1e-13));

  const auto R = radical_algebra();
  const auto dr = symplectic_decompose(R, vec({1.0}));
  CHECK(dr.radical_dim == 2);
  CHECK_FALSE(dr.metivier());
  CHECK(dr.pairs() == 1);
  CHECK(dr.pairing_residual() < 1e-12);
}

TEST_CASE("symplectic decomposition invariants") {
  std::mt19937_64 rng(73);
  std::normal_distribution<double> nd;
  const auto Q = quaternionic_h_type_algebra();
  for (int t = 0; t < 20; ++t) {
    const Eigen::VectorXd w = (0.1 + 3.0 * std::abs(nd(rng))) * random_unit(3, rng);
    const auto d = symplectic_decompose(Q, w);
    CHECK(d.radical_dim == 0);
    CHECK(d.pairing_residual() < 1e-10);
    for (double s : {-2.5, 0.3, 7.0}) {
      const auto ds = symplectic_decompose(Q, s * w);
      for (int i = 0; i < d.pairs(); ++i) CHECK(std::abs(ds.d[i] - std::abs(s) * d.d[i]) < 1e-10 * std::abs(s) * d.d[i]);
    }
  }
  // Generic skew matrices, including odd size.
  for (int m : {3, 5, 6}) {
    Eigen::MatrixXd A(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) A(i, j) = nd(rng);
    const Eigen::MatrixXd B = A - A.transpose();
    const auto d = symplectic_decompose(B, vec({1.0}));
    CHECK(d.pairs() == m / 2);
    CHECK(d.radical_dim == m % 2);
    CHECK(d.pairing_residual() < 1e-10);
    for (int i = 0; i + 1 < d.pairs(); ++i) CHECK(d.d[i] >= d.d[i + 1]);
    CHECK_FALSE(d.tie);
  }
  // Deterministic tie-breaking.
  const auto a = symplectic_decompose(Q, vec({0.0, 1.0, 0.0}));
  const auto b = symplectic_decompose(Q, vec({0.0, 1.0, 0.0}));
  CHECK((a.X - b.X).norm() == 0.0);
  CHECK((a.Y - b.Y).norm() == 0.0);
  for (int j = 0; j < a.pairs(); ++j) {
    int first = 0;
    while (std::abs(a.X(first, j)) < 1e-12) ++first;
    CHECK(a.X(first, j) > 0.0);
  }
  Eigen::MatrixXd notskew = Eigen::MatrixXd::Identity(2, 2);
  CHECK_THROWS_AS(symplectic_decompose(notskew, vec({1.0})), ContractError);
}

TEST_CASE("group law is associative") {
  std::mt19937_64 rng(79);
  std::normal_distribution<double> nd;
  for (const auto& fx : shipped_fixtures()) {
    const auto alg = fx.make();
    auto random_element = [&] {
      StepTwoElement e{Eigen::VectorXd(alg.m()), Eigen::VectorXd(alg.k())};
      for (int i = 0; i < alg.m(); ++i) e.V(i) = nd(rng);
      for (int i = 0; i < alg.k(); ++i) e.Z(i) = nd(rng);
      return e;
    };
    for (int t = 0; t < 20; ++t) {
      const auto a = random_element(), b = random_element(), c = random_element();
      const auto l = group_multiply(alg, group_multiply(alg, a, b), c);
      const auto r = group_multiply(alg, a, group_multiply(alg, b, c));
      CHECK((l.V - r.V).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((l.Z - r.Z).cwiseAbs().maxCoeff() < 1e-12);
      const auto e = group_multiply(alg, a, group_inverse(a));
      CHECK(e.V.norm() < 1e-15);
      CHECK(e.Z.norm() < 1e-15);
    }
  }
}

TEST_CASE("structure constant files") {
  for (const auto& fx : shipped_fixtures()) {
    const auto built = fx.make();
    const auto parsed = StepTwoAlgebra::parse(built.serialize());
    const auto loaded = StepTwoAlgebra::load(std::string(WEYLKIT_FIXTURE_DIR) + "/" + fx.file_name);
    for (const auto* a : {&parsed, &loaded}) {
      REQUIRE(a->m() == built.m());
      REQUIRE(a->k() == built.k());
      for (int i = 0; i < built.m(); ++i)
        for (int j = 0; j < built.m(); ++j)
          for (int l = 0; l < built.k(); ++l) CHECK(a->c(i, j, l) == built.c(i, j, l));
    }
  }
  const auto both = StepTwoAlgebra::parse("# c\n2 1\n1 2 1 2.5\n2 1 1 -2.5\n");
  CHECK(both.c(1, 0, 0) == -2.5);
  CHECK_THROWS_AS(StepTwoAlgebra::parse(""), ContractError);
  CHECK_THROWS_AS(StepTwoAlgebra::parse("2 1\n1 2 1 1\n2 1 1 1\n"), ContractError);
  CHECK_THROWS_AS(StepTwoAlgebra::parse("2 1\n1 2 1 1\n1 2 1 1\n"), ContractError);
  CHECK_THROWS_AS(StepTwoAlgebra::parse("2 1\n1 3 1 1\n"), ContractError);
  CHECK_THROWS_AS(StepTwoAlgebra::parse("2 1\n1 1 1 1\n"), ContractError);
  CHECK_THROWS_AS(StepTwoAlgebra::parse("2 1\n1 2 x\n"), ContractError);
  CHECK_THROWS_AS(StepTwoAlgebra::parse("two one\n"), ContractError);
  CHECK_THROWS_AS(StepTwoAlgebra::load("/nonexistent/file.alg"), ContractError);
}

TEST_CASE("pi_omega action") {
  const auto H = heisenberg_algebra();
  const auto d = symplectic_decompose(H, vec({1.0}));
  const auto basis = omega_basis(d, 12);
  CHECK(basis.axis_lambda(0) == -1.0);
  std::mt19937_64 rng(83);
  const auto phi = random_coeffs(basis, 4, rng);
  const double zero[] = {0.0};
  CHECK((pi_omega_action(d, basis, zero, zero, zero, phi).coeffs - phi.coeffs).norm() < 1e-14);

  // Cross-module: pi_omega on the Heisenberg fixture is the Schrodinger
  // representation with lambda = -omega, i.e. lambda = omega at (-x, y).
  HermiteBasis plus(1, 1.0, 12), minus(1, -1.0, 12);
  for (auto [x, y] : {std::pair{0.7, -0.2}, std::pair{-1.5, 1.1}, std::pair{2.0, 0.4}}) {
    const double px[] = {x}, py[] = {y};
    const double z[] = {x, y}, zr[] = {-x, y};
    CMatrix P(12, 12);
    for (int a = 0; a < 12; ++a) P.col(a) = pi_omega_action(d, basis, px, py, zero, CoeffVector::unit(basis, {a})).coeffs;
    CHECK((P - schrodinger_matrix(minus, z).matrix).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((P - schrodinger_matrix(plus, zr).matrix).cwiseAbs().maxCoeff() < 1e-10);
  }

  // Central character and unitarity for low-degree vectors.
  const double t[] = {0.9};
  const double px[] = {0.6}, py[] = {-0.3};
  const auto a = pi_omega_action(d, basis, px, py, t, phi);
  const auto b = pi_omega_action(d, basis, px, py, zero, phi);
  CHECK((a.coeffs - std::polar(1.0, 0.9) * b.coeffs).norm() < 1e-14);
  CHECK(std::abs(a.norm() - phi.norm()) < 1e-8 * phi.norm());

  // Homomorphism with the BCH cocycle: pi(v) pi(v') = e^{(i/2) omega([v, v'])} pi(v + v').
  const auto Q = quaternionic_h_type_algebra();
  const Eigen::VectorXd w = vec({0.3, -0.5, 0.7});
  const auto dq = symplectic_decompose(Q, w);
  const auto bq = omega_basis(dq, 10);
  const double v1[] = {0.4, -0.2, 0.1, 0.3}, v2[] = {-0.3, 0.5, 0.2, -0.1};
  const double sum[] = {0.1, 0.3, 0.3, 0.2};
  const CMatrix lhs = schrodinger_matrix(bq, v1).matrix * schrodinger_matrix(bq, v2).matrix;
  const double phase = 0.5 * w.dot(Q.bracket(dq.to_b(v1), dq.to_b(v2)));
  const CMatrix rhs = std::polar(1.0, phase) * schrodinger_matrix(bq, sum).matrix;
  // Compare on the low-degree block, away from the truncation edge.
  double worst = 0.0;
  for (int i = 0; i < bq.size(); ++i)
    for (int j = 0; j < bq.size(); ++j)
      if (bq.total_degree(i) <= 3 && bq.total_degree(j) <= 3)
        worst = std::max(worst, std::abs(lhs(i, j) - rhs(i, j)));
  CHECK(worst < 1e-8);

  CHECK_THROWS_AS(pi_omega_action(d, HermiteBasis(1, 1.0, 12), px, py, zero, phi), ContractError);
  const auto dr = symplectic_decompose(radical_algebra(), vec({1.0}));
  CHECK_THROWS_AS(omega_basis(dr, 4), UnsupportedError);
}

TEST_CASE("weyl_omega plancherel, adjoint and cross-module agreement") {
  std::mt19937_64 rng(89);
  const auto H = heisenberg_algebra();
  for (double w : {1.0, -2.0, 0.5}) {
    const auto d = symplectic_decompose(H, vec({w}));
    const auto basis = omega_basis(d, 8);
    const GridCn g = omega_grid(d, 14.0, 64);
    const auto h = inverse_weyl(basis, random_band_matrix(basis, 4, rng), g);
    const auto W = weyl_omega(d, basis, h);
    const double lhs = d.p_omega * W.matrix.squaredNorm();
    const double rhs = kTwoPi * h.norm2();
    CHECK(std::abs(lhs - rhs) <= 1e-5 * rhs);
    CHECK((weyl_omega(d, basis, h.star()).matrix - W.matrix.adjoint()).norm() <= 1e-8 * W.matrix.norm());
    // Adapted frame: X = e_1, Y = sgn(w) e_2, and pi_omega is the Schrodinger
    // representation at -|w|.
    CHECK(d.Y(1, 0) == doctest::Approx(w > 0 ? 1.0 : -1.0));
    const CMatrix ref = weyl_transform(HermiteBasis(1, -std::abs(w), 8), h).matrix;
    CHECK((W.matrix - ref).cwiseAbs().maxCoeff() <= 1e-10);
  }
  const auto Q = quaternionic_h_type_algebra();
  const auto d = symplectic_decompose(Q, vec({0.0, 0.8, -0.6}));
  const auto basis = omega_basis(d, 4);
  const GridCn g = omega_grid(d, 10.0, 40);
  const auto h = inverse_weyl(basis, random_band_matrix(basis, 3, rng), g);
  const auto W = weyl_omega(d, basis, h);
  const double lhs = d.p_omega * W.matrix.squaredNorm();
  const double rhs = kTwoPi * kTwoPi * h.norm2();
  CHECK(std::abs(lhs - rhs) <= 1e-5 * rhs);

  const GridCn tight(1, 3.0, 16);
  const auto dh = symplectic_decompose(H, vec({1.0}));
  const auto wide = GridFunction::sample(tight, [](std::span<const double>) { return cplx(1.0); });
  CHECK_THROWS_AS(weyl_omega(dh, omega_basis(dh, 4), wide), PreconditionError);
}

TEST_CASE("omega-twisted convolution") {
  std::mt19937_64 rng(97);
  const auto H = heisenberg_algebra();
  const auto d = symplectic_decompose(H, vec({1.5}));
  const auto basis = omega_basis(d, 8);
  const GridCn g = omega_grid(d, 14.0, 48);
  const auto f = inverse_weyl(basis, random_band_matrix(basis, 4, rng), g);
  const auto h = inverse_weyl(basis, random_band_matrix(basis, 4, rng), g);
  const auto c = twisted_convolution_omega(H, d, f, h);
  // Agrees with the phase-table path at lambda = -d.
  const auto fast = twisted_convolution(-d.d[0], f, h);
  CHECK((c.values - fast.values).cwiseAbs().maxCoeff() <= 1e-10 * c.values.cwiseAbs().maxCoeff());
  const CMatrix lhs = weyl_omega(d, basis, c).matrix;
  const CMatrix rhs = weyl_omega(d, basis, f).matrix * weyl_omega(d, basis, h).matrix;
  CHECK(relative_error(lhs, rhs) <= 1e-5);
  CHECK(twisted_convolution_omega(H, d, f, GridFunction(g)).values.norm() == 0.0);

  // Quaternionic fixture on a tiny grid: structure-constant phase vs per-pair phase tables.
  const auto Q = quaternionic_h_type_algebra();
  const auto dq = symplectic_decompose(Q, vec({0.2, 0.9, -0.4}));
  const GridCn small(2, 4.0, 8);
  std::normal_distribution<double> nd;
  GridFunction a(small), b(small);
  for (std::size_t i = 0; i < small.size(); ++i) {
    bool inner = true;
    for (double x : small.point(i)) inner = inner && std::abs(x) <= 3.0;
    if (!inner) continue;
    a.values(i) = cplx(nd(rng), nd(rng));
    b.values(i) = cplx(nd(rng), nd(rng));
  }
  const auto cq = twisted_convolution_omega(Q, dq, a, b);
  const std::vector<double> lam = {-dq.d[0], -dq.d[1]};
  const auto cf = twisted_convolution(lam, a, b);
  CHECK((cq.values - cf.values).cwiseAbs().maxCoeff() <= 1e-10 * cq.values.cwiseAbs().maxCoeff());
}

TEST_CASE("omega-twisted convolution is the central Fourier slice of group convolution") {
  // f(v, t) = a(v) p(t), g(v, t) = b(v) q(t) with Gaussian p, q.  The group
  // convolution (f * g)(v, t) = int f(v - v', t - t' - [v, v']/2) g(v', t') is
  // evaluated directly, then Fourier transformed in t, at a few points.
  const auto H = heisenberg_algebra();
  const double w = 0.8;
  const auto d = symplectic_decompose(H, vec({w}));
  const auto basis = omega_basis(d, 6);
  const GridCn g = omega_grid(d, 14.0, 32);
  std::mt19937_64 rng(101);
  const auto a = inverse_weyl(basis, random_band_matrix(basis, 3, rng), g);
  const auto b = inverse_weyl(basis, random_band_matrix(basis, 3, rng), g);
  auto p = [](double t) { return std::exp(-t * t); };
  auto q = [](double t) { return std::exp(-0.5 * (t - 0.3) * (t - 0.3)); };
  // Trapezoid over [c - 20, c + 20]; c must sit near the bulk of fn.
  auto hat = [&](auto fn, double c = 0.0) {
    cplx acc = 0.0;
    const int K = 4000;
    for (int j = 0; j <= K; ++j) {
      const double t = c - 20.0 + 40.0 * j / K;
      acc += fn(t) * std::polar(1.0, w * t);
    }
    return acc * (40.0 / K);
  };
  const cplx ph = hat(p), qh = hat(q);
  GridFunction fw = a, gw = b;
  fw.values *= ph;
  gw.values *= qh;
  const auto slice = twisted_convolution_omega(H, d, fw, gw);

  const int M = g.points_per_axis();
  for (std::size_t iv : {g.flat(std::vector<int>{M / 2, M / 2}), g.flat(std::vector<int>{M / 2 + 3, M / 2 - 5})}) {
    const auto v = g.point(iv);
    const auto vi = g.indices(iv);
    // (f*g)^omega(v) = int dt e^{i w t} sum_v' w a(v - v') b(v') int dt' p(t - t' - s) q(t'),
    // with s = [v, v']/2; the t integrals are done by the same trapezoid rule.
    cplx acc = 0.0;
    for (std::size_t iw = 0; iw < g.size(); ++iw) {
      const auto wi = g.indices(iw);
      const int sx = vi[0] - wi[0] + M / 2, sy = vi[1] - wi[1] + M / 2;
      if (sx < 0 || sx >= M || sy < 0 || sy >= M) continue;
      const auto wp = g.point(iw);
      const double s = 0.5 * (v[0] * wp[1] - v[1] * wp[0]);
      // The t' integral factors out as q^; the remaining t integral of the
      // shifted p is done directly on a window around s.
      const cplx conv_t = hat([&](double t) { return p(t - s); }, s) * qh;
      acc += a.values(static_cast<Eigen::Index>(g.flat(std::vector<int>{sx, sy}))) *
             b.values(static_cast<Eigen::Index>(iw)) * conv_t;
    }
    acc *= g.cell_weight();
    CHECK(std::abs(acc - slice.values(static_cast<Eigen::Index>(iv))) <= 1e-8 * std::abs(acc));
  }
}

TEST_CASE("trace inversion") {
  std::mt19937_64 rng(103);
  const auto H = heisenberg_algebra();
  const auto d = symplectic_decompose(H, vec({1.0}));
  const auto basis = omega_basis(d, 10);
  const GridCn g = omega_grid(d, 14.0, 64);

  // h = conj of a special Hermite function of the fixture's representation.
  CMatrix K = CMatrix::Zero(10, 10);
  K(3, 1) = 1.0 / std::sqrt(kTwoPi);
  const auto h = matrix_coefficient(basis, K, g).conj();
  const auto W = weyl_omega(d, basis, h);
  double res = 0.0;
  for (std::size_t i = 0; i < g.size(); i += 37) {
    const auto v = g.point(i);
    res = std::max(res, std::abs(inversion(d, basis, W, v) - h.values(i)));
  }
  CHECK(res <= 1e-5);

  WeylMatrix zero{CMatrix::Zero(10, 10), {-1.0}, std::nullopt, 0.0};
  const double v0[] = {0.3, 0.2};
  CHECK(inversion(d, basis, zero, v0) == cplx(0.0));

  WeylMatrix A{random_band_matrix(basis, 9, rng), {-1.0}, std::nullopt, 0.0};
  WeylMatrix B{random_band_matrix(basis, 9, rng), {-1.0}, std::nullopt, 0.0};
  WeylMatrix C{cplx(0.5, 1.0) * A.matrix - 2.0 * B.matrix, {-1.0}, std::nullopt, 0.0};
  const cplx lin = cplx(0.5, 1.0) * inversion(d, basis, A, v0) - 2.0 * inversion(d, basis, B, v0);
  CHECK(std::abs(inversion(d, basis, C, v0) - lin) <= 1e-10 * std::abs(lin));

  CHECK(inversion_tail(basis, W) < 1e-20);
  CHECK(inversion_tail(basis, A) > 0.05);

  // Quaternionic fixture round trip through the grid formula.
  const auto Q = quaternionic_h_type_algebra();
  const auto dq = symplectic_decompose(Q, vec({0.5, 0.5, 0.5}));
  const auto bq = omega_basis(dq, 4);
  const GridCn gq = omega_grid(dq, 10.0, 40);
  const auto hq = inverse_weyl(bq, random_band_matrix(bq, 3, rng), gq);
  const auto Wq = weyl_omega(dq, bq, hq);
  const auto back = inversion_on_grid(dq, bq, Wq, gq);
  const double hinf = hq.values.cwiseAbs().maxCoeff();
  double worst = 0.0;
  for (std::size_t i = 0; i < gq.size(); ++i) {
    bool interior = true;
    for (double x : gq.point(i)) interior = interior && std::abs(x) <= 0.75 * gq.half_width();
    if (interior) worst = std::max(worst, std::abs(back.values(i) - hq.values(i)));
  }
  CHECK(worst <= 1e-4 * hinf);
  const double vq[] = {0.2, -0.1, 0.4, 0.3};
  const std::size_t probe = gq.flat(std::vector<int>{20, 21, 19, 22});
  CHECK(std::abs(inversion(dq, bq, Wq, gq.point(probe)) - back.values(probe)) < 1e-12 * hinf);
  (void)vq;
}
