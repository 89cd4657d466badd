#include "weylkit/motion.hpp"

#include <cmath>
#include <numbers>

#include "weylkit/errors.hpp"

namespace weylkit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_plane(const HermiteBasis& basis) {
  if (basis.dim() != 1) throw UnsupportedError("motion group: only n = 1, K = U(1) is supported");
}

CVector mu_diagonal(const HermiteBasis& basis, double theta, int sign) {
  CVector d(basis.size());
  for (int k = 0; k < basis.size(); ++k) d(k) = std::polar(1.0, sign * k * theta);
  return d;
}

}  // namespace

CharacterIndex::CharacterIndex(int m_, int cap) : m(m_) {
  if (cap < 0 || std::abs(m_) > cap) throw IndexError("CharacterIndex: |m| exceeds the cap");
}

GridGx::GridGx(GridCn cn, int theta_points, int max_char)
    : cn_(cn), T_(theta_points), max_char_(max_char) {
  if (cn.n() != 1) throw UnsupportedError("GridGx: only n = 1 is supported");
  if (max_char < 0) throw DomainError("GridGx: max_char must be >= 0");
  if (theta_points < 2 * max_char + 4)
    throw DomainError("GridGx: theta_points must be >= 2 * max_char + 4");
}

double GridGx::theta(int k) const { return kTwoPi * k / T_; }

MotionFunction::MotionFunction(GridGx g) : grid(g), values(CVector::Zero(g.size())) {}

MotionFunction::MotionFunction(GridGx g, CVector v) : grid(g), values(std::move(v)) {
  if (static_cast<std::size_t>(values.size()) != grid.size())
    throw ContractError("MotionFunction: value count does not match grid");
}

MotionFunction MotionFunction::sample(
    const GridGx& g, const std::function<cplx(std::span<const double>, double)>& f) {
  MotionFunction out(g);
  for (std::size_t iz = 0; iz < g.cn().size(); ++iz) {
    const auto p = g.cn().point(iz);
    for (int k = 0; k < g.theta_points(); ++k) out.values(g.flat(iz, k)) = f(p, g.theta(k));
  }
  return out;
}

GridFunction MotionFunction::slice(int k) const {
  GridFunction out(grid.cn());
  for (std::size_t iz = 0; iz < grid.cn().size(); ++iz) out.values(iz) = values(grid.flat(iz, k));
  return out;
}

void MotionFunction::set_slice(int k, const GridFunction& f) {
  if (!(f.grid == grid.cn())) throw ContractError("MotionFunction::set_slice: grid mismatch");
  for (std::size_t iz = 0; iz < grid.cn().size(); ++iz) values(grid.flat(iz, k)) = f.values(iz);
}

double MotionFunction::norm2() const { return grid.weight() * values.squaredNorm(); }

cplx MotionFunction::inner(const MotionFunction& other) const {
  if (!(grid == other.grid)) throw ContractError("MotionFunction::inner: grid mismatch");
  return grid.weight() * other.values.dot(values);
}

int metaplectic_sign(double lambda) {
  if (lambda == 0.0 || !std::isfinite(lambda)) throw DomainError("metaplectic_sign: lambda must be nonzero");
  return lambda > 0 ? 1 : -1;
}

WeylMatrix metaplectic_matrix(const HermiteBasis& basis, double theta, int sign) {
  require_plane(basis);
  if (sign != 1 && sign != -1) throw DomainError("metaplectic_matrix: sign must be +1 or -1");
  if (!std::isfinite(theta)) throw DomainError("metaplectic_matrix: non-finite theta");
  WeylMatrix out;
  out.lambda = basis.axis_lambdas();
  out.matrix = mu_diagonal(basis, theta, sign).asDiagonal();
  return out;
}

WeylMatrix metaplectic_matrix(const HermiteBasis& basis, double theta) {
  require_plane(basis);
  return metaplectic_matrix(basis, theta, metaplectic_sign(basis.lambda()));
}

double intertwining_residual(const HermiteBasis& basis, double theta, std::span<const double> z,
                             int sign) {
  require_plane(basis);
  const double c = std::cos(theta), s = std::sin(theta);
  const double rz[] = {c * z[0] - s * z[1], s * z[0] + c * z[1]};
  const CMatrix lhs = schrodinger_matrix(basis, rz).matrix;
  const CMatrix mu = metaplectic_matrix(basis, theta, sign).matrix;
  const CMatrix rhs = mu * schrodinger_matrix(basis, z).matrix * mu.adjoint();
  return (lhs - rhs).norm();
}

WeylMatrix motion_weyl(const HermiteBasis& basis, const CharacterIndex& m, const MotionFunction& F) {
  require_plane(basis);
  const GridGx& g = F.grid;
  if (std::abs(m.m) > g.max_char()) throw IndexError("motion_weyl: character beyond the grid cap");
  const int s = metaplectic_sign(basis.lambda());
  const int T = g.theta_points();
  const int N = basis.size();
  WeylMatrix out;
  out.lambda = basis.axis_lambdas();
  out.sigma_index = m.m;
  out.matrix = CMatrix::Zero(N, N);
  // Column alpha only sees G_alpha(z) = (1/T) sum_theta F(z, theta) e^{i (s alpha + m) theta}.
  for (int a = 0; a < N; ++a) {
    GridFunction G(g.cn());
    for (int k = 0; k < T; ++k) {
      const cplx e = std::polar(1.0 / T, (s * a + m.m) * g.theta(k));
      for (std::size_t iz = 0; iz < g.cn().size(); ++iz) G.values(iz) += e * F.values(g.flat(iz, k));
    }
    out.matrix.col(a) = weyl_transform(basis, G).matrix.col(a);
  }
  return out;
}

MotionFunction inverse_motion_weyl(const HermiteBasis& basis, const std::vector<CMatrix>& Ws,
                                   const GridGx& grid) {
  require_plane(basis);
  const int cap = (static_cast<int>(Ws.size()) - 1) / 2;
  if (static_cast<int>(Ws.size()) != 2 * cap + 1 || cap > grid.max_char())
    throw ContractError("inverse_motion_weyl: need 2 cap + 1 matrices with cap <= grid cap");
  const int s = metaplectic_sign(basis.lambda());
  MotionFunction out(grid);
  // F(z, theta) = sum_m e^{-i m theta} (inverse Weyl of W_m mu(theta)^H)(z).
  for (int k = 0; k < grid.theta_points(); ++k) {
    const double th = grid.theta(k);
    CMatrix A = CMatrix::Zero(basis.size(), basis.size());
    for (int m = -cap; m <= cap; ++m) A += std::polar(1.0, -m * th) * Ws[m + cap];
    A = A * mu_diagonal(basis, th, s).conjugate().asDiagonal();
    out.set_slice(k, inverse_weyl(basis, A, grid.cn()));
  }
  return out;
}

MotionFunction fourier_wigner_motion(const HermiteBasis& basis, const CharacterIndex& m,
                                     const CoeffVector& f, const CoeffVector& g,
                                     const GridGx& grid) {
  require_plane(basis);
  if (!f.lives_in(basis) || !g.lives_in(basis))
    throw ContractError("fourier_wigner_motion: coefficient vectors belong to another basis");
  const int s = metaplectic_sign(basis.lambda());
  MotionFunction out(grid);
  for (int k = 0; k < grid.theta_points(); ++k) {
    const double th = grid.theta(k);
    const CoeffVector rotated(basis, mu_diagonal(basis, th, s).cwiseProduct(f.coeffs));
    GridFunction slice = fourier_wigner(basis, rotated, g, grid.cn());
    slice.values *= std::polar(1.0, m.m * th);
    out.set_slice(k, slice);
  }
  return out;
}

MotionFunction twisted_convolution_gx(const HermiteBasis& basis, const MotionFunction& F,
                                      const MotionFunction& H) {
  require_plane(basis);
  if (!(F.grid == H.grid)) throw ContractError("twisted_convolution_gx: grids differ");
  const GridGx& g = F.grid;
  const int T = g.theta_points();
  const int s = metaplectic_sign(basis.lambda());
  const double lambda = basis.lambda();

  std::vector<GridFunction> Fs, Hs;
  std::vector<CMatrix> WH;
  for (int k = 0; k < T; ++k) {
    Fs.push_back(F.slice(k));
    Hs.push_back(H.slice(k));
    WH.push_back(weyl_transform(basis, Hs.back()).matrix);
  }

  MotionFunction out(g);
  std::vector<GridFunction> acc(T, GridFunction(g.cn()));
  for (int a = 0; a < T; ++a) {
    if (Fs[a].values.cwiseAbs().maxCoeff() == 0.0) continue;
    const CVector mu = mu_diagonal(basis, g.theta(a), s);
    for (int b = 0; b < T; ++b) {
      if (WH[b].cwiseAbs().maxCoeff() == 0.0) continue;
      // H_a(w) = H(e^{-ia} w) has Weyl transform mu(a) W(H) mu(a)^H.
      const CMatrix rotated = mu.asDiagonal() * WH[b] * mu.conjugate().asDiagonal();
      const GridFunction Ha = inverse_weyl(basis, rotated, g.cn());
      const GridFunction c = twisted_convolution(lambda, Fs[a], Ha);
      acc[(a + b) % T].values += c.values / static_cast<double>(T);
    }
  }
  for (int k = 0; k < T; ++k) out.set_slice(k, acc[k]);
  return out;
}

MotionTimeSamples::MotionTimeSamples(GridGx g, double half_width, int points)
    : grid(g), t_half_width(half_width), t_points(points) {
  if (!(half_width > 0.0) || points < 2) throw DomainError("MotionTimeSamples: bad t grid");
  values = CVector::Zero(static_cast<Eigen::Index>(g.size() * points));
}

MotionFunction lambda_slice(const MotionTimeSamples& F, double lambda) {
  if (lambda == 0.0 || !std::isfinite(lambda))
    throw DomainError("lambda_slice: lambda must be a nonzero real");
  if (std::abs(lambda) * F.dt() >= std::numbers::pi)
    throw DomainError("lambda_slice: |lambda| beyond the Nyquist limit of the t grid");
  const GridGx& g = F.grid;
  const int T = g.theta_points();
  CVector e(F.t_points);
  for (int j = 0; j < F.t_points; ++j) e(j) = F.dt() * std::polar(1.0, lambda * F.t(j));
  MotionFunction out(g);
  for (std::size_t iz = 0; iz < g.cn().size(); ++iz)
    for (int k = 0; k < T; ++k) {
      cplx acc = 0.0;
      for (int j = 0; j < F.t_points; ++j)
        acc += e(j) * F.values(static_cast<Eigen::Index>((iz * F.t_points + j) * T + k));
      out.values(g.flat(iz, k)) = acc;
    }
  return out;
}

WeylMatrix group_fourier(const HermiteBasis& basis, const CharacterIndex& m,
                         const MotionTimeSamples& F) {
  return motion_weyl(basis, m, lambda_slice(F, basis.lambda()));
}

}  // namespace weylkit
