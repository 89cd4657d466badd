#include "weylkit/uniqueness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "weylkit/errors.hpp"

namespace weylkit {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kStencil = 8;

// Smooth step: 0 for u <= 0, 1 for u >= 1, C^infinity.
double smooth_step(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / u), b = std::exp(-1.0 / (1.0 - u));
  return a / (a + b);
}

// Lagrange weights on the 8 grid nodes around coordinate u; returns the first node.
int lagrange_weights(const GridCn& g, double u, double* w) {
  const int M = g.points_per_axis();
  const double p = (u + g.half_width()) / g.spacing();
  const int j0 = std::clamp(static_cast<int>(std::floor(p)) - kStencil / 2 + 1, 0, M - kStencil);
  for (int a = 0; a < kStencil; ++a) {
    double num = 1.0, den = 1.0;
    for (int b = 0; b < kStencil; ++b) {
      if (b == a) continue;
      num *= p - (j0 + b);
      den *= a - b;
    }
    w[a] = num / den;
  }
  return j0;
}

// Gauss-Legendre nodes/weights on [a, b] by Newton on the Legendre recurrence.
void gauss_legendre(int n, double a, double b, std::vector<double>& x, std::vector<double>& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double step = p1 / dp;
      t -= step;
      if (std::abs(step) < 1e-16) break;
    }
    x[i] = 0.5 * (a + b) + 0.5 * (b - a) * t;
    w[i] = (b - a) / ((1.0 - t * t) * dp * dp);
  }
}

void require_line(const HermiteBasis& basis) {
  if (basis.dim() != 1) throw UnsupportedError("kernel_Ky: only n = 1 is supported");
}

}  // namespace

RankProfile rank_profile(const WeylMatrix& W, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("rank_profile: epsilon must lie in (0, 1)");
  if (!W.matrix.allFinite()) throw ContractError("rank_profile: non-finite entries");
  RankProfile out;
  out.epsilon = epsilon;
  if (W.matrix.size() == 0) return out;
  Eigen::JacobiSVD<CMatrix> svd(W.matrix, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  out.singular_values.assign(s.data(), s.data() + s.size());
  const double top = out.singular_values.empty() ? 0.0 : out.singular_values.front();
  for (double v : out.singular_values)
    if (v > epsilon * top) ++out.numerical_rank;
  const CMatrix back = svd.matrixU().leftCols(s.size()) * s.cast<cplx>().asDiagonal() *
                       svd.matrixV().leftCols(s.size()).adjoint();
  out.reconstruction_residual = (W.matrix - back).norm();
  return out;
}

WignerDecomposition spectral_to_wigner(const WeylMatrix& tau_hat, const HermiteBasis& basis) {
  const CMatrix& A = tau_hat.matrix;
  if (A.rows() != basis.size() || A.cols() != basis.size())
    throw ContractError("spectral_to_wigner: operator size does not match the basis");
  WignerDecomposition out;
  const double scale = A.norm();
  if (scale == 0.0) return out;
  if ((A - A.adjoint()).norm() > 1e-8 * scale)
    throw ContractError("spectral_to_wigner: tau_hat is not Hermitian");
  const CMatrix H = 0.5 * (A + A.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(H);
  const auto& ev = eig.eigenvalues();
  if (ev.minCoeff() < -1e-10 * scale)
    throw ContractError("spectral_to_wigner: tau_hat is not positive semidefinite");

  double prod_lambda = 1.0;
  for (double l : basis.axis_lambdas()) prod_lambda *= std::abs(l);
  const double norm = std::sqrt(prod_lambda * std::pow(2.0 * kPi, -basis.dim()));
  const double top = std::max(ev.maxCoeff(), 0.0);
  CMatrix back = CMatrix::Zero(A.rows(), A.cols());
  // Eigen sorts ascending; walk from the top for nonincreasing weights.
  for (Eigen::Index i = ev.size() - 1; i >= 0; --i) {
    const double a = ev(i);
    if (a <= 1e-14 * top) break;
    const CVector f = eig.eigenvectors().col(i);
    out.weights.push_back(a);
    out.eigenvectors.emplace_back(basis, f);
    out.components.emplace_back(basis, (norm * std::sqrt(a)) * f);
    back += a * f * f.adjoint();
  }
  out.residual = (A - back).norm() / scale;
  return out;
}

GridFunction reconstruct_tau(const HermiteBasis& basis, const WignerDecomposition& dec,
                             const GridCn& grid) {
  GridFunction out(grid);
  for (const auto& h : dec.components) out.values += fourier_wigner(basis, h, h, grid).values;
  return out;
}

MotionFunction reconstruct_tau_motion(const HermiteBasis& basis, const CharacterIndex& m,
                                      const WignerDecomposition& dec, const GridGx& grid) {
  MotionFunction out(grid);
  for (const auto& h : dec.components)
    out.values += fourier_wigner_motion(basis, m, h, h, grid).values;
  return out;
}

CVector kernel_Ky(const HermiteBasis& basis, const std::vector<CoeffVector>& chi,
                  const std::vector<CoeffVector>& phi, const std::vector<cplx>& b, double y,
                  std::span<const double> xi) {
  require_line(basis);
  if (chi.empty() || chi.size() != phi.size() || chi.size() != b.size())
    throw ContractError("kernel_Ky: chi, phi and b must have the same nonzero length");
  for (std::size_t j = 0; j < chi.size(); ++j) {
    if (!chi[j].lives_in(basis) || !phi[j].lives_in(basis))
      throw ContractError("kernel_Ky: coefficient vector from another basis");
    if (b[j] == cplx(0.0)) throw ContractError("kernel_Ky: weights must be nonzero");
  }
  if (!std::isfinite(y)) throw DomainError("kernel_Ky: non-finite shift");
  // Rows of Hermite values at xi + y and xi, contracted with the coefficient matrices.
  const int N = basis.degree_cap();
  const double scale = std::abs(basis.lambda());
  const double root = std::sqrt(scale), amp = std::pow(scale, 0.25);
  const Eigen::Index J = static_cast<Eigen::Index>(chi.size());
  CMatrix C(N, J), P(N, J);
  for (Eigen::Index j = 0; j < J; ++j) {
    C.col(j) = b[j] * chi[j].coeffs;
    P.col(j) = phi[j].coeffs.conjugate();
  }
  const Eigen::Index Q = static_cast<Eigen::Index>(xi.size());
  Eigen::MatrixXd Hs(Q, N), H0(Q, N);
  std::vector<double> row(N);
  for (Eigen::Index q = 0; q < Q; ++q) {
    hermite_functions(root * (xi[q] + y), row);
    for (int k = 0; k < N; ++k) Hs(q, k) = amp * row[k];
    hermite_functions(root * xi[q], row);
    for (int k = 0; k < N; ++k) H0(q, k) = amp * row[k];
  }
  const CMatrix A = Hs.cast<cplx>() * C;
  const CMatrix B = H0.cast<cplx>() * P;
  CVector out = A.cwiseProduct(B).rowwise().sum();
  return out;
}

CVector kernel_Ky(const HermiteBasis& basis, const std::vector<CoeffVector>& chi,
                  const std::vector<CoeffVector>& phi, const std::vector<cplx>& b, double y) {
  require_line(basis);
  const QuadratureRule rule = basis.scaled_rule(0);
  return kernel_Ky(basis, chi, phi, b, y, rule.nodes);
}

KernelSupport kernel_support(const HermiteBasis& basis, const std::vector<CoeffVector>& chi,
                             const std::vector<CoeffVector>& phi, const std::vector<cplx>& b,
                             std::span<const double> ys, std::span<const double> xi, double tol) {
  if (!(tol > 0.0)) throw DomainError("kernel_support: tol must be positive");
  KernelSupport out;
  out.y.assign(ys.begin(), ys.end());
  std::sort(out.y.begin(), out.y.end(),
            [](double a, double c) { return std::abs(a) < std::abs(c); });
  for (double y : out.y) out.max_abs.push_back(kernel_Ky(basis, chi, phi, b, y, xi).cwiseAbs().maxCoeff());
  // Walk inward from the largest |y| while the kernel stays below tol.
  std::size_t i = out.y.size();
  while (i > 0 && out.max_abs[i - 1] <= tol) --i;
  if (i < out.y.size()) out.r_hat = std::abs(out.y[i]);
  return out;
}

namespace {

// |F|^2 at an off-grid point from the tensor Lagrange interpolant of F.
double interpolated_density(const GridFunction& F, double x, double y) {
  const GridCn& g = F.grid;
  const int M = g.points_per_axis();
  double wx[kStencil], wy[kStencil];
  const int jx = lagrange_weights(g, x, wx);
  const int jy = lagrange_weights(g, y, wy);
  cplx v = 0.0;
  for (int u = 0; u < kStencil; ++u) {
    cplx row = 0.0;
    for (int s = 0; s < kStencil; ++s)
      row += wy[s] * F.values(static_cast<Eigen::Index>((jx + u) * M + (jy + s)));
    v += wx[u] * row;
  }
  return std::norm(v);
}

// int_a^b int_0^{2 pi} |F|^2 weight(r) r dtheta dr.
template <class Weight>
double polar_integral(const GridFunction& F, double a, double b, Weight weight) {
  std::vector<double> rn, rw;
  gauss_legendre(64, a, b, rn, rw);
  const int K = std::max(64, 2 * static_cast<int>(std::ceil(2.0 * kPi * b / F.grid.spacing())));
  double total = 0.0;
  for (std::size_t i = 0; i < rn.size(); ++i) {
    const double r = rn[i];
    const double c = weight(r);
    if (c == 0.0) continue;
    double ring = 0.0;
    for (int k = 0; k < K; ++k) {
      const double th = 2.0 * kPi * k / K;
      ring += interpolated_density(F, r * std::cos(th), r * std::sin(th));
    }
    total += rw[i] * r * c * ring * (2.0 * kPi / K);
  }
  return total;
}

}  // namespace

double tail_mass(const GridFunction& F, double radius) {
  const GridCn& g = F.grid;
  if (g.n() != 1) throw UnsupportedError("tail_mass: only n = 1 grids are supported");
  const double L = g.half_width();
  if (!(radius > 0.0 && radius < L)) throw DomainError("tail_mass: radius must lie in (0, L)");
  const double h = g.spacing();

  auto grid_sum = [&](auto weight) {
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double v = std::norm(F.values(static_cast<Eigen::Index>(i)));
      if (v == 0.0) continue;
      const auto p = g.point(i);
      acc += v * weight(std::hypot(p[0], p[1]));
    }
    return acc * g.cell_weight();
  };

  const double delta = std::min({0.5 * radius, 0.25 * L, L - radius - kStencil * h});
  if (delta >= 16.0 * h) {
    // psi = 1 inside R, 0 beyond R + delta:  tail = sum w |F|^2 (1 - psi) + int_{R<r<R+delta} |F|^2 psi.
    auto psi = [&](double r) { return smooth_step((radius + delta - r) / delta); };
    return grid_sum([&](double r) { return 1.0 - psi(r); }) +
           polar_integral(F, radius, radius + delta, psi);
  }
  if (radius <= 0.5 * L) {
    // Small disc: grid total minus the polar integral over the whole disc.
    return grid_sum([](double) { return 1.0; }) -
           polar_integral(F, 0.0, radius, [](double) { return 1.0; });
  }
  // Cutoff unresolved near the box edge: plain sum over grid points beyond R.
  return grid_sum([&](double r) { return r > radius ? 1.0 : 0.0; });
}

PocsResult pocs_explorer(const HermiteBasis& basis, const Eigen::VectorXd& mask,
                         const GridFunction& F0, int rank_cap, int iterations) {
  if (rank_cap < 1) throw DomainError("pocs_explorer: rank_cap must be >= 1");
  if (iterations < 1) throw DomainError("pocs_explorer: iterations must be >= 1");
  if (mask.size() != F0.values.size()) throw ContractError("pocs_explorer: mask size mismatch");
  if (mask.minCoeff() < 0.0 || mask.maxCoeff() > 1.0)
    throw ContractError("pocs_explorer: mask entries must lie in [0, 1]");
  PocsResult out{{}, F0};
  GridFunction& F = out.final_state;
  out.norms.push_back(std::sqrt(F.norm2()));
  for (int it = 0; it < iterations; ++it) {
    F.values = F.values.cwiseProduct(mask.cast<cplx>());
    if (F.values.cwiseAbs().maxCoeff() == 0.0) {
      out.norms.push_back(0.0);
      continue;
    }
    const CMatrix W = weyl_transform(basis, F).matrix;
    Eigen::JacobiSVD<CMatrix> svd(W, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const int r = std::min<int>(rank_cap, static_cast<int>(svd.singularValues().size()));
    const CMatrix Wr = svd.matrixU().leftCols(r) *
                       svd.singularValues().head(r).cast<cplx>().asDiagonal() *
                       svd.matrixV().leftCols(r).adjoint();
    F = inverse_weyl(basis, Wr, F.grid);
    out.norms.push_back(std::sqrt(F.norm2()));
  }
  return out;
}

Eigen::VectorXd disc_mask(const GridCn& grid, double radius) {
  Eigen::VectorXd m(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto p = grid.point(i);
    double r2 = 0.0;
    for (double x : p) r2 += x * x;
    m(static_cast<Eigen::Index>(i)) = r2 <= radius * radius ? 1.0 : 0.0;
  }
  return m;
}

PocsReference pocs_reference(std::uint64_t seed) {
  HermiteBasis basis(1, 1.0, 16);
  GridCn grid(1, 8.0, 64);
  Eigen::VectorXd mask = disc_mask(grid, 2.0);
  std::mt19937_64 rng(seed);
  const GridFunction noise = inverse_weyl(basis, random_band_matrix(basis, 4, rng), grid);
  GridFunction F0 = GridFunction::sample(grid, [](std::span<const double> z) {
    const double dx = z[0] - 0.5, dy = z[1];
    return cplx(std::exp(-(dx * dx + dy * dy) / 4.0));
  });
  const double scale = std::sqrt(F0.norm2() / noise.norm2());
  F0.values = (F0.values + 0.1 * scale * noise.values).cwiseProduct(mask.cast<cplx>());
  return {basis, grid, mask, F0, 1};
}

}  // namespace weylkit
