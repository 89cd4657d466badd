#include "weylkit/heisenberg.hpp"

#include <cmath>
#include <numbers>

#include "weylkit/errors.hpp"
#include "weylkit/linalg.hpp"

namespace weylkit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_point(std::span<const double> z, int n) {
  if (static_cast<int>(z.size()) != 2 * n) throw ContractError("point has wrong dimension");
  for (double c : z)
    if (!std::isfinite(c)) throw DomainError("non-finite point");
}

void check_grid(const HermiteBasis& basis, const GridCn& grid) {
  if (grid.n() != basis.dim()) throw ContractError("grid and basis dimensions differ");
}

std::vector<double> axis_coords(const GridCn& g) {
  std::vector<double> xs(g.points_per_axis());
  for (int j = 0; j < g.points_per_axis(); ++j) xs[j] = g.axis_coord(j);
  return xs;
}

AxisKernel grid_kernel(const HermiteBasis& basis, int axis, const GridCn& g) {
  return AxisKernel(basis, axis, kernel_quad_size(basis, axis, g.half_width()));
}

// Shift tables for every grid ordinate of one axis, plus the phase table over abscissae.
struct AxisTables {
  std::vector<Eigen::MatrixXd> plus, minus;
  CMatrix phase;  // M x Q

  AxisTables(const AxisKernel& k, const GridCn& g) {
    const auto xs = axis_coords(g);
    plus.resize(xs.size());
    minus.resize(xs.size());
    for (std::size_t j = 0; j < xs.size(); ++j) k.shift_tables(xs[j], plus[j], minus[j]);
    phase = k.phase_table(xs);
  }
};

// Column block (over x, fixed y index) of z -> sum K(b,a) P(z)(b,a) on one axis pair.
void coefficient_1d(const AxisTables& t, const CMatrix& K, cplx* out, int M) {
  // out[ix * M + iy]
  for (int iy = 0; iy < M; ++iy) {
    const Eigen::MatrixXd& A = t.plus[iy];
    const Eigen::MatrixXd& B = t.minus[iy];
    const CMatrix BK = B * K;
    const CVector r = BK.cwiseProduct(A.cast<cplx>()).rowwise().sum();
    const CVector col = t.phase * r;
    for (int ix = 0; ix < M; ++ix) out[static_cast<std::size_t>(ix) * M + iy] = col(ix);
  }
}

// sum_z w F(z) P(z) over one axis pair; F laid out as f[ix * M + iy].
CMatrix weyl_1d(const AxisTables& t, const cplx* f, int M, double cell, int N) {
  CMatrix W = CMatrix::Zero(N, N);
  CVector col(M);
  for (int iy = 0; iy < M; ++iy) {
    bool any = false;
    for (int ix = 0; ix < M; ++ix) {
      col(ix) = cell * f[static_cast<std::size_t>(ix) * M + iy];
      any = any || col(ix) != cplx(0.0);
    }
    if (!any) continue;
    const CVector G = t.phase.transpose() * col;  // length Q
    const CMatrix GA = G.asDiagonal() * t.plus[iy].cast<cplx>();
    W.noalias() += t.minus[iy].transpose().cast<cplx>() * GA;
  }
  return W;
}

}  // namespace

WeylMatrix WeylMatrix::adjoint() const {
  WeylMatrix out = *this;
  out.matrix = matrix.adjoint();
  return out;
}

WeylMatrix WeylMatrix::operator*(const WeylMatrix& rhs) const {
  if (lambda != rhs.lambda || sigma_index != rhs.sigma_index)
    throw ContractError("WeylMatrix product: representations differ");
  WeylMatrix out = *this;
  out.matrix = matrix * rhs.matrix;
  out.truncation_residual = std::max(truncation_residual, rhs.truncation_residual);
  return out;
}

AxisKernel::AxisKernel(const HermiteBasis& basis, int axis, int quad_size)
    : N_(basis.degree_cap()),
      lambda_(basis.axis_lambda(axis)),
      root_(std::sqrt(std::abs(basis.axis_lambda(axis)))) {
  const QuadratureRule& r = quad_size > 0 ? cached_quadrature(quad_size) : basis.rule();
  t_ = r.nodes;
  w_ = r.weights;
}

int kernel_quad_size(const HermiteBasis& basis, int axis, double max_abs_x) {
  const double s = std::sqrt(std::abs(basis.axis_lambda(axis))) * std::abs(max_abs_x);
  const int need = static_cast<int>(std::ceil(0.5 * s * s)) + 2 * basis.degree_cap() + 24;
  return std::max(basis.quad_size(), need);
}

void AxisKernel::shift_tables(double y, Eigen::MatrixXd& plus, Eigen::MatrixXd& minus) const {
  const int Q = quad_size();
  const double a = 0.5 * root_ * y;
  plus.resize(Q, N_);
  minus.resize(Q, N_);
  std::vector<double> buf(N_);
  for (int q = 0; q < Q; ++q) {
    hermite_functions(t_[q] + a, buf);
    for (int k = 0; k < N_; ++k) plus(q, k) = buf[k];
    hermite_functions(t_[q] - a, buf);
    for (int k = 0; k < N_; ++k) minus(q, k) = buf[k];
  }
}

CVector AxisKernel::phases(double x) const {
  const int Q = quad_size();
  const double s = (lambda_ > 0 ? 1.0 : -1.0) * root_ * x;
  CVector p(Q);
  for (int q = 0; q < Q; ++q) p(q) = w_[q] * std::polar(1.0, s * t_[q]);
  return p;
}

CMatrix AxisKernel::phase_table(std::span<const double> xs) const {
  CMatrix T(static_cast<Eigen::Index>(xs.size()), quad_size());
  for (std::size_t i = 0; i < xs.size(); ++i) T.row(i) = phases(xs[i]).transpose();
  return T;
}

CMatrix AxisKernel::matrix(double x, double y) const {
  Eigen::MatrixXd A, B;
  shift_tables(y, A, B);
  const CVector p = phases(x);
  return B.transpose().cast<cplx>() * (p.asDiagonal() * A.cast<cplx>());
}

WeylMatrix schrodinger_matrix(const HermiteBasis& basis, std::span<const double> z) {
  check_point(z, basis.dim());
  WeylMatrix out;
  out.lambda = basis.axis_lambdas();
  auto axis_matrix = [&](int j) {
    return AxisKernel(basis, j, kernel_quad_size(basis, j, z[2 * j])).matrix(z[2 * j], z[2 * j + 1]);
  };
  out.matrix = axis_matrix(0);
  for (int j = 1; j < basis.dim(); ++j) out.matrix = kron(out.matrix, axis_matrix(j));
  const CMatrix defect =
      out.matrix.adjoint() * out.matrix - CMatrix::Identity(basis.size(), basis.size());
  out.truncation_residual = defect.cwiseAbs().maxCoeff();
  return out;
}

cplx special_hermite(const HermiteBasis& basis, const MultiIndex& alpha, const MultiIndex& beta,
                     std::span<const double> z) {
  basis.check_admissible(alpha);
  basis.check_admissible(beta);
  check_point(z, basis.dim());
  cplx v = 1.0;
  for (int j = 0; j < basis.dim(); ++j) {
    const AxisKernel k(basis, j, kernel_quad_size(basis, j, z[2 * j]));
    const CMatrix P = k.matrix(z[2 * j], z[2 * j + 1]);
    v *= P(beta[j], alpha[j]);
  }
  return v * std::pow(kTwoPi, -0.5 * basis.dim());
}

GridFunction matrix_coefficient(const HermiteBasis& basis, const CMatrix& K, const GridCn& grid) {
  check_grid(basis, grid);
  if (K.rows() != basis.size() || K.cols() != basis.size())
    throw ContractError("matrix_coefficient: operator size does not match basis");
  const int M = grid.points_per_axis();
  const int N = basis.degree_cap();
  GridFunction out(grid);
  if (basis.dim() == 1) {
    const AxisTables t(grid_kernel(basis, 0, grid), grid);
    coefficient_1d(t, K, out.values.data(), M);
    return out;
  }
  const AxisKernel k0 = grid_kernel(basis, 0, grid), k1 = grid_kernel(basis, 1, grid);
  const AxisTables t1(k1, grid);
  const auto xs = axis_coords(grid);
  const std::size_t block = static_cast<std::size_t>(M) * M;
  CMatrix K1(N, N);
  for (int ix = 0; ix < M; ++ix) {
    for (int iy = 0; iy < M; ++iy) {
      const CMatrix P1 = k0.matrix(xs[ix], xs[iy]);
      K1.setZero();
      for (int b1 = 0; b1 < N; ++b1)
        for (int a1 = 0; a1 < N; ++a1) {
          const cplx p = P1(b1, a1);
          if (p == cplx(0.0)) continue;
          K1 += p * K.block(b1 * N, a1 * N, N, N);
        }
      coefficient_1d(t1, K1, out.values.data() + (static_cast<std::size_t>(ix) * M + iy) * block,
                     M);
    }
  }
  return out;
}

GridFunction fourier_wigner(const HermiteBasis& basis, const CoeffVector& phi,
                            const CoeffVector& psi, const GridCn& grid) {
  if (!phi.lives_in(basis) || !psi.lives_in(basis))
    throw ContractError("fourier_wigner: coefficient vectors belong to another basis");
  const CMatrix K = psi.coeffs.conjugate() * phi.coeffs.transpose();
  return matrix_coefficient(basis, K, grid);
}

WeylMatrix weyl_transform(const HermiteBasis& basis, const GridFunction& F) {
  check_grid(basis, F.grid);
  const GridCn& g = F.grid;
  const int M = g.points_per_axis();
  const int N = basis.degree_cap();
  WeylMatrix out;
  out.lambda = basis.axis_lambdas();
  if (basis.dim() == 1) {
    const AxisTables t(grid_kernel(basis, 0, g), g);
    out.matrix = weyl_1d(t, F.values.data(), M, g.cell_weight(), N);
    return out;
  }
  const AxisKernel k0 = grid_kernel(basis, 0, g), k1 = grid_kernel(basis, 1, g);
  const AxisTables t1(k1, g);
  const auto xs = axis_coords(g);
  const std::size_t block = static_cast<std::size_t>(M) * M;
  out.matrix = CMatrix::Zero(basis.size(), basis.size());
  for (int ix = 0; ix < M; ++ix) {
    for (int iy = 0; iy < M; ++iy) {
      const cplx* f = F.values.data() + (static_cast<std::size_t>(ix) * M + iy) * block;
      const CMatrix W2 = weyl_1d(t1, f, M, g.cell_weight(), N);
      if (W2.cwiseAbs().maxCoeff() == 0.0) continue;
      out.matrix += kron(k0.matrix(xs[ix], xs[iy]), W2);
    }
  }
  return out;
}

double plancherel_constant(const HermiteBasis& basis) {
  double c = 1.0;
  for (double l : basis.axis_lambdas()) c *= kTwoPi / std::abs(l);
  return c;
}

GridFunction inverse_weyl(const HermiteBasis& basis, const CMatrix& W, const GridCn& grid) {
  GridFunction g = matrix_coefficient(basis, W.conjugate(), grid);
  g.values = g.values.conjugate() / plancherel_constant(basis);
  return g;
}

double boundary_mass_fraction(const GridFunction& F) {
  const GridCn& g = F.grid;
  const double edge = 0.75 * g.half_width();
  const int M = g.points_per_axis();
  std::vector<char> outer(M);
  for (int j = 0; j < M; ++j) outer[j] = std::abs(g.axis_coord(j)) > edge;
  double total = 0.0, tail = 0.0;
  std::vector<int> idx(g.axes(), 0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double m = std::norm(F.values(static_cast<Eigen::Index>(i)));
    total += m;
    bool out = false;
    for (int a = 0; a < g.axes(); ++a) out = out || outer[idx[a]];
    if (out) tail += m;
    for (int a = g.axes() - 1; a >= 0; --a) {
      if (++idx[a] < M) break;
      idx[a] = 0;
    }
  }
  return total > 0.0 ? tail / total : 0.0;
}

namespace {

void check_twisted_inputs(std::span<const double> lambda, const GridFunction& F,
                          const GridFunction& H) {
  if (!(F.grid == H.grid)) throw ContractError("twisted_convolution: grids differ");
  if (static_cast<int>(lambda.size()) != F.grid.n())
    throw ContractError("twisted_convolution: need one lambda per coordinate pair");
  for (double l : lambda)
    if (!std::isfinite(l)) throw DomainError("twisted_convolution: non-finite lambda");
  for (const GridFunction* G : {&F, &H}) {
    const double tail = boundary_mass_fraction(*G);
    if (tail > kTwistedTailLimit)
      throw PreconditionError("twisted_convolution: boundary mass " + sci(tail) +
                                  " exceeds " + sci(kTwistedTailLimit),
                              tail);
  }
}

}  // namespace

GridFunction twisted_convolution(std::span<const double> lambda, const GridFunction& F,
                                 const GridFunction& H) {
  check_twisted_inputs(lambda, F, H);
  const GridCn& g = F.grid;
  const int M = g.points_per_axis();
  const int half = M / 2;
  const int D = g.axes();
  const auto xs = axis_coords(g);

  // tab[a](k_w, k_z): factor for output axis a, driven by the partner axis a^1 of w.
  //   x-axis: exp(-(i/2) l v x), y-axis: exp(+(i/2) l u y).
  std::vector<CMatrix> tab(D, CMatrix(M, M));
  for (int a = 0; a < D; ++a) {
    const double l = lambda[a / 2];
    const double sgn = (a % 2 == 0) ? -1.0 : 1.0;
    for (int kw = 0; kw < M; ++kw)
      for (int kz = 0; kz < M; ++kz) tab[a](kw, kz) = std::polar(1.0, sgn * 0.5 * l * xs[kw] * xs[kz]);
  }

  GridFunction out(g);
  const double cell = g.cell_weight();
  // F(z - w) on axis index: kz - kw + half.
  auto lo = [&](int kw) { return std::max(0, kw - half); };
  auto hi = [&](int kw) { return std::min(M, M + kw - half); };

  if (D == 2) {
    for (int iu = 0; iu < M; ++iu) {
      for (int iv = 0; iv < M; ++iv) {
        const cplx hv = cell * H.values(static_cast<Eigen::Index>(iu) * M + iv);
        if (hv == cplx(0.0)) continue;
        const cplx* ey = &tab[1](iu, 0);  // column-major: stride M
        for (int ix = lo(iu); ix < hi(iu); ++ix) {
          const cplx c = hv * tab[0](iv, ix);
          const cplx* frow = F.values.data() + static_cast<std::size_t>(ix - iu + half) * M;
          cplx* orow = out.values.data() + static_cast<std::size_t>(ix) * M;
          for (int iy = lo(iv); iy < hi(iv); ++iy)
            orow[iy] += c * ey[static_cast<std::size_t>(iy) * M] * frow[iy - iv + half];
        }
      }
    }
    return out;
  }

  // General dimension: odometer over w, nested loop over valid z.
  std::vector<int> w(D, 0), z(D), shift(D);
  for (std::size_t iw = 0; iw < g.size(); ++iw) {
    const cplx hv = cell * H.values(static_cast<Eigen::Index>(iw));
    if (hv != cplx(0.0)) {
      bool empty = false;
      for (int a = 0; a < D; ++a) {
        z[a] = lo(w[a]);
        empty = empty || z[a] >= hi(w[a]);
      }
      while (!empty) {
        cplx ph = hv;
        std::size_t fz = 0, fs = 0;
        for (int a = 0; a < D; ++a) {
          ph *= tab[a](w[a ^ 1], z[a]);
          fz = fz * M + z[a];
          fs = fs * M + (z[a] - w[a] + half);
        }
        out.values(static_cast<Eigen::Index>(fz)) += ph * F.values(static_cast<Eigen::Index>(fs));
        int a = D - 1;
        for (; a >= 0; --a) {
          if (++z[a] < hi(w[a])) break;
          z[a] = lo(w[a]);
        }
        if (a < 0) break;
      }
    }
    for (int a = D - 1; a >= 0; --a) {
      if (++w[a] < M) break;
      w[a] = 0;
    }
  }
  return out;
}

GridFunction twisted_convolution(double lambda, const GridFunction& F, const GridFunction& H) {
  const std::vector<double> l(F.grid.n(), lambda);
  return twisted_convolution(l, F, H);
}

GridFunction twisted_convolution_direct(std::span<const double> lambda, const GridFunction& F,
                                        const GridFunction& H) {
  check_twisted_inputs(lambda, F, H);
  const GridCn& g = F.grid;
  const int D = g.axes();
  const int M = g.points_per_axis();
  const int half = M / 2;
  GridFunction out(g);
  std::vector<int> shift(D);
  for (std::size_t iz = 0; iz < g.size(); ++iz) {
    const auto zi = g.indices(iz);
    const auto zp = g.point(iz);
    cplx acc = 0.0;
    for (std::size_t iw = 0; iw < g.size(); ++iw) {
      const auto wi = g.indices(iw);
      bool inside = true;
      for (int a = 0; a < D; ++a) {
        shift[a] = zi[a] - wi[a] + half;
        inside = inside && shift[a] >= 0 && shift[a] < M;
      }
      if (!inside) continue;
      const auto wp = g.point(iw);
      // Im(w . conj z) = sum_j (v_j x_j - u_j y_j)
      double phase = 0.0;
      for (int j = 0; j < g.n(); ++j)
        phase += lambda[j] * (wp[2 * j + 1] * zp[2 * j] - wp[2 * j] * zp[2 * j + 1]);
      acc += F.values(static_cast<Eigen::Index>(g.flat(shift))) *
             H.values(static_cast<Eigen::Index>(iw)) * std::polar(1.0, -0.5 * phase);
    }
    out.values(static_cast<Eigen::Index>(iz)) = g.cell_weight() * acc;
  }
  return out;
}

CMatrix random_band_matrix(const HermiteBasis& basis, int band, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  CMatrix K = CMatrix::Zero(basis.size(), basis.size());
  for (int b = 0; b < basis.size(); ++b) {
    if (basis.total_degree(b) > band) continue;
    for (int a = 0; a < basis.size(); ++a) {
      if (basis.total_degree(a) > band) continue;
      const double re = gauss(rng);
      const double im = gauss(rng);
      K(b, a) = cplx(re, im);
    }
  }
  return K;
}

CoeffVector random_coeffs(const HermiteBasis& basis, int band, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  CVector c = CVector::Zero(basis.size());
  for (int a = 0; a < basis.size(); ++a) {
    if (basis.total_degree(a) > band) continue;
    const double re = gauss(rng);
    const double im = gauss(rng);
    c(a) = cplx(re, im);
  }
  return CoeffVector(basis, c);
}

}  // namespace weylkit
