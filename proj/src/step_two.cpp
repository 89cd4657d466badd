#include "weylkit/step_two.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "weylkit/errors.hpp"

namespace weylkit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_metivier(const SymplecticDecomp& d, const HermiteBasis& basis) {
  if (!d.metivier()) throw UnsupportedError("omega has a nontrivial radical");
  if (basis.dim() != d.pairs()) throw ContractError("basis dimension differs from the number of pairs");
  for (int j = 0; j < d.pairs(); ++j)
    if (std::abs(basis.axis_lambda(j) + d.d[j]) > 1e-12 * d.d[j])
      throw ContractError("basis scales do not match -d_j(omega)");
}

}  // namespace

StepTwoAlgebra::StepTwoAlgebra(int m, int k) : m_(m), k_(k) {
  if (m < 1 || k < 1) throw DomainError("StepTwoAlgebra: dimensions must be positive");
  c_.assign(static_cast<std::size_t>(m) * m * k, 0.0);
}

void StepTwoAlgebra::set(int i, int j, int l, double value) {
  if (i < 0 || i >= m_ || j < 0 || j >= m_ || l < 0 || l >= k_)
    throw IndexError("StepTwoAlgebra: structure constant index out of range");
  if (i == j) {
    if (value != 0.0) throw ContractError("StepTwoAlgebra: c_ii^l must vanish");
    return;
  }
  c_[index(i, j, l)] = value;
  c_[index(j, i, l)] = -value;
}

StepTwoAlgebra StepTwoAlgebra::parse(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  std::optional<StepTwoAlgebra> alg;
  std::vector<std::vector<char>> seen;
  auto fail = [&](const std::string& msg) {
    throw ContractError("structure constants, line " + std::to_string(line_no) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string probe;
    if (!(ls >> probe)) continue;
    ls.clear();
    ls.str(line);
    if (!alg) {
      int m = 0, k = 0;
      if (!(ls >> m >> k) || m < 1 || k < 1) fail("expected header 'm k' with positive integers");
      std::string rest;
      if (ls >> rest) fail("trailing text after header");
      alg.emplace(m, k);
      seen.assign(static_cast<std::size_t>(m) * m, std::vector<char>(k, 0));
      continue;
    }
    int i = 0, j = 0, l = 0;
    double v = 0.0;
    if (!(ls >> i >> j >> l >> v)) fail("expected 'i j l value'");
    std::string rest;
    if (ls >> rest) fail("trailing text");
    if (!std::isfinite(v)) fail("non-finite value");
    --i, --j, --l;
    if (i < 0 || i >= alg->m() || j < 0 || j >= alg->m() || l < 0 || l >= alg->k())
      fail("index out of range");
    if (i == j) {
      if (v != 0.0) fail("diagonal entry must vanish (skewness)");
      continue;
    }
    auto& self = seen[static_cast<std::size_t>(i) * alg->m() + j][l];
    auto& partner = seen[static_cast<std::size_t>(j) * alg->m() + i][l];
    if (self) fail("duplicate entry");
    if (partner) {
      if (alg->c(j, i, l) != -v) fail("entry is not skew with its partner");
    } else {
      alg->set(i, j, l, v);
    }
    self = 1;
  }
  if (!alg) throw ContractError("structure constants: missing header");
  return *alg;
}

StepTwoAlgebra StepTwoAlgebra::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ContractError("cannot open structure constants file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

std::string StepTwoAlgebra::serialize() const {
  std::ostringstream out;
  out << m_ << ' ' << k_ << '\n';
  for (int i = 0; i < m_; ++i)
    for (int j = i + 1; j < m_; ++j)
      for (int l = 0; l < k_; ++l)
        if (c(i, j, l) != 0.0) out << i + 1 << ' ' << j + 1 << ' ' << l + 1 << ' ' << c(i, j, l) << '\n';
  return out.str();
}

Eigen::VectorXd StepTwoAlgebra::bracket(const Eigen::VectorXd& V, const Eigen::VectorXd& W) const {
  if (V.size() != m_ || W.size() != m_) throw ContractError("bracket: dimension mismatch");
  Eigen::VectorXd z = Eigen::VectorXd::Zero(k_);
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < m_; ++j)
      for (int l = 0; l < k_; ++l) z(l) += c(i, j, l) * V(i) * W(j);
  return z;
}

StepTwoAlgebra heisenberg_algebra() {
  StepTwoAlgebra a(2, 1);
  a.set(0, 1, 0, 1.0);
  return a;
}

StepTwoAlgebra quaternionic_h_type_algebra() {
  // Column c of J_l is l * e_c in the basis (1, i, j, k).
  const double J[3][4][4] = {
      {{0, -1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, -1}, {0, 0, 1, 0}},
      {{0, 0, -1, 0}, {0, 0, 0, 1}, {1, 0, 0, 0}, {0, -1, 0, 0}},
      {{0, 0, 0, -1}, {0, 0, -1, 0}, {0, 1, 0, 0}, {1, 0, 0, 0}},
  };
  StepTwoAlgebra a(4, 3);
  for (int l = 0; l < 3; ++l)
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) a.set(i, j, l, J[l][i][j]);
  return a;
}

StepTwoAlgebra radical_algebra() {
  StepTwoAlgebra a(4, 1);
  a.set(0, 1, 0, 1.0);
  return a;
}

const std::vector<FixtureInfo>& shipped_fixtures() {
  static const std::vector<FixtureInfo> list = {
      {"heisenberg", "heisenberg.alg", &heisenberg_algebra},
      {"quaternionic", "quaternionic_h_type.alg", &quaternionic_h_type_algebra},
      {"radical", "radical.alg", &radical_algebra},
  };
  return list;
}

StepTwoElement group_multiply(const StepTwoAlgebra& alg, const StepTwoElement& a,
                              const StepTwoElement& b) {
  if (a.Z.size() != alg.k() || b.Z.size() != alg.k())
    throw ContractError("group_multiply: dimension mismatch");
  return {a.V + b.V, a.Z + b.Z + 0.5 * alg.bracket(a.V, b.V)};
}

StepTwoElement group_inverse(const StepTwoElement& a) { return {-a.V, -a.Z}; }

Eigen::MatrixXd bilinear_form(const StepTwoAlgebra& alg, const Eigen::VectorXd& omega) {
  if (omega.size() != alg.k()) throw ContractError("bilinear_form: omega has wrong dimension");
  for (int l = 0; l < omega.size(); ++l)
    if (!std::isfinite(omega(l))) throw DomainError("bilinear_form: non-finite omega");
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(alg.m(), alg.m());
  for (int i = 0; i < alg.m(); ++i)
    for (int j = 0; j < alg.m(); ++j)
      for (int l = 0; l < alg.k(); ++l) B(i, j) += omega(l) * alg.c(i, j, l);
  return B;
}

double SymplecticDecomp::pairing_residual() const {
  const int n = pairs();
  double r = 0.0;
  const Eigen::MatrixXd XY = X.transpose() * B * Y;
  const Eigen::MatrixXd XX = X.transpose() * B * X;
  const Eigen::MatrixXd YY = Y.transpose() * B * Y;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      r = std::max(r, std::abs(XY(i, j) - (i == j ? d[i] : 0.0)));
      r = std::max(r, std::abs(XX(i, j)));
      r = std::max(r, std::abs(YY(i, j)));
    }
  Eigen::MatrixXd frame(B.rows(), 2 * n + radical_dim);
  frame << X, Y, radical;
  const Eigen::MatrixXd gram = frame.transpose() * frame;
  r = std::max(r, (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff());
  return r;
}

Eigen::VectorXd SymplecticDecomp::to_b(std::span<const double> adapted) const {
  if (static_cast<int>(adapted.size()) != 2 * pairs()) throw ContractError("to_b: wrong dimension");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(B.rows());
  for (int j = 0; j < pairs(); ++j) v += adapted[2 * j] * X.col(j) + adapted[2 * j + 1] * Y.col(j);
  return v;
}

SymplecticDecomp symplectic_decompose(const Eigen::MatrixXd& B, const Eigen::VectorXd& omega) {
  const int m = static_cast<int>(B.rows());
  if (B.cols() != m) throw ContractError("symplectic_decompose: B must be square");
  if ((B + B.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, B.norm()))
    throw ContractError("symplectic_decompose: B is not skew");
  SymplecticDecomp out;
  out.omega = omega;
  out.B = B;
  const double scale = std::max(1.0, B.norm());
  const double zero_tol = 1e-12 * scale;
  const double tie_tol = 1e-12 * scale;

  std::vector<Eigen::VectorXd> xs, ys;
  Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(m, m);  // orthonormal basis of the remainder
  while (Q.cols() >= 2) {
    const Eigen::MatrixXd Bs = Q.transpose() * B * Q;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Bs.transpose() * Bs);
    const Eigen::VectorXd mu = eig.eigenvalues().cwiseMax(0.0);  // ascending
    const int r = static_cast<int>(mu.size());
    const double d = std::sqrt(mu(r - 1));
    if (d < zero_tol) break;
    int cluster = 1;
    while (cluster < r && std::abs(std::sqrt(mu(r - 1 - cluster)) - d) < tie_tol) ++cluster;
    if (cluster > 2) out.tie = true;
    // Cluster eigenspace in original coordinates.
    const Eigen::MatrixXd E = Q * eig.eigenvectors().rightCols(cluster);
    Eigen::VectorXd X;
    for (int i = 0; i < m; ++i) {
      const Eigen::VectorXd p = E * E.row(i).transpose();  // projection of e_i
      if (p.squaredNorm() >= 0.5 * cluster / m) {
        X = p.normalized();
        break;
      }
    }
    if (X.size() == 0) throw ContractError("symplectic_decompose: empty cluster projection");
    for (int i = 0; i < m; ++i) {
      if (std::abs(X(i)) > 1e-12) {
        if (X(i) < 0) X = -X;
        break;
      }
    }
    Eigen::VectorXd Y = B.transpose() * X / d;
    // Re-orthonormalise against earlier planes to keep rounding from accumulating.
    for (std::size_t j = 0; j < xs.size(); ++j) {
      Y -= xs[j].dot(Y) * xs[j] + ys[j].dot(Y) * ys[j];
    }
    Y -= X.dot(Y) * X;
    Y.normalize();
    xs.push_back(X);
    ys.push_back(Y);
    out.d.push_back(X.dot(B * Y));
    // Deflate: remainder = span(Q) minus span(X, Y).
    Eigen::MatrixXd P = Q - X * (X.transpose() * Q) - Y * (Y.transpose() * Q);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(P, Eigen::ComputeThinU);
    Q = svd.matrixU().leftCols(Q.cols() - 2);
  }
  const int n = static_cast<int>(xs.size());
  out.X.resize(m, n);
  out.Y.resize(m, n);
  for (int j = 0; j < n; ++j) {
    out.X.col(j) = xs[j];
    out.Y.col(j) = ys[j];
  }
  out.radical_dim = m - 2 * n;
  out.radical = Q;
  out.p_omega = 1.0;
  for (double v : out.d) out.p_omega *= v;
  return out;
}

SymplecticDecomp symplectic_decompose(const StepTwoAlgebra& alg, const Eigen::VectorXd& omega) {
  return symplectic_decompose(bilinear_form(alg, omega), omega);
}

HermiteBasis omega_basis(const SymplecticDecomp& decomp, int degree_cap, int quad_size) {
  if (!decomp.metivier()) throw UnsupportedError("omega_basis: omega has a nontrivial radical");
  if (decomp.pairs() < 1 || decomp.pairs() > 2)
    throw UnsupportedError("omega_basis: only 1 or 2 symplectic pairs are supported");
  std::vector<double> scales;
  for (double v : decomp.d) scales.push_back(-v);
  return HermiteBasis::anisotropic(scales, degree_cap, quad_size);
}

CoeffVector pi_omega_action(const SymplecticDecomp& decomp, const HermiteBasis& basis,
                            std::span<const double> x, std::span<const double> y,
                            std::span<const double> t, const CoeffVector& phi) {
  require_metivier(decomp, basis);
  const int n = decomp.pairs();
  if (static_cast<int>(x.size()) != n || static_cast<int>(y.size()) != n ||
      static_cast<int>(t.size()) != decomp.omega.size())
    throw ContractError("pi_omega_action: coordinate dimensions do not match omega frame");
  if (!phi.lives_in(basis)) throw ContractError("pi_omega_action: vector belongs to another basis");
  std::vector<double> z(2 * n);
  for (int j = 0; j < n; ++j) {
    z[2 * j] = x[j];
    z[2 * j + 1] = y[j];
  }
  double wt = 0.0;
  for (int l = 0; l < decomp.omega.size(); ++l) wt += decomp.omega(l) * t[l];
  const CMatrix P = schrodinger_matrix(basis, z).matrix;
  return CoeffVector(basis, std::polar(1.0, wt) * (P * phi.coeffs));
}

WeylMatrix weyl_omega(const SymplecticDecomp& decomp, const HermiteBasis& basis,
                      const GridFunction& h) {
  require_metivier(decomp, basis);
  const double tail = boundary_mass_fraction(h);
  if (tail > kTwistedTailLimit)
    throw PreconditionError("weyl_omega: boundary mass " + sci(tail) + " exceeds " + sci(kTwistedTailLimit),
                            tail);
  return weyl_transform(basis, h);
}

GridFunction twisted_convolution_omega(const StepTwoAlgebra& alg, const SymplecticDecomp& decomp,
                                       const GridFunction& f, const GridFunction& g) {
  if (!(f.grid == g.grid)) throw ContractError("twisted_convolution_omega: grids differ");
  if (!decomp.metivier() || f.grid.n() != decomp.pairs())
    throw ContractError("twisted_convolution_omega: grid does not match the omega frame");
  if (decomp.B.rows() != alg.m()) throw ContractError("twisted_convolution_omega: algebra mismatch");
  for (const GridFunction* G : {&f, &g}) {
    const double tail = boundary_mass_fraction(*G);
    if (tail > kTwistedTailLimit)
      throw PreconditionError("twisted_convolution_omega: boundary mass " + sci(tail) +
                                  " exceeds " + sci(kTwistedTailLimit),
                              tail);
  }
  const GridCn& grid = f.grid;
  const int D = grid.axes();
  const int M = grid.points_per_axis();
  const int half = M / 2;
  // Original b-coordinates of every grid point, and omega([., .]) from the constants.
  const Eigen::MatrixXd Bw = bilinear_form(alg, decomp.omega);
  Eigen::MatrixXd V(alg.m(), static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) V.col(i) = decomp.to_b(grid.point(i));
  const Eigen::MatrixXd BV = Bw * V;

  GridFunction out(grid);
  std::vector<int> shift(D);
  for (std::size_t iv = 0; iv < grid.size(); ++iv) {
    const auto vi = grid.indices(iv);
    cplx acc = 0.0;
    for (std::size_t iw = 0; iw < grid.size(); ++iw) {
      const cplx gw = g.values(static_cast<Eigen::Index>(iw));
      if (gw == cplx(0.0)) continue;
      const auto wi = grid.indices(iw);
      bool inside = true;
      for (int a = 0; a < D; ++a) {
        shift[a] = vi[a] - wi[a] + half;
        inside = inside && shift[a] >= 0 && shift[a] < M;
      }
      if (!inside) continue;
      const double phase = 0.5 * V.col(iv).dot(BV.col(iw));
      acc += f.values(static_cast<Eigen::Index>(grid.flat(shift))) * gw * std::polar(1.0, phase);
    }
    out.values(static_cast<Eigen::Index>(iv)) = grid.cell_weight() * acc;
  }
  return out;
}

cplx inversion(const SymplecticDecomp& decomp, const HermiteBasis& basis, const WeylMatrix& Fhat,
               std::span<const double> v) {
  require_metivier(decomp, basis);
  if (Fhat.matrix.rows() != basis.size()) throw ContractError("inversion: operator size mismatch");
  const CMatrix P = schrodinger_matrix(basis, v).matrix;
  const cplx tr = (P.adjoint() * Fhat.matrix).trace();
  return decomp.p_omega * std::pow(kTwoPi, -decomp.pairs()) * tr;
}

GridFunction inversion_on_grid(const SymplecticDecomp& decomp, const HermiteBasis& basis,
                               const WeylMatrix& Fhat, const GridCn& grid) {
  require_metivier(decomp, basis);
  return inverse_weyl(basis, Fhat.matrix, grid);
}

double inversion_tail(const HermiteBasis& basis, const WeylMatrix& Fhat) {
  const double total = Fhat.matrix.squaredNorm();
  if (total == 0.0) return 0.0;
  const int N = basis.degree_cap();
  std::vector<char> edge(basis.size());
  for (int i = 0; i < basis.size(); ++i) {
    const auto a = basis.multi_index(i);
    edge[i] = 0;
    for (int c : a) edge[i] = edge[i] || c == N - 1;
  }
  double tail = 0.0;
  for (int i = 0; i < basis.size(); ++i)
    for (int j = 0; j < basis.size(); ++j)
      if (edge[i] || edge[j]) tail += std::norm(Fhat.matrix(i, j));
  return tail / total;
}

}  // namespace weylkit
