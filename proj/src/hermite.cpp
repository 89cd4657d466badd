#include "weylkit/hermite.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "weylkit/errors.hpp"

namespace weylkit {

namespace {

const double kPiQuarter = std::pow(std::numbers::pi, -0.25);

// phi_{count-1}(x) and phi_{count-2}(x) without storing the full sequence.
std::pair<double, double> hermite_top_pair(int count, double x) {
  double prev = 0.0;
  double cur = kPiQuarter * std::exp(-0.5 * x * x);
  for (int k = 0; k + 1 < count; ++k) {
    const double next =
        std::sqrt(2.0 / (k + 1)) * x * cur - std::sqrt(static_cast<double>(k) / (k + 1)) * prev;
    prev = cur;
    cur = next;
  }
  return {cur, prev};
}

}  // namespace

void hermite_functions(double x, std::span<double> out) {
  if (!std::isfinite(x)) throw DomainError("hermite_functions: non-finite x");
  if (out.empty()) return;
  out[0] = kPiQuarter * std::exp(-0.5 * x * x);
  if (out.size() == 1) return;
  out[1] = std::sqrt(2.0) * x * out[0];
  for (std::size_t k = 1; k + 1 < out.size(); ++k) {
    const double kk = static_cast<double>(k);
    out[k + 1] = std::sqrt(2.0 / (kk + 1)) * x * out[k] - std::sqrt(kk / (kk + 1)) * out[k - 1];
  }
}

double hermite_function(int k, double x) {
  if (k < 0) throw IndexError("hermite_function: negative degree");
  if (!std::isfinite(x)) throw DomainError("hermite_function: non-finite x");
  return hermite_top_pair(k + 1, x).first;
}

QuadratureRule build_quadrature(int size) {
  if (size < 1) throw DomainError("build_quadrature: size must be >= 1");
  QuadratureRule rule;
  rule.nodes.resize(size);
  rule.weights.resize(size);
  if (size == 1) {
    rule.nodes[0] = 0.0;
    rule.weights[0] = std::sqrt(std::numbers::pi);
    return rule;
  }

  // Golub-Welsch for the initial nodes.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(size, size);
  for (int k = 1; k < size; ++k) {
    jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(0.5 * k);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi, Eigen::EigenvaluesOnly);
  Eigen::VectorXd x = eig.eigenvalues();

  // Newton polish on phi_size(x) = 0; phi'_n = sqrt(2n) phi_{n-1} - x phi_n.
  for (int i = 0; i < size; ++i) {
    double xi = x(i);
    for (int it = 0; it < 8; ++it) {
      auto [pn, pnm1] = hermite_top_pair(size + 1, xi);
      const double deriv = std::sqrt(2.0 * size) * pnm1 - xi * pn;
      if (deriv == 0.0) break;
      const double step = pn / deriv;
      xi -= step;
      if (std::abs(step) < 1e-16 * std::max(1.0, std::abs(xi))) break;
    }
    x(i) = xi;
  }
  std::sort(x.data(), x.data() + size);
  for (int i = 0; i < size / 2; ++i) {
    const double s = 0.5 * (x(size - 1 - i) - x(i));
    x(i) = -s;
    x(size - 1 - i) = s;
  }
  if (size % 2 == 1) x(size / 2) = 0.0;

  // Christoffel numbers in dx form: w_i = 1 / sum_k phi_k(x_i)^2.
  std::vector<double> phi(size);
  for (int i = 0; i < size; ++i) {
    hermite_functions(x(i), phi);
    double s = 0.0;
    for (int k = size - 1; k >= 0; --k) s += phi[k] * phi[k];
    rule.nodes[i] = x(i);
    rule.weights[i] = 1.0 / s;
  }
  return rule;
}

const QuadratureRule& cached_quadrature(int size) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<QuadratureRule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[size];
  if (!slot) slot = std::make_unique<QuadratureRule>(build_quadrature(size));
  return *slot;
}

HermiteBasis::HermiteBasis(int n, double lambda, int degree_cap, int quad_size)
    : HermiteBasis(std::vector<double>(n < 1 ? 0 : n, lambda), degree_cap, quad_size) {
  if (n != 1 && n != 2) throw UnsupportedError("HermiteBasis: n must be 1 or 2");
}

HermiteBasis HermiteBasis::anisotropic(std::vector<double> axis_lambda, int degree_cap,
                                       int quad_size) {
  if (axis_lambda.size() != 1 && axis_lambda.size() != 2)
    throw UnsupportedError("HermiteBasis: n must be 1 or 2");
  return HermiteBasis(std::move(axis_lambda), degree_cap, quad_size);
}

HermiteBasis::HermiteBasis(std::vector<double> axis_lambda, int degree_cap, int quad_size)
    : axis_lambda_(std::move(axis_lambda)), degree_cap_(degree_cap) {
  for (double l : axis_lambda_) {
    if (!std::isfinite(l) || l == 0.0)
      throw DomainError("HermiteBasis: lambda must be finite and nonzero");
  }
  if (degree_cap_ < 1) throw DomainError("HermiteBasis: degree_cap must be >= 1");
  if (quad_size == 0) quad_size = 2 * degree_cap_ + 8;
  if (quad_size < 2 * degree_cap_ + 8)
    throw DomainError("HermiteBasis: quad_size must be >= 2 * degree_cap + 8");
  size_ = 1;
  for (std::size_t j = 0; j < axis_lambda_.size(); ++j) size_ *= degree_cap_;
  rule_ = cached_quadrature(quad_size);
}

double HermiteBasis::lambda() const {
  if (!isotropic()) throw ContractError("HermiteBasis::lambda: basis is anisotropic");
  return axis_lambda_[0];
}

bool HermiteBasis::isotropic() const {
  return std::all_of(axis_lambda_.begin(), axis_lambda_.end(),
                     [&](double l) { return l == axis_lambda_[0]; });
}

QuadratureRule HermiteBasis::scaled_rule(int axis) const {
  const double s = std::sqrt(std::abs(axis_lambda(axis)));
  QuadratureRule r = rule_;
  for (auto& x : r.nodes) x /= s;
  for (auto& w : r.weights) w /= s;
  return r;
}

void HermiteBasis::check_admissible(const MultiIndex& alpha) const {
  if (static_cast<int>(alpha.size()) != dim())
    throw IndexError("multi-index has " + std::to_string(alpha.size()) +
                     " components, basis dimension is " + std::to_string(dim()));
  for (int a : alpha) {
    if (a < 0 || a >= degree_cap_)
      throw IndexError("multi-index component " + std::to_string(a) + " outside [0, " +
                       std::to_string(degree_cap_) + ")");
  }
}

int HermiteBasis::flat_index(const MultiIndex& alpha) const {
  check_admissible(alpha);
  int idx = 0;
  for (int a : alpha) idx = idx * degree_cap_ + a;
  return idx;
}

MultiIndex HermiteBasis::multi_index(int flat) const {
  if (flat < 0 || flat >= size_) throw IndexError("flat index outside basis");
  MultiIndex alpha(dim());
  for (int j = dim() - 1; j >= 0; --j) {
    alpha[j] = flat % degree_cap_;
    flat /= degree_cap_;
  }
  return alpha;
}

int HermiteBasis::total_degree(int flat) const {
  int s = 0;
  for (int a : multi_index(flat)) s += a;
  return s;
}

bool HermiteBasis::compatible(const HermiteBasis& other) const {
  return axis_lambda_ == other.axis_lambda_ && degree_cap_ == other.degree_cap_;
}

CoeffVector::CoeffVector(const HermiteBasis& b, CVector c) : coeffs(std::move(c)), basis(b) {
  if (coeffs.size() != b.size()) throw ContractError("CoeffVector: length does not match basis");
}

CoeffVector CoeffVector::zero(const HermiteBasis& b) {
  return CoeffVector(b, CVector::Zero(b.size()));
}

CoeffVector CoeffVector::unit(const HermiteBasis& b, const MultiIndex& alpha) {
  CoeffVector v = zero(b);
  v.coeffs(b.flat_index(alpha)) = 1.0;
  return v;
}

bool CoeffVector::lives_in(const HermiteBasis& b) const {
  return basis == BasisKey(b) && coeffs.size() == b.size();
}

cplx CoeffVector::inner(const CoeffVector& other) const {
  if (!(basis == other.basis)) throw ContractError("CoeffVector::inner: basis mismatch");
  // Eigen's dot conjugates its first argument.
  return other.coeffs.dot(coeffs);
}

double hermite_eval(const HermiteBasis& basis, const MultiIndex& alpha,
                    std::span<const double> x) {
  basis.check_admissible(alpha);
  if (static_cast<int>(x.size()) != basis.dim())
    throw ContractError("hermite_eval: point dimension mismatch");
  double v = 1.0;
  for (int j = 0; j < basis.dim(); ++j) {
    if (!std::isfinite(x[j])) throw DomainError("hermite_eval: non-finite x");
    const double s = std::abs(basis.axis_lambda(j));
    v *= std::pow(s, 0.25) * hermite_function(alpha[j], std::sqrt(s) * x[j]);
  }
  return v;
}

cplx coeff_eval(const HermiteBasis& basis, const CoeffVector& f, std::span<const double> x) {
  if (!f.lives_in(basis)) throw ContractError("coeff_eval: basis mismatch");
  if (static_cast<int>(x.size()) != basis.dim())
    throw ContractError("coeff_eval: point dimension mismatch");
  const int N = basis.degree_cap();
  std::vector<std::vector<double>> axis(basis.dim(), std::vector<double>(N));
  for (int j = 0; j < basis.dim(); ++j) {
    const double s = std::abs(basis.axis_lambda(j));
    hermite_functions(std::sqrt(s) * x[j], axis[j]);
    for (auto& v : axis[j]) v *= std::pow(s, 0.25);
  }
  cplx acc = 0.0;
  for (int i = 0; i < basis.size(); ++i) {
    const MultiIndex a = basis.multi_index(i);
    double p = 1.0;
    for (int j = 0; j < basis.dim(); ++j) p *= axis[j][a[j]];
    acc += f.coeffs(i) * p;
  }
  return acc;
}

Eigen::MatrixXd quadrature_gram(const HermiteBasis& basis) {
  const int N = basis.degree_cap();
  const int n = basis.dim();
  // Per-axis Gram, then Kronecker product (the quadrature is a tensor rule).
  std::vector<Eigen::MatrixXd> axis_gram;
  for (int j = 0; j < n; ++j) {
    const QuadratureRule r = basis.scaled_rule(j);
    const double s = std::abs(basis.axis_lambda(j));
    Eigen::MatrixXd vals(r.nodes.size(), N);
    std::vector<double> phi(N);
    for (std::size_t q = 0; q < r.nodes.size(); ++q) {
      hermite_functions(std::sqrt(s) * r.nodes[q], phi);
      for (int k = 0; k < N; ++k) vals(q, k) = std::pow(s, 0.25) * phi[k];
    }
    Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(r.weights.data(), r.weights.size());
    axis_gram.push_back(vals.transpose() * w.asDiagonal() * vals);
  }
  if (n == 1) return axis_gram[0];
  Eigen::MatrixXd g(basis.size(), basis.size());
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b) g.block(a * N, b * N, N, N) = axis_gram[0](a, b) * axis_gram[1];
  return g;
}

namespace {

// -d^2/dx^2 + lambda^2 x^2 on one axis, from x = (a + a^+) / sqrt(2|l|) and
// d/dx = sqrt(|l|/2) (a - a^+) multiplied as truncated matrices.
Eigen::MatrixXd axis_operator(int N, double lambda) {
  const double s = std::abs(lambda);
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(N, N);
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(N, N);
  for (int k = 0; k + 1 < N; ++k) {
    const double r = std::sqrt(k + 1.0);
    X(k, k + 1) = X(k + 1, k) = r / std::sqrt(2.0 * s);
    D(k, k + 1) = r * std::sqrt(0.5 * s);   // a lowers: <k|a|k+1>
    D(k + 1, k) = -r * std::sqrt(0.5 * s);  // a^+ raises
  }
  return -D * D + lambda * lambda * X * X;
}

}  // namespace

Eigen::MatrixXd hermite_operator_matrix(const HermiteBasis& basis) {
  const int N = basis.degree_cap();
  if (basis.dim() == 1) return axis_operator(N, basis.axis_lambda(0));
  const Eigen::MatrixXd h0 = axis_operator(N, basis.axis_lambda(0));
  const Eigen::MatrixXd h1 = axis_operator(N, basis.axis_lambda(1));
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(basis.size(), basis.size());
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(N, N);
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b)
      h.block(a * N, b * N, N, N) = h0(a, b) * id + (a == b ? 1.0 : 0.0) * h1;
  return h;
}

double hermite_operator_check(const HermiteBasis& basis, const MultiIndex& alpha) {
  basis.check_admissible(alpha);
  for (int a : alpha) {
    if (a + 1 >= basis.degree_cap())
      throw TruncationError("hermite_operator_check: alpha + e_j leaves the truncated basis");
  }
  const Eigen::MatrixXd h = hermite_operator_matrix(basis);
  const int i = basis.flat_index(alpha);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(basis.size());
  e(i) = 1.0;
  return e.dot(h * e) / e.squaredNorm();
}

}  // namespace weylkit
