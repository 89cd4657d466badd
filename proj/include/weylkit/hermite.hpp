#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace weylkit {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Multi-index alpha in Z_+^n, one component per axis.
using MultiIndex = std::vector<int>;

/// Gauss-Hermite rule rescaled to integrate against dx rather than e^{-x^2} dx.
struct QuadratureRule {
  std::vector<double> nodes;    // ascending, symmetric about 0
  std::vector<double> weights;  // strictly positive
};

/// Builds the size-point rule. Exact for p(x) e^{-x^2} with deg p <= 2 size - 1.
QuadratureRule build_quadrature(int size);

/// build_quadrature memoised per size (thread-safe).
const QuadratureRule& cached_quadrature(int size);

/// Orthonormal Hermite functions phi_0..phi_{count-1} at x (lambda = 1),
/// evaluated with the three-term recurrence.
void hermite_functions(double x, std::span<double> out);

/// Single orthonormal Hermite function phi_k(x), lambda = 1.
double hermite_function(int k, double x);

/// Truncated system of scaled Hermite functions phi_alpha^lambda on R^n, n in {1, 2}.
///
/// Each axis carries its own signed scale lambda_j; the usual isotropic basis
/// has all lambda_j equal.  The sign is irrelevant to the functions themselves
/// (they depend on |lambda_j|) but selects the Schrodinger representation
/// pi_{lambda_j} used by the Weyl-transform layer.
///
/// Multi-indices run over {0..N-1}^n in lexicographic order, first component
/// most significant.
class HermiteBasis {
 public:
  HermiteBasis(int n, double lambda, int degree_cap, int quad_size = 0);

  /// Basis whose axes carry different scales (step-two groups with distinct
  /// d_j(omega)).
  static HermiteBasis anisotropic(std::vector<double> axis_lambda, int degree_cap,
                                  int quad_size = 0);

  int dim() const { return static_cast<int>(axis_lambda_.size()); }
  int degree_cap() const { return degree_cap_; }
  int size() const { return size_; }
  int quad_size() const { return static_cast<int>(rule_.nodes.size()); }

  /// Common scale; throws ContractError for an anisotropic basis.
  double lambda() const;
  double axis_lambda(int axis) const { return axis_lambda_.at(axis); }
  const std::vector<double>& axis_lambdas() const { return axis_lambda_; }
  bool isotropic() const;

  /// Unscaled (lambda = 1) quadrature rule shared by every axis.
  const QuadratureRule& rule() const { return rule_; }
  /// Rule for integrals against phi^lambda on a given axis: nodes / sqrt|lambda|.
  QuadratureRule scaled_rule(int axis) const;

  int flat_index(const MultiIndex& alpha) const;
  MultiIndex multi_index(int flat) const;
  int total_degree(int flat) const;
  void check_admissible(const MultiIndex& alpha) const;

  bool compatible(const HermiteBasis& other) const;

 private:
  HermiteBasis(std::vector<double> axis_lambda, int degree_cap, int quad_size);

  std::vector<double> axis_lambda_;
  int degree_cap_;
  int size_;
  QuadratureRule rule_;
};

/// Identifies a basis for compatibility checks without holding a reference.
struct BasisKey {
  std::vector<double> axis_lambda;
  int degree_cap = 0;

  explicit BasisKey(const HermiteBasis& b)
      : axis_lambda(b.axis_lambdas()), degree_cap(b.degree_cap()) {}
  BasisKey() = default;
  bool operator==(const BasisKey&) const = default;
};

/// Coefficients of a function in a HermiteBasis (element of truncated L^2(R^n)).
struct CoeffVector {
  CVector coeffs;
  BasisKey basis;

  CoeffVector() = default;
  CoeffVector(const HermiteBasis& b, CVector c);
  static CoeffVector zero(const HermiteBasis& b);
  static CoeffVector unit(const HermiteBasis& b, const MultiIndex& alpha);

  bool lives_in(const HermiteBasis& b) const;
  cplx inner(const CoeffVector& other) const;  // <this, other>, linear in this
  double norm() const { return coeffs.norm(); }
};

/// phi_alpha^lambda(x) = prod_j |lambda_j|^{1/4} phi_{alpha_j}(sqrt|lambda_j| x_j).
double hermite_eval(const HermiteBasis& basis, const MultiIndex& alpha,
                    std::span<const double> x);

/// Evaluates the function with the given coefficients at x.
cplx coeff_eval(const HermiteBasis& basis, const CoeffVector& f,
                std::span<const double> x);

/// Discrete Gram matrix of the basis under its own quadrature rule.
Eigen::MatrixXd quadrature_gram(const HermiteBasis& basis);

/// Rayleigh quotient <phi_alpha, H_lambda phi_alpha> with
/// H_lambda = -Laplacian + lambda^2 |x|^2 assembled from ladder operators in
/// the truncated basis.  Throws TruncationError when alpha + e_j leaves the basis.
double hermite_operator_check(const HermiteBasis& basis, const MultiIndex& alpha);

/// Matrix of H_lambda restricted to the basis (exact on indices with
/// alpha_j + 1 < N for every axis).
Eigen::MatrixXd hermite_operator_matrix(const HermiteBasis& basis);

}  // namespace weylkit
