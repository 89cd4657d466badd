#pragma once

#include <optional>
#include <random>
#include <vector>

#include "weylkit/grid.hpp"
#include "weylkit/hermite.hpp"

namespace weylkit {

/// Dense matrix of an operator in the truncated Hermite basis.
///
/// Stored as the operator matrix: entry (beta, alpha) = <T phi_alpha, phi_beta>,
/// so products of WeylMatrix values compose like the operators they represent.
struct WeylMatrix {
  CMatrix matrix;
  std::vector<double> lambda;  // one signed scale per axis
  std::optional<int> sigma_index;
  /// Diagnostic for the effect of basis truncation / discretisation; meaning
  /// depends on the producing operation.
  double truncation_residual = 0.0;

  double hs_norm() const { return matrix.norm(); }
  WeylMatrix adjoint() const;
  WeylMatrix operator*(const WeylMatrix& rhs) const;
};

/// Quadrature engine for one axis of pi_lambda.
///
/// With the midpoint substitution xi = s - y/2,
///   <pi_l(x + iy) phi_a^l, phi_b^l> = int e^{i l x s} phi_a^l(s + y/2) phi_b^l(s - y/2) ds,
/// whose Gaussian envelope matches the Gauss-Hermite weight exactly.
///
/// The rule must resolve e^{i sqrt|l| x t}: the basis rule is accurate for
/// sqrt|l| |x| up to about sqrt(2 Q) - 4, so kernels serving a grid are built
/// with kernel_quad_size(basis, axis, L).
class AxisKernel {
 public:
  /// quad_size = 0 selects the basis rule.
  AxisKernel(const HermiteBasis& basis, int axis, int quad_size = 0);

  int degree_cap() const { return N_; }
  int quad_size() const { return static_cast<int>(t_.size()); }

  /// Q x N tables phi_k(t_q + a) and phi_k(t_q - a), a = sqrt|l| y / 2.
  void shift_tables(double y, Eigen::MatrixXd& plus, Eigen::MatrixXd& minus) const;
  /// w_q e^{i sgn(l) sqrt|l| x t_q}.
  CVector phases(double x) const;
  /// Row-major M x Q table of phases(x_i) for the given abscissae.
  CMatrix phase_table(std::span<const double> xs) const;

  /// Operator matrix of pi_l(x + iy) (N x N).
  CMatrix matrix(double x, double y) const;

 private:
  int N_;
  double lambda_;
  double root_;  // sqrt|lambda|
  std::vector<double> t_;
  std::vector<double> w_;
};

/// Rule size for abscissae |x| <= max_abs_x on the given axis:
/// max(basis rule, (sqrt|l| max_abs_x)^2 / 2 + 2N + 24).
int kernel_quad_size(const HermiteBasis& basis, int axis, double max_abs_x);

/// Operator matrix of pi_lambda(z), t = 0.  truncation_residual = max |P^H P - I|.
WeylMatrix schrodinger_matrix(const HermiteBasis& basis, std::span<const double> z);

/// phi_{alpha beta}^lambda(z) = (2 pi)^{-n/2} <pi_lambda(z) phi_alpha, phi_beta>.
cplx special_hermite(const HermiteBasis& basis, const MultiIndex& alpha,
                     const MultiIndex& beta, std::span<const double> z);

/// z -> sum_{alpha, beta} K(beta, alpha) <pi(z) phi_alpha, phi_beta> on the grid.
GridFunction matrix_coefficient(const HermiteBasis& basis, const CMatrix& K, const GridCn& grid);

/// Fourier-Wigner transform T(phi, psi)(z) = <pi(z) phi, psi> sampled on the grid.
GridFunction fourier_wigner(const HermiteBasis& basis, const CoeffVector& phi,
                            const CoeffVector& psi, const GridCn& grid);

/// W(F) = sum_z w F(z) pi(z), the discrete Weyl transform.
WeylMatrix weyl_transform(const HermiteBasis& basis, const GridFunction& F);

/// The function whose Weyl transform is W:  z -> prod|l_j| (2 pi)^{-n} tr(pi(z)^* W).
GridFunction inverse_weyl(const HermiteBasis& basis, const CMatrix& W, const GridCn& grid);

/// Plancherel constant (2 pi)^n / prod |lambda_j|:  ||W(F)||_HS^2 = c ||F||^2.
double plancherel_constant(const HermiteBasis& basis);

/// Fraction of the discrete L^2 mass on points with some |coordinate| > 3L/4.
double boundary_mass_fraction(const GridFunction& F);

/// Relative boundary mass above which twisted convolution refuses to run.
inline constexpr double kTwistedTailLimit = 1e-8;

/// lambda-twisted convolution
///   (F x_l H)(z) = sum_w w F(z - w) H(w) exp(-(i/2) l Im(w . conj z)),
/// one signed scale per coordinate pair.  Grid-shift summation with
/// precomputed phase tables; points z - w outside the box contribute 0.
/// Throws PreconditionError if F or H carries boundary mass above the limit.
GridFunction twisted_convolution(std::span<const double> lambda, const GridFunction& F,
                                 const GridFunction& H);
GridFunction twisted_convolution(double lambda, const GridFunction& F, const GridFunction& H);

/// Reference double sum for twisted_convolution, evaluating every phase directly.
GridFunction twisted_convolution_direct(std::span<const double> lambda, const GridFunction& F,
                                        const GridFunction& H);

/// Random operator supported on multi-indices of total degree <= band, with
/// i.i.d. standard complex Gaussian entries.
CMatrix random_band_matrix(const HermiteBasis& basis, int band, std::mt19937_64& rng);

/// Random coefficient vector with i.i.d. standard complex Gaussian entries on
/// multi-indices of total degree <= band.
CoeffVector random_coeffs(const HermiteBasis& basis, int band, std::mt19937_64& rng);

}  // namespace weylkit
