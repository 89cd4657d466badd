#pragma once

#include <string>
#include <vector>

#include "weylkit/heisenberg.hpp"

namespace weylkit {

/// Step-two nilpotent Lie algebra g = b + z with [V_i, V_j] = sum_l c_{ij}^l Z_l.
class StepTwoAlgebra {
 public:
  /// Zero structure constants; dimensions m = dim b, k = dim z.
  StepTwoAlgebra(int m, int k);

  /// Parses the text format: header "m k", then lines "i j l value" (1-based)
  /// for nonzero c_{ij}^l.  Entries with i > j may be given; they must agree
  /// with the skew partner.  '#' starts a comment.
  static StepTwoAlgebra parse(const std::string& text);
  static StepTwoAlgebra load(const std::string& path);
  /// Text in the same format, one line per nonzero entry with i < j.
  std::string serialize() const;

  int m() const { return m_; }
  int k() const { return k_; }
  double c(int i, int j, int l) const { return c_[index(i, j, l)]; }
  /// Sets c_{ij}^l and c_{ji}^l = -value (0-based indices).
  void set(int i, int j, int l, double value);

  /// [V, W] in z-coordinates.
  Eigen::VectorXd bracket(const Eigen::VectorXd& V, const Eigen::VectorXd& W) const;

 private:
  std::size_t index(int i, int j, int l) const {
    return (static_cast<std::size_t>(i) * m_ + j) * k_ + l;
  }
  int m_, k_;
  std::vector<double> c_;
};

/// Shipped algebras.
StepTwoAlgebra heisenberg_algebra();           // m = 2, k = 1, c_{12}^1 = 1
StepTwoAlgebra quaternionic_h_type_algebra();  // m = 4, k = 3, J_l = left mult. by i, j, k
StepTwoAlgebra radical_algebra();              // m = 4, k = 1, only c_{12}^1 = 1

struct FixtureInfo {
  std::string name;
  std::string file_name;
  StepTwoAlgebra (*make)();
};
const std::vector<FixtureInfo>& shipped_fixtures();

/// Element (V, Z) of the group in exponential coordinates.
struct StepTwoElement {
  Eigen::VectorXd V;
  Eigen::VectorXd Z;
};

/// (V, Z)(V', Z') = (V + V', Z + Z' + [V, V'] / 2).
StepTwoElement group_multiply(const StepTwoAlgebra& alg, const StepTwoElement& a,
                              const StepTwoElement& b);
StepTwoElement group_inverse(const StepTwoElement& a);

/// B_omega(X, Y) = omega([X, Y]) = sum_l omega_l C^l.
Eigen::MatrixXd bilinear_form(const StepTwoAlgebra& alg, const Eigen::VectorXd& omega);

/// Orthonormal almost-symplectic basis of b for omega.
struct SymplecticDecomp {
  Eigen::VectorXd omega;
  Eigen::MatrixXd B;
  std::vector<double> d;  // d_1 >= d_2 >= ... > 0
  Eigen::MatrixXd X;      // m x n, columns X_i
  Eigen::MatrixXd Y;      // m x n, columns Y_i
  Eigen::MatrixXd radical;  // m x (m - 2n), orthonormal basis of r_omega
  int radical_dim = 0;
  double p_omega = 1.0;  // prod d_i
  bool tie = false;      // some invariant planes share a value of d
  bool metivier() const { return radical_dim == 0; }
  int pairs() const { return static_cast<int>(d.size()); }

  /// max |B(X_i, Y_j) - delta_ij d_i|, |B(X_i, X_j)|, |B(Y_i, Y_j)| and the
  /// orthonormality defect of [X Y radical].
  double pairing_residual() const;
  /// Original b-coordinates of the adapted point (x_1, y_1, ..., x_n, y_n).
  Eigen::VectorXd to_b(std::span<const double> adapted) const;
};

/// Real canonical form of the skew matrix B: repeatedly take the top
/// eigenvector of B^T B on the remaining subspace (X), pair it with
/// Y = B^T X / d, deflate.  Within a cluster of equal d the X chosen is the
/// normalised projection of the first standard basis vector with a
/// substantial component on the cluster, sign fixed so its first nonzero
/// coordinate is positive; ties are flagged.  Directions with
/// d < 1e-12 max(1, ||B||) form the radical.
SymplecticDecomp symplectic_decompose(const Eigen::MatrixXd& B, const Eigen::VectorXd& omega);
SymplecticDecomp symplectic_decompose(const StepTwoAlgebra& alg, const Eigen::VectorXd& omega);

/// Hermite basis of L^2(R^n) carrying pi_omega: axis scales -d_j(omega).
///
/// With the pairing omega([X_j, Y_j]) = +d_j, pi_omega on the j-th plane is the
/// Schrodinger representation with parameter -d_j; that sign is what makes
/// pi_omega(v) pi_omega(v') = e^{(i/2) omega([v, v'])} pi_omega(v + v').
HermiteBasis omega_basis(const SymplecticDecomp& decomp, int degree_cap, int quad_size = 0);

/// pi_omega(x, y, t) phi for adapted coordinates (x, y) and central t in R^k.
CoeffVector pi_omega_action(const SymplecticDecomp& decomp, const HermiteBasis& basis,
                            std::span<const double> x, std::span<const double> y,
                            std::span<const double> t, const CoeffVector& phi);

/// W_omega(h) = sum_v w h(v) pi_omega(v) for h sampled on an adapted-coordinate grid.
/// Throws PreconditionError when h has relative boundary mass above 1e-8.
WeylMatrix weyl_omega(const SymplecticDecomp& decomp, const HermiteBasis& basis,
                      const GridFunction& h);

/// (f *_omega g)(v) = sum_v' w f(v - v') g(v') e^{(i/2) omega([v, v'])}, with the
/// phase evaluated from the structure constants in original b-coordinates.
GridFunction twisted_convolution_omega(const StepTwoAlgebra& alg, const SymplecticDecomp& decomp,
                                       const GridFunction& f, const GridFunction& g);

/// (2 pi)^{-n} p(omega) tr(pi_omega(v)^* Fhat) at an adapted point v.
cplx inversion(const SymplecticDecomp& decomp, const HermiteBasis& basis, const WeylMatrix& Fhat,
               std::span<const double> v);

/// Same formula on every point of a grid.
GridFunction inversion_on_grid(const SymplecticDecomp& decomp, const HermiteBasis& basis,
                               const WeylMatrix& Fhat, const GridCn& grid);

/// Share of ||Fhat||_HS^2 on rows or columns of the top degree N - 1 of some
/// axis; large values mean the trace has not converged in the truncation.
double inversion_tail(const HermiteBasis& basis, const WeylMatrix& Fhat);

}  // namespace weylkit
