#pragma once

#include <limits>
#include <vector>

#include "weylkit/heisenberg.hpp"
#include "weylkit/motion.hpp"

namespace weylkit {

/// Singular values of a WeylMatrix and the relative-threshold rank.
struct RankProfile {
  std::vector<double> singular_values;  // nonincreasing
  double epsilon = 0.0;
  int numerical_rank = 0;  // #{sigma_i > epsilon sigma_1}
  /// ||W - U S V^H||_F from the SVD that produced the values.
  double reconstruction_residual = 0.0;
};

/// Full SVD.  Throws DomainError for epsilon outside (0, 1) and
/// ContractError for non-finite entries.
RankProfile rank_profile(const WeylMatrix& W, double epsilon);

/// tau_hat = sum_j a_j f_j f_j^H with tau = sum_j T(h_j, h_j),
/// h_j = (|lambda|/(2 pi))^{n/2} sqrt(a_j) f_j.
struct WignerDecomposition {
  std::vector<CoeffVector> components;  // h_j
  std::vector<CoeffVector> eigenvectors;  // f_j, unit norm
  std::vector<double> weights;          // a_j > 0, nonincreasing
  /// ||tau_hat - sum_j a_j f_j f_j^H||_HS / ||tau_hat||_HS (0 for tau_hat = 0).
  double residual = 0.0;
};

/// Eigendecomposition of a positive semidefinite tau_hat.  Eigenvalues down to
/// -1e-10 ||tau_hat|| are clipped to 0; components with a_j <= 1e-14 a_1 are
/// dropped.  Throws ContractError when tau_hat is non-Hermitian beyond 1e-8
/// (relative) or has a more negative eigenvalue.
WignerDecomposition spectral_to_wigner(const WeylMatrix& tau_hat, const HermiteBasis& basis);

/// tau = sum_j T(h_j, h_j) on the grid.
GridFunction reconstruct_tau(const HermiteBasis& basis, const WignerDecomposition& dec,
                             const GridCn& grid);

/// sum_j V_{h_j}^{h_j} on C x U(1) for the character m.
MotionFunction reconstruct_tau_motion(const HermiteBasis& basis, const CharacterIndex& m,
                                      const WignerDecomposition& dec, const GridGx& grid);

/// K_y(xi) = sum_j b_j chi_j(xi + y) conj(phi_j(xi)) at the given xi (n = 1).
CVector kernel_Ky(const HermiteBasis& basis, const std::vector<CoeffVector>& chi,
                  const std::vector<CoeffVector>& phi, const std::vector<cplx>& b, double y,
                  std::span<const double> xi);

/// Same, at the nodes of the basis quadrature rule.
CVector kernel_Ky(const HermiteBasis& basis, const std::vector<CoeffVector>& chi,
                  const std::vector<CoeffVector>& phi, const std::vector<cplx>& b, double y);

struct KernelSupport {
  std::vector<double> y;        // sampled shifts, by increasing |y|
  std::vector<double> max_abs;  // max_xi |K_y(xi)| per shift
  /// Smallest sampled |y| = r with max_abs <= tol at every sampled |y| >= r;
  /// +inf if the largest shift still exceeds tol.
  double r_hat = std::numeric_limits<double>::infinity();
};

/// Sweeps y over the given shifts, maximising |K_y| over xi.
KernelSupport kernel_support(const HermiteBasis& basis, const std::vector<CoeffVector>& chi,
                             const std::vector<CoeffVector>& phi, const std::vector<cplx>& b,
                             std::span<const double> ys, std::span<const double> xi, double tol);

/// L^2 mass of F outside the centred disc of the given radius (n = 1 grids).
///
/// With a smooth radial cutoff psi (1 inside R, 0 beyond R + delta) the mass
/// splits into the grid sum of |F|^2 (1 - psi), a smooth integrand, and the
/// integral of |F|^2 psi over the annulus R < r < R + delta, done in polar
/// coordinates on the 8-point Lagrange interpolant of F.  Both parts are
/// nonnegative.  delta = min(R/2, L/4, L - R - 8h); when that spans fewer than
/// 16 cells, small discs (R <= L/2) use grid total minus a polar integral over
/// the disc, and larger ones the plain sum over grid points beyond R.
/// Throws DomainError unless 0 < R < L, UnsupportedError for n != 1.
double tail_mass(const GridFunction& F, double radius);

/// Alternating projections between {supp F within mask} and {rank W(F) <= rank_cap}.
struct PocsResult {
  std::vector<double> norms;  // ||F_k||, k = 0..iterations (k = 0 is the start)
  GridFunction final_state;
};

/// Each iteration: F <- mask F;  F <- inverse_weyl(best rank_cap approximation of W(F)).
/// mask entries must lie in [0, 1].  Throws DomainError for rank_cap < 1 or iterations < 1.
PocsResult pocs_explorer(const HermiteBasis& basis, const Eigen::VectorXd& mask,
                         const GridFunction& F0, int rank_cap, int iterations);

/// Indicator of the centred disc of the given radius.
Eigen::VectorXd disc_mask(const GridCn& grid, double radius);

/// Shipped reference experiment: n = 1, lambda = 1, N = 16, L = 8, M = 64,
/// disc mask of radius 2, F0 = mask (G + 0.1 r) with G = e^{-|z - c|^2/4}, c = (0.5, 0),
/// and r a seeded band-limited random function rescaled to the norm of G.
struct PocsReference {
  HermiteBasis basis;
  GridCn grid;
  Eigen::VectorXd mask;
  GridFunction F0;
  int rank_cap;
};
PocsReference pocs_reference(std::uint64_t seed);

/// Frozen regression bound on final / initial norm for the reference run.
inline constexpr double kPocsReferenceBound = 0.1;

}  // namespace weylkit
