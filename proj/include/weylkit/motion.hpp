#pragma once

#include "weylkit/heisenberg.hpp"

namespace weylkit {

/// Character sigma_m(e^{i theta}) = e^{i m theta} of U(1).
struct CharacterIndex {
  int m = 0;
  static constexpr int d_sigma = 1;

  /// Throws IndexError when |m| > cap.
  CharacterIndex(int m, int cap);
};

/// Product grid on C x S^1: a GridCn (n = 1) times T equally spaced angles.
///
/// Haar measure on the circle is normalised to mass 1, so the weight of a
/// point is cell_weight / T.
class GridGx {
 public:
  /// Requires T >= 2 M_char + 4 so characters |m| <= M_char are exactly
  /// orthogonal on the discrete circle.
  GridGx(GridCn cn, int theta_points, int max_char);

  const GridCn& cn() const { return cn_; }
  int theta_points() const { return T_; }
  int max_char() const { return max_char_; }
  double theta(int k) const;
  double weight() const { return cn_.cell_weight() / T_; }
  std::size_t size() const { return cn_.size() * static_cast<std::size_t>(T_); }
  /// Flat index of (z, theta_k); theta runs fastest.
  std::size_t flat(std::size_t iz, int k) const { return iz * T_ + k; }

  bool operator==(const GridGx& o) const {
    return cn_ == o.cn_ && T_ == o.T_ && max_char_ == o.max_char_;
  }

 private:
  GridCn cn_;
  int T_;
  int max_char_;
};

/// Complex samples on a GridGx.
struct MotionFunction {
  GridGx grid;
  CVector values;

  explicit MotionFunction(GridGx g);
  MotionFunction(GridGx g, CVector v);

  static MotionFunction sample(const GridGx& g,
                               const std::function<cplx(std::span<const double>, double)>& f);

  GridFunction slice(int k) const;
  void set_slice(int k, const GridFunction& f);
  double norm2() const;                          // sum w |F|^2, w = cell / T
  cplx inner(const MotionFunction& other) const;  // sum w F conj(G)
};

/// Sign s of the metaplectic phase mu(theta) phi_k = e^{i s k theta} phi_k that
/// intertwines pi_lambda with rotation z -> e^{i theta} z: s = sgn(lambda).
int metaplectic_sign(double lambda);

/// diag(e^{i s k theta}); s defaults to metaplectic_sign(lambda).  n = 1 only.
WeylMatrix metaplectic_matrix(const HermiteBasis& basis, double theta);
WeylMatrix metaplectic_matrix(const HermiteBasis& basis, double theta, int sign);

/// ||pi(e^{i theta} z) - mu(theta) pi(z) mu(theta)^H||_HS for the given phase sign.
double intertwining_residual(const HermiteBasis& basis, double theta, std::span<const double> z,
                             int sign);

/// W_m(F) = sum_{theta, z} w F(z, theta) pi(z) mu(theta) e^{i m theta}.
WeylMatrix motion_weyl(const HermiteBasis& basis, const CharacterIndex& m, const MotionFunction& F);

/// The band-limited function whose transforms are W_m = Ws[m + cap] for |m| <= cap
/// and zero otherwise; inverse of motion_weyl when T is large enough to avoid aliasing.
MotionFunction inverse_motion_weyl(const HermiteBasis& basis, const std::vector<CMatrix>& Ws,
                                   const GridGx& grid);

/// V_f^g(z, theta) = <pi(z) mu(theta) f, g> e^{i m theta}.
MotionFunction fourier_wigner_motion(const HermiteBasis& basis, const CharacterIndex& m,
                                     const CoeffVector& f, const CoeffVector& g,
                                     const GridGx& grid);

/// Twisted convolution on G^x = C x U(1) for the group law
/// (z, a)(w, b) = (z + e^{i a} w, a + b):
///   (F x H)(u, c) = (1/T) sum_a [F(., a) x_l H_a(., c - a)](u),  H_a(w) = H(e^{-i a} w).
/// The rotation of H is carried out exactly in the Hermite basis (via
/// W(H o R) = mu W(H) mu^H), so H must be band-limited in the basis.
MotionFunction twisted_convolution_gx(const HermiteBasis& basis, const MotionFunction& F,
                                      const MotionFunction& H);

/// Samples on C x R_t x S^1 with a uniform t grid, t_j = -Lt + j dt.
struct MotionTimeSamples {
  GridGx grid;
  double t_half_width;
  int t_points;
  CVector values;  // ((iz * t_points) + it) * T + k

  MotionTimeSamples(GridGx g, double t_half_width, int t_points);
  double t(int j) const { return -t_half_width + j * dt(); }
  double dt() const { return 2.0 * t_half_width / t_points; }
};

/// F^lambda(z, theta) = sum_t dt F(z, t, theta) e^{i lambda t}.
/// Throws DomainError for lambda = 0 or |lambda| dt >= pi (aliasing).
MotionFunction lambda_slice(const MotionTimeSamples& F, double lambda);

/// Group Fourier transform F^(lambda, sigma_m) = motion_weyl(F^lambda), basis at lambda.
WeylMatrix group_fourier(const HermiteBasis& basis, const CharacterIndex& m,
                         const MotionTimeSamples& F);

}  // namespace weylkit
