#pragma once

#include <array>
#include <functional>
#include <vector>

#include "weylkit/hermite.hpp"

namespace weylkit {

/// Uniform box grid over C^n = R^{2n}, coordinates ordered (x_1, y_1, ..., x_n, y_n).
///
/// Each axis holds M points -L + j h, j = 0..M-1, h = 2L/M, so the origin is
/// the point j = M/2 and -x_j = x_{M-j}.  Points are enumerated row-major with
/// the last coordinate fastest.
class GridCn {
 public:
  GridCn(int n, double half_width, int points_per_axis);

  int n() const { return n_; }
  int axes() const { return 2 * n_; }
  double half_width() const { return L_; }
  int points_per_axis() const { return M_; }
  double spacing() const { return h_; }
  double cell_weight() const { return cell_; }
  std::size_t size() const { return size_; }

  double axis_coord(int j) const { return -L_ + j * h_; }
  /// Axis indices of a flat point index.
  std::vector<int> indices(std::size_t flat) const;
  std::size_t flat(std::span<const int> idx) const;
  std::vector<double> point(std::size_t flat) const;
  /// Flat index of -z, or npos when -z falls outside the box.
  std::size_t negated(std::size_t flat) const;

  bool operator==(const GridCn& o) const {
    return n_ == o.n_ && L_ == o.L_ && M_ == o.M_;
  }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  int n_;
  double L_;
  int M_;
  double h_;
  double cell_;
  std::size_t size_;
};

/// Complex samples of a function on a GridCn.
struct GridFunction {
  GridCn grid;
  CVector values;

  explicit GridFunction(GridCn g);
  GridFunction(GridCn g, CVector v);

  /// Samples f(point) at every grid point.
  static GridFunction sample(const GridCn& g,
                             const std::function<cplx(std::span<const double>)>& f);

  double norm2() const;                        // sum_z w |F(z)|^2
  cplx inner(const GridFunction& other) const;  // sum_z w F conj(G)
  /// F*(z) = conj(F(-z)); points whose mirror leaves the box get 0.
  GridFunction star() const;
  GridFunction conj() const;
};

}  // namespace weylkit
