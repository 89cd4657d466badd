#include "weylkit/grid.hpp"

#include <cmath>

#include "weylkit/errors.hpp"

namespace weylkit {

GridCn::GridCn(int n, double half_width, int points_per_axis)
    : n_(n), L_(half_width), M_(points_per_axis) {
  if (n < 1 || n > 2) throw UnsupportedError("GridCn: n must be 1 or 2");
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw DomainError("GridCn: half_width must be positive");
  if (points_per_axis < 8 || points_per_axis % 2 != 0)
    throw DomainError("GridCn: points_per_axis must be even and >= 8");
  h_ = 2.0 * L_ / M_;
  cell_ = std::pow(h_, 2 * n_);
  size_ = 1;
  for (int a = 0; a < 2 * n_; ++a) size_ *= static_cast<std::size_t>(M_);
}

std::vector<int> GridCn::indices(std::size_t flat) const {
  std::vector<int> idx(axes());
  for (int a = axes() - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % M_);
    flat /= M_;
  }
  return idx;
}

std::size_t GridCn::flat(std::span<const int> idx) const {
  std::size_t f = 0;
  for (int i : idx) f = f * M_ + static_cast<std::size_t>(i);
  return f;
}

std::vector<double> GridCn::point(std::size_t flat) const {
  auto idx = indices(flat);
  std::vector<double> p(axes());
  for (int a = 0; a < axes(); ++a) p[a] = axis_coord(idx[a]);
  return p;
}

std::size_t GridCn::negated(std::size_t f) const {
  auto idx = indices(f);
  for (int& i : idx) {
    if (i == 0) return npos;
    i = M_ - i;
  }
  return flat(idx);
}

GridFunction::GridFunction(GridCn g) : grid(g), values(CVector::Zero(g.size())) {}

GridFunction::GridFunction(GridCn g, CVector v) : grid(g), values(std::move(v)) {
  if (static_cast<std::size_t>(values.size()) != grid.size())
    throw ContractError("GridFunction: value count does not match grid");
}

GridFunction GridFunction::sample(const GridCn& g,
                                  const std::function<cplx(std::span<const double>)>& f) {
  GridFunction out(g);
  std::vector<int> idx(g.axes(), 0);
  std::vector<double> p(g.axes());
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (int a = 0; a < g.axes(); ++a) p[a] = g.axis_coord(idx[a]);
    out.values(static_cast<Eigen::Index>(i)) = f(p);
    for (int a = g.axes() - 1; a >= 0; --a) {
      if (++idx[a] < g.points_per_axis()) break;
      idx[a] = 0;
    }
  }
  return out;
}

double GridFunction::norm2() const { return grid.cell_weight() * values.squaredNorm(); }

cplx GridFunction::inner(const GridFunction& other) const {
  if (!(grid == other.grid)) throw ContractError("GridFunction::inner: grid mismatch");
  return grid.cell_weight() * other.values.dot(values);
}

GridFunction GridFunction::star() const {
  GridFunction out(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const std::size_t j = grid.negated(i);
    if (j != GridCn::npos) out.values(i) = std::conj(values(j));
  }
  return out;
}

GridFunction GridFunction::conj() const { return GridFunction(grid, values.conjugate()); }

}  // namespace weylkit
