#include "polymg/geometry.hpp"
#include "polymg/stencil.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>
#include <string>

namespace polymg
{

GridGeometry GridGeometry::rectangular(std::vector<double> mesh_widths)
{
  GridGeometry g;
  g.dimension_ = static_cast<int>(mesh_widths.size());
  g.kind_ = GridKind::Rectangular;
  g.h_ = std::move(mesh_widths);
  g.validate();
  return g;
}

GridGeometry GridGeometry::rectangular(int dimension, double h)
{
  if (dimension != 2 && dimension != 3)
    throw std::invalid_argument("rectangular grids must have dimension 2 or 3");
  return rectangular(std::vector<double>(static_cast<std::size_t>(dimension), h));
}

GridGeometry GridGeometry::triangular(double alpha, double beta, double h)
{
  GridGeometry g;
  g.dimension_ = 2;
  g.kind_ = GridKind::Triangular;
  g.h_ = {h, h};
  g.alpha_ = alpha;
  g.beta_ = beta;
  g.validate();
  return g;
}

double GridGeometry::gamma() const { return std::numbers::pi - alpha_ - beta_; }

GridGeometry GridGeometry::coarsened(int factor) const
{
  if (factor < 1)
    throw std::invalid_argument("coarsening factor must be positive");
  GridGeometry g = *this;
  for (auto &h : g.h_)
    h *= factor;
  return g;
}

void GridGeometry::validate() const
{
  if (dimension_ != 2 && dimension_ != 3)
    throw std::invalid_argument("grid dimension must be 2 or 3, got " + std::to_string(dimension_));
  for (double h : h_)
    if (!(h > 0.0) || !std::isfinite(h))
      throw std::invalid_argument("mesh widths must be positive and finite");
  if (kind_ == GridKind::Triangular)
  {
    const double pi = std::numbers::pi;
    const double gamma = pi - alpha_ - beta_;
    for (double angle : {alpha_, beta_, gamma})
      if (!(angle > 0.0 && angle < pi))
        throw std::invalid_argument("degenerate triangle angles: alpha, beta and pi-alpha-beta must lie in (0, pi)");
  }
}

// ---------------------------------------------------------------------------

Stencil::Stencil(GridGeometry geometry, std::vector<StencilEntry> entries)
    : geometry_(std::move(geometry)), entries_(std::move(entries))
{
  const int d = geometry_.dimension();
  std::set<Offset> seen;
  bool has_center = false;
  for (const auto &e : entries_)
  {
    for (int a = d; a < 3; ++a)
      if (e.offset[static_cast<std::size_t>(a)] != 0)
        throw std::invalid_argument("stencil offset has nonzero component beyond the grid dimension");
    if (!std::isfinite(e.coefficient))
      throw std::invalid_argument("stencil coefficient is not finite");
    if (!seen.insert(e.offset).second)
      throw std::invalid_argument("stencil contains duplicate offsets");
    if (e.offset == Offset{0, 0, 0})
    {
      has_center = true;
      if (!(e.coefficient > 0.0))
        throw std::invalid_argument("stencil center coefficient must be positive");
    }
  }
  if (!has_center)
    throw std::invalid_argument("stencil has no center entry");
}

double Stencil::center() const
{
  for (const auto &e : entries_)
    if (e.offset == Offset{0, 0, 0})
      return e.coefficient;
  return 0.0; // unreachable, constructor guarantees a center
}

double Stencil::off_center_abs_sum() const
{
  double s = 0.0;
  for (const auto &e : entries_)
    if (e.offset != Offset{0, 0, 0})
      s += std::abs(e.coefficient);
  return s;
}

double Stencil::row_sum() const
{
  double s = 0.0;
  for (const auto &e : entries_)
    s += e.coefficient;
  return s;
}

int Stencil::reach() const
{
  int r = 0;
  for (const auto &e : entries_)
    for (int c : e.offset)
      r = std::max(r, std::abs(c));
  return r;
}

bool Stencil::is_symmetric(double tol) const
{
  for (const auto &e : entries_)
  {
    const Offset mirrored{-e.offset[0], -e.offset[1], -e.offset[2]};
    auto it = std::find_if(entries_.begin(), entries_.end(),
                           [&](const StencilEntry &o) { return o.offset == mirrored; });
    const double other = it == entries_.end() ? 0.0 : it->coefficient;
    if (std::abs(other - e.coefficient) > tol * std::max(1.0, std::abs(e.coefficient)))
      return false;
  }
  return true;
}

Stencil Stencil::with_geometry(GridGeometry geometry) const
{
  if (geometry.dimension() != geometry_.dimension())
    throw std::invalid_argument("with_geometry: dimension mismatch");
  return Stencil(std::move(geometry), entries_);
}

Stencil rediscretize(const Stencil &s, int factor)
{
  if (factor < 1)
    throw std::invalid_argument("rediscretize: factor must be positive");
  std::vector<StencilEntry> entries = s.entries();
  const double scale = 1.0 / (static_cast<double>(factor) * factor);
  for (auto &e : entries)
    e.coefficient *= scale;
  return Stencil(s.geometry().coarsened(factor), std::move(entries));
}

Stencil build_fd_laplace(const GridGeometry &geometry)
{
  if (geometry.is_triangular())
    throw std::invalid_argument("build_fd_laplace requires a rectangular geometry");
  const int d = geometry.dimension();
  std::vector<StencilEntry> entries;
  double center = 0.0;
  for (int a = 0; a < d; ++a)
  {
    const double h = geometry.mesh_width(a);
    const double w = 1.0 / (h * h);
    center += 2.0 * w;
    for (int s : {-1, 1})
    {
      Offset o{0, 0, 0};
      o[static_cast<std::size_t>(a)] = s;
      entries.push_back({o, -w});
    }
  }
  entries.insert(entries.begin(), StencilEntry{{0, 0, 0}, center});
  return Stencil(geometry, std::move(entries));
}

Stencil build_fem_tri_laplace(double alpha, double beta, double h)
{
  GridGeometry g = GridGeometry::triangular(alpha, beta, h);
  const double ca = 1.0 / std::tan(alpha);
  const double cb = 1.0 / std::tan(beta);
  const double cg = 1.0 / std::tan(g.gamma());
  const double scale = (ca + cb) / (h * h);
  // Rows of the printed 3x3 stencil are y = +1, 0, -1; columns x = -1, 0, +1.
  std::vector<StencilEntry> entries{
      {{0, 0, 0}, scale * 2.0 * (ca + cb + cg)},
      {{0, 1, 0}, -scale * ca},
      {{1, 1, 0}, -scale * cb},
      {{-1, 0, 0}, -scale * cg},
      {{1, 0, 0}, -scale * cg},
      {{-1, -1, 0}, -scale * cb},
      {{0, -1, 0}, -scale * ca},
  };
  return Stencil(std::move(g), std::move(entries));
}

} // namespace polymg
