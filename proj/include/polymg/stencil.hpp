#ifndef POLYMG_STENCIL_HPP
#define POLYMG_STENCIL_HPP

#include "polymg/geometry.hpp"

#include <array>
#include <vector>

namespace polymg
{

using Offset = std::array<int, 3>;

struct StencilEntry
{
  Offset offset{0, 0, 0};
  double coefficient = 0.0;

  bool operator==(const StencilEntry &) const = default;
};

/// Constant-coefficient operator on an infinite lattice. Offsets are integer
/// lattice vectors; the physical scaling comes from the geometry at symbol
/// evaluation time. Unused trailing offset components must be zero.
class Stencil
{
public:
  Stencil(GridGeometry geometry, std::vector<StencilEntry> entries);

  const GridGeometry &geometry() const { return geometry_; }
  const std::vector<StencilEntry> &entries() const { return entries_; }
  int dimension() const { return geometry_.dimension(); }

  double center() const;
  double off_center_abs_sum() const;
  double row_sum() const;
  /// Largest |offset component| over all entries.
  int reach() const;
  bool is_symmetric(double tol = 1e-14) const;

  /// Same entries, different geometry (used to rediscretize on a coarse lattice).
  Stencil with_geometry(GridGeometry geometry) const;

  bool operator==(const Stencil &) const = default;

private:
  GridGeometry geometry_;
  std::vector<StencilEntry> entries_;
};

/// The operator regenerated on the lattice coarsened by `factor`: entries are
/// scaled by 1/factor^2, which rebuilds any second-order stencil here exactly.
Stencil rediscretize(const Stencil &s, int factor);

/// 5-point (2D) or 7-point (3D) finite difference Laplacian, scaled by 1/h^2.
Stencil build_fd_laplace(const GridGeometry &geometry);

/// Linear finite element Laplacian on the regular triangulation with angles
/// (alpha, beta, gamma = pi - alpha - beta), including the (cot a + cot b)/h^2
/// prefactor. Offsets follow the lattice enumeration: (0,+-1) couple through
/// cot(alpha), (+-1,0) through cot(gamma) and +-(1,1) through cot(beta).
Stencil build_fem_tri_laplace(double alpha, double beta, double h);

} // namespace polymg

#endif
