#ifndef POLYMG_GEOMETRY_HPP
#define POLYMG_GEOMETRY_HPP

#include <array>
#include <vector>

namespace polymg
{

enum class GridKind
{
  Rectangular,
  Triangular
};

/// Infinite-lattice geometry: either an axis-aligned rectangular grid (2D/3D)
/// or a regular triangulation of the plane characterized by two angles.
///
/// For the triangular kind the lattice is indexed in the non-orthogonal basis
/// fitted to the triangles; frequencies are then expressed in the reciprocal
/// basis so that theta . x reduces to a plain coordinate sum.
class GridGeometry
{
public:
  static GridGeometry rectangular(std::vector<double> mesh_widths);
  static GridGeometry rectangular(int dimension, double h);
  static GridGeometry triangular(double alpha, double beta, double h);

  int dimension() const { return dimension_; }
  GridKind kind() const { return kind_; }
  bool is_triangular() const { return kind_ == GridKind::Triangular; }

  /// Mesh width along lattice axis `axis` (the scalar h for triangular grids).
  double mesh_width(int axis) const { return h_[static_cast<std::size_t>(axis)]; }
  const std::vector<double> &mesh_widths() const { return h_; }

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double gamma() const;

  /// Same geometry with every mesh width multiplied by `factor`.
  GridGeometry coarsened(int factor) const;

  bool operator==(const GridGeometry &) const = default;

private:
  GridGeometry() = default;
  void validate() const;

  int dimension_ = 2;
  GridKind kind_ = GridKind::Rectangular;
  std::vector<double> h_;
  double alpha_ = 0.0;
  double beta_ = 0.0;
};

} // namespace polymg

#endif
