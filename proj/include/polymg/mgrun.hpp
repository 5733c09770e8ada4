#ifndef POLYMG_MGRUN_HPP
#define POLYMG_MGRUN_HPP

#include "polymg/lfa.hpp"
#include "polymg/poly.hpp"
#include "polymg/stencil.hpp"

#include <array>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace polymg
{

/// Values at the interior lattice points, x fastest; the boundary is an implicit zero halo.
using GridVector = std::vector<double>;

/// A structured grid on the unit square/cube with Dirichlet boundary and a
/// constant stencil applied matrix-free.
class GridLevel
{
public:
  /// `cells` per axis; the level holds cells - 1 interior points per axis.
  GridLevel(Stencil stencil, std::vector<int> cells);

  const Stencil &stencil() const { return stencil_; }
  int dimension() const { return stencil_.dimension(); }
  int cells(int axis) const { return cells_[static_cast<std::size_t>(axis)]; }
  int interior(int axis) const { return axis < dimension() ? cells(axis) - 1 : 1; }
  std::size_t size() const { return size_; }
  double mesh_width(int axis) const { return stencil_.geometry().mesh_width(axis); }

  std::size_t index(int i, int j = 0, int l = 0) const
  {
    return (static_cast<std::size_t>(l) * static_cast<std::size_t>(interior(1)) + static_cast<std::size_t>(j)) *
               static_cast<std::size_t>(interior(0)) +
           static_cast<std::size_t>(i);
  }

  /// Per-point diagonal of the preconditioner R0^{-1}. Near the boundary only
  /// interior neighbours enter the l1 row sum.
  GridVector preconditioner_diagonal(PreconditionerKind p) const;

  GridVector zeros() const { return GridVector(size_, 0.0); }

private:
  Stencil stencil_;
  std::vector<int> cells_;
  std::size_t size_ = 0;
};

/// out = A u with zero Dirichlet halo.
void apply_operator(const GridLevel &level, const GridVector &u, GridVector &out);
GridVector apply_operator(const GridLevel &level, const GridVector &u);

/// True when the level can be coarsened by 2^k (every axis has >= 2^k + 1
/// interior points and the cell count is divisible by 2^k).
bool can_coarsen(const GridLevel &level, int k);

/// Multilinear interpolation with tensor hat weights (1 - |j|/2^k).
GridVector prolongate(const GridLevel &coarse, const GridLevel &fine, int k, const GridVector &c);
/// Adjoint of prolongate scaled by 2^{-kd}.
GridVector restrict_to_coarse(const GridLevel &fine, const GridLevel &coarse, int k, const GridVector &f);

/// Constant stencil of P^T A P / 2^{kd} on the 2^k-coarser lattice. Exact for
/// every interior coarse row since the coarse hats never touch the boundary.
Stencil galerkin_coarse_stencil(const Stencil &fine, int k);

/// Returns R r = q(R0 A) R0 r via the family's operator recurrence.
GridVector apply_smoother(const GridLevel &level, const SmootherSpec &spec, PreconditionerKind p,
                          const GridVector &r);

/// Direct solver for the coarsest level: banded Cholesky in lexicographic order,
/// or conjugate gradients to a relative residual of 1e-12 when the band is too wide.
class CoarseSolver
{
public:
  explicit CoarseSolver(const GridLevel &level);
  GridVector solve(const GridVector &rhs) const;
  bool is_direct() const { return direct_; }

private:
  const GridLevel *level_;
  bool direct_ = false;
  std::size_t n_ = 0;
  std::size_t band_ = 0;
  std::vector<double> factor_; // row-major lower band, n_ x (band_ + 1)
};

enum class CycleKind
{
  TwoGrid,
  V,
  W
};

std::string to_string(CycleKind c);
CycleKind cycle_kind_from_string(const std::string &name);

struct CycleSpec
{
  CycleKind kind = CycleKind::V;
  int k = 1;
  /// Number of levels including the finest; 0 = as many as the grid allows.
  int levels = 0;
  int pre = 1;
  int post = 1;
  SmootherSpec smoother;
  PreconditionerKind preconditioner = PreconditionerKind::Jacobi;
  CoarseOperatorMode coarse_mode = CoarseOperatorMode::Rediscretized;

  void validate() const;
};

class HierarchyError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Level hierarchy plus coarsest solver for one CycleSpec.
class Multigrid
{
public:
  Multigrid(const CycleSpec &spec, const GridLevel &fine);

  const CycleSpec &spec() const { return spec_; }
  int num_levels() const { return static_cast<int>(levels_.size()); }
  const GridLevel &level(int l) const { return levels_[static_cast<std::size_t>(l)]; }

  /// One iteration on A u = f.
  void cycle(GridVector &u, const GridVector &f) const;

private:
  void cycle_at(int l, GridVector &u, const GridVector &f) const;
  void smooth(int l, GridVector &u, const GridVector &f, int steps) const;

  CycleSpec spec_;
  std::vector<GridLevel> levels_;
  std::unique_ptr<CoarseSolver> coarse_;
};

GridVector run_cycle(const CycleSpec &spec, const GridLevel &fine, const GridVector &rhs, const GridVector &u0);

class DivergenceError : public std::runtime_error
{
public:
  DivergenceError(const std::string &what, int iteration) : std::runtime_error(what), iteration(iteration) {}
  int iteration;
};

struct RateResult
{
  double rate = 0.0;
  std::vector<double> ratios; ///< ||e_{m+1}||_A / ||e_m||_A per iteration
  std::uint64_t seed = 0;
  int levels = 0;
};

/// Asymptotic rate of the homogeneous problem from a seeded random start.
RateResult measure_asymptotic_rate(const CycleSpec &spec, const GridLevel &fine, int iterations,
                                   std::uint64_t seed = 20140601);

} // namespace polymg

#endif
