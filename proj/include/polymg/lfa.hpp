#ifndef POLYMG_LFA_HPP
#define POLYMG_LFA_HPP

#include "polymg/poly.hpp"
#include "polymg/smallmat.hpp"
#include "polymg/symbol.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace polymg
{

enum class CoarseOperatorMode
{
  Galerkin,
  Rediscretized
};

std::string to_string(CoarseOperatorMode m);
CoarseOperatorMode coarse_mode_from_string(const std::string &name);
std::string to_string(PreconditionerKind p);
PreconditionerKind preconditioner_from_string(const std::string &name);

class SingularCoarseSymbol : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Everything the smoothing analysis needs (no transfer operators).
struct SmoothingConfig
{
  Stencil stencil;
  PreconditionerKind preconditioner = PreconditionerKind::Jacobi;
  SmootherSpec smoother;
  int k = 1;
  FrequencySampling sampling;
};

struct TwoGridConfig
{
  Stencil stencil;
  PreconditionerKind preconditioner = PreconditionerKind::Jacobi;
  SmootherSpec smoother;
  int k = 1;
  int nu1 = 1; ///< pre-smoothing steps
  int nu2 = 0; ///< post-smoothing steps
  CoarseOperatorMode coarse_mode = CoarseOperatorMode::Galerkin;
  FrequencySampling sampling;

  void validate() const;
  SmoothingConfig smoothing_part() const { return {stencil, preconditioner, smoother, k, sampling}; }
};

/// e(x) evaluated at the symbol of X.
double smoother_symbol(const SmootherSpec &spec, double xtilde);

/// mu = sup over the high frequencies of |S(theta)|^iterations.
///
/// The high-frequency set is connected, so the image of X over it is exactly
/// [lambda0, lambda1] from lambda_bounds; the sup is taken over that interval.
double smoothing_factor(const SmoothingConfig &cfg, int iterations = 1);

/// max over the sampled high-frequency lattice (a lower estimate of mu).
double smoothing_factor_sampled(const SmoothingConfig &cfg, int iterations = 1);

/// Symbol of the natural (multi)linear inclusion of the 2^k-coarse space,
/// normalized as the plain stencil sum (value 2^{kd} at theta = 0).
double prolongation_symbol(const Frequency &theta, int k, const GridGeometry &g);

/// The same symbol computed directly from the coarse hat function sampled on the
/// fine lattice (independent of the factor-2 composition).
double prolongation_symbol_direct(const Frequency &theta, int k, const GridGeometry &g);

/// Wrap each component into (-pi/h_d, pi/h_d].
Frequency wrap_frequency(const Frequency &f, const GridGeometry &g);

/// The 2^{kd} frequencies coupled with a low frequency under 2^k coarsening.
/// transfer[a] is the prolongation column P(theta^a) / 2^{kd}; restriction is its
/// conjugate (full weighting, i.e. the adjoint scaled by 2^{-kd}).
struct HarmonicBlock
{
  Frequency base;
  std::vector<Frequency> harmonics;
  std::vector<double> fine_symbol;
  std::vector<double> smoother_symbol;
  std::vector<double> transfer;
  double coarse_symbol = 0.0;
};

std::vector<Frequency> harmonics_of(const Frequency &base, int k, const GridGeometry &g);

/// Fills harmonics, fine/smoother symbols and transfer column (not the coarse symbol).
HarmonicBlock build_harmonic_block(const TwoGridConfig &cfg, const Frequency &theta0);

/// Coarse symbol of a block for the chosen mode. Throws SingularCoarseSymbol below 1e-14.
double coarse_symbol(const HarmonicBlock &block, CoarseOperatorMode mode, const Stencil &s, int k);

/// I - P A_H^{-1} R A restricted to the harmonic block.
ComplexMatrix coarse_correction_block(const HarmonicBlock &block);

/// S^{nu2} C S^{nu1} on the harmonic block of theta0.
ComplexMatrix two_grid_block(const TwoGridConfig &cfg, const Frequency &theta0);

struct TwoGridResult
{
  double rho = 0.0;
  double rho_sampled = 0.0; ///< max over the lattice before refinement
  Frequency argmax;
  std::size_t blocks = 0;
};

/// rho_LFA = max over the low frequencies of the block spectral radius.
TwoGridResult rho_two_grid(const TwoGridConfig &cfg);

struct TwoGridOptimum
{
  double lambda0 = 0.0;
  double rho = 0.0;
  double seed_lambda0 = 0.0;
  double seed_rho = 0.0;
  int evaluations = 0;
  /// Set when golden-section bracketing failed and a 200-point scan was used.
  std::optional<std::string> fallback;
};

/// lambda0 minimizing rho_two_grid (golden section seeded at `seed_lambda0`).
TwoGridOptimum optimal_lambda0_two_grid(const TwoGridConfig &cfg, double seed_lambda0,
                                        double tolerance = 1e-4);

} // namespace polymg

#endif
