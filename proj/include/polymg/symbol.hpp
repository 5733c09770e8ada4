#ifndef POLYMG_SYMBOL_HPP
#define POLYMG_SYMBOL_HPP

#include "polymg/stencil.hpp"

#include <array>
#include <complex>
#include <stdexcept>
#include <vector>

namespace polymg
{

/// A Fourier frequency theta with components in (-pi/h_d, pi/h_d].
struct Frequency
{
  int dim = 2;
  std::array<double, 3> theta{0.0, 0.0, 0.0};

  double operator[](int axis) const { return theta[static_cast<std::size_t>(axis)]; }
  double &operator[](int axis) { return theta[static_cast<std::size_t>(axis)]; }
  bool operator==(const Frequency &) const = default;
};

Frequency make_frequency(std::initializer_list<double> components);

enum class PreconditionerKind
{
  Jacobi,
  L1Jacobi
};

/// Uniform lattice over Theta_h: sample i on axis d sits at
/// (-N/2 + i + offset_fraction) * 2 pi / (N h_d).
struct FrequencySampling
{
  int samples_per_axis = 64;
  double offset_fraction = 0.5;
  /// Polish the sampled extremum with a local pattern search (two-grid factors only).
  bool refine = true;

  void validate() const;
  bool operator==(const FrequencySampling &) const = default;
};

/// Thrown when a stencil expected to be symmetric produces a complex symbol.
class NonRealSymbol : public std::domain_error
{
public:
  using std::domain_error::domain_error;
};

/// sum_j c_j exp(i theta . x_j), x_j = offset_j * h.
std::complex<double> evaluate_symbol(const Stencil &s, const Frequency &f);

/// The scalar symbol of the diagonal preconditioner's inverse, i.e. of A^+.
double preconditioner_symbol(const Stencil &s, PreconditionerKind p);

/// Real symbol of X = [A^+]^{-1} A; throws NonRealSymbol if |Im| > 1e-12.
double preconditioned_symbol(const Stencil &s, PreconditionerKind p, const Frequency &f);

struct FrequencySplit
{
  std::vector<Frequency> low;
  std::vector<Frequency> high;
};

/// True when f lies in Theta_{2^k h} (half-open box, positive endpoint included).
bool is_low_frequency(const GridGeometry &g, int k, const Frequency &f);

FrequencySplit sample_frequencies(const GridGeometry &g, int k, const FrequencySampling &s);

struct LambdaBounds
{
  double lambda0 = 0.0;
  double lambda1 = 0.0;
  /// Max over all of Theta_h; must coincide with lambda1 for the operators shipped.
  double lambda1_all = 0.0;
};

/// Inf and sup of |X(theta)| over the (closed) high-frequency set.
///
/// The sweep uses a lattice without offset so the boundary of Theta_{2^k h}
/// is sampled, then polishes both extrema with a constrained compass search.
LambdaBounds lambda_bounds(const Stencil &s, PreconditionerKind p, int k,
                           const FrequencySampling &sampling = {});

} // namespace polymg

#endif
