#include "polymg/symbol.hpp"

#include "search.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace polymg
{

namespace
{

constexpr double pi = std::numbers::pi;

// Lattice over Theta_h with N samples per axis shifted by `offset` steps.
std::vector<Frequency> lattice(const GridGeometry &g, int n, double offset)
{
  const int d = g.dimension();
  std::size_t total = 1;
  for (int a = 0; a < d; ++a)
    total *= static_cast<std::size_t>(n);
  std::vector<Frequency> out;
  out.reserve(total);
  std::array<int, 3> idx{0, 0, 0};
  for (std::size_t flat = 0; flat < total; ++flat)
  {
    std::size_t rem = flat;
    Frequency f;
    f.dim = d;
    for (int a = d - 1; a >= 0; --a)
    {
      idx[static_cast<std::size_t>(a)] = static_cast<int>(rem % static_cast<std::size_t>(n));
      rem /= static_cast<std::size_t>(n);
    }
    for (int a = 0; a < d; ++a)
    {
      const double pos = -0.5 * n + idx[static_cast<std::size_t>(a)] + offset;
      f[a] = pos * 2.0 * pi / (n * g.mesh_width(a));
    }
    out.push_back(f);
  }
  return out;
}

// Interior of the low box, relative to the scaled coordinate theta_d h_d 2^k / pi.
bool strictly_inside_low_box(const GridGeometry &g, int k, const Frequency &f, double slack)
{
  const double m = std::ldexp(1.0, k);
  for (int a = 0; a < f.dim; ++a)
    if (std::abs(f[a] * g.mesh_width(a) * m / pi) >= 1.0 - slack)
      return false;
  return true;
}

} // namespace

Frequency make_frequency(std::initializer_list<double> components)
{
  if (components.size() < 1 || components.size() > 3)
    throw std::invalid_argument("frequency must have 1 to 3 components");
  Frequency f;
  f.dim = static_cast<int>(components.size());
  int a = 0;
  for (double c : components)
    f[a++] = c;
  return f;
}

void FrequencySampling::validate() const
{
  if (samples_per_axis < 1)
    throw std::invalid_argument("samples_per_axis must be positive");
  if (!(offset_fraction > 0.0 && offset_fraction < 1.0))
    throw std::invalid_argument("offset_fraction must lie in (0, 1)");
}

std::complex<double> evaluate_symbol(const Stencil &s, const Frequency &f)
{
  const GridGeometry &g = s.geometry();
  // Written as sum c_j + sum c_j (e^{i phi} - 1) so that row-sum-zero
  // operators keep full relative accuracy near theta = 0.
  double re = 0.0;
  double im = 0.0;
  for (const auto &e : s.entries())
  {
    double phase = 0.0;
    for (int a = 0; a < g.dimension(); ++a)
      phase += f[a] * e.offset[static_cast<std::size_t>(a)] * g.mesh_width(a);
    const double half = std::sin(0.5 * phase);
    re += e.coefficient * -2.0 * half * half;
    im += e.coefficient * std::sin(phase);
  }
  return {s.row_sum() + re, im};
}

double preconditioner_symbol(const Stencil &s, PreconditionerKind p)
{
  switch (p)
  {
  case PreconditionerKind::Jacobi:
    return s.center();
  case PreconditionerKind::L1Jacobi:
    return s.center() + s.off_center_abs_sum();
  }
  throw std::invalid_argument("unknown preconditioner kind");
}

double preconditioned_symbol(const Stencil &s, PreconditionerKind p, const Frequency &f)
{
  const std::complex<double> a = evaluate_symbol(s, f);
  const double scale = std::max(1.0, std::abs(s.center()));
  if (std::abs(a.imag()) > 1e-12 * scale)
    throw NonRealSymbol("stencil symbol is not real (imaginary part " + std::to_string(a.imag()) +
                        "); preconditioned symbols require a symmetric stencil");
  return a.real() / preconditioner_symbol(s, p);
}

bool is_low_frequency(const GridGeometry &g, int k, const Frequency &f)
{
  const double m = std::ldexp(1.0, k);
  for (int a = 0; a < f.dim; ++a)
  {
    // Compare in units of the sampling step to keep the half-open boundary exact.
    const double scaled = f[a] * g.mesh_width(a) * m / pi;
    if (!(scaled > -1.0 + 1e-12 && scaled <= 1.0 + 1e-12))
      return false;
  }
  return true;
}

FrequencySplit sample_frequencies(const GridGeometry &g, int k, const FrequencySampling &s)
{
  s.validate();
  if (k < 0)
    throw std::invalid_argument("coarsening exponent must be non-negative");
  const int m = 1 << k;
  if (s.samples_per_axis % m != 0)
    throw std::invalid_argument("samples_per_axis (" + std::to_string(s.samples_per_axis) +
                                ") must be a multiple of 2^k = " + std::to_string(m));
  FrequencySplit split;
  for (const auto &f : lattice(g, s.samples_per_axis, s.offset_fraction))
    (is_low_frequency(g, k, f) ? split.low : split.high).push_back(f);
  return split;
}

LambdaBounds lambda_bounds(const Stencil &s, PreconditionerKind p, int k,
                           const FrequencySampling &sampling)
{
  sampling.validate();
  const GridGeometry &g = s.geometry();
  const int d = g.dimension();
  const int n = sampling.samples_per_axis;
  const auto points = lattice(g, n, 0.0);

  auto clamp_to_domain = [&](Frequency &f) {
    for (int a = 0; a < d; ++a)
    {
      const double lim = pi / g.mesh_width(a);
      f[a] = std::clamp(f[a], -lim, lim);
    }
  };
  auto project_high = [&](Frequency &f) {
    clamp_to_domain(f);
    return !strictly_inside_low_box(g, k, f, 1e-13);
  };
  auto project_all = [&](Frequency &f) {
    clamp_to_domain(f);
    return true;
  };
  auto value = [&](const Frequency &f) { return std::abs(preconditioned_symbol(s, p, f)); };

  // Seeds: best few lattice points for each extremum.
  struct Scored
  {
    double v;
    Frequency f;
  };
  std::vector<Scored> high, all;
  for (const auto &f : points)
  {
    const double x = preconditioned_symbol(s, p, f);
    if (!strictly_inside_low_box(g, k, f, 1e-13))
    {
      if (x <= 0.0)
        throw std::domain_error("preconditioned symbol is not positive on the high frequencies; "
                                "lambda bounds require an SPD operator");
      high.push_back({std::abs(x), f});
    }
    all.push_back({std::abs(x), f});
  }
  if (high.empty())
    throw std::invalid_argument("no high frequencies sampled; increase samples_per_axis");

  const double step0 = 2.0 * pi / n;
  const int seeds = 4;
  auto polish = [&](std::vector<Scored> &pool, bool maximize,
                    const std::function<bool(Frequency &)> &project) {
    auto cmp = [&](const Scored &a, const Scored &b) { return maximize ? a.v > b.v : a.v < b.v; };
    const std::size_t count = std::min<std::size_t>(seeds, pool.size());
    std::partial_sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(count), pool.end(), cmp);
    double best = pool.front().v;
    const double sign = maximize ? 1.0 : -1.0;
    for (std::size_t i = 0; i < count; ++i)
    {
      double v = 0.0;
      // Steps are in theta units; the smallest mesh width bounds the domain.
      detail::compass_maximize([&](const Frequency &f) { return sign * value(f); }, pool[i].f,
                               step0 / g.mesh_width(0), 1e-13 / g.mesh_width(0), project, &v);
      v *= sign;
      best = maximize ? std::max(best, v) : std::min(best, v);
    }
    return best;
  };

  LambdaBounds b;
  b.lambda0 = polish(high, false, project_high);
  b.lambda1 = polish(high, true, project_high);
  b.lambda1_all = polish(all, true, project_all);
  if (std::abs(b.lambda1_all - b.lambda1) > 1e-9 * std::max(1.0, b.lambda1))
    throw std::domain_error("symbol maximum lies in the low frequencies (lambda1 over all = " +
                            std::to_string(b.lambda1_all) + ", over high = " +
                            std::to_string(b.lambda1) + ")");
  return b;
}

} // namespace polymg
