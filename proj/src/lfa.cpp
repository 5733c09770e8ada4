#include "polymg/lfa.hpp"

#include "search.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace polymg
{

namespace
{

constexpr double pi = std::numbers::pi;

int block_size(int k, int dim) { return 1 << (k * dim); }

// Dirichlet-kernel ratio (1/m) (sin(m t/2) / sin(t/2))^2 with its limit m at t = 0.
double hat_factor(double t, int m)
{
  const double s = std::sin(0.5 * t);
  if (std::abs(s) < 1e-12)
    return m;
  const double r = std::sin(0.5 * m * t) / s;
  return r * r / m;
}

// Factor-2 linear-FEM inclusion on the triangular lattice (neighbours (+-1,0), (0,+-1), +-(1,1)).
double tri_factor2(double t1, double t2) { return 1.0 + std::cos(t1) + std::cos(t2) + std::cos(t1 + t2); }

} // namespace

std::string to_string(CoarseOperatorMode m)
{
  return m == CoarseOperatorMode::Galerkin ? "galerkin" : "redisc";
}

CoarseOperatorMode coarse_mode_from_string(const std::string &name)
{
  if (name == "galerkin")
    return CoarseOperatorMode::Galerkin;
  if (name == "redisc" || name == "rediscretized")
    return CoarseOperatorMode::Rediscretized;
  throw std::invalid_argument("unknown coarse operator mode '" + name + "' (expected galerkin|redisc)");
}

std::string to_string(PreconditionerKind p)
{
  return p == PreconditionerKind::Jacobi ? "jacobi" : "l1jacobi";
}

PreconditionerKind preconditioner_from_string(const std::string &name)
{
  if (name == "jacobi")
    return PreconditionerKind::Jacobi;
  if (name == "l1jacobi" || name == "l1")
    return PreconditionerKind::L1Jacobi;
  throw std::invalid_argument("unknown preconditioner '" + name + "' (expected jacobi|l1jacobi)");
}

void TwoGridConfig::validate() const
{
  smoother.validate();
  if (k < 1)
    throw std::invalid_argument("two-grid analysis needs k >= 1");
  if (nu1 < 0 || nu2 < 0 || nu1 + nu2 < 1)
    throw std::invalid_argument("smoothing steps must satisfy nu1, nu2 >= 0 and nu1 + nu2 >= 1");
  if (block_size(k, stencil.dimension()) > 512)
    throw std::invalid_argument("harmonic block larger than 512");
  sampling.validate();
}

double smoother_symbol(const SmootherSpec &spec, double xtilde) { return error_poly(spec, xtilde); }

double smoothing_factor(const SmoothingConfig &cfg, int iterations)
{
  if (iterations < 1)
    throw std::invalid_argument("smoothing iterations must be positive");
  const LambdaBounds b = lambda_bounds(cfg.stencil, cfg.preconditioner, cfg.k, cfg.sampling);
  return std::pow(max_abs_error_poly(cfg.smoother, b.lambda0, b.lambda1), iterations);
}

double smoothing_factor_sampled(const SmoothingConfig &cfg, int iterations)
{
  if (iterations < 1)
    throw std::invalid_argument("smoothing iterations must be positive");
  const auto split = sample_frequencies(cfg.stencil.geometry(), cfg.k, cfg.sampling);
  double best = 0.0;
  for (const auto &f : split.high)
  {
    const double x = preconditioned_symbol(cfg.stencil, cfg.preconditioner, f);
    best = std::max(best, std::abs(smoother_symbol(cfg.smoother, x)));
  }
  return std::pow(best, iterations);
}

double prolongation_symbol(const Frequency &theta, int k, const GridGeometry &g)
{
  if (k < 0)
    throw std::invalid_argument("coarsening exponent must be non-negative");
  if (g.is_triangular())
  {
    double v = 1.0;
    for (int l = 0; l < k; ++l)
    {
      const double s = std::ldexp(g.mesh_width(0), l);
      v *= tri_factor2(theta[0] * s, theta[1] * s);
    }
    return v;
  }
  const int m = 1 << k;
  double v = 1.0;
  for (int a = 0; a < g.dimension(); ++a)
    v *= hat_factor(theta[a] * g.mesh_width(a), m);
  return v;
}

double prolongation_symbol_direct(const Frequency &theta, int k, const GridGeometry &g)
{
  const int m = 1 << k;
  const double h = g.mesh_width(0);
  if (g.is_triangular())
  {
    double v = 0.0;
    for (int i = -m; i <= m; ++i)
      for (int j = -m; j <= m; ++j)
      {
        const double x = static_cast<double>(i) / m, y = static_cast<double>(j) / m;
        const double w = std::max(0.0, 1.0 - std::max({std::abs(x), std::abs(y), std::abs(x - y)}));
        v += w * std::cos((theta[0] * i + theta[1] * j) * h);
      }
    return v;
  }
  double v = 1.0;
  for (int a = 0; a < g.dimension(); ++a)
  {
    double axis = 0.0;
    for (int i = -m; i <= m; ++i)
      axis += (1.0 - std::abs(i) / static_cast<double>(m)) * std::cos(theta[a] * i * g.mesh_width(a));
    v *= axis;
  }
  return v;
}

Frequency wrap_frequency(const Frequency &f, const GridGeometry &g)
{
  Frequency out = f;
  for (int a = 0; a < f.dim; ++a)
  {
    const double period = 2.0 * pi / g.mesh_width(a);
    const double half = 0.5 * period;
    double t = std::fmod(f[a] + half, period);
    if (t <= 0.0)
      t += period;
    // t in (0, period]; shift back to (-half, half].
    out[a] = t - half;
    if (std::abs(out[a] + half) < 1e-12 * half)
      out[a] = half;
  }
  return out;
}

std::vector<Frequency> harmonics_of(const Frequency &base, int k, const GridGeometry &g)
{
  const int d = g.dimension();
  const int m = 1 << k;
  const int n = block_size(k, d);
  std::vector<Frequency> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int idx = 0; idx < n; ++idx)
  {
    Frequency f = base;
    int rem = idx;
    for (int a = d - 1; a >= 0; --a)
    {
      const int alpha = rem % m;
      rem /= m;
      f[a] += 2.0 * pi * alpha / (m * g.mesh_width(a));
    }
    out.push_back(wrap_frequency(f, g));
  }
  return out;
}

HarmonicBlock build_harmonic_block(const TwoGridConfig &cfg, const Frequency &theta0)
{
  const GridGeometry &g = cfg.stencil.geometry();
  const double md = block_size(cfg.k, g.dimension());
  HarmonicBlock b;
  b.base = theta0;
  b.harmonics = harmonics_of(theta0, cfg.k, g);
  const double dinv = 1.0 / preconditioner_symbol(cfg.stencil, cfg.preconditioner);
  for (const auto &f : b.harmonics)
  {
    const std::complex<double> a = evaluate_symbol(cfg.stencil, f);
    if (std::abs(a.imag()) > 1e-12 * std::max(1.0, cfg.stencil.center()))
      throw NonRealSymbol("two-grid analysis requires a symmetric stencil");
    b.fine_symbol.push_back(a.real());
    b.smoother_symbol.push_back(smoother_symbol(cfg.smoother, a.real() * dinv));
    b.transfer.push_back(prolongation_symbol(f, cfg.k, g) / md);
  }
  return b;
}

double coarse_symbol(const HarmonicBlock &block, CoarseOperatorMode mode, const Stencil &s, int k)
{
  double v = 0.0;
  if (mode == CoarseOperatorMode::Galerkin)
  {
    for (std::size_t a = 0; a < block.harmonics.size(); ++a)
      v += block.transfer[a] * block.transfer[a] * block.fine_symbol[a];
  }
  else
  {
    v = evaluate_symbol(rediscretize(s, 1 << k), block.base).real();
  }
  if (!(std::abs(v) >= 1e-14))
    throw SingularCoarseSymbol("coarse symbol vanishes at the base frequency; "
                               "use a sampling offset that avoids theta = 0");
  return v;
}

ComplexMatrix coarse_correction_block(const HarmonicBlock &block)
{
  const int n = static_cast<int>(block.harmonics.size());
  ComplexMatrix c = ComplexMatrix::identity(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      c(i, j) -= block.transfer[static_cast<std::size_t>(i)] * block.transfer[static_cast<std::size_t>(j)] *
                 block.fine_symbol[static_cast<std::size_t>(j)] / block.coarse_symbol;
  return c;
}

ComplexMatrix two_grid_block(const TwoGridConfig &cfg, const Frequency &theta0)
{
  HarmonicBlock b = build_harmonic_block(cfg, theta0);
  b.coarse_symbol = coarse_symbol(b, cfg.coarse_mode, cfg.stencil, cfg.k);
  ComplexMatrix c = coarse_correction_block(b);
  const int n = c.rows();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      c(i, j) *= std::pow(b.smoother_symbol[static_cast<std::size_t>(i)], cfg.nu2) *
                 std::pow(b.smoother_symbol[static_cast<std::size_t>(j)], cfg.nu1);
  return c;
}

TwoGridResult rho_two_grid(const TwoGridConfig &cfg)
{
  cfg.validate();
  const GridGeometry &g = cfg.stencil.geometry();
  const int d = g.dimension();
  const auto split = sample_frequencies(g, cfg.k, cfg.sampling);
  auto rho_at = [&](const Frequency &f) { return spectral_radius(two_grid_block(cfg, f)); };

  struct Scored
  {
    double v;
    Frequency f;
  };
  std::vector<Scored> scored;
  scored.reserve(split.low.size());
  for (const auto &f : split.low)
    scored.push_back({rho_at(f), f});

  TwoGridResult r;
  r.blocks = scored.size();
  auto top = std::max_element(scored.begin(), scored.end(), [](auto &a, auto &b) { return a.v < b.v; });
  r.rho = r.rho_sampled = top->v;
  r.argmax = top->f;
  if (!cfg.sampling.refine)
    return r;

  // Pattern search inside the closed low box, kept off a tiny neighbourhood of
  // theta = 0 where both symbols vanish.
  const double m = 1 << cfg.k;
  auto project = [&](Frequency &f) {
    double inf = 0.0;
    for (int a = 0; a < d; ++a)
    {
      const double lim = pi / (m * g.mesh_width(a));
      f[a] = std::clamp(f[a], -lim, lim);
      inf = std::max(inf, std::abs(f[a]) * g.mesh_width(a) / pi);
    }
    return inf >= 1e-6;
  };
  const std::size_t seeds = std::min<std::size_t>(3, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(seeds), scored.end(),
                    [](auto &a, auto &b) { return a.v > b.v; });
  const double step = 2.0 * pi / (cfg.sampling.samples_per_axis * g.mesh_width(0));
  for (std::size_t i = 0; i < seeds; ++i)
  {
    double v = 0.0;
    const Frequency f = detail::compass_maximize(rho_at, scored[i].f, step, step * 1e-5, project, &v, 400);
    if (v > r.rho)
    {
      r.rho = v;
      r.argmax = f;
    }
  }
  return r;
}

TwoGridOptimum optimal_lambda0_two_grid(const TwoGridConfig &cfg, double seed_lambda0, double tolerance)
{
  const double l1 = cfg.smoother.lambda1;
  if (!(seed_lambda0 > 0.0 && seed_lambda0 < l1))
    throw std::invalid_argument("seed lambda0 must lie in (0, lambda1)");
  if (!(tolerance > 0.0))
    throw std::invalid_argument("tolerance must be positive");

  TwoGridOptimum out;
  out.seed_lambda0 = seed_lambda0;
  auto eval = [&](double l0) {
    TwoGridConfig c = cfg;
    c.smoother.lambda0 = l0;
    ++out.evaluations;
    return rho_two_grid(c).rho;
  };
  out.seed_rho = eval(seed_lambda0);

  // Expand geometrically around the seed until the minimum is bracketed.
  const double lo_limit = 1e-6 * l1, hi_limit = l1 * (1.0 - 1e-6);
  double a = seed_lambda0, b = seed_lambda0, fb = out.seed_rho;
  double c = seed_lambda0;
  double fa = fb, fc = fb;
  bool bracketed = false;
  for (int it = 0; it < 40 && !bracketed; ++it)
  {
    const double factor = 1.0 + 0.15 * (it + 1);
    const double na = std::max(lo_limit, b / factor);
    const double nc = std::min(hi_limit, b * factor);
    fa = eval(na);
    fc = eval(nc);
    a = na;
    c = nc;
    if (fa > fb && fc > fb)
      bracketed = true;
    else if (fa < fb && fa <= fc)
    {
      b = na;
      fb = fa;
    }
    else if (fc < fb)
    {
      b = nc;
      fb = fc;
    }
    else
      bracketed = true; // flat: the current point is as good as its neighbours
    if (!bracketed && (a <= lo_limit || c >= hi_limit))
      break;
  }

  if (bracketed)
  {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = c - gr * (c - a), x2 = a + gr * (c - a);
    double f1 = eval(x1), f2 = eval(x2);
    while (c - a > tolerance)
    {
      if (f1 <= f2)
      {
        c = x2;
        x2 = x1;
        f2 = f1;
        x1 = c - gr * (c - a);
        f1 = eval(x1);
      }
      else
      {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + gr * (c - a);
        f2 = eval(x2);
      }
    }
    out.lambda0 = f1 <= f2 ? x1 : x2;
    out.rho = std::min(f1, f2);
    if (fb < out.rho)
    {
      out.lambda0 = b;
      out.rho = fb;
    }
  }
  else
  {
    out.fallback = "objective not bracketed around the seed; used a 200-point scan over (0, lambda1)";
    out.lambda0 = seed_lambda0;
    out.rho = out.seed_rho;
    for (int i = 1; i <= 200; ++i)
    {
      const double l0 = l1 * i / 201.0;
      const double v = eval(l0);
      if (v < out.rho)
      {
        out.rho = v;
        out.lambda0 = l0;
      }
    }
  }
  if (out.seed_rho <= out.rho)
  {
    out.lambda0 = seed_lambda0;
    out.rho = out.seed_rho;
  }
  return out;
}

} // namespace polymg
