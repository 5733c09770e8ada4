#include "polymg/mgrun.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

namespace polymg
{

namespace
{

// Half-open range of p in [0, n) with p + o also in [0, n).
std::pair<int, int> shifted_range(int n, int o) { return {std::max(0, -o), std::min(n, n - o)}; }

double dot(const GridVector &a, const GridVector &b)
{
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += a[i] * b[i];
  return s;
}

void check_size(const GridLevel &level, const GridVector &v, const char *what)
{
  if (v.size() != level.size())
    throw std::invalid_argument(std::string(what) + ": vector length " + std::to_string(v.size()) +
                                " does not match level size " + std::to_string(level.size()));
}

// 1D interpolation: fine interior point i receives from coarse interior indices.
struct Tap
{
  int coarse[2];
  double weight[2];
};

std::vector<Tap> interpolation_taps(int fine_interior, int coarse_interior, int m)
{
  std::vector<Tap> taps(static_cast<std::size_t>(fine_interior));
  for (int i = 0; i < fine_interior; ++i)
  {
    const int x = i + 1; // lattice position
    const int left = x / m;
    const int t = x - left * m;
    Tap tap{{left - 1, left}, {1.0 - static_cast<double>(t) / m, static_cast<double>(t) / m}};
    for (int s = 0; s < 2; ++s)
      if (tap.coarse[s] < 0 || tap.coarse[s] >= coarse_interior || tap.weight[s] == 0.0)
      {
        tap.coarse[s] = -1;
        tap.weight[s] = 0.0;
      }
    taps[static_cast<std::size_t>(i)] = tap;
  }
  return taps;
}

template <class F> void for_each_tap(const GridLevel &fine, const GridLevel &coarse, int k, F &&f)
{
  const int m = 1 << k;
  const int d = fine.dimension();
  std::array<std::vector<Tap>, 3> taps;
  for (int a = 0; a < 3; ++a)
    taps[static_cast<std::size_t>(a)] =
        a < d ? interpolation_taps(fine.interior(a), coarse.interior(a), m) : std::vector<Tap>{Tap{{0, -1}, {1.0, 0.0}}};
  for (int l = 0; l < fine.interior(2); ++l)
    for (int j = 0; j < fine.interior(1); ++j)
      for (int i = 0; i < fine.interior(0); ++i)
      {
        const std::size_t fi = fine.index(i, j, l);
        const Tap &tx = taps[0][static_cast<std::size_t>(i)];
        const Tap &ty = taps[1][static_cast<std::size_t>(j)];
        const Tap &tz = taps[2][static_cast<std::size_t>(l)];
        for (int c = 0; c < 2; ++c)
        {
          if (tz.coarse[c] < 0)
            continue;
          for (int b = 0; b < 2; ++b)
          {
            if (ty.coarse[b] < 0)
              continue;
            for (int a = 0; a < 2; ++a)
            {
              if (tx.coarse[a] < 0)
                continue;
              f(fi, coarse.index(tx.coarse[a], ty.coarse[b], tz.coarse[c]), tx.weight[a] * ty.weight[b] * tz.weight[c]);
            }
          }
        }
      }
}

} // namespace

GridLevel::GridLevel(Stencil stencil, std::vector<int> cells) : stencil_(std::move(stencil)), cells_(std::move(cells))
{
  if (stencil_.geometry().is_triangular())
    throw std::invalid_argument("grid levels are rectangular only");
  const int d = stencil_.dimension();
  if (static_cast<int>(cells_.size()) != d)
    throw std::invalid_argument("cell counts must match the stencil dimension");
  size_ = 1;
  for (int a = 0; a < d; ++a)
  {
    if (cells_[static_cast<std::size_t>(a)] < 2)
      throw std::invalid_argument("each axis needs at least 2 cells");
    const double h = stencil_.geometry().mesh_width(a);
    if (std::abs(h * cells_[static_cast<std::size_t>(a)] - 1.0) > 1e-12)
      throw std::invalid_argument("stencil mesh width does not match the unit domain (h * cells != 1)");
    size_ *= static_cast<std::size_t>(interior(a));
  }
  cells_.resize(3, 2);
}

GridVector GridLevel::preconditioner_diagonal(PreconditionerKind p) const
{
  GridVector diag(size_, stencil_.center());
  if (p == PreconditionerKind::Jacobi)
    return diag;
  for (const auto &e : stencil_.entries())
  {
    if (e.offset == Offset{0, 0, 0})
      continue;
    const auto [z0, z1] = shifted_range(interior(2), e.offset[2]);
    const auto [y0, y1] = shifted_range(interior(1), e.offset[1]);
    const auto [x0, x1] = shifted_range(interior(0), e.offset[0]);
    for (int l = z0; l < z1; ++l)
      for (int j = y0; j < y1; ++j)
        for (int i = x0; i < x1; ++i)
          diag[index(i, j, l)] += std::abs(e.coefficient);
  }
  return diag;
}

void apply_operator(const GridLevel &level, const GridVector &u, GridVector &out)
{
  check_size(level, u, "apply_operator");
  out.assign(level.size(), 0.0);
  for (const auto &e : level.stencil().entries())
  {
    const auto [z0, z1] = shifted_range(level.interior(2), e.offset[2]);
    const auto [y0, y1] = shifted_range(level.interior(1), e.offset[1]);
    const auto [x0, x1] = shifted_range(level.interior(0), e.offset[0]);
    const std::ptrdiff_t shift = static_cast<std::ptrdiff_t>(level.index(0, 0, 0) + 0) +
                                 (static_cast<std::ptrdiff_t>(e.offset[2]) * level.interior(1) + e.offset[1]) *
                                     level.interior(0) +
                                 e.offset[0];
    const double c = e.coefficient;
    for (int l = z0; l < z1; ++l)
      for (int j = y0; j < y1; ++j)
      {
        const std::size_t row = level.index(0, j, l);
        double *o = out.data() + row;
        const double *src = u.data() + static_cast<std::ptrdiff_t>(row) + shift;
        for (int i = x0; i < x1; ++i)
          o[i] += c * src[i];
      }
  }
}

GridVector apply_operator(const GridLevel &level, const GridVector &u)
{
  GridVector out;
  apply_operator(level, u, out);
  return out;
}

bool can_coarsen(const GridLevel &level, int k)
{
  const int m = 1 << k;
  for (int a = 0; a < level.dimension(); ++a)
    if (level.cells(a) % m != 0 || level.cells(a) / m < 2 || level.interior(a) < m + 1)
      return false;
  return true;
}

GridVector prolongate(const GridLevel &coarse, const GridLevel &fine, int k, const GridVector &c)
{
  check_size(coarse, c, "prolongate");
  for (int a = 0; a < fine.dimension(); ++a)
    if (fine.cells(a) != coarse.cells(a) << k)
      throw std::invalid_argument("prolongate: levels are not 2^k apart");
  GridVector f = fine.zeros();
  for_each_tap(fine, coarse, k, [&](std::size_t fi, std::size_t ci, double w) { f[fi] += w * c[ci]; });
  return f;
}

GridVector restrict_to_coarse(const GridLevel &fine, const GridLevel &coarse, int k, const GridVector &f)
{
  check_size(fine, f, "restrict");
  for (int a = 0; a < fine.dimension(); ++a)
    if (fine.cells(a) != coarse.cells(a) << k)
      throw std::invalid_argument("restrict: levels are not 2^k apart");
  const double scale = std::ldexp(1.0, -k * fine.dimension());
  GridVector c = coarse.zeros();
  for_each_tap(fine, coarse, k, [&](std::size_t fi, std::size_t ci, double w) { c[ci] += scale * w * f[fi]; });
  return c;
}

Stencil galerkin_coarse_stencil(const Stencil &fine, int k)
{
  if (fine.geometry().is_triangular())
    throw std::invalid_argument("galerkin_coarse_stencil: rectangular grids only");
  const int m = 1 << k;
  const int d = fine.dimension();
  const int span = 2 * m - 1;
  int count = 1;
  for (int a = 0; a < d; ++a)
    count *= span;
  auto hat = [m](int s) { return 1.0 - std::abs(s) / static_cast<double>(m); };
  auto unpack = [&](int flat) {
    std::array<int, 3> v{0, 0, 0};
    for (int a = 0; a < d; ++a)
    {
      v[static_cast<std::size_t>(a)] = flat % span - (m - 1);
      flat /= span;
    }
    return v;
  };
  const double scale = std::ldexp(1.0, -k * d);
  std::map<Offset, double> acc;
  for (int sf = 0; sf < count; ++sf)
  {
    const auto s = unpack(sf);
    double ws = 1.0;
    for (int a = 0; a < d; ++a)
      ws *= hat(s[static_cast<std::size_t>(a)]);
    for (int tf = 0; tf < count; ++tf)
    {
      const auto t = unpack(tf);
      double wt = ws;
      for (int a = 0; a < d; ++a)
        wt *= hat(t[static_cast<std::size_t>(a)]);
      for (const auto &e : fine.entries())
      {
        Offset big{0, 0, 0};
        bool ok = true;
        for (int a = 0; a < d && ok; ++a)
        {
          // Coarse offset O with m O + t - s = o.
          const int v = e.offset[static_cast<std::size_t>(a)] - t[static_cast<std::size_t>(a)] +
                        s[static_cast<std::size_t>(a)];
          if (v % m != 0)
            ok = false;
          else
            big[static_cast<std::size_t>(a)] = v / m;
        }
        if (ok)
          acc[big] += scale * wt * e.coefficient;
      }
    }
  }
  const double tol = 1e-14 * std::abs(fine.center());
  std::vector<StencilEntry> entries;
  for (const auto &[o, c] : acc)
    if (std::abs(c) > tol || o == Offset{0, 0, 0})
      entries.push_back({o, c});
  return Stencil(fine.geometry().coarsened(m), std::move(entries));
}

GridVector apply_smoother(const GridLevel &level, const SmootherSpec &spec, PreconditionerKind p,
                          const GridVector &r)
{
  check_size(level, r, "apply_smoother");
  spec.validate();
  const GridVector diag = level.preconditioner_diagonal(p);
  const std::size_t n = r.size();
  GridVector rbar(n);
  for (std::size_t i = 0; i < n; ++i)
    rbar[i] = r[i] / diag[i];
  GridVector av;
  // X v = R0 A v
  auto apply_x = [&](const GridVector &v, GridVector &out) {
    apply_operator(level, v, av);
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      out[i] = av[i] / diag[i];
  };
  GridVector xv;

  switch (spec.family)
  {
  case SmootherFamily::Chebyshev:
  {
    const ChebCache cache(spec.lambda0, spec.lambda1, spec.degree + 1);
    GridVector prev(n, 0.0), cur(n);
    for (std::size_t i = 0; i < n; ++i)
      cur[i] = cache.zeta() * rbar[i];
    for (int j = 1; j <= spec.degree; ++j)
    {
      apply_x(cur, xv);
      const double w = cache.residual_weight(j), mom = cache.momentum_weight(j);
      for (std::size_t i = 0; i < n; ++i)
      {
        const double next = cur[i] + w * (rbar[i] - xv[i]) + mom * (cur[i] - prev[i]);
        prev[i] = cur[i];
        cur[i] = next;
      }
    }
    return cur;
  }
  case SmootherFamily::BA1x:
  {
    const auto rec = BA1xRecurrence::make(spec.lambda0, spec.lambda1);
    GridVector prev(n), cur(n);
    for (std::size_t i = 0; i < n; ++i)
      prev[i] = rec.p0 * rbar[i];
    if (spec.degree == 0)
      return prev;
    apply_x(rbar, xv);
    for (std::size_t i = 0; i < n; ++i)
      cur[i] = rec.p1_constant * rbar[i] + rec.p1_slope * xv[i];
    const double d2 = rec.delta * rec.delta;
    for (int j = 1; j < spec.degree; ++j)
    {
      apply_x(cur, xv);
      for (std::size_t i = 0; i < n; ++i)
      {
        const double next = cur[i] + d2 * (cur[i] - prev[i]) + rec.c * (rbar[i] - xv[i]);
        prev[i] = cur[i];
        cur[i] = next;
      }
    }
    return cur;
  }
  case SmootherFamily::SA:
  {
    // W_j and Q_j = (W_j(0) - W_j(X)) X^{-1} advanced together; see sa_sign.
    const double l1 = spec.lambda1;
    GridVector w_prev = rbar, w = rbar, q_prev(n, 0.0), q(n, 0.0);
    for (int j = 0; j <= spec.degree; ++j)
    {
      for (std::size_t i = 0; i < n; ++i)
      {
        const double q_next = -2.0 * q[i] - q_prev[i] - (4.0 / l1) * w[i];
        q_prev[i] = q[i];
        q[i] = q_next;
      }
      if (j == spec.degree)
        break;
      apply_x(w, xv);
      for (std::size_t i = 0; i < n; ++i)
      {
        const double w_next = 2.0 * (2.0 * xv[i] / l1 - w[i]) - w_prev[i];
        w_prev[i] = w[i];
        w[i] = w_next;
      }
    }
    const double s = sa_sign(spec.degree) / (2.0 * spec.degree + 3.0);
    for (auto &v : q)
      v *= s;
    return q;
  }
  }
  throw std::invalid_argument("unknown smoother family");
}

CoarseSolver::CoarseSolver(const GridLevel &level) : level_(&level), n_(level.size())
{
  std::ptrdiff_t band = 0;
  for (const auto &e : level.stencil().entries())
  {
    const std::ptrdiff_t flat =
        (static_cast<std::ptrdiff_t>(e.offset[2]) * level.interior(1) + e.offset[1]) * level.interior(0) + e.offset[0];
    band = std::max(band, std::abs(flat));
  }
  band_ = static_cast<std::size_t>(band);
  const double work = static_cast<double>(n_) * static_cast<double>(band_ + 1) * static_cast<double>(band_ + 1);
  if (work > 4e8)
    return;

  // Assemble the lower band: factor_[i * (b+1) + (j - i + b)] holds A(i, j), j <= i.
  const std::size_t w = band_ + 1;
  factor_.assign(n_ * w, 0.0);
  for (const auto &e : level.stencil().entries())
  {
    const std::ptrdiff_t flat =
        (static_cast<std::ptrdiff_t>(e.offset[2]) * level.interior(1) + e.offset[1]) * level.interior(0) + e.offset[0];
    if (flat > 0)
      continue;
    const auto [z0, z1] = shifted_range(level.interior(2), e.offset[2]);
    const auto [y0, y1] = shifted_range(level.interior(1), e.offset[1]);
    const auto [x0, x1] = shifted_range(level.interior(0), e.offset[0]);
    for (int l = z0; l < z1; ++l)
      for (int j = y0; j < y1; ++j)
        for (int i = x0; i < x1; ++i)
        {
          const std::size_t row = level.index(i, j, l);
          factor_[row * w + static_cast<std::size_t>(static_cast<std::ptrdiff_t>(band_) + flat)] = e.coefficient;
        }
  }
  const std::ptrdiff_t b = static_cast<std::ptrdiff_t>(band_);
  auto at = [&](std::ptrdiff_t i, std::ptrdiff_t j) -> double & {
    return factor_[static_cast<std::size_t>(i) * w + static_cast<std::size_t>(j - i + b)];
  };
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(n_);
  for (std::ptrdiff_t i = 0; i < n; ++i)
    for (std::ptrdiff_t j = std::max<std::ptrdiff_t>(0, i - b); j <= i; ++j)
    {
      double s = at(i, j);
      for (std::ptrdiff_t k = std::max<std::ptrdiff_t>(0, i - b); k < j; ++k)
        s -= at(i, k) * at(j, k);
      if (i == j)
      {
        if (!(s > 0.0))
          throw std::runtime_error("coarse operator is not positive definite");
        at(i, i) = std::sqrt(s);
      }
      else
        at(i, j) = s / at(j, j);
    }
  direct_ = true;
}

GridVector CoarseSolver::solve(const GridVector &rhs) const
{
  check_size(*level_, rhs, "coarse solve");
  if (direct_)
  {
    const std::ptrdiff_t b = static_cast<std::ptrdiff_t>(band_), n = static_cast<std::ptrdiff_t>(n_);
    const std::size_t w = band_ + 1;
    auto at = [&](std::ptrdiff_t i, std::ptrdiff_t j) {
      return factor_[static_cast<std::size_t>(i) * w + static_cast<std::size_t>(j - i + b)];
    };
    GridVector y = rhs;
    for (std::ptrdiff_t i = 0; i < n; ++i)
    {
      double s = y[static_cast<std::size_t>(i)];
      for (std::ptrdiff_t k = std::max<std::ptrdiff_t>(0, i - b); k < i; ++k)
        s -= at(i, k) * y[static_cast<std::size_t>(k)];
      y[static_cast<std::size_t>(i)] = s / at(i, i);
    }
    for (std::ptrdiff_t i = n - 1; i >= 0; --i)
    {
      double s = y[static_cast<std::size_t>(i)];
      for (std::ptrdiff_t k = i + 1; k <= std::min(n - 1, i + b); ++k)
        s -= at(k, i) * y[static_cast<std::size_t>(k)];
      y[static_cast<std::size_t>(i)] = s / at(i, i);
    }
    return y;
  }

  // Conjugate gradients.
  GridVector x = level_->zeros(), r = rhs, p = rhs, ap;
  const double r0 = std::sqrt(dot(r, r));
  if (r0 == 0.0)
    return x;
  double rr = r0 * r0;
  const std::size_t max_iter = 10 * n_ + 100;
  for (std::size_t it = 0; it < max_iter && std::sqrt(rr) > 1e-12 * r0; ++it)
  {
    apply_operator(*level_, p, ap);
    const double alpha = rr / dot(p, ap);
    for (std::size_t i = 0; i < n_; ++i)
    {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    const double rr_new = dot(r, r);
    const double beta = rr_new / rr;
    rr = rr_new;
    for (std::size_t i = 0; i < n_; ++i)
      p[i] = r[i] + beta * p[i];
  }
  if (std::sqrt(rr) > 1e-12 * r0)
    throw std::runtime_error("coarse CG did not reach 1e-12");
  return x;
}

std::string to_string(CycleKind c)
{
  switch (c)
  {
  case CycleKind::TwoGrid:
    return "tg";
  case CycleKind::V:
    return "v";
  case CycleKind::W:
    return "w";
  }
  return "?";
}

CycleKind cycle_kind_from_string(const std::string &name)
{
  if (name == "tg" || name == "twogrid")
    return CycleKind::TwoGrid;
  if (name == "v")
    return CycleKind::V;
  if (name == "w")
    return CycleKind::W;
  throw std::invalid_argument("unknown cycle '" + name + "' (expected tg|v|w)");
}

void CycleSpec::validate() const
{
  smoother.validate();
  if (k < 1)
    throw std::invalid_argument("coarsening exponent k must be >= 1");
  if (pre < 0 || post < 0 || pre + post < 1)
    throw std::invalid_argument("need pre, post >= 0 and pre + post >= 1");
  if (levels < 0 || levels == 1)
    throw std::invalid_argument("levels must be 0 (automatic) or >= 2");
  if (kind == CycleKind::TwoGrid && levels != 0 && levels != 2)
    throw std::invalid_argument("a two-grid cycle has exactly 2 levels");
  if (!is_convergent_smoother(smoother))
    throw std::invalid_argument("smoother is not convergent: max |e(x)| >= 1 on (0, lambda1]");
}

Multigrid::Multigrid(const CycleSpec &spec, const GridLevel &fine) : spec_(spec)
{
  spec_.validate();
  const int target = spec_.kind == CycleKind::TwoGrid ? 2 : spec_.levels;
  levels_.push_back(fine);
  while (target == 0 || num_levels() < target)
  {
    const GridLevel &cur = levels_.back();
    if (!can_coarsen(cur, spec_.k))
    {
      if (target == 0 && num_levels() >= 2)
        break;
      throw HierarchyError("cannot build " + std::to_string(std::max(target, 2)) + " levels with k = " +
                           std::to_string(spec_.k) + ": level " + std::to_string(num_levels() - 1) + " has " +
                           std::to_string(cur.cells(0)) + " cells per axis");
    }
    const int m = 1 << spec_.k;
    Stencil coarse = spec_.coarse_mode == CoarseOperatorMode::Galerkin ? galerkin_coarse_stencil(cur.stencil(), spec_.k)
                                                                        : rediscretize(cur.stencil(), m);
    std::vector<int> cells;
    for (int a = 0; a < cur.dimension(); ++a)
      cells.push_back(cur.cells(a) / m);
    levels_.emplace_back(std::move(coarse), std::move(cells));
  }
  coarse_ = std::make_unique<CoarseSolver>(levels_.back());
}

void Multigrid::smooth(int l, GridVector &u, const GridVector &f, int steps) const
{
  const GridLevel &lev = level(l);
  GridVector au;
  for (int s = 0; s < steps; ++s)
  {
    apply_operator(lev, u, au);
    for (std::size_t i = 0; i < u.size(); ++i)
      au[i] = f[i] - au[i];
    const GridVector c = apply_smoother(lev, spec_.smoother, spec_.preconditioner, au);
    for (std::size_t i = 0; i < u.size(); ++i)
      u[i] += c[i];
  }
}

void Multigrid::cycle_at(int l, GridVector &u, const GridVector &f) const
{
  if (l == num_levels() - 1)
  {
    u = coarse_->solve(f);
    return;
  }
  smooth(l, u, f, spec_.pre);
  GridVector r = apply_operator(level(l), u);
  for (std::size_t i = 0; i < r.size(); ++i)
    r[i] = f[i] - r[i];
  const GridVector rc = restrict_to_coarse(level(l), level(l + 1), spec_.k, r);
  GridVector ec = level(l + 1).zeros();
  const bool coarsest_next = l + 1 == num_levels() - 1;
  const int gamma = (spec_.kind == CycleKind::W && !coarsest_next) ? 2 : 1;
  for (int g = 0; g < gamma; ++g)
    cycle_at(l + 1, ec, rc);
  const GridVector ef = prolongate(level(l + 1), level(l), spec_.k, ec);
  for (std::size_t i = 0; i < u.size(); ++i)
    u[i] += ef[i];
  smooth(l, u, f, spec_.post);
}

void Multigrid::cycle(GridVector &u, const GridVector &f) const
{
  check_size(level(0), u, "cycle");
  check_size(level(0), f, "cycle");
  cycle_at(0, u, f);
}

GridVector run_cycle(const CycleSpec &spec, const GridLevel &fine, const GridVector &rhs, const GridVector &u0)
{
  const Multigrid mg(spec, fine);
  GridVector u = u0;
  mg.cycle(u, rhs);
  return u;
}

RateResult measure_asymptotic_rate(const CycleSpec &spec, const GridLevel &fine, int iterations, std::uint64_t seed)
{
  if (iterations < 30)
    throw std::invalid_argument("rate measurement needs at least 30 iterations");
  const Multigrid mg(spec, fine);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  GridVector u(fine.size());
  for (auto &v : u)
    v = dist(rng);
  const GridVector f = fine.zeros();
  auto a_norm = [&](const GridVector &v) { return std::sqrt(dot(v, apply_operator(fine, v))); };

  RateResult res;
  res.seed = seed;
  res.levels = mg.num_levels();
  double norm = a_norm(u);
  for (auto &v : u)
    v /= norm;
  for (int it = 0; it < iterations; ++it)
  {
    mg.cycle(u, f);
    norm = a_norm(u);
    res.ratios.push_back(norm);
    if (it >= 5 && norm > 1.0 + 1e-6)
      throw DivergenceError("iteration " + std::to_string(it) + " increased the A-norm error by factor " +
                                std::to_string(norm),
                            it);
    if (norm == 0.0)
      break;
    for (auto &v : u)
      v /= norm;
  }
  const std::size_t tail = std::min<std::size_t>(10, res.ratios.size());
  double log_sum = 0.0;
  for (std::size_t i = res.ratios.size() - tail; i < res.ratios.size(); ++i)
    log_sum += std::log(std::max(res.ratios[i], 1e-300));
  res.rate = std::exp(log_sum / static_cast<double>(tail));
  return res;
}

} // namespace polymg
