#include <doctest.h>

#include "oracles.hpp"
#include "polymg/lfa.hpp"
#include "polymg/mgrun.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace polymg;

namespace
{

constexpr double pi = std::numbers::pi;

GridLevel fd_level(int d, int n)
{
  return GridLevel(build_fd_laplace(GridGeometry::rectangular(d, 1.0 / n)), std::vector<int>(d, n));
}

GridVector random_vector(std::mt19937_64 &rng, std::size_t n)
{
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  GridVector v(n);
  for (auto &x : v)
    x = u(rng);
  return v;
}

double dot(const GridVector &a, const GridVector &b)
{
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += a[i] * b[i];
  return s;
}

// Row-by-row assembly of the truncated stencil operator.
std::vector<double> assemble(const GridLevel &level)
{
  const int d = level.dimension();
  const std::size_t n = level.size();
  std::vector<double> a(n * n, 0.0);
  int nz = d == 3 ? level.interior(2) : 1;
  for (int l = 0; l < nz; ++l)
    for (int j = 0; j < level.interior(1); ++j)
      for (int i = 0; i < level.interior(0); ++i)
        for (const auto &e : level.stencil().entries())
        {
          int p = i + e.offset[0], q = j + e.offset[1], r = l + e.offset[2];
          if (p < 0 || q < 0 || r < 0 || p >= level.interior(0) || q >= level.interior(1) || r >= nz)
            continue;
          a[level.index(i, j, l) * n + level.index(p, q, r)] += e.coefficient;
        }
  return a;
}

} // namespace

TEST_CASE("matrix-free operator equals the assembled matrix")
{
  std::mt19937_64 rng(1);
  std::vector<GridLevel> levels{fd_level(2, 8), fd_level(3, 6)};
  std::vector<StencilEntry> nine{{{0, 0, 0}, 8.0}};
  for (int i = -1; i <= 1; ++i)
    for (int j = -1; j <= 1; ++j)
      if (i || j)
        nine.push_back({{i, j, 0}, -1.0 - 0.1 * i});
  levels.emplace_back(Stencil(GridGeometry::rectangular(2, 1.0 / 7), nine), std::vector<int>{7, 7});
  for (const auto &level : levels)
  {
    auto a = assemble(level);
    auto u = random_vector(rng, level.size());
    auto au = apply_operator(level, u);
    for (std::size_t i = 0; i < level.size(); ++i)
    {
      double s = 0.0;
      for (std::size_t j = 0; j < level.size(); ++j)
        s += a[i * level.size() + j] * u[j];
      CHECK(std::abs(au[i] - s) < 1e-10 * (1.0 + std::abs(s)));
    }
  }
}

TEST_CASE("smoother acts diagonally on the sine eigenbasis (7x7)")
{
  GridLevel level = fd_level(2, 8);
  for (auto fam : {SmootherFamily::Chebyshev, SmootherFamily::SA, SmootherFamily::BA1x})
    for (int deg : {0, 2, 5})
    {
      SmootherSpec spec{fam, deg, 0.15, 2.0};
      double d = level.stencil().center();
      for (int p = 1; p <= 7; ++p)
        for (int q = 1; q <= 7; ++q)
        {
          GridVector v = level.zeros();
          for (int j = 0; j < 7; ++j)
            for (int i = 0; i < 7; ++i)
              v[level.index(i, j)] = std::sin(p * pi * (i + 1) / 8) * std::sin(q * pi * (j + 1) / 8);
          double lam = evaluate_symbol(level.stencil(), make_frequency({p * pi, q * pi})).real();
          double factor = q_value(spec, lam / d) / d;
          auto rv = apply_smoother(level, spec, PreconditionerKind::Jacobi, v);
          double err = 0.0;
          for (std::size_t i = 0; i < v.size(); ++i)
            err = std::max(err, std::abs(rv[i] - factor * v[i]));
          CHECK(err < 1e-8 * std::max(1.0, std::abs(factor)));
        }
    }
}

TEST_CASE("restriction is the scaled adjoint of prolongation")
{
  std::mt19937_64 rng(2);
  for (int d : {2, 3})
    for (int k = 1; k <= (d == 2 ? 3 : 2); ++k)
    {
      int n = d == 2 ? 32 : 16;
      GridLevel fine = fd_level(d, n), coarse = fd_level(d, n >> k);
      auto c = random_vector(rng, coarse.size()), f = random_vector(rng, fine.size());
      double lhs = dot(prolongate(coarse, fine, k, c), f);
      double rhs = std::ldexp(1.0, k * d) * dot(c, restrict_to_coarse(fine, coarse, k, f));
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("Galerkin stencil reproduces the explicit triple product")
{
  struct Case
  {
    int d, n, k;
  };
  for (auto c : {Case{2, 16, 1}, Case{2, 16, 2}, Case{3, 8, 1}})
  {
    GridLevel fine = fd_level(c.d, c.n);
    GridLevel coarse(galerkin_coarse_stencil(fine.stencil(), c.k), std::vector<int>(c.d, c.n >> c.k));
    auto p = oracle::dense_matrix(fine.size(), coarse.size(),
                                  [&](const std::vector<double> &x) { return prolongate(coarse, fine, c.k, x); });
    auto a = assemble(fine);
    const std::size_t nf = fine.size(), nc = coarse.size();
    std::vector<double> ap(nf * nc, 0.0);
    for (std::size_t i = 0; i < nf; ++i)
      for (std::size_t l = 0; l < nf; ++l)
        if (a[i * nf + l] != 0.0)
          for (std::size_t j = 0; j < nc; ++j)
            ap[i * nc + j] += a[i * nf + l] * p[l * nc + j];
    auto ac = assemble(coarse);
    double scale = std::ldexp(1.0, -c.k * c.d), worst = 0.0;
    for (std::size_t i = 0; i < nc; ++i)
      for (std::size_t j = 0; j < nc; ++j)
      {
        double rap = 0.0;
        for (std::size_t l = 0; l < nf; ++l)
          rap += p[l * nc + i] * ap[l * nc + j];
        worst = std::max(worst, std::abs(scale * rap - ac[i * nc + j]));
      }
    CHECK(worst < 1e-9 * fine.stencil().center());
  }
}

TEST_CASE("coarse solver")
{
  std::mt19937_64 rng(3);
  for (auto level : {fd_level(2, 16), fd_level(3, 8)})
  {
    CoarseSolver solver(level);
    auto b = random_vector(rng, level.size());
    auto x = solver.solve(b);
    auto r = apply_operator(level, x);
    double err = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i)
      err = std::max(err, std::abs(r[i] - b[i]));
    CHECK(err < 1e-9);
  }
}

TEST_CASE("V-cycle error propagation is A-self-adjoint")
{
  std::mt19937_64 rng(4);
  for (auto fam : {SmootherFamily::Chebyshev, SmootherFamily::BA1x})
    for (int k : {1, 2})
    {
      GridLevel fine = fd_level(2, 32);
      CycleSpec spec;
      spec.k = k;
      spec.smoother = {fam, k == 1 ? 2 : 6, k == 1 ? 0.5 : 0.146, 2.0};
      Multigrid mg(spec, fine);
      auto zero = fine.zeros();
      auto x = random_vector(rng, fine.size()), y = random_vector(rng, fine.size());
      auto ex = x, ey = y;
      mg.cycle(ex, zero);
      mg.cycle(ey, zero);
      double lhs = dot(apply_operator(fine, ex), y), rhs = dot(apply_operator(fine, x), ey);
      CHECK(std::abs(lhs - rhs) < 1e-10 * std::abs(dot(apply_operator(fine, x), x)));
    }
}

TEST_CASE("rates: monotone A-norm, determinism, agreement with LFA")
{
  GridLevel fine = fd_level(2, 64);
  CycleSpec spec;
  spec.kind = CycleKind::TwoGrid;
  spec.pre = 1;
  spec.post = 0;
  spec.smoother = {SmootherFamily::Chebyshev, 2, 0.5, 2.0};
  auto a = measure_asymptotic_rate(spec, fine, 60);
  auto b = measure_asymptotic_rate(spec, fine, 60);
  CHECK(a.rate == b.rate);
  for (double r : a.ratios)
    CHECK(r <= 1.0);
  TwoGridConfig lfa{build_fd_laplace(GridGeometry::rectangular(2, 1.0)),
                    PreconditionerKind::Jacobi,
                    spec.smoother,
                    1,
                    1,
                    0,
                    CoarseOperatorMode::Rediscretized,
                    {}};
  CHECK(std::abs(a.rate - rho_two_grid(lfa).rho) < 0.01);

  spec.kind = CycleKind::V;
  spec.post = 1;
  auto v = measure_asymptotic_rate(spec, fine, 30);
  for (double r : v.ratios)
    CHECK(r <= 1.0);
  CHECK(v.levels == 6);
  CHECK_THROWS_AS(measure_asymptotic_rate(spec, fine, 10), std::invalid_argument);
}

TEST_CASE("infeasible hierarchies and invalid specs")
{
  GridLevel fine = fd_level(2, 12);
  CycleSpec spec;
  spec.smoother = {SmootherFamily::Chebyshev, 2, 0.5, 2.0};
  spec.k = 2;
  spec.levels = 4;
  CHECK_THROWS_AS(Multigrid(spec, fine), HierarchyError);
  spec.levels = 0;
  spec.k = 3;
  CHECK_THROWS_AS(Multigrid(spec, fd_level(2, 6)), HierarchyError);
  spec.k = 1;
  spec.smoother = {SmootherFamily::BA1x, 2, 0.01, 2.0};
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  CHECK_THROWS_AS(GridLevel(build_fd_laplace(GridGeometry::rectangular(2, 0.1)), {16, 16}), std::invalid_argument);
}

TEST_CASE("l1-Jacobi diagonal counts interior neighbours only")
{
  GridLevel level = fd_level(2, 4);
  auto d = level.preconditioner_diagonal(PreconditionerKind::L1Jacobi);
  double h2 = 16.0;
  CHECK(d[level.index(0, 0)] == doctest::Approx(6.0 * h2).epsilon(1e-12));
  CHECK(d[level.index(1, 1)] == doctest::Approx(8.0 * h2).epsilon(1e-12));
}
