#include "polymg/reproduce.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace polymg
{

const std::vector<std::string> &table_ids()
{
  static const std::vector<std::string> ids{"1", "2", "3", "4", "5", "5-3d", "6", "7"};
  return ids;
}

bool is_table_id(const std::string &id)
{
  const auto &ids = table_ids();
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

Json load_reference(const std::string &path)
{
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open reference file " + path);
  return Json::parse(in);
}

Json ReproduceOptions::to_json() const
{
  return {{"both_modes", both_modes},
          {"measure", measure},
          {"w_cycle", w_cycle},
          {"n2d", n2d},
          {"n3d", n3d},
          {"twogrid_iterations", twogrid_iterations},
          {"vcycle_iterations", vcycle_iterations},
          {"seed", seed},
          {"fixture_lambdas", fixture_lambdas},
          {"sampling", polymg::to_json(sampling)}};
}

ReproduceOptions ReproduceOptions::from_json(const Json &j)
{
  ReproduceOptions o;
  o.both_modes = j.value("both_modes", o.both_modes);
  o.measure = j.value("measure", o.measure);
  o.w_cycle = j.value("w_cycle", o.w_cycle);
  o.n2d = j.value("n2d", o.n2d);
  o.n3d = j.value("n3d", o.n3d);
  o.twogrid_iterations = j.value("twogrid_iterations", o.twogrid_iterations);
  o.vcycle_iterations = j.value("vcycle_iterations", o.vcycle_iterations);
  o.seed = j.value("seed", o.seed);
  o.fixture_lambdas = j.value("fixture_lambdas", o.fixture_lambdas);
  if (j.contains("sampling"))
    o.sampling = sampling_from_json(j.at("sampling"));
  return o;
}

bool Cell::within() const { return !reference || std::abs(value - *reference) <= tolerance; }

const Cell &ReproducedRow::cell(const std::string &column) const
{
  for (const auto &c : cells)
    if (c.column == column)
      return c;
  throw std::out_of_range("no column " + column);
}

std::string ReproducedTable::to_csv() const
{
  std::string out = "k";
  bool has_degree = std::find(columns.begin(), columns.end(), "degree") != columns.end();
  if (!has_degree)
    out += ",degree";
  for (const auto &c : columns)
    out += "," + c;
  out += "\n";
  for (const auto &r : rows)
  {
    out += std::to_string(r.k);
    if (!has_degree)
      out += "," + std::to_string(r.degree);
    for (const auto &c : r.cells)
      out += "," + format_double(c.value);
    out += "\n";
  }
  return out;
}

Json ReproducedTable::to_json() const
{
  Json rs = Json::array();
  for (const auto &r : rows)
  {
    Json cells = Json::object();
    for (const auto &c : r.cells)
    {
      Json cj{{"value", c.value}, {"tolerance", c.tolerance}, {"within", c.within()}};
      if (c.reference)
      {
        cj["reference"] = *c.reference;
        cj["abs_diff"] = std::abs(c.value - *c.reference);
      }
      if (!c.detail.empty())
        cj["detail"] = c.detail;
      cells[c.column] = cj;
    }
    rs.push_back({{"k", r.k}, {"degree", r.degree}, {"cells", cells}});
  }
  return {{"table", id}, {"title", title}, {"columns", columns}, {"rows", rs}, {"extra", extra}};
}

namespace
{

struct Context
{
  const Json &table;
  const Json &tolerances;
  const ReproduceOptions &opt;
  Stencil stencil;
  int dimension;

  double tol(const std::string &key) const { return tolerances.at(key).get<double>(); }
};

Stencil table_stencil(const Json &t, double h)
{
  if (t.contains("alpha"))
    return build_fem_tri_laplace(t.at("alpha").get<double>(), t.at("beta").get<double>(), h);
  return build_fd_laplace(GridGeometry::rectangular(t.at("dimension").get<int>(), h));
}

std::optional<double> reference_value(const Json &row, const std::string &column)
{
  if (row.contains(column))
    return row.at(column).get<double>();
  return std::nullopt;
}

Cell make_cell(const std::string &column, double value, const Json &row, double tolerance)
{
  Cell c;
  c.column = column;
  c.value = value;
  c.reference = reference_value(row, column);
  c.tolerance = tolerance;
  return c;
}

double mu(const Context &ctx, int k, const SmootherSpec &spec)
{
  return smoothing_factor({ctx.stencil, PreconditionerKind::Jacobi, spec, k, ctx.opt.sampling});
}

// Evaluates `f(mode)` for the rediscretized and Galerkin coarse operators and
// keeps the one closer to the printed value.
template <class F>
std::pair<CoarseOperatorMode, Json> pick_mode(F f, std::optional<double> reference, double tolerance, bool both,
                                             double *value)
{
  Json modes = Json::object();
  std::optional<CoarseOperatorMode> best;
  double best_diff = 0.0;
  for (auto mode : {CoarseOperatorMode::Rediscretized, CoarseOperatorMode::Galerkin})
  {
    double v = f(mode);
    modes[to_string(mode)] = v;
    double diff = reference ? std::abs(v - *reference) : 0.0;
    if (!best || diff < best_diff)
    {
      best = mode;
      best_diff = diff;
      *value = v;
    }
    if (!both && (!reference || best_diff <= tolerance))
      break;
  }
  return {*best, modes};
}

// Solver runs are on the unit square/cube with the rectangular FD operator.
Json measure_rate(const CycleSpec &spec, const Stencil &unit_stencil, int n, int iterations, std::uint64_t seed)
{
  const int d = unit_stencil.dimension();
  GridLevel fine(build_fd_laplace(GridGeometry::rectangular(d, 1.0 / n)),
                 std::vector<int>(static_cast<std::size_t>(d), n));
  auto r = measure_asymptotic_rate(spec, fine, iterations, seed);
  double max_ratio = *std::max_element(r.ratios.begin(), r.ratios.end());
  return {{"rate", r.rate},
          {"max_ratio", max_ratio},
          {"levels", r.levels},
          {"n", n},
          {"iterations", iterations},
          {"seed", r.seed},
          {"cycle", polymg::to_json(spec)}};
}

int grid_cells(const Context &ctx) { return ctx.dimension == 3 ? ctx.opt.n3d : ctx.opt.n2d; }

void smoothing_table(const Context &ctx, ReproducedTable &out)
{
  for (const auto &row : ctx.table.at("rows"))
  {
    ReproducedRow r{row.at("k").get<int>(), row.at("degree").get<int>(), {}};
    auto lb = lambda_bounds(ctx.stencil, PreconditionerKind::Jacobi, r.k, ctx.opt.sampling);
    double star = optimal_lambda0_smoothing(r.degree, lb.lambda0, lb.lambda1).value;
    double fac = ctx.tol("smoothing_factor");
    r.cells.push_back(
        make_cell("cheb", mu(ctx, r.k, {SmootherFamily::Chebyshev, r.degree, lb.lambda0, lb.lambda1}), row, fac));
    r.cells.push_back(make_cell("sa", mu(ctx, r.k, {SmootherFamily::SA, r.degree, 0.0, lb.lambda1}), row, fac));
    r.cells.push_back(
        make_cell("ba1x", mu(ctx, r.k, {SmootherFamily::BA1x, r.degree, lb.lambda0, lb.lambda1}), row, fac));
    r.cells.push_back(
        make_cell("ba1x_star", mu(ctx, r.k, {SmootherFamily::BA1x, r.degree, star, lb.lambda1}), row, fac));
    r.cells.push_back(make_cell("lambda0", lb.lambda0, row, ctx.tol("lambda0")));
    r.cells.push_back(make_cell("lambda0_star", star, row, ctx.tol("lambda0_star")));
    r.cells.back().detail["lambda1"] = lb.lambda1;
    out.rows.push_back(std::move(r));
  }
}

TwoGridConfig two_grid_config(const Context &ctx, int k, const SmootherSpec &spec, CoarseOperatorMode mode)
{
  return {ctx.stencil, PreconditionerKind::Jacobi, spec, k, 1, 0, mode, ctx.opt.sampling};
}

CycleSpec two_grid_cycle(int k, const SmootherSpec &spec, CoarseOperatorMode mode, CycleKind kind)
{
  CycleSpec c;
  c.kind = kind;
  c.k = k;
  c.pre = 1;
  c.post = 0;
  c.smoother = spec;
  c.coarse_mode = mode;
  return c;
}

// rho_LFA cell plus the measured two-grid (and optionally W-cycle) rate in the chosen mode.
void two_grid_pair(const Context &ctx, ReproducedRow &r, const Json &row, const std::string &name,
                   const SmootherSpec &spec)
{
  double value = 0.0;
  auto [mode, modes] = pick_mode(
      [&](CoarseOperatorMode m) { return rho_two_grid(two_grid_config(ctx, r.k, spec, m)).rho; },
      reference_value(row, name + "_lfa"), ctx.tol("rho_lfa"), ctx.opt.both_modes, &value);
  Cell lfa = make_cell(name + "_lfa", value, row, ctx.tol("rho_lfa"));
  lfa.detail = {{"modes", modes}, {"chosen", to_string(mode)}, {"smoother", to_json(spec)}};
  r.cells.push_back(lfa);

  Cell w = make_cell(name + "_w", std::nan(""), row, ctx.tol("rho_w"));
  if (ctx.opt.measure)
  {
    Json m = measure_rate(two_grid_cycle(r.k, spec, mode, CycleKind::TwoGrid), ctx.stencil, grid_cells(ctx),
                          ctx.opt.twogrid_iterations, ctx.opt.seed);
    w.value = m.at("rate").get<double>();
    w.detail["two_grid"] = m;
    if (ctx.opt.w_cycle)
      w.detail["w_cycle"] = measure_rate(two_grid_cycle(r.k, spec, mode, CycleKind::W), ctx.stencil,
                                         grid_cells(ctx), ctx.opt.twogrid_iterations, ctx.opt.seed);
  }
  r.cells.push_back(w);
}

void two_grid_table(const Context &ctx, ReproducedTable &out)
{
  for (const auto &row : ctx.table.at("rows"))
  {
    ReproducedRow r{row.at("k").get<int>(), row.at("degree").get<int>(), {}};
    auto lb = lambda_bounds(ctx.stencil, PreconditionerKind::Jacobi, r.k, ctx.opt.sampling);
    double star = optimal_lambda0_smoothing(r.degree, lb.lambda0, lb.lambda1).value;
    r.cells.push_back(make_cell("lambda0", lb.lambda0, row, ctx.tol("lambda0")));
    r.cells.push_back(make_cell("lambda0_star", star, row, ctx.tol("lambda0_star")));
    r.cells.push_back(make_cell("lambda1", lb.lambda1, row, ctx.tol("lambda0")));
    r.cells.push_back(make_cell("degree", r.degree, row, 0.0));
    two_grid_pair(ctx, r, row, "cheb", {SmootherFamily::Chebyshev, r.degree, lb.lambda0, lb.lambda1});
    two_grid_pair(ctx, r, row, "ba1x", {SmootherFamily::BA1x, r.degree, lb.lambda0, lb.lambda1});
    two_grid_pair(ctx, r, row, "ba1x_star", {SmootherFamily::BA1x, r.degree, star, lb.lambda1});
    out.rows.push_back(std::move(r));
  }
}

void optimal_two_grid_table(const Context &ctx, ReproducedTable &out)
{
  for (const auto &row : ctx.table.at("rows"))
  {
    ReproducedRow r{row.at("k").get<int>(), row.at("degree").get<int>(), {}};
    auto lb = lambda_bounds(ctx.stencil, PreconditionerKind::Jacobi, r.k, ctx.opt.sampling);
    r.cells.push_back(make_cell("lambda1", lb.lambda1, row, ctx.tol("lambda0")));
    r.cells.push_back(make_cell("degree", r.degree, row, 0.0));
    for (auto fam : {SmootherFamily::Chebyshev, SmootherFamily::BA1x})
    {
      const std::string name = to_string(fam);
      SmootherSpec seed{fam, r.degree, lb.lambda0, lb.lambda1};
      Json runs = Json::object();
      double value = 0.0;
      auto [mode, modes] = pick_mode(
          [&](CoarseOperatorMode m) {
            auto o = optimal_lambda0_two_grid(two_grid_config(ctx, r.k, seed, m), lb.lambda0);
            Json run{{"lambda0", o.lambda0}, {"rho", o.rho}, {"seed_rho", o.seed_rho}, {"evaluations", o.evaluations}};
            if (o.fallback)
              run["fallback"] = *o.fallback;
            runs[to_string(m)] = run;
            return o.rho;
          },
          reference_value(row, name + "_lfa"), ctx.tol("rho_lfa"), ctx.opt.both_modes, &value);
      const Json &chosen = runs.at(to_string(mode));
      double l0 = chosen.at("lambda0").get<double>();
      Cell lc = make_cell(name + "_lambda0", l0, row, ctx.tol("optimal_lambda0"));
      lc.detail = {{"runs", runs}, {"chosen", to_string(mode)}, {"seed_lambda0", lb.lambda0}};
      r.cells.push_back(lc);
      Cell rc = make_cell(name + "_lfa", value, row, ctx.tol("rho_lfa"));
      rc.detail = {{"modes", modes}, {"chosen", to_string(mode)}};
      r.cells.push_back(rc);

      SmootherSpec spec{fam, r.degree, l0, lb.lambda1};
      Cell w = make_cell(name + "_w", std::nan(""), row, ctx.tol("rho_w"));
      if (ctx.opt.measure)
      {
        Json m = measure_rate(two_grid_cycle(r.k, spec, mode, CycleKind::TwoGrid), ctx.stencil, grid_cells(ctx),
                              ctx.opt.twogrid_iterations, ctx.opt.seed);
        w.value = m.at("rate").get<double>();
        w.detail["two_grid"] = m;
        if (ctx.opt.w_cycle)
          w.detail["w_cycle"] = measure_rate(two_grid_cycle(r.k, spec, mode, CycleKind::W), ctx.stencil,
                                             grid_cells(ctx), ctx.opt.twogrid_iterations, ctx.opt.seed);
      }
      r.cells.push_back(w);
    }
    out.rows.push_back(std::move(r));
  }
}

void vcycle_table(const Context &ctx, ReproducedTable &out)
{
  for (const auto &row : ctx.table.at("rows"))
  {
    ReproducedRow r{row.at("k").get<int>(), row.at("degree").get<int>(), {}};
    double l0, star, l1 = 2.0;
    if (ctx.opt.fixture_lambdas)
    {
      l0 = row.at("lambda0").get<double>();
      star = row.at("lambda0_star").get<double>();
    }
    else
    {
      auto lb = lambda_bounds(ctx.stencil, PreconditionerKind::Jacobi, r.k, ctx.opt.sampling);
      l0 = lb.lambda0;
      l1 = lb.lambda1;
      star = optimal_lambda0_smoothing(r.degree, l0, l1).value;
    }
    r.cells.push_back(make_cell("lambda0", l0, row, ctx.tol("lambda0")));
    r.cells.push_back(make_cell("lambda0_star", star, row, ctx.tol("lambda0_star")));
    auto run = [&](const std::string &column, SmootherSpec spec) {
      Cell c = make_cell(column, std::nan(""), row, ctx.tol("vcycle_rate"));
      if (ctx.opt.measure)
      {
        CycleSpec cs;
        cs.kind = CycleKind::V;
        cs.k = r.k;
        cs.pre = 1;
        cs.post = 1;
        cs.smoother = spec;
        c.detail = measure_rate(cs, ctx.stencil, grid_cells(ctx), ctx.opt.vcycle_iterations, ctx.opt.seed);
        c.value = c.detail.at("rate").get<double>();
      }
      r.cells.push_back(c);
    };
    run("ba1x", {SmootherFamily::BA1x, r.degree, l0, l1});
    run("ba1x_star", {SmootherFamily::BA1x, r.degree, star, l1});
    run("cheb", {SmootherFamily::Chebyshev, r.degree, l0, l1});
    out.rows.push_back(std::move(r));
  }
}

void triangle_table(const Context &ctx, ReproducedTable &out)
{
  double printed_l1 = ctx.table.at("lambda1").get<double>();
  double computed_l1 = 0.0;
  for (const auto &row : ctx.table.at("rows"))
  {
    ReproducedRow r{row.at("k").get<int>(), row.at("degree").get<int>(), {}};
    auto lb = lambda_bounds(ctx.stencil, PreconditionerKind::Jacobi, r.k, ctx.opt.sampling);
    computed_l1 = lb.lambda1;
    double star = optimal_lambda0_smoothing(r.degree, lb.lambda0, lb.lambda1).value;
    r.cells.push_back(make_cell("lambda0", lb.lambda0, row, ctx.tol("triangle_lambda")));
    r.cells.push_back(make_cell("lambda0_star", star, row, ctx.tol("triangle_lambda")));
    auto rho = [&](const std::string &column, SmootherSpec spec) {
      double value = 0.0;
      auto [mode, modes] = pick_mode(
          [&](CoarseOperatorMode m) { return rho_two_grid(two_grid_config(ctx, r.k, spec, m)).rho; },
          reference_value(row, column), ctx.tol("rho_lfa"), ctx.opt.both_modes, &value);
      Cell c = make_cell(column, value, row, ctx.tol("rho_lfa"));
      c.detail = {{"modes", modes}, {"chosen", to_string(mode)}, {"smoother", to_json(spec)}};
      r.cells.push_back(c);
    };
    rho("ba1x", {SmootherFamily::BA1x, r.degree, lb.lambda0, lb.lambda1});
    rho("ba1x_star", {SmootherFamily::BA1x, r.degree, star, lb.lambda1});
    rho("cheb", {SmootherFamily::Chebyshev, r.degree, lb.lambda0, lb.lambda1});
    out.rows.push_back(std::move(r));
  }
  out.extra["lambda1"] = {{"value", computed_l1},
                          {"reference", printed_l1},
                          {"tolerance", ctx.tol("triangle_lambda1")},
                          {"within", std::abs(computed_l1 - printed_l1) <= ctx.tol("triangle_lambda1")}};
}

} // namespace

ReproducedTable reproduce_table(const std::string &id, const Json &reference, const ReproduceOptions &options)
{
  if (!is_table_id(id))
    throw std::out_of_range("unknown table '" + id + "'; expected one of 1, 2, 3, 4, 5, 5-3d, 6, 7");
  const Json &t = reference.at("tables").at(id);
  Context ctx{t, reference.at("tolerances"), options, table_stencil(t, 1.0), t.at("dimension").get<int>()};

  ReproducedTable out;
  out.id = id;
  out.title = t.at("title").get<std::string>();
  out.columns = t.at("columns").get<std::vector<std::string>>();
  if (id == "1" || id == "2")
    smoothing_table(ctx, out);
  else if (id == "3")
    two_grid_table(ctx, out);
  else if (id == "4")
    optimal_two_grid_table(ctx, out);
  else if (id == "5" || id == "5-3d")
    vcycle_table(ctx, out);
  else
    triangle_table(ctx, out);

  if (t.contains("notes"))
    out.extra["notes"] = t.at("notes");
  if (t.contains("printed"))
    out.extra["printed"] = t.at("printed");
  out.extra["options"] = options.to_json();
  return out;
}

} // namespace polymg
