#include "cli.hpp"

#include "polymg/io.hpp"
#include "polymg/reproduce.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#ifndef POLYMG_REFERENCE_FILE
#define POLYMG_REFERENCE_FILE "data/reference_tables.json"
#endif

namespace polymg
{

namespace
{

class UsageError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

struct Flags
{
  std::string stencil = "fd2d";
  std::string stencil_file;
  std::string alpha = "equilateral";
  std::string beta = "equilateral";
  std::string preconditioner = "jacobi";
  int k = 1;
  std::string family = "cheb";
  int degree = -1;
  std::string lambda0 = "auto";
  std::string lambda1 = "auto";
  std::string spec_file;
  int samples = 64;
  double offset = 0.5;
  bool no_refine = false;

  std::string format = "json";
  std::string output;

  // two-grid / solve
  std::string coarse;
  int nu1 = 1;
  int nu2 = 0;
  std::string cycle = "v";
  int levels = 0;
  int pre = 1;
  int post = 1;
  int n = 256;
  std::uint64_t seed = 20140601;
  int iterations = 100;
  std::string history_csv;

  // optimize
  std::string objective = "smoothing";
  double rho = 0.1;
  double kappa = 0.0;

  // reproduce
  std::string table;
  std::string reference = POLYMG_REFERENCE_FILE;
  std::string report;
  int n2d = 256;
  int n3d = 64;
  int iterations_tg = 100;
  int iterations_v = 40;
  bool no_measure = false;
  bool no_w_cycle = false;
  bool lazy_modes = false;
  bool computed_lambdas = false;
};

double parse_angle(const std::string &s)
{
  if (s == "equilateral")
    return std::numbers::pi / 3.0;
  if (s == "isosceles-80")
    return 4.0 * std::numbers::pi / 9.0;
  std::size_t pos = 0;
  double v = 0.0;
  try
  {
    v = std::stod(s, &pos);
  }
  catch (const std::exception &)
  {
    pos = 0;
  }
  if (pos != s.size() || s.empty())
    throw UsageError("angle '" + s + "' is neither a number (radians) nor a preset (equilateral, isosceles-80)");
  return v;
}

Stencil resolve_stencil(const Flags &f, double h, std::string &name)
{
  if (!f.stencil_file.empty())
  {
    std::ifstream in(f.stencil_file);
    if (!in)
      throw UsageError("cannot open --stencil-file " + f.stencil_file);
    name = "file";
    return stencil_from_json(Json::parse(in));
  }
  name = f.stencil;
  if (f.stencil == "fd2d")
    return build_fd_laplace(GridGeometry::rectangular(2, h));
  if (f.stencil == "fd3d")
    return build_fd_laplace(GridGeometry::rectangular(3, h));
  if (f.stencil == "tri")
    return build_fem_tri_laplace(parse_angle(f.alpha), parse_angle(f.beta), h);
  throw UsageError("unknown --stencil '" + f.stencil + "'; expected fd2d, fd3d or tri");
}

FrequencySampling resolve_sampling(const Flags &f)
{
  FrequencySampling s;
  s.samples_per_axis = f.samples;
  s.offset_fraction = f.offset;
  s.refine = !f.no_refine;
  s.validate();
  return s;
}

double parse_number(const std::string &flag, const std::string &s)
{
  std::size_t pos = 0;
  double v = 0.0;
  try
  {
    v = std::stod(s, &pos);
  }
  catch (const std::exception &)
  {
    pos = 0;
  }
  if (pos != s.size() || s.empty())
    throw UsageError(flag + " must be 'auto'" + std::string(flag == "--lambda0" ? ", 'opt'" : "") +
                     " or a number, got '" + s + "'");
  return v;
}

// Flags -> fully resolved problem record (stencil, smoother with concrete lambdas, bounds).
Json resolve_problem(const Flags &f, double h = 1.0)
{
  std::string name;
  Stencil stencil = resolve_stencil(f, h, name);
  auto p = preconditioner_from_string(f.preconditioner);
  if (f.k < 1)
    throw UsageError("--k must be >= 1");
  FrequencySampling sampling = resolve_sampling(f);
  LambdaBounds lb = lambda_bounds(stencil, p, f.k, sampling);

  SmootherSpec spec;
  std::string l0_policy = f.lambda0, l1_policy = f.lambda1;
  if (!f.spec_file.empty())
  {
    std::ifstream in(f.spec_file);
    if (!in)
      throw UsageError("cannot open --spec-file " + f.spec_file);
    spec = smoother_spec_from_json(Json::parse(in));
    l0_policy = l1_policy = "file";
  }
  else
  {
    if (f.degree < 0)
      throw UsageError("--degree is required unless --spec-file is given");
    spec.family = smoother_family_from_string(f.family);
    spec.degree = f.degree;
    spec.lambda1 = f.lambda1 == "auto" ? lb.lambda1 : parse_number("--lambda1", f.lambda1);
    if (f.lambda0 == "auto")
      spec.lambda0 = lb.lambda0;
    else if (f.lambda0 == "opt")
    {
      if (spec.family == SmootherFamily::BA1x && spec.degree < 1)
        throw UsageError("--lambda0 opt needs --degree >= 1");
      spec.lambda0 = optimal_lambda0_smoothing(std::max(spec.degree, 1), lb.lambda0, spec.lambda1).value;
    }
    else
      spec.lambda0 = parse_number("--lambda0", f.lambda0);
    if (spec.family == SmootherFamily::SA)
      spec.lambda0 = 0.0;
  }
  spec.validate();
  if (!is_convergent_smoother(spec))
    throw UsageError("smoother is not convergent: max |e(x)| >= 1 on (0, lambda1]; check lambda0/lambda1");

  double star = spec.degree >= 1 && lb.lambda0 < spec.lambda1
                    ? optimal_lambda0_smoothing(spec.degree, lb.lambda0, spec.lambda1).value
                    : lb.lambda0;
  return {{"stencil_name", name},
          {"stencil", to_json(stencil)},
          {"preconditioner", to_string(p)},
          {"k", f.k},
          {"smoother", to_json(spec)},
          {"lambda_policy", {{"lambda0", l0_policy}, {"lambda1", l1_policy}}},
          {"bounds", {{"lambda0", lb.lambda0}, {"lambda1", lb.lambda1}, {"lambda0_star", star}}},
          {"sampling", to_json(sampling)}};
}

struct Problem
{
  Stencil stencil;
  PreconditionerKind preconditioner;
  int k;
  SmootherSpec smoother;
  FrequencySampling sampling;
};

Problem problem_from_json(const Json &c)
{
  return {stencil_from_json(c.at("stencil")), preconditioner_from_string(c.at("preconditioner").get<std::string>()),
          c.at("k").get<int>(), smoother_spec_from_json(c.at("smoother")), sampling_from_json(c.at("sampling"))};
}

std::vector<CoarseOperatorMode> coarse_modes(const std::string &s)
{
  if (s.empty() || s == "both")
    return {CoarseOperatorMode::Rediscretized, CoarseOperatorMode::Galerkin};
  return {coarse_mode_from_string(s)};
}

// --- executors: resolved config -> result --------------------------------

Json exec_smoothing_factor(const Json &c)
{
  Problem pr = problem_from_json(c);
  SmoothingConfig cfg{pr.stencil, pr.preconditioner, pr.smoother, pr.k, pr.sampling};
  LambdaBounds lb = lambda_bounds(pr.stencil, pr.preconditioner, pr.k, pr.sampling);
  double star = c.at("bounds").at("lambda0_star").get<double>();
  return {{"mu", smoothing_factor(cfg)},
          {"mu_sampled", smoothing_factor_sampled(cfg)},
          {"lambda0", lb.lambda0},
          {"lambda1", lb.lambda1},
          {"lambda0_star", star}};
}

Json exec_two_grid(const Json &c)
{
  Problem pr = problem_from_json(c);
  Json modes = Json::object();
  for (const auto &m : c.at("coarse").get<std::vector<std::string>>())
  {
    TwoGridConfig cfg{pr.stencil, pr.preconditioner,      pr.smoother,
                      pr.k,       c.at("nu1").get<int>(), c.at("nu2").get<int>(),
                      coarse_mode_from_string(m), pr.sampling};
    auto r = rho_two_grid(cfg);
    std::vector<double> argmax(r.argmax.theta.begin(), r.argmax.theta.begin() + r.argmax.dim);
    modes[m] = {{"rho", r.rho}, {"rho_sampled", r.rho_sampled}, {"argmax", argmax}, {"blocks", r.blocks}};
  }
  return {{"modes", modes}};
}

Json exec_solve(const Json &c)
{
  CycleSpec spec = cycle_spec_from_json(c.at("cycle_spec"));
  Stencil s = stencil_from_json(c.at("stencil"));
  std::vector<int> cells(static_cast<std::size_t>(s.dimension()), c.at("n").get<int>());
  GridLevel fine(s, cells);
  auto r = measure_asymptotic_rate(spec, fine, c.at("iterations").get<int>(), c.at("seed").get<std::uint64_t>());
  return {{"rate", r.rate},
          {"levels", r.levels},
          {"max_ratio", *std::max_element(r.ratios.begin(), r.ratios.end())},
          {"ratios", r.ratios}};
}

Json exec_optimize(const Json &c)
{
  const std::string objective = c.at("objective").get<std::string>();
  if (objective == "degree")
  {
    double rho = c.at("rho").get<double>(), kappa = c.at("kappa").get<double>(),
           l1 = c.at("lambda1").get<double>();
    int m = min_degree(rho, kappa, l1);
    double delta = (std::sqrt(kappa) - 1.0) / (std::sqrt(kappa) + 1.0);
    return {{"degree", m}, {"bound", std::pow(delta, m) * (kappa - 1.0) / 2.0}};
  }
  Problem pr = problem_from_json(c);
  const Json &b = c.at("bounds");
  if (objective == "smoothing")
  {
    auto o = optimal_lambda0_smoothing(pr.smoother.degree, b.at("lambda0").get<double>(), pr.smoother.lambda1);
    SmootherSpec at = pr.smoother;
    at.family = SmootherFamily::BA1x;
    at.lambda0 = o.value;
    double mu = smoothing_factor({pr.stencil, pr.preconditioner, at, pr.k, pr.sampling});
    return {{"lambda0_star", o.value}, {"crossed", o.crossed}, {"endpoint_error", o.error}, {"mu", mu}};
  }
  TwoGridConfig cfg{pr.stencil,
                    pr.preconditioner,
                    pr.smoother,
                    pr.k,
                    c.at("nu1").get<int>(),
                    c.at("nu2").get<int>(),
                    coarse_mode_from_string(c.at("coarse").get<std::string>()),
                    pr.sampling};
  auto o = optimal_lambda0_two_grid(cfg, pr.smoother.lambda0);
  Json r{{"lambda0", o.lambda0},
         {"rho", o.rho},
         {"seed_lambda0", o.seed_lambda0},
         {"seed_rho", o.seed_rho},
         {"evaluations", o.evaluations}};
  if (o.fallback)
    r["fallback"] = *o.fallback;
  return r;
}

Json exec_reproduce(const Json &c)
{
  Json ref = load_reference(c.at("reference").get<std::string>());
  auto t = reproduce_table(c.at("table").get<std::string>(), ref, ReproduceOptions::from_json(c.at("options")));
  Json j = t.to_json();
  j["csv"] = t.to_csv();
  return j;
}

Json execute(const std::string &command, const Json &config)
{
  if (command == "smoothing-factor")
    return exec_smoothing_factor(config);
  if (command == "two-grid")
    return exec_two_grid(config);
  if (command == "solve")
    return exec_solve(config);
  if (command == "optimize")
    return exec_optimize(config);
  if (command == "reproduce")
    return exec_reproduce(config);
  throw UsageError("report names unknown command '" + command + "'");
}

// --- output ----------------------------------------------------------------

std::string scalar_text(const Json &v)
{
  if (v.is_number_float())
    return format_double(v.get<double>());
  if (v.is_string())
    return v.get<std::string>();
  return v.dump();
}

// One header line plus one value line over the scalar result fields
// (nested objects flattened with '.').
std::string result_csv(const Json &result)
{
  std::vector<std::pair<std::string, std::string>> fields;
  auto walk = [&](auto &&self, const Json &j, const std::string &prefix) -> void {
    for (auto it = j.begin(); it != j.end(); ++it)
    {
      std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
      if (it->is_object())
        self(self, *it, key);
      else if (!it->is_array())
        fields.emplace_back(key, scalar_text(*it));
    }
  };
  walk(walk, result, "");
  std::string head, row;
  for (std::size_t i = 0; i < fields.size(); ++i)
  {
    head += (i ? "," : "") + fields[i].first;
    row += (i ? "," : "") + fields[i].second;
  }
  return head + "\n" + row + "\n";
}

void write_text(const std::string &path, const std::string &text, std::ostream &out)
{
  if (path.empty())
  {
    out << text;
    return;
  }
  std::ofstream f(path);
  if (!f)
    throw std::runtime_error("cannot write " + path);
  f << text;
}

void emit(const Json &report, const Flags &f, std::ostream &out)
{
  std::string text;
  if (f.format == "json")
    text = report.dump(2) + "\n";
  else if (report.at("command") == "reproduce")
    text = report.at("result").at("csv").get<std::string>();
  else
    text = result_csv(report.at("result"));
  write_text(f.output, text, out);
}

Json make_report(const std::string &command, const Json &config)
{
  return {{"command", command}, {"config", config}, {"result", execute(command, config)}};
}

// --- flag registration -----------------------------------------------------

void add_output_options(CLI::App *app, Flags &f)
{
  app->add_option("--format", f.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
  app->add_option("--output,-o", f.output, "output path (default: standard output)");
}

void add_problem_options(CLI::App *app, Flags &f)
{
  app->add_option("--stencil", f.stencil, "fd2d | fd3d | tri");
  app->add_option("--stencil-file", f.stencil_file, "stencil JSON (overrides --stencil)");
  app->add_option("--alpha", f.alpha, "triangle angle in radians or a preset (equilateral, isosceles-80)");
  app->add_option("--beta", f.beta, "triangle angle in radians or a preset");
  app->add_option("--preconditioner", f.preconditioner, "jacobi | l1jacobi");
  app->add_option("--k", f.k, "coarsening exponent (factor 2^k)");
  app->add_option("--family", f.family, "cheb | sa | ba1x");
  app->add_option("--degree", f.degree, "degree of the 1/x approximant");
  app->add_option("--lambda0", f.lambda0, "auto | opt | <value>");
  app->add_option("--lambda1", f.lambda1, "auto | <value>");
  app->add_option("--spec-file", f.spec_file, "smoother spec JSON (overrides family/degree/lambda flags)");
  app->add_option("--samples", f.samples, "frequency samples per axis");
  app->add_option("--offset", f.offset, "sampling offset as a fraction of the spacing");
  app->add_flag("--no-refine", f.no_refine, "skip the continuous refinement of lattice maxima");
  add_output_options(app, f);
}

int run(const std::vector<std::string> &args, std::ostream &out)
{
  Flags f;
  CLI::App app{"Polynomial multigrid smoothers: LFA, optimization and GMG validation", "polymg"};
  app.require_subcommand(1);

  auto *sf = app.add_subcommand("smoothing-factor", "smoothing factor of a polynomial smoother");
  add_problem_options(sf, f);

  auto *tg = app.add_subcommand("two-grid", "two-grid convergence factor");
  add_problem_options(tg, f);
  tg->add_option("--coarse", f.coarse, "galerkin | redisc | both (default both)");
  tg->add_option("--nu1", f.nu1, "pre-smoothing steps");
  tg->add_option("--nu2", f.nu2, "post-smoothing steps");

  auto *so = app.add_subcommand("solve", "measure the asymptotic rate of a multigrid cycle");
  add_problem_options(so, f);
  so->add_option("--cycle", f.cycle, "tg | v | w");
  so->add_option("--levels", f.levels, "number of levels (0 = as many as possible)");
  so->add_option("--pre", f.pre, "pre-smoothing steps");
  so->add_option("--post", f.post, "post-smoothing steps");
  so->add_option("--n", f.n, "cells per axis of the fine grid (n - 1 interior points)");
  so->add_option("--seed", f.seed, "random initial error seed");
  so->add_option("--iterations", f.iterations, "cycles to run (>= 30)");
  so->add_option("--coarse", f.coarse, "galerkin | redisc (default redisc)");
  so->add_option("--history-csv", f.history_csv, "write iteration,ratio rows here");

  auto *op = app.add_subcommand("optimize", "optimize lambda0 or the degree");
  add_problem_options(op, f);
  op->add_option("--objective", f.objective, "smoothing | twogrid | degree")
      ->check(CLI::IsMember({"smoothing", "twogrid", "degree"}));
  op->add_option("--coarse", f.coarse, "coarse mode for --objective twogrid (default redisc)");
  op->add_option("--nu1", f.nu1, "pre-smoothing steps");
  op->add_option("--nu2", f.nu2, "post-smoothing steps");
  op->add_option("--rho", f.rho, "target reduction for --objective degree");
  op->add_option("--kappa", f.kappa, "lambda1 / lambda0 for --objective degree");

  auto *rp = app.add_subcommand("reproduce", "recompute a published table");
  rp->add_option("--table", f.table, "1 .. 7 or 5-3d")->required();
  rp->add_option("--reference", f.reference, "reference fixture JSON");
  rp->add_option("--report", f.report, "companion JSON report path");
  rp->add_option("--n2d", f.n2d, "cells per axis for 2D solver runs");
  rp->add_option("--n3d", f.n3d, "cells per axis for 3D solver runs");
  rp->add_option("--iterations-tg", f.iterations_tg, "two-grid/W iterations");
  rp->add_option("--iterations-v", f.iterations_v, "V-cycle iterations");
  rp->add_option("--seed", f.seed, "random initial error seed");
  rp->add_option("--samples", f.samples, "frequency samples per axis");
  rp->add_flag("--no-measure", f.no_measure, "skip solver columns");
  rp->add_flag("--no-w-cycle", f.no_w_cycle, "skip the secondary W-cycle runs");
  rp->add_flag("--lazy-modes", f.lazy_modes, "try the Galerkin mode only when rediscretized misses");
  rp->add_flag("--computed-lambdas", f.computed_lambdas, "V-cycle tables use recomputed lambdas");
  add_output_options(rp, f);

  auto *rr = app.add_subcommand("rerun", "re-execute a JSON report without the original flags");
  rr->add_option("--report", f.report, "report produced by any subcommand")->required();
  add_output_options(rr, f);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try
  {
    app.parse(rev);
  }
  catch (const CLI::CallForHelp &)
  {
    out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return 0;
  }
  catch (const CLI::ParseError &e)
  {
    throw UsageError(e.what());
  }

  CLI::App *cmd = app.get_subcommands().front();
  const std::string name = cmd->get_name();
  bool format_given = cmd->count("--format") > 0;

  if (name == "rerun")
  {
    std::ifstream in(f.report);
    if (!in)
      throw UsageError("cannot open --report " + f.report);
    Json old = Json::parse(in);
    emit(make_report(old.at("command").get<std::string>(), old.at("config")), f, out);
    return 0;
  }

  Json config;
  if (name == "smoothing-factor")
    config = resolve_problem(f);
  else if (name == "two-grid")
  {
    config = resolve_problem(f);
    std::vector<std::string> modes;
    for (auto m : coarse_modes(f.coarse))
      modes.push_back(to_string(m));
    if (f.nu1 < 0 || f.nu2 < 0 || f.nu1 + f.nu2 < 1)
      throw UsageError("--nu1/--nu2 must be non-negative with at least one smoothing step");
    config["coarse"] = modes;
    config["nu1"] = f.nu1;
    config["nu2"] = f.nu2;
  }
  else if (name == "solve")
  {
    if (f.iterations < 30)
      throw UsageError("--iterations must be >= 30 to estimate an asymptotic rate");
    if (f.n < 2)
      throw UsageError("--n must be >= 2 cells per axis");
    if (f.stencil == "tri" && f.stencil_file.empty())
      throw UsageError("solve supports rectangular grids only (fd2d, fd3d)");
    config = resolve_problem(f, 1.0 / f.n);
    if (stencil_from_json(config.at("stencil")).geometry().is_triangular())
      throw UsageError("solve supports rectangular grids only");
    CycleSpec cs;
    cs.kind = cycle_kind_from_string(f.cycle);
    cs.k = f.k;
    cs.levels = f.levels;
    cs.pre = f.pre;
    cs.post = f.post;
    cs.smoother = smoother_spec_from_json(config.at("smoother"));
    cs.preconditioner = preconditioner_from_string(f.preconditioner);
    cs.coarse_mode = coarse_mode_from_string(f.coarse.empty() ? "redisc" : f.coarse);
    cs.validate();
    config["cycle_spec"] = to_json(cs);
    config["n"] = f.n;
    config["iterations"] = f.iterations;
    config["seed"] = f.seed;
  }
  else if (name == "optimize")
  {
    if (f.objective == "degree")
    {
      if (!(f.kappa > 1.0))
        throw UsageError("--objective degree needs --kappa > 1");
      if (!(f.rho > 0.0 && f.rho < 1.0))
        throw UsageError("--objective degree needs 0 < --rho < 1");
      double l1 = f.lambda1 == "auto" ? 2.0 : parse_number("--lambda1", f.lambda1);
      config = {{"rho", f.rho}, {"kappa", f.kappa}, {"lambda1", l1}};
    }
    else
    {
      Flags g = f;
      if (f.objective == "smoothing")
        g.family = "ba1x";
      config = resolve_problem(g);
      config["coarse"] = f.coarse.empty() ? "redisc" : to_string(coarse_mode_from_string(f.coarse));
      config["nu1"] = f.nu1;
      config["nu2"] = f.nu2;
    }
    config["objective"] = f.objective;
  }
  else if (name == "reproduce")
  {
    if (!is_table_id(f.table))
      throw UsageError("unknown --table '" + f.table + "'; expected one of 1, 2, 3, 4, 5, 5-3d, 6, 7");
    ReproduceOptions o;
    o.both_modes = !f.lazy_modes;
    o.measure = !f.no_measure;
    o.w_cycle = !f.no_w_cycle;
    o.n2d = f.n2d;
    o.n3d = f.n3d;
    o.twogrid_iterations = f.iterations_tg;
    o.vcycle_iterations = f.iterations_v;
    o.seed = f.seed;
    o.fixture_lambdas = !f.computed_lambdas;
    o.sampling = resolve_sampling(f);
    config = {{"table", f.table}, {"reference", f.reference}, {"options", o.to_json()}};
    if (!format_given)
      f.format = "csv";
  }

  Json report = make_report(name, config);
  emit(report, f, out);
  if (name == "solve" && !f.history_csv.empty())
  {
    std::string csv = "iteration,ratio\n";
    const auto &ratios = report.at("result").at("ratios");
    for (std::size_t i = 0; i < ratios.size(); ++i)
      csv += std::to_string(i + 1) + "," + format_double(ratios[i].get<double>()) + "\n";
    write_text(f.history_csv, csv, out);
  }
  if (name == "reproduce")
  {
    std::string path = !f.report.empty() ? f.report : (f.output.empty() ? "" : f.output + ".json");
    if (!path.empty())
      write_text(path, report.dump(2) + "\n", out);
  }
  return 0;
}

} // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
{
  auto fail = [&](const std::string &kind, const std::string &message, int code) {
    err << Json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << "\n";
    return code;
  };
  try
  {
    return run(args, out);
  }
  catch (const UsageError &e)
  {
    return fail("usage", e.what(), 2);
  }
  catch (const Json::exception &e)
  {
    return fail("json", e.what(), 2);
  }
  catch (const HierarchyError &e)
  {
    return fail("hierarchy", e.what(), 1);
  }
  catch (const DivergenceError &e)
  {
    return fail("divergence", e.what(), 1);
  }
  catch (const std::invalid_argument &e)
  {
    return fail("invalid_argument", e.what(), 2);
  }
  catch (const std::out_of_range &e)
  {
    return fail("out_of_range", e.what(), 2);
  }
  catch (const std::exception &e)
  {
    return fail("runtime", e.what(), 1);
  }
}

} // namespace polymg
