#include "polymg/io.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace polymg
{

namespace
{

std::string kind_name(GridKind k) { return k == GridKind::Triangular ? "triangular" : "rectangular"; }

} // namespace

Json to_json(const GridGeometry &g)
{
  Json j;
  j["dimension"] = g.dimension();
  j["kind"] = kind_name(g.kind());
  j["h"] = g.mesh_widths();
  j["alpha"] = g.alpha();
  j["beta"] = g.beta();
  return j;
}

GridGeometry geometry_from_json(const Json &j)
{
  const std::string kind = j.at("kind").get<std::string>();
  auto h = j.at("h").get<std::vector<double>>();
  int dimension = j.at("dimension").get<int>();
  if (static_cast<int>(h.size()) != dimension)
    throw std::invalid_argument("geometry: h must have one entry per dimension");
  if (kind == "rectangular")
    return GridGeometry::rectangular(std::move(h));
  if (kind == "triangular")
  {
    if (dimension != 2 || h[0] != h[1])
      throw std::invalid_argument("geometry: triangular grids are 2D with one mesh width");
    return GridGeometry::triangular(j.at("alpha").get<double>(), j.at("beta").get<double>(), h[0]);
  }
  throw std::invalid_argument("geometry: unknown kind '" + kind + "'");
}

Json to_json(const Stencil &s)
{
  Json entries = Json::array();
  for (const auto &e : s.entries())
  {
    std::vector<int> off(e.offset.begin(), e.offset.begin() + s.dimension());
    entries.push_back({{"offset", off}, {"coefficient", e.coefficient}});
  }
  return {{"geometry", to_json(s.geometry())}, {"entries", entries}};
}

Stencil stencil_from_json(const Json &j)
{
  GridGeometry g = geometry_from_json(j.at("geometry"));
  std::vector<StencilEntry> entries;
  for (const auto &e : j.at("entries"))
  {
    auto off = e.at("offset").get<std::vector<int>>();
    if (static_cast<int>(off.size()) != g.dimension())
      throw std::invalid_argument("stencil: offset length must equal the dimension");
    StencilEntry se;
    for (std::size_t a = 0; a < off.size(); ++a)
      se.offset[a] = off[a];
    se.coefficient = e.at("coefficient").get<double>();
    entries.push_back(se);
  }
  return Stencil(g, std::move(entries));
}

Json to_json(const SmootherSpec &s)
{
  return {{"family", to_string(s.family)}, {"degree", s.degree}, {"lambda0", s.lambda0}, {"lambda1", s.lambda1}};
}

SmootherSpec smoother_spec_from_json(const Json &j)
{
  SmootherSpec s;
  s.family = smoother_family_from_string(j.at("family").get<std::string>());
  s.degree = j.at("degree").get<int>();
  s.lambda0 = j.value("lambda0", 0.0);
  s.lambda1 = j.at("lambda1").get<double>();
  s.validate();
  return s;
}

Json to_json(const FrequencySampling &s)
{
  return {{"samples_per_axis", s.samples_per_axis}, {"offset_fraction", s.offset_fraction}, {"refine", s.refine}};
}

FrequencySampling sampling_from_json(const Json &j)
{
  FrequencySampling s;
  s.samples_per_axis = j.value("samples_per_axis", s.samples_per_axis);
  s.offset_fraction = j.value("offset_fraction", s.offset_fraction);
  s.refine = j.value("refine", s.refine);
  s.validate();
  return s;
}

Json to_json(const CycleSpec &c)
{
  return {{"cycle", to_string(c.kind)},
          {"k", c.k},
          {"levels", c.levels},
          {"pre", c.pre},
          {"post", c.post},
          {"smoother", to_json(c.smoother)},
          {"preconditioner", to_string(c.preconditioner)},
          {"coarse", to_string(c.coarse_mode)}};
}

CycleSpec cycle_spec_from_json(const Json &j)
{
  CycleSpec c;
  c.kind = cycle_kind_from_string(j.at("cycle").get<std::string>());
  c.k = j.at("k").get<int>();
  c.levels = j.value("levels", 0);
  c.pre = j.value("pre", 1);
  c.post = j.value("post", 1);
  c.smoother = smoother_spec_from_json(j.at("smoother"));
  c.preconditioner = preconditioner_from_string(j.value("preconditioner", std::string("jacobi")));
  c.coarse_mode = coarse_mode_from_string(j.value("coarse", std::string("redisc")));
  c.validate();
  return c;
}

std::string format_double(double x)
{
  if (std::isnan(x))
    return "nan";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

} // namespace polymg
