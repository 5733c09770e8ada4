#ifndef POLYMG_IO_HPP
#define POLYMG_IO_HPP

#include "polymg/lfa.hpp"
#include "polymg/mgrun.hpp"

#include <json.hpp>

namespace polymg
{

using Json = nlohmann::json;

Json to_json(const GridGeometry &g);
GridGeometry geometry_from_json(const Json &j);

Json to_json(const Stencil &s);
Stencil stencil_from_json(const Json &j);

Json to_json(const SmootherSpec &s);
SmootherSpec smoother_spec_from_json(const Json &j);

Json to_json(const FrequencySampling &s);
FrequencySampling sampling_from_json(const Json &j);

Json to_json(const CycleSpec &c);
CycleSpec cycle_spec_from_json(const Json &j);

/// Locale-independent shortest round-trip formatting.
std::string format_double(double x);

} // namespace polymg

#endif
