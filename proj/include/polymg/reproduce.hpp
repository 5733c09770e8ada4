#ifndef POLYMG_REPRODUCE_HPP
#define POLYMG_REPRODUCE_HPP

#include "polymg/io.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace polymg
{

/// Table ids known to the reference fixture: "1".."7" and "5-3d".
const std::vector<std::string> &table_ids();
bool is_table_id(const std::string &id);

Json load_reference(const std::string &path);

struct ReproduceOptions
{
  /// Evaluate both coarse modes for every two-grid cell. When false the
  /// Galerkin mode is only tried if the rediscretized one misses the tolerance.
  bool both_modes = true;
  bool measure = true; ///< run the solver columns
  bool w_cycle = true; ///< also measure W-cycle rates next to the two-grid ones
  int n2d = 256;       ///< cells per axis
  int n3d = 64;
  int twogrid_iterations = 100;
  int vcycle_iterations = 40;
  std::uint64_t seed = 20140601;
  /// V-cycle tables run with the printed lambda values rather than recomputed ones.
  bool fixture_lambdas = true;
  FrequencySampling sampling;

  Json to_json() const;
  static ReproduceOptions from_json(const Json &j);
};

struct Cell
{
  std::string column;
  double value = 0.0;
  std::optional<double> reference;
  double tolerance = 0.0;
  Json detail = Json::object();

  bool within() const;
};

struct ReproducedRow
{
  int k = 1;
  int degree = 0;
  std::vector<Cell> cells;

  const Cell &cell(const std::string &column) const;
};

struct ReproducedTable
{
  std::string id;
  std::string title;
  std::vector<std::string> columns;
  std::vector<ReproducedRow> rows;
  Json extra = Json::object();

  std::string to_csv() const;
  Json to_json() const;
};

ReproducedTable reproduce_table(const std::string &id, const Json &reference, const ReproduceOptions &options);

} // namespace polymg

#endif
