#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ntklab/dataset.hpp"
#include "ntklab/linalg.hpp"

namespace ntk {

enum class VBarKind { natural_v0, circle_rz, constant_direction, custom_table, custom_function };

using Pattern = std::vector<bool>;

/// A map from R^d into the closed unit ball.
struct VBarMap {
  VBarKind kind = VBarKind::natural_v0;
  /// Reference data: the instance for natural_v0 and custom_table.
  Dataset data;
  std::size_t circle_n = 0;
  Vec direction;
  /// Keyed by the strict firing pattern U_z = {i : <x_i, z> > 0}; missing
  /// patterns map to zero.
  std::map<Pattern, Vec> table;
  std::function<Vec(std::span<const double>)> fn;
  std::size_t dim = 0;
};

std::string to_string(VBarKind k);

VBarMap make_natural_v0(const Dataset& ds);
VBarMap make_circle_rz(std::size_t n);
VBarMap make_constant_direction(const Vec& v);
VBarMap make_custom_table(const Dataset& ds, std::map<Pattern, Vec> table);
VBarMap make_custom_function(std::size_t dim, std::function<Vec(std::span<const double>)> fn);

/// Balanced combination over the orthobasis instance: coordinate j carries
/// y_j e_j when z_j > 0 and -y_{j+d} e_j otherwise, weighted 1/sqrt(d).
VBarMap make_orthobasis_composed(const Dataset& orthobasis);
/// (x1 - x2)/b on the cone where both fire, x1 where only x1 fires, -x2 where
/// only x2 fires.
VBarMap make_two_point_map(const Dataset& two_points);

Pattern strict_pattern(const Dataset& ds, std::span<const double> z);
/// sum_{i : <x_i,z> > 0} y_i x_i
Vec cone_sum(const Dataset& ds, std::span<const double> z);

/// Evaluates the map; rejects z = 0 and outputs outside the unit ball.
Vec vbar_eval(const VBarMap& map, std::span<const double> z);

}  // namespace ntk
