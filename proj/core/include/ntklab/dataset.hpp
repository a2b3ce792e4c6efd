#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "ntklab/linalg.hpp"

namespace ntk {

enum class DatasetKind { classification, regression };
enum class HypercubeLabeling { majority, parity };
enum class LabelMode { random_signs, constant_one, regression_uniform };

/// n unit-norm points in R^d with their labels.
struct Dataset {
  Matrix points;  // n x d
  Vec labels;
  DatasetKind kind = DatasetKind::classification;
  double label_bound = 1.0;

  std::size_t n() const { return points.rows(); }
  std::size_t d() const { return points.cols(); }
  std::span<const double> x(std::size_t i) const { return points.row(i); }
};

/// Throws std::invalid_argument if any Dataset invariant is broken.
void validate(const Dataset& ds);

Dataset gen_alternating_circle(std::size_t n);
Dataset gen_orthobasis(std::size_t d, const Vec& labels);
Dataset gen_hypercube(std::size_t d, HypercubeLabeling labeling,
                      std::size_t cap = std::size_t{1} << 16);
Dataset gen_two_points(double b);
Dataset gen_random_sphere(std::size_t n, std::size_t d, LabelMode mode,
                          std::uint64_t seed);

/// Number of coordinates of x that are negative.
std::size_t negative_count(std::span<const double> x);

std::string to_string(DatasetKind k);
DatasetKind dataset_kind_from_string(const std::string& s);
HypercubeLabeling hypercube_labeling_from_string(const std::string& s);
LabelMode label_mode_from_string(const std::string& s);

nlohmann::json dataset_to_json(const Dataset& ds);
/// Parses and validates.
Dataset dataset_from_json(const nlohmann::json& j);

}  // namespace ntk
