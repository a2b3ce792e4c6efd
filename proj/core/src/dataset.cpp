#include "ntklab/dataset.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "ntklab/rng.hpp"

namespace ntk {

namespace {

void normalize_rows(Matrix& pts) {
  for (std::size_t i = 0; i < pts.rows(); ++i) {
    auto row = pts.row(i);
    const double nr = norm2(row);
    if (nr == 0.0) throw std::invalid_argument("cannot normalize a zero point");
    for (double& v : row) v /= nr;
  }
}

}  // namespace

void validate(const Dataset& ds) {
  if (ds.n() < 1 || ds.d() < 1) throw std::invalid_argument("dataset needs n >= 1 and d >= 1");
  if (ds.labels.size() != ds.n())
    throw std::invalid_argument("dataset label count does not match point count");
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const double nr = norm2(ds.x(i));
    if (!(std::abs(nr - 1.0) <= 1e-12))
      throw std::invalid_argument("dataset point " + std::to_string(i) + " is not unit norm");
    const double y = ds.labels[i];
    if (ds.kind == DatasetKind::classification) {
      if (y != 1.0 && y != -1.0)
        throw std::invalid_argument("classification labels must be exactly +1 or -1");
    } else if (!(std::abs(y) <= ds.label_bound)) {
      throw std::invalid_argument("regression label exceeds label bound");
    }
  }
}

Dataset gen_alternating_circle(std::size_t n) {
  if (n == 0 || n % 4 != 0)
    throw std::invalid_argument("alternating circle needs n divisible by 4");
  Dataset ds;
  ds.points = Matrix(n, 2);
  ds.labels.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    ds.points(k, 0) = std::cos(t);
    ds.points(k, 1) = std::sin(t);
    ds.labels[k] = (k % 2 == 0) ? 1.0 : -1.0;
  }
  normalize_rows(ds.points);
  validate(ds);
  return ds;
}

Dataset gen_orthobasis(std::size_t d, const Vec& labels) {
  if (d == 0 || labels.empty() || labels.size() != 2 * d)
    throw std::invalid_argument("orthobasis needs 2d labels");
  Dataset ds;
  ds.points = Matrix(2 * d, d);
  ds.labels = labels;
  for (std::size_t i = 0; i < d; ++i) {
    ds.points(i, i) = 1.0;
    ds.points(d + i, i) = -1.0;
  }
  validate(ds);
  return ds;
}

std::size_t negative_count(std::span<const double> x) {
  std::size_t c = 0;
  for (double v : x) c += v < 0.0 ? 1 : 0;
  return c;
}

Dataset gen_hypercube(std::size_t d, HypercubeLabeling labeling, std::size_t cap) {
  if (d < 2) throw std::invalid_argument("hypercube needs d >= 2");
  if (d >= 63 || (std::size_t{1} << d) > cap)
    throw std::invalid_argument("hypercube size 2^d exceeds the configured cap");
  const std::size_t total = std::size_t{1} << d;
  const double c = 1.0 / std::sqrt(static_cast<double>(d));
  std::vector<Vec> rows;
  Vec labels;
  for (std::size_t mask = 0; mask < total; ++mask) {
    Vec x(d);
    std::size_t sigma = 0;
    for (std::size_t k = 0; k < d; ++k) {
      const bool neg = (mask >> k) & 1U;
      x[k] = neg ? -c : c;
      sigma += neg;
    }
    double y = 0.0;
    if (labeling == HypercubeLabeling::majority) {
      if (2 * sigma == d) continue;
      y = 2 * sigma > d ? -1.0 : 1.0;
    } else {
      y = sigma % 2 == 0 ? 1.0 : -1.0;
    }
    rows.push_back(std::move(x));
    labels.push_back(y);
  }
  Dataset ds;
  ds.points = Matrix::from_rows(rows);
  ds.labels = std::move(labels);
  normalize_rows(ds.points);
  validate(ds);
  return ds;
}

Dataset gen_two_points(double b) {
  if (!(b > 0.0 && b < std::numbers::sqrt2))
    throw std::invalid_argument("two-point chord length must lie in (0, sqrt 2)");
  // Chord b subtends angle 2 asin(b/2).
  const double theta = 2.0 * std::asin(b / 2.0);
  Dataset ds;
  ds.points = Matrix::from_rows({{1.0, 0.0}, {std::cos(theta), std::sin(theta)}});
  ds.labels = {1.0, -1.0};
  normalize_rows(ds.points);
  validate(ds);
  return ds;
}

Dataset gen_random_sphere(std::size_t n, std::size_t d, LabelMode mode,
                          std::uint64_t seed) {
  if (n < 1 || d < 1) throw std::invalid_argument("random sphere needs n, d >= 1");
  Dataset ds;
  ds.points = Matrix(n, d);
  Rng pts(seed, stream::kDataset);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = ds.points.row(i);
    do {
      pts.fill_normal(row);
    } while (norm2(row) == 0.0);
  }
  normalize_rows(ds.points);
  ds.labels.resize(n);
  Rng lab(seed, stream::kLabels);
  switch (mode) {
    case LabelMode::random_signs:
      for (double& y : ds.labels) y = lab.sign();
      break;
    case LabelMode::constant_one:
      for (double& y : ds.labels) y = 1.0;
      break;
    case LabelMode::regression_uniform:
      ds.kind = DatasetKind::regression;
      for (double& y : ds.labels) y = 2.0 * lab.uniform() - 1.0;
      break;
  }
  validate(ds);
  return ds;
}

std::string to_string(DatasetKind k) {
  return k == DatasetKind::classification ? "classification" : "regression";
}

DatasetKind dataset_kind_from_string(const std::string& s) {
  if (s == "classification") return DatasetKind::classification;
  if (s == "regression") return DatasetKind::regression;
  throw std::invalid_argument("unknown dataset kind: " + s);
}

HypercubeLabeling hypercube_labeling_from_string(const std::string& s) {
  if (s == "majority") return HypercubeLabeling::majority;
  if (s == "parity") return HypercubeLabeling::parity;
  throw std::invalid_argument("unknown hypercube labeling: " + s);
}

LabelMode label_mode_from_string(const std::string& s) {
  if (s == "random_signs") return LabelMode::random_signs;
  if (s == "constant_one") return LabelMode::constant_one;
  if (s == "regression_uniform") return LabelMode::regression_uniform;
  throw std::invalid_argument("unknown label mode: " + s);
}

nlohmann::json dataset_to_json(const Dataset& ds) {
  return {{"d", ds.d()},
          {"kind", to_string(ds.kind)},
          {"points", ds.points.to_rows()},
          {"labels", ds.labels}};
}

Dataset dataset_from_json(const nlohmann::json& j) {
  Dataset ds;
  ds.kind = dataset_kind_from_string(j.at("kind").get<std::string>());
  ds.points = Matrix::from_rows(j.at("points").get<std::vector<Vec>>());
  ds.labels = j.at("labels").get<Vec>();
  const auto d = j.at("d").get<std::size_t>();
  if (ds.d() != d) throw std::invalid_argument("dataset json: d does not match point width");
  validate(ds);
  return ds;
}

}  // namespace ntk
