#include "ntklab/vbar.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ntk {

std::string to_string(VBarKind k) {
  switch (k) {
    case VBarKind::natural_v0: return "natural_v0";
    case VBarKind::circle_rz: return "circle_rz";
    case VBarKind::constant_direction: return "constant_direction";
    case VBarKind::custom_table: return "custom_table";
    case VBarKind::custom_function: return "custom_function";
  }
  return "unknown";
}

VBarMap make_natural_v0(const Dataset& ds) {
  VBarMap m;
  m.kind = VBarKind::natural_v0;
  m.data = ds;
  m.dim = ds.d();
  return m;
}

VBarMap make_circle_rz(std::size_t n) {
  if (n == 0 || n % 4 != 0) throw std::invalid_argument("circle_rz needs n divisible by 4");
  VBarMap m;
  m.kind = VBarKind::circle_rz;
  m.circle_n = n;
  m.data = gen_alternating_circle(n);
  m.dim = 2;
  return m;
}

VBarMap make_constant_direction(const Vec& v) {
  if (v.empty() || norm2(v) > 1.0 + 1e-12)
    throw std::invalid_argument("constant direction must be nonempty with norm <= 1");
  VBarMap m;
  m.kind = VBarKind::constant_direction;
  m.direction = v;
  m.dim = v.size();
  return m;
}

VBarMap make_custom_table(const Dataset& ds, std::map<Pattern, Vec> table) {
  for (const auto& [key, v] : table) {
    if (key.size() != ds.n() || v.size() != ds.d())
      throw std::invalid_argument("custom table entry has the wrong shape");
    if (norm2(v) > 1.0 + 1e-12) throw std::invalid_argument("custom table entry outside unit ball");
  }
  VBarMap m;
  m.kind = VBarKind::custom_table;
  m.data = ds;
  m.table = std::move(table);
  m.dim = ds.d();
  return m;
}

VBarMap make_custom_function(std::size_t dim, std::function<Vec(std::span<const double>)> fn) {
  if (!fn || dim == 0) throw std::invalid_argument("custom function map needs a callable");
  VBarMap m;
  m.kind = VBarKind::custom_function;
  m.fn = std::move(fn);
  m.dim = dim;
  return m;
}

VBarMap make_orthobasis_composed(const Dataset& ds) {
  const std::size_t d = ds.d();
  if (ds.n() != 2 * d) throw std::invalid_argument("orthobasis map needs n = 2d");
  for (std::size_t j = 0; j < d; ++j)
    if (ds.points(j, j) != 1.0 || ds.points(d + j, j) != -1.0)
      throw std::invalid_argument("dataset is not the orthobasis instance");
  if (d > 20) throw std::invalid_argument("orthobasis table limited to d <= 20");
  const double rho = 1.0 / std::sqrt(static_cast<double>(d));
  std::map<Pattern, Vec> table;
  for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
    Pattern key(2 * d);
    Vec v(d);
    for (std::size_t j = 0; j < d; ++j) {
      const bool pos = (mask >> j) & 1U;
      key[j] = pos;
      key[d + j] = !pos;
      v[j] = pos ? rho * ds.labels[j] : -rho * ds.labels[d + j];
    }
    table.emplace(std::move(key), std::move(v));
  }
  return make_custom_table(ds, std::move(table));
}

VBarMap make_two_point_map(const Dataset& ds) {
  if (ds.n() != 2 || ds.d() != 2) throw std::invalid_argument("two-point map needs n = 2, d = 2");
  const auto x1 = ds.x(0);
  const auto x2 = ds.x(1);
  Vec diff{x1[0] - x2[0], x1[1] - x2[1]};
  const double b = norm2(diff);
  for (double& v : diff) v /= b;
  std::map<Pattern, Vec> table;
  table[{true, true}] = diff;
  table[{true, false}] = Vec(x1.begin(), x1.end());
  table[{false, true}] = Vec{-x2[0], -x2[1]};
  return make_custom_table(ds, std::move(table));
}

Pattern strict_pattern(const Dataset& ds, std::span<const double> z) {
  Pattern p(ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i) p[i] = dot(ds.x(i), z) > 0.0;
  return p;
}

Vec cone_sum(const Dataset& ds, std::span<const double> z) {
  Vec s(ds.d(), 0.0);
  for (std::size_t i = 0; i < ds.n(); ++i) {
    if (!(dot(ds.x(i), z) > 0.0)) continue;
    const auto x = ds.x(i);
    for (std::size_t k = 0; k < ds.d(); ++k) s[k] += ds.labels[i] * x[k];
  }
  return s;
}

namespace {

Vec circle_rz_eval(const VBarMap& map, std::span<const double> z) {
  const std::size_t n = map.circle_n;
  const double step = 2.0 * std::numbers::pi / static_cast<double>(n);
  double theta = std::atan2(z[1], z[0]);
  if (theta < 0.0) theta += 2.0 * std::numbers::pi;
  const std::size_t iz = static_cast<std::size_t>(std::floor(theta / step)) % n;
  const double nz = norm2(z);
  for (std::size_t off : {n - 1, std::size_t{0}, std::size_t{1}}) {
    const auto x = map.data.x((iz + off) % n);
    const double cross = (x[0] * z[1] - x[1] * z[0]) / nz;
    if (std::abs(cross) <= 1e-12 && dot(x, z) > 0.0) return {0.0, 0.0};
  }
  const std::size_t j = (iz + 1) % n;
  const auto xa = map.data.x(iz);
  const auto xb = map.data.x(j);
  const double ya = map.data.labels[iz];
  const double yb = map.data.labels[j];
  const double chord = std::hypot(xa[0] - xb[0], xa[1] - xb[1]);
  const double sign = ((n / 4 + 1) % 2 == 0) ? 1.0 : -1.0;
  return {sign * (xa[0] * ya + xb[0] * yb) / chord, sign * (xa[1] * ya + xb[1] * yb) / chord};
}

}  // namespace

Vec vbar_eval(const VBarMap& map, std::span<const double> z) {
  if (z.size() != map.dim) throw std::invalid_argument("vbar_eval: dimension mismatch");
  if (norm2(z) == 0.0) throw std::invalid_argument("vbar_eval: z must be nonzero");
  Vec out;
  switch (map.kind) {
    case VBarKind::natural_v0: {
      out = cone_sum(map.data, z);
      const double nr = norm2(out);
      if (nr == 0.0) return Vec(map.dim, 0.0);
      for (double& v : out) v /= nr;
      break;
    }
    case VBarKind::circle_rz:
      out = circle_rz_eval(map, z);
      break;
    case VBarKind::constant_direction:
      out = map.direction;
      break;
    case VBarKind::custom_table: {
      const auto it = map.table.find(strict_pattern(map.data, z));
      out = it == map.table.end() ? Vec(map.dim, 0.0) : it->second;
      break;
    }
    case VBarKind::custom_function:
      out = map.fn(z);
      break;
  }
  if (out.size() != map.dim || !(norm2(out) <= 1.0 + 1e-12))
    throw std::runtime_error("vbar map produced a vector outside the unit ball");
  return out;
}

}  // namespace ntk
