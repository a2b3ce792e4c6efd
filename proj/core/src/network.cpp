#include "ntklab/network.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "ntklab/rng.hpp"

namespace ntk {

double NetParams::scale() const {
  return scale_mode == ScaleMode::unnormalized ? 1.0
                                               : 1.0 / std::sqrt(static_cast<double>(m()));
}

void validate(const NetParams& p) {
  if (p.m() == 0 || p.d() == 0) throw std::invalid_argument("network needs m >= 1 and d >= 1");
  if (p.signs.size() != p.m()) throw std::invalid_argument("sign count does not match width");
  for (double a : p.signs)
    if (a != 1.0 && a != -1.0) throw std::invalid_argument("output signs must be exactly +1 or -1");
  if (p.paired && p.m() % 2 != 0) throw std::invalid_argument("paired network needs even m");
}

NetParams coupled_init(const InitConfig& cfg) {
  if (cfg.m == 0 || cfg.m % 2 != 0) throw std::invalid_argument("coupled init needs even m");
  if (cfg.d == 0) throw std::invalid_argument("coupled init needs d >= 1");
  if (!(cfg.beta > 0.0)) throw std::invalid_argument("coupled init needs beta > 0");
  NetParams p;
  p.weights = Matrix(cfg.m, cfg.d);
  p.signs.resize(cfg.m);
  p.scale_mode = cfg.scale_mode;
  p.paired = true;
  Rng w(cfg.seed, stream::kInit);
  Rng a(cfg.seed, stream::kInitSigns);
  for (std::size_t k = 0; k < cfg.m / 2; ++k) {
    auto r0 = p.weights.row(2 * k);
    w.fill_normal(r0);
    for (double& v : r0) v *= cfg.beta;
    auto r1 = p.weights.row(2 * k + 1);
    std::copy(r0.begin(), r0.end(), r1.begin());
    const double s = a.sign();
    p.signs[2 * k] = s;
    p.signs[2 * k + 1] = -s;
  }
  return p;
}

double relu(double v) { return v > 0.0 ? v : 0.0; }

double preactivation(const NetParams& p, std::size_t r, std::span<const double> x) {
  return dot(p.weights.row(r), x);
}

namespace {

void require_dim(const NetParams& p, std::span<const double> x) {
  if (x.size() != p.d()) throw std::invalid_argument("input dimension does not match network");
}

void require_dim(const NetParams& p, const Dataset& ds) {
  if (ds.d() != p.d()) throw std::invalid_argument("dataset dimension does not match network");
}

}  // namespace

double forward(const NetParams& p, std::span<const double> x) {
  require_dim(p, x);
  const std::size_t m = p.m();
  double total = 0.0;
  std::size_t r = 0;
  for (; r + 1 < m; r += 2) {
    const double pair = p.signs[r] * relu(preactivation(p, r, x)) +
                        p.signs[r + 1] * relu(preactivation(p, r + 1, x));
    total += pair;
  }
  if (r < m) total += p.signs[r] * relu(preactivation(p, r, x));
  return p.scale() * total;
}

Vec forward_all(const NetParams& p, const Dataset& ds) {
  require_dim(p, ds);
  Vec u(ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i) u[i] = forward(p, ds.x(i));
  return u;
}

Matrix grad_f(const NetParams& p, std::span<const double> x) {
  require_dim(p, x);
  Matrix g(p.m(), p.d());
  const double s = p.scale();
  for (std::size_t r = 0; r < p.m(); ++r) {
    if (preactivation(p, r, x) >= 0.0) {
      auto row = g.row(r);
      for (std::size_t k = 0; k < p.d(); ++k) row[k] = s * p.signs[r] * x[k];
    }
  }
  return g;
}

double logistic_loss(double v) {
  return v > 0.0 ? std::log1p(std::exp(-v)) : -v + std::log1p(std::exp(v));
}

double logistic_deriv(double v) {
  if (v > 0.0) {
    const double e = std::exp(-v);
    return -e / (1.0 + e);
  }
  return -1.0 / (1.0 + std::exp(v));
}

double logistic_risk(const NetParams& p, const Dataset& ds) {
  const Vec u = forward_all(p, ds);
  double s = 0.0;
  for (std::size_t i = 0; i < ds.n(); ++i) s += logistic_loss(ds.labels[i] * u[i]);
  return s / static_cast<double>(ds.n());
}

double squared_loss(const NetParams& p, const Dataset& ds) {
  const Vec u = forward_all(p, ds);
  double s = 0.0;
  for (std::size_t i = 0; i < ds.n(); ++i) s += (u[i] - ds.labels[i]) * (u[i] - ds.labels[i]);
  return 0.5 * s;
}

namespace {

// sum_i coef_i * grad_f(x_i), built without materializing each grad_f.
Matrix combine_gradients(const NetParams& p, const Dataset& ds, const Vec& coef) {
  Matrix g(p.m(), p.d());
  const double s = p.scale();
  for (std::size_t r = 0; r < p.m(); ++r) {
    auto row = g.row(r);
    for (std::size_t i = 0; i < ds.n(); ++i) {
      if (coef[i] == 0.0) continue;
      const auto x = ds.x(i);
      if (preactivation(p, r, x) < 0.0) continue;
      const double c = s * p.signs[r] * coef[i];
      for (std::size_t k = 0; k < p.d(); ++k) row[k] += c * x[k];
    }
  }
  return g;
}

}  // namespace

Matrix grad_logistic(const NetParams& p, const Dataset& ds) {
  if (ds.kind != DatasetKind::classification)
    throw std::invalid_argument("logistic loss needs a classification dataset");
  require_dim(p, ds);
  const Vec u = forward_all(p, ds);
  Vec coef(ds.n());
  const double inv_n = 1.0 / static_cast<double>(ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i)
    coef[i] = inv_n * ds.labels[i] * logistic_deriv(ds.labels[i] * u[i]);
  return combine_gradients(p, ds, coef);
}

Matrix grad_squared(const NetParams& p, const Dataset& ds) {
  require_dim(p, ds);
  const Vec u = forward_all(p, ds);
  Vec coef(ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i) coef[i] = u[i] - ds.labels[i];
  return combine_gradients(p, ds, coef);
}

NetParams gd_step(const NetParams& p, const Matrix& gradient, double eta) {
  if (!(eta >= 0.0)) throw std::invalid_argument("step size must be non-negative");
  if (gradient.rows() != p.m() || gradient.cols() != p.d())
    throw std::invalid_argument("gradient shape does not match weights");
  if (eta == 0.0) return p;
  NetParams out = p;
  out.weights = axpy(p.weights, -eta, gradient);
  out.paired = false;
  return out;
}

std::vector<std::vector<bool>> activation_pattern(const NetParams& p, const Dataset& ds) {
  require_dim(p, ds);
  std::vector<std::vector<bool>> pat(p.m(), std::vector<bool>(ds.n()));
  for (std::size_t r = 0; r < p.m(); ++r)
    for (std::size_t i = 0; i < ds.n(); ++i) pat[r][i] = preactivation(p, r, ds.x(i)) >= 0.0;
  return pat;
}

std::string to_string(ScaleMode s) {
  return s == ScaleMode::unnormalized ? "unnormalized" : "inv_sqrt_m";
}

ScaleMode scale_mode_from_string(const std::string& s) {
  if (s == "unnormalized") return ScaleMode::unnormalized;
  if (s == "inv_sqrt_m") return ScaleMode::inv_sqrt_m;
  throw std::invalid_argument("unknown scale mode: " + s);
}

nlohmann::json params_to_json(const NetParams& p) {
  return {{"m", p.m()},
          {"d", p.d()},
          {"scale_mode", to_string(p.scale_mode)},
          {"paired", p.paired},
          {"signs", p.signs},
          {"weights", p.weights.to_rows()}};
}

NetParams params_from_json(const nlohmann::json& j) {
  NetParams p;
  p.weights = Matrix::from_rows(j.at("weights").get<std::vector<Vec>>());
  p.signs = j.at("signs").get<Vec>();
  p.scale_mode = scale_mode_from_string(j.at("scale_mode").get<std::string>());
  p.paired = j.value("paired", false);
  if (p.m() != j.at("m").get<std::size_t>() || p.d() != j.at("d").get<std::size_t>())
    throw std::invalid_argument("params json: m or d does not match weights");
  validate(p);
  return p;
}

}  // namespace ntk
