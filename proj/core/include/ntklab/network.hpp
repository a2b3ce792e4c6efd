#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "ntklab/dataset.hpp"
#include "ntklab/linalg.hpp"

namespace ntk {

enum class ScaleMode { unnormalized, inv_sqrt_m };

/// Hidden weights W (m x d), fixed output signs a, and the output scale.
struct NetParams {
  Matrix weights;
  Vec signs;
  ScaleMode scale_mode = ScaleMode::inv_sqrt_m;
  bool paired = false;

  std::size_t m() const { return weights.rows(); }
  std::size_t d() const { return weights.cols(); }
  double scale() const;
};

struct InitConfig {
  std::size_t m = 2;
  std::size_t d = 1;
  double beta = 1.0;
  std::uint64_t seed = 0;
  ScaleMode scale_mode = ScaleMode::inv_sqrt_m;
};

void validate(const NetParams& p);

/// m/2 Gaussian rows scaled by beta, each stored twice in adjacent slots
/// (2i, 2i+1) with opposite output signs.
NetParams coupled_init(const InitConfig& cfg);

double relu(double v);
/// Pre-activation <w_r, x>.
double preactivation(const NetParams& p, std::size_t r, std::span<const double> x);

/// s * sum_r a_r relu(<w_r,x>), accumulated one adjacent pair at a time.
double forward(const NetParams& p, std::span<const double> x);
Vec forward_all(const NetParams& p, const Dataset& ds);

/// Row r is s a_r x when <w_r,x> >= 0, else zero.
Matrix grad_f(const NetParams& p, std::span<const double> x);

double logistic_loss(double v);
/// Derivative of logistic_loss; always in (-1, 0).
double logistic_deriv(double v);

/// R(W) = (1/n) sum_i ln(1 + exp(-y_i f_i(W))).
double logistic_risk(const NetParams& p, const Dataset& ds);
/// L(W) = 1/2 sum_i (f_i(W) - y_i)^2.
double squared_loss(const NetParams& p, const Dataset& ds);

Matrix grad_logistic(const NetParams& p, const Dataset& ds);
Matrix grad_squared(const NetParams& p, const Dataset& ds);

/// weights - eta * gradient. Negative eta is rejected; eta = 0 is the identity.
NetParams gd_step(const NetParams& p, const Matrix& gradient, double eta);

/// (r, i) is 1 iff <w_r, x_i> >= 0.
std::vector<std::vector<bool>> activation_pattern(const NetParams& p, const Dataset& ds);

std::string to_string(ScaleMode s);
ScaleMode scale_mode_from_string(const std::string& s);

nlohmann::json params_to_json(const NetParams& p);
NetParams params_from_json(const nlohmann::json& j);

}  // namespace ntk
