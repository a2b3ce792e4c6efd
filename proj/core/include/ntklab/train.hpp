#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ntklab/dataset.hpp"
#include "ntklab/margin.hpp"
#include "ntklab/network.hpp"

namespace ntk {

enum class LossKind { logistic, squared };

/// direct: materialize gradients and call gd_step every iteration.
/// grouped: exact incremental engine that tracks predictions through the
/// n x n co-activation counts and re-examines a row only when its
/// accumulated movement bound reaches its distance to a sign change.
enum class TrainEngine { direct, grouped };

struct TrainConfig {
  LossKind loss = LossKind::logistic;
  double epsilon = 0.1;
  double delta = 0.1;
  double gamma = 0.0;   // logistic
  double lambda = 0.0;  // squared
  std::size_t m = 0;
  double eta = 0.0;
  std::size_t T = 0;
  double beta = 1.0;
  double rho = 0.0;
  double R = 0.0;
  double width_constant = 4.0;
  std::uint64_t seed = 0;
  ScaleMode scale_mode = ScaleMode::inv_sqrt_m;
  TrainEngine engine = TrainEngine::grouped;
  std::size_t record_every = 1;
  /// Compute the four-term residual decomposition every step (squared loss).
  bool decomposition = false;
};

void validate(const TrainConfig& cfg);

/// m = 2 ceil(8 ln(2n/delta)/gamma^2), rho = 2 ln(4/eps)/gamma,
/// beta = 8 rho^2 n sqrt(m) / (5 eps delta), eta = 1, T = ceil(2 rho^2/eps).
TrainConfig derive_logistic_schedule(std::size_t n, double gamma, double epsilon, double delta);

/// eta = lambda/(4 n^2 m), R = lambda/(64 n),
/// T = ceil(2 ln(||y - u(0)||^2/eps) / (m eta lambda)) capped at 10^6,
/// m = m_override or ceil(c n^2 / lambda^2) rounded up to even.
TrainConfig derive_squared_schedule(std::size_t n, double lambda, double epsilon,
                                    double y_norm_sq, std::optional<std::size_t> m_override,
                                    double width_constant = 4.0);

inline constexpr std::size_t kSquaredStepCap = 1'000'000;

/// Coupled initialization implied by a config.
NetParams initial_params(const TrainConfig& cfg, std::size_t d);

struct TraceRow {
  std::size_t step = 0;
  double loss = 0.0;  // R(W_t) or ||y - u(t)||^2
  double max_disp = 0.0;
  std::size_t flips = 0;
  double C1 = 0.0, C2 = 0.0, C3 = 0.0, C4 = 0.0;
  double gap = 0.0;
};

struct TrainTrace {
  LossKind loss = LossKind::logistic;
  TrainConfig cfg;
  std::size_t steps_run = 0;
  /// Loss at every step 0..steps_run.
  Vec loss_per_step;
  /// Surrogate risk R^(t)(Wbar) at every step 0..steps_run-1 (logistic with
  /// a separator only).
  Vec surrogate_per_step;
  std::vector<TraceRow> rows;

  double average_risk = 0.0;  // (1/T) sum_{t<T} R(W_t)
  std::size_t max_flips = 0;
  double max_disp = 0.0;
  /// Largest ratio max_disp(t) / (t / sqrt(m)) seen at recorded steps.
  double disp_ratio_logistic = 0.0;
  std::size_t envelope_violations = 0;
  std::size_t monotone_violations = 0;
  double max_rel_gap = 0.0;
  /// Smallest C1 / (-m eta lambda ||y-u||^2) over steps; at least 1 when the
  /// first-order decrease reached its lower bound on every step.
  double min_C1_ratio = 0.0;
  /// Largest C4 / (m^2 eta^2 n^2 ||y-u||^2) over steps.
  double max_C4_ratio = 0.0;
  double wbar_dist_sq = 0.0;  // ||W0 - Wbar||_F^2
  std::size_t row_rechecks = 0;
  bool aborted = false;
  std::string abort_reason;

  NetParams init_params;
  NetParams final_params;
};

TrainTrace train_logistic(const Dataset& ds, const TrainConfig& cfg,
                          const Separator* sep = nullptr);
TrainTrace train_squared(const Dataset& ds, const TrainConfig& cfg);

struct DescentReport {
  std::size_t steps = 0;
  double max_violation = 0.0;      // max_t (lhs - rhs) / max(1, rhs)
  double max_surrogate = 0.0;
  bool holds = false;
};

/// eta sum_{tau<t} R(W_tau) <= ||W0 - Wbar||^2 + 2 eta sum_{tau<t} R^(tau)(Wbar)
/// for every t, with Wbar = W0 + rho U.
DescentReport descent_inequality_check(const TrainTrace& trace, const Separator& sep, double rho);

/// (1/n) sum_i ln(1 + exp(-y_i <grad f_i(W_t), Wbar>)).
double surrogate_risk(const NetParams& params_t, const Matrix& wbar, const Dataset& ds);

struct StepTerms {
  double C1 = 0.0, C2 = 0.0, C3 = 0.0, C4 = 0.0;
  double lhs = 0.0;  // ||y - u(t+1)||^2
  double rhs = 0.0;  // ||y - u(t)||^2 + C1 + C2 + C3 + C4
  double gap = 0.0;
  double rel_gap = 0.0;
};

/// Four-term decomposition of one squared-loss step from the kernel
/// definitions. Flip sets use |<w_r(0), x_i>| < R.
StepTerms step_decomposition(const NetParams& params0, const NetParams& params_t,
                             const NetParams& params_t1, const Dataset& ds, double R,
                             double eta);

struct MovementReport {
  double max_disp = 0.0;
  double D = 0.0;
  double R = 0.0;
  bool within_D = false;
  bool D_below_R = false;
};

/// D = 4 sqrt(n) ||y - u(0)|| / (m lambda).
double movement_radius(std::size_t n, double residual0_norm, std::size_t m, double lambda);
MovementReport weight_movement_check(const TrainTrace& trace, double D);

std::size_t misclassification_count(const NetParams& params, const Dataset& ds);

double max_row_displacement(const NetParams& a, const NetParams& b);
std::size_t pattern_flips(const NetParams& a, const NetParams& b, const Dataset& ds);

std::string to_string(LossKind k);
std::string to_string(TrainEngine e);
LossKind loss_kind_from_string(const std::string& s);
TrainEngine engine_from_string(const std::string& s);
nlohmann::json config_to_json(const TrainConfig& cfg);
TrainConfig config_from_json(const nlohmann::json& j);

}  // namespace ntk
