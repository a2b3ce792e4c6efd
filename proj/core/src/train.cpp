#include "ntklab/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "engine.hpp"
#include "ntklab/kernel.hpp"

namespace ntk {

void validate(const TrainConfig& cfg) {
  if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");
  if (!(cfg.eta > 0.0)) throw std::invalid_argument("eta must be positive");
  if (cfg.m == 0 || cfg.m % 2 != 0) throw std::invalid_argument("width m must be even and positive");
  if (!(cfg.beta > 0.0)) throw std::invalid_argument("beta must be positive");
  if (cfg.record_every == 0) throw std::invalid_argument("record_every must be positive");
}

TrainConfig derive_logistic_schedule(std::size_t n, double gamma, double epsilon, double delta) {
  if (!(gamma > 0.0)) throw std::invalid_argument("logistic schedule needs gamma > 0");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");
  TrainConfig cfg;
  cfg.loss = LossKind::logistic;
  cfg.gamma = gamma;
  cfg.epsilon = epsilon;
  cfg.delta = delta;
  cfg.m = separator_width(n, gamma, delta);
  cfg.rho = 2.0 * std::log(4.0 / epsilon) / gamma;
  cfg.beta = 8.0 * cfg.rho * cfg.rho * static_cast<double>(n) *
             std::sqrt(static_cast<double>(cfg.m)) / (5.0 * epsilon * delta);
  cfg.eta = 1.0;
  cfg.T = static_cast<std::size_t>(std::ceil(2.0 * cfg.rho * cfg.rho / epsilon));
  cfg.scale_mode = ScaleMode::inv_sqrt_m;
  return cfg;
}

TrainConfig derive_squared_schedule(std::size_t n, double lambda, double epsilon,
                                    double y_norm_sq, std::optional<std::size_t> m_override,
                                    double width_constant) {
  if (!(lambda > 0.0)) throw std::invalid_argument("squared schedule needs lambda > 0");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (n == 0) throw std::invalid_argument("squared schedule needs n >= 1");
  const double nd = static_cast<double>(n);
  TrainConfig cfg;
  cfg.loss = LossKind::squared;
  cfg.lambda = lambda;
  cfg.epsilon = epsilon;
  cfg.width_constant = width_constant;
  if (m_override) {
    cfg.m = *m_override;
  } else {
    const double mm = std::ceil(width_constant * nd * nd / (lambda * lambda));
    if (!(mm < 1e9)) throw std::invalid_argument("derived width is too large");
    cfg.m = static_cast<std::size_t>(mm);
  }
  cfg.m += cfg.m % 2;
  const double md = static_cast<double>(cfg.m);
  cfg.eta = lambda / (4.0 * nd * nd * md);
  cfg.R = lambda / (64.0 * nd);
  cfg.beta = 1.0;
  cfg.scale_mode = ScaleMode::unnormalized;
  if (y_norm_sq <= epsilon) {
    cfg.T = 0;
  } else {
    const double t = std::ceil(2.0 * std::log(y_norm_sq / epsilon) / (md * cfg.eta * lambda));
    cfg.T = t >= static_cast<double>(kSquaredStepCap) ? kSquaredStepCap : static_cast<std::size_t>(t);
  }
  return cfg;
}

NetParams initial_params(const TrainConfig& cfg, std::size_t d) {
  return coupled_init({.m = cfg.m, .d = d, .beta = cfg.beta, .seed = cfg.seed, .scale_mode = cfg.scale_mode});
}

namespace {

std::unique_ptr<detail::Engine> make_engine(const Dataset& ds, const NetParams& p0,
                                            const TrainConfig& cfg, const detail::EngineOptions& opt) {
  return cfg.engine == TrainEngine::direct ? detail::make_direct_engine(ds, p0, opt)
                                           : detail::make_grouped_engine(ds, p0, opt);
}

bool recorded(std::size_t t, std::size_t total, std::size_t every) {
  return t % every == 0 || t == total;
}

}  // namespace

TrainTrace train_logistic(const Dataset& ds, const TrainConfig& cfg, const Separator* sep) {
  if (ds.kind != DatasetKind::classification)
    throw std::invalid_argument("logistic training needs a classification dataset");
  if (cfg.loss != LossKind::logistic) throw std::invalid_argument("config is not a logistic config");
  validate(cfg);
  TrainTrace tr;
  tr.loss = LossKind::logistic;
  tr.cfg = cfg;
  tr.init_params = initial_params(cfg, ds.d());
  const std::size_t n = ds.n();
  const double inv_n = 1.0 / static_cast<double>(n);

  detail::EngineOptions opt;
  opt.eta = cfg.eta;
  if (sep) {
    if (sep->rows.rows() != cfg.m || sep->rows.cols() != ds.d())
      throw std::invalid_argument("separator shape does not match the schedule");
    opt.wbar = axpy(tr.init_params.weights, cfg.rho, sep->rows);
    tr.wbar_dist_sq = cfg.rho * cfg.rho * frobenius(sep->rows) * frobenius(sep->rows);
  }
  auto engine = make_engine(ds, tr.init_params, cfg, opt);
  const double sqrt_m = std::sqrt(static_cast<double>(cfg.m));

  Vec coef(n);
  for (std::size_t t = 0;; ++t) {
    const Vec& u = engine->outputs();
    double risk = 0.0;
    for (std::size_t i = 0; i < n; ++i) risk += logistic_loss(ds.labels[i] * u[i]);
    risk *= inv_n;
    tr.loss_per_step.push_back(risk);
    tr.max_flips = std::max(tr.max_flips, engine->flips());
    if (recorded(t, cfg.T, cfg.record_every)) {
      TraceRow row;
      row.step = t;
      row.loss = risk;
      row.max_disp = engine->max_displacement();
      row.flips = engine->flips();
      tr.max_disp = std::max(tr.max_disp, row.max_disp);
      if (t > 0) tr.disp_ratio_logistic = std::max(tr.disp_ratio_logistic, row.max_disp * sqrt_m / static_cast<double>(t));
      tr.rows.push_back(row);
    }
    if (!std::isfinite(risk)) {
      tr.aborted = true;
      tr.abort_reason = "non-finite risk at step " + std::to_string(t);
      break;
    }
    if (t == cfg.T) break;
    if (sep) {
      const Vec q = engine->surrogate_margins();
      double sr = 0.0;
      for (double v : q) sr += logistic_loss(v);
      tr.surrogate_per_step.push_back(sr * inv_n);
    }
    for (std::size_t i = 0; i < n; ++i)
      coef[i] = inv_n * ds.labels[i] * logistic_deriv(ds.labels[i] * u[i]);
    engine->step(coef);
    tr.steps_run = t + 1;
  }
  double sum = 0.0;
  for (std::size_t t = 0; t < tr.steps_run; ++t) sum += tr.loss_per_step[t];
  tr.average_risk = tr.steps_run > 0 ? sum / static_cast<double>(tr.steps_run) : tr.loss_per_step.front();
  tr.row_rechecks = engine->rechecks();
  tr.final_params = engine->params();
  return tr;
}

TrainTrace train_squared(const Dataset& ds, const TrainConfig& cfg) {
  if (cfg.loss != LossKind::squared) throw std::invalid_argument("config is not a squared-loss config");
  validate(cfg);
  if (cfg.decomposition && cfg.scale_mode != ScaleMode::unnormalized)
    throw std::invalid_argument("decomposition is defined for the unnormalized network");
  TrainTrace tr;
  tr.loss = LossKind::squared;
  tr.cfg = cfg;
  tr.init_params = initial_params(cfg, ds.d());
  const std::size_t n = ds.n();

  detail::EngineOptions opt;
  opt.eta = cfg.eta;
  opt.R = cfg.R;
  opt.decomposition = cfg.decomposition;
  auto engine = make_engine(ds, tr.init_params, cfg, opt);

  const double md = static_cast<double>(cfg.m);
  const double nd = static_cast<double>(n);
  const double contraction = 1.0 - md * cfg.eta * cfg.lambda / 2.0;
  double envelope = 0.0;
  double prev = 0.0;
  tr.min_C1_ratio = std::numeric_limits<double>::infinity();

  Vec coef(n);
  for (std::size_t t = 0;; ++t) {
    const Vec& u = engine->outputs();
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) res += (ds.labels[i] - u[i]) * (ds.labels[i] - u[i]);
    tr.loss_per_step.push_back(res);
    if (t == 0) {
      envelope = res;
    } else {
      envelope *= contraction;
      if (res > envelope * (1.0 + 1e-10)) ++tr.envelope_violations;
      if (res > prev * (1.0 + 1e-12)) ++tr.monotone_violations;
    }
    prev = res;
    tr.max_flips = std::max(tr.max_flips, engine->flips());
    const bool rec = recorded(t, cfg.T, cfg.record_every);
    if (rec) {
      TraceRow row;
      row.step = t;
      row.loss = res;
      row.max_disp = engine->max_displacement();
      row.flips = engine->flips();
      tr.max_disp = std::max(tr.max_disp, row.max_disp);
      tr.rows.push_back(row);
    }
    if (!std::isfinite(res)) {
      tr.aborted = true;
      tr.abort_reason = "non-finite residual at step " + std::to_string(t);
      break;
    }
    if (t == cfg.T) break;
    for (std::size_t i = 0; i < n; ++i) coef[i] = u[i] - ds.labels[i];
    engine->step(coef);
    tr.steps_run = t + 1;
    if (cfg.decomposition) {
      const StepTerms st = engine->last_terms();
      tr.max_rel_gap = std::max(tr.max_rel_gap, st.rel_gap);
      if (res > 0.0) {
        const double lam_term = md * cfg.eta * cfg.lambda * res;
        tr.min_C1_ratio = std::min(tr.min_C1_ratio, -st.C1 / lam_term);
        tr.max_C4_ratio = std::max(tr.max_C4_ratio, st.C4 / (md * md * cfg.eta * cfg.eta * nd * nd * res));
      }
      if (rec && !tr.rows.empty()) {
        TraceRow& row = tr.rows.back();
        row.C1 = st.C1;
        row.C2 = st.C2;
        row.C3 = st.C3;
        row.C4 = st.C4;
        row.gap = st.gap;
      }
    }
  }
  if (!cfg.decomposition || tr.steps_run == 0) tr.min_C1_ratio = 0.0;
  tr.average_risk = tr.loss_per_step.back();
  tr.row_rechecks = engine->rechecks();
  tr.final_params = engine->params();
  return tr;
}

DescentReport descent_inequality_check(const TrainTrace& trace, const Separator& sep, double rho) {
  if (trace.loss != LossKind::logistic) throw std::invalid_argument("descent check needs a logistic trace");
  if (trace.surrogate_per_step.size() != trace.steps_run)
    throw std::invalid_argument("trace carries no surrogate risks; train with a separator");
  const double f = frobenius(sep.rows);
  const double dist = rho * rho * f * f;
  const double eta = trace.cfg.eta;
  DescentReport rep;
  rep.steps = trace.steps_run;
  double lhs = 0.0, rhs = dist;
  rep.max_violation = (lhs - rhs) / std::max(1.0, rhs);
  for (std::size_t t = 0; t < trace.steps_run; ++t) {
    lhs += eta * trace.loss_per_step[t];
    rhs += 2.0 * eta * trace.surrogate_per_step[t];
    rep.max_violation = std::max(rep.max_violation, (lhs - rhs) / std::max(1.0, rhs));
    rep.max_surrogate = std::max(rep.max_surrogate, trace.surrogate_per_step[t]);
  }
  rep.holds = rep.max_violation <= 1e-8;
  return rep;
}

double surrogate_risk(const NetParams& params_t, const Matrix& wbar, const Dataset& ds) {
  if (wbar.rows() != params_t.m() || wbar.cols() != params_t.d())
    throw std::invalid_argument("reference point shape does not match network");
  const double s = params_t.scale();
  double total = 0.0;
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const auto x = ds.x(i);
    auto term = [&](std::size_t r) {
      return preactivation(params_t, r, x) >= 0.0 ? params_t.signs[r] * dot(wbar.row(r), x) : 0.0;
    };
    double acc = 0.0;
    std::size_t r = 0;
    for (; r + 1 < params_t.m(); r += 2) acc += term(r) + term(r + 1);
    if (r < params_t.m()) acc += term(r);
    total += logistic_loss(ds.labels[i] * s * acc);
  }
  return total / static_cast<double>(ds.n());
}

StepTerms step_decomposition(const NetParams& params0, const NetParams& params_t,
                             const NetParams& params_t1, const Dataset& ds, double R, double eta) {
  const std::size_t n = ds.n();
  const Vec u = forward_all(params_t, ds);
  const Vec u1 = forward_all(params_t1, ds);
  Vec r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = ds.labels[i] - u[i];
  const KernelMatrix H = h_t(params_t, ds);
  const KernelMatrix Hp = h_t_perp(params0, params_t, ds, R);
  const double m = static_cast<double>(params_t.m());
  const double s = params_t.scale();

  Vec v2(n, 0.0);
  for (std::size_t k = 0; k < params_t.m(); ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto x = ds.x(i);
      if (!(std::abs(preactivation(params0, k, x)) < R)) continue;
      v2[i] += s * params_t.signs[k] *
               (relu(preactivation(params_t1, k, x)) - relu(preactivation(params_t, k, x)));
    }
  }
  StepTerms st;
  st.C1 = -2.0 * m * eta * s * s * bilinear(r, H.entries, r);
  st.C2 = 2.0 * m * eta * s * s * bilinear(r, Hp.entries, r);
  st.C3 = -2.0 * dot(r, v2);
  double c4 = 0.0, lhs = 0.0, r_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    c4 += (u1[i] - u[i]) * (u1[i] - u[i]);
    lhs += (ds.labels[i] - u1[i]) * (ds.labels[i] - u1[i]);
    r_sq += r[i] * r[i];
  }
  st.C4 = c4;
  st.lhs = lhs;
  st.rhs = r_sq + st.C1 + st.C2 + st.C3 + st.C4;
  st.gap = std::abs(st.lhs - st.rhs);
  st.rel_gap = r_sq > 0.0 ? st.gap / r_sq : st.gap;
  return st;
}

double movement_radius(std::size_t n, double residual0_norm, std::size_t m, double lambda) {
  return 4.0 * std::sqrt(static_cast<double>(n)) * residual0_norm / (static_cast<double>(m) * lambda);
}

MovementReport weight_movement_check(const TrainTrace& trace, double D) {
  MovementReport rep;
  rep.max_disp = trace.max_disp;
  rep.D = D;
  rep.R = trace.cfg.R;
  rep.within_D = rep.max_disp <= D;
  rep.D_below_R = D < rep.R;
  return rep;
}

std::size_t misclassification_count(const NetParams& params, const Dataset& ds) {
  std::size_t bad = 0;
  for (std::size_t i = 0; i < ds.n(); ++i) bad += ds.labels[i] * forward(params, ds.x(i)) <= 0.0;
  return bad;
}

double max_row_displacement(const NetParams& a, const NetParams& b) {
  if (a.m() != b.m() || a.d() != b.d()) throw std::invalid_argument("parameter shapes differ");
  double best = 0.0;
  for (std::size_t r = 0; r < a.m(); ++r) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.d(); ++k) {
      const double d = a.weights(r, k) - b.weights(r, k);
      s += d * d;
    }
    best = std::max(best, std::sqrt(s));
  }
  return best;
}

std::size_t pattern_flips(const NetParams& a, const NetParams& b, const Dataset& ds) {
  const auto pa = activation_pattern(a, ds);
  const auto pb = activation_pattern(b, ds);
  std::size_t c = 0;
  for (std::size_t r = 0; r < pa.size(); ++r)
    for (std::size_t i = 0; i < ds.n(); ++i) c += pa[r][i] != pb[r][i];
  return c;
}

std::string to_string(LossKind k) { return k == LossKind::logistic ? "logistic" : "squared"; }
std::string to_string(TrainEngine e) { return e == TrainEngine::direct ? "direct" : "grouped"; }

LossKind loss_kind_from_string(const std::string& s) {
  if (s == "logistic") return LossKind::logistic;
  if (s == "squared") return LossKind::squared;
  throw std::invalid_argument("unknown loss: " + s);
}

TrainEngine engine_from_string(const std::string& s) {
  if (s == "direct") return TrainEngine::direct;
  if (s == "grouped") return TrainEngine::grouped;
  throw std::invalid_argument("unknown engine: " + s);
}

nlohmann::json config_to_json(const TrainConfig& c) {
  return {{"loss", to_string(c.loss)},   {"epsilon", c.epsilon},
          {"delta", c.delta},            {"gamma", c.gamma},
          {"lambda", c.lambda},          {"m", c.m},
          {"eta", c.eta},                {"T", c.T},
          {"beta", c.beta},              {"rho", c.rho},
          {"R", c.R},                    {"width_constant", c.width_constant},
          {"seed", c.seed},              {"scale_mode", to_string(c.scale_mode)},
          {"engine", to_string(c.engine)}, {"record_every", c.record_every},
          {"decomposition", c.decomposition}};
}

TrainConfig config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.loss = loss_kind_from_string(j.at("loss").get<std::string>());
  c.epsilon = j.value("epsilon", c.epsilon);
  c.delta = j.value("delta", c.delta);
  c.gamma = j.value("gamma", c.gamma);
  c.lambda = j.value("lambda", c.lambda);
  c.m = j.value("m", c.m);
  c.eta = j.value("eta", c.eta);
  c.T = j.value("T", c.T);
  c.beta = j.value("beta", c.beta);
  c.rho = j.value("rho", c.rho);
  c.R = j.value("R", c.R);
  c.width_constant = j.value("width_constant", c.width_constant);
  c.seed = j.value("seed", c.seed);
  if (j.contains("scale_mode")) c.scale_mode = scale_mode_from_string(j.at("scale_mode").get<std::string>());
  if (j.contains("engine")) c.engine = engine_from_string(j.at("engine").get<std::string>());
  c.record_every = j.value("record_every", c.record_every);
  c.decomposition = j.value("decomposition", c.decomposition);
  return c;
}

}  // namespace ntk
