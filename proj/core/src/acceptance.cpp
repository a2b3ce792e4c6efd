#include "ntklab/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "ntklab/bounds.hpp"
#include "ntklab/dataset.hpp"
#include "ntklab/kernel.hpp"
#include "ntklab/margin.hpp"
#include "ntklab/network.hpp"
#include "ntklab/report.hpp"
#include "ntklab/rng.hpp"
#include "ntklab/train.hpp"
#include "ntklab/vbar.hpp"
#include "parallel.hpp"

namespace ntk {

namespace {

// Pinned tolerances and counts.
constexpr double kSe = 3.0;
constexpr double kExactTol = 1e-12;
constexpr double kCircle8 = 0.135299;
constexpr double kCircle8Tol = 5e-7;
constexpr double kZeroSumTol = 1e-9;
constexpr double kGapTol = 1e-8;
constexpr double kFdTol = 1e-5;
constexpr double kFdStep = 1e-6;
constexpr double kKinkMargin = 1e-3;
constexpr std::size_t kSeeds = 20;

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(double v) { return format_number(v); }

template <class... Parts>
std::string cat(const Parts&... parts) {
  std::ostringstream o;
  ((o << parts), ...);
  return o.str();
}

std::uint64_t sub_seed(std::uint64_t seed, int id, std::uint64_t k = 0) {
  return derive_key(seed, 1000 + static_cast<std::uint64_t>(id), k);
}

NetParams random_net(std::size_t m, std::size_t d, ScaleMode mode, std::uint64_t seed) {
  Rng rng(seed, stream::kInit);
  NetParams p;
  p.weights = Matrix(m, d);
  rng.fill_normal(p.weights.data());
  p.signs.resize(m);
  for (double& a : p.signs) a = rng.sign();
  p.scale_mode = mode;
  return p;
}

std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

Outcome zero_at_init(std::uint64_t seed) {
  double worst = 0.0;
  for (std::uint64_t k = 0; k < 50; ++k) {
    Rng pick(seed, stream::kTrial, k);
    const std::size_t n = 2 + pick.below(30);
    const std::size_t d = 1 + pick.below(10);
    const std::size_t m = 2 * (1 + pick.below(256));
    const double beta = std::pow(10.0, 6.0 * pick.uniform());
    const Dataset ds = gen_random_sphere(n, d, LabelMode::random_signs, derive_key(seed, stream::kDataset, k));
    const NetParams p = coupled_init({.m = m, .d = d, .beta = beta, .seed = derive_key(seed, stream::kInit, k),
                                      .scale_mode = k % 2 ? ScaleMode::inv_sqrt_m : ScaleMode::unnormalized});
    for (double u : forward_all(p, ds)) worst = std::max(worst, std::abs(u));
  }
  return {.passed = worst == 0.0, .detail = cat("max |f_i(W0)| over 50 pairs = ", fmt(worst))};
}

Outcome circle_margin(std::uint64_t seed) {
  const double g4 = margin_circle_exact(4), g8 = margin_circle_exact(8);
  const bool exact_ok = std::abs(g4 - std::sqrt(2.0) / 4.0) <= kExactTol && std::abs(g8 - kCircle8) <= kCircle8Tol;
  const Dataset ds = gen_alternating_circle(12);
  const MarginEstimate est = margin_mc(ds, make_circle_rz(12), 1'000'000, seed);
  const double g12 = margin_circle_exact(12);
  const double se = est.std_errors[est.argmin];
  const bool mc_ok = std::abs(est.gamma - g12) <= kSe * se;
  double lo = INFINITY, hi = 0.0;
  for (std::size_t n = 8; n <= 256; n += 4) {
    const double ng = static_cast<double>(n) * margin_circle_exact(n);
    lo = std::min(lo, ng);
    hi = std::max(hi, ng);
  }
  const bool scale_ok = lo >= 0.5 && hi <= 2.0;
  return {.passed = exact_ok && mc_ok && scale_ok,
          .detail = cat("gamma(4)=", fmt(g4), " gamma(8)=", fmt(g8), "; n=12 MC ", fmt(est.gamma), " vs exact ",
                        fmt(g12), " (SE ", fmt(se), "); n*gamma in [", fmt(lo), ", ", fmt(hi), "]")};
}

Outcome orthobasis_margin(std::uint64_t seed) {
  double worst = 0.0;
  for (std::size_t d = 1; d <= 16; ++d)
    worst = std::max(worst, std::abs(compose_margins(Vec(d, 0.5)) - 0.5 / std::sqrt(static_cast<double>(d))));
  Rng rng(seed, stream::kLabels);
  Vec labels(8);
  for (double& y : labels) y = rng.sign();
  const Dataset ds = gen_orthobasis(4, labels);
  const MarginEstimate est = margin_mc(ds, make_orthobasis_composed(ds), 1'000'000, seed);
  const double se = est.std_errors[est.argmin];
  const bool ok = worst <= kExactTol && std::abs(est.gamma - 0.25) <= kSe * se;
  return {.passed = ok,
          .detail = cat("compose max error ", fmt(worst), "; d=4 MC ", fmt(est.gamma), " vs 0.25 (SE ", fmt(se), ")")};
}

Outcome parity_cube(std::uint64_t seed) {
  const Dataset ds = gen_hypercube(3, HypercubeLabeling::parity);
  double worst = 0.0;
  Vec z(3);
  for (std::size_t done = 0, chunk = 0; done < 100'000; ++chunk) {
    Rng rng(seed, stream::kMonteCarlo, chunk);
    const std::size_t take = std::min<std::size_t>(kMonteCarloChunk, 100'000 - done);
    for (std::size_t s = 0; s < take; ++s) {
      rng.fill_normal(z);
      worst = std::max(worst, norm2(cone_sum(ds, z)));
    }
    done += take;
  }
  const McValue ub = margin_upper_bound_mc(ds, all_indices(ds.n()), 100'000, seed);
  const bool ok = worst <= kZeroSumTol && ub.value == 0.0 && ub.se == 0.0;
  return {.passed = ok, .detail = cat("max cone-sum norm ", fmt(worst), "; bound estimate ", fmt(ub.value), " +- ",
                                      fmt(ub.se))};
}

Outcome two_point(std::uint64_t seed) {
  bool ok = true;
  std::string detail;
  for (double b : {0.1, 0.3, 0.5}) {
    const ConeProbabilityReport cp = cone_probability_check(b, 1'000'000, seed);
    const bool in_bracket = cp.estimate >= b / 7.0 - kSe * cp.se && cp.estimate <= b / 5.0 + kSe * cp.se;
    const Dataset ds = gen_two_points(b);
    const MarginEstimate est = margin_mc(ds, make_two_point_map(ds), 1'000'000, seed + 1);
    const bool below = est.gamma <= b / 2.0 + kSe * est.std_errors[est.argmin];
    ok = ok && in_bracket && below;
    detail += cat("b=", fmt(b), ": P=", fmt(cp.estimate), " in [", fmt(b / 7.0), ", ", fmt(b / 5.0), "] ",
                  in_bracket ? "ok" : "NO", ", gamma=", fmt(est.gamma), below ? " ok" : " NO", "; ");
  }
  return {.passed = ok, .detail = detail};
}

Outcome concentration(std::uint64_t seed) {
  const std::size_t n = 8;
  const Dataset ds = gen_alternating_circle(n);
  KernelMatrix cts = h_cts(ds);
  const double lambda = min_eig(cts);
  const double nd = static_cast<double>(n);
  const double cap = static_cast<double>(std::size_t{1} << 17);
  const double raw = lambda > 0.0 ? std::ceil(16.0 * nd * nd * std::log(2.0 * nd * nd * 2.0 / 0.05) / (lambda * lambda))
                                  : INFINITY;
  const auto m0 = static_cast<std::size_t>(std::min(raw, cap));
  const ConcentrationReport rep = concentration_check(ds, m0, 2, kSeeds, seed);
  const auto passes = static_cast<std::size_t>(std::count(rep.passed.begin(), rep.passed.end(), true));

  std::vector<double> ms, errs;
  for (std::size_t k = 10; k <= 16; k += 2) {
    const std::size_t mm = std::size_t{1} << k;
    ms.push_back(static_cast<double>(mm));
    errs.push_back(concentration_check(ds, mm, 2, kSeeds, seed + k).mean_frobenius_error);
  }
  const double slope = loglog_slope(ms, errs);
  const bool slope_ok = slope >= -0.6 && slope <= -0.4;
  return {.passed = passes >= 18 && slope_ok,
          .detail = cat("lambda=", fmt(lambda), " m0=", m0, (raw > cap ? " (capped)" : ""), " passes ", passes,
                        "/20, mean ||Hdis-Hcts||_F=", fmt(rep.mean_frobenius_error), " vs lambda/4=", fmt(rep.bound),
                        "; slope ", fmt(slope))};
}

Outcome perturbation(std::uint64_t seed) {
  const PerturbationReport rep = perturbation_check(gen_alternating_circle(8), 0.01, 4096, kSeeds, seed);
  const auto passes = static_cast<std::size_t>(std::lround(rep.pass_rate * kSeeds));
  const double worst = *std::max_element(rep.distances.begin(), rep.distances.end());
  return {.passed = passes >= 19,
          .detail = cat(passes, "/20 below 2nR=", fmt(rep.bound), ", largest distance ", fmt(worst))};
}

Outcome squared_convergence(std::uint64_t seed) {
  const std::size_t n = 8;
  const Dataset ds = gen_random_sphere(n, 6, LabelMode::random_signs, sub_seed(seed, 8));
  const double lambda = min_eig(h_cts(ds));
  const double y_sq = norm_sq(ds.labels);
  const double nd = static_cast<double>(n);
  const double raw = std::ceil(4.0 * nd * nd / (lambda * lambda));
  const auto m = static_cast<std::size_t>(std::min(raw, 16384.0));
  TrainConfig base = derive_squared_schedule(n, lambda, 1e-3, y_sq, m);
  base.record_every = 100;
  const double D = movement_radius(n, std::sqrt(y_sq), base.m, lambda);

  std::size_t envelope_ok = 0;
  double worst_disp = 0.0, audited_gap = 0.0;
  for (std::size_t s = 0; s < kSeeds; ++s) {
    TrainConfig cfg = base;
    cfg.seed = derive_key(seed, stream::kTrial, s);
    cfg.decomposition = s == 0;
    const TrainTrace tr = train_squared(ds, cfg);
    envelope_ok += tr.envelope_violations == 0 && !tr.aborted;
    worst_disp = std::max(worst_disp, tr.max_disp);
    if (s == 0) audited_gap = tr.max_rel_gap;
  }
  const bool disp_ok = worst_disp <= D;
  const bool d_below_r = D < base.R;
  return {.passed = envelope_ok >= 18 && audited_gap <= kGapTol && disp_ok && d_below_r,
          .detail = cat("lambda=", fmt(lambda), " m=", base.m, " T=", base.T, "; envelope held on ", envelope_ok,
                        "/20; audited max relative gap ", fmt(audited_gap), "; max displacement ", fmt(worst_disp),
                        " vs D=", fmt(D), "; D<R: ", fmt(D), " < ", fmt(base.R), d_below_r ? " yes" : " NO")};
}

Outcome logistic_convergence(std::uint64_t seed) {
  const std::size_t n = 8;
  const Dataset ds = gen_alternating_circle(n);
  const double gamma = margin_circle_exact(n);
  const double eps = 0.2;
  TrainConfig base = derive_logistic_schedule(n, gamma, eps, 0.1);
  base.record_every = 64;
  const VBarMap map = make_circle_rz(n);
  std::size_t good = 0, risk_ok = 0, flip_free = 0, descent_ok = 0, surrogate_ok = 0;
  double worst_risk = 0.0, worst_surrogate = 0.0;
  for (std::size_t s = 0; s < kSeeds; ++s) {
    TrainConfig cfg = base;
    cfg.seed = derive_key(seed, stream::kTrial, s);
    const NetParams p0 = initial_params(cfg, ds.d());
    const Separator sep = build_separator(p0, map);
    const TrainTrace tr = train_logistic(ds, cfg, &sep);
    const DescentReport dr = descent_inequality_check(tr, sep, cfg.rho);
    const bool a = tr.average_risk <= eps && !tr.aborted;
    const bool b = tr.max_flips == 0;
    const bool c = dr.holds;
    const bool d = dr.max_surrogate <= eps / 4.0;
    risk_ok += a;
    flip_free += b;
    descent_ok += c;
    surrogate_ok += d;
    good += a && b && c && d;
    worst_risk = std::max(worst_risk, tr.average_risk);
    worst_surrogate = std::max(worst_surrogate, dr.max_surrogate);
  }
  return {.passed = good >= 18,
          .detail = cat("m=", base.m, " T=", base.T, "; all conditions on ", good, "/20 (risk ", risk_ok, ", flips ",
                        flip_free, ", descent ", descent_ok, ", surrogate ", surrogate_ok,
                        "); worst average risk ", fmt(worst_risk), ", worst surrogate ", fmt(worst_surrogate))};
}

Outcome separator_margins(std::uint64_t seed) {
  const std::size_t n = 8;
  const Dataset ds = gen_alternating_circle(n);
  const double gamma = margin_circle_exact(n);
  const VBarMap map = make_circle_rz(n);
  const std::size_t m1 = separator_width(n, gamma, 0.1);
  const std::size_t m2 = separator_width_2d(n, gamma, 0.1, 300.0);
  std::size_t pass1 = 0, pass2 = 0;
  double min1 = INFINITY, min2 = INFINITY;
  for (std::size_t s = 0; s < kSeeds; ++s) {
    const NetParams p1 = coupled_init({.m = m1, .d = 2, .beta = 1.0, .seed = derive_key(seed, stream::kTrial, s)});
    const Vec v1 = ntk_margin_at_init(p1, ds, build_separator(p1, map));
    const double g1 = *std::min_element(v1.begin(), v1.end());
    pass1 += g1 >= gamma / 2.0;
    min1 = std::min(min1, g1);
    const NetParams p2 = coupled_init({.m = m2, .d = 2, .beta = 1.0, .seed = derive_key(seed, stream::kPerturb, s)});
    const Vec v2 = ntk_margin_at_init(p2, ds, build_separator_2d(p2, ds, map, gamma));
    const double g2 = *std::min_element(v2.begin(), v2.end());
    pass2 += g2 >= gamma / 4.0;
    min2 = std::min(min2, g2);
  }
  return {.passed = pass1 >= 17 && pass2 >= 17,
          .detail = cat("natural separator m=", m1, ": ", pass1, "/20 >= gamma/2 (min ", fmt(min1),
                        "); net separator m=", m2, ": ", pass2, "/20 >= gamma/4 (min ", fmt(min2), ")")};
}

Outcome lower_bounds(std::uint64_t seed) {
  const std::size_t n = 60, m = 6;
  const Dataset ds = gen_alternating_circle(n);
  std::vector<NetParams> nets;
  for (std::size_t k = 0; k < 20; ++k) nets.push_back(random_net(m, 2, ScaleMode::inv_sqrt_m, sub_seed(seed, 11, k)));
  for (std::size_t k = 0; k < 5; ++k) {
    TrainConfig cfg;
    cfg.loss = LossKind::logistic;
    cfg.m = m;
    cfg.eta = 1.0;
    cfg.T = 3000;
    cfg.beta = 1.0;
    cfg.seed = sub_seed(seed, 11, 100 + k);
    cfg.record_every = cfg.T;
    nets.push_back(train_logistic(ds, cfg).final_params);
  }
  std::size_t fewest = n, worst_bp = 0;
  bool ok = true;
  for (const NetParams& p : nets) {
    const SegmentReport rep = count_segments(p, ds);
    fewest = std::min({fewest, rep.misclassified, rep.misclassified_original});
    worst_bp = std::max(worst_bp, rep.breakpoint_count);
    ok = ok && rep.misclassified >= 3 && rep.misclassified_original >= 3 && rep.breakpoint_count <= 2 * m + 4;
  }
  const std::size_t np = 256;
  const auto mc = static_cast<std::size_t>(std::floor(np * std::log(static_cast<double>(np)) - np));
  const double coupon = coupon_collector_sim(np, mc, 2000, seed);
  const McValue z = quadruple_region_probability(n, 1'000'000, seed);
  const bool z_ok = std::abs(z.value - 6.0 / n) <= kSe * z.se;
  return {.passed = ok && coupon >= 0.85 && z_ok,
          .detail = cat("fewest misclassified ", fewest, " of 25 nets, max breakpoints ", worst_bp, " <= ",
                        2 * m + 4, "; coupon uncovered rate ", fmt(coupon), " at m=", mc, "; Z measure ",
                        fmt(z.value), " vs ", fmt(6.0 / n), " (SE ", fmt(z.se), ")")};
}

Outcome estimator_tightness(std::uint64_t seed) {
  std::vector<double> rates;
  for (std::size_t mp : {16, 64, 256}) rates.push_back(empirical_mean_failure_sim(32, mp, 2000, seed).failure_rate);
  const bool mono = rates[0] > rates[1] && rates[1] > rates[2] && rates[0] > 0.0;
  const McValue big = large_term_probability(32, 1'000'000, seed);
  const bool premise = std::abs(big.value - 0.25) <= kSe * big.se;
  return {.passed = mono && premise,
          .detail = cat("failure rates ", fmt(rates[0]), ", ", fmt(rates[1]), ", ", fmt(rates[2]),
                        "; large-term probability ", fmt(big.value), " vs 0.25 (SE ", fmt(big.se), ")")};
}

Matrix fd_gradient(const NetParams& p, const std::function<double(const NetParams&)>& loss) {
  Matrix g(p.m(), p.d());
  NetParams q = p;
  for (std::size_t k = 0; k < p.weights.data().size(); ++k) {
    const double w = p.weights.data()[k];
    q.weights.data()[k] = w + kFdStep;
    const double up = loss(q);
    q.weights.data()[k] = w - kFdStep;
    const double down = loss(q);
    q.weights.data()[k] = w;
    g.data()[k] = (up - down) / (2.0 * kFdStep);
  }
  return g;
}

Outcome gradient_check(std::uint64_t seed) {
  double worst_log = 0.0, worst_sq = 0.0;
  std::size_t points = 0;
  for (std::uint64_t k = 0; points < 100; ++k) {
    const Dataset ds = gen_random_sphere(6, 3, LabelMode::random_signs, sub_seed(seed, 13, k));
    const NetParams p = random_net(8, 3, k % 2 ? ScaleMode::inv_sqrt_m : ScaleMode::unnormalized, sub_seed(seed, 13, k + 1'000'000));
    double closest = INFINITY;
    for (std::size_t r = 0; r < p.m(); ++r)
      for (std::size_t i = 0; i < ds.n(); ++i) closest = std::min(closest, std::abs(preactivation(p, r, ds.x(i))));
    if (closest <= kKinkMargin) continue;
    ++points;
    const Matrix gl = grad_logistic(p, ds);
    const Matrix fl = fd_gradient(p, [&](const NetParams& q) { return logistic_risk(q, ds); });
    worst_log = std::max(worst_log, frobenius_distance(gl, fl) / frobenius(gl));
    const Matrix gs = grad_squared(p, ds);
    const Matrix fs = fd_gradient(p, [&](const NetParams& q) { return squared_loss(q, ds); });
    worst_sq = std::max(worst_sq, frobenius_distance(gs, fs) / frobenius(gs));
  }
  return {.passed = worst_log <= kFdTol && worst_sq <= kFdTol,
          .detail = cat("max relative error over 100 points: logistic ", fmt(worst_log), ", squared ", fmt(worst_sq))};
}

using Runner = Outcome (*)(std::uint64_t);

struct Entry {
  const char* name;
  Runner run;
};

const Entry kEntries[kCriterionCount] = {
    {"zero output at coupled init", zero_at_init},
    {"exact circle margin", circle_margin},
    {"orthobasis margin", orthobasis_margin},
    {"odd hypercube parity has zero margin", parity_cube},
    {"two-point bounds", two_point},
    {"kernel concentration", concentration},
    {"kernel perturbation", perturbation},
    {"squared-loss linear convergence", squared_convergence},
    {"logistic convergence", logistic_convergence},
    {"separator margins", separator_margins},
    {"lower bounds", lower_bounds},
    {"estimator tightness direction", estimator_tightness},
    {"gradient correctness", gradient_check},
};

}  // namespace

std::string criterion_name(int id) {
  if (id < 1 || id > kCriterionCount) throw std::invalid_argument("criterion id out of range");
  return kEntries[id - 1].name;
}

CriterionResult run_criterion(int id, std::uint64_t seed) {
  if (id < 1 || id > kCriterionCount) throw std::invalid_argument("criterion id out of range");
  const auto start = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    const Outcome o = kEntries[id - 1].run(derive_key(seed, static_cast<std::uint64_t>(id)));
    r.passed = o.passed;
    r.detail = o.detail;
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("error: ") + e.what();
  }
  r.id = id;
  r.name = kEntries[id - 1].name;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::vector<CriterionResult> run_acceptance(std::uint64_t seed, std::size_t jobs, std::vector<int> ids) {
  if (ids.empty())
    for (int k = 1; k <= kCriterionCount; ++k) ids.push_back(k);
  return detail::parallel_map(ids.size(), jobs, [&](std::size_t k) { return run_criterion(ids[k], seed); });
}

std::string concentration_on_sphere_note(std::uint64_t seed) {
  const std::size_t n = 8;
  const Dataset ds = gen_random_sphere(n, 6, LabelMode::random_signs, sub_seed(seed, 8));
  const double lambda = min_eig(h_cts(ds));
  const double nd = static_cast<double>(n);
  const double raw = std::ceil(16.0 * nd * nd * std::log(2.0 * nd * nd * 2.0 / 0.05) / (lambda * lambda));
  const auto m0 = static_cast<std::size_t>(std::min(raw, static_cast<double>(std::size_t{1} << 17)));
  const ConcentrationReport rep = concentration_check(ds, m0, 2, kSeeds, seed);
  const auto passes = std::count(rep.passed.begin(), rep.passed.end(), true);
  return cat("random sphere n=8 d=6: lambda=", fmt(lambda), " m0=", m0, " passes ", passes,
             "/20, mean ||Hdis-Hcts||_F=", fmt(rep.mean_frobenius_error), " vs lambda/4=", fmt(rep.bound));
}

}  // namespace ntk
