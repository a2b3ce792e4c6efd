#include "ntklab/bounds.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ntklab/rng.hpp"
#include "ntklab/vbar.hpp"

namespace ntk {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap(double a) {
  a = std::fmod(a, kTwoPi);
  return a < 0.0 ? a + kTwoPi : a;
}

// Position along the l1 sphere, in [0, 4): one unit per edge, counterclockwise
// from (1, 0).
double l1_param(double x, double y) {
  const double s = std::abs(x) + std::abs(y);
  x /= s;
  y /= s;
  if (x >= 0.0 && y >= 0.0) return y;               // (1,0) -> (0,1)
  if (x < 0.0 && y >= 0.0) return 1.0 + (-x);       // (0,1) -> (-1,0)
  if (x < 0.0 && y < 0.0) return 2.0 + (-y);        // (-1,0) -> (0,-1)
  return 3.0 + x;                                   // (0,-1) -> (1,0)
}

std::array<double, 2> l1_point(double t) {
  const int edge = static_cast<int>(std::floor(t)) % 4;
  const double f = t - std::floor(t);
  switch (edge) {
    case 0: return {1.0 - f, f};
    case 1: return {-f, 1.0 - f};
    case 2: return {-(1.0 - f), -f};
    default: return {f, -(1.0 - f)};
  }
}

}  // namespace

SegmentReport count_segments(const NetParams& params, const Dataset& ds) {
  if (params.d() != 2 || ds.d() != 2) throw std::invalid_argument("count_segments needs d = 2");
  const double eps = 1e-12;
  std::vector<double> ts{0.0, 1.0, 2.0, 3.0};
  for (std::size_t r = 0; r < params.m(); ++r) {
    const double w0 = params.weights(r, 0), w1 = params.weights(r, 1);
    if (w0 == 0.0 && w1 == 0.0) continue;
    ts.push_back(l1_param(-w1, w0));
    ts.push_back(l1_param(w1, -w0));
  }
  std::sort(ts.begin(), ts.end());
  std::vector<double> uniq;
  for (double t : ts)
    if (uniq.empty() || t - uniq.back() > eps) uniq.push_back(t);
  if (uniq.size() > 1 && uniq.front() + 4.0 - uniq.back() <= eps) uniq.pop_back();

  SegmentReport rep;
  rep.breakpoint_count = uniq.size();
  rep.bound_2m_plus_4 = 2 * params.m() + 4;

  // Gradient of f on each piece, identified from the firing set at its midpoint.
  const std::size_t k = uniq.size();
  std::vector<std::array<double, 2>> grads(k);
  std::vector<int> edges(k);
  for (std::size_t p = 0; p < k; ++p) {
    const double lo = uniq[p];
    const double hi = p + 1 < k ? uniq[p + 1] : uniq[0] + 4.0;
    const double mid = 0.5 * (lo + hi);
    const auto x = l1_point(mid >= 4.0 ? mid - 4.0 : mid);
    std::array<double, 2> g{0.0, 0.0};
    for (std::size_t r = 0; r < params.m(); ++r) {
      if (params.weights(r, 0) * x[0] + params.weights(r, 1) * x[1] >= 0.0) {
        g[0] += params.signs[r] * params.weights(r, 0);
        g[1] += params.signs[r] * params.weights(r, 1);
      }
    }
    grads[p] = g;
    edges[p] = static_cast<int>(std::floor(lo + 1e-9)) % 4;
  }
  std::size_t segments = k;
  for (std::size_t p = 0; p < k; ++p) {
    const std::size_t q = (p + 1) % k;
    if (k > 1 && edges[p] == edges[q] &&
        std::abs(grads[p][0] - grads[q][0]) <= 1e-12 * (1.0 + std::abs(grads[p][0])) &&
        std::abs(grads[p][1] - grads[q][1]) <= 1e-12 * (1.0 + std::abs(grads[p][1])))
      --segments;
  }
  rep.segment_count = std::max<std::size_t>(segments, 1);

  for (std::size_t i = 0; i < ds.n(); ++i) {
    const auto x = ds.x(i);
    const double l1 = std::abs(x[0]) + std::abs(x[1]);
    const double xp[2] = {x[0] / l1, x[1] / l1};
    rep.misclassified += ds.labels[i] * forward(params, xp) <= 0.0;
    rep.misclassified_original += ds.labels[i] * forward(params, x) <= 0.0;
  }
  return rep;
}

bool in_quadruple_region(std::size_t i, std::size_t n, double phi) {
  const double step = kTwoPi / static_cast<double>(n);
  const double theta = step * static_cast<double>(i);
  const double span = 3.0 * step;
  for (double start : {theta + std::numbers::pi / 2.0, theta - std::numbers::pi / 2.0}) {
    const double off = wrap(phi - start);
    if (off < span) return true;
  }
  return false;
}

bool quadruple_all_equal(std::size_t i, std::size_t n, std::span<const double> w) {
  const double step = kTwoPi / static_cast<double>(n);
  bool first = false;
  for (std::size_t k = 0; k < 4; ++k) {
    const double t = step * static_cast<double>((i + k) % n);
    const bool on = std::cos(t) * w[0] + std::sin(t) * w[1] > 0.0;
    if (k == 0) first = on;
    else if (on != first) return false;
  }
  return true;
}

CoverageReport quadruple_coverage(const Matrix& weights, std::size_t n) {
  if (n == 0 || n % 4 != 0) throw std::invalid_argument("quadruple coverage needs n divisible by 4");
  if (weights.cols() != 2) throw std::invalid_argument("quadruple coverage needs d = 2");
  CoverageReport rep;
  rep.quadruple_hit.assign(n / 4, false);
  for (std::size_t r = 0; r < weights.rows(); ++r) {
    const double phi = wrap(std::atan2(weights(r, 1), weights(r, 0)));
    for (std::size_t q = 0; q < n / 4; ++q)
      if (!rep.quadruple_hit[q] && in_quadruple_region(4 * q, n, phi)) rep.quadruple_hit[q] = true;
  }
  const auto missed = std::count(rep.quadruple_hit.begin(), rep.quadruple_hit.end(), false);
  rep.uncovered_rate = static_cast<double>(missed) / static_cast<double>(n / 4);
  return rep;
}

CoverageReport coverage_sim(std::size_t n, std::size_t m, std::size_t trials, std::uint64_t seed) {
  if (trials == 0) throw std::invalid_argument("coverage_sim needs trials >= 1");
  CoverageReport rep;
  rep.trials = trials;
  rep.quadruple_hit.assign(n / 4, true);
  std::size_t uncovered = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(seed, stream::kTrial, t);
    Matrix w(m, 2);
    rng.fill_normal(w.data());
    const CoverageReport one = quadruple_coverage(w, n);
    bool all = true;
    for (std::size_t q = 0; q < one.quadruple_hit.size(); ++q) {
      all = all && one.quadruple_hit[q];
      if (!one.quadruple_hit[q]) rep.quadruple_hit[q] = false;
    }
    uncovered += !all;
  }
  rep.uncovered_rate = static_cast<double>(uncovered) / static_cast<double>(trials);
  return rep;
}

McValue quadruple_region_probability(std::size_t n, std::size_t samples, std::uint64_t seed) {
  if (samples < 2) throw std::invalid_argument("need at least 2 samples");
  std::size_t hits = 0, done = 0;
  Vec z(2);
  for (std::uint64_t chunk = 0; done < samples; ++chunk) {
    Rng rng(seed, stream::kMonteCarlo, chunk);
    const std::size_t take = std::min(kMonteCarloChunk, samples - done);
    for (std::size_t s = 0; s < take; ++s) {
      rng.fill_normal(z);
      hits += in_quadruple_region(0, n, wrap(std::atan2(z[1], z[0])));
    }
    done += take;
  }
  const double N = static_cast<double>(samples);
  const double p = static_cast<double>(hits) / N;
  return {p, std::sqrt(p * (1.0 - p) / (N - 1.0)), samples};
}

double coupon_collector_sim(std::size_t n_prime, std::size_t m, std::size_t trials,
                            std::uint64_t seed) {
  if (n_prime == 0 || trials == 0) throw std::invalid_argument("coupon sim needs n' >= 1 and trials >= 1");
  std::size_t uncovered = 0;
  std::vector<unsigned char> seen(n_prime);
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(seed, stream::kCoupon, t);
    std::fill(seen.begin(), seen.end(), 0);
    std::size_t distinct = 0;
    for (std::size_t k = 0; k < m && distinct < n_prime; ++k) {
      const auto c = rng.below(n_prime);
      if (!seen[c]) {
        seen[c] = 1;
        ++distinct;
      }
    }
    uncovered += distinct < n_prime;
  }
  return static_cast<double>(uncovered) / static_cast<double>(trials);
}

double coupon_union_bound(std::size_t n_prime, std::size_t m) {
  const double np = static_cast<double>(n_prime);
  return std::min(1.0, np * std::pow(1.0 - 1.0 / np, static_cast<double>(m)));
}

FailureSimReport empirical_mean_failure_sim(std::size_t n, std::size_t m_prime, std::size_t trials,
                                            std::uint64_t seed) {
  if (n == 0 || n % 8 != 0) throw std::invalid_argument("failure sim needs n divisible by 8");
  if (m_prime == 0 || trials == 0) throw std::invalid_argument("failure sim needs m' >= 1 and trials >= 1");
  const Dataset ds = gen_alternating_circle(n);
  const VBarMap map = make_circle_rz(n);
  std::size_t fails = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const NetParams p = coupled_init({.m = 2 * m_prime, .d = 2, .beta = 1.0, .seed = derive_key(seed, stream::kTrial, t)});
    const Separator sep = build_separator(p, map);
    fails += ntk_margin_at_init(p, ds, sep)[0] <= 0.0;
  }
  FailureSimReport rep;
  rep.trials = trials;
  rep.m_prime = m_prime;
  const double N = static_cast<double>(trials);
  rep.failure_rate = static_cast<double>(fails) / N;
  rep.se = trials > 1 ? std::sqrt(rep.failure_rate * (1.0 - rep.failure_rate) / (N - 1.0)) : 0.0;
  return rep;
}

McValue large_term_probability(std::size_t n, std::size_t samples, std::uint64_t seed) {
  if (samples < 2) throw std::invalid_argument("need at least 2 samples");
  const Dataset ds = gen_alternating_circle(n);
  const VBarMap map = make_circle_rz(n);
  const auto x0 = ds.x(0);
  const double threshold = 1.0 / std::numbers::sqrt2;
  std::size_t hits = 0, done = 0;
  Vec z(2);
  for (std::uint64_t chunk = 0; done < samples; ++chunk) {
    Rng rng(seed, stream::kMonteCarlo, chunk);
    const std::size_t take = std::min(kMonteCarloChunk, samples - done);
    for (std::size_t s = 0; s < take; ++s) {
      do {
        rng.fill_normal(z);
      } while (z[0] == 0.0 && z[1] == 0.0);
      if (!(dot(z, x0) > 0.0)) continue;
      hits += std::abs(dot(vbar_eval(map, z), x0)) >= threshold;
    }
    done += take;
  }
  const double N = static_cast<double>(samples);
  const double p = static_cast<double>(hits) / N;
  return {p, std::sqrt(p * (1.0 - p) / (N - 1.0)), samples};
}

}  // namespace ntk
