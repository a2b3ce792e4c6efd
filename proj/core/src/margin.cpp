#include "ntklab/margin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "ntklab/rng.hpp"

namespace ntk {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  return a;
}

double angle_of(std::span<const double> v) { return wrap_angle(std::atan2(v[1], v[0])); }

void fill_nonzero_normal(Rng& rng, Vec& z) {
  do {
    rng.fill_normal(z);
  } while (norm2(z) == 0.0);
}

}  // namespace

MarginEstimate margin_mc(const Dataset& ds, const VBarMap& map, std::size_t samples,
                         std::uint64_t seed) {
  if (samples < 100) throw std::invalid_argument("margin_mc needs at least 100 samples");
  if (map.dim != ds.d()) throw std::invalid_argument("margin_mc: map dimension mismatch");
  const std::size_t n = ds.n();
  Vec sum(n, 0.0), sum_sq(n, 0.0);
  Vec z(ds.d());
  std::size_t done = 0;
  for (std::uint64_t chunk = 0; done < samples; ++chunk) {
    Rng rng(seed, stream::kMonteCarlo, chunk);
    const std::size_t take = std::min(kMonteCarloChunk, samples - done);
    for (std::size_t s = 0; s < take; ++s) {
      fill_nonzero_normal(rng, z);
      const Vec v = vbar_eval(map, z);
      for (std::size_t i = 0; i < n; ++i) {
        const auto x = ds.x(i);
        if (!(dot(x, z) > 0.0)) continue;
        const double t = ds.labels[i] * dot(v, x);
        sum[i] += t;
        sum_sq[i] += t * t;
      }
    }
    done += take;
  }
  MarginEstimate est;
  est.samples = samples;
  est.per_point.resize(n);
  est.std_errors.resize(n);
  const double N = static_cast<double>(samples);
  for (std::size_t i = 0; i < n; ++i) {
    const double mean = sum[i] / N;
    const double var = std::max(0.0, (sum_sq[i] - N * mean * mean) / (N - 1.0));
    est.per_point[i] = mean;
    est.std_errors[i] = std::sqrt(var / N);
  }
  const auto it = std::min_element(est.per_point.begin(), est.per_point.end());
  est.gamma = *it;
  est.argmin = static_cast<std::size_t>(it - est.per_point.begin());
  return est;
}

double margin_circle_exact(std::size_t n) {
  if (n == 0 || n % 4 != 0) throw std::invalid_argument("circle margin needs n divisible by 4");
  const double nd = static_cast<double>(n);
  double s = 0.0;
  for (std::size_t k = 1; k <= n / 4; ++k) {
    const double sign = (k % 2 == 1) ? 1.0 : -1.0;
    s += sign * std::cos((2.0 * static_cast<double>(k) - 1.0) * std::numbers::pi / nd);
  }
  return 2.0 * s / nd;
}

double cos_sum(double a, double b, std::size_t n_tilde) {
  const double half = std::sin(b / 2.0);
  if (std::abs(half) <= 1e-12) throw std::invalid_argument("cos_sum: b is a multiple of 2 pi");
  const double nt = static_cast<double>(n_tilde);
  return std::cos(a + (nt - 1.0) * b / 2.0) * std::sin(nt * b / 2.0) / half;
}

McValue margin_upper_bound_mc(const Dataset& ds, const std::vector<std::size_t>& subset,
                              std::size_t samples, std::uint64_t seed) {
  if (subset.empty()) throw std::invalid_argument("upper bound needs a nonempty subset");
  if (samples < 2) throw std::invalid_argument("upper bound needs at least 2 samples");
  for (std::size_t i : subset)
    if (i >= ds.n()) throw std::invalid_argument("subset index out of range");
  const double inv = 1.0 / static_cast<double>(subset.size());
  Vec z(ds.d()), acc(ds.d());
  double sum = 0.0, sum_sq = 0.0;
  std::size_t done = 0;
  for (std::uint64_t chunk = 0; done < samples; ++chunk) {
    Rng rng(seed, stream::kMonteCarlo, chunk);
    const std::size_t take = std::min(kMonteCarloChunk, samples - done);
    for (std::size_t s = 0; s < take; ++s) {
      fill_nonzero_normal(rng, z);
      std::fill(acc.begin(), acc.end(), 0.0);
      for (std::size_t i : subset) {
        const auto x = ds.x(i);
        if (!(dot(x, z) > 0.0)) continue;
        for (std::size_t k = 0; k < ds.d(); ++k) acc[k] += ds.labels[i] * x[k];
      }
      const double t = inv * norm2(acc);
      sum += t;
      sum_sq += t * t;
    }
    done += take;
  }
  const double N = static_cast<double>(samples);
  const double mean = sum / N;
  const double var = std::max(0.0, (sum_sq - N * mean * mean) / (N - 1.0));
  return {mean, std::sqrt(var / N), samples};
}

void validate(const Separator& sep) {
  const double tol = 1e-12;
  for (std::size_t r = 0; r < sep.rows.rows(); ++r)
    if (norm2(sep.rows.row(r)) > sep.row_norm_bound + tol)
      throw std::runtime_error("separator row exceeds its norm bound");
  if (frobenius(sep.rows) > 1.0 + tol) throw std::runtime_error("separator Frobenius norm exceeds 1");
}

Separator build_separator(const NetParams& params_init, const VBarMap& map) {
  if (map.dim != params_init.d()) throw std::invalid_argument("separator: map dimension mismatch");
  const std::size_t m = params_init.m();
  const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(m));
  Separator sep;
  sep.rows = Matrix(m, params_init.d());
  sep.row_norm_bound = inv_sqrt_m;
  for (std::size_t s = 0; s < m; ++s) {
    const Vec v = vbar_eval(map, params_init.weights.row(s));
    auto row = sep.rows.row(s);
    for (std::size_t k = 0; k < v.size(); ++k) row[k] = params_init.signs[s] * v[k] * inv_sqrt_m;
  }
  validate(sep);
  return sep;
}

std::vector<double> separator_net_angles(const Dataset& ds, double gamma) {
  if (ds.d() != 2) throw std::invalid_argument("2-D separator needs d = 2");
  if (!(gamma > 0.0)) throw std::invalid_argument("2-D separator needs gamma > 0");
  const double b = gamma / 4.0;
  const auto n_prime = static_cast<std::size_t>(std::ceil(kTwoPi / b));
  const double step = kTwoPi / static_cast<double>(n_prime);
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const double frac = angle_of(ds.x(i)) / step;
    const double g = std::round(frac);
    const double h = frac >= g ? g + 1.0 : g - 1.0;
    for (double k : {g, h}) {
      const auto kk = static_cast<long long>(k);
      const auto nn = static_cast<long long>(n_prime);
      idx.push_back(static_cast<std::size_t>(((kk % nn) + nn) % nn));
    }
  }
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  std::vector<double> angles;
  for (std::size_t k : idx) angles.push_back(step * static_cast<double>(k));
  return angles;
}

namespace {

// Uniform-angle average of the map over the arc [lo, hi). The map is
// evaluated at midpoints of sub-arcs split at every data angle and every
// data half-plane boundary, so piecewise-constant maps integrate exactly.
Vec arc_mean(const VBarMap& map, const Dataset& ds, double lo, double hi) {
  std::vector<double> cuts{lo, hi};
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const double a = angle_of(ds.x(i));
    for (double c : {a, a + std::numbers::pi / 2.0, a - std::numbers::pi / 2.0}) {
      double w = wrap_angle(c);
      if (w < lo) w += kTwoPi;
      if (w > lo && w < hi) cuts.push_back(w);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  constexpr int kSub = 16;
  Vec acc(2, 0.0);
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double len = cuts[k + 1] - cuts[k];
    if (len <= 0.0) continue;
    for (int q = 0; q < kSub; ++q) {
      const double t = cuts[k] + len * (q + 0.5) / kSub;
      const Vec z{std::cos(t), std::sin(t)};
      const Vec v = vbar_eval(map, z);
      acc[0] += v[0] * len / kSub;
      acc[1] += v[1] * len / kSub;
    }
  }
  const double total = hi - lo;
  return {acc[0] / total, acc[1] / total};
}

}  // namespace

Separator build_separator_2d(const NetParams& params_init, const Dataset& ds,
                             const VBarMap& map, double gamma) {
  if (params_init.d() != 2 || ds.d() != 2 || map.dim != 2)
    throw std::invalid_argument("2-D separator needs d = 2");
  const std::vector<double> net = separator_net_angles(ds, gamma);

  // Firing-pattern cones of the net: arcs between consecutive half-plane
  // boundaries of the net points.
  std::vector<double> bounds;
  for (double a : net) {
    bounds.push_back(wrap_angle(a + std::numbers::pi / 2.0));
    bounds.push_back(wrap_angle(a - std::numbers::pi / 2.0));
  }
  std::sort(bounds.begin(), bounds.end());
  std::vector<double> uniq;
  for (double v : bounds)
    if (uniq.empty() || v - uniq.back() > 1e-12) uniq.push_back(v);
  if (uniq.size() > 1 && uniq.front() + kTwoPi - uniq.back() <= 1e-12) uniq.pop_back();
  const std::size_t cones = uniq.size();

  auto cone_of = [&](double angle) {
    // Cone k covers [uniq[k], uniq[k+1]); the last one wraps around.
    const auto it = std::upper_bound(uniq.begin(), uniq.end(), angle);
    return it == uniq.begin() ? cones - 1 : static_cast<std::size_t>(it - uniq.begin()) - 1;
  };

  const std::size_t m = params_init.m();
  std::vector<std::size_t> counts(cones, 0);
  std::vector<std::size_t> owner(m);
  for (std::size_t s = 0; s < m; ++s) {
    const auto w = params_init.weights.row(s);
    if (norm2(w) == 0.0) throw std::invalid_argument("2-D separator: zero weight row");
    owner[s] = cone_of(angle_of(w));
    ++counts[owner[s]];
  }

  std::vector<Vec> means(cones);
  std::vector<double> factor(cones, 0.0);
  Separator sep;
  const double md = static_cast<double>(m);
  for (std::size_t k = 0; k < cones; ++k) {
    const double lo = uniq[k];
    const double hi = k + 1 < cones ? uniq[k + 1] : uniq[0] + kTwoPi;
    const double prob = (hi - lo) / kTwoPi;
    means[k] = arc_mean(map, ds, lo, hi);
    if (counts[k] == 0) {
      ++sep.empty_cones;
      continue;
    }
    double f = prob * md / (2.0 * static_cast<double>(counts[k]));
    if (f > 1.0) {
      std::ostringstream msg;
      msg << "cone " << k << " holds " << counts[k] << " rows, below P(V)m/2 = " << prob * md / 2.0
          << "; scale clamped to 1";
      sep.notes.push_back(msg.str());
      ++sep.clamped_cones;
      f = 1.0;
    }
    factor[k] = f;
  }
  if (sep.empty_cones > 0)
    sep.notes.push_back(std::to_string(sep.empty_cones) + " net cones hold no weight rows");

  const double inv_sqrt_m = 1.0 / std::sqrt(md);
  sep.rows = Matrix(m, 2);
  sep.row_norm_bound = inv_sqrt_m;
  for (std::size_t s = 0; s < m; ++s) {
    const std::size_t k = owner[s];
    const double c = params_init.signs[s] * inv_sqrt_m * factor[k];
    sep.rows(s, 0) = c * means[k][0];
    sep.rows(s, 1) = c * means[k][1];
  }
  validate(sep);
  return sep;
}

Vec ntk_margin_at_init(const NetParams& params, const Dataset& ds, const Separator& sep) {
  if (sep.rows.rows() != params.m() || sep.rows.cols() != params.d())
    throw std::invalid_argument("separator shape does not match network");
  const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(params.m()));
  Vec out(ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const auto x = ds.x(i);
    auto term = [&](std::size_t r) {
      return preactivation(params, r, x) >= 0.0 ? params.signs[r] * dot(sep.rows.row(r), x) : 0.0;
    };
    double total = 0.0;
    std::size_t r = 0;
    for (; r + 1 < params.m(); r += 2) total += term(r) + term(r + 1);
    if (r < params.m()) total += term(r);
    out[i] = ds.labels[i] * inv_sqrt_m * total;
  }
  return out;
}

double compose_margins(const std::vector<double>& gammas) {
  if (gammas.empty()) throw std::invalid_argument("compose_margins needs at least one margin");
  double s = 0.0;
  for (double g : gammas) {
    if (!(g > 0.0)) throw std::invalid_argument("compose_margins needs positive margins");
    s += 1.0 / (g * g);
  }
  return 1.0 / std::sqrt(s);
}

ConeProbabilityReport cone_probability_check(double b, std::size_t samples, std::uint64_t seed) {
  const Dataset ds = gen_two_points(b);
  if (samples < 2) throw std::invalid_argument("cone probability needs at least 2 samples");
  std::size_t hits = 0;
  Vec z(2);
  std::size_t done = 0;
  for (std::uint64_t chunk = 0; done < samples; ++chunk) {
    Rng rng(seed, stream::kMonteCarlo, chunk);
    const std::size_t take = std::min(kMonteCarloChunk, samples - done);
    for (std::size_t s = 0; s < take; ++s) {
      rng.fill_normal(z);
      hits += dot(ds.x(0), z) > 0.0 && dot(ds.x(1), z) <= 0.0;
    }
    done += take;
  }
  ConeProbabilityReport rep;
  rep.b = b;
  rep.samples = samples;
  const double N = static_cast<double>(samples);
  rep.estimate = static_cast<double>(hits) / N;
  rep.se = std::sqrt(rep.estimate * (1.0 - rep.estimate) / (N - 1.0));
  rep.exact = std::asin(b / 2.0) / std::numbers::pi;
  rep.lower = b / 7.0;
  rep.upper = b / 5.0;
  return rep;
}

std::size_t separator_width(std::size_t n, double gamma, double delta) {
  if (!(gamma > 0.0) || !(delta > 0.0 && delta < 1.0) || n == 0)
    throw std::invalid_argument("separator_width: invalid arguments");
  const double mp = std::ceil(8.0 * std::log(2.0 * static_cast<double>(n) / delta) / (gamma * gamma));
  return 2 * static_cast<std::size_t>(mp);
}

std::size_t separator_width_2d(std::size_t n, double gamma, double delta, double K) {
  if (!(gamma > 0.0) || !(delta > 0.0 && delta < 1.0) || n == 0 || !(K > 0.0))
    throw std::invalid_argument("separator_width_2d: invalid arguments");
  auto m = static_cast<std::size_t>(std::ceil(K * std::log(static_cast<double>(n) / delta) / gamma));
  return m + (m % 2);
}

}  // namespace ntk
