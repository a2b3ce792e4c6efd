#include "ntklab/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ntklab/eigen.hpp"
#include "ntklab/rng.hpp"

namespace ntk {

std::string to_string(KernelProvenance p) {
  switch (p) {
    case KernelProvenance::cts_closed_form: return "cts_closed_form";
    case KernelProvenance::cts_monte_carlo: return "cts_monte_carlo";
    case KernelProvenance::dis: return "dis";
    case KernelProvenance::time_t: return "time_t";
    case KernelProvenance::time_t_perp: return "time_t_perp";
  }
  return "unknown";
}

namespace {

Matrix gram(const Dataset& ds) {
  Matrix g(ds.n(), ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i)
    for (std::size_t j = i; j < ds.n(); ++j) g(i, j) = g(j, i) = dot(ds.x(i), ds.x(j));
  return g;
}

// Firing matrix (r, i) -> <w_r, x_i> >= 0.
std::vector<unsigned char> firing(const Matrix& weights, const Dataset& ds) {
  std::vector<unsigned char> f(weights.rows() * ds.n());
  for (std::size_t r = 0; r < weights.rows(); ++r)
    for (std::size_t i = 0; i < ds.n(); ++i)
      f[r * ds.n() + i] = dot(weights.row(r), ds.x(i)) >= 0.0;
  return f;
}

}  // namespace

KernelMatrix h_cts(const Dataset& ds) {
  KernelMatrix k;
  k.provenance = KernelProvenance::cts_closed_form;
  k.entries = Matrix(ds.n(), ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i) {
    k.entries(i, i) = 0.5;
    for (std::size_t j = i + 1; j < ds.n(); ++j) {
      const double c = std::clamp(dot(ds.x(i), ds.x(j)), -1.0, 1.0);
      const double v = c * (std::numbers::pi - std::acos(c)) / (2.0 * std::numbers::pi);
      k.entries(i, j) = k.entries(j, i) = v;
    }
  }
  return k;
}

KernelMatrix h_cts_mc(const Dataset& ds, std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw std::invalid_argument("h_cts_mc needs samples > 0");
  const std::size_t n = ds.n();
  const std::size_t d = ds.d();
  std::vector<std::uint64_t> both(n * n, 0);
  Vec z(d);
  std::vector<unsigned char> on(n);
  std::size_t done = 0;
  for (std::uint64_t chunk = 0; done < samples; ++chunk) {
    Rng rng(seed, stream::kMonteCarlo, chunk);
    const std::size_t take = std::min(kMonteCarloChunk, samples - done);
    for (std::size_t s = 0; s < take; ++s) {
      rng.fill_normal(z);
      for (std::size_t i = 0; i < n; ++i) on[i] = dot(z, ds.x(i)) >= 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (!on[i]) continue;
        for (std::size_t j = i; j < n; ++j) both[i * n + j] += on[j];
      }
    }
    done += take;
  }
  const Matrix g = gram(ds);
  KernelMatrix k;
  k.provenance = KernelProvenance::cts_monte_carlo;
  k.samples = samples;
  k.entries = Matrix(n, n);
  k.std_errors = Matrix(n, n);
  const double N = static_cast<double>(samples);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      // Each sample contributes G_ij or 0; Bernoulli variance with the
      // unbiased (N-1) correction.
      const double p = static_cast<double>(both[i * n + j]) / N;
      const double mean = g(i, j) * p;
      const double var = samples > 1 ? g(i, j) * g(i, j) * p * (1.0 - p) * N / (N - 1.0) : 0.0;
      k.entries(i, j) = k.entries(j, i) = mean;
      k.std_errors(i, j) = k.std_errors(j, i) = std::sqrt(var / N);
    }
  }
  return k;
}

KernelMatrix h_dis(const Dataset& ds, const Matrix& weights) {
  if (weights.cols() != ds.d()) throw std::invalid_argument("h_dis: dimension mismatch");
  if (weights.rows() == 0) throw std::invalid_argument("h_dis: no weight rows");
  const std::size_t n = ds.n();
  const auto f = firing(weights, ds);
  std::vector<std::uint64_t> both(n * n, 0);
  for (std::size_t r = 0; r < weights.rows(); ++r) {
    const unsigned char* on = &f[r * n];
    for (std::size_t i = 0; i < n; ++i) {
      if (!on[i]) continue;
      for (std::size_t j = i; j < n; ++j) both[i * n + j] += on[j];
    }
  }
  const Matrix g = gram(ds);
  KernelMatrix k;
  k.provenance = KernelProvenance::dis;
  k.entries = Matrix(n, n);
  const double m = static_cast<double>(weights.rows());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      k.entries(i, j) = k.entries(j, i) = g(i, j) * static_cast<double>(both[i * n + j]) / m;
  return k;
}

KernelMatrix h_t(const NetParams& params, const Dataset& ds) {
  KernelMatrix k = h_dis(ds, params.weights);
  k.provenance = KernelProvenance::time_t;
  return k;
}

std::vector<std::size_t> flip_set_sizes(const Matrix& weights0, const Dataset& ds, double R) {
  std::vector<std::size_t> sizes(ds.n(), 0);
  for (std::size_t r = 0; r < weights0.rows(); ++r)
    for (std::size_t i = 0; i < ds.n(); ++i)
      sizes[i] += std::abs(dot(weights0.row(r), ds.x(i))) < R;
  return sizes;
}

KernelMatrix h_t_perp(const NetParams& params0, const NetParams& params_t,
                      const Dataset& ds, double R) {
  if (params0.m() != params_t.m() || params0.d() != params_t.d())
    throw std::invalid_argument("h_t_perp: parameter shapes differ");
  if (params_t.d() != ds.d()) throw std::invalid_argument("h_t_perp: dimension mismatch");
  const std::size_t n = ds.n();
  const auto f = firing(params_t.weights, ds);
  std::vector<std::uint64_t> cnt(n * n, 0);
  for (std::size_t r = 0; r < params_t.m(); ++r) {
    const unsigned char* on = &f[r * n];
    for (std::size_t i = 0; i < n; ++i) {
      if (!on[i]) continue;
      if (!(std::abs(dot(params0.weights.row(r), ds.x(i))) < R)) continue;
      for (std::size_t j = 0; j < n; ++j) cnt[i * n + j] += on[j];
    }
  }
  const Matrix g = gram(ds);
  KernelMatrix k;
  k.provenance = KernelProvenance::time_t_perp;
  k.entries = Matrix(n, n);
  const double m = static_cast<double>(params_t.m());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      k.entries(i, j) = g(i, j) * static_cast<double>(cnt[i * n + j]) / m;
  return k;
}

double min_eig(KernelMatrix& k) {
  if (!k.min_eig_cache) k.min_eig_cache = smallest_eigenvalue(k.entries);
  return *k.min_eig_cache;
}

double min_eig(const KernelMatrix& k) {
  return k.min_eig_cache ? *k.min_eig_cache : smallest_eigenvalue(k.entries);
}

ConcentrationReport concentration_check(const Dataset& ds, std::size_t m0, std::size_t B,
                                        std::size_t trials, std::uint64_t seed) {
  if (m0 == 0 || B == 0 || trials == 0)
    throw std::invalid_argument("concentration_check needs m0, B, trials >= 1");
  KernelMatrix cts = h_cts(ds);
  ConcentrationReport rep;
  rep.lambda = min_eig(cts);
  rep.bound = rep.lambda / 4.0;
  rep.m0 = m0;
  rep.B = B;
  rep.trials = trials;
  std::size_t passes = 0;
  double err_sum = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(seed, stream::kTrial, t);
    Matrix w(m0 * B, ds.d());
    for (std::size_t k = 0; k < m0; ++k) {
      auto base = w.row(k * B);
      rng.fill_normal(base);
      for (std::size_t b = 1; b < B; ++b) {
        auto copy = w.row(k * B + b);
        std::copy(base.begin(), base.end(), copy.begin());
      }
    }
    KernelMatrix dis = h_dis(ds, w);
    const double err = frobenius_distance(dis.entries, cts.entries);
    const double lam = min_eig(dis);
    const bool ok = err <= rep.bound && lam >= 0.75 * rep.lambda;
    rep.frobenius_errors.push_back(err);
    rep.dis_min_eigs.push_back(lam);
    rep.passed.push_back(ok);
    passes += ok;
    err_sum += err;
  }
  rep.pass_rate = static_cast<double>(passes) / static_cast<double>(trials);
  rep.mean_frobenius_error = err_sum / static_cast<double>(trials);
  return rep;
}

PerturbationReport perturbation_check(const Dataset& ds, double R, std::size_t m,
                                      std::size_t trials, std::uint64_t seed) {
  if (!(R >= 0.0)) throw std::invalid_argument("perturbation radius must be >= 0");
  if (trials == 0) throw std::invalid_argument("perturbation_check needs trials >= 1");
  PerturbationReport rep;
  rep.R = R;
  rep.bound = 2.0 * static_cast<double>(ds.n()) * R;
  rep.m = m;
  const std::size_t d = ds.d();
  std::size_t passes = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const NetParams p = coupled_init({.m = m, .d = d, .beta = 1.0, .seed = derive_key(seed, stream::kTrial, t)});
    Rng rng(seed, stream::kPerturb, t);
    Matrix w = p.weights;
    Vec dir(d);
    for (std::size_t r = 0; r < m; ++r) {
      double nr = 0.0;
      do {
        rng.fill_normal(dir);
        nr = norm2(dir);
      } while (nr == 0.0);
      const double radius = R * std::pow(rng.uniform(), 1.0 / static_cast<double>(d));
      auto row = w.row(r);
      for (std::size_t k = 0; k < d; ++k) row[k] += radius * dir[k] / nr;
    }
    const double dist = frobenius_distance(h_dis(ds, p.weights).entries, h_dis(ds, w).entries);
    rep.distances.push_back(dist);
    // R = 0 leaves the kernel unchanged; treat the equality case as a pass.
    passes += dist < rep.bound || dist == 0.0;
  }
  rep.pass_rate = static_cast<double>(passes) / static_cast<double>(trials);
  return rep;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("loglog_slope needs two equal-length series of length >= 2");
  double mx = 0.0, my = 0.0;
  const double k = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= k;
  my /= k;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

}  // namespace ntk
