#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "ntklab/dataset.hpp"
#include "ntklab/linalg.hpp"
#include "ntklab/network.hpp"

namespace ntk {

enum class KernelProvenance { cts_closed_form, cts_monte_carlo, dis, time_t, time_t_perp };

struct KernelMatrix {
  Matrix entries;
  KernelProvenance provenance = KernelProvenance::cts_closed_form;
  std::optional<double> min_eig_cache;
  /// Per-entry standard errors; only filled for Monte-Carlo kernels.
  Matrix std_errors;
  std::size_t samples = 0;

  std::size_t n() const { return entries.rows(); }
};

std::string to_string(KernelProvenance p);

/// Arc-cosine closed form <x_i,x_j> (pi - arccos<x_i,x_j>) / (2 pi).
KernelMatrix h_cts(const Dataset& ds);
/// Gaussian Monte-Carlo estimate of the same expectation.
KernelMatrix h_cts_mc(const Dataset& ds, std::size_t samples, std::uint64_t seed);
/// (1/m) sum_r <x_i,x_j> 1[<w_r,x_i> >= 0] 1[<w_r,x_j> >= 0]
KernelMatrix h_dis(const Dataset& ds, const Matrix& weights);
KernelMatrix h_t(const NetParams& params, const Dataset& ds);
/// Same sum as h_t restricted, for row i, to r with |<w_r(0), x_i>| < R.
KernelMatrix h_t_perp(const NetParams& params0, const NetParams& params_t,
                      const Dataset& ds, double R);

/// Smallest eigenvalue; cached on the matrix.
double min_eig(KernelMatrix& k);
double min_eig(const KernelMatrix& k);

/// Row counts |S_bar_i| = #{r : |<w_r, x_i>| < R}.
std::vector<std::size_t> flip_set_sizes(const Matrix& weights0, const Dataset& ds, double R);

struct ConcentrationReport {
  double lambda = 0.0;      // min_eig(H^cts)
  double bound = 0.0;       // lambda / 4
  std::size_t m0 = 0;
  std::size_t B = 0;
  std::size_t trials = 0;
  std::vector<double> frobenius_errors;
  std::vector<double> dis_min_eigs;
  std::vector<bool> passed;  // both conditions
  double pass_rate = 0.0;
  double mean_frobenius_error = 0.0;
};

/// Draws m0 Gaussian rows, repeats each B times, and compares H^dis with H^cts.
ConcentrationReport concentration_check(const Dataset& ds, std::size_t m0, std::size_t B,
                                        std::size_t trials, std::uint64_t seed);

struct PerturbationReport {
  double R = 0.0;
  double bound = 0.0;  // 2 n R
  std::size_t m = 0;
  std::vector<double> distances;
  double pass_rate = 0.0;
};

/// Perturbs every coupled row by a uniform vector of the R-ball.
PerturbationReport perturbation_check(const Dataset& ds, double R, std::size_t m,
                                      std::size_t trials, std::uint64_t seed);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace ntk
