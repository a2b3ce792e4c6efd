#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ntklab/dataset.hpp"
#include "ntklab/network.hpp"
#include "ntklab/vbar.hpp"

namespace ntk {

struct MarginEstimate {
  Vec per_point;
  Vec std_errors;
  double gamma = 0.0;
  std::size_t argmin = 0;
  std::size_t samples = 0;
};

/// Per point y_i E_z[<vbar(z), x_i> 1[<x_i,z> > 0]] under z ~ N(0, I).
MarginEstimate margin_mc(const Dataset& ds, const VBarMap& map, std::size_t samples,
                         std::uint64_t seed);

/// Margin of the alternating circle with n points, from the cosine sum.
double margin_circle_exact(std::size_t n);

/// sum_{k=0}^{n_tilde-1} cos(a + k b) in closed form.
double cos_sum(double a, double b, std::size_t n_tilde);

struct McValue {
  double value = 0.0;
  double se = 0.0;
  std::size_t samples = 0;
};

/// E_z[(1/|S|) || sum_{i in S, <x_i,z> > 0} y_i x_i ||].
McValue margin_upper_bound_mc(const Dataset& ds, const std::vector<std::size_t>& subset,
                              std::size_t samples, std::uint64_t seed);

struct Separator {
  Matrix rows;
  double row_norm_bound = 0.0;
  /// Diagnostics gathered during construction (clamped or empty cones).
  std::vector<std::string> notes;
  std::size_t clamped_cones = 0;
  std::size_t empty_cones = 0;
};

void validate(const Separator& sep);

/// u_s = a_s vbar(w_s) / sqrt(m).
Separator build_separator(const NetParams& params_init, const VBarMap& map);

/// Net-based separator for d = 2 with spacing b = gamma/4; rows scaled by the
/// cone probability over the measured cone count, clamped to keep row norms
/// at most 1/sqrt(m).
Separator build_separator_2d(const NetParams& params_init, const Dataset& ds,
                             const VBarMap& map, double gamma);

/// Angles (in [0, 2 pi)) of the net used by build_separator_2d.
std::vector<double> separator_net_angles(const Dataset& ds, double gamma);

/// y_i <grad f_i(W_0), U> with the 1/sqrt(m) output scale.
Vec ntk_margin_at_init(const NetParams& params, const Dataset& ds, const Separator& sep);

/// max over unit rho of min_j rho_j gamma_j.
double compose_margins(const std::vector<double>& gammas);

struct ConeProbabilityReport {
  double b = 0.0;
  double estimate = 0.0;
  double se = 0.0;
  double exact = 0.0;
  double lower = 0.0;  // b/7
  double upper = 0.0;  // b/5
  std::size_t samples = 0;
};

/// Pr[<x_1,z> > 0 >= <x_2,z>] on the two-point instance with chord b.
ConeProbabilityReport cone_probability_check(double b, std::size_t samples, std::uint64_t seed);

/// 2 * ceil(8 ln(2n/delta) / gamma^2).
std::size_t separator_width(std::size_t n, double gamma, double delta);
/// Even width ceil(K ln(n/delta) / gamma) for the 2-D construction.
std::size_t separator_width_2d(std::size_t n, double gamma, double delta, double K);

}  // namespace ntk
