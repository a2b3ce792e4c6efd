#pragma once

#include <memory>
#include <optional>

#include "ntklab/dataset.hpp"
#include "ntklab/network.hpp"
#include "ntklab/train.hpp"

namespace ntk::detail {

struct EngineOptions {
  double eta = 0.0;
  /// Flip-set radius for the decomposition; ignored when decomposition is off.
  double R = 0.0;
  bool decomposition = false;
  /// Reference point for the surrogate margins y_i <grad f_i(W_t), Wbar>.
  std::optional<Matrix> wbar;
};

/// One full-batch gradient-descent trajectory. Gradient row r at step t is
/// s a_r sum_j c_j 1[<w_r(t), x_j> >= 0] x_j for a caller-supplied c.
class Engine {
 public:
  virtual ~Engine() = default;
  /// Current outputs u_i = f(W_t, x_i).
  virtual const Vec& outputs() const = 0;
  /// W_{t+1} = W_t - eta * grad.
  virtual void step(const Vec& coef) = 0;
  /// Entries (r, i) whose firing differs from t = 0.
  virtual std::size_t flips() const = 0;
  virtual double max_displacement() = 0;
  /// y_i <grad f_i(W_t), Wbar>; requires options.wbar.
  virtual Vec surrogate_margins() const = 0;
  /// Decomposition of the most recent step; requires options.decomposition.
  virtual StepTerms last_terms() const = 0;
  virtual NetParams params() const = 0;
  virtual std::size_t rechecks() const { return 0; }
};

std::unique_ptr<Engine> make_direct_engine(const Dataset& ds, const NetParams& p0,
                                           const EngineOptions& opt);
std::unique_ptr<Engine> make_grouped_engine(const Dataset& ds, const NetParams& p0,
                                            const EngineOptions& opt);

}  // namespace ntk::detail
