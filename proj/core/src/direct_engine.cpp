#include <cmath>
#include <stdexcept>

#include "engine.hpp"

namespace ntk::detail {

namespace {

class DirectEngine final : public Engine {
 public:
  DirectEngine(const Dataset& ds, const NetParams& p0, const EngineOptions& opt)
      : ds_(ds), p0_(p0), p_(p0), opt_(opt) {
    u_ = forward_all(p_, ds_);
  }

  const Vec& outputs() const override { return u_; }

  void step(const Vec& coef) override {
    const double s = p_.scale();
    Matrix grad(p_.m(), p_.d());
    for (std::size_t r = 0; r < p_.m(); ++r) {
      auto row = grad.row(r);
      for (std::size_t j = 0; j < ds_.n(); ++j) {
        const auto x = ds_.x(j);
        if (preactivation(p_, r, x) < 0.0) continue;
        const double c = s * p_.signs[r] * coef[j];
        for (std::size_t k = 0; k < p_.d(); ++k) row[k] += c * x[k];
      }
    }
    NetParams next = gd_step(p_, grad, opt_.eta);
    if (opt_.decomposition) terms_ = step_decomposition(p0_, p_, next, ds_, opt_.R, opt_.eta);
    p_ = std::move(next);
    u_ = forward_all(p_, ds_);
  }

  std::size_t flips() const override { return pattern_flips(p0_, p_, ds_); }

  double max_displacement() override { return max_row_displacement(p0_, p_); }

  Vec surrogate_margins() const override {
    if (!opt_.wbar) throw std::logic_error("surrogate margins need a reference point");
    const Matrix& wbar = *opt_.wbar;
    const double s = p_.scale();
    Vec q(ds_.n());
    for (std::size_t i = 0; i < ds_.n(); ++i) {
      const auto x = ds_.x(i);
      auto term = [&](std::size_t r) {
        return preactivation(p_, r, x) >= 0.0 ? p_.signs[r] * dot(wbar.row(r), x) : 0.0;
      };
      double total = 0.0;
      std::size_t r = 0;
      for (; r + 1 < p_.m(); r += 2) total += term(r) + term(r + 1);
      if (r < p_.m()) total += term(r);
      q[i] = ds_.labels[i] * s * total;
    }
    return q;
  }

  StepTerms last_terms() const override { return terms_; }

  NetParams params() const override { return p_; }

 private:
  const Dataset& ds_;
  NetParams p0_;
  NetParams p_;
  EngineOptions opt_;
  Vec u_;
  StepTerms terms_;
};

}  // namespace

std::unique_ptr<Engine> make_direct_engine(const Dataset& ds, const NetParams& p0,
                                           const EngineOptions& opt) {
  return std::make_unique<DirectEngine>(ds, p0, opt);
}

}  // namespace ntk::detail
