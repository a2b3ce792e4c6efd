#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <stdexcept>

#include "engine.hpp"

namespace ntk::detail {

namespace {

// Row r moves along s a_r sum_j c_j p_rj x_j while its firing pattern p_r is
// fixed, so between pattern changes
//   w_r(t) = w_r(t_a) - eta s a_r sum_j (E_j(t) - E_j(t_a)) p_rj x_j,
// with E the running sum of coefficients. Since |<x_j, x_i>| <= 1, the
// pre-activations of every row move by at most B(t) - B(t_a), where
// B accumulates eta s ||c||_1. A row is re-examined once that budget reaches
// its smallest |<w_r, x_i>| at the anchor.
class GroupedEngine final : public Engine {
 public:
  GroupedEngine(const Dataset& ds, const NetParams& p0, const EngineOptions& opt)
      : ds_(ds), p0_(p0), opt_(opt), n_(ds.n()), d_(ds.d()), m_(p0.m()) {
    if (ds.d() != p0.d()) throw std::invalid_argument("engine: dimension mismatch");
    s_ = p0.scale();
    G_ = Matrix(n_, n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) G_(i, j) = dot(ds.x(i), ds.x(j));

    pat_.assign(m_ * n_, 0);
    pat0_.assign(m_ * n_, 0);
    anchor_w_ = p0.weights;
    anchor_E_.assign(m_ * n_, 0.0);
    deadline_.assign(m_, 0.0);
    pristine_.assign(m_, 1);
    stamp_.assign(m_, 0);
    count_.assign(n_ * n_, 0);
    E_.assign(n_, 0.0);
    if (opt.decomposition) {
      in_perp_.assign(m_ * n_, 0);
      count_perp_.assign(n_ * n_, 0);
    }

    std::map<std::vector<unsigned char>, std::size_t> ids;
    Vec P(n_);
    for (std::size_t r = 0; r < m_; ++r) {
      for (std::size_t i = 0; i < n_; ++i) P[i] = dot(p0.weights.row(r), ds.x(i));
      for (std::size_t i = 0; i < n_; ++i) {
        pat_[r * n_ + i] = P[i] >= 0.0;
        if (opt.decomposition) in_perp_[r * n_ + i] = std::abs(P[i]) < opt.R;
      }
      add_counts(r, +1);
      std::vector<unsigned char> key(pat_.begin() + static_cast<std::ptrdiff_t>(r * n_),
                                     pat_.begin() + static_cast<std::ptrdiff_t>((r + 1) * n_));
      const auto [it, inserted] = ids.emplace(std::move(key), group_patterns_.size());
      if (inserted) {
        group_patterns_.push_back(it->first);
        group_pristine_.push_back(0);
      }
      row_group_.push_back(it->second);
      ++group_pristine_[it->second];
      schedule(r, slack(P));
      bool perp = false;
      for (std::size_t i = 0; i < n_ && opt.decomposition; ++i) perp |= in_perp_[r * n_ + i] != 0;
      if (perp) perp_rows_.push_back(r);
    }
    pat0_ = pat_;

    if (opt.wbar) {
      if (opt.wbar->rows() != m_ || opt.wbar->cols() != d_)
        throw std::invalid_argument("engine: reference point has the wrong shape");
      wbar_dot_.assign(m_ * n_, 0.0);
      for (std::size_t r = 0; r < m_; ++r)
        for (std::size_t i = 0; i < n_; ++i) wbar_dot_[r * n_ + i] = dot(opt.wbar->row(r), ds.x(i));
      q_.assign(n_, 0.0);
      for (std::size_t i = 0; i < n_; ++i) {
        double total = 0.0;
        std::size_t r = 0;
        auto term = [&](std::size_t k) {
          return pat_[k * n_ + i] ? p0.signs[k] * wbar_dot_[k * n_ + i] : 0.0;
        };
        for (; r + 1 < m_; r += 2) total += term(r) + term(r + 1);
        if (r < m_) total += term(r);
        q_[i] = s_ * total;
      }
    }
    u_ = forward_all(p0, ds);
  }

  const Vec& outputs() const override { return u_; }

  void step(const Vec& c) override {
    const double eta = opt_.eta;
    Vec E_new(n_);
    double l1 = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      E_new[j] = E_[j] + c[j];
      l1 += std::abs(c[j]);
    }
    const double B_new = B_ + eta * s_ * l1;

    Vec du(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n_; ++j)
        acc += G_(i, j) * static_cast<double>(count_[i * n_ + j]) * c[j];
      du[i] = -eta * s_ * s_ * acc;
    }

    if (opt_.decomposition) begin_terms(c, E_new);

    Vec wt(d_), wt1(d_), Pt(n_), Pt1(n_);
    due_.clear();
    while (!heap_.empty() && heap_.top().first <= B_new) {
      const auto [dl, r] = heap_.top();
      heap_.pop();
      if (dl != deadline_[r] || stamp_[r] == step_) continue;
      stamp_[r] = step_;
      due_.push_back(r);
    }
    for (std::size_t r : due_) {
      ++rechecks_;
      row_weights(r, E_, wt);
      row_weights(r, E_new, wt1);
      for (std::size_t i = 0; i < n_; ++i) {
        Pt[i] = dot(wt, ds_.x(i));
        Pt1[i] = dot(wt1, ds_.x(i));
      }
      const double a = p0_.signs[r];
      bool changed = false;
      for (std::size_t i = 0; i < n_; ++i) {
        const double p = pat_[r * n_ + i];
        du[i] += s_ * a * (relu(Pt1[i]) - relu(Pt[i]) - p * (Pt1[i] - Pt[i]));
        changed |= (Pt1[i] >= 0.0) != (pat_[r * n_ + i] != 0);
      }
      if (pristine_[r]) {
        pristine_[r] = 0;
        --group_pristine_[row_group_[r]];
      }
      std::copy(wt1.begin(), wt1.end(), anchor_w_.row(r).begin());
      std::copy(E_new.begin(), E_new.end(), anchor_E_.begin() + static_cast<std::ptrdiff_t>(r * n_));
      if (changed) repattern(r, Pt1);
      deadline_[r] = 0.0;
      schedule_at(r, B_new, slack(Pt1));
    }

    if (opt_.decomposition) finish_terms(du);

    for (std::size_t i = 0; i < n_; ++i) u_[i] += du[i];
    E_ = std::move(E_new);
    B_ = B_new;
    ++step_;
  }

  std::size_t flips() const override { return flips_; }

  double max_displacement() override {
    double best = 0.0;
    Vec v(d_);
    for (std::size_t g = 0; g < group_patterns_.size(); ++g) {
      if (group_pristine_[g] == 0) continue;
      std::fill(v.begin(), v.end(), 0.0);
      for (std::size_t j = 0; j < n_; ++j) {
        if (!group_patterns_[g][j]) continue;
        const auto x = ds_.x(j);
        for (std::size_t k = 0; k < d_; ++k) v[k] += E_[j] * x[k];
      }
      best = std::max(best, opt_.eta * s_ * norm2(v));
    }
    for (std::size_t r = 0; r < m_; ++r) {
      if (pristine_[r]) continue;
      row_weights(r, E_, v);
      const auto w0 = p0_.weights.row(r);
      for (std::size_t k = 0; k < d_; ++k) v[k] -= w0[k];
      best = std::max(best, norm2(v));
    }
    return best;
  }

  Vec surrogate_margins() const override {
    if (!opt_.wbar) throw std::logic_error("surrogate margins need a reference point");
    Vec out(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i] = ds_.labels[i] * q_[i];
    return out;
  }

  StepTerms last_terms() const override { return terms_; }

  NetParams params() const override {
    NetParams p = p0_;
    p.paired = p0_.paired && B_ == 0.0;
    Vec w(d_);
    for (std::size_t r = 0; r < m_; ++r) {
      row_weights(r, E_, w);
      std::copy(w.begin(), w.end(), p.weights.row(r).begin());
    }
    return p;
  }

  std::size_t rechecks() const override { return rechecks_; }

 private:
  using Entry = std::pair<double, std::size_t>;

  static double slack(const Vec& P) {
    double best = INFINITY;
    for (double v : P) best = std::min(best, std::abs(v));
    return best;
  }

  void schedule(std::size_t r, double sl) { schedule_at(r, 0.0, sl); }

  void schedule_at(std::size_t r, double base, double sl) {
    // The margin factor absorbs rounding in the recomputed pre-activations.
    const double dl = base + 0.999999 * sl;
    deadline_[r] = dl;
    heap_.emplace(dl, r);
  }

  void row_weights(std::size_t r, const Vec& E, Vec& out) const {
    const auto aw = anchor_w_.row(r);
    std::copy(aw.begin(), aw.end(), out.begin());
    const double c = -opt_.eta * s_ * p0_.signs[r];
    for (std::size_t j = 0; j < n_; ++j) {
      if (!pat_[r * n_ + j]) continue;
      const double dE = E[j] - anchor_E_[r * n_ + j];
      if (dE == 0.0) continue;
      const auto x = ds_.x(j);
      for (std::size_t k = 0; k < d_; ++k) out[k] += c * dE * x[k];
    }
  }

  void add_counts(std::size_t r, int sign) {
    const unsigned char* p = &pat_[r * n_];
    for (std::size_t i = 0; i < n_; ++i) {
      if (!p[i]) continue;
      for (std::size_t j = 0; j < n_; ++j) {
        if (!p[j]) continue;
        count_[i * n_ + j] += sign;
        if (!in_perp_.empty() && in_perp_[r * n_ + i]) count_perp_[i * n_ + j] += sign;
      }
    }
  }

  void repattern(std::size_t r, const Vec& P) {
    add_counts(r, -1);
    for (std::size_t i = 0; i < n_; ++i) {
      const unsigned char old = pat_[r * n_ + i];
      const unsigned char now = P[i] >= 0.0;
      if (old == now) continue;
      const unsigned char orig = pat0_[r * n_ + i];
      if (old == orig) ++flips_;
      else --flips_;
      if (!q_.empty())
        q_[i] += s_ * p0_.signs[r] * (static_cast<double>(now) - static_cast<double>(old)) *
                 wbar_dot_[r * n_ + i];
      pat_[r * n_ + i] = now;
    }
    add_counts(r, +1);
  }

  void begin_terms(const Vec& c, const Vec& E_new) {
    // Squared loss: y - u = -c.
    double c1 = 0.0, c2 = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) {
        const double g = G_(i, j) * c[i] * c[j];
        c1 += g * static_cast<double>(count_[i * n_ + j]);
        c2 += g * static_cast<double>(count_perp_[i * n_ + j]);
      }
    }
    terms_ = {};
    terms_.C1 = -2.0 * opt_.eta * s_ * s_ * c1;
    terms_.C2 = 2.0 * opt_.eta * s_ * s_ * c2;
    Vec v2(n_, 0.0), wt(d_), wt1(d_);
    for (std::size_t r : perp_rows_) {
      row_weights(r, E_, wt);
      row_weights(r, E_new, wt1);
      for (std::size_t i = 0; i < n_; ++i) {
        if (!in_perp_[r * n_ + i]) continue;
        const auto x = ds_.x(i);
        v2[i] += s_ * p0_.signs[r] * (relu(dot(wt1, x)) - relu(dot(wt, x)));
      }
    }
    double c3 = 0.0, r_sq = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      c3 += c[i] * v2[i];  // -(y-u)^T v2 = c^T v2
      r_sq += c[i] * c[i];
    }
    terms_.C3 = 2.0 * c3;
    terms_.rhs = r_sq;
    residual_sq_ = r_sq;
    residual_ = c;
  }

  void finish_terms(const Vec& du) {
    double c4 = 0.0, lhs = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      c4 += du[i] * du[i];
      const double r1 = -residual_[i] - du[i];
      lhs += r1 * r1;
    }
    terms_.C4 = c4;
    terms_.lhs = lhs;
    terms_.rhs = residual_sq_ + terms_.C1 + terms_.C2 + terms_.C3 + terms_.C4;
    terms_.gap = std::abs(terms_.lhs - terms_.rhs);
    terms_.rel_gap = residual_sq_ > 0.0 ? terms_.gap / residual_sq_ : terms_.gap;
  }

  const Dataset& ds_;
  NetParams p0_;
  EngineOptions opt_;
  std::size_t n_, d_, m_;
  double s_ = 1.0;
  Matrix G_;

  std::vector<unsigned char> pat_, pat0_;
  Matrix anchor_w_;
  Vec anchor_E_;
  Vec deadline_;
  std::vector<unsigned char> pristine_;
  std::vector<std::size_t> row_group_;
  std::vector<std::vector<unsigned char>> group_patterns_;
  std::vector<std::size_t> group_pristine_;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap_;

  std::vector<long long> count_;
  std::vector<long long> count_perp_;
  std::vector<unsigned char> in_perp_;
  std::vector<std::size_t> perp_rows_;

  Vec wbar_dot_;
  Vec q_;

  Vec E_;
  double B_ = 0.0;
  Vec u_;
  std::size_t flips_ = 0;
  std::size_t rechecks_ = 0;

  std::vector<std::size_t> due_;
  std::vector<std::size_t> stamp_;
  std::size_t step_ = 1;

  StepTerms terms_;
  Vec residual_;
  double residual_sq_ = 0.0;
};

}  // namespace

std::unique_ptr<Engine> make_grouped_engine(const Dataset& ds, const NetParams& p0,
                                            const EngineOptions& opt) {
  return std::make_unique<GroupedEngine>(ds, p0, opt);
}

}  // namespace ntk::detail
