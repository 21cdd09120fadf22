#pragma once

// Prince-Dormand RK8(7)13M embedded pair and an adaptive driver with a PI
// step-size controller. The 8th-order solution is propagated; the 7th-order
// companion only feeds the error estimate.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>

#include "ldbc/errors.hpp"

namespace ldbc {

template <std::size_t N>
using Vec = std::array<double, N>;

struct IntegratorConfig {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  double h_init = 1e-4;
  double h_min = 1e-14;
  double h_max = 1e-2;
  std::size_t max_steps = 2'000'000;
  double event_tol = 1e-10;

  void validate() const {
    if (!(rel_tol > 0.0)) throw ParameterError("rel_tol", "must be positive");
    if (!(abs_tol > 0.0)) throw ParameterError("abs_tol", "must be positive");
    if (!(h_min > 0.0)) throw ParameterError("h_min", "must be positive");
    if (!(h_max >= h_min)) throw ParameterError("h_max", "must be >= h_min");
    if (!(h_init > 0.0)) throw ParameterError("h_init", "must be positive");
    if (!(event_tol > 0.0)) throw ParameterError("event_tol", "must be positive");
    if (max_steps == 0) throw ParameterError("max_steps", "must be positive");
  }
};

struct PrinceDormand87 {
  static constexpr std::size_t stages = 13;
  static constexpr double c[13] = {0.0,
                                   1.0 / 18.0,
                                   1.0 / 12.0,
                                   1.0 / 8.0,
                                   5.0 / 16.0,
                                   3.0 / 8.0,
                                   59.0 / 400.0,
                                   93.0 / 200.0,
                                   5490023248.0 / 9719169821.0,
                                   13.0 / 20.0,
                                   1201146811.0 / 1299019798.0,
                                   1.0,
                                   1.0};
  static constexpr double a[13][12] = {
      {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
      {1.0 / 18.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
      {1.0 / 48.0, 1.0 / 16.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
      {1.0 / 32.0, 0.0, 3.0 / 32.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
      {5.0 / 16.0, 0.0, -75.0 / 64.0, 75.0 / 64.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
      {3.0 / 80.0, 0.0, 0.0, 3.0 / 16.0, 3.0 / 20.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
      {29443841.0 / 614563906.0, 0.0, 0.0, 77736538.0 / 692538347.0, -28693883.0 / 1125000000.0, 23124283.0 / 1800000000.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
      {16016141.0 / 946692911.0, 0.0, 0.0, 61564180.0 / 158732637.0, 22789713.0 / 633445777.0, 545815736.0 / 2771057229.0, -180193667.0 / 1043307555.0, 0.0, 0.0, 0.0, 0.0, 0.0},
      {39632708.0 / 573591083.0, 0.0, 0.0, -433636366.0 / 683701615.0, -421739975.0 / 2616292301.0, 100302831.0 / 723423059.0, 790204164.0 / 839813087.0, 800635310.0 / 3783071287.0, 0.0, 0.0, 0.0, 0.0},
      {246121993.0 / 1340847787.0, 0.0, 0.0, -37695042795.0 / 15268766246.0, -309121744.0 / 1061227803.0, -12992083.0 / 490766935.0, 6005943493.0 / 2108947869.0, 393006217.0 / 1396673457.0, 123872331.0 / 1001029789.0, 0.0, 0.0, 0.0},
      {-1028468189.0 / 846180014.0, 0.0, 0.0, 8478235783.0 / 508512852.0, 1311729495.0 / 1432422823.0, -10304129995.0 / 1701304382.0, -48777925059.0 / 3047939560.0, 15336726248.0 / 1032824649.0, -45442868181.0 / 3398467696.0, 3065993473.0 / 597172653.0, 0.0, 0.0},
      {185892177.0 / 718116043.0, 0.0, 0.0, -3185094517.0 / 667107341.0, -477755414.0 / 1098053517.0, -703635378.0 / 230739211.0, 5731566787.0 / 1027545527.0, 5232866602.0 / 850066563.0, -4093664535.0 / 808688257.0, 3962137247.0 / 1805957418.0, 65686358.0 / 487910083.0, 0.0},
      {403863854.0 / 491063109.0, 0.0, 0.0, -5068492393.0 / 434740067.0, -411421997.0 / 543043805.0, 652783627.0 / 914296604.0, 11173962825.0 / 925320556.0, -13158990841.0 / 6184727034.0, 3936647629.0 / 1978049680.0, -160528059.0 / 685178525.0, 248638103.0 / 1413531060.0, 0.0},
  };
  static constexpr double b[13] = {14005451.0 / 335480064.0, 0.0, 0.0, 0.0, 0.0, -59238493.0 / 1068277825.0, 181606767.0 / 758867731.0, 561292985.0 / 797845732.0, -1041891430.0 / 1371343529.0, 760417239.0 / 1151165299.0, 118820643.0 / 751138087.0, -528747749.0 / 2220607170.0, 1.0 / 4.0};
  static constexpr double bhat[13] = {13451932.0 / 455176623.0, 0.0, 0.0, 0.0, 0.0, -808719846.0 / 976000145.0, 1757004468.0 / 5645159321.0, 656045339.0 / 265891186.0, -3867574721.0 / 1518517206.0, 465885868.0 / 322736535.0, 53011238.0 / 667516719.0, 2.0 / 45.0, 0.0};
};

template <std::size_t N>
struct StepResult {
  Vec<N> y{};
  Vec<N> error{};  // 8th-order minus 7th-order solution
};

// One embedded step of size h (either sign) from (t, y). Rhs is callable as
// Vec<N>(double t, const Vec<N>& y).
template <std::size_t N, typename Rhs>
StepResult<N> step_rk87(Rhs&& rhs, double t, const Vec<N>& y, double h) {
  using T = PrinceDormand87;
  if (h == 0.0) throw ParameterError("h", "step size must be non-zero");

  std::array<Vec<N>, T::stages> k;
  for (std::size_t s = 0; s < T::stages; ++s) {
    Vec<N> ys = y;
    for (std::size_t m = 0; m < s; ++m) {
      const double a = T::a[s][m];
      if (a == 0.0) continue;
      for (std::size_t i = 0; i < N; ++i) ys[i] += h * a * k[m][i];
    }
    k[s] = rhs(t + T::c[s] * h, ys);
    for (double v : k[s])
      if (!std::isfinite(v))
        throw NumericalError("non-finite stage value at t = " + std::to_string(t));
  }

  StepResult<N> out;
  for (std::size_t i = 0; i < N; ++i) {
    double hi = 0.0;
    double lo = 0.0;
    for (std::size_t s = 0; s < T::stages; ++s) {
      hi += T::b[s] * k[s][i];
      lo += T::bhat[s] * k[s][i];
    }
    out.y[i] = y[i] + h * hi;
    out.error[i] = h * (hi - lo);
  }
  return out;
}

// Max-norm of the embedded difference against a mixed tolerance; each
// component is scaled by max(|y|, 1). Values <= 1 are acceptable.
template <std::size_t N>
double error_norm(const Vec<N>& y0, const Vec<N>& y1, const Vec<N>& err,
                  const IntegratorConfig& cfg) {
  double worst = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double scale = std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double sc = cfg.abs_tol + cfg.rel_tol * scale;
    worst = std::max(worst, std::abs(err[i]) / sc);
  }
  return worst;
}

// Steps an ODE from t0 towards t_end with error control. The caller decides
// how far each accepted step may go (for sample points or events).
template <std::size_t N, typename Rhs>
class AdaptiveStepper {
 public:
  AdaptiveStepper(Rhs rhs, double t0, const Vec<N>& y0, double t_end,
                  const IntegratorConfig& cfg)
      : rhs_(std::move(rhs)),
        cfg_(cfg),
        t_(t0),
        t_end_(t_end),
        dir_(t_end >= t0 ? 1.0 : -1.0),
        h_(std::min(cfg.h_init, cfg.h_max)),
        y_(y0),
        t_prev_(t0),
        y_prev_(y0) {}

  double t() const noexcept { return t_; }
  const Vec<N>& y() const noexcept { return y_; }
  double t_prev() const noexcept { return t_prev_; }
  const Vec<N>& y_prev() const noexcept { return y_prev_; }
  double direction() const noexcept { return dir_; }
  std::size_t attempts() const noexcept { return attempts_; }
  bool done() const noexcept { return t_ == t_end_; }
  const Rhs& rhs() const noexcept { return rhs_; }

  // Advances by one accepted step without passing `limit` (which must lie
  // between t() and t_end). Returns false if already at t_end.
  bool step(double limit) {
    if (done()) return false;
    const double remaining = std::abs(limit - t_);
    if (remaining == 0.0) return true;

    bool rejected = false;
    for (;;) {
      if (++attempts_ > cfg_.max_steps)
        throw NumericalError("max_steps exceeded at t = " + std::to_string(t_));

      const bool last = h_ >= remaining;
      const double h = last ? remaining : h_;
      const double t_new = last ? limit : t_ + dir_ * h;
      StepResult<N> r = step_rk87<N>(rhs_, t_, y_, dir_ * h);
      const double err = error_norm<N>(y_, r.y, r.error, cfg_);

      if (err <= 1.0) {
        double factor = kSafety * std::pow(std::max(err, 1e-10), -kAlpha) *
                        std::pow(err_prev_, kBeta);
        factor = std::clamp(factor, kMinFactor, kMaxFactor);
        if (rejected) factor = std::min(factor, 1.0);
        // A short final step says nothing about the sustainable step size.
        if (!last || h == h_) h_ = std::min(h * factor, cfg_.h_max);
        err_prev_ = std::max(err, 1e-4);

        t_prev_ = t_;
        y_prev_ = y_;
        t_ = t_new;
        y_ = r.y;
        return true;
      }

      rejected = true;
      h_ = h * std::max(kMinFactor, kSafety * std::pow(err, -1.0 / 8.0));
      if (h_ < cfg_.h_min)
        throw StiffnessError("step size below h_min at t = " + std::to_string(t_));
    }
  }

  // Single uncontrolled step from the start of the last accepted step; used
  // to evaluate states inside it during event refinement.
  Vec<N> substep_from_prev(double t) const {
    if (t == t_prev_) return y_prev_;
    return step_rk87<N>(rhs_, t_prev_, y_prev_, t - t_prev_).y;
  }

 private:
  static constexpr double kSafety = 0.9;
  static constexpr double kMinFactor = 0.2;
  static constexpr double kMaxFactor = 5.0;
  static constexpr double kAlpha = 0.7 / 8.0;
  static constexpr double kBeta = 0.4 / 8.0;

  Rhs rhs_;
  IntegratorConfig cfg_;
  double t_;
  double t_end_;
  double dir_;
  double h_;
  double err_prev_ = 1e-4;
  std::size_t attempts_ = 0;
  Vec<N> y_;
  double t_prev_;
  Vec<N> y_prev_;
};

}  // namespace ldbc
