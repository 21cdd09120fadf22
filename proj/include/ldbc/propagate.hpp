#pragma once

// Adaptive propagation of the elliptic problem with impact/escape events and
// accumulation of the Lagrangian descriptor
//   M = integral of |(x', y')|^gamma |df|
// appended to the state as a fifth component.

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <utility>

#include "ldbc/dynamics.hpp"
#include "ldbc/errors.hpp"
#include "ldbc/model.hpp"
#include "ldbc/rk87.hpp"

namespace ldbc {

using ExtendedState = Vec<5>;

// |v|^gamma with the exponent 1/2 special-cased.
inline double speed_power(double xp, double yp, double gamma) {
  const double v2 = xp * xp + yp * yp;
  if (gamma == 0.5) return std::sqrt(std::sqrt(v2));
  if (gamma == 1.0) return std::sqrt(v2);
  return std::pow(v2, 0.5 * gamma);
}

// Wraps a planar vector field Vec<4>(t, y) with the descriptor integrand. The
// integrand carries the sign of the integration direction so the accumulator
// grows with |df| both ways.
template <typename Field>
struct LdAugmented {
  Field field;
  double gamma = 0.5;
  double direction = 1.0;
  bool with_ld = true;

  ExtendedState operator()(double t, const ExtendedState& y) const {
    const Vec<4> d = field(t, Vec<4>{y[0], y[1], y[2], y[3]});
    const double g = with_ld ? direction * speed_power(y[2], y[3], gamma) : 0.0;
    return {d[0], d[1], d[2], d[3], g};
  }
};

struct Er3bpField {
  SystemParams params;

  Vec<4> operator()(double f, const Vec<4>& y) const {
    return eom_rhs({f, y[0], y[1], y[2], y[3]}, params);
  }
};

enum class Terminal { ReachedEnd, Impact, Escape };

inline const char* to_string(Terminal t) {
  switch (t) {
    case Terminal::ReachedEnd: return "reached_end";
    case Terminal::Impact: return "impact";
    case Terminal::Escape: return "escape";
  }
  return "?";
}

struct PropagationOutcome {
  Terminal terminal = Terminal::ReachedEnd;
  double f_end = 0.0;
  SynodicState state_end;
  double ld = 0.0;                  // accumulated over this leg only
  std::optional<double> f_escape;   // first anomaly satisfying the escape test
  std::size_t attempts = 0;
};

struct PropagateOptions {
  bool with_ld = true;
  double gamma = 0.5;
  // Classification runs end at the first escape; descriptor runs keep going.
  bool stop_at_escape = false;
  // If > 0, `observer` receives states every sample_step in |f| (plus the end).
  double sample_step = 0.0;
  std::function<void(const SynodicState&, double ld)> observer;
};

// Escape test: positive Kepler energy outside the sphere of influence.
inline bool escaped(const SynodicState& s, const SystemParams& p) {
  if (!(physical_distance(s, p) > p.Rsoi_norm())) return false;
  return kepler_energy(to_mars_relative(s, s.f, p), p) > 0.0;
}

inline bool impacted(const SynodicState& s, const SystemParams& p) {
  return physical_distance(s, p) < p.R_norm();
}

// Refines the anomaly where `event` switches between the bracket ends, to
// within tol. Returns the endpoint on the side where the event holds.
template <typename Event>
double locate_event(double fa, double fb, Event&& event, double tol) {
  bool ea = event(fa);
  const bool eb = event(fb);
  if (ea == eb) throw BracketError("event does not change across the bracket");
  // Orient so that event(lo) is false and event(hi) is true.
  double lo = ea ? fb : fa;
  double hi = ea ? fa : fb;
  while (std::abs(hi - lo) > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (event(mid) ? hi : lo) = mid;
  }
  return hi;
}

namespace detail {

inline SynodicState to_synodic(double f, const ExtendedState& y) {
  return {f, y[0], y[1], y[2], y[3]};
}

}  // namespace detail

// Integrates from state0.f to f1 (either direction). Impact always
// terminates; escape terminates only if options.stop_at_escape.
inline PropagationOutcome propagate(const SynodicState& state0, double f1,
                                    const IntegratorConfig& cfg,
                                    const SystemParams& params,
                                    const PropagateOptions& opt = {}) {
  if (!state0.finite()) throw ParameterError("state0", "non-finite component");
  if (!std::isfinite(f1)) throw ParameterError("f1", "non-finite");
  cfg.validate();

  const double f0 = state0.f;
  const double dir = f1 >= f0 ? 1.0 : -1.0;
  PropagationOutcome out;
  out.f_end = f0;
  out.state_end = state0;

  auto emit = [&](const SynodicState& s, double ld) {
    if (opt.observer) opt.observer(s, ld);
  };

  if (impacted(state0, params)) {
    out.terminal = Terminal::Impact;
    emit(state0, 0.0);
    return out;
  }
  if (escaped(state0, params)) {
    out.f_escape = f0;
    if (opt.stop_at_escape) {
      out.terminal = Terminal::Escape;
      emit(state0, 0.0);
      return out;
    }
  }
  emit(state0, 0.0);
  if (f1 == f0) return out;

  using Rhs = LdAugmented<Er3bpField>;
  Rhs rhs{Er3bpField{params}, opt.gamma, dir, opt.with_ld};
  const ExtendedState y0{state0.x, state0.y, state0.xp, state0.yp, 0.0};
  AdaptiveStepper<5, Rhs> stepper(rhs, f0, y0, f1, cfg);

  const bool sampling = opt.sample_step > 0.0 && static_cast<bool>(opt.observer);
  std::size_t next_sample = 1;
  auto next_limit = [&]() {
    if (!sampling) return f1;
    const double fs = f0 + dir * static_cast<double>(next_sample) * opt.sample_step;
    return dir * (fs - f1) < 0.0 ? fs : f1;
  };

  auto state_at = [&](double f) {
    return detail::to_synodic(f, stepper.substep_from_prev(f));
  };

  auto finish = [&](Terminal term, double f, const ExtendedState& y) {
    out.terminal = term;
    out.f_end = f;
    out.state_end = detail::to_synodic(f, y);
    out.ld = y[4];
    out.attempts = stepper.attempts();
    emit(out.state_end, out.ld);
    return out;
  };

  while (!stepper.done()) {
    const double limit = next_limit();
    stepper.step(limit);
    const double f = stepper.t();
    const SynodicState s = detail::to_synodic(f, stepper.y());

    const bool hit = impacted(s, params);
    const bool esc = !out.f_escape && escaped(s, params);

    std::optional<double> f_hit;
    std::optional<double> f_esc;
    if (hit) {
      f_hit = locate_event(
          stepper.t_prev(), f,
          [&](double fe) { return impacted(state_at(fe), params); },
          cfg.event_tol);
    }
    if (esc) {
      f_esc = locate_event(
          stepper.t_prev(), f,
          [&](double fe) { return escaped(state_at(fe), params); },
          cfg.event_tol);
    }

    const bool escape_first = f_esc && (!f_hit || dir * (*f_esc - *f_hit) < 0.0);
    if (escape_first) {
      out.f_escape = *f_esc;
      if (opt.stop_at_escape)
        return finish(Terminal::Escape, *f_esc, stepper.substep_from_prev(*f_esc));
    }
    if (f_hit) return finish(Terminal::Impact, *f_hit, stepper.substep_from_prev(*f_hit));

    if (sampling && f == limit && f != f1) {
      emit(s, stepper.y()[4]);
      ++next_sample;
    }
  }
  return finish(Terminal::ReachedEnd, stepper.t(), stepper.y());
}

}  // namespace ldbc
