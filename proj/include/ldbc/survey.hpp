#pragma once

// Grid surveys: periapsis initial conditions, stability labels, descriptor
// fields, capture sets and per-region sampling.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "ldbc/dynamics.hpp"
#include "ldbc/errors.hpp"
#include "ldbc/model.hpp"
#include "ldbc/parallel.hpp"
#include "ldbc/propagate.hpp"
#include "ldbc/raster.hpp"

namespace ldbc {

struct SurveyRequest {
  GridSpec grid;
  double f0 = 0.0;
  double fB = 0.0;  // backward extent, <= 0
  double fF = 0.0;  // forward extent, >= 0
  double e0 = 0.9;
  double gamma = 0.5;

  void validate() const {
    grid.validate();
    if (!(fB <= 0.0) || !std::isfinite(fB)) throw ParameterError("fB", "must be <= 0");
    if (!(fF >= 0.0) || !std::isfinite(fF)) throw ParameterError("fF", "must be >= 0");
    if (!(e0 >= 0.0 && e0 < 1.0)) throw ParameterError("e0", "must satisfy 0 <= e0 < 1");
    if (!(gamma > 0.0)) throw ParameterError("gamma", "must be positive");
    if (!std::isfinite(f0)) throw ParameterError("f0", "non-finite");
  }
};

enum class Direction { Backward, Forward };

struct SurveyOptions {
  std::size_t workers = default_workers();
  ProgressFn progress;
};

// Periapsis of a prograde osculating ellipse of eccentricity e0 about the
// target, placed at pulsating-frame offset (X0, Y0) at anomaly f0.
inline SynodicState generate_ic(Offset offset, double f0, double e0,
                                const SystemParams& p) {
  const double rg = std::hypot(offset.X, offset.Y);
  if (!(rg > 0.0)) throw DegenerateError("generate_ic: zero offset radius");
  const double k = pulsation(f0, p.e_p());
  const double nu = anomaly_rate(f0, p.e_p());
  const double r_phys = k * rg;
  const double v_peri = std::sqrt(p.mu() * (1.0 + e0) / r_phys);
  // Physical speed -> d/df, minus the frame rotation carried by J * offset
  // and the radial pulsation rate (zero at periapsis/apoapsis of the primaries).
  const double tangential = v_peri / (k * nu) - rg;
  const double radial = p.e_p() * std::sin(f0) / (1.0 + p.e_p() * std::cos(f0));
  const double tx = -offset.Y / rg;
  const double ty = offset.X / rg;
  return {f0, 1.0 - p.mu() + offset.X, offset.Y, tangential * tx - radial * offset.X,
          tangential * ty - radial * offset.Y};
}

inline bool inside_body(Offset offset, double f0, const SystemParams& p) {
  return pulsation(f0, p.e_p()) * std::hypot(offset.X, offset.Y) < p.R_norm();
}

struct Classification {
  Label label = Label::WeaklyStable;
  double event_anomaly = kNoEvent;
};

inline Classification classification_of(const PropagationOutcome& out) {
  if (out.f_escape) return {Label::Unstable, *out.f_escape};
  if (out.terminal == Terminal::Impact) return {Label::Crash, out.f_end};
  return {};
}

// Weakly stable, unstable or crash over [state0.f, ff]; the first of escape
// and impact decides.
inline Classification classify_point(const SynodicState& state0, double ff,
                                     const IntegratorConfig& cfg,
                                     const SystemParams& p) {
  if (ff == state0.f) throw ParameterError("ff", "must differ from f0");
  if (impacted(state0, p)) return {Label::InsideBody, kNoEvent};
  PropagateOptions opt;
  opt.with_ld = false;
  opt.stop_at_escape = true;
  return classification_of(propagate(state0, ff, cfg, p, opt));
}

struct LegResult {
  ScalarField field;   // descriptor of this leg only
  LabelField labels;   // classification over the same leg
};

// One propagation per grid point over [f0, f0 + extent] yields both the leg
// descriptor and the classification: escape is recorded without stopping, and
// a recorded escape always precedes any impact because impacts terminate.
inline LegResult survey_leg(const SurveyRequest& req, Direction dir,
                            const IntegratorConfig& cfg, const SystemParams& p,
                            const SurveyOptions& opt = {}) {
  req.validate();
  const double extent = dir == Direction::Backward ? req.fB : req.fF;
  if (extent == 0.0) throw ParameterError(dir == Direction::Backward ? "fB" : "fF",
                                          "leg extent must be non-zero");
  const std::size_t n = req.grid.n;
  const double ff = req.f0 + extent;

  LegResult out;
  out.field = {req.grid, Grid<double>(n, 0.0), req.f0,
               dir == Direction::Backward ? req.fB : 0.0,
               dir == Direction::Forward ? req.fF : 0.0, req.gamma};
  out.labels = {req.grid, Grid<Label>(n, Label::WeaklyStable), Grid<double>(n, kNoEvent),
                req.f0, ff};

  PropagateOptions popt;
  popt.gamma = req.gamma;
  parallel_for(
      req.grid.size(), opt.workers,
      [&](std::size_t k) {
        const Offset o = req.grid.offset(k / n, k % n);
        if (inside_body(o, req.f0, p)) {
          out.labels.labels[k] = Label::InsideBody;
          return;
        }
        try {
          const auto res = propagate(generate_ic(o, req.f0, req.e0, p), ff, cfg, p, popt);
          const Classification c = classification_of(res);
          out.field.values[k] = res.ld;
          out.labels.labels[k] = c.label;
          out.labels.event_anomaly[k] = c.event_anomaly;
        } catch (const Error&) {
          out.field.values[k] = std::numeric_limits<double>::quiet_NaN();
          out.labels.labels[k] = Label::Error;
        }
      },
      opt.progress);
  return out;
}

inline LabelField compute_label_field(const SurveyRequest& req, Direction dir,
                                      const IntegratorConfig& cfg,
                                      const SystemParams& p,
                                      const SurveyOptions& opt = {}) {
  req.validate();
  const double extent = dir == Direction::Backward ? req.fB : req.fF;
  if (extent == 0.0) throw ParameterError(dir == Direction::Backward ? "fB" : "fF",
                                          "leg extent must be non-zero");
  const std::size_t n = req.grid.n;
  LabelField out{req.grid, Grid<Label>(n, Label::WeaklyStable), Grid<double>(n, kNoEvent),
                 req.f0, req.f0 + extent};
  parallel_for(
      req.grid.size(), opt.workers,
      [&](std::size_t k) {
        const Offset o = req.grid.offset(k / n, k % n);
        if (inside_body(o, req.f0, p)) {
          out.labels[k] = Label::InsideBody;
          return;
        }
        try {
          const Classification c =
              classify_point(generate_ic(o, req.f0, req.e0, p), out.ff, cfg, p);
          out.labels[k] = c.label;
          out.event_anomaly[k] = c.event_anomaly;
        } catch (const Error&) {
          out.labels[k] = Label::Error;
        }
      },
      opt.progress);
  return out;
}

struct LdFields {
  ScalarField total;
  ScalarField backward;
  ScalarField forward;
};

// Descriptor field M(f0, fB, fF) and its two legs. Each leg is truncated at
// impact independently; points inside the body are zero.
inline LdFields compute_ld_field(const SurveyRequest& req, const IntegratorConfig& cfg,
                                 const SystemParams& p, const SurveyOptions& opt = {}) {
  req.validate();
  const std::size_t n = req.grid.n;
  LdFields out;
  out.backward = {req.grid, Grid<double>(n, 0.0), req.f0, req.fB, 0.0, req.gamma};
  out.forward = {req.grid, Grid<double>(n, 0.0), req.f0, 0.0, req.fF, req.gamma};
  if (req.fB != 0.0) out.backward = survey_leg(req, Direction::Backward, cfg, p, opt).field;
  if (req.fF != 0.0) out.forward = survey_leg(req, Direction::Forward, cfg, p, opt).field;
  out.total = {req.grid, Grid<double>(n, 0.0), req.f0, req.fB, req.fF, req.gamma};
  for (std::size_t k = 0; k < req.grid.size(); ++k)
    out.total.values[k] = out.backward.values[k] + out.forward.values[k];
  return out;
}

// C(fB, fF): escapes on the backward leg and stays weakly stable forward.
inline Mask capture_set(const LabelField& backward, const LabelField& forward) {
  if (!(backward.spec == forward.spec) || backward.f0 != forward.f0)
    throw ShapeError("capture_set: label fields differ in grid or f0");
  Mask out(backward.spec.n, 0);
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = backward.labels[k] == Label::Unstable &&
             forward.labels[k] == Label::WeaklyStable;
  return out;
}

struct RegionSample {
  std::size_t region_id = 0;
  GridIndex pixel;
  Offset offset;
  Label label = Label::WeaklyStable;
  std::size_t area = 0;
};

// One representative per 4-connected region of non-edge pixels: the member
// pixel nearest the region centroid (ties to the lowest row-major index).
inline std::vector<RegionSample> sample_region(const LabelField& labels, const EdgeMap& edges) {
  if (!(labels.spec == edges.spec)) throw ShapeError("sample_region: grid mismatch");
  const std::size_t n = labels.spec.n;
  const Components comp = connected_components(
      n, [&](std::size_t i, std::size_t j) { return edges.mask(i, j) == 0; });

  std::vector<double> si(comp.count, 0.0), sj(comp.count, 0.0);
  std::vector<std::size_t> area(comp.count, 0);
  for (std::size_t k = 0; k < comp.id.size(); ++k) {
    if (comp.id[k] == kNoComponent) continue;
    const auto c = static_cast<std::size_t>(comp.id[k]);
    si[c] += static_cast<double>(k / n);
    sj[c] += static_cast<double>(k % n);
    ++area[c];
  }

  std::vector<double> best(comp.count, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> rep(comp.count, 0);
  for (std::size_t k = 0; k < comp.id.size(); ++k) {
    if (comp.id[k] == kNoComponent) continue;
    const auto c = static_cast<std::size_t>(comp.id[k]);
    const double ci = si[c] / static_cast<double>(area[c]);
    const double cj = sj[c] / static_cast<double>(area[c]);
    const double di = static_cast<double>(k / n) - ci;
    const double dj = static_cast<double>(k % n) - cj;
    const double d2 = di * di + dj * dj;
    if (d2 < best[c]) {
      best[c] = d2;
      rep[c] = k;
    }
  }

  std::vector<RegionSample> out;
  out.reserve(comp.count);
  for (std::size_t c = 0; c < comp.count; ++c) {
    const GridIndex px{rep[c] / n, rep[c] % n};
    out.push_back({c, px, labels.spec.offset(px.i, px.j), labels.labels[rep[c]], area[c]});
  }
  return out;
}

}  // namespace ldbc
