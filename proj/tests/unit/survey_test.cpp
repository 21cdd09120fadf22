#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ldbc/raster.hpp"
#include "ldbc/sample_orbits.hpp"
#include "ldbc/survey.hpp"

namespace ldbc {
namespace {

const SystemParams kSunMars = sun_mars();
const IntegratorConfig kCfg{};

TEST(GenerateIc, ReproducesSampleTable) {
  for (const SampleOrbit& s : sample_orbits()) {
    const SynodicState ic = generate_ic(s.offset, kSampleF0, kSampleE0, kSunMars);
    EXPECT_NEAR(ic.xp, s.xp, 1e-6) << s.name;
    EXPECT_NEAR(ic.yp, s.yp, 1e-6) << s.name;
    EXPECT_EQ(ic.x, 1.0 - kSunMars.mu() + s.offset.X);
    EXPECT_EQ(ic.y, s.offset.Y);
    EXPECT_EQ(ic.f, 0.0);
  }
}

TEST(GenerateIc, PeriapsisAndPrograde) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-6e-4, 6e-4);
  std::uniform_real_distribution<double> anomaly(-kPi, kPi);
  for (int t = 0; t < 200; ++t) {
    const Offset o{u(rng), u(rng)};
    const double f0 = anomaly(rng);
    const SynodicState ic = generate_ic(o, f0, 0.9, kSunMars);
    // Physical state: radius k r_g, speed from vis-viva, perpendicular. The
    // offset is stored inside x ~ 1, so about 11 digits survive.
    const RelativeState r = to_mars_relative(ic, f0, kSunMars);
    const double rp = pulsation(f0, kSunMars.e_p()) * std::hypot(o.X, o.Y);
    EXPECT_NEAR(r.radius(), rp, 1e-10 * rp);
    EXPECT_NEAR(r.speed(), std::sqrt(kSunMars.mu() * 1.9 / rp), 1e-10 * r.speed());
    EXPECT_NEAR(r.X * r.VX + r.Y * r.VY, 0.0, 1e-10 * r.radius() * r.speed());
    EXPECT_GT(r.X * r.VY - r.Y * r.VX, 0.0);
  }
}

TEST(GenerateIc, ZeroOffset) {
  EXPECT_THROW(generate_ic({0.0, 0.0}, 0.0, 0.9, kSunMars), DegenerateError);
}

TEST(ClassifyPoint, SampleOrbits) {
  for (const SampleOrbit& s : sample_orbits()) {
    const SynodicState ic = generate_ic(s.offset, 0.0, 0.9, kSunMars);
    if (s.backward) {
      const auto c = classify_point(ic, s.fB, kCfg, kSunMars);
      EXPECT_EQ(c.label, *s.backward) << s.name;
    }
    if (s.forward) {
      const auto c = classify_point(ic, s.fF, kCfg, kSunMars);
      EXPECT_EQ(c.label, *s.forward) << s.name;
    }
  }
}

TEST(ClassifyPoint, EventAnomalies) {
  const auto e = classify_point(generate_ic(find_sample_orbit("e")->offset, 0.0, 0.9, kSunMars),
                                kTwoPi, kCfg, kSunMars);
  EXPECT_EQ(e.label, Label::Crash);
  EXPECT_GT(e.event_anomaly, 0.0);
  EXPECT_LT(e.event_anomaly, kTwoPi);
  const auto g = classify_point(generate_ic(find_sample_orbit("g")->offset, 0.0, 0.9, kSunMars),
                                kTwoPi, kCfg, kSunMars);
  EXPECT_EQ(g.label, Label::WeaklyStable);
  EXPECT_TRUE(std::isnan(g.event_anomaly));
}

TEST(ClassifyPoint, InsideBody) {
  const double mu = kSunMars.mu();
  const SynodicState s{0.0, 1.0 - mu + 5e-6, 0.0, 0.0, 0.3};
  EXPECT_EQ(classify_point(s, 1.0, kCfg, kSunMars).label, Label::InsideBody);
  EXPECT_THROW(classify_point(s, 0.0, kCfg, kSunMars), ParameterError);
}

TEST(LabelField, AllInsideBody) {
  const SurveyRequest req{{1e-6, 3}, 0.0, 0.0, kTwoPi, 0.9, 0.5};
  const LabelField l = compute_label_field(req, Direction::Forward, kCfg, kSunMars);
  for (Label v : l.labels) EXPECT_EQ(v, Label::InsideBody);
  for (double v : l.event_anomaly) EXPECT_TRUE(std::isnan(v));
}

TEST(LabelField, RejectsZeroExtent) {
  const SurveyRequest req{{6e-4, 4}, 0.0, 0.0, kTwoPi, 0.9, 0.5};
  EXPECT_THROW(compute_label_field(req, Direction::Backward, kCfg, kSunMars), ParameterError);
  SurveyRequest bad = req;
  bad.fB = 0.5;
  EXPECT_THROW(compute_label_field(bad, Direction::Forward, kCfg, kSunMars), ParameterError);
}

class SmallSurvey : public ::testing::Test {
 protected:
  static constexpr std::size_t kN = 21;
  SurveyRequest req{{6e-4, kN}, 0.0, -kPi, kTwoPi, 0.9, 0.5};
};

TEST_F(SmallSurvey, PartitionAndEventInvariants) {
  for (Direction dir : {Direction::Backward, Direction::Forward}) {
    const LabelField l = compute_label_field(req, dir, kCfg, kSunMars);
    std::size_t counts[5] = {};
    for (std::size_t k = 0; k < l.labels.size(); ++k) {
      const auto code = static_cast<std::size_t>(l.labels[k]);
      ASSERT_LT(code, 5u);
      ++counts[code];
      const bool event = l.labels[k] == Label::Unstable || l.labels[k] == Label::Crash;
      EXPECT_EQ(event, !std::isnan(l.event_anomaly[k]));
      if (event) {
        EXPECT_GE(l.event_anomaly[k], std::min(l.f0, l.ff));
        EXPECT_LE(l.event_anomaly[k], std::max(l.f0, l.ff));
      }
      const Offset o = l.spec.offset(k / kN, k % kN);
      EXPECT_EQ(l.labels[k] == Label::InsideBody, inside_body(o, req.f0, kSunMars));
    }
    EXPECT_EQ(counts[0] + counts[1] + counts[2] + counts[3] + counts[4], kN * kN);
    EXPECT_EQ(counts[4], 0u);
    EXPECT_EQ(counts[3], 1u);  // odd n puts a node on the body centre
  }
}

TEST_F(SmallSurvey, LegSurveyMatchesClassification) {
  const LabelField direct = compute_label_field(req, Direction::Forward, kCfg, kSunMars);
  const LegResult leg = survey_leg(req, Direction::Forward, kCfg, kSunMars);
  EXPECT_EQ(direct.labels, leg.labels.labels);
  for (std::size_t k = 0; k < direct.event_anomaly.size(); ++k) {
    if (std::isnan(direct.event_anomaly[k]))
      EXPECT_TRUE(std::isnan(leg.labels.event_anomaly[k]));
    else
      // The descriptor takes part in step control, so step sequences differ.
      EXPECT_NEAR(direct.event_anomaly[k], leg.labels.event_anomaly[k], 1e-7);
  }
}

TEST_F(SmallSurvey, FieldsAreAdditiveAndNonNegative) {
  const LdFields ld = compute_ld_field(req, kCfg, kSunMars);
  for (std::size_t k = 0; k < ld.total.values.size(); ++k) {
    EXPECT_EQ(ld.total.values[k], ld.backward.values[k] + ld.forward.values[k]);
    EXPECT_GE(ld.backward.values[k], 0.0);
    EXPECT_GE(ld.forward.values[k], 0.0);
  }
  EXPECT_EQ(ld.total.fB, -kPi);
  EXPECT_EQ(ld.total.fF, kTwoPi);
  EXPECT_EQ(ld.backward.fF, 0.0);
  EXPECT_EQ(ld.forward.fB, 0.0);
  // The body-centre node is never propagated.
  EXPECT_EQ(ld.total.values(kN / 2, kN / 2), 0.0);
}

TEST_F(SmallSurvey, DeterministicAcrossWorkerCounts) {
  SurveyOptions one{1, {}};
  SurveyOptions many{4, {}};
  const LdFields a = compute_ld_field(req, kCfg, kSunMars, one);
  const LdFields b = compute_ld_field(req, kCfg, kSunMars, many);
  EXPECT_EQ(a.total.values, b.total.values);
  const LabelField la = compute_label_field(req, Direction::Backward, kCfg, kSunMars, one);
  const LabelField lb = compute_label_field(req, Direction::Backward, kCfg, kSunMars, many);
  EXPECT_EQ(la.labels, lb.labels);
}

TEST_F(SmallSurvey, WeakStabilityShrinksWithInterval) {
  SurveyRequest shorter = req;
  shorter.fF = kPi;
  const LabelField w1 = compute_label_field(shorter, Direction::Forward, kCfg, kSunMars);
  const LabelField w2 = compute_label_field(req, Direction::Forward, kCfg, kSunMars);
  for (std::size_t k = 0; k < w1.labels.size(); ++k)
    if (w2.labels[k] == Label::WeaklyStable) {
      EXPECT_EQ(w1.labels[k], Label::WeaklyStable) << k;
    }
}

TEST(LdField, ZeroExtentsGiveZeroFields) {
  const SurveyRequest req{{6e-4, 5}, 0.0, 0.0, 0.0, 0.9, 0.5};
  const LdFields ld = compute_ld_field(req, kCfg, kSunMars);
  for (double v : ld.total.values) EXPECT_EQ(v, 0.0);
}

TEST(LdField, ProgressIsReported) {
  const SurveyRequest req{{6e-4, 4}, 0.0, 0.0, 0.5, 0.9, 0.5};
  std::size_t last = 0;
  SurveyOptions opt{2, [&](std::size_t done, std::size_t total) {
                      EXPECT_EQ(total, 16u);
                      last = std::max(last, done);
                    }};
  compute_ld_field(req, kCfg, kSunMars, opt);
  EXPECT_EQ(last, 16u);
}

// Single-pixel label fields built from direct classification.
LabelField labels_of(const SampleOrbit& s, double extent) {
  const GridSpec g{6e-4, 2};
  LabelField l{g, Grid<Label>(2, Label::WeaklyStable), Grid<double>(2, kNoEvent), 0.0, extent};
  const auto c = classify_point(generate_ic(s.offset, 0.0, 0.9, kSunMars), extent, kCfg, kSunMars);
  l.labels[0] = c.label;
  l.event_anomaly[0] = c.event_anomaly;
  return l;
}

TEST(CaptureSet, SampleOrbitsAreCaptured) {
  for (const char* name : {"i", "j", "k", "l"}) {
    const SampleOrbit s = *find_sample_orbit(name);
    const Mask c = capture_set(labels_of(s, s.fB), labels_of(s, s.fF));
    EXPECT_EQ(c[0], 1) << name;
  }
  // Orbit a is weakly stable backward, so never captured.
  const SampleOrbit a = *find_sample_orbit("a");
  EXPECT_EQ(capture_set(labels_of(a, -kPi), labels_of(a, kTwoPi))[0], 0);
}

TEST(CaptureSet, NoBackwardEscapeNoCapture) {
  const GridSpec g{6e-4, 4};
  const LabelField all_w{g, Grid<Label>(4, Label::WeaklyStable), Grid<double>(4, kNoEvent), 0.0, -kPi};
  LabelField fwd = all_w;
  fwd.ff = kPi;
  for (auto v : capture_set(all_w, fwd)) EXPECT_EQ(v, 0);
}

TEST(CaptureSet, GridMismatch) {
  const LabelField a{{6e-4, 4}, Grid<Label>(4, Label::Unstable), Grid<double>(4, kNoEvent), 0.0, -kPi};
  LabelField b{{6e-4, 5}, Grid<Label>(5, Label::WeaklyStable), Grid<double>(5, kNoEvent), 0.0, kPi};
  EXPECT_THROW(capture_set(a, b), ShapeError);
  b = {{6e-4, 4}, Grid<Label>(4, Label::WeaklyStable), Grid<double>(4, kNoEvent), 0.5, kPi};
  EXPECT_THROW(capture_set(a, b), ShapeError);
}

TEST(SampleRegion, EdgeFreeMapIsOneRegion) {
  const GridSpec g{1.0, 9};
  const LabelField l{g, Grid<Label>(9, Label::Crash), Grid<double>(9, kNoEvent), 0.0, 1.0};
  const EdgeMap e{g, Mask(9, 0), 0.01};
  const auto regions = sample_region(l, e);
  ASSERT_EQ(regions.size(), 1u);
  EXPECT_EQ(regions[0].area, 81u);
  EXPECT_EQ(regions[0].pixel, (GridIndex{4, 4}));
  EXPECT_EQ(regions[0].label, Label::Crash);
  EXPECT_EQ(regions[0].offset.X, 0.0);
}

TEST(SampleRegion, HorizontalEdgeSplitsInTwo) {
  const GridSpec g{1.0, 8};
  LabelField l{g, Grid<Label>(8, Label::WeaklyStable), Grid<double>(8, kNoEvent), 0.0, 1.0};
  for (std::size_t i = 4; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j) l.labels(i, j) = Label::Unstable;
  EdgeMap e{g, Mask(8, 0), 0.01};
  for (std::size_t j = 0; j < 8; ++j) e.mask(3, j) = 1;
  const auto regions = sample_region(l, e);
  ASSERT_EQ(regions.size(), 2u);
  EXPECT_EQ(regions[0].label, Label::WeaklyStable);
  EXPECT_EQ(regions[0].area, 24u);
  EXPECT_EQ(regions[1].label, Label::Unstable);
  EXPECT_EQ(regions[1].area, 32u);
  for (const auto& r : regions) EXPECT_EQ(e.mask(r.pixel.i, r.pixel.j), 0);
}

TEST(SampleRegion, RepresentativeIsAMember) {
  // An L-shaped region: the centroid falls outside it.
  const GridSpec g{1.0, 6};
  const LabelField l{g, Grid<Label>(6, Label::WeaklyStable), Grid<double>(6, kNoEvent), 0.0, 1.0};
  EdgeMap e{g, Mask(6, 1), 0.01};
  for (std::size_t k = 0; k < 6; ++k) {
    e.mask(0, k) = 0;
    e.mask(k, 0) = 0;
  }
  const auto regions = sample_region(l, e);
  ASSERT_EQ(regions.size(), 1u);
  EXPECT_EQ(e.mask(regions[0].pixel.i, regions[0].pixel.j), 0);
}

// Reduced-resolution backward pi-interval set map: a large connected crash
// lobe contains orbit b, and the body disk is ringed by weakly stable points
// (near-surface periapses of tight ellipses do not impact within half a turn).
TEST(LabelField, BackwardCrashLobeAndDiskRing) {
  const SurveyRequest req{{6e-4, 100}, 0.0, -kPi, 0.0, 0.9, 0.5};
  const LabelField l = compute_label_field(req, Direction::Backward, kCfg, kSunMars);
  const std::size_t n = req.grid.n;
  const Components crash = connected_components(
      n, [&](std::size_t i, std::size_t j) { return l.labels(i, j) == Label::Crash; });
  const GridIndex b = req.grid.index_of(find_sample_orbit("b")->offset);
  const std::int32_t lobe = crash.id(b.i, b.j);
  ASSERT_NE(lobe, kNoComponent);
  std::size_t area = 0;
  for (auto id : crash.id) area += id == lobe;
  EXPECT_GT(area, 100u);

  std::size_t inside = 0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    for (std::size_t j = 1; j + 1 < n; ++j) {
      if (l.labels(i, j) != Label::InsideBody) continue;
      ++inside;
      for (auto [ii, jj] : {std::pair{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}}) {
        const Label v = l.labels(ii, jj);
        EXPECT_TRUE(v == Label::InsideBody || v == Label::WeaklyStable);
      }
    }
  }
  EXPECT_EQ(inside, 4u);
}

}  // namespace
}  // namespace ldbc
