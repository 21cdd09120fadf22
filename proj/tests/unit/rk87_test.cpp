#include <gtest/gtest.h>

#include <cmath>

#include "ldbc/model.hpp"
#include "ldbc/propagate.hpp"
#include "ldbc/rk87.hpp"

namespace ldbc {
namespace {

// Unit-gravity two-body problem in the plane.
struct Kepler {
  Vec<4> operator()(double, const Vec<4>& y) const {
    const double r = std::hypot(y[0], y[1]);
    const double r3 = r * r * r;
    return {y[2], y[3], -y[0] / r3, -y[1] / r3};
  }
};

Vec<4> periapsis_state(double e) { return {1.0 - e, 0.0, 0.0, std::sqrt((1.0 + e) / (1.0 - e))}; }

double kepler_energy_of(const Vec<4>& y) {
  return 0.5 * (y[2] * y[2] + y[3] * y[3]) - 1.0 / std::hypot(y[0], y[1]);
}

TEST(PrinceDormand87, TableauConsistency) {
  using T = PrinceDormand87;
  double sb = 0.0, sbh = 0.0;
  for (std::size_t s = 0; s < T::stages; ++s) {
    sb += T::b[s];
    sbh += T::bhat[s];
    double row = 0.0;
    for (std::size_t m = 0; m < s; ++m) row += T::a[s][m];
    EXPECT_NEAR(row, T::c[s], 1e-12) << "stage " << s;
  }
  EXPECT_NEAR(sb, 1.0, 1e-14);
  EXPECT_NEAR(sbh, 1.0, 1e-14);
}

// One step of size h from periapsis of an e = 0.3 ellipse against 64
// substeps of the same method.
double one_step_error(double h) {
  const Vec<4> y0 = periapsis_state(0.3);
  const Vec<4> y = step_rk87<4>(Kepler{}, 0.0, y0, h).y;
  Vec<4> ref = y0;
  for (int i = 0; i < 64; ++i) ref = step_rk87<4>(Kepler{}, i * h / 64, ref, h / 64).y;
  double err = 0.0;
  for (std::size_t i = 0; i < 4; ++i) err = std::max(err, std::abs(y[i] - ref[i]));
  return err;
}

TEST(StepRk87, OneStepErrorShrinksByTwoToTheEighth) {
  for (double h : {0.4, 0.2, 0.1}) {
    const double ratio = std::log2(one_step_error(h) / one_step_error(h / 2));
    EXPECT_GE(ratio, 7.5) << "h = " << h;
  }
}

// y' = -2 t y^2, y(0) = 1 has y = 1 / (1 + t^2).
TEST(StepRk87, GlobalOrderOnClosedFormProblem) {
  auto rhs = [](double t, const Vec<1>& y) { return Vec<1>{-2.0 * t * y[0] * y[0]}; };
  auto error_at = [&](int n) {
    const double h = 3.0 / n;
    Vec<1> y{1.0};
    for (int i = 0; i < n; ++i) y = step_rk87<1>(rhs, i * h, y, h).y;
    return std::abs(y[0] - 0.1);
  };
  for (int n : {4, 8}) EXPECT_GE(std::log2(error_at(n) / error_at(2 * n)), 7.5) << n;
}

TEST(StepRk87, EmbeddedErrorShrinksFasterThanStep) {
  const Vec<4> y0 = periapsis_state(0.3);
  const auto e1 = step_rk87<4>(Kepler{}, 0.0, y0, 0.1).error;
  const auto e2 = step_rk87<4>(Kepler{}, 0.0, y0, 0.05).error;
  const double n1 = std::abs(e1[0]) + std::abs(e1[1]) + std::abs(e1[2]) + std::abs(e1[3]);
  const double n2 = std::abs(e2[0]) + std::abs(e2[1]) + std::abs(e2[2]) + std::abs(e2[3]);
  // Leading term of the 7th-order companion is O(h^8).
  EXPECT_GT(std::log2(n1 / n2), 7.0);
}

TEST(StepRk87, ZeroVelocityAddsNoDescriptor) {
  auto still = [](double, const Vec<4>&) { return Vec<4>{0.0, 0.0, 0.0, 0.0}; };
  LdAugmented<decltype(still)> rhs{still, 0.5, 1.0, true};
  const ExtendedState y0{0.3, -0.2, 0.0, 0.0, 1.25};
  const auto r = step_rk87<5>(rhs, 0.0, y0, 0.7);
  EXPECT_EQ(r.y[4], 1.25);
  EXPECT_EQ(r.error[4], 0.0);
}

TEST(StepRk87, ConstantSpeedDescriptorIsExact) {
  // Uniform motion at speed 0.25: |v|^{1/2} = 0.5 per unit anomaly.
  auto drift = [](double, const Vec<4>&) { return Vec<4>{0.15, 0.2, 0.0, 0.0}; };
  LdAugmented<decltype(drift)> rhs{drift, 0.5, -1.0, true};
  const ExtendedState y0{0.0, 0.0, 0.15, 0.2, 0.0};
  const auto r = step_rk87<5>(rhs, 0.0, y0, -0.4);
  EXPECT_NEAR(r.y[4], 0.2, 1e-15);
}

TEST(StepRk87, Errors) {
  const Vec<4> y0 = periapsis_state(0.3);
  EXPECT_THROW(step_rk87<4>(Kepler{}, 0.0, y0, 0.0), ParameterError);
  const Vec<4> at_origin{0.0, 0.0, 0.0, 0.0};
  EXPECT_THROW(step_rk87<4>(Kepler{}, 0.0, at_origin, 0.1), NumericalError);
}

TEST(AdaptiveStepper, KeplerEnergyDriftPerRevolution) {
  // Drift follows the tolerance; the e = 0.9 periapsis pass costs the most.
  for (auto [e, limit] : {std::pair{0.0, 1e-10}, {0.3, 1e-10}, {0.5, 1e-10}, {0.9, 1e-9}}) {
    const Vec<4> y0 = periapsis_state(e);
    const double period = kTwoPi;  // a = 1
    AdaptiveStepper<4, Kepler> st(Kepler{}, 0.0, y0, period, IntegratorConfig{});
    while (st.step(period)) {
    }
    EXPECT_EQ(st.t(), period);
    EXPECT_LE(std::abs(kepler_energy_of(st.y()) - kepler_energy_of(y0)), limit) << "e = " << e;
    EXPECT_NEAR(st.y()[0], y0[0], 1e-7);
  }
}

TEST(AdaptiveStepper, BackwardIntegration) {
  const Vec<4> y0 = periapsis_state(0.5);
  AdaptiveStepper<4, Kepler> st(Kepler{}, 0.0, y0, -kTwoPi, IntegratorConfig{});
  while (st.step(-kTwoPi)) {
  }
  EXPECT_EQ(st.t(), -kTwoPi);
  EXPECT_NEAR(st.y()[0], y0[0], 1e-7);
  EXPECT_NEAR(st.y()[3], y0[3], 1e-7);
}

TEST(AdaptiveStepper, StepCap) {
  IntegratorConfig cfg;
  cfg.max_steps = 10;
  AdaptiveStepper<4, Kepler> st(Kepler{}, 0.0, periapsis_state(0.5), 100.0, cfg);
  EXPECT_THROW(
      {
        while (st.step(100.0)) {
        }
      },
      NumericalError);
}

TEST(AdaptiveStepper, StepUnderflowIsStiffness) {
  // y' = y^2 blows up at t = 1.
  auto blowup = [](double, const Vec<1>& y) { return Vec<1>{y[0] * y[0]}; };
  IntegratorConfig cfg;
  cfg.h_min = 1e-6;
  AdaptiveStepper<1, decltype(blowup)> st(blowup, 0.0, Vec<1>{1.0}, 2.0, cfg);
  EXPECT_THROW(
      {
        while (st.step(2.0)) {
        }
      },
      NumericalError);
}

TEST(IntegratorConfig, Validation) {
  IntegratorConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.h_max = cfg.h_min / 2;
  EXPECT_THROW(cfg.validate(), ParameterError);
  cfg = {};
  cfg.rel_tol = 0.0;
  EXPECT_THROW(cfg.validate(), ParameterError);
  cfg = {};
  cfg.event_tol = -1.0;
  EXPECT_THROW(cfg.validate(), ParameterError);
}

}  // namespace
}  // namespace ldbc
