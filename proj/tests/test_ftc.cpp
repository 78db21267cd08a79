#include <gtest/gtest.h>

#include <cmath>

#include "scrubber_ftc/errors.hpp"
#include "scrubber_ftc/ftc.hpp"
#include "scrubber_ftc/simulate.hpp"

namespace scrubber_ftc {
namespace {

ObserverDesign reference_design() {
  return design_observer(augment(reference_plant(), reference_filter()),
                         reference_observer_poles());
}

TEST(SensorFault, SensitivityThroughAdditiveChannel) {
  const auto f = FaultProfile::sensitivity(0.85, 100);
  const auto before = apply_sensor_fault(300.0, f, 99);
  EXPECT_EQ(before.y_m, 300.0);
  EXPECT_EQ(before.f_s, 0.0);
  const auto after = apply_sensor_fault(300.0, f, 100);
  EXPECT_DOUBLE_EQ(after.y_m, 255.0);
  EXPECT_DOUBLE_EQ(after.f_s, -45.0);
  EXPECT_DOUBLE_EQ(after.y_m, 300.0 + after.f_s);
}

TEST(SensorFault, BiasAndNone) {
  const auto b = apply_sensor_fault(10.0, FaultProfile::additive(2.5, 0), 0);
  EXPECT_EQ(b.y_m, 12.5);
  EXPECT_EQ(b.f_s, 2.5);
  const auto n = apply_sensor_fault(10.0, FaultProfile::none(), 5000);
  EXPECT_EQ(n.y_m, 10.0);
  EXPECT_EQ(n.f_s, 0.0);
  // alpha = 1 is a fault that changes nothing.
  const auto one = apply_sensor_fault(10.0, FaultProfile::sensitivity(1.0, 0), 3);
  EXPECT_EQ(one.y_m, 10.0);
  EXPECT_EQ(one.f_s, 0.0);
}

TEST(SensorFault, CompensationRemovesExactEstimate) {
  const auto m = apply_sensor_fault(348.0, FaultProfile::sensitivity(0.7, 0), 0);
  EXPECT_DOUBLE_EQ(compensate(m.y_m, m.f_s), 348.0);
}

TEST(FaultProfile, Validation) {
  EXPECT_THROW(FaultProfile::sensitivity(0.0, 100).validate(), ValidationError);
  EXPECT_THROW(FaultProfile::sensitivity(1.2, 100).validate(), ValidationError);
  EXPECT_THROW(FaultProfile::sensitivity(0.85, -1).validate(), ValidationError);
  auto f = FaultProfile::sensitivity(0.85, 100);
  f.affected_output = 2;
  EXPECT_THROW(f.validate(), ValidationError);
  EXPECT_NO_THROW(FaultProfile::sensitivity(1.0, 0).validate());
  EXPECT_EQ(fault_kind_from_string(to_string(FaultKind::kBias)), FaultKind::kBias);
  EXPECT_THROW(fault_kind_from_string("drift"), ValidationError);
}

TEST(LoopModel, FaultedTruthMatrix) {
  const auto model = LoopModel(reference_design(), PIGains{},
                               FaultProfile::sensitivity(0.7, 0), true, 1e-3);
  const Eigen::MatrixXd& nominal = model.truth_matrix(false);
  const Eigen::MatrixXd& faulted = model.truth_matrix(true);
  // Only the filter input from pressure is scaled.
  Eigen::MatrixXd diff = faulted - nominal;
  EXPECT_NEAR(diff(2, 0), -0.3, 1e-15);
  diff(2, 0) = 0.0;
  EXPECT_TRUE(diff.isZero(0.0));
  EXPECT_THROW(LoopModel(reference_design(), PIGains{}, FaultProfile::none(),
                         true, 0.0),
               ValidationError);
}

TEST(ClosedLoop, SignalIdentitiesHoldEveryStep) {
  const LoopModel model(reference_design(), PIGains{},
                        FaultProfile::sensitivity(0.85, 100), true, 1e-3);
  LoopState s = LoopState::zero(model);
  for (int k = 0; k < 3000; ++k) {
    const auto step = closed_loop_step(s, model, 348.091);
    const auto& g = step.signals;
    EXPECT_DOUBLE_EQ(g.y_m, g.y + g.f_s);
    EXPECT_DOUBLE_EQ(g.y_t, g.y_m - g.f_hat_s);
    EXPECT_DOUBLE_EQ(g.e, g.r - g.y_t);
    if (k < 100) {
      EXPECT_EQ(g.f_s, 0.0);
    }
    EXPECT_EQ(step.next.step, k + 1);
    s = step.next;
  }
}

TEST(ClosedLoop, PiOnlyFeedsRawMeasurementBack) {
  const LoopModel model(reference_design(), PIGains{},
                        FaultProfile::additive(3.0, 0), false, 1e-3);
  LoopState s = LoopState::zero(model);
  for (int k = 0; k < 500; ++k) {
    const auto step = closed_loop_step(s, model, 100.0);
    EXPECT_DOUBLE_EQ(step.signals.e, step.signals.r - step.signals.y_m);
    s = step.next;
  }
}

TEST(ClosedLoop, OutputClampLimitsControlSignal) {
  const LoopModel model(reference_design(), PIGains{}, FaultProfile::none(),
                        true, 1e-3, Span{-0.5, 0.5});
  LoopState s = LoopState::zero(model);
  for (int k = 0; k < 200; ++k) {
    const auto step = closed_loop_step(s, model, 348.091);
    EXPECT_LE(std::abs(step.signals.u), 0.5);
    s = step.next;
  }
}

double steady_ratio(double alpha, bool ftc) {
  Scenario sc;
  sc.duration = 60.0;
  sc.fault = FaultProfile::sensitivity(alpha, 100);
  sc.ftc_enabled = ftc;
  const Trace t = run_scenario(sc);
  return t.rows.back().sig.y / t.rows.back().sig.r;
}

TEST(FaultTolerance, SensitivityFaultSteadyState) {
  double previous_error = 0.0;
  for (double alpha : {0.95, 0.85, 0.70}) {
    EXPECT_LT(std::abs(steady_ratio(alpha, true) - 1.0), 0.01) << alpha;
    const double pi_only = steady_ratio(alpha, false);
    EXPECT_LT(std::abs(pi_only * alpha - 1.0), 0.005) << alpha;
    EXPECT_GT(pi_only - 1.0, previous_error);
    previous_error = pi_only - 1.0;
  }
}

TEST(FaultTolerance, BiasFaultEstimateAndResidual) {
  Scenario sc;
  sc.duration = 120.0;
  sc.fault = FaultProfile::additive(5.0, 100);
  const Trace t = run_scenario(sc);
  EXPECT_LT(std::abs(t.rows.back().sig.f_hat_s - 5.0) / 5.0, 1e-3);
  double peak = 0.0;
  for (const auto& row : t.rows) peak = std::max(peak, row.residual().norm());
  EXPECT_GT(peak, 0.0);
  EXPECT_LT(t.rows.back().residual().norm(), 1e-6 * peak);
  EXPECT_LT(std::abs(t.rows.back().sig.y / t.rows.back().sig.r - 1.0), 0.01);
}

TEST(FaultTolerance, FaultFreeEstimateStaysSmall) {
  Scenario sc;
  sc.duration = 30.0;
  const Trace t = run_scenario(sc);
  for (std::size_t i = t.rows.size() / 2; i < t.rows.size(); ++i) {
    EXPECT_LT(std::abs(t.rows[i].sig.f_hat_s), 1e-6 * kDefaultSetpoint);
  }
}

}  // namespace
}  // namespace scrubber_ftc
