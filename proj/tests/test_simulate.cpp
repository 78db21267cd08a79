#include <gtest/gtest.h>

#include <chrono>
#include <cmath>

#include "scrubber_ftc/errors.hpp"
#include "scrubber_ftc/report.hpp"
#include "scrubber_ftc/simulate.hpp"

namespace scrubber_ftc {
namespace {

double max_abs_diff(const Trace& a, const Trace& b, double LoopSignals::*field) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.rows.size(); ++i)
    worst = std::max(worst, std::abs(a.rows[i].sig.*field - b.rows[i].sig.*field));
  return worst;
}

TEST(Scenario, DefaultsAndSampleCount) {
  Scenario sc;
  EXPECT_NO_THROW(sc.validate());
  EXPECT_EQ(sc.sample_count(), 5001);
  sc.duration = 0.3;
  sc.dt = 0.1;
  EXPECT_EQ(sc.sample_count(), 4);
}

TEST(Scenario, SetpointIsPiecewiseConstant) {
  Scenario sc;
  sc.setpoint = {{1.0, 10.0}, {2.0, 20.0}};
  EXPECT_EQ(sc.setpoint_at(0.5), 0.0);
  EXPECT_EQ(sc.setpoint_at(1.0), 10.0);
  EXPECT_EQ(sc.setpoint_at(1.99), 10.0);
  EXPECT_EQ(sc.setpoint_at(4.0), 20.0);
}

TEST(Scenario, ValidationCollectsEveryViolation) {
  Scenario sc;
  sc.dt = 0.0;
  sc.fault = FaultProfile::sensitivity(1.2, 100);
  sc.observer_poles = {-1.0, -2.0, 3.0};
  try {
    sc.validate();
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_GE(e.violations().size(), 4u);
  }
}

TEST(RunScenario, ZeroSetpointStaysAtOrigin) {
  Scenario sc;
  sc.setpoint = {{0.0, 0.0}};
  sc.duration = 2.0;
  const Trace t = run_scenario(sc);
  for (const auto& row : t.rows) {
    for (double v : {row.sig.r, row.sig.e, row.sig.u, row.sig.y, row.sig.y_m,
                     row.sig.y_t, row.sig.f_s, row.sig.f_hat_s, row.p,
                     row.m_dot_i}) {
      ASSERT_EQ(v, 0.0);
    }
    ASSERT_TRUE(row.x_hat.isZero(0.0));
  }
}

TEST(RunScenario, DeterministicBitForBit) {
  Scenario sc;
  sc.fault = FaultProfile::sensitivity(0.85, 100);
  const Trace a = run_scenario(sc);
  const Trace b = run_scenario(sc);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    ASSERT_EQ(a.rows[i].sig.y, b.rows[i].sig.y);
    ASSERT_EQ(a.rows[i].sig.u, b.rows[i].sig.u);
    ASSERT_EQ(a.rows[i].sig.f_hat_s, b.rows[i].sig.f_hat_s);
  }
  EXPECT_EQ(a.meta.scenario_hash, b.meta.scenario_hash);
}

TEST(RunScenario, UniformGrid) {
  Scenario sc;
  sc.duration = 1.0;
  sc.dt = 0.01;
  const Trace t = run_scenario(sc);
  ASSERT_EQ(t.rows.size(), 101u);
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    EXPECT_DOUBLE_EQ(t.rows[i].t, static_cast<double>(i) * 0.01);
}

TEST(RunScenario, BaselineTracksWithOvershoot) {
  Scenario sc;
  sc.duration = 20.0;
  const auto start = std::chrono::steady_clock::now();
  const Trace t = run_scenario(sc);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_LT(seconds, 5.0);
  const auto m = measure_step_response(t, kDefaultSetpoint);
  ASSERT_TRUE(m.overshoot && m.settling_time_2pct);
  EXPECT_GT(*m.overshoot, 0.0);
  EXPECT_LT(*m.overshoot, 0.5);
  for (std::size_t i = t.rows.size() - 1000; i < t.rows.size(); ++i) {
    EXPECT_LT(std::abs(t.rows[i].sig.y - kDefaultSetpoint) / kDefaultSetpoint, 0.005);
  }
}

TEST(RunScenario, FaultFreeFtcOnAndOffAgree) {
  Scenario on;
  on.duration = 20.0;
  Scenario off = on;
  off.ftc_enabled = false;
  const Trace a = run_scenario(on);
  const Trace b = run_scenario(off);
  EXPECT_LE(max_abs_diff(a, b, &LoopSignals::y), 1e-9);
  EXPECT_LE(max_abs_diff(a, b, &LoopSignals::u), 1e-9);
}

TEST(RunScenario, HalvingDtBarelyMovesFinalState) {
  Scenario coarse;
  coarse.duration = 60.0;
  coarse.fault = FaultProfile::sensitivity(0.85, 100);
  Scenario fine = coarse;
  fine.dt = coarse.dt / 2.0;
  fine.fault.onset_step = 2 * coarse.fault.onset_step;
  const Trace a = run_scenario(coarse);
  const Trace b = run_scenario(fine);
  const auto& ra = a.rows.back();
  const auto& rb = b.rows.back();
  EXPECT_DOUBLE_EQ(ra.t, rb.t);
  EXPECT_LT(std::abs(ra.p - rb.p) / std::abs(rb.p), 1e-6);
  EXPECT_LT(std::abs(ra.m_dot_i - rb.m_dot_i) / std::abs(rb.m_dot_i), 1e-6);
  EXPECT_LT(std::abs(ra.sig.f_hat_s - rb.sig.f_hat_s) / std::abs(rb.sig.f_hat_s), 1e-6);
}

TEST(RunScenario, PhysicalModelSourceRuns) {
  Scenario sc;
  sc.duration = 20.0;
  sc.model_source = ModelSource::kPhysicalParams;
  const Trace t = run_scenario(sc);
  EXPECT_NEAR(t.meta.constants.ks, 47.3255728850636, 1e-9);
  EXPECT_LT(std::abs(t.rows.back().sig.y / kDefaultSetpoint - 1.0), 0.005);
}

TEST(RunScenario, InvalidScenarioThrowsBeforeSimulating) {
  Scenario sc;
  sc.dt = -1.0;
  EXPECT_THROW(run_scenario(sc), ValidationError);
}

TEST(OpenLoop, DcGainMatchesLongSimulation) {
  const StateSpace plant = reference_plant();
  const double gain = dc_gain(plant.A, plant.B, plant.C)(0, 0);
  for (double u : {0.5, 10.0, 25.2}) {
    const double sim = simulate_open_loop_steady_state(plant, u);
    EXPECT_LT(std::abs(sim - gain * u) / (gain * u), 1e-3);
  }
}

TEST(OpenLoop, TableAndPercentError) {
  EXPECT_NEAR(percent_error(349.6, 346.113), 1.00747443753919, 1e-10);
  EXPECT_EQ(percent_error(5.0, 5.0), 0.0);
  EXPECT_THROW(percent_error(1.0, 0.0), DomainError);
  const auto rows = open_loop_table({1.0, 2.0}, reference_plant(), {13.0, 28.0});
  ASSERT_EQ(rows.size(), 2u);
  ASSERT_TRUE(rows[1].error_pct);
  EXPECT_NEAR(*rows[1].error_pct, (rows[1].simulated - 28.0) / 28.0 * 100.0, 1e-12);
  EXPECT_THROW(open_loop_table({1.0}, reference_plant(), {1.0, 2.0}), ValidationError);
}

TEST(OpenLoop, FixtureErrorColumnRoundsToTwoDecimals) {
  const auto& rows = open_loop_fixture();
  ASSERT_EQ(rows.size(), 10u);
  for (const auto& r : rows) {
    const double pct = (r.simulated - r.real) / r.real * 100.0;
    EXPECT_NEAR(std::round(pct * 100.0) / 100.0, r.error_pct, 1e-12) << r.real;
  }
}

TEST(Report, ComparisonOfSensitivityRuns) {
  Scenario on;
  on.duration = 60.0;
  on.fault = FaultProfile::sensitivity(0.85, 100);
  Scenario off = on;
  off.ftc_enabled = false;
  const Trace a = run_scenario(on);
  const Trace b = run_scenario(off);
  const auto c = compare_runs(a, b, 1e-9, 0.85);
  ASSERT_TRUE(c.divergence_step && c.prediction_holds);
  EXPECT_GE(*c.divergence_step, 100);
  EXPECT_TRUE(*c.prediction_holds);
  EXPECT_NEAR(*c.predicted_ratio, 1.0 / 0.85, 1e-12);
  EXPECT_LT(std::abs(c.steady_error_ftc), 0.01);
  ASSERT_TRUE(observer_convergence_time(a));

  Scenario shorter = on;
  shorter.duration = 1.0;
  EXPECT_THROW(compare_runs(run_scenario(shorter), b), ValidationError);
}

}  // namespace
}  // namespace scrubber_ftc
