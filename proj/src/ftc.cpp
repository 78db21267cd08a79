#include "scrubber_ftc/ftc.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "scrubber_ftc/errors.hpp"
#include "scrubber_ftc/integrate.hpp"

namespace scrubber_ftc {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

FaultProfile FaultProfile::sensitivity(double alpha, long onset_step) {
  FaultProfile p;
  p.kind = FaultKind::kSensitivity;
  p.alpha = alpha;
  p.onset_step = onset_step;
  return p;
}

FaultProfile FaultProfile::additive(double bias, long onset_step) {
  FaultProfile p;
  p.kind = FaultKind::kBias;
  p.bias = bias;
  p.onset_step = onset_step;
  return p;
}

void FaultProfile::validate() const {
  std::vector<std::string> errors;
  if (kind == FaultKind::kSensitivity && !(alpha > 0.0 && alpha <= 1.0)) {
    errors.push_back("fault alpha must satisfy 0 < alpha <= 1 (got " +
                     std::to_string(alpha) + ")");
  }
  if (kind == FaultKind::kBias && !std::isfinite(bias)) {
    errors.push_back("fault bias must be finite");
  }
  if (onset_step < 0) errors.push_back("fault onset_step must be >= 0");
  if (affected_output != 1) {
    errors.push_back("fault output must be 1 (pressure)");
  }
  if (!errors.empty()) throw ValidationError(std::move(errors));
}

std::string to_string(FaultKind kind) {
  switch (kind) {
    case FaultKind::kNone:
      return "none";
    case FaultKind::kSensitivity:
      return "sensitivity";
    case FaultKind::kBias:
      return "bias";
  }
  return "unknown";
}

FaultKind fault_kind_from_string(const std::string& text) {
  if (text == "none") return FaultKind::kNone;
  if (text == "sensitivity") return FaultKind::kSensitivity;
  if (text == "bias") return FaultKind::kBias;
  throw ValidationError("fault kind must be none, sensitivity or bias (got '" +
                        text + "')");
}

FaultedMeasurement apply_sensor_fault(double y, const FaultProfile& profile,
                                      long step) {
  if (!profile.active_at(step)) return {y, 0.0};
  if (profile.kind == FaultKind::kSensitivity) {
    const double y_m = profile.alpha * y;
    return {y_m, y_m - y};
  }
  return {y + profile.bias, profile.bias};
}

LoopModel::LoopModel(ObserverDesign design, PIGains gains, FaultProfile fault,
                     bool ftc_enabled, double dt,
                     std::optional<Span> output_clamp)
    : design_(std::move(design)),
      gains_(gains),
      fault_(fault),
      ftc_enabled_(ftc_enabled),
      dt_(dt),
      clamp_(output_clamp) {
  gains_.validate();
  fault_.validate();
  if (!(dt_ > 0.0)) throw ValidationError("loop dt must be > 0");
  if (clamp_ && !(clamp_->max > clamp_->min)) {
    throw ValidationError("output clamp needs max > min");
  }

  const AugmentedSystem& aug = design_.aug;
  const Index n = aug.plant.states();
  const Index q = aug.outputs();
  truth_nominal_ = aug.A_e;
  truth_faulted_ = aug.A_e;
  bias_forcing_ = VectorXd::Zero(aug.states());
  if (fault_.kind == FaultKind::kSensitivity) {
    // Filter sees (C + (alpha - 1) F c_1^T) x.
    MatrixXd c_faulted = aug.plant.C;
    c_faulted += (fault_.alpha - 1.0) * aug.plant.F * aug.plant.C.row(0);
    truth_faulted_.bottomLeftCorner(q, n) = aug.phi * c_faulted;
  } else if (fault_.kind == FaultKind::kBias) {
    bias_forcing_ = aug.F_e * fault_.bias;
  }
}

LoopState LoopState::zero(const LoopModel& model) {
  LoopState s;
  s.truth = VectorXd::Zero(model.design().aug.states());
  s.observer = ObserverState::zero(model.design());
  return s;
}

LoopStepResult closed_loop_step(const LoopState& state, const LoopModel& model,
                                double reference) {
  const ObserverDesign& design = model.design();
  const AugmentedSystem& aug = design.aug;
  const Index ne = aug.states();
  const Index n = aug.plant.states();

  LoopSignals sig;
  sig.r = reference;
  sig.y = aug.plant.C.row(0).dot(state.truth.head(n));
  const auto measured = apply_sensor_fault(sig.y, model.fault(), state.step);
  sig.y_m = measured.y_m;
  sig.f_s = measured.f_s;
  sig.f_hat_s = state.observer.f_hat;
  sig.y_t = compensate(sig.y_m, sig.f_hat_s);
  sig.e = sig.r - (model.ftc_enabled() ? sig.y_t : sig.y_m);

  auto control = pi_step(state.controller, sig.e, model.dt(), model.gains());
  sig.u = control.u;
  if (const auto& clamp = model.output_clamp()) {
    sig.u = std::clamp(sig.u, clamp->min, clamp->max);
  }

  const bool active = model.fault().active_at(state.step);
  const MatrixXd& truth_A = model.truth_matrix(active);
  const VectorXd truth_forcing =
      aug.B_e.col(0) * sig.u +
      (active ? model.truth_bias_forcing() : VectorXd::Zero(ne));
  const double u = sig.u;

  VectorXd joint(2 * ne + 1);
  joint << state.truth, state.observer.stacked();
  const VectorXd next = rk4_step(
      [&](const VectorXd& z) -> VectorXd {
        const VectorXd truth = z.head(ne);
        const VectorXd obs = z.tail(ne + 1);
        VectorXd dz(2 * ne + 1);
        dz.head(ne) = truth_A * truth + truth_forcing;
        dz.tail(ne + 1) =
            observer_derivative(design, obs, u, aug.C_e * truth);
        return dz;
      },
      joint, model.dt());

  LoopStepResult result;
  result.signals = sig;
  result.next.truth = next.head(ne);
  result.next.observer = ObserverState::from_stacked(next.tail(ne + 1));
  result.next.controller = control.state;
  result.next.step = state.step + 1;
  return result;
}

}  // namespace scrubber_ftc
