#include "scrubber_ftc/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "scrubber_ftc/errors.hpp"
#include "scrubber_ftc/scenario_file.hpp"

namespace scrubber_ftc {

namespace {

std::string fmt(const char* format, double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, value);
  return buf;
}

std::string opt(const std::optional<double>& v, const char* format = "%.6g s") {
  return v ? fmt(format, *v) : std::string("n/a");
}

std::string fault_summary(const FaultProfile& f) {
  switch (f.kind) {
    case FaultKind::kNone:
      return "none";
    case FaultKind::kSensitivity:
      return "sensitivity alpha=" + format_double(f.alpha) + " from step " +
             std::to_string(f.onset_step);
    case FaultKind::kBias:
      return "bias " + format_double(f.bias) + " psi from step " +
             std::to_string(f.onset_step);
  }
  return "unknown";
}

void matrix_block(std::ostringstream& out, const std::string& name,
                  const Eigen::MatrixXd& m) {
  out << name << " (" << m.rows() << "x" << m.cols() << ")\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out << "  ";
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << fmt("%14.6f", m(i, j));
    out << "\n";
  }
}

void pole_block(std::ostringstream& out, const std::string& name,
                std::vector<Complex> poles) {
  std::sort(poles.begin(), poles.end(), [](const Complex& a, const Complex& b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  out << name << "\n";
  for (const auto& p : poles) {
    out << "  " << fmt("%14.8f", p.real()) << fmt(" %+14.8fi", p.imag())
        << "\n";
  }
}

}  // namespace

RunComparison compare_runs(const Trace& ftc, const Trace& noftc,
                           double epsilon, std::optional<double> sensitivity) {
  if (ftc.rows.size() != noftc.rows.size() || ftc.rows.empty()) {
    throw ValidationError("compare_runs: traces have different grids");
  }
  for (std::size_t i = 0; i < ftc.rows.size(); ++i) {
    if (ftc.rows[i].t != noftc.rows[i].t) {
      throw ValidationError("compare_runs: time grids differ at row " +
                            std::to_string(i));
    }
  }

  RunComparison c;
  const auto& last_ftc = ftc.rows.back().sig;
  const auto& last_noftc = noftc.rows.back().sig;
  c.steady_error_ftc = (last_ftc.y - last_ftc.r) / last_ftc.r;
  c.steady_error_noftc = (last_noftc.y - last_noftc.r) / last_noftc.r;
  c.observed_ratio = last_noftc.y / last_noftc.r;
  for (std::size_t i = 0; i < ftc.rows.size(); ++i) {
    if (std::abs(ftc.rows[i].sig.y - noftc.rows[i].sig.y) > epsilon) {
      c.divergence_step = static_cast<long>(i);
      break;
    }
  }
  if (sensitivity) {
    c.predicted_ratio = 1.0 / *sensitivity;
    c.prediction_holds =
        std::abs(c.observed_ratio / *c.predicted_ratio - 1.0) < 0.005;
  }
  return c;
}

std::optional<double> observer_convergence_time(const Trace& trace,
                                                double fraction) {
  double peak = 0.0;
  for (const auto& row : trace.rows) peak = std::max(peak, std::abs(row.sig.f_s));
  if (peak == 0.0) return std::nullopt;
  const double band = fraction * peak;
  for (std::size_t i = trace.rows.size(); i-- > 0;) {
    const auto& sig = trace.rows[i].sig;
    if (std::abs(sig.f_hat_s - sig.f_s) > band) {
      if (i + 1 == trace.rows.size()) return std::nullopt;
      return trace.rows[i + 1].t;
    }
  }
  return trace.rows.front().t;
}

ConstantsComparison compare_model_constants(const PhysicalModelParams& physical) {
  return {constants_of(reference_plant()), constants_of(physical_plant(physical))};
}

RunReport build_report(const Scenario& scenario, const Trace& primary,
                       const Trace& counterpart) {
  RunReport r;
  r.scenario_name = scenario.name;
  r.scenario_hash = primary.meta.scenario_hash;
  r.ftc_enabled = scenario.ftc_enabled;
  r.fault_summary = fault_summary(scenario.fault);
  r.dt = scenario.dt;
  r.duration = scenario.duration;
  r.onset_time = static_cast<double>(scenario.fault.onset_step) * scenario.dt;
  r.final_setpoint = scenario.setpoint.back().value;
  r.samples = static_cast<long>(primary.rows.size());
  if (r.final_setpoint != 0.0) {
    r.step = measure_step_response(primary, r.final_setpoint);
    const auto& last = primary.rows.back().sig;
    r.steady_error = (last.y - last.r) / last.r;
  }
  r.convergence_time = observer_convergence_time(primary);

  const Trace& ftc = scenario.ftc_enabled ? primary : counterpart;
  const Trace& noftc = scenario.ftc_enabled ? counterpart : primary;
  const std::optional<double> alpha =
      scenario.fault.kind == FaultKind::kSensitivity
          ? std::optional<double>(scenario.fault.alpha)
          : std::nullopt;
  if (r.final_setpoint != 0.0) {
    r.comparison = compare_runs(ftc, noftc, 1e-9, alpha);
  }
  r.model_source = scenario.model_source;
  r.constants = compare_model_constants(scenario.physical);
  return r;
}

std::string format_report_text(const RunReport& r) {
  std::ostringstream out;
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(r.scenario_hash));
  out << "Scenario\n";
  out << "  name                  " << r.scenario_name << "\n";
  out << "  hash                  " << hash << "\n";
  out << "  ftc                   " << (r.ftc_enabled ? "on" : "off") << "\n";
  out << "  fault                 " << r.fault_summary << "\n";
  out << "  fault onset time      " << fmt("%.6g s", r.onset_time) << "\n";
  out << "  dt / duration         " << fmt("%.6g s", r.dt) << " / "
      << fmt("%.6g s", r.duration) << "\n";
  out << "  samples               " << r.samples << "\n";
  out << "  final setpoint        " << fmt("%.6f psi", r.final_setpoint) << "\n";
  out << "  model source          " << to_string(r.model_source) << "\n";

  out << "\nStep response (true pressure)\n";
  out << "  rise time 10-90%      " << opt(r.step.rise_time) << "\n";
  out << "  peak time             " << opt(r.step.peak_time) << "\n";
  out << "  settling time 2%      " << opt(r.step.settling_time_2pct) << "\n";
  out << "  overshoot             "
      << (r.step.overshoot ? fmt("%.4f %%", 100.0 * *r.step.overshoot) : "n/a")
      << "\n";
  out << "  steady error (y-r)/r  " << fmt("%+.6e", r.steady_error) << "\n";
  out << "  observer convergence  " << opt(r.convergence_time) << "\n";

  const auto& c = r.comparison;
  out << "\nFTC versus PI only\n";
  out << "  steady error, FTC     " << fmt("%+.6e", c.steady_error_ftc) << "\n";
  out << "  steady error, PI only " << fmt("%+.6e", c.steady_error_noftc) << "\n";
  out << "  divergence step       "
      << (c.divergence_step ? std::to_string(*c.divergence_step) : "none") << "\n";
  out << "  PI-only y/r           " << fmt("%.6f", c.observed_ratio) << "\n";
  out << "  predicted 1/alpha     " << opt(c.predicted_ratio, "%.6f") << "\n";
  out << "  prediction within 0.5% "
      << (c.prediction_holds ? (*c.prediction_holds ? "yes" : "NO") : "n/a")
      << "\n";

  const auto& id = r.constants.identified;
  const auto& ph = r.constants.physical;
  out << "\nModel constants          identified      physical     diff %\n";
  auto row = [&](const char* name, double a, double b) {
    out << "  " << name << fmt("%14.6f", a) << fmt("%14.6f", b)
        << fmt("%11.2f", 100.0 * (b - a) / a) << "\n";
  };
  row("K_s   (psi/mmscfd)  ", id.ks, ph.ks);
  row("tau_s (s)           ", id.tau_s, ph.tau_s);
  row("K_v   (mmscfd/mA)   ", id.kv, ph.kv);
  row("tau_v (s)           ", id.tau_v, ph.tau_v);
  return out.str();
}

std::string format_report_kv(const RunReport& r) {
  std::ostringstream out;
  auto kv = [&](const std::string& key, const std::string& value) {
    out << key << "=" << value << "\n";
  };
  auto num = [](double v) { return format_double(v); };
  auto onum = [&](const std::optional<double>& v) {
    return v ? num(*v) : std::string("none");
  };
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(r.scenario_hash));
  kv("scenario", r.scenario_name);
  kv("scenario_hash", hash);
  kv("ftc", r.ftc_enabled ? "true" : "false");
  kv("fault", r.fault_summary);
  kv("onset_time", num(r.onset_time));
  kv("dt", num(r.dt));
  kv("duration", num(r.duration));
  kv("samples", std::to_string(r.samples));
  kv("final_setpoint", num(r.final_setpoint));
  kv("model_source", to_string(r.model_source));
  kv("rise_time", onum(r.step.rise_time));
  kv("peak_time", onum(r.step.peak_time));
  kv("settling_time_2pct", onum(r.step.settling_time_2pct));
  kv("overshoot", onum(r.step.overshoot));
  kv("steady_error", num(r.steady_error));
  kv("observer_convergence_time", onum(r.convergence_time));
  kv("steady_error_ftc", num(r.comparison.steady_error_ftc));
  kv("steady_error_noftc", num(r.comparison.steady_error_noftc));
  kv("divergence_step", r.comparison.divergence_step
                            ? std::to_string(*r.comparison.divergence_step)
                            : "none");
  kv("noftc_ratio", num(r.comparison.observed_ratio));
  kv("predicted_ratio", onum(r.comparison.predicted_ratio));
  kv("prediction_holds", r.comparison.prediction_holds
                             ? (*r.comparison.prediction_holds ? "true" : "false")
                             : "none");
  kv("identified_ks", num(r.constants.identified.ks));
  kv("identified_tau_s", num(r.constants.identified.tau_s));
  kv("identified_kv", num(r.constants.identified.kv));
  kv("identified_tau_v", num(r.constants.identified.tau_v));
  kv("physical_ks", num(r.constants.physical.ks));
  kv("physical_tau_s", num(r.constants.physical.tau_s));
  kv("physical_kv", num(r.constants.physical.kv));
  kv("physical_tau_v", num(r.constants.physical.tau_v));
  return out.str();
}

std::string format_design_report(ModelSource source,
                                 const PhysicalModelParams& physical) {
  const StateSpace plant = source == ModelSource::kPhysicalParams
                               ? physical_plant(physical)
                               : reference_plant();
  const AugmentedSystem aug = augment(plant, reference_filter());
  const auto targets = reference_observer_poles();
  const ObserverDesign design = design_observer(aug, targets);
  const auto& m = design.mats;

  std::ostringstream out;
  out << "Model source: " << to_string(source) << "\n\n";
  matrix_block(out, "A_g", m.A_g);
  matrix_block(out, "B_g", m.B_g);
  matrix_block(out, "C_g", m.C_g);
  const auto obs = observability_rank(m.A_g, m.C_g);
  out << "observability rank " << obs.rank << " of " << m.A_g.rows()
      << (obs.observable ? " (observable)" : " (NOT observable)") << "\n\n";

  if (source == ModelSource::kIdentifiedMatrices) {
    const auto reported = reported_observer_matrices();
    const double diff = std::max({(m.A_g - reported.A_g).cwiseAbs().maxCoeff(),
                                  (m.B_g - reported.B_g).cwiseAbs().maxCoeff(),
                                  (m.C_g - reported.C_g).cwiseAbs().maxCoeff()});
    out << "max |entry - tabulated| over A_g, B_g, C_g: " << fmt("%.3e", diff)
        << "\n\n";
  }

  matrix_block(out, "observer gain L = [L_x; L_f]", design.L);
  pole_block(out, "target poles", targets);
  const auto achieved = design.achieved_poles();
  pole_block(out, "achieved poles eig(A_g - L C_g)", achieved);
  out << "max relative pole error: "
      << fmt("%.3e", pole_match_error(achieved, targets)) << "\n\n";

  const auto reported_gain = reported_gain_transposed();
  const auto reported_poles = eigenvalues(m.A_g - reported_gain * m.C_g);
  matrix_block(out, "reported gain table (transposed)", reported_gain);
  pole_block(out, "eig(A_g - K^T C_g) for the reported gain", reported_poles);
  const double reported_err = pole_match_error(reported_poles, targets);
  out << "max relative pole error: " << fmt("%.3e", reported_err)
      << (reported_err <= 1e-6 ? "  (matches)" : "  (does NOT match the targets)")
      << "\n";
  return out.str();
}

std::string format_open_loop_report() {
  std::ostringstream out;
  out << "Open-loop steady pressure, plant measurements vs reported model\n";
  out << "      real   reported   error% (reported)   error% (recomputed)\n";
  for (const auto& row : open_loop_fixture()) {
    out << fmt("%10.3f", row.real) << fmt("%11.1f", row.simulated)
        << fmt("%19.2f", row.error_pct)
        << fmt("%22.2f", percent_error(row.simulated, row.real)) << "\n";
  }

  const StateSpace plant = reference_plant();
  const double gain = dc_gain(plant.A, plant.B, plant.C)(0, 0);
  std::vector<double> inputs;
  std::vector<double> refs;
  for (const auto& row : open_loop_fixture()) {
    inputs.push_back(row.real / gain);
    refs.push_back(row.real);
  }
  out << "\nIdentified plant, valve signal chosen as real/dc_gain"
      << fmt(" (dc_gain = %.6f psi/mA)\n", gain);
  out << "        u (mA)   simulated   dc_gain*u        real   error%\n";
  for (const auto& row : open_loop_table(inputs, plant, refs)) {
    out << fmt("%14.6f", row.u) << fmt("%12.4f", row.simulated)
        << fmt("%12.4f", row.predicted) << fmt("%12.3f", *row.reference)
        << fmt("%9.4f", std::abs(*row.error_pct) < 5e-5 ? 0.0 : *row.error_pct) << "\n";
  }
  return out.str();
}

}  // namespace scrubber_ftc
