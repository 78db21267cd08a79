#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "scrubber_ftc/simulate.hpp"

namespace scrubber_ftc {

// Scenario files are flat key = value documents with four sections.
// Everything after '#' on a line is a comment.
//
//   name = sens85_ftc                 (optional, defaults to the file stem)
//
//   [loop]
//   duration = 60                     s
//   dt = 0.001                        s
//   setpoint = 0:348.091, 20:350      time_s:value_psi, piecewise constant
//   ftc = true                        true | false
//   kp = 0.1396                       controller gain
//   ti = 0.3294                       integral time, s
//   td = 0                            derivative time, s
//   output_clamp = -50, 50            optional, controller output limits
//
//   [fault]
//   kind = sensitivity                none | sensitivity | bias
//   alpha = 0.85                      sensitivity only, 0 < alpha <= 1
//   bias = 5                          bias only, psi
//   onset_step = 100                  sensitivity/bias only, loop iteration
//   output = 1                        optional, must be 1 (pressure)
//
//   [model]
//   source = matrices                 optional: matrices | physical
//   V, d, H, A, rho_i, rho_o, h_i, h_o, g, k, p_o     physical only
//   gas_span = 12, 16                 physical only, mmscfd
//   ip_out_span = 3, 15               physical only, psi
//   ip_in_span = 4, 20                physical only, mA
//   valve_tau = 0.252                 physical only, s
//
//   [observer]
//   poles = -54.4047+33.5101i, -54.4047-33.5101i, -2.7588, -0.1951, -0.5291

/// Parses and validates. Collects every syntax and invariant violation
/// into one ValidationError, each prefixed with "origin:line".
Scenario parse_scenario_text(std::string_view text,
                             const std::string& origin = "<scenario>",
                             const std::string& default_name = "scenario");

Scenario parse_scenario(const std::filesystem::path& path);

/// Canonical text; parse_scenario_text(serialize_scenario(s)) == s.
std::string serialize_scenario(const Scenario& scenario);

void write_scenario(const Scenario& scenario,
                    const std::filesystem::path& path);

/// "a", "a+bi", "a-bi" (a trailing 'j' is accepted too).
Complex parse_complex(std::string_view text);
std::string format_complex(const Complex& value);

/// Shortest round-trip decimal text for a double.
std::string format_double(double value);

// Shipped scenarios ----------------------------------------------------------

struct Preset {
  std::string name;
  std::string description;
  Scenario scenario;
};

/// baseline, sens85 and sens70 in ftc/noftc variants (60 s), bias5 in both
/// variants (120 s), plus a 5 s quick-look variant of sens85 with FTC.
const std::vector<Preset>& builtin_presets();

/// Throws ValidationError for unknown names.
const Preset& find_preset(const std::string& name);

}  // namespace scrubber_ftc
