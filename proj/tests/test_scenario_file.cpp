#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "scrubber_ftc/errors.hpp"
#include "scrubber_ftc/scenario_file.hpp"

namespace scrubber_ftc {
namespace {

namespace fs = std::filesystem;

std::string preset_text(const std::string& name) {
  return serialize_scenario(find_preset(name).scenario);
}

std::string replace(std::string text, const std::string& from,
                    const std::string& to) {
  const auto pos = text.find(from);
  if (pos == std::string::npos) throw std::logic_error("no '" + from + "'");
  return text.replace(pos, from.size(), to);
}

std::vector<std::string> violations_of(const std::string& text) {
  try {
    parse_scenario_text(text, "t.cfg");
  } catch (const ValidationError& e) {
    return e.violations();
  }
  return {};
}

bool mentions(const std::vector<std::string>& v, const std::string& needle) {
  for (const auto& s : v)
    if (s.find(needle) != std::string::npos) return true;
  return false;
}

TEST(ScenarioFile, Sens85Preset) {
  const Scenario s = find_preset("sens85_ftc").scenario;
  EXPECT_EQ(s.fault.kind, FaultKind::kSensitivity);
  EXPECT_EQ(s.fault.alpha, 0.85);
  EXPECT_EQ(s.fault.onset_step, 100);
  EXPECT_TRUE(s.ftc_enabled);
  EXPECT_EQ(s.gains, PIGains{});
  EXPECT_EQ(s.setpoint_at(10.0), 348.091);
  EXPECT_EQ(s.duration, 60.0);
  EXPECT_THROW(find_preset("sens99_ftc"), ValidationError);
}

TEST(ScenarioFile, RoundTripEveryPreset) {
  for (const auto& p : builtin_presets()) {
    const std::string text = serialize_scenario(p.scenario);
    const Scenario back = parse_scenario_text(text, p.name, "unnamed");
    EXPECT_EQ(back, p.scenario) << p.name;
    EXPECT_EQ(serialize_scenario(back), text);
  }
}

TEST(ScenarioFile, RoundTripPhysicalAndClamp) {
  Scenario s;
  s.name = "phys";
  s.duration = 20.0;
  s.model_source = ModelSource::kPhysicalParams;
  s.physical.plant.V = 2.75;
  s.physical.valve_tau = 0.1 + 0.2;  // not exactly representable in short form
  s.output_clamp = Span{-3.5, 7.25};
  s.setpoint = {{0.0, 100.0}, {12.5, 1.0 / 3.0}};
  s.fault = FaultProfile::additive(-2.0, 40);
  s.observer_poles = {{-3.0, 1.0}, {-3.0, -1.0}, -1.0, -2.0, -0.5};
  EXPECT_EQ(parse_scenario_text(serialize_scenario(s)), s);
}

TEST(ScenarioFile, ShippedFilesMatchBuiltins) {
  const fs::path dir = fs::path(SCRUBBER_FTC_SOURCE_DIR) / "presets";
  std::size_t seen = 0;
  for (const auto& p : builtin_presets()) {
    const fs::path file = dir / (p.name + ".cfg");
    ASSERT_TRUE(fs::exists(file)) << file;
    EXPECT_EQ(parse_scenario(file), p.scenario) << p.name;
    ++seen;
  }
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(dir))
    files += entry.path().extension() == ".cfg";
  EXPECT_EQ(files, seen);
}

TEST(ScenarioFile, NameDefaultsToFileStem) {
  const std::string text = replace(preset_text("baseline_ftc"),
                                   "name = baseline_ftc\n", "");
  EXPECT_EQ(parse_scenario_text(text, "x", "from_stem").name, "from_stem");
}

TEST(ScenarioFile, ZeroDtIsRejected) {
  const auto v = violations_of(replace(preset_text("sens85_ftc"),
                                       "dt = 0.001", "dt = 0"));
  EXPECT_TRUE(mentions(v, "dt must be > 0"));
}

TEST(ScenarioFile, AlphaAboveOneIsRejected) {
  const auto v = violations_of(replace(preset_text("sens85_ftc"),
                                       "alpha = 0.85", "alpha = 1.2"));
  EXPECT_TRUE(mentions(v, "alpha"));
}

TEST(ScenarioFile, SyntaxErrorsCarryLineNumbersAndAreAllReported) {
  std::string text = preset_text("sens85_ftc");
  text = replace(text, "kp = 0.1396", "kp = fast");
  text = replace(text, "[model]", "[model]\nspeed = 3");
  text += "garbage line\n";
  const auto v = violations_of(text);
  EXPECT_GE(v.size(), 3u);
  EXPECT_TRUE(mentions(v, "t.cfg:8: '[loop] kp' is not a number"));
  EXPECT_TRUE(mentions(v, "unknown key '[model] speed'"));
  EXPECT_TRUE(mentions(v, "expected 'key = value'"));
}

TEST(ScenarioFile, IrrelevantKeysAreRejected) {
  const auto v = violations_of(replace(preset_text("baseline_ftc"),
                                       "kind = none", "kind = none\nalpha = 0.5"));
  EXPECT_TRUE(mentions(v, "only used by sensitivity faults"));
  const auto w = violations_of(replace(preset_text("baseline_ftc"),
                                       "source = matrices", "source = matrices\nV = 3"));
  EXPECT_TRUE(mentions(w, "only used when source = physical"));
}

TEST(ScenarioFile, PoleListIsChecked) {
  const auto v = violations_of(replace(preset_text("baseline_ftc"),
                                       ", -0.5291", ", 0.5291"));
  EXPECT_TRUE(mentions(v, "negative real part"));
  const auto w = violations_of(replace(preset_text("baseline_ftc"),
                                       ", -0.1951, -0.5291", ""));
  EXPECT_TRUE(mentions(w, "exactly 5 poles"));
}

TEST(ScenarioFile, MissingFile) {
  EXPECT_THROW(parse_scenario("/nonexistent/dir/x.cfg"), ValidationError);
}

TEST(Complex, ParseAndFormat) {
  EXPECT_EQ(parse_complex("-54.4047+33.5101i"), Complex(-54.4047, 33.5101));
  EXPECT_EQ(parse_complex("-54.4047 - 33.5101j"), Complex(-54.4047, -33.5101));
  EXPECT_EQ(parse_complex("-0.1951"), Complex(-0.1951, 0.0));
  EXPECT_EQ(parse_complex("2i"), Complex(0.0, 2.0));
  EXPECT_EQ(parse_complex("1e-3-2e+1i"), Complex(1e-3, -20.0));
  EXPECT_THROW(parse_complex("abc"), ValidationError);
  EXPECT_THROW(parse_complex(""), ValidationError);
  for (const Complex c : {Complex(-54.4047, 33.5101), Complex(-0.1951, 0.0),
                          Complex(1.0 / 3.0, -2.0 / 7.0)}) {
    EXPECT_EQ(parse_complex(format_complex(c)), c);
  }
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(60.0), "60");
}

}  // namespace
}  // namespace scrubber_ftc
