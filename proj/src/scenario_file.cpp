#include "scrubber_ftc/scenario_file.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "scrubber_ftc/errors.hpp"

namespace scrubber_ftc {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::optional<double> to_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc() || ptr != end || s.empty()) return std::nullopt;
  return value;
}

struct Entry {
  std::string value;
  int line = 0;
};

using Section = std::map<std::string, Entry>;

constexpr std::array kSections = {"", "loop", "fault", "model", "observer"};

constexpr std::array kPhysicalKeys = {
    "V",   "d", "H",   "A",        "rho_i",       "rho_o",      "h_i",
    "h_o", "g", "k",   "p_o",      "gas_span",    "ip_out_span", "ip_in_span",
    "valve_tau"};

class Reader {
 public:
  Reader(std::string origin, std::map<std::string, Section> sections,
         std::vector<std::string> errors)
      : origin_(std::move(origin)),
        sections_(std::move(sections)),
        errors_(std::move(errors)) {}

  bool has(const std::string& section, const std::string& key) const {
    const auto it = sections_.find(section);
    return it != sections_.end() && it->second.count(key) > 0;
  }

  std::optional<Entry> take(const std::string& section, const std::string& key,
                            bool required) {
    used_.insert(section + "." + key);
    const auto it = sections_.find(section);
    if (it == sections_.end() || it->second.count(key) == 0) {
      if (required) {
        error(0, "missing required key '" + qualified(section, key) + "'");
      }
      return std::nullopt;
    }
    return it->second.at(key);
  }

  std::optional<double> number(const std::string& section,
                               const std::string& key, bool required = true) {
    const auto entry = take(section, key, required);
    if (!entry) return std::nullopt;
    const auto value = to_double(entry->value);
    if (!value) {
      error(entry->line, "'" + qualified(section, key) +
                             "' is not a number: '" + entry->value + "'");
    }
    return value;
  }

  std::optional<Span> span(const std::string& section, const std::string& key,
                           bool required = true) {
    const auto entry = take(section, key, required);
    if (!entry) return std::nullopt;
    const auto parts = split(entry->value, ',');
    if (parts.size() == 2) {
      const auto lo = to_double(parts[0]);
      const auto hi = to_double(parts[1]);
      if (lo && hi) return Span{*lo, *hi};
    }
    error(entry->line,
          "'" + qualified(section, key) + "' must be 'min, max'");
    return std::nullopt;
  }

  void reject(const std::string& section, const std::string& key,
              const std::string& why) {
    if (!has(section, key)) return;
    used_.insert(section + "." + key);
    error(sections_.at(section).at(key).line,
          "'" + qualified(section, key) + "' not allowed: " + why);
  }

  void error(int line, const std::string& message) {
    errors_.push_back(origin_ + (line > 0 ? ":" + std::to_string(line) : "") +
                      ": " + message);
  }

  void check_unknown() {
    for (const auto& [section, entries] : sections_) {
      for (const auto& [key, entry] : entries) {
        if (!used_.count(section + "." + key)) {
          error(entry.line, "unknown key '" + qualified(section, key) + "'");
        }
      }
    }
  }

  std::vector<std::string>& errors() { return errors_; }

 private:
  static std::string qualified(const std::string& section,
                               const std::string& key) {
    return section.empty() ? key : "[" + section + "] " + key;
  }

  std::string origin_;
  std::map<std::string, Section> sections_;
  std::vector<std::string> errors_;
  std::set<std::string> used_;
};

Reader tokenize(std::string_view text, const std::string& origin) {
  std::map<std::string, Section> sections;
  std::vector<std::string> errors;
  std::string current;
  int line_no = 0;
  std::istringstream in{std::string(text)};
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto where = origin + ":" + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') {
        errors.push_back(where + "malformed section header");
        continue;
      }
      current = std::string(trim(line.substr(1, line.size() - 2)));
      if (std::find(kSections.begin(), kSections.end(), current) ==
          kSections.end()) {
        errors.push_back(where + "unknown section [" + current + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      errors.push_back(where + "expected 'key = value'");
      continue;
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) {
      errors.push_back(where + "empty key");
      continue;
    }
    auto& section = sections[current];
    if (section.count(key)) {
      errors.push_back(where + "duplicate key '" + key + "'");
      continue;
    }
    section[key] = {value, line_no};
  }
  return Reader(origin, std::move(sections), std::move(errors));
}

void read_loop(Reader& rd, Scenario& s) {
  if (auto v = rd.number("loop", "duration")) s.duration = *v;
  if (auto v = rd.number("loop", "dt")) s.dt = *v;
  if (auto v = rd.number("loop", "kp")) s.gains.kp = *v;
  if (auto v = rd.number("loop", "ti")) s.gains.ti = *v;
  if (auto v = rd.number("loop", "td")) s.gains.td = *v;

  if (auto e = rd.take("loop", "ftc", true)) {
    if (e->value == "true") {
      s.ftc_enabled = true;
    } else if (e->value == "false") {
      s.ftc_enabled = false;
    } else {
      rd.error(e->line, "'[loop] ftc' must be true or false");
    }
  }

  if (auto e = rd.take("loop", "setpoint", true)) {
    s.setpoint.clear();
    for (const auto item : split(e->value, ',')) {
      const auto colon = item.find(':');
      const auto t = colon == std::string_view::npos
                         ? std::nullopt
                         : to_double(item.substr(0, colon));
      const auto v = colon == std::string_view::npos
                         ? std::nullopt
                         : to_double(item.substr(colon + 1));
      if (!t || !v) {
        rd.error(e->line, "'[loop] setpoint' entries must be time:value, got '" +
                              std::string(item) + "'");
        continue;
      }
      s.setpoint.push_back({*t, *v});
    }
  }
  s.output_clamp = rd.span("loop", "output_clamp", /*required=*/false);
}

void read_fault(Reader& rd, Scenario& s) {
  FaultProfile& f = s.fault;
  f = FaultProfile{};
  if (auto e = rd.take("fault", "kind", true)) {
    try {
      f.kind = fault_kind_from_string(e->value);
    } catch (const ValidationError& err) {
      rd.error(e->line, err.what());
    }
  }
  const bool sensitivity = f.kind == FaultKind::kSensitivity;
  const bool bias = f.kind == FaultKind::kBias;
  if (sensitivity) {
    if (auto v = rd.number("fault", "alpha")) f.alpha = *v;
  } else {
    rd.reject("fault", "alpha", "only used by sensitivity faults");
  }
  if (bias) {
    if (auto v = rd.number("fault", "bias")) f.bias = *v;
  } else {
    rd.reject("fault", "bias", "only used by bias faults");
  }
  if (sensitivity || bias) {
    if (auto v = rd.number("fault", "onset_step")) {
      if (*v != std::floor(*v)) {
        rd.error(0, "'[fault] onset_step' must be an integer");
      }
      f.onset_step = static_cast<long>(*v);
    }
  } else {
    rd.reject("fault", "onset_step", "fault kind is none");
  }
  if (auto v = rd.number("fault", "output", /*required=*/false)) {
    f.affected_output = static_cast<int>(*v);
  }
}

void read_model(Reader& rd, Scenario& s) {
  s.model_source = ModelSource::kIdentifiedMatrices;
  if (auto e = rd.take("model", "source", false)) {
    try {
      s.model_source = model_source_from_string(e->value);
    } catch (const ValidationError& err) {
      rd.error(e->line, err.what());
    }
  }
  if (s.model_source != ModelSource::kPhysicalParams) {
    for (const char* key : kPhysicalKeys) {
      rd.reject("model", key, "only used when source = physical");
    }
    return;
  }
  PhysicalModelParams& p = s.physical;
  PhysicalPlantParams& pl = p.plant;
  const std::array<std::pair<const char*, double*>, 11> numbers = {{
      {"V", &pl.V}, {"d", &pl.d}, {"H", &pl.H}, {"A", &pl.A},
      {"rho_i", &pl.rho_i}, {"rho_o", &pl.rho_o}, {"h_i", &pl.h_i},
      {"h_o", &pl.h_o}, {"g", &pl.g}, {"k", &pl.k}, {"p_o", &pl.p_o},
  }};
  for (const auto& [key, field] : numbers) {
    if (auto v = rd.number("model", key)) *field = *v;
  }
  if (auto v = rd.span("model", "gas_span")) p.gas_span = *v;
  if (auto v = rd.span("model", "ip_out_span")) p.ip_out_span = *v;
  if (auto v = rd.span("model", "ip_in_span")) p.ip_in_span = *v;
  if (auto v = rd.number("model", "valve_tau")) p.valve_tau = *v;
}

void read_observer(Reader& rd, Scenario& s) {
  if (auto e = rd.take("observer", "poles", true)) {
    s.observer_poles.clear();
    for (const auto item : split(e->value, ',')) {
      try {
        s.observer_poles.push_back(parse_complex(item));
      } catch (const ValidationError& err) {
        rd.error(e->line, err.what());
      }
    }
  }
}

std::string format_span(Span span) {
  return format_double(span.min) + ", " + format_double(span.max);
}

}  // namespace

Complex parse_complex(std::string_view text) {
  std::string compact;
  for (char c : text) {
    if (c != ' ' && c != '\t') compact.push_back(c);
  }
  std::string_view s = compact;
  const auto fail = [&] {
    return ValidationError("not a complex number: '" + std::string(text) + "'");
  };
  if (s.empty()) throw fail();
  if (s.back() != 'i' && s.back() != 'j') {
    if (auto v = to_double(s)) return {*v, 0.0};
    throw fail();
  }
  s.remove_suffix(1);
  // Split at the last sign that is not a leading sign or an exponent sign.
  std::size_t split_at = std::string_view::npos;
  for (std::size_t i = s.size(); i-- > 1;) {
    if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
      split_at = i;
      break;
    }
  }
  if (split_at == std::string_view::npos) {
    const auto im = s.empty() || s == "+" ? std::optional<double>(1.0)
                    : s == "-"            ? std::optional<double>(-1.0)
                                          : to_double(s);
    if (!im) throw fail();
    return {0.0, *im};
  }
  const auto re = to_double(s.substr(0, split_at));
  auto im_text = s.substr(split_at);
  const auto im = im_text == "+"   ? std::optional<double>(1.0)
                  : im_text == "-" ? std::optional<double>(-1.0)
                                   : to_double(im_text);
  if (!re || !im) throw fail();
  return {*re, *im};
}

std::string format_complex(const Complex& value) {
  if (value.imag() == 0.0) return format_double(value.real());
  std::string out = format_double(value.real());
  out += value.imag() < 0.0 ? "-" : "+";
  out += format_double(std::abs(value.imag()));
  out += "i";
  return out;
}

std::string format_double(double value) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

Scenario parse_scenario_text(std::string_view text, const std::string& origin,
                             const std::string& default_name) {
  Reader rd = tokenize(text, origin);
  Scenario s;
  s.name = default_name;
  if (auto e = rd.take("", "name", false)) s.name = e->value;
  read_loop(rd, s);
  read_fault(rd, s);
  read_model(rd, s);
  read_observer(rd, s);
  rd.check_unknown();

  if (rd.errors().empty()) {
    try {
      s.validate();
    } catch (const ValidationError& err) {
      for (const auto& v : err.violations()) rd.error(0, v);
    }
  }
  if (!rd.errors().empty()) throw ValidationError(std::move(rd.errors()));
  return s;
}

Scenario parse_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read scenario file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario_text(buffer.str(), path.string(),
                             path.stem().string());
}

std::string serialize_scenario(const Scenario& s) {
  std::ostringstream out;
  out << "name = " << s.name << "\n\n";

  out << "[loop]\n";
  out << "duration = " << format_double(s.duration) << "  # s\n";
  out << "dt = " << format_double(s.dt) << "  # s\n";
  out << "setpoint = ";
  for (std::size_t i = 0; i < s.setpoint.size(); ++i) {
    if (i) out << ", ";
    out << format_double(s.setpoint[i].time) << ":"
        << format_double(s.setpoint[i].value);
  }
  out << "  # time_s:value_psi\n";
  out << "ftc = " << (s.ftc_enabled ? "true" : "false") << "\n";
  out << "kp = " << format_double(s.gains.kp) << "\n";
  out << "ti = " << format_double(s.gains.ti) << "  # s\n";
  out << "td = " << format_double(s.gains.td) << "  # s\n";
  if (s.output_clamp) out << "output_clamp = " << format_span(*s.output_clamp) << "\n";

  out << "\n[fault]\n";
  out << "kind = " << to_string(s.fault.kind) << "\n";
  if (s.fault.kind == FaultKind::kSensitivity) {
    out << "alpha = " << format_double(s.fault.alpha) << "\n";
  }
  if (s.fault.kind == FaultKind::kBias) {
    out << "bias = " << format_double(s.fault.bias) << "  # psi\n";
  }
  if (s.fault.kind != FaultKind::kNone) {
    out << "onset_step = " << s.fault.onset_step << "\n";
  }
  out << "output = " << s.fault.affected_output << "\n";

  out << "\n[model]\n";
  out << "source = " << to_string(s.model_source) << "\n";
  if (s.model_source == ModelSource::kPhysicalParams) {
    const auto& p = s.physical;
    const auto& pl = p.plant;
    out << "V = " << format_double(pl.V) << "  # m^3\n";
    out << "d = " << format_double(pl.d) << "  # m\n";
    out << "H = " << format_double(pl.H) << "  # m\n";
    out << "A = " << format_double(pl.A) << "  # m^2, 0 = derive from d\n";
    out << "rho_i = " << format_double(pl.rho_i) << "  # kg/m^3\n";
    out << "rho_o = " << format_double(pl.rho_o) << "  # kg/m^3\n";
    out << "h_i = " << format_double(pl.h_i) << "  # J/kg\n";
    out << "h_o = " << format_double(pl.h_o) << "  # J/kg\n";
    out << "g = " << format_double(pl.g) << "  # m/s^2\n";
    out << "k = " << format_double(pl.k) << "\n";
    out << "p_o = " << format_double(pl.p_o) << "  # psi\n";
    out << "gas_span = " << format_span(p.gas_span) << "  # mmscfd\n";
    out << "ip_out_span = " << format_span(p.ip_out_span) << "  # psi\n";
    out << "ip_in_span = " << format_span(p.ip_in_span) << "  # mA\n";
    out << "valve_tau = " << format_double(p.valve_tau) << "  # s\n";
  }

  out << "\n[observer]\n";
  out << "poles = ";
  for (std::size_t i = 0; i < s.observer_poles.size(); ++i) {
    if (i) out << ", ";
    out << format_complex(s.observer_poles[i]);
  }
  out << "\n";
  return out.str();
}

void write_scenario(const Scenario& scenario,
                    const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw RuntimeFailure("cannot write " + path.string());
  out << serialize_scenario(scenario);
  if (!out) throw RuntimeFailure("failed writing " + path.string());
}

const std::vector<Preset>& builtin_presets() {
  static const std::vector<Preset> presets = [] {
    std::vector<Preset> out;
    auto make = [&](const std::string& base, const std::string& what,
                    FaultProfile fault, double duration) {
      for (bool ftc : {true, false}) {
        Scenario s;
        s.name = base + (ftc ? "_ftc" : "_noftc");
        s.duration = duration;
        s.fault = fault;
        s.ftc_enabled = ftc;
        out.push_back({s.name, what + (ftc ? ", FTC on" : ", PI only"), s});
      }
    };
    make("baseline", "step to 348.091 psi, healthy sensor", FaultProfile::none(),
         60.0);
    make("sens85", "85% transmitter sensitivity from step 100",
         FaultProfile::sensitivity(0.85, kDefaultFaultOnsetStep), 60.0);
    make("sens70", "70% transmitter sensitivity from step 100",
         FaultProfile::sensitivity(0.70, kDefaultFaultOnsetStep), 60.0);
    make("bias5", "+5 psi transmitter bias from step 100",
         FaultProfile::additive(5.0, kDefaultFaultOnsetStep), 120.0);

    Scenario quick;
    quick.name = "sens85_ftc_5s";
    quick.duration = 5.0;
    quick.fault = FaultProfile::sensitivity(0.85, kDefaultFaultOnsetStep);
    out.push_back({quick.name, "5 s look at the 85% fault with FTC", quick});
    return out;
  }();
  return presets;
}

const Preset& find_preset(const std::string& name) {
  for (const auto& p : builtin_presets()) {
    if (p.name == name) return p;
  }
  throw ValidationError("unknown preset '" + name + "'");
}

}  // namespace scrubber_ftc
