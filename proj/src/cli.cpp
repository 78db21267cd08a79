#include "scrubber_ftc/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <ostream>

#include "scrubber_ftc/errors.hpp"
#include "scrubber_ftc/report.hpp"
#include "scrubber_ftc/scenario_file.hpp"
#include "scrubber_ftc/trace_csv.hpp"

namespace scrubber_ftc {

namespace fs = std::filesystem;

namespace {

Scenario load_scenario(const std::string& what) {
  if (fs::exists(what)) return parse_scenario(what);
  for (const auto& p : builtin_presets()) {
    if (p.name == what) return p.scenario;
  }
  throw ValidationError("'" + what +
                        "' is neither a readable scenario file nor a preset");
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw RuntimeFailure("cannot write " + path.string());
  out << text;
}

int run_command(const std::string& source, const std::string& out_dir,
                bool kv, std::ostream& out) {
  const Scenario scenario = load_scenario(source);
  Scenario twin = scenario;
  twin.ftc_enabled = !scenario.ftc_enabled;

  const Trace primary = run_scenario(scenario);
  const Trace counterpart = run_scenario(twin);
  const RunReport report = build_report(scenario, primary, counterpart);

  const fs::path dir = out_dir.empty() ? fs::path("runs") / scenario.name
                                       : fs::path(out_dir);
  fs::create_directories(dir);
  write_scenario(scenario, dir / "scenario.cfg");
  write_trace_csv(primary, dir / "trace.csv");
  write_trace_csv(counterpart, dir / "counterpart.csv");
  const std::string text = format_report_text(report);
  const std::string keyed = format_report_kv(report);
  write_text(dir / "report.txt", text);
  if (kv) write_text(dir / "report.kv", keyed);

  out << (kv ? keyed : text);
  out << "\nwrote " << (dir / "trace.csv").string() << " ("
      << primary.rows.size() << " rows), counterpart.csv, report.txt"
      << (kv ? ", report.kv" : "") << ", scenario.cfg\n";
  return kExitOk;
}

int presets_command(const std::string& write_dir, std::ostream& out) {
  for (const auto& p : builtin_presets()) {
    char line[160];
    std::snprintf(line, sizeof(line), "%-16s %6.1f s  %s\n", p.name.c_str(),
                  p.scenario.duration, p.description.c_str());
    out << line;
  }
  if (!write_dir.empty()) {
    fs::create_directories(write_dir);
    for (const auto& p : builtin_presets()) {
      write_scenario(p.scenario, fs::path(write_dir) / (p.name + ".cfg"));
    }
    out << "wrote " << builtin_presets().size() << " preset files to "
        << write_dir << "\n";
  }
  return kExitOk;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"Scrubber pressure loop with sensor-fault-tolerant control"};
  app.name("scrubber_ftc");
  app.require_subcommand(1);

  std::string run_source;
  std::string run_out;
  bool run_kv = false;
  auto* run = app.add_subcommand("run", "Simulate a scenario, write CSV traces and a report");
  run->add_option("scenario", run_source, "Scenario file or preset name")->required();
  run->add_option("--out", run_out, "Output directory (default runs/<name>)");
  run->add_flag("--kv", run_kv, "Emit the report as key=value lines");

  std::string presets_dir;
  auto* presets = app.add_subcommand("presets", "List the shipped scenarios");
  presets->add_option("--write", presets_dir, "Also write them as .cfg files here");

  std::string design_model = "matrices";
  auto* design = app.add_subcommand(
      "design", "Print model matrices, observer gain and achieved poles");
  design->add_option("--model", design_model, "matrices | physical")
      ->check(CLI::IsMember({"matrices", "physical"}));

  auto* open_loop = app.add_subcommand(
      "open-loop", "Open-loop steady-state comparison table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitValidation;
  }

  try {
    if (*run) return run_command(run_source, run_out, run_kv, out);
    if (*presets) return presets_command(presets_dir, out);
    if (*design) {
      out << format_design_report(model_source_from_string(design_model));
      return kExitOk;
    }
    if (*open_loop) {
      out << format_open_loop_report();
      return kExitOk;
    }
  } catch (const ValidationError& e) {
    err << "validation error:\n";
    for (const auto& v : e.violations()) err << "  " << v << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << "\n";
    return kExitRuntime;
  }
  err << app.help();
  return kExitValidation;
}

}  // namespace scrubber_ftc
