#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "scrubber_ftc/errors.hpp"
#include "scrubber_ftc/report.hpp"
#include "scrubber_ftc/trace_csv.hpp"

namespace scrubber_ftc {
namespace {

namespace fs = std::filesystem;

fs::path temp_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() /
                       ("scrubber_ftc_" + tag + "_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

Scenario short_fault_scenario() {
  Scenario s;
  s.duration = 2.0;
  s.fault = FaultProfile::sensitivity(0.85, 100);
  return s;
}

TEST(TraceCsv, HeaderAndRowCount) {
  const Trace t = run_scenario(short_fault_scenario());
  const std::string text = format_trace_csv(t);
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, kTraceCsvHeader);
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 14);
  }
  EXPECT_EQ(rows, t.rows.size());
  EXPECT_EQ(rows, 2001u);
}

TEST(TraceCsv, IdenticalRunsGiveIdenticalBytes) {
  const auto s = short_fault_scenario();
  EXPECT_EQ(format_trace_csv(run_scenario(s)), format_trace_csv(run_scenario(s)));
}

TEST(TraceCsv, ReadBackMatchesToPrintedPrecision) {
  const Trace t = run_scenario(short_fault_scenario());
  const fs::path dir = temp_dir("csv");
  write_trace_csv(t, dir / "trace.csv");
  const Trace back = read_trace_csv(dir / "trace.csv");
  ASSERT_EQ(back.rows.size(), t.rows.size());
  EXPECT_NEAR(back.dt, t.dt, 1e-15);
  for (std::size_t i = 0; i < t.rows.size(); i += 97) {
    const auto& a = t.rows[i];
    const auto& b = back.rows[i];
    auto close = [](double x, double y) {
      return std::abs(x - y) <= 1e-11 * std::max(1.0, std::abs(x));
    };
    EXPECT_TRUE(close(a.t, b.t));
    EXPECT_TRUE(close(a.sig.y, b.sig.y));
    EXPECT_TRUE(close(a.sig.u, b.sig.u));
    EXPECT_TRUE(close(a.sig.f_hat_s, b.sig.f_hat_s));
    EXPECT_TRUE(close(a.p, b.p));
    EXPECT_TRUE(close(a.x_hat(3), b.x_hat(3)));
  }
  // Identities survive the file format.
  for (const auto& row : back.rows) {
    // Three rounded values, each good to half a unit in the 12th digit.
    const double tol = 2e-11 * std::max(1.0, std::abs(row.sig.y));
    EXPECT_NEAR(row.sig.y_m, row.sig.y + row.sig.f_s, tol);
    EXPECT_NEAR(row.sig.y_t, row.sig.y_m - row.sig.f_hat_s, tol);
  }
  fs::remove_all(dir);
}

TEST(TraceCsv, ReportMetricsRecomputableFromFile) {
  const Trace t = run_scenario(short_fault_scenario());
  const fs::path dir = temp_dir("metrics");
  write_trace_csv(t, dir / "trace.csv");
  const Trace back = read_trace_csv(dir / "trace.csv");
  const auto a = measure_step_response(t, kDefaultSetpoint);
  const auto b = measure_step_response(back, kDefaultSetpoint);
  ASSERT_TRUE(a.overshoot && b.overshoot && a.peak_time && b.peak_time);
  EXPECT_NEAR(*a.overshoot, *b.overshoot, 1e-9);
  EXPECT_NEAR(*a.peak_time, *b.peak_time, 1e-12);
  fs::remove_all(dir);
}

TEST(TraceCsv, RejectsForeignFiles) {
  const fs::path dir = temp_dir("bad");
  std::ofstream(dir / "x.csv") << "a,b\n1,2\n";
  EXPECT_THROW(read_trace_csv(dir / "x.csv"), ValidationError);
  EXPECT_THROW(read_trace_csv(dir / "missing.csv"), ValidationError);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace scrubber_ftc
