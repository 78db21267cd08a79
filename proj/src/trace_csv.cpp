#include "scrubber_ftc/trace_csv.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include "scrubber_ftc/errors.hpp"

namespace scrubber_ftc {

namespace {

void append_number(std::string& out, double value) {
  std::array<char, 48> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(),
                                       value, std::chars_format::general, 12);
  // Normalize negative zero so equal traces give equal bytes.
  if (ptr - buf.data() == 2 && buf[0] == '-' && buf[1] == '0') {
    out += '0';
    return;
  }
  out.append(buf.data(), ptr);
}

}  // namespace

std::string format_trace_csv(const Trace& trace) {
  std::string out(kTraceCsvHeader);
  out += '\n';
  out.reserve(out.size() + trace.rows.size() * 200);
  for (const auto& row : trace.rows) {
    const std::array<double, 15> fields = {
        row.t,        row.sig.r,       row.sig.e,   row.sig.u,    row.m_dot_i,
        row.p,        row.sig.y,       row.sig.f_s, row.sig.y_m,  row.sig.f_hat_s,
        row.sig.y_t,  row.x_hat(0),    row.x_hat(1), row.x_hat(2), row.x_hat(3)};
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out += ',';
      append_number(out, fields[i]);
    }
    out += '\n';
  }
  return out;
}

void write_trace_csv(const Trace& trace, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw RuntimeFailure("cannot write trace to " + path.string());
  out << format_trace_csv(trace);
  if (!out) throw RuntimeFailure("failed writing trace to " + path.string());
}

Trace read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read trace " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kTraceCsvHeader) {
    throw ValidationError(path.string() + ": unexpected trace header");
  }
  Trace trace;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::array<double, 15> v{};
    const char* p = line.data();
    const char* end = line.data() + line.size();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const auto [next, ec] = std::from_chars(p, end, v[i]);
      const bool last = i + 1 == v.size();
      if (ec != std::errc() || (last ? next != end : *next != ',')) {
        throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                              ": malformed trace row");
      }
      p = next + 1;
    }
    TraceRow row;
    row.t = v[0];
    row.sig = {v[1], v[2], v[3], v[6], v[8], v[10], v[7], v[9]};
    row.m_dot_i = v[4];
    row.p = v[5];
    row.x_hat << v[11], v[12], v[13], v[14];
    trace.rows.push_back(row);
  }
  if (trace.rows.size() >= 2) trace.dt = trace.rows[1].t - trace.rows[0].t;
  return trace;
}

}  // namespace scrubber_ftc
