#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "scrubber_ftc/simulate.hpp"

namespace scrubber_ftc {

inline constexpr std::string_view kTraceCsvHeader =
    "t,r,e,u,m_dot_i,p,y,f_s,y_m,f_hat_s,y_t,xhat_p,xhat_m,xi1_hat,xi2_hat";

/// Header plus one row per sample, 12 significant digits, '\n' line ends.
std::string format_trace_csv(const Trace& trace);

void write_trace_csv(const Trace& trace, const std::filesystem::path& path);

/// Inverse of write_trace_csv for the logged columns. Metadata and the true
/// filter states are not part of the file and come back empty.
Trace read_trace_csv(const std::filesystem::path& path);

}  // namespace scrubber_ftc
