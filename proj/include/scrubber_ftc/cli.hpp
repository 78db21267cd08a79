#pragma once

#include <iosfwd>

namespace scrubber_ftc {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

/// Entry point of the `scrubber_ftc` command:
///   run <scenario|preset> [--out DIR] [--kv]
///   presets [--write DIR]
///   design [--model matrices|physical]
///   open-loop
int cli_main(int argc, const char* const* argv, std::ostream& out,
             std::ostream& err);

}  // namespace scrubber_ftc
