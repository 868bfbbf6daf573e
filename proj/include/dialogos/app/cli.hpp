#pragma once

#include <iosfwd>

namespace dialogos::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;   // bad usage or configuration
inline constexpr int kExitRuntime = 2;  // failure while running

// Sub-commands: run, serve, domain, parse; each takes --config PATH, plus
// --seed N and --lax. `in` feeds text mode, reports go to `out`,
// diagnostics to `err`.
int cli_main(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

// Asks a running `serve` to shut down; safe to call from a signal handler.
void request_shutdown() noexcept;

// Port of the most recent `serve` once it listens, 0 before.
int serving_port() noexcept;

}  // namespace dialogos::app
