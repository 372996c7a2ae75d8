#pragma once

namespace qpp {

// Exit codes: 0 success, 2 bad usage, 3 resource budget refused/exhausted,
// 4 internal failure.
int run_cli(int argc, const char* const* argv);

}  // namespace qpp
