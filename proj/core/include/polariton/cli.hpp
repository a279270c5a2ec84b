#pragma once

namespace polariton {

/// Entry point behind the polariton-echo binary. Exit codes: 0 success,
/// 2 config/usage error, 3 I/O failure.
int cli_main(int argc, const char* const* argv);

}  // namespace polariton
