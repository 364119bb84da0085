#pragma once

#include <iosfwd>

namespace spectral_games::cli {

/// Entry point of the spectral-games command. Returns 0 on success, 1 on a
/// usage error and 2 when a numeric precondition fails.
int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace spectral_games::cli
