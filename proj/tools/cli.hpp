#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rtm {

/// Subcommands: migrate, roundtrip, test, bench, parse. `args` excludes the
/// program name. Returns 0 on success, 1 on a failed test/round trip,
/// 2 on usage, parse or validation errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rtm
