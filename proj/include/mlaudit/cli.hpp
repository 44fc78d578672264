#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mlaudit {

/// One CLI leaf command and the library checks it drives. Every check is
/// reachable from exactly one command; the table is the tested source of
/// truth for that property.
struct CommandInfo {
    std::string path; // e.g. "check splits"
    std::vector<std::string> checks;
};

const std::vector<CommandInfo>& command_table();

/// Runs one command line (without the program name). Reports go to `out`
/// (or the --out file), diagnostics to `err`. Returns the exit code:
/// 0 = PASS, 1 = WARN/FAIL findings, 2 = usage error, 3 = input/schema error.
int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace mlaudit
