#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

namespace cli {

/// Exit codes: 0 positive verdict, 1 negative verdict, 2 invalid input.
enum ExitCode : int { kPositive = 0, kNegative = 1, kInvalid = 2 };

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct RunConfig {
    std::string command;
    std::optional<int> g;
    std::string field;  // "Q" or an odd prime; empty means Q
    std::optional<std::string> lambda;
    std::optional<std::string> lambda_extra;
    std::optional<int> dim;
    std::string format = "text";
    unsigned workers = 1;
    bool deterministic = false;
    std::string out;
    std::string bundle_file;
    std::string counts_file;
    bool twice = false;
};

struct Outcome {
    int exit_code = kPositive;
    std::string output;
};

Outcome cmd_pencil(const RunConfig& config);
Outcome cmd_subspaces(const RunConfig& config);
Outcome cmd_stability(const RunConfig& config);
Outcome cmd_transform(const RunConfig& config);
Outcome cmd_census(const RunConfig& config);
Outcome cmd_verlinde(const RunConfig& config);
Outcome cmd_betti(const RunConfig& config);
Outcome cmd_search(const RunConfig& config);

/// Dispatches on config.command. Library errors on bad input become UsageError.
Outcome dispatch(const RunConfig& config);

/// Full entry point: parses flags (and --config file), runs, writes the report to
/// --out or `out`, diagnostics to `err`. Returns the exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cli
