#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "capax/selftest.hpp"

namespace capax {

enum ExitCode : int { kExitOk = 0, kExitConfigError = 1, kExitNotCertified = 2 };

struct SolveCommand {
    std::string config_path;
    std::optional<std::string> out_path;
    std::optional<std::uint64_t> seed;
};

struct VerifyCommand {
    std::string config_path;
    std::string solution_path;
};

struct SweepCommand {
    std::string config_path;
    std::string parameter;
    std::vector<std::string> values;
    std::optional<std::string> out_path;
};

/// Writes the report to out_path, else output.report, else `out`.
int run_solve(const SolveCommand& cmd, std::ostream& out, std::ostream& err);

/// Prints the KKT report as JSON on `out`; exit 0 iff certified.
int run_verify(const VerifyCommand& cmd, std::ostream& out, std::ostream& err);

/// Writes the CSV to out_path, else output.csv, else `out`.
int run_sweep(const SweepCommand& cmd, std::ostream& out, std::ostream& err);

/// Prints one line per suite on `out`; exit 0 iff every suite passes.
int run_selftest_command(const SelftestOptions& options, std::ostream& out);

}  // namespace capax
