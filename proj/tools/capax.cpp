#include <CLI11.hpp>

#include <iostream>

#include "capax/app.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Capacity and capacity-achieving inputs of channels with receiver side information"};
    app.require_subcommand(1);

    capax::SolveCommand solve;
    auto* solve_cmd = app.add_subcommand("solve", "Solve a configured problem and write a JSON report");
    solve_cmd->add_option("config", solve.config_path, "JSON config")->required();
    solve_cmd->add_option("--out", solve.out_path, "Report path (default: output.report, else stdout)");
    solve_cmd->add_option("--seed", solve.seed, "Override solver.seed");

    capax::VerifyCommand verify;
    auto* verify_cmd = app.add_subcommand("verify", "Check the KKT conditions of a stored solution");
    verify_cmd->add_option("config", verify.config_path, "JSON config")->required();
    verify_cmd->add_option("solution", verify.solution_path, "Report or solution JSON")->required();

    capax::SweepCommand sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "Solve once per parameter value and write a CSV");
    sweep_cmd->add_option("config", sweep.config_path, "JSON config")->required();
    sweep_cmd->add_option("--param", sweep.parameter, "Dotted config path, e.g. channel.noise_std")->required();
    sweep_cmd->add_option("--values", sweep.values, "Comma-separated values")->required()->delimiter(',');
    sweep_cmd->add_option("--out", sweep.out_path, "CSV path (default: output.csv, else stdout)");

    auto* selftest_cmd = app.add_subcommand("selftest", "Run the built-in consistency suites");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : capax::kExitConfigError;
    }

    if (*solve_cmd) return capax::run_solve(solve, std::cout, std::cerr);
    if (*verify_cmd) return capax::run_verify(verify, std::cout, std::cerr);
    if (*sweep_cmd) return capax::run_sweep(sweep, std::cout, std::cerr);
    if (*selftest_cmd) return capax::run_selftest_command({}, std::cout);
    return capax::kExitConfigError;
}
