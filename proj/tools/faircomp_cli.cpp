/**
 * faircomp command-line front end.
 *
 *   faircomp solve    --config <path> --out <path> [--scheme proposed]
 *   faircomp sweep    --spec <path> --out <path> [--seed N] [--geometries G] [--jobs J]
 *   faircomp validate [--seed N] [--verbose]
 *
 * Results go to the --out file only; diagnostics go to stderr.
 * Exit codes: 0 success, 1 usage error, 2 infeasible/parse/io, 3 numerical.
 */

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "faircomp/faircomp.h"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

int exit_code(fc_status status)
{
    switch (status) {
    case FC_OK: return 0;
    case FC_ERR_NUMERICAL:
    case FC_ERR_INTERNAL: return kExitNumerical;
    default: return kExitInput;
    }
}

int report(fc_status status, const std::string& action)
{
    std::cerr << "faircomp: " << action << " failed (" << fc_status_name(status) << "): " << fc_last_error() << "\n";
    return exit_code(status);
}

struct SolveOptions {
    std::string config_path;
    std::string out_path;
    std::string scheme = "proposed";
    bool verbose = false;
};

struct SweepOptions {
    std::string spec_path;
    std::string out_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> geometries;
    unsigned jobs = 0;
    bool verbose = false;
};

struct ValidateOptions {
    std::uint64_t seed = 7;
    bool verbose = false;
};

int run_solve(const SolveOptions& opt)
{
    static const std::map<std::string, fc_scheme> schemes{{"proposed", FC_SCHEME_PROPOSED},
                                                          {"ignore_csi", FC_SCHEME_IGNORE_CSI},
                                                          {"fixed_position", FC_SCHEME_FIXED_POSITION}};

    fc_config* config = nullptr;
    if (fc_status s = fc_config_load(opt.config_path.c_str(), &config); s != FC_OK) return report(s, "loading config");

    fc_settings settings;
    if (fc_status s = fc_settings_load(opt.config_path.c_str(), &settings); s != FC_OK) {
        fc_config_free(config);
        return report(s, "reading settings");
    }

    fc_solve_result* result = nullptr;
    fc_status s = fc_solve_scheme(config, &settings, schemes.at(opt.scheme), &result);
    fc_config_free(config);
    if (s != FC_OK) return report(s, "solve");

    s = fc_solve_result_write(result, opt.out_path.c_str());
    if (s == FC_OK && opt.verbose) {
        fc_mse mse{};
        size_t iterations = 0;
        int converged = 0;
        fc_solve_result_mse(result, &mse);
        fc_solve_result_iterations(result, &iterations, &converged);
        std::fprintf(stderr, "mse total %.6g (misalignment %.6g, csi %.6g, noise %.6g), %zu iterations, %s\n", mse.total,
                     mse.misalignment, mse.csi_error, mse.noise, iterations, converged ? "converged" : "not converged");
    }
    fc_solve_result_free(result);
    if (s != FC_OK) return report(s, "writing result");
    return 0;
}

int run_sweep(const SweepOptions& opt)
{
    fc_sweep_spec* spec = nullptr;
    if (fc_status s = fc_sweep_spec_load(opt.spec_path.c_str(), &spec); s != FC_OK) return report(s, "loading sweep spec");

    fc_status s = FC_OK;
    if (opt.seed) s = fc_sweep_spec_set_seed(spec, *opt.seed);
    if (s == FC_OK && opt.geometries) s = fc_sweep_spec_set_geometries(spec, *opt.geometries);
    fc_settings settings;
    if (s == FC_OK) s = fc_settings_load(opt.spec_path.c_str(), &settings);
    if (s != FC_OK) {
        fc_sweep_spec_free(spec);
        return report(s, "configuring sweep");
    }

    fc_sweep_results* results = nullptr;
    s = fc_sweep_run(spec, &settings, opt.jobs, &results);
    fc_sweep_spec_free(spec);
    if (s != FC_OK) return report(s, "sweep");

    s = fc_sweep_results_write_csv(results, opt.out_path.c_str());
    if (s == FC_OK && opt.verbose) {
        size_t rows = 0;
        fc_sweep_results_count(results, &rows);
        std::fprintf(stderr, "wrote %zu rows to %s\n", rows, opt.out_path.c_str());
    }
    fc_sweep_results_free(results);
    if (s != FC_OK) return report(s, "writing CSV");
    return 0;
}

void print_check(const fc_check* check, void* user_data)
{
    const bool verbose = *static_cast<const bool*>(user_data);
    if (verbose || !check->passed) {
        std::fprintf(stderr, "[%s] %s: %s\n", check->passed ? "PASS" : "FAIL", check->name, check->detail);
    } else {
        std::fprintf(stderr, "[PASS] %s\n", check->name);
    }
}

int run_validate(const ValidateOptions& opt)
{
    int failed = 0;
    bool verbose = opt.verbose;
    if (fc_status s = fc_validate(opt.seed, print_check, &verbose, &failed); s != FC_OK) return report(s, "validate");
    if (failed > 0) {
        std::fprintf(stderr, "%d check(s) failed\n", failed);
        return kExitNumerical;
    }
    std::fprintf(stderr, "all checks passed\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Robust AirComp transceiver and fluid-antenna placement optimiser"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(fc_version()));

    SolveOptions solve;
    auto* solve_cmd = app.add_subcommand("solve", "Optimise one scenario and write the solution as JSON");
    solve_cmd->add_option("--config", solve.config_path, "Scenario config JSON")->required();
    solve_cmd->add_option("--out", solve.out_path, "Output JSON path")->required();
    solve_cmd->add_option("--scheme", solve.scheme, "proposed | ignore_csi | fixed_position")
        ->capture_default_str()
        ->check(CLI::IsMember({"proposed", "ignore_csi", "fixed_position"}));
    solve_cmd->add_flag("--verbose", solve.verbose, "Print a summary to stderr");

    SweepOptions sweep;
    std::uint64_t sweep_seed = 0;
    int sweep_geometries = 0;
    auto* sweep_cmd = app.add_subcommand("sweep", "Run a parameter sweep and write the results as CSV");
    sweep_cmd->add_option("--spec", sweep.spec_path, "Sweep spec JSON")->required();
    sweep_cmd->add_option("--out", sweep.out_path, "Output CSV path")->required();
    auto* seed_opt = sweep_cmd->add_option("--seed", sweep_seed, "Override the spec's rng_seed");
    auto* geom_opt = sweep_cmd->add_option("--geometries", sweep_geometries, "Override num_geometries")
                         ->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--jobs", sweep.jobs, "Worker threads (default: available parallelism)")
        ->default_val(std::thread::hardware_concurrency());
    sweep_cmd->add_flag("--verbose", sweep.verbose, "Print a summary to stderr");

    ValidateOptions validate;
    auto* validate_cmd = app.add_subcommand("validate", "Run the oracle suite and report pass/fail per check");
    validate_cmd->add_option("--seed", validate.seed, "Seed for the random instances")->capture_default_str();
    validate_cmd->add_flag("--verbose", validate.verbose, "Print details for passing checks too");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, std::cerr, std::cerr);
        return code == 0 ? 0 : kExitUsage;
    }

    if (*solve_cmd) return run_solve(solve);
    if (*sweep_cmd) {
        if (*seed_opt) sweep.seed = sweep_seed;
        if (*geom_opt) sweep.geometries = sweep_geometries;
        return run_sweep(sweep);
    }
    if (*validate_cmd) return run_validate(validate);
    return kExitUsage;
}
