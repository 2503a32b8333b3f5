#include "faircomp/faircomp.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "faircomp/error.hpp"
#include "faircomp/experiments.hpp"
#include "faircomp/serialization.hpp"
#include "faircomp/validation.hpp"

struct fc_config {
    faircomp::SystemConfig config;
};

struct fc_solve_result {
    faircomp::SystemConfig config;
    faircomp::BcdResult result;
    faircomp::MseBreakdown mse;
};

struct fc_sweep_spec {
    faircomp::SweepSpec spec;
};

struct fc_sweep_results {
    std::vector<faircomp::SweepResult> rows;
};

namespace {

thread_local std::string last_error;

fc_status status_of(faircomp::ErrorKind kind)
{
    using faircomp::ErrorKind;
    switch (kind) {
    case ErrorKind::InvalidArgument: return FC_ERR_INVALID_ARGUMENT;
    case ErrorKind::Parse: return FC_ERR_PARSE;
    case ErrorKind::Infeasible: return FC_ERR_INFEASIBLE;
    case ErrorKind::Numerical: return FC_ERR_NUMERICAL;
    case ErrorKind::Io: return FC_ERR_IO;
    }
    return FC_ERR_INTERNAL;
}

fc_status set_error(fc_status status, std::string message)
{
    last_error = std::move(message);
    return status;
}

// Runs `body`, translating exceptions into status codes.
template <class F>
fc_status guarded(F&& body)
{
    try {
        body();
        return FC_OK;
    } catch (const faircomp::Error& e) {
        return set_error(status_of(e.kind()), e.what());
    } catch (const std::bad_alloc&) {
        return set_error(FC_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return set_error(FC_ERR_INTERNAL, e.what());
    } catch (...) {
        return set_error(FC_ERR_INTERNAL, "unknown error");
    }
}

fc_status null_argument(const char* name) { return set_error(FC_ERR_INVALID_ARGUMENT, std::string(name) + " is null"); }

faircomp::BcdSettings to_settings(const fc_settings* s)
{
    faircomp::BcdSettings out;
    if (s == nullptr) return out;
    out.outer_tolerance = s->outer_tolerance;
    out.max_outer_iters = s->max_outer_iters;
    out.barrier_mu_init = s->barrier_mu_init;
    out.barrier_mu_shrink = s->barrier_mu_shrink;
    out.barrier_mu_floor = s->barrier_mu_floor;
    out.grad_tolerance = s->grad_tolerance;
    out.step_tolerance = s->step_tolerance;
    out.max_bfgs_iters = s->max_bfgs_iters;
    out.validate();
    return out;
}

void from_settings(const faircomp::BcdSettings& s, fc_settings* out)
{
    out->outer_tolerance = s.outer_tolerance;
    out->max_outer_iters = s.max_outer_iters;
    out->barrier_mu_init = s.barrier_mu_init;
    out->barrier_mu_shrink = s.barrier_mu_shrink;
    out->barrier_mu_floor = s.barrier_mu_floor;
    out->grad_tolerance = s.grad_tolerance;
    out->step_tolerance = s.step_tolerance;
    out->max_bfgs_iters = s.max_bfgs_iters;
}

fc_scheme to_c(faircomp::Scheme s)
{
    switch (s) {
    case faircomp::Scheme::Proposed: return FC_SCHEME_PROPOSED;
    case faircomp::Scheme::IgnoreCsi: return FC_SCHEME_IGNORE_CSI;
    case faircomp::Scheme::FixedPosition: return FC_SCHEME_FIXED_POSITION;
    }
    return FC_SCHEME_PROPOSED;
}

char* duplicate(const std::string& text)
{
    char* out = static_cast<char*>(std::malloc(text.size() + 1));
    if (out == nullptr) throw std::bad_alloc();
    std::memcpy(out, text.c_str(), text.size() + 1);
    return out;
}

}  // namespace

extern "C" {

const char* fc_version(void) { return "0.1.0"; }

const char* fc_last_error(void) { return last_error.c_str(); }

const char* fc_status_name(fc_status status)
{
    switch (status) {
    case FC_OK: return "ok";
    case FC_ERR_INVALID_ARGUMENT: return "invalid argument";
    case FC_ERR_PARSE: return "parse error";
    case FC_ERR_INFEASIBLE: return "infeasible";
    case FC_ERR_NUMERICAL: return "numerical failure";
    case FC_ERR_IO: return "i/o error";
    case FC_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

void fc_settings_default(fc_settings* out)
{
    if (out != nullptr) from_settings(faircomp::BcdSettings{}, out);
}

fc_status fc_config_parse(const char* json_text, fc_config** out)
{
    if (json_text == nullptr) return null_argument("json_text");
    if (out == nullptr) return null_argument("out");
    return guarded([&] { *out = new fc_config{faircomp::parse_system_config(json_text)}; });
}

fc_status fc_config_load(const char* path, fc_config** out)
{
    if (path == nullptr) return null_argument("path");
    if (out == nullptr) return null_argument("out");
    return guarded([&] {
        const std::string text = faircomp::read_text_file(path);
        try {
            *out = new fc_config{faircomp::parse_system_config(text)};
        } catch (const faircomp::Error& e) {
            throw faircomp::Error(e.kind(), std::string(path) + ": " + e.what());
        }
    });
}

void fc_config_free(fc_config* config) { delete config; }

fc_status fc_config_num_users(const fc_config* config, size_t* out)
{
    if (config == nullptr) return null_argument("config");
    if (out == nullptr) return null_argument("out");
    *out = config->config.num_users;
    return FC_OK;
}

fc_status fc_config_num_antennas(const fc_config* config, size_t* out)
{
    if (config == nullptr) return null_argument("config");
    if (out == nullptr) return null_argument("out");
    *out = config->config.num_antennas;
    return FC_OK;
}

fc_status fc_settings_load(const char* path, fc_settings* out)
{
    if (path == nullptr) return null_argument("path");
    if (out == nullptr) return null_argument("out");
    return guarded([&] { from_settings(faircomp::parse_settings(faircomp::read_text_file(path)), out); });
}

fc_status fc_solve_scheme(const fc_config* config, const fc_settings* settings, fc_scheme scheme,
                          fc_solve_result** out)
{
    if (config == nullptr) return null_argument("config");
    if (out == nullptr) return null_argument("out");
    return guarded([&] {
        const faircomp::BcdSettings s = to_settings(settings);
        faircomp::Scheme which = faircomp::Scheme::Proposed;
        switch (scheme) {
        case FC_SCHEME_PROPOSED: which = faircomp::Scheme::Proposed; break;
        case FC_SCHEME_IGNORE_CSI: which = faircomp::Scheme::IgnoreCsi; break;
        case FC_SCHEME_FIXED_POSITION: which = faircomp::Scheme::FixedPosition; break;
        default: faircomp::fail(faircomp::ErrorKind::InvalidArgument, "unknown scheme");
        }
        faircomp::SchemeOutcome outcome = faircomp::run_scheme(which, config->config, s);
        const faircomp::ChannelSet channels = faircomp::build_channels(config->config, outcome.solution.positions);
        const faircomp::MseBreakdown mse = faircomp::mse_analytic(config->config, channels, outcome.solution);
        *out = new fc_solve_result{config->config,
                                   faircomp::BcdResult{std::move(outcome.solution), std::move(outcome.trace)}, mse};
    });
}

fc_status fc_solve(const fc_config* config, const fc_settings* settings, fc_solve_result** out)
{
    return fc_solve_scheme(config, settings, FC_SCHEME_PROPOSED, out);
}

void fc_solve_result_free(fc_solve_result* result) { delete result; }

fc_status fc_solve_result_mse(const fc_solve_result* result, fc_mse* out)
{
    if (result == nullptr) return null_argument("result");
    if (out == nullptr) return null_argument("out");
    *out = fc_mse{result->mse.misalignment, result->mse.csi_error, result->mse.noise, result->mse.total};
    return FC_OK;
}

fc_status fc_solve_result_iterations(const fc_solve_result* result, size_t* iterations, int* converged)
{
    if (result == nullptr) return null_argument("result");
    if (iterations != nullptr) *iterations = result->result.trace.iterations.size();
    if (converged != nullptr) *converged = result->result.trace.converged ? 1 : 0;
    return FC_OK;
}

fc_status fc_solve_result_positions(const fc_solve_result* result, double* out, size_t capacity)
{
    if (result == nullptr) return null_argument("result");
    if (out == nullptr) return null_argument("out");
    const auto& x = result->result.solution.positions.values();
    if (capacity < static_cast<size_t>(x.size())) {
        return set_error(FC_ERR_INVALID_ARGUMENT, "output buffer holds " + std::to_string(capacity) +
                                                      " values, need " + std::to_string(x.size()));
    }
    for (Eigen::Index n = 0; n < x.size(); ++n) out[n] = x[n];
    return FC_OK;
}

fc_status fc_solve_result_json(const fc_solve_result* result, char** out_json)
{
    if (result == nullptr) return null_argument("result");
    if (out_json == nullptr) return null_argument("out_json");
    return guarded([&] { *out_json = duplicate(faircomp::solve_report_json(result->config, result->result, result->mse)); });
}

fc_status fc_solve_result_write(const fc_solve_result* result, const char* path)
{
    if (result == nullptr) return null_argument("result");
    if (path == nullptr) return null_argument("path");
    return guarded([&] {
        faircomp::write_text_file(path, faircomp::solve_report_json(result->config, result->result, result->mse) + "\n");
    });
}

fc_status fc_sweep_spec_parse(const char* json_text, fc_sweep_spec** out)
{
    if (json_text == nullptr) return null_argument("json_text");
    if (out == nullptr) return null_argument("out");
    return guarded([&] { *out = new fc_sweep_spec{faircomp::parse_sweep_spec(json_text)}; });
}

fc_status fc_sweep_spec_load(const char* path, fc_sweep_spec** out)
{
    if (path == nullptr) return null_argument("path");
    if (out == nullptr) return null_argument("out");
    return guarded([&] {
        const std::string text = faircomp::read_text_file(path);
        try {
            *out = new fc_sweep_spec{faircomp::parse_sweep_spec(text)};
        } catch (const faircomp::Error& e) {
            throw faircomp::Error(e.kind(), std::string(path) + ": " + e.what());
        }
    });
}

void fc_sweep_spec_free(fc_sweep_spec* spec) { delete spec; }

fc_status fc_sweep_spec_set_seed(fc_sweep_spec* spec, uint64_t seed)
{
    if (spec == nullptr) return null_argument("spec");
    spec->spec.rng_seed = seed;
    return FC_OK;
}

fc_status fc_sweep_spec_set_geometries(fc_sweep_spec* spec, int num_geometries)
{
    if (spec == nullptr) return null_argument("spec");
    if (num_geometries < 1) return set_error(FC_ERR_INVALID_ARGUMENT, "num_geometries must be >= 1");
    spec->spec.num_geometries = num_geometries;
    return FC_OK;
}

fc_status fc_sweep_run(const fc_sweep_spec* spec, const fc_settings* settings, unsigned workers,
                       fc_sweep_results** out)
{
    if (spec == nullptr) return null_argument("spec");
    if (out == nullptr) return null_argument("out");
    return guarded([&] { *out = new fc_sweep_results{faircomp::run_sweep(spec->spec, to_settings(settings), workers)}; });
}

void fc_sweep_results_free(fc_sweep_results* results) { delete results; }

fc_status fc_sweep_results_count(const fc_sweep_results* results, size_t* out)
{
    if (results == nullptr) return null_argument("results");
    if (out == nullptr) return null_argument("out");
    *out = results->rows.size();
    return FC_OK;
}

fc_status fc_sweep_results_row(const fc_sweep_results* results, size_t index, fc_sweep_row* out)
{
    if (results == nullptr) return null_argument("results");
    if (out == nullptr) return null_argument("out");
    if (index >= results->rows.size()) {
        return set_error(FC_ERR_INVALID_ARGUMENT, "row index " + std::to_string(index) + " out of range");
    }
    const faircomp::SweepResult& r = results->rows[index];
    *out = fc_sweep_row{to_c(r.scheme), r.theta0,   r.snr_db,  r.num_antennas,   r.num_users,
                        r.aperture_length, r.mse_mean, r.mse_std, r.num_geometries, r.rng_seed};
    return FC_OK;
}

fc_status fc_sweep_results_write_csv(const fc_sweep_results* results, const char* path)
{
    if (results == nullptr) return null_argument("results");
    if (path == nullptr) return null_argument("path");
    return guarded([&] { faircomp::write_results(results->rows, path); });
}

fc_status fc_validate(uint64_t seed, fc_check_callback callback, void* user_data, int* failed)
{
    return guarded([&] {
        int failures = 0;
        faircomp::run_validation(seed, [&](const faircomp::CheckResult& r) {
            if (!r.passed) ++failures;
            if (callback != nullptr) {
                const fc_check check{r.name.c_str(), r.passed ? 1 : 0, r.detail.c_str()};
                callback(&check, user_data);
            }
        });
        if (failed != nullptr) *failed = failures;
    });
}

void fc_string_free(char* text) { std::free(text); }

}  // extern "C"
