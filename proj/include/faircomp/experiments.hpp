#pragma once

#include <cstdint>
#include <filesystem>
#include <numbers>
#include <optional>
#include <string_view>
#include <vector>

#include "faircomp/solvers.hpp"

namespace faircomp {

enum class Scheme {
    Proposed,       // robust BCD over (m, b, x)
    IgnoreCsi,      // BCD with all uncertainty widths set to zero
    FixedPosition,  // (m, b) alternation with uniformly spaced antennas
};

std::string_view to_string(Scheme scheme);
std::optional<Scheme> scheme_from_string(std::string_view name);

struct SchemeOutcome {
    Solution solution;
    double mse = 0.0;  // analytic MSE under the true uncertainty widths
    BcdTrace trace;
};

/// Runs one scheme on one scenario. The returned MSE is always evaluated
/// with the config's own uncertainty widths.
SchemeOutcome run_scheme(Scheme scheme, const SystemConfig& config, const BcdSettings& settings);

/// Everything about a scenario except the user geometry and the swept values.
struct ScenarioTemplate {
    std::size_t num_users = 10;
    std::size_t num_antennas = 8;
    double aperture_length = 8.0;
    double min_spacing = 0.5;
    double wavelength = 1.0;
    double path_loss_exponent = 2.0;
    double noise_power = 1.0;
    double min_distance = 10.0;
    double max_distance = 50.0;
    double min_angle = std::numbers::pi / 12.0;
    double max_angle = 11.0 * std::numbers::pi / 12.0;

    void validate() const;
};

struct UserGeometry {
    std::vector<double> distances;
    std::vector<double> angles;
};

/// Angles ~ Uniform(min_angle, max_angle) and distances ~ Uniform(min_distance,
/// max_distance) from mt19937_64(seed): all angles first, then all distances.
UserGeometry draw_geometry(const ScenarioTemplate& base, std::uint64_t seed);

/// Seed of geometry realisation `index` of a sweep. Shared by every grid
/// point and scheme so that comparisons are paired.
std::uint64_t geometry_seed(std::uint64_t sweep_seed, std::uint64_t index);

/// P_k = noise_power * 10^(snr_db / 10) for every user, theta0_k = theta0.
SystemConfig make_scenario(const ScenarioTemplate& base, const UserGeometry& geometry, double theta0, double snr_db,
                           std::size_t num_antennas, double aperture_length);

struct SweepSpec {
    ScenarioTemplate base;
    std::vector<double> theta0_grid{0.0};
    std::vector<double> snr_db_grid{10.0};
    std::vector<std::size_t> antenna_counts;  // empty: base.num_antennas
    std::vector<double> aperture_lengths;     // empty: base.aperture_length
    int num_geometries = 50;
    std::uint64_t rng_seed = 1;
    std::vector<Scheme> schemes{Scheme::Proposed, Scheme::IgnoreCsi, Scheme::FixedPosition};

    void validate() const;
    std::vector<std::size_t> effective_antenna_counts() const;
    std::vector<double> effective_aperture_lengths() const;
};

struct SweepResult {
    Scheme scheme = Scheme::Proposed;
    double theta0 = 0.0;
    double snr_db = 0.0;
    std::size_t num_antennas = 0;
    std::size_t num_users = 0;
    double aperture_length = 0.0;
    double mse_mean = 0.0;
    double mse_std = 0.0;  // sample standard deviation across geometries
    int num_geometries = 0;
    std::uint64_t rng_seed = 0;

    bool operator==(const SweepResult&) const = default;
};

/// Ordering used for output: scheme, then snr_db, N, L, theta0.
bool result_order(const SweepResult& a, const SweepResult& b);

/// Runs every (grid point, scheme, geometry) combination on a pool of
/// `workers` threads (0 means hardware concurrency). The output is sorted
/// by result_order and does not depend on the worker count.
std::vector<SweepResult> run_sweep(const SweepSpec& spec, const BcdSettings& settings, unsigned workers = 0);

inline constexpr std::string_view kResultsCsvHeader =
    "scheme,theta0,snr_db,N,K,L,mse_mean,mse_std,num_geometries,rng_seed";

std::string results_to_csv(std::vector<SweepResult> results);
std::vector<SweepResult> results_from_csv(std::string_view text);

void write_results(const std::vector<SweepResult>& results, const std::filesystem::path& path);
std::vector<SweepResult> read_results(const std::filesystem::path& path);

}  // namespace faircomp
