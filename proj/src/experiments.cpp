#include "faircomp/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>

#include "faircomp/error.hpp"

namespace faircomp {

std::string_view to_string(Scheme scheme)
{
    switch (scheme) {
    case Scheme::Proposed: return "proposed";
    case Scheme::IgnoreCsi: return "ignore_csi";
    case Scheme::FixedPosition: return "fixed_position";
    }
    return "unknown";
}

std::optional<Scheme> scheme_from_string(std::string_view name)
{
    for (Scheme s : {Scheme::Proposed, Scheme::IgnoreCsi, Scheme::FixedPosition}) {
        if (to_string(s) == name) return s;
    }
    return std::nullopt;
}

namespace {

double true_mse(const SystemConfig& config, const Solution& solution)
{
    return mse_analytic(config, build_channels(config, solution.positions), solution).total;
}

SystemConfig without_uncertainty(SystemConfig config)
{
    std::fill(config.uncertainty_widths.begin(), config.uncertainty_widths.end(), 0.0);
    return config;
}

}  // namespace

SchemeOutcome run_scheme(Scheme scheme, const SystemConfig& config, const BcdSettings& settings)
{
    BcdResult result = [&] {
        switch (scheme) {
        case Scheme::Proposed: return bcd_solve(config, settings);
        case Scheme::IgnoreCsi: return bcd_solve(without_uncertainty(config), settings);
        case Scheme::FixedPosition:
            return bcd_solve_fixed_positions(config, settings, initial_positions(config));
        }
        fail(ErrorKind::InvalidArgument, "unknown scheme");
    }();
    const double mse = true_mse(config, result.solution);
    return SchemeOutcome{std::move(result.solution), mse, std::move(result.trace)};
}

void ScenarioTemplate::validate() const
{
    require(num_users >= 1, ErrorKind::InvalidArgument, "num_users must be >= 1");
    require(num_antennas >= 1, ErrorKind::InvalidArgument, "num_antennas must be >= 1");
    require(min_distance > 0.0 && max_distance >= min_distance, ErrorKind::InvalidArgument,
            "distance range must satisfy 0 < min_distance <= max_distance");
    require(min_angle > 0.0 && max_angle < std::numbers::pi && min_angle <= max_angle, ErrorKind::InvalidArgument,
            "angle range must satisfy 0 < min_angle <= max_angle < pi");
    require(noise_power > 0.0, ErrorKind::InvalidArgument, "noise_power must be positive");
}

UserGeometry draw_geometry(const ScenarioTemplate& base, std::uint64_t seed)
{
    Rng rng(seed);
    std::uniform_real_distribution<double> angle(base.min_angle, base.max_angle);
    std::uniform_real_distribution<double> distance(base.min_distance, base.max_distance);
    UserGeometry geometry;
    geometry.angles.reserve(base.num_users);
    geometry.distances.reserve(base.num_users);
    for (std::size_t k = 0; k < base.num_users; ++k) geometry.angles.push_back(angle(rng));
    for (std::size_t k = 0; k < base.num_users; ++k) geometry.distances.push_back(distance(rng));
    return geometry;
}

std::uint64_t geometry_seed(std::uint64_t sweep_seed, std::uint64_t index)
{
    return mix_seed(sweep_seed, index, 0x67656f6dULL);  // "geom"
}

SystemConfig make_scenario(const ScenarioTemplate& base, const UserGeometry& geometry, double theta0, double snr_db,
                           std::size_t num_antennas, double aperture_length)
{
    const double power = base.noise_power * std::pow(10.0, snr_db / 10.0);
    return make_uniform_config(base.num_users, num_antennas, aperture_length, base.min_spacing, base.noise_power, power,
                               theta0, geometry.distances, geometry.angles, base.path_loss_exponent,
                               base.wavelength);
}

void SweepSpec::validate() const
{
    base.validate();
    auto check_grid = [](const auto& grid, const char* name) {
        require(!grid.empty(), ErrorKind::InvalidArgument, std::string(name) + " must not be empty");
        require(std::adjacent_find(grid.begin(), grid.end(), [](auto a, auto b) { return !(a < b); }) == grid.end(),
                ErrorKind::InvalidArgument, std::string(name) + " must be sorted in strictly ascending order");
    };
    check_grid(theta0_grid, "theta0_grid");
    check_grid(snr_db_grid, "snr_db_grid");
    check_grid(effective_antenna_counts(), "num_antennas");
    check_grid(effective_aperture_lengths(), "aperture_length");
    require(num_geometries >= 1, ErrorKind::InvalidArgument, "num_geometries must be >= 1");
    require(!schemes.empty(), ErrorKind::InvalidArgument, "schemes must not be empty");
    for (std::size_t i = 0; i < schemes.size(); ++i) {
        for (std::size_t j = i + 1; j < schemes.size(); ++j) {
            require(schemes[i] != schemes[j], ErrorKind::InvalidArgument, "schemes must not repeat");
        }
    }
    for (double theta0 : theta0_grid) {
        require(theta0 >= 0.0 && theta0 <= std::numbers::pi / 2, ErrorKind::InvalidArgument,
                "theta0_grid values must lie in [0, pi/2]");
    }
}

std::vector<std::size_t> SweepSpec::effective_antenna_counts() const
{
    return antenna_counts.empty() ? std::vector<std::size_t>{base.num_antennas} : antenna_counts;
}

std::vector<double> SweepSpec::effective_aperture_lengths() const
{
    return aperture_lengths.empty() ? std::vector<double>{base.aperture_length} : aperture_lengths;
}

bool result_order(const SweepResult& a, const SweepResult& b)
{
    return std::tuple(static_cast<int>(a.scheme), a.snr_db, a.num_antennas, a.aperture_length, a.theta0) <
           std::tuple(static_cast<int>(b.scheme), b.snr_db, b.num_antennas, b.aperture_length, b.theta0);
}

namespace {

struct ArrayPoint {
    double snr_db;
    std::size_t num_antennas;
    double aperture_length;
};

// One unit of work. IgnoreCsi solves do not depend on theta0, so a single
// unit covers the whole theta0 grid for that scheme.
struct Task {
    Scheme scheme;
    std::size_t array_index;
    std::size_t theta_index;  // unused for IgnoreCsi
    int geometry;
};

std::string describe(const SweepSpec& spec, const ArrayPoint& point, const Task& task)
{
    std::ostringstream out;
    out << "sweep point (scheme=" << to_string(task.scheme) << ", snr_db=" << point.snr_db
        << ", N=" << point.num_antennas << ", L=" << point.aperture_length;
    if (task.scheme != Scheme::IgnoreCsi) out << ", theta0=" << spec.theta0_grid[task.theta_index];
    out << ", geometry=" << task.geometry << ")";
    return out.str();
}

}  // namespace

std::vector<SweepResult> run_sweep(const SweepSpec& spec, const BcdSettings& settings, unsigned workers)
{
    spec.validate();
    settings.validate();

    std::vector<ArrayPoint> points;
    for (double snr : spec.snr_db_grid) {
        for (std::size_t n : spec.effective_antenna_counts()) {
            for (double l : spec.effective_aperture_lengths()) points.push_back({snr, n, l});
        }
    }

    const std::size_t num_theta = spec.theta0_grid.size();
    const auto num_geom = static_cast<std::size_t>(spec.num_geometries);
    std::vector<UserGeometry> geometries;
    for (std::size_t g = 0; g < num_geom; ++g) geometries.push_back(draw_geometry(spec.base, geometry_seed(spec.rng_seed, g)));

    std::vector<Task> tasks;
    for (Scheme scheme : spec.schemes) {
        for (std::size_t p = 0; p < points.size(); ++p) {
            const std::size_t thetas = scheme == Scheme::IgnoreCsi ? 1 : num_theta;
            for (std::size_t t = 0; t < thetas; ++t) {
                for (std::size_t g = 0; g < num_geom; ++g) tasks.push_back({scheme, p, t, static_cast<int>(g)});
            }
        }
    }

    // mse[scheme slot][point][theta][geometry]
    const std::size_t per_scheme = points.size() * num_theta * num_geom;
    std::vector<double> mse(spec.schemes.size() * per_scheme, 0.0);
    auto slot = [&](Scheme s) {
        return static_cast<std::size_t>(std::find(spec.schemes.begin(), spec.schemes.end(), s) - spec.schemes.begin());
    };
    auto cell = [&](Scheme s, std::size_t p, std::size_t t, std::size_t g) -> double& {
        return mse[slot(s) * per_scheme + (p * num_theta + t) * num_geom + g];
    };

    std::atomic<std::size_t> next{0};
    std::atomic<bool> aborted{false};
    std::mutex failure_mutex;
    std::exception_ptr failure;
    std::size_t failed_task = tasks.size();

    auto run_task = [&](std::size_t index) {
        const Task& task = tasks[index];
        const ArrayPoint& point = points[task.array_index];
        const UserGeometry& geometry = geometries[static_cast<std::size_t>(task.geometry)];
        const auto g = static_cast<std::size_t>(task.geometry);
        if (task.scheme == Scheme::IgnoreCsi) {
            const SystemConfig nominal =
                make_scenario(spec.base, geometry, 0.0, point.snr_db, point.num_antennas, point.aperture_length);
            const SchemeOutcome outcome = run_scheme(Scheme::IgnoreCsi, nominal, settings);
            for (std::size_t t = 0; t < num_theta; ++t) {
                const SystemConfig actual = make_scenario(spec.base, geometry, spec.theta0_grid[t], point.snr_db,
                                                          point.num_antennas, point.aperture_length);
                cell(task.scheme, task.array_index, t, g) = true_mse(actual, outcome.solution);
            }
        } else {
            const SystemConfig config = make_scenario(spec.base, geometry, spec.theta0_grid[task.theta_index],
                                                      point.snr_db, point.num_antennas, point.aperture_length);
            cell(task.scheme, task.array_index, task.theta_index, g) = run_scheme(task.scheme, config, settings).mse;
        }
    };

    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size() && !aborted; i = next++) {
            try {
                run_task(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (i < failed_task) {
                    failed_task = i;
                    failure = std::current_exception();
                }
                aborted = true;
            }
        }
    };

    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(tasks.size(), 1)));
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    }

    if (failure) {
        const std::string context = describe(spec, points[tasks[failed_task].array_index], tasks[failed_task]);
        try {
            std::rethrow_exception(failure);
        } catch (const Error& e) {
            throw Error(e.kind(), context + ": " + e.what());
        } catch (const std::exception& e) {
            throw Error(ErrorKind::Numerical, context + ": " + e.what());
        }
    }

    std::vector<SweepResult> results;
    for (Scheme scheme : spec.schemes) {
        for (std::size_t p = 0; p < points.size(); ++p) {
            for (std::size_t t = 0; t < num_theta; ++t) {
                double sum = 0.0;
                for (std::size_t g = 0; g < num_geom; ++g) sum += cell(scheme, p, t, g);
                const double mean = sum / static_cast<double>(num_geom);
                double squares = 0.0;
                for (std::size_t g = 0; g < num_geom; ++g) squares += std::pow(cell(scheme, p, t, g) - mean, 2);
                const double std_dev = num_geom > 1 ? std::sqrt(squares / static_cast<double>(num_geom - 1)) : 0.0;

                SweepResult r;
                r.scheme = scheme;
                r.theta0 = spec.theta0_grid[t];
                r.snr_db = points[p].snr_db;
                r.num_antennas = points[p].num_antennas;
                r.num_users = spec.base.num_users;
                r.aperture_length = points[p].aperture_length;
                r.mse_mean = mean;
                r.mse_std = std_dev;
                r.num_geometries = spec.num_geometries;
                r.rng_seed = spec.rng_seed;
                results.push_back(r);
            }
        }
    }
    std::sort(results.begin(), results.end(), result_order);
    return results;
}

// ---- CSV ------------------------------------------------------------------

namespace {

void append_double(std::string& out, double value)
{
    char buffer[64];
    const auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
    if (ec != std::errc{}) fail(ErrorKind::Numerical, "cannot format floating value");
    out.append(buffer, end);
}

template <class T>
T parse_field(std::string_view field, std::size_t line, const char* column)
{
    T value{};
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
        fail(ErrorKind::Parse, "CSV line " + std::to_string(line) + ": cannot parse column '" + column + "' from '" +
                                   std::string(field) + "'");
    }
    return value;
}

std::vector<std::string_view> split(std::string_view line, char sep)
{
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        fields.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return fields;
}

}  // namespace

std::string results_to_csv(std::vector<SweepResult> results)
{
    std::stable_sort(results.begin(), results.end(), result_order);
    std::string out(kResultsCsvHeader);
    out += '\n';
    for (const SweepResult& r : results) {
        out += to_string(r.scheme);
        out += ',';
        append_double(out, r.theta0);
        out += ',';
        append_double(out, r.snr_db);
        out += ',' + std::to_string(r.num_antennas) + ',' + std::to_string(r.num_users) + ',';
        append_double(out, r.aperture_length);
        out += ',';
        append_double(out, r.mse_mean);
        out += ',';
        append_double(out, r.mse_std);
        out += ',' + std::to_string(r.num_geometries) + ',' + std::to_string(r.rng_seed) + '\n';
    }
    return out;
}

std::vector<SweepResult> results_from_csv(std::string_view text)
{
    std::vector<SweepResult> results;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (!text.empty()) {
        const std::size_t eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        if (!header_seen) {
            require(line == kResultsCsvHeader, ErrorKind::Parse,
                    "CSV header mismatch: expected '" + std::string(kResultsCsvHeader) + "'");
            header_seen = true;
            continue;
        }
        const auto fields = split(line, ',');
        require(fields.size() == 10, ErrorKind::Parse,
                "CSV line " + std::to_string(line_no) + ": expected 10 columns, got " + std::to_string(fields.size()));
        SweepResult r;
        const auto scheme = scheme_from_string(fields[0]);
        require(scheme.has_value(), ErrorKind::Parse,
                "CSV line " + std::to_string(line_no) + ": unknown scheme '" + std::string(fields[0]) + "'");
        r.scheme = *scheme;
        r.theta0 = parse_field<double>(fields[1], line_no, "theta0");
        r.snr_db = parse_field<double>(fields[2], line_no, "snr_db");
        r.num_antennas = parse_field<std::size_t>(fields[3], line_no, "N");
        r.num_users = parse_field<std::size_t>(fields[4], line_no, "K");
        r.aperture_length = parse_field<double>(fields[5], line_no, "L");
        r.mse_mean = parse_field<double>(fields[6], line_no, "mse_mean");
        r.mse_std = parse_field<double>(fields[7], line_no, "mse_std");
        r.num_geometries = parse_field<int>(fields[8], line_no, "num_geometries");
        r.rng_seed = parse_field<std::uint64_t>(fields[9], line_no, "rng_seed");
        results.push_back(r);
    }
    require(header_seen, ErrorKind::Parse, "CSV is empty (missing header)");
    return results;
}

void write_results(const std::vector<SweepResult>& results, const std::filesystem::path& path)
{
    const std::string text = results_to_csv(results);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.close();
    require(static_cast<bool>(out), ErrorKind::Io, "failed writing '" + path.string() + "'");
}

std::vector<SweepResult> read_results(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), ErrorKind::Io, "cannot open '" + path.string() + "' for reading");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return results_from_csv(buffer.str());
}

}  // namespace faircomp
