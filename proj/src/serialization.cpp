#include "faircomp/serialization.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "faircomp/error.hpp"

namespace faircomp {

using nlohmann::json;

namespace {

json parse_document(std::string_view text, const char* what)
{
    try {
        json doc = json::parse(text.begin(), text.end());
        require(doc.is_object(), ErrorKind::Parse, std::string(what) + " must be a JSON object");
        return doc;
    } catch (const json::parse_error& e) {
        fail(ErrorKind::Parse, std::string("malformed ") + what + " JSON: " + e.what());
    }
}

const json& field(const json& doc, const char* name)
{
    const auto it = doc.find(name);
    require(it != doc.end(), ErrorKind::Parse, std::string("missing field '") + name + "'");
    return *it;
}

double get_number(const json& value, const char* name)
{
    require(value.is_number(), ErrorKind::Parse, std::string("field '") + name + "' must be a number");
    return value.get<double>();
}

double get_number(const json& doc, const char* name, double fallback)
{
    const auto it = doc.find(name);
    return it == doc.end() ? fallback : get_number(*it, name);
}

std::uint64_t get_unsigned(const json& value, const char* name)
{
    require(value.is_number_unsigned() || (value.is_number_integer() && value.get<long long>() >= 0), ErrorKind::Parse,
            std::string("field '") + name + "' must be a non-negative integer");
    return value.get<std::uint64_t>();
}

std::vector<double> get_number_array(const json& value, const char* name)
{
    require(value.is_array(), ErrorKind::Parse, std::string("field '") + name + "' must be an array of numbers");
    std::vector<double> out;
    for (const json& v : value) out.push_back(get_number(v, name));
    return out;
}

// A number or an array of numbers.
std::vector<double> get_number_or_array(const json& value, const char* name)
{
    if (value.is_array()) return get_number_array(value, name);
    return {get_number(value, name)};
}

json complex_array(const CVec& v)
{
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back({v[i].real(), v[i].imag()});
    return out;
}

json real_array(const RVec& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

json config_json(const SystemConfig& c)
{
    return json{{"num_users", c.num_users},
                {"num_antennas", c.num_antennas},
                {"aperture_length", c.aperture_length},
                {"min_spacing", c.min_spacing},
                {"wavelength", c.wavelength},
                {"path_loss_exponent", c.path_loss_exponent},
                {"noise_power", c.noise_power},
                {"power_caps", c.power_caps},
                {"uncertainty_widths", c.uncertainty_widths},
                {"user_distances", c.user_distances},
                {"nominal_angles", c.nominal_angles}};
}

json settings_json(const BcdSettings& s)
{
    return json{{"outer_tolerance", s.outer_tolerance},   {"max_outer_iters", s.max_outer_iters},
                {"barrier_mu_init", s.barrier_mu_init},   {"barrier_mu_shrink", s.barrier_mu_shrink},
                {"barrier_mu_floor", s.barrier_mu_floor}, {"grad_tolerance", s.grad_tolerance},
                {"step_tolerance", s.step_tolerance},     {"max_bfgs_iters", s.max_bfgs_iters}};
}

json trace_json(const BcdTrace& trace)
{
    json iterations = json::array();
    for (const BcdIteration& it : trace.iterations) {
        iterations.push_back({{"iteration", it.iteration},
                              {"objective", it.objective},
                              {"objective_after_beamformer", it.objective_after_beamformer},
                              {"objective_after_power", it.objective_after_power},
                              {"delta_beamformer", it.delta_beamformer},
                              {"delta_power", it.delta_power},
                              {"delta_positions", it.delta_positions}});
    }
    return json{{"initial_objective", trace.initial_objective},
                {"converged", trace.converged},
                {"iterations", std::move(iterations)}};
}

BcdSettings settings_from(const json& doc)
{
    BcdSettings s;
    const auto it = doc.find("settings");
    if (it == doc.end()) return s;
    const json& obj = *it;
    require(obj.is_object(), ErrorKind::Parse, "field 'settings' must be an object");
    s.outer_tolerance = get_number(obj, "outer_tolerance", s.outer_tolerance);
    s.barrier_mu_init = get_number(obj, "barrier_mu_init", s.barrier_mu_init);
    s.barrier_mu_shrink = get_number(obj, "barrier_mu_shrink", s.barrier_mu_shrink);
    s.barrier_mu_floor = get_number(obj, "barrier_mu_floor", s.barrier_mu_floor);
    s.grad_tolerance = get_number(obj, "grad_tolerance", s.grad_tolerance);
    s.step_tolerance = get_number(obj, "step_tolerance", s.step_tolerance);
    if (obj.contains("max_outer_iters")) {
        s.max_outer_iters = static_cast<int>(get_unsigned(obj["max_outer_iters"], "max_outer_iters"));
    }
    if (obj.contains("max_bfgs_iters")) {
        s.max_bfgs_iters = static_cast<int>(get_unsigned(obj["max_bfgs_iters"], "max_bfgs_iters"));
    }
    try {
        s.validate();
    } catch (const Error& e) {
        fail(ErrorKind::Parse, std::string("invalid settings: ") + e.what());
    }
    return s;
}

}  // namespace

SystemConfig parse_system_config(std::string_view json_text)
{
    const json doc = parse_document(json_text, "system config");
    SystemConfig c;
    c.num_users = get_unsigned(field(doc, "num_users"), "num_users");
    c.num_antennas = get_unsigned(field(doc, "num_antennas"), "num_antennas");
    c.aperture_length = get_number(field(doc, "aperture_length"), "aperture_length");
    c.min_spacing = get_number(field(doc, "min_spacing"), "min_spacing");
    c.wavelength = get_number(doc, "wavelength", 1.0);
    c.path_loss_exponent = get_number(field(doc, "path_loss_exponent"), "path_loss_exponent");
    c.noise_power = get_number(field(doc, "noise_power"), "noise_power");
    c.power_caps = get_number_array(field(doc, "power_caps"), "power_caps");
    c.uncertainty_widths = get_number_array(field(doc, "uncertainty_widths"), "uncertainty_widths");
    c.user_distances = get_number_array(field(doc, "user_distances"), "user_distances");
    c.nominal_angles = get_number_array(field(doc, "nominal_angles"), "nominal_angles");
    try {
        c.validate();
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Infeasible) throw;
        fail(ErrorKind::Parse, std::string("invalid system config: ") + e.what());
    }
    return c;
}

std::string system_config_to_json(const SystemConfig& config) { return config_json(config).dump(2); }

BcdSettings parse_settings(std::string_view json_text) { return settings_from(parse_document(json_text, "settings")); }

std::string settings_to_json(const BcdSettings& settings) { return settings_json(settings).dump(2); }

SweepSpec parse_sweep_spec(std::string_view json_text)
{
    const json doc = parse_document(json_text, "sweep spec");
    SweepSpec spec;
    ScenarioTemplate& base = spec.base;
    base.num_users = get_unsigned(field(doc, "num_users"), "num_users");

    const std::vector<double> counts = get_number_or_array(field(doc, "num_antennas"), "num_antennas");
    spec.antenna_counts.clear();
    for (double n : counts) {
        require(n >= 1.0 && n == std::floor(n), ErrorKind::Parse, "field 'num_antennas' must hold positive integers");
        spec.antenna_counts.push_back(static_cast<std::size_t>(n));
    }
    base.num_antennas = spec.antenna_counts.front();
    spec.aperture_lengths = get_number_or_array(field(doc, "aperture_length"), "aperture_length");
    base.aperture_length = spec.aperture_lengths.front();

    base.min_spacing = get_number(field(doc, "min_spacing"), "min_spacing");
    base.wavelength = get_number(doc, "wavelength", base.wavelength);
    base.path_loss_exponent = get_number(doc, "path_loss_exponent", base.path_loss_exponent);
    base.noise_power = get_number(doc, "noise_power", base.noise_power);
    if (doc.contains("distance_range")) {
        const auto range = get_number_array(doc["distance_range"], "distance_range");
        require(range.size() == 2, ErrorKind::Parse, "field 'distance_range' must have two entries");
        base.min_distance = range[0];
        base.max_distance = range[1];
    }
    if (doc.contains("angle_range")) {
        const auto range = get_number_array(doc["angle_range"], "angle_range");
        require(range.size() == 2, ErrorKind::Parse, "field 'angle_range' must have two entries");
        base.min_angle = range[0];
        base.max_angle = range[1];
    }

    spec.theta0_grid = get_number_array(field(doc, "theta0_grid"), "theta0_grid");
    spec.snr_db_grid = get_number_array(field(doc, "snr_db_grid"), "snr_db_grid");
    if (doc.contains("num_geometries")) {
        spec.num_geometries = static_cast<int>(get_unsigned(doc["num_geometries"], "num_geometries"));
    }
    if (doc.contains("rng_seed")) spec.rng_seed = get_unsigned(doc["rng_seed"], "rng_seed");
    if (doc.contains("schemes")) {
        const json& schemes = doc["schemes"];
        require(schemes.is_array(), ErrorKind::Parse, "field 'schemes' must be an array of strings");
        spec.schemes.clear();
        for (const json& s : schemes) {
            require(s.is_string(), ErrorKind::Parse, "field 'schemes' must be an array of strings");
            const auto scheme = scheme_from_string(s.get<std::string>());
            require(scheme.has_value(), ErrorKind::Parse,
                    "field 'schemes': unknown scheme '" + s.get<std::string>() +
                        "' (expected proposed, ignore_csi or fixed_position)");
            spec.schemes.push_back(*scheme);
        }
    }
    try {
        spec.validate();
    } catch (const Error& e) {
        fail(ErrorKind::Parse, std::string("invalid sweep spec: ") + e.what());
    }
    return spec;
}

std::string trace_to_json(const BcdTrace& trace) { return trace_json(trace).dump(2); }

std::string solve_report_json(const SystemConfig& config, const BcdResult& result, const MseBreakdown& mse)
{
    const json doc{{"config", config_json(config)},
                   {"solution",
                    {{"transmit_coeffs", complex_array(result.solution.transmit_coeffs)},
                     {"beamformer", complex_array(result.solution.beamformer)},
                     {"positions", real_array(result.solution.positions.values())}}},
                   {"mse",
                    {{"misalignment", mse.misalignment},
                     {"csi_error", mse.csi_error},
                     {"noise", mse.noise},
                     {"total", mse.total}}},
                   {"trace", trace_json(result.trace)}};
    return doc.dump(2);
}

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), ErrorKind::Io, "cannot open '" + path.string() + "' for reading");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.close();
    require(static_cast<bool>(out), ErrorKind::Io, "failed writing '" + path.string() + "'");
}

}  // namespace faircomp
