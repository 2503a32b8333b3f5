#include "faircomp/config.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "faircomp/error.hpp"

namespace faircomp {

namespace {

void require_positive(double value, const char* name)
{
    require(std::isfinite(value) && value > 0.0, ErrorKind::InvalidArgument,
            std::string(name) + " must be a positive finite number");
}

void require_length(const std::vector<double>& values, std::size_t expected, const char* name)
{
    require(values.size() == expected, ErrorKind::InvalidArgument,
            std::string(name) + " has length " + std::to_string(values.size()) + ", expected num_users = " +
                std::to_string(expected));
}

}  // namespace

void SystemConfig::validate() const
{
    require(num_users >= 1, ErrorKind::InvalidArgument, "num_users must be >= 1");
    require(num_antennas >= 1, ErrorKind::InvalidArgument, "num_antennas must be >= 1");
    require_positive(aperture_length, "aperture_length");
    require_positive(min_spacing, "min_spacing");
    require_positive(wavelength, "wavelength");
    require_positive(path_loss_exponent, "path_loss_exponent");
    require_positive(noise_power, "noise_power");

    require_length(power_caps, num_users, "power_caps");
    require_length(uncertainty_widths, num_users, "uncertainty_widths");
    require_length(user_distances, num_users, "user_distances");
    require_length(nominal_angles, num_users, "nominal_angles");

    for (std::size_t k = 0; k < num_users; ++k) {
        require_positive(power_caps[k], "power_caps entry");
        require_positive(user_distances[k], "user_distances entry");
        const double width = uncertainty_widths[k];
        require(std::isfinite(width) && width >= 0.0 && width <= std::numbers::pi / 2, ErrorKind::InvalidArgument,
                "uncertainty_widths entry " + std::to_string(k) + " must lie in [0, pi/2]");
        const double angle = nominal_angles[k];
        require(std::isfinite(angle) && angle >= 0.0 && angle <= std::numbers::pi, ErrorKind::InvalidArgument,
                "nominal_angles entry " + std::to_string(k) + " must lie in [0, pi]");
    }

    const double packed = static_cast<double>(num_antennas - 1) * min_spacing;
    require(packed <= aperture_length, ErrorKind::Infeasible,
            "no feasible placement: (num_antennas - 1) * min_spacing = " + std::to_string(packed) +
                " exceeds aperture_length = " + std::to_string(aperture_length));
}

double SystemConfig::wavenumber() const { return 2.0 * std::numbers::pi / wavelength; }

SystemConfig make_uniform_config(std::size_t num_users, std::size_t num_antennas, double aperture_length,
                                 double min_spacing, double noise_power, double power_cap,
                                 double uncertainty_width, std::vector<double> user_distances,
                                 std::vector<double> nominal_angles, double path_loss_exponent, double wavelength)
{
    SystemConfig config;
    config.num_users = num_users;
    config.num_antennas = num_antennas;
    config.aperture_length = aperture_length;
    config.min_spacing = min_spacing;
    config.wavelength = wavelength;
    config.path_loss_exponent = path_loss_exponent;
    config.noise_power = noise_power;
    config.power_caps.assign(num_users, power_cap);
    config.uncertainty_widths.assign(num_users, uncertainty_width);
    config.user_distances = std::move(user_distances);
    config.nominal_angles = std::move(nominal_angles);
    config.validate();
    return config;
}

}  // namespace faircomp
