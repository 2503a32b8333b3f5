#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace faircomp {

using RVec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

/// Scenario constants for one AirComp uplink with a fluid antenna array.
///
/// Lengths (aperture, spacing, positions) are in wavelength units; the
/// wavelength still enters every phase term explicitly so that a value other
/// than 1 is honoured. Per-user vectors all have length `num_users`.
struct SystemConfig {
    std::size_t num_users = 1;
    std::size_t num_antennas = 1;
    double aperture_length = 1.0;
    double min_spacing = 0.5;
    double wavelength = 1.0;
    double path_loss_exponent = 2.0;
    double noise_power = 1.0;
    std::vector<double> power_caps;
    std::vector<double> uncertainty_widths;  // half-width of the AoA error, radians
    std::vector<double> user_distances;
    std::vector<double> nominal_angles;      // estimated AoA, radians in [0, pi]

    /// Throws Error(InvalidArgument) on malformed values and
    /// Error(Infeasible) when no antenna placement can satisfy the spacing.
    void validate() const;

    double wavenumber() const;  // 2*pi / wavelength
};

/// Convenience builder for configs where every user shares the same power
/// cap and uncertainty width.
SystemConfig make_uniform_config(std::size_t num_users, std::size_t num_antennas, double aperture_length,
                                 double min_spacing, double noise_power, double power_cap,
                                 double uncertainty_width, std::vector<double> user_distances,
                                 std::vector<double> nominal_angles, double path_loss_exponent = 2.0,
                                 double wavelength = 1.0);

}  // namespace faircomp
