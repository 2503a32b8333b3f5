#include "faircomp/model.hpp"

#include <cmath>
#include <complex>
#include <string>

#include "faircomp/error.hpp"

namespace faircomp {

namespace {

constexpr double kFeasibilityAllowance = 1e-12;

double uniform_symmetric(Rng& rng, double half_width)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    return half_width * (2.0 * unit(rng) - 1.0);
}

}  // namespace

AntennaPositions::AntennaPositions(RVec positions) : positions_(std::move(positions))
{
    require(positions_.size() >= 1, ErrorKind::InvalidArgument, "antenna position vector is empty");
    for (Eigen::Index n = 0; n < positions_.size(); ++n) {
        require(std::isfinite(positions_[n]), ErrorKind::InvalidArgument,
                "antenna position " + std::to_string(n) + " is not finite");
        if (n > 0) {
            require(positions_[n] > positions_[n - 1], ErrorKind::Infeasible,
                    "antenna positions must be strictly increasing (x_" + std::to_string(n + 1) + " <= x_" +
                        std::to_string(n) + ")");
        }
    }
}

void check_feasible(const SystemConfig& config, const AntennaPositions& positions)
{
    require(positions.size() == config.num_antennas, ErrorKind::InvalidArgument,
            "position vector has " + std::to_string(positions.size()) + " entries, config has num_antennas = " +
                std::to_string(config.num_antennas));
    const RVec& x = positions.values();
    const Eigen::Index n_last = x.size() - 1;
    require(x[0] >= -kFeasibilityAllowance, ErrorKind::Infeasible,
            "constraint x_1 >= 0 violated (x_1 = " + std::to_string(x[0]) + ")");
    require(x[n_last] <= config.aperture_length + kFeasibilityAllowance, ErrorKind::Infeasible,
            "constraint x_N <= L violated (x_N = " + std::to_string(x[n_last]) +
                ", L = " + std::to_string(config.aperture_length) + ")");
    for (Eigen::Index n = 1; n <= n_last; ++n) {
        const double gap = x[n] - x[n - 1];
        require(gap >= config.min_spacing - kFeasibilityAllowance, ErrorKind::Infeasible,
                "spacing constraint x_" + std::to_string(n + 1) + " - x_" + std::to_string(n) +
                    " >= L0 violated (gap = " + std::to_string(gap) + ", L0 = " + std::to_string(config.min_spacing) +
                    ")");
    }
}

bool is_strictly_feasible(const RVec& x, double aperture_length, double min_spacing)
{
    if (x.size() == 0) return false;
    if (!(x[0] > 0.0) || !(aperture_length - x[x.size() - 1] > 0.0)) return false;
    for (Eigen::Index n = 1; n < x.size(); ++n) {
        if (!(x[n] - x[n - 1] - min_spacing > 0.0)) return false;
    }
    return true;
}

double propagation_gain(double distance, double path_loss_exponent)
{
    return std::pow(distance, -path_loss_exponent);
}

double uncertainty_coefficient(const SystemConfig& config, std::size_t user)
{
    const double amplitude = config.wavenumber() *
                             std::sqrt(propagation_gain(config.user_distances[user], config.path_loss_exponent)) *
                             std::sin(config.nominal_angles[user]);
    return amplitude * amplitude / 3.0;
}

ChannelSet build_channels(const SystemConfig& config, const AntennaPositions& positions)
{
    config.validate();
    check_feasible(config, positions);

    const auto num_users = static_cast<Eigen::Index>(config.num_users);
    const auto num_antennas = static_cast<Eigen::Index>(config.num_antennas);
    const double k0 = config.wavenumber();
    const RVec& x = positions.values();

    CMat estimated(num_users, num_antennas);
    RVec uncertainty(num_users);
    for (Eigen::Index k = 0; k < num_users; ++k) {
        const auto user = static_cast<std::size_t>(k);
        const double amplitude = std::sqrt(propagation_gain(config.user_distances[user], config.path_loss_exponent));
        const double spatial_freq = k0 * std::cos(config.nominal_angles[user]);
        for (Eigen::Index n = 0; n < num_antennas; ++n) {
            estimated(k, n) = std::polar(amplitude, spatial_freq * x[n]);
        }
        uncertainty[k] = uncertainty_coefficient(config, user);
    }
    return ChannelSet{std::move(estimated), std::move(uncertainty), positions};
}

CMat draw_perturbed_channels(const SystemConfig& config, const ChannelSet& channels, Rng& rng,
                             PerturbationModel model)
{
    const CMat& estimated = channels.estimated;
    const RVec& x = channels.positions.values();
    const double k0 = config.wavenumber();
    CMat perturbed(estimated.rows(), estimated.cols());

    for (Eigen::Index k = 0; k < estimated.rows(); ++k) {
        const auto user = static_cast<std::size_t>(k);
        const double width = config.uncertainty_widths[user];
        const double nominal = config.nominal_angles[user];
        const double sin_nominal = std::sin(nominal);

        switch (model) {
        case PerturbationModel::Linearized: {
            const double error = uniform_symmetric(rng, width);
            for (Eigen::Index n = 0; n < estimated.cols(); ++n) {
                const std::complex<double> q(0.0, k0 * x[n] * sin_nominal);
                perturbed(k, n) = estimated(k, n) + estimated(k, n) * q * error;
            }
            break;
        }
        case PerturbationModel::DiagonalCovariance: {
            for (Eigen::Index n = 0; n < estimated.cols(); ++n) {
                const double error = uniform_symmetric(rng, width);
                const std::complex<double> q(0.0, k0 * x[n] * sin_nominal);
                perturbed(k, n) = estimated(k, n) + estimated(k, n) * q * error;
            }
            break;
        }
        case PerturbationModel::Exact: {
            const double error = uniform_symmetric(rng, width);
            const double amplitude = std::abs(estimated(k, 0));
            const double spatial_freq = k0 * std::cos(nominal + error);
            for (Eigen::Index n = 0; n < estimated.cols(); ++n) {
                perturbed(k, n) = std::polar(amplitude, spatial_freq * x[n]);
            }
            break;
        }
        }
    }
    return perturbed;
}

CMat sample_perturbed_channels(const SystemConfig& config, const ChannelSet& channels, std::uint64_t rng_seed,
                               PerturbationModel model)
{
    Rng rng(rng_seed);
    return draw_perturbed_channels(config, channels, rng, model);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b)
{
    auto splitmix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return splitmix(splitmix(splitmix(seed) ^ a) ^ b);
}

}  // namespace faircomp
