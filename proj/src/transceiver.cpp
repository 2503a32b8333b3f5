#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include "faircomp/error.hpp"
#include "faircomp/solvers.hpp"

namespace faircomp {

namespace {

// sum_n |m_n x_n|^2
double weighted_beam_energy(const CVec& beamformer, const RVec& x)
{
    return (beamformer.cwiseAbs2().array() * x.array().square()).sum();
}

}  // namespace

CVec solve_power(const SystemConfig& config, const ChannelSet& channels, const CVec& beamformer)
{
    require(beamformer.size() == channels.estimated.cols(), ErrorKind::InvalidArgument,
            "beamformer length does not match the number of antennas");
    require(beamformer.allFinite(), ErrorKind::Numerical, "beamformer has non-finite entries");

    const double beam_energy = weighted_beam_energy(beamformer, channels.positions.values());
    CVec coeffs(channels.estimated.rows());
    for (Eigen::Index k = 0; k < coeffs.size(); ++k) {
        const auto user = static_cast<std::size_t>(k);
        const std::complex<double> gain = beamformer.dot(channels.estimated.row(k).transpose());
        const double gain_abs = std::abs(gain);
        const double width = config.uncertainty_widths[user];
        const double denominator = gain_abs * gain_abs + channels.uncertainty[k] * width * width * beam_energy;
        if (gain_abs == 0.0 || denominator == 0.0) {
            coeffs[k] = 0.0;
            continue;
        }
        const double magnitude = std::min(std::sqrt(config.power_caps[user]), gain_abs / denominator);
        coeffs[k] = magnitude * std::conj(gain) / gain_abs;
    }
    return coeffs;
}

CVec solve_beamformer(const SystemConfig& config, const ChannelSet& channels, const CVec& transmit_coeffs)
{
    const Eigen::Index num_antennas = channels.estimated.cols();
    require(transmit_coeffs.size() == channels.estimated.rows(), ErrorKind::InvalidArgument,
            "transmit_coeffs length does not match the number of users");

    const RVec& x = channels.positions.values();
    const RVec position_sq = x.array().square();

    CMat covariance = CMat::Identity(num_antennas, num_antennas) * config.noise_power;
    CVec target = CVec::Zero(num_antennas);
    for (Eigen::Index k = 0; k < transmit_coeffs.size(); ++k) {
        const auto user = static_cast<std::size_t>(k);
        const double power = std::norm(transmit_coeffs[k]);
        const CVec h = channels.estimated.row(k).transpose();
        const double width = config.uncertainty_widths[user];
        covariance.noalias() += power * (h * h.adjoint());
        covariance.diagonal() += (power * channels.uncertainty[k] * width * width * position_sq).cast<std::complex<double>>();
        target += h * transmit_coeffs[k];
    }

    const Eigen::LLT<CMat> factor(covariance);
    if (factor.info() != Eigen::Success || !(factor.rcond() > std::numeric_limits<double>::epsilon())) {
        fail(ErrorKind::Numerical, "beamformer system matrix is singular (noise_power = " +
                                       std::to_string(config.noise_power) + ")");
    }
    CVec beamformer = factor.solve(target);
    require(beamformer.allFinite(), ErrorKind::Numerical, "beamformer solve produced non-finite values");
    return beamformer;
}

}  // namespace faircomp
