#pragma once

#include <cstdint>
#include <random>

#include "faircomp/config.hpp"

namespace faircomp {

/// Antenna position vector. Always strictly increasing; feasibility against
/// a particular aperture is checked separately because it depends on the
/// config (see check_feasible / is_strictly_feasible).
class AntennaPositions {
public:
    explicit AntennaPositions(RVec positions);

    const RVec& values() const noexcept { return positions_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(positions_.size()); }
    double operator[](std::size_t n) const { return positions_[static_cast<Eigen::Index>(n)]; }

private:
    RVec positions_;
};

/// Non-strict check of x_1 >= 0, x_N <= L and x_n - x_{n-1} >= L0, with a
/// 1e-12 absolute allowance for rounding. Throws Error(Infeasible) naming
/// the first violated constraint.
void check_feasible(const SystemConfig& config, const AntennaPositions& positions);

/// True iff every barrier slack is strictly positive.
bool is_strictly_feasible(const RVec& positions, double aperture_length, double min_spacing);

/// Estimated channels and uncertainty scalars for one antenna placement.
struct ChannelSet {
    CMat estimated;   // K x N, row k is the estimated steering vector of user k
    RVec uncertainty; // psi_k
    AntennaPositions positions;
};

/// Complete decision triple: transmit coefficients, receive beamformer and
/// antenna positions.
struct Solution {
    CVec transmit_coeffs;
    CVec beamformer;
    AntennaPositions positions;
};

double propagation_gain(double distance, double path_loss_exponent);  // l^-alpha

/// (1/3) * (k0 * sqrt(l^-alpha) * sin(theta))^2
double uncertainty_coefficient(const SystemConfig& config, std::size_t user);

ChannelSet build_channels(const SystemConfig& config, const AntennaPositions& positions);

/// How the angle error is mapped onto the channel.
enum class PerturbationModel {
    /// First-order expansion h = hbar + hbar .* q(theta) * dtheta_k with a
    /// single angle error per user shared by all antennas.
    Linearized,
    /// Steering vector re-evaluated at theta_bar + dtheta (diagnostic only).
    Exact,
    /// First-order expansion with an independent angle error per antenna,
    /// i.e. the diagonal error covariance the closed-form MSE assumes.
    DiagonalCovariance,
};

using Rng = std::mt19937_64;

/// Draws one channel realisation. Angle errors are Uniform[-theta0_k, theta0_k].
CMat draw_perturbed_channels(const SystemConfig& config, const ChannelSet& channels, Rng& rng,
                             PerturbationModel model = PerturbationModel::Linearized);

/// Seeded convenience wrapper; bit-identical output for identical inputs.
CMat sample_perturbed_channels(const SystemConfig& config, const ChannelSet& channels, std::uint64_t rng_seed,
                               PerturbationModel model = PerturbationModel::Linearized);

/// splitmix64 finaliser, used to derive independent sub-seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

}  // namespace faircomp
