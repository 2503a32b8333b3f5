#pragma once

#include <cstdint>

#include "faircomp/model.hpp"

namespace faircomp {

/// Closed-form robust MSE split into its three contributions.
struct MseBreakdown {
    double misalignment = 0.0;  // (1/K^2) sum_k |m^H hbar_k b_k - 1|^2
    double csi_error = 0.0;     // (1/K^2) sum_k sum_n |b_k|^2 psi_k theta0_k^2 |m_n x_n|^2
    double noise = 0.0;         // ||m||^2 sigma^2 / K^2
    double total = 0.0;
};

/// Analytic MSE of a solution. `channels` must have been built from
/// `sol.positions`; dimension mismatches throw Error(InvalidArgument).
MseBreakdown mse_analytic(const SystemConfig& config, const ChannelSet& channels, const Solution& sol);

/// Sample mean of |s_hat - s|^2 over independent draws of the user symbols
/// (circularly symmetric complex Gaussian, unit variance), the angle errors
/// and the receiver noise.
///
/// Samples are processed in fixed-size chunks whose seeds are derived from
/// `rng_seed` and the chunk index alone, so the estimate does not depend on
/// `workers` (0 means hardware concurrency).
double mse_monte_carlo(const SystemConfig& config, const ChannelSet& channels, const Solution& sol,
                       std::uint64_t num_samples, std::uint64_t rng_seed,
                       PerturbationModel model = PerturbationModel::Linearized, unsigned workers = 0);

/// Exact expectation of the CSI-error contribution when all antennas share
/// one angle error per user (rank-one error covariance):
///   (1/K^2) sum_k |b_k|^2 (theta0_k^2 / 3) |sum_n conj(m_n) hbar_kn k0 sin(theta_k) x_n|^2
/// This is what the Linearized Monte-Carlo mode converges to in place of
/// MseBreakdown::csi_error.
double csi_error_shared_angle(const SystemConfig& config, const ChannelSet& channels, const Solution& sol);

}  // namespace faircomp
