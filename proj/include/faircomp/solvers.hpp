#pragma once

#include <vector>

#include "faircomp/model.hpp"
#include "faircomp/objective.hpp"

namespace faircomp {

/// Tolerances and schedules for the alternating optimisation and for the
/// barrier quasi-Newton placement step.
struct BcdSettings {
    double outer_tolerance = 1e-4;
    int max_outer_iters = 100;
    double barrier_mu_init = 1.0;
    double barrier_mu_shrink = 10.0;
    double barrier_mu_floor = 1e-8;
    double grad_tolerance = 1e-6;
    double step_tolerance = 1e-8;
    int max_bfgs_iters = 200;

    void validate() const;
};

struct BcdIteration {
    int iteration = 0;
    double objective = 0.0;                  // MSE after all three block updates
    double objective_after_beamformer = 0.0;
    double objective_after_power = 0.0;
    double delta_beamformer = 0.0;           // ||m_i - m_{i-1}||
    double delta_power = 0.0;                // ||b_i - b_{i-1}||
    double delta_positions = 0.0;            // ||x_i - x_{i-1}||
};

struct BcdTrace {
    double initial_objective = 0.0;  // MSE at the initial point with m = 0
    std::vector<BcdIteration> iterations;
    bool converged = false;
};

struct BcdResult {
    Solution solution;
    BcdTrace trace;
};

// ---- transmit coefficients ------------------------------------------------

/// Per-user minimiser of |m^H hbar_k b_k - 1|^2 + |b_k|^2 psi_k theta0_k^2 sum_n |m_n x_n|^2
/// subject to |b_k|^2 <= P_k. The phase aligns m^H hbar_k b_k with the real axis.
CVec solve_power(const SystemConfig& config, const ChannelSet& channels, const CVec& beamformer);

// ---- receive beamformer ---------------------------------------------------

/// m = R^{-1} sum_k hbar_k b_k with
/// R = sigma^2 I + sum_k |b_k|^2 (hbar_k hbar_k^H + psi_k theta0_k^2 diag(x^2)).
/// Throws Error(Numerical) if R is not positive definite.
CVec solve_beamformer(const SystemConfig& config, const ChannelSet& channels, const CVec& transmit_coeffs);

// ---- antenna placement ----------------------------------------------------

/// sum_k (|m^H hbar_k(x) b_k - 1|^2 + |b_k|^2 psi_k theta0_k^2 sum_n |m_n x_n|^2)
double placement_objective(const SystemConfig& config, const CVec& transmit_coeffs, const CVec& beamformer,
                           const AntennaPositions& positions);

/// Analytic gradient of placement_objective with respect to x.
RVec placement_gradient(const SystemConfig& config, const CVec& transmit_coeffs, const CVec& beamformer,
                        const AntennaPositions& positions);

/// log(x_1) + log(L - x_N) + sum_{n>=2} log(x_n - x_{n-1} - L0).
/// Throws Error(Infeasible) if any slack is <= 0.
double barrier_value(const RVec& positions, double aperture_length, double min_spacing);
RVec barrier_gradient(const RVec& positions, double aperture_length, double min_spacing);

/// Log-barrier interior-point loop with an inverse-BFGS inner solver.
/// Minimises f(x) - mu * barrier(x) for a geometric mu schedule and returns
/// the strictly feasible iterate with the lowest f; returns `initial`
/// unchanged when nothing improves on it.
AntennaPositions solve_positions(const SystemConfig& config, const CVec& transmit_coeffs, const CVec& beamformer,
                                 const AntennaPositions& initial, const BcdSettings& settings);

/// x_n = L n / (N + 1) when that spacing exceeds L0. Otherwise the antennas
/// are spread evenly with spacing halfway between L0 and L / (N - 1) and
/// centred in the aperture. Throws Error(Infeasible) if the aperture has no
/// strictly feasible interior.
AntennaPositions initial_positions(const SystemConfig& config);

// ---- alternating optimisation ---------------------------------------------

/// Full block coordinate descent over (m, b, x), starting from
/// b_k = sqrt(P_k) and initial_positions(config).
BcdResult bcd_solve(const SystemConfig& config, const BcdSettings& settings);

/// Alternates beamformer and power updates only; positions stay at `positions`.
BcdResult bcd_solve_fixed_positions(const SystemConfig& config, const BcdSettings& settings,
                                    const AntennaPositions& positions);

}  // namespace faircomp
