#include <cmath>

#include "faircomp/error.hpp"
#include "faircomp/solvers.hpp"

namespace faircomp {

void BcdSettings::validate() const
{
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    require(positive(outer_tolerance), ErrorKind::InvalidArgument, "outer_tolerance must be positive");
    require(max_outer_iters > 0, ErrorKind::InvalidArgument, "max_outer_iters must be positive");
    require(positive(barrier_mu_init), ErrorKind::InvalidArgument, "barrier_mu_init must be positive");
    require(std::isfinite(barrier_mu_shrink) && barrier_mu_shrink > 1.0, ErrorKind::InvalidArgument,
            "barrier_mu_shrink must exceed 1");
    require(positive(barrier_mu_floor), ErrorKind::InvalidArgument, "barrier_mu_floor must be positive");
    require(positive(grad_tolerance), ErrorKind::InvalidArgument, "grad_tolerance must be positive");
    require(positive(step_tolerance), ErrorKind::InvalidArgument, "step_tolerance must be positive");
    require(max_bfgs_iters > 0, ErrorKind::InvalidArgument, "max_bfgs_iters must be positive");
}

namespace {

BcdResult run_bcd(const SystemConfig& config, const BcdSettings& settings, AntennaPositions positions,
                  bool update_positions)
{
    config.validate();
    settings.validate();

    CVec power(static_cast<Eigen::Index>(config.num_users));
    for (Eigen::Index k = 0; k < power.size(); ++k) power[k] = std::sqrt(config.power_caps[static_cast<std::size_t>(k)]);
    CVec beamformer = CVec::Zero(static_cast<Eigen::Index>(config.num_antennas));
    ChannelSet channels = build_channels(config, positions);

    BcdTrace trace;
    trace.initial_objective = mse_analytic(config, channels, Solution{power, beamformer, positions}).total;

    for (int iter = 1; iter <= settings.max_outer_iters; ++iter) {
        BcdIteration record;
        record.iteration = iter;

        CVec next_beamformer = solve_beamformer(config, channels, power);
        record.objective_after_beamformer =
            mse_analytic(config, channels, Solution{power, next_beamformer, positions}).total;

        CVec next_power = solve_power(config, channels, next_beamformer);
        record.objective_after_power =
            mse_analytic(config, channels, Solution{next_power, next_beamformer, positions}).total;

        if (update_positions) {
            AntennaPositions next_positions = solve_positions(config, next_power, next_beamformer, positions, settings);
            record.delta_positions = (next_positions.values() - positions.values()).norm();
            positions = std::move(next_positions);
            channels = build_channels(config, positions);
        }

        record.delta_beamformer = (next_beamformer - beamformer).norm();
        record.delta_power = (next_power - power).norm();
        beamformer = std::move(next_beamformer);
        power = std::move(next_power);
        record.objective = mse_analytic(config, channels, Solution{power, beamformer, positions}).total;
        trace.iterations.push_back(record);

        if (record.delta_beamformer < settings.outer_tolerance && record.delta_power < settings.outer_tolerance &&
            record.delta_positions < settings.outer_tolerance) {
            trace.converged = true;
            break;
        }
    }

    return BcdResult{Solution{std::move(power), std::move(beamformer), std::move(positions)}, std::move(trace)};
}

}  // namespace

BcdResult bcd_solve(const SystemConfig& config, const BcdSettings& settings)
{
    return run_bcd(config, settings, initial_positions(config), true);
}

BcdResult bcd_solve_fixed_positions(const SystemConfig& config, const BcdSettings& settings,
                                    const AntennaPositions& positions)
{
    return run_bcd(config, settings, positions, false);
}

}  // namespace faircomp
