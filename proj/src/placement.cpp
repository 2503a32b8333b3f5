#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include "faircomp/error.hpp"
#include "faircomp/solvers.hpp"

namespace faircomp {

namespace {

/// Precomputed per-user terms of the placement objective, so that f and its
/// gradient only cost K*N complex exponentials per evaluation.
class PlacementModel {
public:
    PlacementModel(const SystemConfig& config, const CVec& transmit_coeffs, const CVec& beamformer)
        : beamformer_(beamformer),
          beam_power_(beamformer.cwiseAbs2()),
          coeff_(transmit_coeffs.size()),
          spatial_freq_(transmit_coeffs.size())
    {
        require(transmit_coeffs.size() == static_cast<Eigen::Index>(config.num_users), ErrorKind::InvalidArgument,
                "transmit_coeffs length does not match num_users");
        require(beamformer.size() == static_cast<Eigen::Index>(config.num_antennas), ErrorKind::InvalidArgument,
                "beamformer length does not match num_antennas");
        const double k0 = config.wavenumber();
        for (Eigen::Index k = 0; k < coeff_.size(); ++k) {
            const auto user = static_cast<std::size_t>(k);
            const double amplitude =
                std::sqrt(propagation_gain(config.user_distances[user], config.path_loss_exponent));
            coeff_[k] = amplitude * transmit_coeffs[k];
            spatial_freq_[k] = k0 * std::cos(config.nominal_angles[user]);
            const double width = config.uncertainty_widths[user];
            csi_weight_ += std::norm(transmit_coeffs[k]) * uncertainty_coefficient(config, user) * width * width;
        }
    }

    double value(const RVec& x) const
    {
        double f = csi_weight_ * (beam_power_.array() * x.array().square()).sum();
        for (Eigen::Index k = 0; k < coeff_.size(); ++k) f += std::norm(aligned_gain(k, x) - 1.0);
        return f;
    }

    double value_and_gradient(const RVec& x, RVec& gradient) const
    {
        gradient = 2.0 * csi_weight_ * (beam_power_.array() * x.array()).matrix();
        double f = csi_weight_ * (beam_power_.array() * x.array().square()).sum();
        for (Eigen::Index k = 0; k < coeff_.size(); ++k) {
            const std::complex<double> residual = aligned_gain(k, x) - 1.0;
            f += std::norm(residual);
            const std::complex<double> scale = std::conj(residual) * coeff_[k] * std::complex<double>(0.0, spatial_freq_[k]);
            for (Eigen::Index n = 0; n < x.size(); ++n) {
                const std::complex<double> term = std::conj(beamformer_[n]) * std::polar(1.0, spatial_freq_[k] * x[n]);
                gradient[n] += 2.0 * std::real(scale * term);
            }
        }
        return f;
    }

private:
    // m^H hbar_k(x) b_k
    std::complex<double> aligned_gain(Eigen::Index k, const RVec& x) const
    {
        std::complex<double> acc = 0.0;
        for (Eigen::Index n = 0; n < x.size(); ++n) {
            acc += std::conj(beamformer_[n]) * std::polar(1.0, spatial_freq_[k] * x[n]);
        }
        return acc * coeff_[k];
    }

    CVec beamformer_;
    RVec beam_power_;
    CVec coeff_;         // sqrt(l_k^-alpha) * b_k
    RVec spatial_freq_;  // k0 cos(theta_k)
    double csi_weight_ = 0.0;  // sum_k |b_k|^2 psi_k theta0_k^2
};

// Slacks in the order x_1, L - x_N, then x_n - x_{n-1} - L0 for n = 2..N.
RVec barrier_slacks(const RVec& x, double aperture_length, double min_spacing)
{
    const Eigen::Index count = x.size();
    RVec slacks(count + 1);
    slacks[0] = x[0];
    slacks[1] = aperture_length - x[count - 1];
    for (Eigen::Index n = 1; n < count; ++n) slacks[n + 1] = x[n] - x[n - 1] - min_spacing;
    return slacks;
}

// Rate of change of each slack along direction p.
RVec slack_rates(const RVec& p)
{
    const Eigen::Index count = p.size();
    RVec rates(count + 1);
    rates[0] = p[0];
    rates[1] = -p[count - 1];
    for (Eigen::Index n = 1; n < count; ++n) rates[n + 1] = p[n] - p[n - 1];
    return rates;
}

void require_strict(const SystemConfig& config, const AntennaPositions& positions)
{
    require(positions.size() == config.num_antennas, ErrorKind::InvalidArgument,
            "position vector does not match num_antennas");
    if (!is_strictly_feasible(positions.values(), config.aperture_length, config.min_spacing)) {
        check_feasible(config, positions);  // names the violated constraint if non-strictly infeasible
        fail(ErrorKind::Infeasible, "antenna positions lie on the boundary of the feasible region");
    }
}

struct MeritPoint {
    RVec x;
    double objective = 0.0;  // f(x)
    double merit = 0.0;      // f(x) - mu * barrier(x)
    RVec gradient;           // gradient of the merit
};

class BarrierProblem {
public:
    BarrierProblem(const PlacementModel& model, double aperture_length, double min_spacing)
        : model_(model), aperture_length_(aperture_length), min_spacing_(min_spacing)
    {
    }

    MeritPoint evaluate(const RVec& x, double mu) const
    {
        MeritPoint point;
        point.x = x;
        RVec objective_gradient;
        point.objective = model_.value_and_gradient(x, objective_gradient);
        point.merit = point.objective - mu * barrier_value(x, aperture_length_, min_spacing_);
        point.gradient = objective_gradient - mu * barrier_gradient(x, aperture_length_, min_spacing_);
        return point;
    }

    // Largest step along p (capped at 1) keeping each slack >= 10% of its current value.
    double max_step(const RVec& x, const RVec& p) const
    {
        const RVec slacks = barrier_slacks(x, aperture_length_, min_spacing_);
        const RVec rates = slack_rates(p);
        double step = 1.0;
        for (Eigen::Index i = 0; i < slacks.size(); ++i) {
            if (rates[i] < 0.0) step = std::min(step, 0.9 * slacks[i] / -rates[i]);
        }
        return step;
    }

    bool feasible(const RVec& x) const { return is_strictly_feasible(x, aperture_length_, min_spacing_); }

private:
    const PlacementModel& model_;
    double aperture_length_;
    double min_spacing_;
};

constexpr double kArmijo = 1e-4;
constexpr double kBacktrack = 0.5;
constexpr int kMaxBacktracks = 50;
constexpr double kCurvatureFloor = 1e-12;

// One mu stage of inverse-BFGS with a feasibility-capped Armijo search.
// `best` tracks the lowest-f iterate seen across all stages.
MeritPoint minimize_stage(const BarrierProblem& problem, MeritPoint current, double mu, const BcdSettings& settings,
                          MeritPoint& best)
{
    const Eigen::Index dim = current.x.size();
    Eigen::MatrixXd inverse_hessian = Eigen::MatrixXd::Identity(dim, dim);
    bool identity = true;

    for (int iter = 0; iter < settings.max_bfgs_iters; ++iter) {
        if (current.gradient.norm() < settings.grad_tolerance) break;

        RVec direction = -inverse_hessian * current.gradient;
        double slope = direction.dot(current.gradient);
        if (!(slope < 0.0)) {
            inverse_hessian.setIdentity();
            identity = true;
            direction = -current.gradient;
            slope = direction.dot(current.gradient);
        }

        double step = problem.max_step(current.x, direction);
        bool accepted = false;
        MeritPoint next;
        for (int bt = 0; bt < kMaxBacktracks && step > 0.0; ++bt, step *= kBacktrack) {
            const RVec trial_x = current.x + step * direction;
            if (!problem.feasible(trial_x)) continue;
            next = problem.evaluate(trial_x, mu);
            if (std::isfinite(next.merit) && next.merit <= current.merit + kArmijo * step * slope) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            if (identity) break;  // steepest descent cannot make progress either
            inverse_hessian.setIdentity();
            identity = true;
            continue;
        }

        const RVec s = next.x - current.x;
        const RVec y = next.gradient - current.gradient;
        const double curvature = y.dot(s);
        if (curvature > kCurvatureFloor) {
            if (identity) {
                // Rescale the identity before the first update so the next
                // trial step has a sensible length.
                inverse_hessian *= curvature / y.squaredNorm();
            }
            const double rho = 1.0 / curvature;
            const Eigen::MatrixXd left = Eigen::MatrixXd::Identity(dim, dim) - rho * s * y.transpose();
            inverse_hessian = left * inverse_hessian * left.transpose() + rho * s * s.transpose();
            inverse_hessian = 0.5 * (inverse_hessian + inverse_hessian.transpose()).eval();
            identity = false;
        } else {
            inverse_hessian.setIdentity();
            identity = true;
        }

        current = std::move(next);
        if (current.objective < best.objective) best = current;
        if (s.norm() < settings.step_tolerance) break;
    }
    return current;
}

}  // namespace

double placement_objective(const SystemConfig& config, const CVec& transmit_coeffs, const CVec& beamformer,
                           const AntennaPositions& positions)
{
    const ChannelSet channels = build_channels(config, positions);
    require(transmit_coeffs.size() == channels.estimated.rows(), ErrorKind::InvalidArgument,
            "transmit_coeffs length does not match num_users");
    require(beamformer.size() == channels.estimated.cols(), ErrorKind::InvalidArgument,
            "beamformer length does not match num_antennas");

    const RVec& x = positions.values();
    const double beam_energy = (beamformer.cwiseAbs2().array() * x.array().square()).sum();
    double f = 0.0;
    for (Eigen::Index k = 0; k < channels.estimated.rows(); ++k) {
        const auto user = static_cast<std::size_t>(k);
        const std::complex<double> g = beamformer.dot(channels.estimated.row(k).transpose()) * transmit_coeffs[k];
        const double width = config.uncertainty_widths[user];
        f += std::norm(g - 1.0) + std::norm(transmit_coeffs[k]) * channels.uncertainty[k] * width * width * beam_energy;
    }
    return f;
}

RVec placement_gradient(const SystemConfig& config, const CVec& transmit_coeffs, const CVec& beamformer,
                        const AntennaPositions& positions)
{
    config.validate();
    check_feasible(config, positions);
    const PlacementModel model(config, transmit_coeffs, beamformer);
    RVec gradient;
    model.value_and_gradient(positions.values(), gradient);
    return gradient;
}

double barrier_value(const RVec& positions, double aperture_length, double min_spacing)
{
    require(positions.size() >= 1, ErrorKind::InvalidArgument, "position vector is empty");
    const RVec slacks = barrier_slacks(positions, aperture_length, min_spacing);
    double value = 0.0;
    for (Eigen::Index i = 0; i < slacks.size(); ++i) {
        if (!(slacks[i] > 0.0)) {
            fail(ErrorKind::Infeasible, "barrier undefined: slack " + std::to_string(i) + " = " +
                                            std::to_string(slacks[i]) + " is not positive");
        }
        value += std::log(slacks[i]);
    }
    return value;
}

RVec barrier_gradient(const RVec& positions, double aperture_length, double min_spacing)
{
    const RVec slacks = barrier_slacks(positions, aperture_length, min_spacing);
    require((slacks.array() > 0.0).all(), ErrorKind::Infeasible, "barrier gradient undefined at a boundary point");
    const Eigen::Index count = positions.size();
    RVec gradient = RVec::Zero(count);
    gradient[0] += 1.0 / slacks[0];
    gradient[count - 1] -= 1.0 / slacks[1];
    for (Eigen::Index n = 1; n < count; ++n) {
        const double inv = 1.0 / slacks[n + 1];
        gradient[n] += inv;
        gradient[n - 1] -= inv;
    }
    return gradient;
}

AntennaPositions solve_positions(const SystemConfig& config, const CVec& transmit_coeffs, const CVec& beamformer,
                                 const AntennaPositions& initial, const BcdSettings& settings)
{
    settings.validate();
    require_strict(config, initial);

    const PlacementModel model(config, transmit_coeffs, beamformer);
    const BarrierProblem problem(model, config.aperture_length, config.min_spacing);

    double mu = settings.barrier_mu_init;
    MeritPoint current = problem.evaluate(initial.values(), mu);
    const double initial_objective = current.objective;
    MeritPoint best = current;

    while (mu >= settings.barrier_mu_floor) {
        current = problem.evaluate(current.x, mu);
        current = minimize_stage(problem, std::move(current), mu, settings, best);
        mu /= settings.barrier_mu_shrink;
    }

    if (best.objective < initial_objective) return AntennaPositions(best.x);
    return initial;
}

AntennaPositions initial_positions(const SystemConfig& config)
{
    config.validate();
    const auto count = static_cast<Eigen::Index>(config.num_antennas);
    const double aperture = config.aperture_length;
    RVec x(count);

    const double uniform_spacing = aperture / static_cast<double>(count + 1);
    if (count == 1 || uniform_spacing > config.min_spacing) {
        for (Eigen::Index n = 0; n < count; ++n) x[n] = uniform_spacing * static_cast<double>(n + 1);
        return AntennaPositions(std::move(x));
    }

    const double widest = aperture / static_cast<double>(count - 1);
    require(widest > config.min_spacing, ErrorKind::Infeasible,
            "aperture admits no strictly feasible placement: L / (N - 1) = " + std::to_string(widest) +
                " does not exceed L0 = " + std::to_string(config.min_spacing));
    const double spacing = 0.5 * (config.min_spacing + widest);
    const double margin = 0.5 * (aperture - spacing * static_cast<double>(count - 1));
    for (Eigen::Index n = 0; n < count; ++n) x[n] = margin + spacing * static_cast<double>(n);
    return AntennaPositions(std::move(x));
}

}  // namespace faircomp
