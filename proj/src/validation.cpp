#include "faircomp/validation.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "faircomp/error.hpp"

namespace faircomp {

AntennaPositions random_feasible_positions(const SystemConfig& config, Rng& rng)
{
    const auto count = static_cast<Eigen::Index>(config.num_antennas);
    const double free_length = config.aperture_length - static_cast<double>(count - 1) * config.min_spacing;
    require(free_length > 0.0, ErrorKind::Infeasible, "aperture has no strictly feasible interior");

    std::exponential_distribution<double> weight(1.0);
    RVec slacks(count + 1);
    for (Eigen::Index i = 0; i <= count; ++i) slacks[i] = 0.05 + weight(rng);
    slacks *= 0.98 * free_length / slacks.sum();

    RVec x(count);
    x[0] = slacks[0];
    for (Eigen::Index n = 1; n < count; ++n) x[n] = x[n - 1] + config.min_spacing + slacks[n];
    return AntennaPositions(std::move(x));
}

CVec random_complex(Eigen::Index size, Rng& rng, double variance)
{
    std::normal_distribution<double> gaussian(0.0, std::sqrt(variance / 2.0));
    CVec v(size);
    for (Eigen::Index i = 0; i < size; ++i) {
        const double re = gaussian(rng);
        const double im = gaussian(rng);
        v[i] = {re, im};
    }
    return v;
}

namespace {

struct Instance {
    SystemConfig config;
    ChannelSet channels;
    Solution solution;
};

// Random geometry, random feasible positions, random feasible b, and either
// the robust MMSE beamformer or a random one.
Instance make_instance(std::uint64_t seed, std::size_t users, std::size_t antennas, double aperture,
                       double theta0, double snr_db, bool optimal_beamformer)
{
    ScenarioTemplate base;
    base.num_users = users;
    base.num_antennas = antennas;
    base.aperture_length = aperture;
    const SystemConfig config =
        make_scenario(base, draw_geometry(base, mix_seed(seed, 1)), theta0, snr_db, antennas, aperture);

    Rng rng(mix_seed(seed, 2));
    AntennaPositions positions = random_feasible_positions(config, rng);
    ChannelSet channels = build_channels(config, positions);

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    CVec power(static_cast<Eigen::Index>(users));
    for (Eigen::Index k = 0; k < power.size(); ++k) {
        power[k] = std::polar(std::sqrt(config.power_caps[static_cast<std::size_t>(k)]) * unit(rng),
                              2.0 * std::numbers::pi * unit(rng));
    }
    CVec beamformer = optimal_beamformer ? solve_beamformer(config, channels, power)
                                         : random_complex(static_cast<Eigen::Index>(antennas), rng, 1.0);
    return Instance{config, channels, Solution{power, beamformer, positions}};
}

std::string fmt(double v)
{
    std::ostringstream out;
    out.precision(4);
    out << v;
    return out.str();
}

CheckResult channel_error_moments(std::uint64_t seed)
{
    const SystemConfig config = make_uniform_config(3, 4, 4.0, 0.5, 1.0, 1.0, 0.2, {10.0, 20.0, 1.0},
                                                    {0.5, 1.5, 2.5});
    SystemConfig varied = config;
    varied.uncertainty_widths = {0.1, 0.2, 0.3};
    Rng rng(mix_seed(seed, 10));
    const ChannelSet channels = build_channels(varied, random_feasible_positions(varied, rng));
    const std::size_t draws = 1'000'000;

    const Eigen::Index rows = channels.estimated.rows();
    const Eigen::Index cols = channels.estimated.cols();
    CMat sum = CMat::Zero(rows, cols);
    Eigen::MatrixXd sum_sq = Eigen::MatrixXd::Zero(rows, cols);
    for (std::size_t i = 0; i < draws; ++i) {
        const CMat delta = draw_perturbed_channels(varied, channels, rng) - channels.estimated;
        sum += delta;
        sum_sq += delta.cwiseAbs2();
    }
    double worst = 0.0;
    double worst_mean = 0.0;
    const RVec& x = channels.positions.values();
    for (Eigen::Index k = 0; k < rows; ++k) {
        const double width = varied.uncertainty_widths[static_cast<std::size_t>(k)];
        for (Eigen::Index n = 0; n < cols; ++n) {
            const double expected = channels.uncertainty[k] * x[n] * x[n] * width * width;
            const double variance = sum_sq(k, n) / static_cast<double>(draws);
            worst = std::max(worst, std::abs(variance / expected - 1.0));
            // standard error of the mean is sqrt(expected / draws)
            worst_mean = std::max(worst_mean, std::abs(sum(k, n)) / static_cast<double>(draws) /
                                                  std::sqrt(expected / static_cast<double>(draws)));
        }
    }
    const bool ok = worst < 0.01 && worst_mean < 5.0;
    return {"channel_error_moments", ok,
            "max relative variance error " + fmt(worst) + " (limit 0.01), max |mean| " + fmt(worst_mean) +
                " standard errors (limit 5)"};
}

CheckResult monte_carlo_diagonal(std::uint64_t seed)
{
    double worst = 0.0;
    int index = 0;
    for (double theta0 : {0.1, 0.2, 0.3}) {
        const Instance inst = make_instance(mix_seed(seed, 20, static_cast<std::uint64_t>(index)), 10, 8, 8.0, theta0,
                                            10.0, index % 2 == 0);
        ++index;
        const double analytic = mse_analytic(inst.config, inst.channels, inst.solution).total;
        const double sampled = mse_monte_carlo(inst.config, inst.channels, inst.solution, 1'000'000,
                                               mix_seed(seed, 21), PerturbationModel::DiagonalCovariance);
        worst = std::max(worst, std::abs(sampled / analytic - 1.0));
    }
    return {"mse_monte_carlo_diagonal_covariance", worst < 0.01,
            "max relative error " + fmt(worst) + " over 3 instances at 1e6 samples (limit 0.01)"};
}

CheckResult monte_carlo_zero_uncertainty(std::uint64_t seed)
{
    const Instance inst = make_instance(mix_seed(seed, 30), 10, 8, 8.0, 0.0, 10.0, true);
    const double analytic = mse_analytic(inst.config, inst.channels, inst.solution).total;
    const double sampled = mse_monte_carlo(inst.config, inst.channels, inst.solution, 1'000'000, mix_seed(seed, 31));
    const double rel = std::abs(sampled / analytic - 1.0);
    return {"mse_monte_carlo_linearized_zero_uncertainty", rel < 0.01,
            "relative error " + fmt(rel) + " at 1e6 samples (limit 0.01)"};
}

CheckResult monte_carlo_shared_angle(std::uint64_t seed)
{
    const Instance inst = make_instance(mix_seed(seed, 40), 10, 8, 8.0, 0.2, 10.0, true);
    const MseBreakdown closed = mse_analytic(inst.config, inst.channels, inst.solution);
    const double shared = closed.total - closed.csi_error + csi_error_shared_angle(inst.config, inst.channels, inst.solution);
    const double sampled = mse_monte_carlo(inst.config, inst.channels, inst.solution, 1'000'000, mix_seed(seed, 41));
    const double rel = std::abs(sampled / shared - 1.0);
    const double gap = std::abs(sampled / closed.total - 1.0);
    return {"mse_monte_carlo_linearized_shared_angle", rel < 0.01,
            "relative error vs shared-angle expectation " + fmt(rel) +
                " (limit 0.01); relative gap to the diagonal-covariance closed form " + fmt(gap)};
}

CheckResult power_grid_search(std::uint64_t seed)
{
    constexpr int kGrid = 100'000;
    int failures = 0;
    double worst_gap = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const Instance inst =
            make_instance(mix_seed(seed, 50, static_cast<std::uint64_t>(trial)), 4, 6, 6.0, 0.05 * (trial % 7), 5.0 + trial % 3 * 5.0, false);
        const CVec coeffs = solve_power(inst.config, inst.channels, inst.solution.beamformer);
        const CVec& m = inst.solution.beamformer;
        const RVec& x = inst.solution.positions.values();
        const double beam_energy = (m.cwiseAbs2().array() * x.array().square()).sum();
        for (Eigen::Index k = 0; k < coeffs.size(); ++k) {
            const auto user = static_cast<std::size_t>(k);
            const std::complex<double> gain = m.dot(inst.channels.estimated.row(k).transpose());
            const double width = inst.config.uncertainty_widths[user];
            const double penalty = inst.channels.uncertainty[k] * width * width * beam_energy;
            auto objective = [&](std::complex<double> b) { return std::norm(gain * b - 1.0) + std::norm(b) * penalty; };
            const double cap = std::sqrt(inst.config.power_caps[user]);
            const double step = cap / (kGrid - 1);
            const std::complex<double> phase = std::abs(gain) > 0 ? std::conj(gain) / std::abs(gain) : 1.0;
            double best = objective(0.0);
            for (int i = 1; i < kGrid; ++i) best = std::min(best, objective(phase * (step * i)));
            // curvature bound: |f(r) - f(r*)| <= (|g|^2 + penalty) * step^2 near the optimum
            const double slack = (std::norm(gain) + penalty) * step * step + 1e-12;
            const double closed = objective(coeffs[k]);
            worst_gap = std::max(worst_gap, closed - best);
            bool ok = closed <= best + slack && std::norm(coeffs[k]) <= inst.config.power_caps[user] + 1e-12;
            for (int p = 0; p < 360 && ok; ++p) {
                const std::complex<double> rotated = coeffs[k] * std::polar(1.0, 2.0 * std::numbers::pi * p / 360.0);
                ok = objective(rotated) >= closed - 1e-12;
            }
            if (!ok) ++failures;
        }
    }
    return {"solve_power_grid_search", failures == 0,
            std::to_string(failures) + " of 200 users worse than the 1e5-point grid (max excess " + fmt(worst_gap) + ")"};
}

RVec mse_gradient_in_beamformer(const SystemConfig& config, const ChannelSet& channels, Solution sol, double h)
{
    const Eigen::Index n = sol.beamformer.size();
    RVec gradient(2 * n);
    for (Eigen::Index i = 0; i < 2 * n; ++i) {
        const std::complex<double> delta = i < n ? std::complex<double>(h, 0.0) : std::complex<double>(0.0, h);
        const Eigen::Index idx = i % n;
        Solution plus = sol;
        Solution minus = sol;
        plus.beamformer[idx] += delta;
        minus.beamformer[idx] -= delta;
        gradient[i] = (mse_analytic(config, channels, plus).total - mse_analytic(config, channels, minus).total) / (2 * h);
    }
    return gradient;
}

CheckResult beamformer_stationarity(std::uint64_t seed)
{
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        Instance inst = make_instance(mix_seed(seed, 60, static_cast<std::uint64_t>(trial)), 10, 8, 8.0,
                                      0.05 * (trial % 5), 10.0, true);
        Solution zero = inst.solution;
        zero.beamformer.setZero();
        const double scale = mse_gradient_in_beamformer(inst.config, inst.channels, zero, 1e-6).norm();
        const double residual = mse_gradient_in_beamformer(inst.config, inst.channels, inst.solution, 1e-6).norm();
        worst = std::max(worst, residual / (1e-6 * (1.0 + scale)));
    }
    return {"solve_beamformer_stationarity", worst < 1.0,
            "max finite-difference gradient norm " + fmt(worst) + " x 1e-6 (1 + |grad at 0|) (limit 1)"};
}

CheckResult placement_gradient_check(std::uint64_t seed)
{
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const Instance inst = make_instance(mix_seed(seed, 70, static_cast<std::uint64_t>(trial)), 6, 5, 6.0,
                                            0.05 * (trial % 5), 10.0, true);
        const RVec& x = inst.solution.positions.values();
        const RVec analytic =
            placement_gradient(inst.config, inst.solution.transmit_coeffs, inst.solution.beamformer, inst.solution.positions);
        RVec numeric(x.size());
        for (Eigen::Index n = 0; n < x.size(); ++n) {
            RVec up = x;
            RVec down = x;
            up[n] += 1e-6;
            down[n] -= 1e-6;
            numeric[n] = (placement_objective(inst.config, inst.solution.transmit_coeffs, inst.solution.beamformer,
                                              AntennaPositions(up)) -
                          placement_objective(inst.config, inst.solution.transmit_coeffs, inst.solution.beamformer,
                                              AntennaPositions(down))) /
                         2e-6;
        }
        const double floor = 1e-3 * numeric.cwiseAbs().maxCoeff() + 1e-8;
        for (Eigen::Index n = 0; n < x.size(); ++n) {
            worst = std::max(worst, std::abs(analytic[n] - numeric[n]) / std::max(std::abs(numeric[n]), floor));
        }
    }
    return {"placement_gradient_finite_difference", worst < 1e-5,
            "max componentwise relative error " + fmt(worst) + " over 20 points (limit 1e-5)"};
}

CheckResult positions_grid_search(std::uint64_t seed)
{
    constexpr int kGrid = 200;
    double worst = -1e300;
    const BcdSettings settings;
    for (int trial = 0; trial < 3; ++trial) {
        const Instance inst = make_instance(mix_seed(seed, 80, static_cast<std::uint64_t>(trial)), 1, 2, 2.0, 0.1,
                                            10.0, true);
        const CVec& b = inst.solution.transmit_coeffs;
        const CVec& m = inst.solution.beamformer;
        const AntennaPositions found = solve_positions(inst.config, b, m, initial_positions(inst.config), settings);
        const double f_found = placement_objective(inst.config, b, m, found);
        const double length = inst.config.aperture_length;
        double best = 1e300;
        for (int i = 0; i < kGrid; ++i) {
            for (int j = 0; j < kGrid; ++j) {
                RVec x(2);
                x << length * i / (kGrid - 1), length * j / (kGrid - 1);
                if (!(x[1] - x[0] >= inst.config.min_spacing)) continue;
                best = std::min(best, placement_objective(inst.config, b, m, AntennaPositions(x)));
            }
        }
        worst = std::max(worst, f_found - best);
    }
    return {"solve_positions_grid_search_n2", worst <= 1e-3,
            "max excess over the 200x200 grid minimum " + fmt(worst) + " (limit 1e-3)"};
}

CheckResult bcd_monotonicity(std::uint64_t seed)
{
    int violations = 0;
    int infeasible = 0;
    for (int trial = 0; trial < 3; ++trial) {
        ScenarioTemplate base;
        const SystemConfig config = make_scenario(base, draw_geometry(base, mix_seed(seed, 90, static_cast<std::uint64_t>(trial))),
                                                  0.1 * trial, 10.0, 8, 8.0);
        const BcdResult result = bcd_solve(config, BcdSettings{});
        double previous = result.trace.initial_objective;
        for (const BcdIteration& it : result.trace.iterations) {
            for (double value : {it.objective_after_beamformer, it.objective_after_power, it.objective}) {
                if (value > previous + 1e-10) ++violations;
                previous = value;
            }
        }
        if (!is_strictly_feasible(result.solution.positions.values(), config.aperture_length, config.min_spacing)) {
            ++infeasible;
        }
    }
    return {"bcd_monotonicity", violations == 0 && infeasible == 0,
            std::to_string(violations) + " objective increases, " + std::to_string(infeasible) +
                " infeasible outputs over 3 instances"};
}

CheckResult barrier_hand_value()
{
    RVec x(2);
    x << 0.5, 1.5;
    const double value = barrier_value(x, 8.0, 0.5);
    const double expected = std::log(0.5) + std::log(6.5) + std::log(0.5);
    return {"barrier_value", std::abs(value - expected) < 1e-12,
            "barrier([0.5, 1.5]; L=8, L0=0.5) = " + fmt(value) + ", expected " + fmt(expected)};
}

}  // namespace

std::vector<CheckResult> run_validation(std::uint64_t seed, const std::function<void(const CheckResult&)>& on_result)
{
    using Check = std::function<CheckResult()>;
    const std::vector<Check> checks{
        [] { return barrier_hand_value(); },
        [&] { return channel_error_moments(seed); },
        [&] { return monte_carlo_zero_uncertainty(seed); },
        [&] { return monte_carlo_diagonal(seed); },
        [&] { return monte_carlo_shared_angle(seed); },
        [&] { return power_grid_search(seed); },
        [&] { return beamformer_stationarity(seed); },
        [&] { return placement_gradient_check(seed); },
        [&] { return positions_grid_search(seed); },
        [&] { return bcd_monotonicity(seed); },
    };

    std::vector<CheckResult> results;
    for (const Check& check : checks) {
        CheckResult r;
        try {
            r = check();
        } catch (const std::exception& e) {
            r = {"(check raised)", false, e.what()};
        }
        if (on_result) on_result(r);
        results.push_back(std::move(r));
    }
    return results;
}

}  // namespace faircomp
