#include "faircomp/objective.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <string>
#include <thread>
#include <vector>

#include "faircomp/error.hpp"

namespace faircomp {

namespace {

constexpr std::uint64_t kSamplesPerChunk = 1u << 14;

void check_dimensions(const SystemConfig& config, const ChannelSet& channels, const Solution& sol)
{
    const auto num_users = static_cast<Eigen::Index>(config.num_users);
    const auto num_antennas = static_cast<Eigen::Index>(config.num_antennas);
    require(channels.estimated.rows() == num_users && channels.estimated.cols() == num_antennas,
            ErrorKind::InvalidArgument, "channel matrix does not match num_users x num_antennas");
    require(channels.uncertainty.size() == num_users, ErrorKind::InvalidArgument,
            "uncertainty vector does not match num_users");
    require(sol.transmit_coeffs.size() == num_users, ErrorKind::InvalidArgument,
            "transmit_coeffs has " + std::to_string(sol.transmit_coeffs.size()) + " entries, expected " +
                std::to_string(num_users));
    require(sol.beamformer.size() == num_antennas, ErrorKind::InvalidArgument,
            "beamformer has " + std::to_string(sol.beamformer.size()) + " entries, expected " +
                std::to_string(num_antennas));
    require(sol.positions.size() == config.num_antennas && channels.positions.size() == config.num_antennas,
            ErrorKind::InvalidArgument, "position vector does not match num_antennas");
    require(sol.positions.values() == channels.positions.values(), ErrorKind::InvalidArgument,
            "channels were built for a different antenna placement than the solution");
}

double chunk_error_sum(const SystemConfig& config, const ChannelSet& channels, const Solution& sol,
                       std::uint64_t count, std::uint64_t seed, PerturbationModel model)
{
    Rng rng(seed);
    std::normal_distribution<double> half_gaussian(0.0, std::sqrt(0.5));
    const double noise_scale = std::sqrt(config.noise_power);
    const double num_users = static_cast<double>(config.num_users);
    const Eigen::Index n_users = channels.estimated.rows();
    const Eigen::Index n_antennas = channels.estimated.cols();

    CVec symbols(n_users);
    CVec received(n_antennas);
    double sum = 0.0;
    for (std::uint64_t i = 0; i < count; ++i) {
        for (Eigen::Index k = 0; k < n_users; ++k) {
            const double re = half_gaussian(rng);
            const double im = half_gaussian(rng);
            symbols[k] = {re, im};
        }
        const CMat channel = draw_perturbed_channels(config, channels, rng, model);
        for (Eigen::Index n = 0; n < n_antennas; ++n) {
            const double re = half_gaussian(rng);
            const double im = half_gaussian(rng);
            received[n] = noise_scale * std::complex<double>(re, im);
        }
        for (Eigen::Index k = 0; k < n_users; ++k) {
            received += channel.row(k).transpose() * (sol.transmit_coeffs[k] * symbols[k]);
        }
        const std::complex<double> estimate = sol.beamformer.dot(received) / num_users;  // m^H y / K
        const std::complex<double> target = symbols.sum() / num_users;
        sum += std::norm(estimate - target);
    }
    return sum;
}

}  // namespace

MseBreakdown mse_analytic(const SystemConfig& config, const ChannelSet& channels, const Solution& sol)
{
    check_dimensions(config, channels, sol);
    const double k2 = static_cast<double>(config.num_users * config.num_users);
    const RVec& x = sol.positions.values();
    const CVec& m = sol.beamformer;
    const double weighted_beam = (m.cwiseAbs2().array() * x.array().square()).sum();  // sum_n |m_n x_n|^2

    MseBreakdown out;
    for (Eigen::Index k = 0; k < channels.estimated.rows(); ++k) {
        const auto user = static_cast<std::size_t>(k);
        const std::complex<double> gain = m.dot(channels.estimated.row(k).transpose());  // m^H hbar_k
        out.misalignment += std::norm(gain * sol.transmit_coeffs[k] - 1.0);
        const double width = config.uncertainty_widths[user];
        out.csi_error += std::norm(sol.transmit_coeffs[k]) * channels.uncertainty[k] * width * width * weighted_beam;
    }
    out.misalignment /= k2;
    out.csi_error /= k2;
    out.noise = m.squaredNorm() * config.noise_power / k2;
    out.total = out.misalignment + out.csi_error + out.noise;
    return out;
}

double csi_error_shared_angle(const SystemConfig& config, const ChannelSet& channels, const Solution& sol)
{
    check_dimensions(config, channels, sol);
    const double k0 = config.wavenumber();
    const RVec& x = sol.positions.values();
    double sum = 0.0;
    for (Eigen::Index k = 0; k < channels.estimated.rows(); ++k) {
        const auto user = static_cast<std::size_t>(k);
        std::complex<double> projected = 0.0;
        for (Eigen::Index n = 0; n < x.size(); ++n) {
            projected += std::conj(sol.beamformer[n]) * channels.estimated(k, n) * x[n];
        }
        const double width = config.uncertainty_widths[user];
        const double slope = k0 * std::sin(config.nominal_angles[user]);
        sum += std::norm(sol.transmit_coeffs[k]) * width * width / 3.0 * slope * slope * std::norm(projected);
    }
    return sum / static_cast<double>(config.num_users * config.num_users);
}

double mse_monte_carlo(const SystemConfig& config, const ChannelSet& channels, const Solution& sol,
                       std::uint64_t num_samples, std::uint64_t rng_seed, PerturbationModel model, unsigned workers)
{
    require(num_samples >= 1, ErrorKind::InvalidArgument, "num_samples must be >= 1");
    check_dimensions(config, channels, sol);

    const std::uint64_t num_chunks = (num_samples + kSamplesPerChunk - 1) / kSamplesPerChunk;
    std::vector<double> chunk_sums(num_chunks, 0.0);
    auto run_chunk = [&](std::uint64_t c) {
        const std::uint64_t begin = c * kSamplesPerChunk;
        const std::uint64_t count = std::min(kSamplesPerChunk, num_samples - begin);
        chunk_sums[c] = chunk_error_sum(config, channels, sol, count, mix_seed(rng_seed, c), model);
    };

    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, num_chunks));
    if (workers <= 1) {
        for (std::uint64_t c = 0; c < num_chunks; ++c) run_chunk(c);
    } else {
        std::atomic<std::uint64_t> next{0};
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::uint64_t c = next++; c < num_chunks; c = next++) run_chunk(c);
            });
        }
    }

    double total = 0.0;
    for (double s : chunk_sums) total += s;
    return total / static_cast<double>(num_samples);
}

}  // namespace faircomp
