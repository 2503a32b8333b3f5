#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "faircomp/error.hpp"
#include "faircomp/objective.hpp"
#include "faircomp/solvers.hpp"
#include "helpers.hpp"

using namespace faircomp;
using testing_support::positions;
using testing_support::to_cvec;
using testing_support::to_rvec;
using testing_support::to_std;

namespace {

// Single user, single antenna at x with unit gain.
struct Scalar {
    SystemConfig cfg;
    ChannelSet ch;
};

Scalar scalar(double power, double theta0, double x, double noise = 1.0)
{
    const SystemConfig cfg = make_uniform_config(1, 1, 1.0, 0.5, noise, power, theta0, {1.0}, {1.0});
    return {cfg, build_channels(cfg, positions({x}))};
}

}  // namespace

TEST_CASE("solve_power reference values")
{
    for (double cap : {100.0, 0.01}) {
        const Scalar s = scalar(cap, 0.0, 0.3);
        const CVec m = 2.0 * s.ch.estimated.row(0).transpose();  // m^H hbar = 2
        const CVec b = solve_power(s.cfg, s.ch, m);
        CHECK(std::abs(b[0]) == doctest::Approx(cap == 100.0 ? 0.5 : 0.1).epsilon(1e-14));
        // aligned: m^H hbar b real and positive
        const std::complex<double> g = m.dot(s.ch.estimated.row(0).transpose()) * b[0];
        CHECK(std::abs(g.imag()) < 1e-14);
        CHECK(g.real() > 0.0);
    }
    SUBCASE("zero beamformer gives zero power")
    {
        const Scalar s = scalar(1.0, 0.2, 0.3);
        CHECK(solve_power(s.cfg, s.ch, CVec::Zero(1))[0] == std::complex<double>(0.0, 0.0));
    }
    SUBCASE("non-finite beamformer")
    {
        const Scalar s = scalar(1.0, 0.2, 0.3);
        CVec m(1);
        m[0] = std::complex<double>(NAN, 0.0);
        CHECK_THROWS_AS(solve_power(s.cfg, s.ch, m), Error);
    }
}

TEST_CASE("solve_power matches a grid search and respects the cap")
{
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 30; ++trial) {
        oracle::Scene s = oracle::random_scene(3, 4, 4.0, 0.05 * (trial % 5), 0.0, rng);
        for (int k = 0; k < s.K; ++k) s.P[k] = std::pow(10.0, -2.0 + 0.2 * trial);
        const auto x = oracle::feasible_positions(s, rng);
        const auto m = oracle::random_complex(s.N, rng, 20.0);
        const SystemConfig cfg = testing_support::to_config(s);
        const CVec b = solve_power(cfg, build_channels(cfg, positions(x)), to_cvec(m));
        for (int k = 0; k < s.K; ++k) {
            CHECK(std::norm(b[k]) <= s.P[k] + 1e-12);
            const double closed = oracle::user_term(s, k, x, m, b[k]);
            const double grid = oracle::power_grid_min(s, k, x, m, 100'000);
            CHECK(closed <= grid + 1e-12);
        }
    }
}

TEST_CASE("solve_beamformer reference values")
{
    SUBCASE("scalar Wiener solution")
    {
        const Scalar s = scalar(1.0, 0.0, 0.0);
        const CVec m = solve_beamformer(s.cfg, s.ch, CVec::Ones(1));
        CHECK(std::abs(m[0] - std::complex<double>(0.5, 0.0)) < 1e-15);
    }
    SUBCASE("zero transmitters")
    {
        const SystemConfig cfg = make_uniform_config(2, 3, 3.0, 0.5, 1.0, 1.0, 0.1, {10, 20}, {1, 2});
        const ChannelSet ch = build_channels(cfg, positions({0.5, 1.5, 2.5}));
        CHECK(solve_beamformer(cfg, ch, CVec::Zero(2)).isZero(0.0));
    }
    SUBCASE("singular system without noise")
    {
        const SystemConfig cfg = make_uniform_config(1, 2, 2.0, 0.5, 1.0, 1.0, 0.0, {1.0}, {1.0});
        const ChannelSet ch = build_channels(cfg, positions({0.5, 1.5}));
        SystemConfig silent = cfg;
        silent.noise_power = 0.0;
        try {
            solve_beamformer(silent, ch, CVec::Ones(1));
            FAIL("expected a numerical error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::Numerical);
        }
    }
}

TEST_CASE("solve_beamformer is a stationary point of the MSE")
{
    std::mt19937_64 rng(32);
    for (int trial = 0; trial < 20; ++trial) {
        const oracle::Scene s = oracle::random_scene(2 + trial % 5, 1 + trial % 6, 6.0, 0.05 * (trial % 4), 10.0, rng);
        const auto x = oracle::feasible_positions(s, rng);
        const auto b = oracle::random_complex(s.K, rng, 2.0);
        const SystemConfig cfg = testing_support::to_config(s);
        const auto m = to_std(CVec(solve_beamformer(cfg, build_channels(cfg, positions(x)), to_cvec(b))));

        // m as 2N real variables
        auto as_real = [](const std::vector<oracle::cd>& v) {
            std::vector<double> r;
            for (const auto& c : v) {
                r.push_back(c.real());
                r.push_back(c.imag());
            }
            return r;
        };
        auto mse_of = [&](const std::vector<double>& r) {
            std::vector<oracle::cd> v(r.size() / 2);
            for (std::size_t n = 0; n < v.size(); ++n) v[n] = {r[2 * n], r[2 * n + 1]};
            return oracle::mse(s, x, v, b);
        };
        auto norm = [](const std::vector<double>& g) {
            double t = 0.0;
            for (double e : g) t += e * e;
            return std::sqrt(t);
        };
        const double at_zero = norm(oracle::central_difference(mse_of, std::vector<double>(2 * s.N, 0.0), 1e-6));
        const double at_m = norm(oracle::central_difference(mse_of, as_real(m), 1e-6));
        CHECK(at_m < 1e-6 * (1.0 + at_zero));
    }
}

TEST_CASE("placement objective")
{
    std::mt19937_64 rng(33);
    const oracle::Scene s = oracle::random_scene(4, 5, 5.0, 0.15, 10.0, rng);
    const auto x = oracle::feasible_positions(s, rng);
    const auto m = oracle::random_complex(s.N, rng, 10.0);
    const auto b = oracle::random_complex(s.K, rng, 1.0);
    const SystemConfig cfg = testing_support::to_config(s);

    CHECK(placement_objective(cfg, CVec::Zero(s.K), to_cvec(m), positions(x)) == doctest::Approx(double(s.K)));
    CHECK(placement_gradient(cfg, CVec::Zero(s.K), to_cvec(m), positions(x)).isZero(0.0));

    const double f = placement_objective(cfg, to_cvec(b), to_cvec(m), positions(x));
    CHECK(f == doctest::Approx(oracle::placement_f(s, x, m, b)).epsilon(1e-12));

    const ChannelSet ch = build_channels(cfg, positions(x));
    const MseBreakdown mse = mse_analytic(cfg, ch, Solution{to_cvec(b), to_cvec(m), positions(x)});
    CHECK(f == doctest::Approx(mse.total * s.K * s.K - to_cvec(m).squaredNorm() * s.noise).epsilon(1e-12));

    const std::complex<double> rot = std::polar(1.0, -1.1);
    CHECK(placement_objective(cfg, to_cvec(b) * rot, to_cvec(m) * rot, positions(x)) == doctest::Approx(f).epsilon(1e-13));

    CHECK_THROWS_AS(placement_objective(cfg, to_cvec(b), to_cvec(m), positions({0.1, 0.3, 1.0, 2.0, 3.0})), Error);

    const SystemConfig one = make_uniform_config(2, 1, 2.0, 0.5, 1.0, 1.0, 0.2, {10, 20}, {1, 2});
    CHECK(placement_gradient(one, CVec::Ones(2), CVec::Zero(1), positions({1.0})).isZero(0.0));
}

TEST_CASE("placement gradient matches central differences")
{
    std::mt19937_64 rng(34);
    for (int trial = 0; trial < 20; ++trial) {
        const oracle::Scene s = oracle::random_scene(2 + trial % 8, 2 + trial % 7, 8.0, 0.3 * (trial % 3) / 2, 10.0, rng);
        const auto x = oracle::feasible_positions(s, rng);
        const auto m = oracle::random_complex(s.N, rng, 5.0);
        const auto b = oracle::random_complex(s.K, rng, 1.0);
        const SystemConfig cfg = testing_support::to_config(s);
        const RVec grad = placement_gradient(cfg, to_cvec(b), to_cvec(m), positions(x));
        const auto fd = oracle::central_difference([&](const std::vector<double>& v) { return oracle::placement_f(s, v, m, b); },
                                                   x, 1e-6);
        double scale = 0.0;
        for (double e : fd) scale = std::max(scale, std::abs(e));
        for (int n = 0; n < s.N; ++n) {
            const double denom = std::max(std::abs(fd[n]), 1e-3 * scale);
            CHECK(std::abs(grad[n] - fd[n]) / denom < 1e-5);
        }
    }
}

TEST_CASE("barrier")
{
    CHECK(barrier_value(to_rvec({0.5, 1.5}), 8.0, 0.5) ==
          doctest::Approx(std::log(0.5) + std::log(6.5) + std::log(0.5)).epsilon(1e-14));
    CHECK(barrier_value(to_rvec({0.5, 1.5}), 8.0, 0.5) == doctest::Approx(0.48551).epsilon(1e-5));
    CHECK(barrier_value(to_rvec({3.0}), 6.0, 0.5) == doctest::Approx(2.0 * std::log(3.0)));
    try {
        barrier_value(to_rvec({0.2, 0.6}), 8.0, 0.5);
        FAIL("expected a domain error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Infeasible);
    }
    CHECK_THROWS_AS(barrier_gradient(to_rvec({0.0, 1.0}), 8.0, 0.5), Error);

    const std::vector<double> x{0.7, 1.9, 3.1, 5.0};
    const RVec grad = barrier_gradient(to_rvec(x), 6.0, 0.5);
    const auto fd = oracle::central_difference([](const std::vector<double>& v) { return barrier_value(to_rvec(v), 6.0, 0.5); },
                                               x, 1e-6);
    for (std::size_t n = 0; n < x.size(); ++n) CHECK(grad[Eigen::Index(n)] == doctest::Approx(fd[n]).epsilon(1e-7));
}

TEST_CASE("solve_positions")
{
    const BcdSettings settings;

    SUBCASE("constant objective keeps f and feasibility")
    {
        const SystemConfig cfg = make_uniform_config(3, 4, 4.0, 0.5, 1.0, 1.0, 0.1, {10, 20, 30}, {1, 1.5, 2});
        const AntennaPositions init = initial_positions(cfg);
        const CVec m = CVec::Constant(4, std::complex<double>(0.3, 0.1));
        const AntennaPositions out = solve_positions(cfg, CVec::Zero(3), m, init, settings);
        CHECK(is_strictly_feasible(out.values(), 4.0, 0.5));
        CHECK(placement_objective(cfg, CVec::Zero(3), m, out) == doctest::Approx(3.0));
    }
    SUBCASE("infeasible start")
    {
        const SystemConfig cfg = make_uniform_config(1, 2, 2.0, 0.5, 1.0, 1.0, 0.1, {10}, {1});
        CHECK_THROWS_AS(solve_positions(cfg, CVec::Ones(1), CVec::Ones(2), positions({0.0, 1.0}), settings), Error);
    }
    SUBCASE("two antennas: no worse than a dense grid")
    {
        // the state the placement step sees inside BCD: feasible b, MMSE beamformer at the current x
        std::mt19937_64 rng(35);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (int trial = 0; trial < 10; ++trial) {
            oracle::Scene s = oracle::random_scene(1, 2, 2.0, 0.1, 10.0, rng);
            const auto init = oracle::feasible_positions(s, rng);
            const std::vector<oracle::cd> b{std::polar(std::sqrt(s.P[0]) * unit(rng), 2 * std::numbers::pi * unit(rng))};
            const SystemConfig cfg = testing_support::to_config(s);
            const auto m = to_std(CVec(solve_beamformer(cfg, build_channels(cfg, positions(init)), to_cvec(b))));
            const AntennaPositions out = solve_positions(cfg, to_cvec(b), to_cvec(m), positions(init), settings);
            const double f_out = oracle::placement_f(s, to_std(out.values()), m, b);
            CHECK(f_out <= oracle::placement_f(s, init, m, b) + 1e-10);

            double best = INFINITY;
            const int G = 200;
            for (int i = 0; i < G; ++i) {
                for (int j = 0; j < G; ++j) {
                    const double x1 = s.L * (i + 0.5) / G, x2 = s.L * (j + 0.5) / G;
                    if (x2 - x1 <= s.L0) continue;
                    best = std::min(best, oracle::placement_f(s, {x1, x2}, m, b));
                }
            }
            CHECK(f_out <= best + 1e-3);
        }
    }
    SUBCASE("outputs stay strictly feasible")
    {
        std::mt19937_64 rng(36);
        for (int trial = 0; trial < 100; ++trial) {
            const oracle::Scene s = oracle::random_scene(3, 2 + trial % 5, 1.0 + trial % 5, 0.2, 10.0, rng);
            const auto m = oracle::random_complex(s.N, rng, 10.0);
            const auto b = oracle::random_complex(s.K, rng, 1.0);
            const SystemConfig cfg = testing_support::to_config(s);
            const auto init = oracle::feasible_positions(s, rng);
            const AntennaPositions out = solve_positions(cfg, to_cvec(b), to_cvec(m), positions(init), settings);
            CHECK(is_strictly_feasible(out.values(), s.L, s.L0));
            CHECK(std::isfinite(barrier_value(out.values(), s.L, s.L0)));
            CHECK(oracle::placement_f(s, to_std(out.values()), m, b) <= oracle::placement_f(s, init, m, b) + 1e-10);
        }
    }
}

TEST_CASE("initial positions")
{
    const SystemConfig cfg = make_uniform_config(1, 8, 8.0, 0.5, 1.0, 1.0, 0.1, {10}, {1});
    const AntennaPositions x = initial_positions(cfg);
    for (int n = 0; n < 8; ++n) CHECK(x[std::size_t(n)] == doctest::Approx(8.0 * (n + 1) / 9.0).epsilon(1e-15));

    // L / (N + 1) < L0 but the aperture still has a strictly feasible interior
    const SystemConfig tight = make_uniform_config(1, 8, 4.0, 0.5, 1.0, 1.0, 0.1, {10}, {1});
    const AntennaPositions packed = initial_positions(tight);
    CHECK(is_strictly_feasible(packed.values(), 4.0, 0.5));
    CHECK(packed[0] == doctest::Approx(4.0 - packed[7]));

    // (N - 1) L0 = L: feasible only on the boundary
    const SystemConfig full = make_uniform_config(1, 3, 1.0, 0.5, 1.0, 1.0, 0.1, {10}, {1});
    CHECK_THROWS_AS(initial_positions(full), Error);
}

TEST_CASE("BCD")
{
    BcdSettings settings;

    SUBCASE("settings validation")
    {
        BcdSettings bad;
        bad.barrier_mu_shrink = 1.0;
        CHECK_THROWS_AS(bad.validate(), Error);
        bad = BcdSettings{};
        bad.max_outer_iters = 0;
        CHECK_THROWS_AS(bad.validate(), Error);
    }
    SUBCASE("single user, negligible noise: misalignment vanishes")
    {
        const SystemConfig cfg = make_uniform_config(1, 1, 1.0, 0.5, 1e-8, 1e4, 0.0, {1.0}, {1.2});
        const BcdResult r = bcd_solve(cfg, settings);
        const MseBreakdown mse = mse_analytic(cfg, build_channels(cfg, r.solution.positions), r.solution);
        CHECK(mse.misalignment < 1e-12);
        CHECK(mse.total < 1e-7);
        CHECK(r.trace.converged);
    }
    SUBCASE("trace is non-increasing and outputs are feasible")
    {
        std::mt19937_64 rng(37);
        for (int trial = 0; trial < 8; ++trial) {
            oracle::Scene s = oracle::random_scene(5, 4, 4.0, 0.05 * trial, 10.0, rng);
            const SystemConfig cfg = testing_support::to_config(s);
            const BcdResult r = bcd_solve(cfg, settings);
            double previous = r.trace.initial_objective;
            for (const BcdIteration& it : r.trace.iterations) {
                CHECK(it.objective_after_beamformer <= previous + 1e-10);
                CHECK(it.objective_after_power <= it.objective_after_beamformer + 1e-10);
                CHECK(it.objective <= it.objective_after_power + 1e-10);
                previous = it.objective;
            }
            CHECK(is_strictly_feasible(r.solution.positions.values(), s.L, s.L0));
            const MseBreakdown mse = mse_analytic(cfg, build_channels(cfg, r.solution.positions), r.solution);
            CHECK(mse.total == doctest::Approx(r.trace.iterations.back().objective).epsilon(1e-12));
            CHECK(r.trace.iterations.size() <= std::size_t(settings.max_outer_iters));
        }
    }
    SUBCASE("fixed positions never move")
    {
        const SystemConfig cfg = make_uniform_config(3, 4, 4.0, 0.5, 1.0, 10.0, 0.2, {10, 20, 30}, {1, 1.5, 2});
        const AntennaPositions init = initial_positions(cfg);
        const BcdResult r = bcd_solve_fixed_positions(cfg, settings, init);
        CHECK(r.solution.positions.values() == init.values());
        for (const BcdIteration& it : r.trace.iterations) CHECK(it.delta_positions == 0.0);
    }
}
