#pragma once
// Brute-force reference implementations used by the tests. Deliberately
// written from the formulas with plain loops; nothing here calls into the
// library's numerics.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using cd = std::complex<double>;

struct Scene {
    int K = 1, N = 1;
    double L = 1.0, L0 = 0.5, lambda = 1.0, alpha = 2.0, noise = 1.0;
    std::vector<double> P, theta0, dist, angle;
};

inline double k0(const Scene& s) { return 2.0 * std::numbers::pi / s.lambda; }

inline cd steering(const Scene& s, int k, double x)
{
    const double amp = std::sqrt(std::pow(s.dist[k], -s.alpha));
    const double phase = k0(s) * x * std::cos(s.angle[k]);
    return amp * cd(std::cos(phase), std::sin(phase));
}

inline double psi(const Scene& s, int k)
{
    const double v = k0(s) * std::sqrt(std::pow(s.dist[k], -s.alpha)) * std::sin(s.angle[k]);
    return v * v / 3.0;
}

// sum_n conj(m_n) hbar_kn
inline cd gain(const Scene& s, int k, const std::vector<double>& x, const std::vector<cd>& m)
{
    cd g = 0.0;
    for (int n = 0; n < s.N; ++n) g += std::conj(m[n]) * steering(s, k, x[n]);
    return g;
}

// Per-user bracket of the robust MSE (without the 1/K^2 factor).
inline double user_term(const Scene& s, int k, const std::vector<double>& x, const std::vector<cd>& m, cd b)
{
    double mx = 0.0;
    for (int n = 0; n < s.N; ++n) mx += std::norm(m[n] * x[n]);
    return std::norm(gain(s, k, x, m) * b - 1.0) + std::norm(b) * psi(s, k) * s.theta0[k] * s.theta0[k] * mx;
}

inline double placement_f(const Scene& s, const std::vector<double>& x, const std::vector<cd>& m,
                          const std::vector<cd>& b)
{
    double f = 0.0;
    for (int k = 0; k < s.K; ++k) f += user_term(s, k, x, m, b[k]);
    return f;
}

inline double mse(const Scene& s, const std::vector<double>& x, const std::vector<cd>& m, const std::vector<cd>& b)
{
    double mm = 0.0;
    for (const cd& v : m) mm += std::norm(v);
    return (placement_f(s, x, m, b) + mm * s.noise) / (double(s.K) * s.K);
}

// Minimum of user_term over |b| in [0, sqrt(P)] on an evenly spaced grid,
// with the phase set to cancel arg(m^H hbar).
inline double power_grid_min(const Scene& s, int k, const std::vector<double>& x, const std::vector<cd>& m,
                             int points)
{
    const cd g = gain(s, k, x, m);
    const cd rot = std::abs(g) > 0 ? std::conj(g) / std::abs(g) : cd(1.0);
    double best = INFINITY;
    for (int i = 0; i <= points; ++i) {
        const double r = std::sqrt(s.P[k]) * double(i) / points;
        best = std::min(best, user_term(s, k, x, m, r * rot));
    }
    return best;
}

inline std::vector<double> central_difference(const std::function<double(const std::vector<double>&)>& f,
                                              std::vector<double> x, double h)
{
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double xi = x[i];
        x[i] = xi + h;
        const double fp = f(x);
        x[i] = xi - h;
        const double fm = f(x);
        x[i] = xi;
        g[i] = (fp - fm) / (2 * h);
    }
    return g;
}

// Strictly feasible positions: sorted uniforms in the free aperture, shifted
// by the minimum spacing.
inline std::vector<double> feasible_positions(const Scene& s, std::mt19937_64& rng)
{
    const double free = s.L - (s.N - 1) * s.L0;
    std::uniform_real_distribution<double> u(0.02 * free, 0.98 * free);
    std::vector<double> v(s.N);
    for (double& e : v) e = u(rng);
    std::sort(v.begin(), v.end());
    for (int n = 0; n < s.N; ++n) v[n] += n * s.L0;
    return v;
}

inline Scene random_scene(int K, int N, double L, double theta0, double P, std::mt19937_64& rng)
{
    Scene s;
    s.K = K;
    s.N = N;
    s.L = L;
    std::uniform_real_distribution<double> ang(std::numbers::pi / 12, 11 * std::numbers::pi / 12), d(10.0, 50.0);
    for (int k = 0; k < K; ++k) {
        s.P.push_back(P);
        s.theta0.push_back(theta0);
        s.angle.push_back(ang(rng));
        s.dist.push_back(d(rng));
    }
    return s;
}

inline std::vector<cd> random_complex(int n, std::mt19937_64& rng, double scale = 1.0)
{
    std::normal_distribution<double> g(0.0, scale);
    std::vector<cd> v(n);
    for (cd& e : v) e = cd(g(rng), g(rng));
    return v;
}

}  // namespace oracle
