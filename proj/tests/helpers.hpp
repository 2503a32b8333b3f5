#pragma once
// Conversions between the oracle's plain types and the library types.

#include <vector>

#include "faircomp/config.hpp"
#include "faircomp/model.hpp"
#include "oracles.hpp"

namespace testing_support {

inline faircomp::SystemConfig to_config(const oracle::Scene& s)
{
    faircomp::SystemConfig c;
    c.num_users = std::size_t(s.K);
    c.num_antennas = std::size_t(s.N);
    c.aperture_length = s.L;
    c.min_spacing = s.L0;
    c.wavelength = s.lambda;
    c.path_loss_exponent = s.alpha;
    c.noise_power = s.noise;
    c.power_caps = s.P;
    c.uncertainty_widths = s.theta0;
    c.user_distances = s.dist;
    c.nominal_angles = s.angle;
    return c;
}

inline faircomp::RVec to_rvec(const std::vector<double>& v)
{
    return Eigen::Map<const faircomp::RVec>(v.data(), Eigen::Index(v.size()));
}

inline faircomp::CVec to_cvec(const std::vector<oracle::cd>& v)
{
    return Eigen::Map<const faircomp::CVec>(v.data(), Eigen::Index(v.size()));
}

inline std::vector<double> to_std(const faircomp::RVec& v) { return {v.data(), v.data() + v.size()}; }
inline std::vector<oracle::cd> to_std(const faircomp::CVec& v) { return {v.data(), v.data() + v.size()}; }

inline faircomp::AntennaPositions positions(const std::vector<double>& x) { return faircomp::AntennaPositions(to_rvec(x)); }

}  // namespace testing_support
