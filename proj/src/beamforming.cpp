// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------


#include "mmwsim/beamforming.hpp"

#include <cmath>
#include <stdexcept>

namespace mmwsim
{

void UpaConfig::validate() const
{
    if (side < 1)
        throw std::invalid_argument("UPA side must be >= 1");
    if (!(spacing_v > 0.0) || !(spacing_h > 0.0))
        throw std::invalid_argument("UPA element spacing must be positive");
}

UpaConfig UpaConfig::square(int side, double boresight_azimuth)
{
    UpaConfig c;
    c.side = side;
    c.boresight_azimuth = boresight_azimuth;
    c.validate();
    return c;
}

UpaConfig UpaConfig::with_elements(int n, double boresight_azimuth)
{
    if (n < 1)
        throw std::invalid_argument("array must have at least one element");
    int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
    if (side * side != n)
        throw std::invalid_argument("array element count " + std::to_string(n) + " is not a perfect square");
    return square(side, boresight_azimuth);
}

namespace
{

// Phase (radians) of element (p, r) for direction (theta, phi), before the
// sign convention of a vs w is applied.
inline double element_phase(int p, int r, double cos_theta, double sin_theta_sin_phi, const UpaConfig& upa)
{
    return 2.0 * kPi * (p * cos_theta * upa.spacing_v + r * sin_theta_sin_phi * upa.spacing_h);
}

} // namespace

ComplexVector steering_vector(double theta, double phi, const UpaConfig& upa)
{
    upa.validate();
    const int n = upa.elements();
    const double norm = 1.0 / std::sqrt(static_cast<double>(n));
    const double ct = std::cos(theta);
    const double stsp = std::sin(theta) * std::sin(phi);
    ComplexVector a(static_cast<std::size_t>(n));
    for (int p = 0; p < upa.side; ++p)
        for (int r = 0; r < upa.side; ++r)
            a[static_cast<std::size_t>(p * upa.side + r)] = std::polar(norm, element_phase(p, r, ct, stsp, upa));
    return a;
}

ComplexVector weight_vector(double theta_s, double phi_s, const UpaConfig& upa)
{
    upa.validate();
    const int n = upa.elements();
    const double ct = std::cos(theta_s);
    const double stsp = std::sin(theta_s) * std::sin(phi_s);
    ComplexVector w(static_cast<std::size_t>(n));
    for (int p = 0; p < upa.side; ++p)
        for (int r = 0; r < upa.side; ++r)
            w[static_cast<std::size_t>(p * upa.side + r)] = std::polar(1.0, -element_phase(p, r, ct, stsp, upa));
    return w;
}

double array_factor_db(const ComplexVector& a, const ComplexVector& w)
{
    if (a.size() != w.size())
        throw std::invalid_argument("steering and weight vectors differ in length");
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t i = 0; i < a.size(); ++i)
        acc += a[i] * w[i];
    double power = std::norm(acc);
    if (power <= 1e-30)
        return -300.0;
    return 10.0 * std::log10(power);
}

double array_factor_db(const UpaConfig& upa, double theta, double phi, double theta_s, double phi_s)
{
    return array_factor_db(steering_vector(theta, phi, upa), weight_vector(theta_s, phi_s, upa));
}

void update_beam_steering(SteeringState& state, const UpaConfig& upa, const Vec3& self, const Vec3& peer, double t)
{
    Direction local = to_local(direction_between(self, peer), upa.boresight_azimuth);
    state.theta_s = local.zenith;
    state.phi_s = local.azimuth;
    state.last_update = t;
    state.weights = weight_vector(state.theta_s, state.phi_s, upa);
    ++state.version;
}

bool is_beam_refresh_time(double t, double period, double tol)
{
    if (period <= 0.0 || t < -tol)
        return false;
    double k = std::round(t / period);
    return std::abs(t - k * period) <= tol;
}

BeamformingMode parse_beamforming_mode(const std::string& s)
{
    if (s == "upa")
        return BeamformingMode::Upa;
    if (s == "sectored")
        return BeamformingMode::Sectored;
    throw std::invalid_argument("unknown beamforming mode '" + s + "' (expected upa|sectored)");
}

std::string to_string(BeamformingMode m)
{
    return m == BeamformingMode::Upa ? "upa" : "sectored";
}

void SectoredParams::validate() const
{
    if (!(beamwidth > 0.0 && beamwidth < 2.0 * kPi))
        throw std::invalid_argument("sectored beamwidth must lie in (0, 2*pi)");
    if (main_gain_db < side_gain_db)
        throw std::invalid_argument("sectored main-lobe gain must be >= side-lobe gain");
}

double sectored_gain_db(double angle_offset, const SectoredParams& params)
{
    return std::abs(angle_offset) <= params.beamwidth / 2.0 ? params.main_gain_db : params.side_gain_db;
}

double endpoint_gain_db(const UpaConfig& upa, const SteeringState& steering, const Vec3& self, const Vec3& peer,
                        BeamformingMode mode, const SectoredParams& sectored)
{
    if (!steering.valid())
        throw std::logic_error("beam gain requested before the first steering update");
    Direction local = to_local(direction_between(self, peer), upa.boresight_azimuth);
    if (mode == BeamformingMode::Sectored)
    {
        double offset = angular_separation(local, Direction{steering.theta_s, steering.phi_s});
        return sectored_gain_db(offset, sectored);
    }
    return array_factor_db(steering_vector(local.zenith, local.azimuth, upa), steering.weights);
}

double link_bf_gain_db(const UpaConfig& upa_i, const SteeringState& steer_i, const Vec3& pos_i,
                       const UpaConfig& upa_j, const SteeringState& steer_j, const Vec3& pos_j,
                       BeamformingMode mode, const SectoredParams& sectored)
{
    return endpoint_gain_db(upa_i, steer_i, pos_i, pos_j, mode, sectored) +
           endpoint_gain_db(upa_j, steer_j, pos_j, pos_i, mode, sectored);
}

} // namespace mmwsim
