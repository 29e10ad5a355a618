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


#ifndef MMWSIM_BEAMFORMING_HPP
#define MMWSIM_BEAMFORMING_HPP

#include "mmwsim/geometry.hpp"

#include <complex>
#include <string>
#include <vector>

namespace mmwsim
{

using ComplexVector = std::vector<std::complex<double>>;

// Square uniform planar array of isotropic elements. Element (p, r) sits on
// row p (vertical axis) and column r (horizontal axis); spacings are in
// wavelengths. Elements are stored row-major: index = p * side + r.
struct UpaConfig
{
    int side = 1;
    double spacing_v = 0.5;
    double spacing_h = 0.5;
    double boresight_azimuth = 0.0; // global azimuth of the panel normal

    int elements() const { return side * side; }
    void validate() const;

    static UpaConfig square(int side, double boresight_azimuth = 0.0);
    // Accepts only perfect squares; throws otherwise.
    static UpaConfig with_elements(int n, double boresight_azimuth = 0.0);
};

// a(theta, phi): unit-norm phase progression across the panel for a plane
// wave arriving from local direction (theta, phi).
ComplexVector steering_vector(double theta, double phi, const UpaConfig& upa);

// w(theta_s, phi_s): unit-modulus weights that steer the panel toward
// (theta_s, phi_s). ||w||^2 = n.
ComplexVector weight_vector(double theta_s, double phi_s, const UpaConfig& upa);

// 10 log10 |a . w^T|^2 (no conjugation; w already carries the conjugate
// phases). Floors at -300 dB for exact nulls.
double array_factor_db(const ComplexVector& a, const ComplexVector& w);
double array_factor_db(const UpaConfig& upa, double theta, double phi, double theta_s, double phi_s);

// Per-endpoint beam state. `weights` caches w(theta_s, phi_s) so the gain
// evaluation does not rebuild it.
struct SteeringState
{
    double theta_s = kPi / 2.0;
    double phi_s = 0.0;
    double last_update = -1.0;
    double period = 0.020;
    ComplexVector weights;
    unsigned version = 0;

    bool valid() const { return !weights.empty(); }
};

// Points `state` at the geometric LOS direction from `self` to `peer`
// (expressed in the panel frame of `upa`) and stamps it with time t.
void update_beam_steering(SteeringState& state, const UpaConfig& upa, const Vec3& self, const Vec3& peer, double t);

// True when t falls on a refresh instant k*period (k >= 0) within `tol`.
bool is_beam_refresh_time(double t, double period, double tol = 1e-12);

enum class BeamformingMode
{
    Upa,
    Sectored,
};

BeamformingMode parse_beamforming_mode(const std::string& s);
std::string to_string(BeamformingMode m);

struct SectoredParams
{
    double beamwidth = 30.0 * kPi / 180.0; // main-lobe width theta_b
    double main_gain_db = 18.0;            // G_M
    double side_gain_db = -2.0;            // G_m

    void validate() const;
};

// Gain of one endpoint: G_M inside the main lobe (|offset| <= theta_b / 2),
// G_m elsewhere.
double sectored_gain_db(double angle_offset, const SectoredParams& params);

// Gain of one endpoint of a link: array factor of `upa` toward `peer`
// (seen from `self`) with the endpoint's current steering, or the sectored
// approximation of the same pointing error.
double endpoint_gain_db(const UpaConfig& upa, const SteeringState& steering, const Vec3& self, const Vec3& peer,
                        BeamformingMode mode, const SectoredParams& sectored);

// G_ij = A_i + A_j in dB. For an interferer, pass the interferer's own
// steering (toward its served peer) and the victim's steering (toward its
// serving node).
double link_bf_gain_db(const UpaConfig& upa_i, const SteeringState& steer_i, const Vec3& pos_i,
                       const UpaConfig& upa_j, const SteeringState& steer_j, const Vec3& pos_j,
                       BeamformingMode mode = BeamformingMode::Upa, const SectoredParams& sectored = {});

} // namespace mmwsim

#endif
