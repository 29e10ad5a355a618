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


#ifndef MMWSIM_PROPAGATION_HPP
#define MMWSIM_PROPAGATION_HPP

#include "mmwsim/geometry.hpp"
#include "mmwsim/sim_engine.hpp"

#include <optional>
#include <string>

namespace mmwsim
{

enum class LosCondition
{
    Los,
    Nlos,
};

std::string to_string(LosCondition c);

struct LosState
{
    LosCondition condition = LosCondition::Los;
    double shadowing_db = 0.0;
    double last_update = 0.0;
};

// Urban-macro path loss. The constants default to the 3GPP UMa values and
// can be overridden from the config for other environments:
//   LOS:  PL = los_intercept + los_distance_coeff*log10(d3D) + los_freq_coeff*log10(fc)
//   NLOS: PL = max(PL_LOS, nlos_intercept + nlos_distance_coeff*log10(d3D)
//                         + nlos_freq_coeff*log10(fc) - nlos_ue_height_coeff*(h_UT - 1.5))
struct PathlossParams
{
    double fc_ghz = 28.0;

    double los_intercept = 28.0;
    double los_distance_coeff = 22.0;
    double los_freq_coeff = 20.0;

    double nlos_intercept = 13.54;
    double nlos_distance_coeff = 39.08;
    double nlos_freq_coeff = 20.0;
    double nlos_ue_height_coeff = 0.6;

    bool shadowing_enabled = true;
    bool shadowing_correlated = true;
    double shadowing_std_los_db = 4.0;
    double shadowing_std_nlos_db = 6.0;
    double correlation_distance_los_m = 37.0;
    double correlation_distance_nlos_m = 50.0;

    void validate() const;
    double shadowing_std_db(LosCondition c) const;
    double correlation_distance_m(LosCondition c) const;
};

// Outdoor UMa LOS probability (UE height <= 13 m). Throws on d2d < 0.
double los_probability(double d2d);

// Path loss without shadowing. Distances below 1 m are evaluated at 1 m so
// the log terms never turn the loss negative. Throws on d3D <= 0.
double pathloss_db(double d3d, double ue_height, LosCondition condition, const PathlossParams& params);

// Bernoulli draw of the LOS condition at 2D distance d2d. The shadowing
// value of the returned state is left at zero; ShadowingProcess owns it.
LosState sample_los_state(double d2d, RandomStream& stream, double t);

// Zero-mean Gaussian shadowing in dB. With correlation enabled successive
// samples along a trajectory follow exp(-dd / d_corr) autocorrelation; the
// underlying standard-normal state is shared across LOS/NLOS changes and
// scaled by the per-condition deviation.
class ShadowingProcess
{
  public:
    double sample(LosCondition condition, const Vec3& position, const PathlossParams& params, RandomStream& stream);
    void reset() { last_position_.reset(); }

  private:
    std::optional<Vec3> last_position_;
    double unit_state_ = 0.0;
};

} // namespace mmwsim

#endif
