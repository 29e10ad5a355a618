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


#include "mmwsim/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mmwsim
{

std::string to_string(LosCondition c)
{
    return c == LosCondition::Los ? "LOS" : "NLOS";
}

void PathlossParams::validate() const
{
    if (!(fc_ghz > 0.0))
        throw std::invalid_argument("carrier frequency must be positive");
    if (!(los_distance_coeff > 0.0) || !(nlos_distance_coeff > 0.0))
        throw std::invalid_argument("path loss distance coefficients must be positive");
    if (shadowing_std_los_db < 0.0 || shadowing_std_nlos_db < 0.0)
        throw std::invalid_argument("shadowing standard deviation must be non-negative");
    if (!(correlation_distance_los_m > 0.0) || !(correlation_distance_nlos_m > 0.0))
        throw std::invalid_argument("shadowing correlation distance must be positive");
}

double PathlossParams::shadowing_std_db(LosCondition c) const
{
    return c == LosCondition::Los ? shadowing_std_los_db : shadowing_std_nlos_db;
}

double PathlossParams::correlation_distance_m(LosCondition c) const
{
    return c == LosCondition::Los ? correlation_distance_los_m : correlation_distance_nlos_m;
}

double los_probability(double d2d)
{
    if (d2d < 0.0)
        throw std::invalid_argument("LOS probability: negative distance");
    if (d2d <= 18.0)
        return 1.0;
    double near = 18.0 / d2d;
    return near + std::exp(-d2d / 63.0) * (1.0 - near);
}

double pathloss_db(double d3d, double ue_height, LosCondition condition, const PathlossParams& params)
{
    if (!(d3d > 0.0))
        throw std::invalid_argument("path loss: 3D distance must be positive");
    const double d = std::max(d3d, 1.0);
    const double log_fc = std::log10(params.fc_ghz);
    const double los = params.los_intercept + params.los_distance_coeff * std::log10(d) + params.los_freq_coeff * log_fc;
    if (condition == LosCondition::Los)
        return los;
    const double nlos = params.nlos_intercept + params.nlos_distance_coeff * std::log10(d) +
                        params.nlos_freq_coeff * log_fc - params.nlos_ue_height_coeff * (ue_height - 1.5);
    return std::max(los, nlos);
}

LosState sample_los_state(double d2d, RandomStream& stream, double t)
{
    LosState s;
    s.condition = stream.bernoulli(los_probability(d2d)) ? LosCondition::Los : LosCondition::Nlos;
    s.last_update = t;
    return s;
}

double ShadowingProcess::sample(LosCondition condition, const Vec3& position, const PathlossParams& params,
                                RandomStream& stream)
{
    if (!params.shadowing_enabled)
        return 0.0;
    if (!last_position_ || !params.shadowing_correlated)
    {
        unit_state_ = stream.normal();
    }
    else
    {
        double moved = (position - *last_position_).norm();
        if (moved > 0.0)
        {
            double rho = std::exp(-moved / params.correlation_distance_m(condition));
            unit_state_ = rho * unit_state_ + std::sqrt(1.0 - rho * rho) * stream.normal();
        }
    }
    last_position_ = position;
    return unit_state_ * params.shadowing_std_db(condition);
}

} // namespace mmwsim
