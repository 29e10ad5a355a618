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


#include "mmwsim/link.hpp"

#include <cmath>
#include <stdexcept>

namespace mmwsim
{

double dbm_to_mw(double dbm)
{
    return std::pow(10.0, dbm / 10.0);
}

double mw_to_dbm(double mw)
{
    return 10.0 * std::log10(mw);
}

void NoiseConfig::validate() const
{
    if (!(bandwidth_hz > 0.0))
        throw std::invalid_argument("noise bandwidth must be positive");
    if (!std::isfinite(density_dbm_hz) || !std::isfinite(noise_figure_db))
        throw std::invalid_argument("noise density and noise figure must be finite");
}

double NoiseConfig::noise_dbm() const
{
    return density_dbm_hz + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
}

void RateMap::validate() const
{
    if (!(se_cap > 0.0))
        throw std::invalid_argument("spectral efficiency cap must be positive");
    if (!std::isfinite(sinr_floor_db))
        throw std::invalid_argument("SINR floor must be finite");
}

void FrameConfig::validate() const
{
    if (!(slot_duration_s > 0.0))
        throw std::invalid_argument("slot duration must be positive");
    if (symbols_per_slot < 1 || control_symbols < 0 || data_symbols() <= 0)
        throw std::invalid_argument("a slot needs at least one data symbol");
    if (!(bandwidth_hz > 0.0))
        throw std::invalid_argument("bandwidth must be positive");
}

double ReceivedTerm::received_mw() const
{
    if (!sample)
        throw std::logic_error("received power requested for a link without a channel sample");
    return dbm_to_mw(tx_power_dbm) * sample->total_gain_linear();
}

double sinr_linear(const ReceivedTerm& serving, const std::vector<ReceivedTerm>& interferers,
                   const NoiseConfig& noise)
{
    double denom = noise.noise_mw();
    for (const auto& term : interferers)
        denom += term.received_mw();
    return serving.received_mw() / denom;
}

double sinr_db(const ReceivedTerm& serving, const std::vector<ReceivedTerm>& interferers, const NoiseConfig& noise)
{
    return 10.0 * std::log10(sinr_linear(serving, interferers, noise));
}

double spectral_efficiency(double sinr_db, const RateMap& map)
{
    if (!(sinr_db >= map.sinr_floor_db))
        return 0.0;
    return std::min(std::log2(1.0 + std::pow(10.0, sinr_db / 10.0)), map.se_cap);
}

std::uint64_t transport_block_bits(double se, int symbols, const FrameConfig& frame)
{
    if (symbols < 0)
        throw std::invalid_argument("symbol count must be non-negative");
    if (!(se > 0.0) || symbols == 0)
        return 0;
    // The small guard keeps exact products such as 8 * 1e9 * 4.46e-6 from
    // flooring one bit short after rounding.
    return static_cast<std::uint64_t>(std::floor(se * frame.bandwidth_hz * frame.symbol_duration_s() * symbols + 1e-6));
}

} // namespace mmwsim
