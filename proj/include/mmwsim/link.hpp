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


#ifndef MMWSIM_LINK_HPP
#define MMWSIM_LINK_HPP

#include "mmwsim/fading.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace mmwsim
{

double dbm_to_mw(double dbm);
double mw_to_dbm(double mw);

struct NoiseConfig
{
    double density_dbm_hz = -174.0;
    double noise_figure_db = 5.0;
    double bandwidth_hz = 1e9;

    void validate() const;
    double noise_dbm() const;
    double noise_mw() const { return dbm_to_mw(noise_dbm()); }
};

// Truncated Shannon map from SINR to spectral efficiency.
struct RateMap
{
    double se_cap = 8.0;        // bit/s/Hz
    double sinr_floor_db = -5.0; // below this the link carries nothing

    void validate() const;
};

struct FrameConfig
{
    double slot_duration_s = 125e-6;
    int symbols_per_slot = 14;
    int control_symbols = 2;
    double bandwidth_hz = 1e9;

    void validate() const;
    double symbol_duration_s() const { return slot_duration_s / symbols_per_slot; }
    int data_symbols() const { return symbols_per_slot - control_symbols; }
};

// One transmitter's contribution at a receiver. A term without a channel
// sample cannot be evaluated.
struct ReceivedTerm
{
    double tx_power_dbm = 0.0;
    std::optional<ChannelSample> sample;

    double received_mw() const;
};

// Linear SINR: signal / (noise + sum of interferers). Throws
// std::logic_error when any term lacks a channel sample.
double sinr_linear(const ReceivedTerm& serving, const std::vector<ReceivedTerm>& interferers,
                   const NoiseConfig& noise);
double sinr_db(const ReceivedTerm& serving, const std::vector<ReceivedTerm>& interferers, const NoiseConfig& noise);

double spectral_efficiency(double sinr_db, const RateMap& map);

std::uint64_t transport_block_bits(double se, int symbols, const FrameConfig& frame);

} // namespace mmwsim

#endif
