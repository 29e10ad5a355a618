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


#ifndef MMWSIM_SCENARIO_HPP
#define MMWSIM_SCENARIO_HPP

#include "mmwsim/beamforming.hpp"
#include "mmwsim/fading.hpp"
#include "mmwsim/link.hpp"
#include "mmwsim/propagation.hpp"
#include "mmwsim/sim_engine.hpp"

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace mmwsim
{

enum class ScenarioKind
{
    UdpGrid,
    TcpLine,
};

ScenarioKind parse_scenario_kind(const std::string& s);
std::string to_string(ScenarioKind k);

// One simulation cell: a single scenario, load point, buffer size and
// channel model. Defaults follow the full-scale experiment.
struct ScenarioConfig
{
    ScenarioKind kind = ScenarioKind::UdpGrid;
    std::string name;        // scenario id in the CSV; defaults to the kind
    std::string model = "simple-A";

    int n_ue_per_bs = 2;
    double udp_rate_bps = 4e8;
    int packet_bytes = 1400;
    std::uint64_t b_rlc_bytes = 10'000'000;
    double duration_s = 10.0;
    std::vector<std::uint64_t> seeds;

    double carrier_hz = 28e9;
    double bandwidth_hz = 1e9;
    double beam_period_s = 0.020;
    double bs_tx_power_dbm = 30.0;
    double bs_height_m = 10.0;
    double ue_height_m = 1.5;

    double disc_radius_m = 100.0;
    double square_side_m = 200.0;

    double ue_speed_mps = 2.0;
    double path_length_m = 100.0;
    std::vector<double> bs_offsets_m = {25.0, 50.0, 75.0};
    double bs_lateral_m = 20.0;
    double fallback_rate_bps = 10e6;

    int bs_array_side = 8;
    int ue_array_side = 2;
    BeamformingMode beamforming = BeamformingMode::Upa;
    SectoredParams sectored;

    PathlossParams pathloss;
    ScmConfig scm;
    double noise_figure_db = 5.0;
    double noise_density_dbm_hz = -174.0;
    RateMap rate_map;
    double slot_duration_s = 125e-6;
    int symbols_per_slot = 14;
    int control_symbols = 2;

    double hysteresis_db = 3.0;
    double epoch_s = 0.1; // LOS, shadowing and serving-cell updates

    int mss_bytes = 1400;
    int initial_cwnd_mss = 10;
    double core_delay_s = 5e-3;
    double uplink_delay_s = 0.5e-3;
    std::uint64_t max_window_bytes = 1ULL << 30;
    double min_rto_s = 0.2;

    bool strict = true;

    void validate() const;
    std::string scenario_id() const { return name.empty() ? to_string(kind) : name; }
    NoiseConfig noise() const;
    FrameConfig frame() const;
    double wavelength_m() const;
};

// A config file may list several models, buffer sizes or loads; the matrix
// expands to one ScenarioConfig per combination, in declaration order
// (load, buffer, model).
struct ConfigMatrix
{
    ScenarioConfig base;
    std::vector<std::string> models;
    std::vector<std::uint64_t> b_rlc_bytes;
    std::vector<int> n_ue_per_bs;

    std::vector<ScenarioConfig> cells() const;
};

// Throws std::invalid_argument with the offending key on unknown keys,
// wrong types or out-of-range values.
ConfigMatrix parse_config(const std::string& text, const std::string& origin = "<config>");
ConfigMatrix load_config(const std::string& path);

enum class NodeRole
{
    Bs,
    Ue,
    FallbackBs,
};

struct NodeState
{
    int id = 0;
    NodeRole role = NodeRole::Bs;
    Vec3 position;
    Vec3 velocity;
    double tx_power_dbm = 0.0;
    UpaConfig array;
    double travel_limit_m = std::numeric_limits<double>::infinity();
};

// Linear motion from the initial position, stopping after travel_limit_m.
// Throws on t < 0.
Vec3 position_at(const NodeState& node, double t);

struct Deployment
{
    std::vector<NodeState> nodes; // indexed by id
    std::vector<int> bs_ids;      // mmWave base stations
    std::vector<int> ue_ids;
    int fallback_id = -1;
    std::vector<int> home_bs;     // per UE (same order as ue_ids): BS whose disc it was placed in

    const NodeState& node(int id) const { return nodes.at(static_cast<std::size_t>(id)); }
};

// Five BSs at the centre and corners of a square, n_ue_per_bs UEs dropped
// uniformly in a disc around each. Strict configs accept only 2, 5 or 10
// UEs per BS.
Deployment build_udp_scenario(const ScenarioConfig& config, RandomStream& placement);

// One UE walking a straight segment past the mmWave BSs, plus a fallback BS.
Deployment build_tcp_scenario(const ScenarioConfig& config);

Deployment build_deployment(const ScenarioConfig& config, RandomStream& placement);

} // namespace mmwsim

#endif
