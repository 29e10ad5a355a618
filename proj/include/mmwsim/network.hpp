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


#ifndef MMWSIM_NETWORK_HPP
#define MMWSIM_NETWORK_HPP

#include "mmwsim/beamforming.hpp"
#include "mmwsim/fading.hpp"
#include "mmwsim/link.hpp"
#include "mmwsim/mac.hpp"
#include "mmwsim/propagation.hpp"
#include "mmwsim/scenario.hpp"
#include "mmwsim/sim_engine.hpp"
#include "mmwsim/transport.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

namespace mmwsim
{

struct UeMetrics
{
    int ue = 0;
    std::uint64_t offered_bytes = 0;
    std::uint64_t delivered_bytes = 0;
    std::uint64_t dropped_bytes = 0;
    std::uint64_t dropped_packets = 0;
    std::uint64_t residual_bytes = 0;
    double throughput_bps = 0.0;
    int handovers = 0;
};

struct LossRecord
{
    double t = 0.0;
    int ue = 0;
    std::uint64_t seq = 0;
};

struct RunResult
{
    std::vector<UeMetrics> ues;
    LatencySummary mac;
    LatencySummary pdcp;
    std::uint64_t drops = 0;
    int handovers = 0;
    SimStats stats;
    FadingWork work;
    std::uint64_t slots = 0;
    std::uint64_t scheduled_slots = 0;
    double mean_sinr_db = 0.0; // over scheduled mmWave slots
    double fallback_time_s = 0.0;

    // TCP runs only
    std::vector<SlowStartExit> slow_start_exits;
    std::vector<LossRecord> losses;
    std::uint64_t retransmissions = 0;
    std::uint64_t timeouts = 0;

    double mean_throughput_bps() const;
};

// State seen by one slot's SINR evaluation, for external re-computation.
struct ProbeTransmission
{
    int bs = 0;
    int ue = 0;
    Direction bs_steering; // (theta_s, phi_s) of the BS beam, panel frame
    Direction ue_steering; // (theta_s, phi_s) of the UE beam, panel frame
    double sinr_linear = 0.0;
};

struct ProbeLink
{
    int bs = 0;
    int ue = 0;
    LosCondition condition = LosCondition::Los;
    double shadowing_db = 0.0;
    double fading = 1.0;
    std::optional<double> scm_gain_db; // combined fading+beamforming gain on the SCM path
};

struct SlotProbe
{
    double t = 0.0;
    std::vector<Vec3> positions; // per node id
    std::vector<ProbeTransmission> transmissions;
    std::vector<ProbeLink> links; // every link evaluated in the slot
};

class Network
{
  public:
    Network(const ScenarioConfig& config, std::uint64_t seed);
    ~Network();

    const ScenarioConfig& config() const { return config_; }
    const Deployment& deployment() const { return deployment_; }

    void set_probe(std::function<void(const SlotProbe&)> probe) { probe_ = std::move(probe); }
    void set_trace(Simulator::TraceHook hook) { sim_.set_trace(std::move(hook)); }

    RunResult run();

  private:
    enum EventKind : std::uint32_t
    {
        kSlot = 1,
        kUdpEmit,
        kTcpArrive,
        kTcpAck,
        kTcpTimer,
    };

    struct LinkState
    {
        double los_draw = 0.0;
        LosCondition condition = LosCondition::Los;
        double shadowing_db = 0.0;
        double pathloss_db = 0.0; // with shadowing
        double rx_base_mw = 0.0;  // P_tx * 10^(-pathloss/10)
        ShadowingProcess shadowing;
        std::unique_ptr<RandomStream> shadow_stream;
        std::unique_ptr<RandomStream> fading_stream;
    };

    struct UeState
    {
        int node = 0;
        int serving = -1;
        SteeringState ue_beam;
        SteeringState bs_beam; // beam of the serving BS toward this UE
        RlcBuffer buffer;
        UdpSource udp;
        double udp_phase = 0.0;
        UeMetrics metrics;
        double fallback_credit_bits = 0.0;
    };

    void handle(const Event& ev);
    void on_slot(std::uint64_t k);
    void update_positions(double t);
    void update_large_scale(double t, bool first);
    void update_pathloss();
    void run_handover(double t, bool first);
    void refresh_beam(UeState& ue, double t);
    double max_bf_gain_db() const;
    double analytic_gain_linear(int bs, int scheduled_ue, int victim_ue);
    double evaluate_link(int bs, int scheduled_ue, int victim_ue, double t, ProbeLink* record);
    void deliver(UeState& ue, std::vector<Packet>& packets, double t_end);
    void serve_fallback(double t, double t_end);
    void tcp_send(const std::vector<TcpSegment>& segments, double now);
    void tcp_rearm(double now);

    LinkState& link(int bs_index, int ue_index) { return links_[static_cast<std::size_t>(bs_index * n_ue_ + ue_index)]; }
    std::uint64_t link_id(int bs_index, int ue_index) const;
    int bs_index(int node) const;

    ScenarioConfig config_;
    std::uint64_t seed_;
    Simulator sim_;
    Deployment deployment_;
    ModelSelector selector_;
    std::unique_ptr<ChannelModel> channel_;
    NoiseConfig noise_;
    double noise_mw_ = 0.0;
    FrameConfig frame_;
    std::uint64_t beam_slots_ = 1;
    std::uint64_t epoch_slots_ = 1;
    std::uint64_t total_slots_ = 0;

    int n_bs_ = 0;
    int n_ue_ = 0;
    std::vector<Vec3> positions_;
    std::vector<LinkState> links_;
    std::vector<UeState> ues_;
    std::vector<RoundRobin> schedulers_; // per mmWave BS
    std::unordered_map<std::uint64_t, double> gain_cache_;
    std::vector<Vec3> last_large_scale_pos_;

    LatencyTracker latency_;
    std::uint64_t next_packet_id_ = 1;
    std::uint64_t slots_ = 0;
    std::uint64_t scheduled_slots_ = 0;
    double sinr_db_sum_ = 0.0;
    std::uint64_t fallback_slots_ = 0;
    int handovers_ = 0;

    std::unique_ptr<TcpSender> tcp_;
    TcpReceiver tcp_rx_;
    std::unordered_map<std::uint64_t, TcpSegment> in_transit_;
    struct PendingAck
    {
        std::uint64_t ack;
        double echo;
    };
    std::unordered_map<std::uint64_t, PendingAck> acks_;
    std::uint64_t next_msg_id_ = 1;
    double tcp_timer_at_ = -1.0;
    std::uint64_t timer_generation_ = 0;
    std::vector<LossRecord> losses_;

    std::function<void(const SlotProbe&)> probe_;
};

// Convenience wrapper: build, run, return.
RunResult simulate_once(const ScenarioConfig& config, std::uint64_t seed);

} // namespace mmwsim

#endif
