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


#include "mmwsim/network.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mmwsim
{

double RunResult::mean_throughput_bps() const
{
    if (ues.empty())
        return 0.0;
    double s = 0.0;
    for (const auto& u : ues)
        s += u.throughput_bps;
    return s / static_cast<double>(ues.size());
}

namespace
{

std::uint64_t slots_per(double period, double slot)
{
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(period / slot)));
}

} // namespace

Network::Network(const ScenarioConfig& config, std::uint64_t seed)
    : config_(config), seed_(seed), sim_(seed), selector_(parse_model_selector(config.model))
{
    config_.validate();
    channel_ = make_channel_model(selector_, config_.scm);
    noise_ = config_.noise();
    noise_mw_ = noise_.noise_mw();
    frame_ = config_.frame();
    beam_slots_ = slots_per(config_.beam_period_s, frame_.slot_duration_s);
    epoch_slots_ = slots_per(config_.epoch_s, frame_.slot_duration_s);
    total_slots_ = static_cast<std::uint64_t>(std::ceil(config_.duration_s / frame_.slot_duration_s - 1e-9));

    RandomStream placement = sim_.rng_stream("placement");
    deployment_ = build_deployment(config_, placement);
    n_bs_ = static_cast<int>(deployment_.bs_ids.size());
    n_ue_ = static_cast<int>(deployment_.ue_ids.size());
    for (const auto& n : deployment_.nodes)
        positions_.push_back(n.position);

    links_.resize(static_cast<std::size_t>(n_bs_ * n_ue_));
    for (int b = 0; b < n_bs_; ++b)
        for (int u = 0; u < n_ue_; ++u)
        {
            std::string tag = std::to_string(b) + "-" + std::to_string(u);
            LinkState& l = link(b, u);
            l.los_draw = sim_.rng_stream("los/" + tag).uniform();
            l.shadow_stream = std::make_unique<RandomStream>(sim_.rng_stream("shadow/" + tag));
            l.fading_stream = std::make_unique<RandomStream>(sim_.rng_stream("fading/" + tag));
        }

    UdpSource udp{config_.udp_rate_bps, config_.packet_bytes};
    udp.validate();
    for (int u = 0; u < n_ue_; ++u)
    {
        UeState st{deployment_.ue_ids[static_cast<std::size_t>(u)], -1, {}, {}, RlcBuffer(config_.b_rlc_bytes), udp, 0.0, {}};
        st.ue_beam.period = config_.beam_period_s;
        st.bs_beam.period = config_.beam_period_s;
        st.udp_phase = sim_.rng_stream("traffic/" + std::to_string(u)).uniform(0.0, udp.interval_s());
        st.metrics.ue = st.node;
        ues_.push_back(std::move(st));
    }
    schedulers_.resize(static_cast<std::size_t>(n_bs_));

    if (config_.kind == ScenarioKind::TcpLine)
    {
        TcpConfig tc;
        tc.mss_bytes = config_.mss_bytes;
        tc.initial_cwnd_mss = config_.initial_cwnd_mss;
        tc.max_window_bytes = config_.max_window_bytes;
        tc.min_rto_s = config_.min_rto_s;
        tcp_ = std::make_unique<TcpSender>(tc);
    }
    sim_.set_handler([this](const Event& ev) { handle(ev); });
}

Network::~Network() = default;

std::uint64_t Network::link_id(int bs_index, int ue_index) const
{
    return static_cast<std::uint64_t>(bs_index) * static_cast<std::uint64_t>(n_ue_) + static_cast<std::uint64_t>(ue_index);
}

int Network::bs_index(int node) const
{
    for (int b = 0; b < n_bs_; ++b)
        if (deployment_.bs_ids[static_cast<std::size_t>(b)] == node)
            return b;
    return -1;
}

double Network::max_bf_gain_db() const
{
    if (config_.beamforming == BeamformingMode::Sectored)
        return 2.0 * config_.sectored.main_gain_db;
    return 10.0 * std::log10(static_cast<double>(UpaConfig::square(config_.bs_array_side).elements()) *
                             UpaConfig::square(config_.ue_array_side).elements());
}

RunResult Network::run()
{
    sim_.schedule(0.0, kSlot, 0, 0);
    if (config_.kind == ScenarioKind::UdpGrid)
    {
        for (int u = 0; u < n_ue_; ++u)
            if (ues_[static_cast<std::size_t>(u)].udp_phase < config_.duration_s)
                sim_.schedule(ues_[static_cast<std::size_t>(u)].udp_phase, kUdpEmit, static_cast<std::uint32_t>(u), 0);
    }
    else
    {
        tcp_send(tcp_->start(0.0), 0.0);
        tcp_rearm(0.0);
    }

    RunResult r;
    r.stats = sim_.run_until(config_.duration_s);

    for (auto& ue : ues_)
    {
        UeMetrics m = ue.metrics;
        m.dropped_bytes = ue.buffer.dropped_bytes();
        m.dropped_packets = ue.buffer.dropped_packets();
        m.residual_bytes = ue.buffer.occupancy();
        m.delivered_bytes = config_.kind == ScenarioKind::TcpLine ? tcp_rx_.delivered_bytes() : ue.buffer.delivered_bytes();
        m.throughput_bps = m.delivered_bytes * 8.0 / config_.duration_s;
        r.drops += m.dropped_packets;
        r.ues.push_back(m);
    }
    r.mac = latency_.mac();
    r.pdcp = latency_.pdcp();
    r.handovers = handovers_;
    r.work = channel_->work();
    r.slots = slots_;
    r.scheduled_slots = scheduled_slots_;
    r.mean_sinr_db = scheduled_slots_ ? sinr_db_sum_ / static_cast<double>(scheduled_slots_) : 0.0;
    r.fallback_time_s = static_cast<double>(fallback_slots_) * frame_.slot_duration_s;
    if (tcp_)
    {
        r.slow_start_exits = tcp_->slow_start_exits();
        r.retransmissions = tcp_->retransmissions();
        r.timeouts = tcp_->timeouts();
        r.losses = losses_;
    }
    return r;
}

void Network::handle(const Event& ev)
{
    switch (ev.kind)
    {
    case kSlot:
        on_slot(ev.arg);
        break;
    case kUdpEmit: {
        UeState& ue = ues_[ev.target];
        Packet p;
        p.id = next_packet_id_++;
        p.bytes = static_cast<std::uint32_t>(ue.udp.packet_bytes);
        p.seq = ev.arg;
        p.origin_time = ev.fire_time;
        ue.metrics.offered_bytes += p.bytes;
        ue.buffer.enqueue(p, ev.fire_time);
        double next = ue.udp_phase + static_cast<double>(ev.arg + 1) * ue.udp.interval_s();
        if (next <= config_.duration_s)
            sim_.schedule(next, kUdpEmit, ev.target, ev.arg + 1);
        break;
    }
    case kTcpArrive: {
        auto it = in_transit_.find(ev.arg);
        TcpSegment seg = it->second;
        in_transit_.erase(it);
        UeState& ue = ues_.front();
        Packet p;
        p.id = next_packet_id_++;
        p.bytes = seg.len;
        p.seq = seg.seq;
        p.origin_time = seg.sent_at;
        ue.metrics.offered_bytes += p.bytes;
        if (!ue.buffer.enqueue(p, ev.fire_time))
            losses_.push_back({ev.fire_time, 0, seg.seq});
        break;
    }
    case kTcpAck: {
        auto it = acks_.find(ev.arg);
        PendingAck a = it->second;
        acks_.erase(it);
        tcp_send(tcp_->on_ack(a.ack, a.echo, ev.fire_time), ev.fire_time);
        tcp_rearm(ev.fire_time);
        break;
    }
    case kTcpTimer: {
        if (ev.arg != timer_generation_)
            break;
        tcp_timer_at_ = -1.0;
        double deadline = tcp_->rto_deadline();
        if (deadline < 0.0)
            break;
        if (deadline > ev.fire_time)
        {
            tcp_rearm(ev.fire_time);
            break;
        }
        tcp_send(tcp_->on_timeout(ev.fire_time), ev.fire_time);
        tcp_rearm(ev.fire_time);
        break;
    }
    default:
        throw std::logic_error("unknown event kind " + std::to_string(ev.kind));
    }
}

void Network::tcp_send(const std::vector<TcpSegment>& segments, double now)
{
    for (const auto& seg : segments)
    {
        std::uint64_t id = next_msg_id_++;
        in_transit_.emplace(id, seg);
        sim_.schedule(now + config_.core_delay_s, kTcpArrive, 0, id);
    }
}

void Network::tcp_rearm(double now)
{
    double deadline = tcp_->rto_deadline();
    if (deadline < 0.0)
        return;
    if (tcp_timer_at_ >= 0.0 && tcp_timer_at_ <= deadline)
        return; // the pending timer event fires first and re-checks
    tcp_timer_at_ = std::max(deadline, now);
    sim_.schedule(tcp_timer_at_, kTcpTimer, 0, ++timer_generation_);
}

void Network::update_positions(double t)
{
    for (const auto& n : deployment_.nodes)
        positions_[static_cast<std::size_t>(n.id)] = position_at(n, t);
}

void Network::update_large_scale(double t, bool first)
{
    (void)t;
    if (last_large_scale_pos_.empty())
        last_large_scale_pos_.assign(static_cast<std::size_t>(n_ue_), Vec3{});
    for (int u = 0; u < n_ue_; ++u)
    {
        const Vec3& pu = positions_[static_cast<std::size_t>(ues_[static_cast<std::size_t>(u)].node)];
        if (!first && pu == last_large_scale_pos_[static_cast<std::size_t>(u)])
            continue;
        last_large_scale_pos_[static_cast<std::size_t>(u)] = pu;
        for (int b = 0; b < n_bs_; ++b)
        {
            LinkState& l = link(b, u);
            const Vec3& pb = positions_[static_cast<std::size_t>(deployment_.bs_ids[static_cast<std::size_t>(b)])];
            l.condition = l.los_draw < los_probability(distance_2d(pb, pu)) ? LosCondition::Los : LosCondition::Nlos;
            l.shadowing_db = l.shadowing.sample(l.condition, pu, config_.pathloss, *l.shadow_stream);
        }
    }
}

void Network::update_pathloss()
{
    for (int b = 0; b < n_bs_; ++b)
    {
        const NodeState& bs = deployment_.node(deployment_.bs_ids[static_cast<std::size_t>(b)]);
        const Vec3& pb = positions_[static_cast<std::size_t>(bs.id)];
        for (int u = 0; u < n_ue_; ++u)
        {
            LinkState& l = link(b, u);
            const Vec3& pu = positions_[static_cast<std::size_t>(ues_[static_cast<std::size_t>(u)].node)];
            l.pathloss_db = pathloss_db(distance_3d(pb, pu), pu.z, l.condition, config_.pathloss) + l.shadowing_db;
            l.rx_base_mw = dbm_to_mw(bs.tx_power_dbm - l.pathloss_db);
        }
    }
}

void Network::refresh_beam(UeState& ue, double t)
{
    int b = bs_index(ue.serving);
    if (b < 0)
        return;
    const NodeState& bs = deployment_.node(ue.serving);
    const NodeState& node = deployment_.node(ue.node);
    const Vec3& pb = positions_[static_cast<std::size_t>(bs.id)];
    const Vec3& pu = positions_[static_cast<std::size_t>(ue.node)];
    update_beam_steering(ue.bs_beam, bs.array, pb, pu, t);
    update_beam_steering(ue.ue_beam, node.array, pu, pb, t);
}

void Network::run_handover(double t, bool first)
{
    const double bf = max_bf_gain_db();
    for (int u = 0; u < n_ue_; ++u)
    {
        UeState& ue = ues_[static_cast<std::size_t>(u)];
        std::vector<CellMeasurement> cells;
        for (int b = 0; b < n_bs_; ++b)
        {
            const NodeState& bs = deployment_.node(deployment_.bs_ids[static_cast<std::size_t>(b)]);
            double rx_dbm = bs.tx_power_dbm + bf - link(b, u).pathloss_db;
            cells.push_back({bs.id, rx_dbm - noise_.noise_dbm()});
        }
        int chosen = select_serving_bs(cells, ue.serving, config_.hysteresis_db, config_.rate_map.sinr_floor_db,
                                       deployment_.fallback_id);
        if (chosen == ue.serving)
            continue;
        int old_b = bs_index(ue.serving);
        if (old_b >= 0)
            schedulers_[static_cast<std::size_t>(old_b)].remove(u);
        int new_b = bs_index(chosen);
        if (new_b >= 0)
            schedulers_[static_cast<std::size_t>(new_b)].add(u);
        if (!first)
        {
            ++handovers_;
            ++ue.metrics.handovers;
        }
        ue.serving = chosen;
        refresh_beam(ue, t);
        gain_cache_.clear();
    }
}

double Network::analytic_gain_linear(int b, int scheduled_ue, int victim_ue)
{
    std::uint64_t key = (static_cast<std::uint64_t>(b) * n_ue_ + static_cast<std::uint64_t>(scheduled_ue)) * n_ue_ +
                        static_cast<std::uint64_t>(victim_ue);
    auto it = gain_cache_.find(key);
    if (it != gain_cache_.end())
        return it->second;
    const NodeState& bs = deployment_.node(deployment_.bs_ids[static_cast<std::size_t>(b)]);
    const UeState& sched = ues_[static_cast<std::size_t>(scheduled_ue)];
    const UeState& victim = ues_[static_cast<std::size_t>(victim_ue)];
    double g_db = link_bf_gain_db(bs.array, sched.bs_beam, positions_[static_cast<std::size_t>(bs.id)],
                                  deployment_.node(victim.node).array, victim.ue_beam,
                                  positions_[static_cast<std::size_t>(victim.node)], config_.beamforming,
                                  config_.sectored);
    double g = std::pow(10.0, g_db / 10.0);
    gain_cache_.emplace(key, g);
    return g;
}

double Network::evaluate_link(int b, int scheduled_ue, int victim_ue, double t, ProbeLink* record)
{
    LinkState& l = link(b, victim_ue);
    const NodeState& bs = deployment_.node(deployment_.bs_ids[static_cast<std::size_t>(b)]);
    const UeState& sched = ues_[static_cast<std::size_t>(scheduled_ue)];
    const UeState& victim = ues_[static_cast<std::size_t>(victim_ue)];
    const NodeState& victim_node = deployment_.node(victim.node);

    LinkContext ctx;
    ctx.link_id = link_id(b, victim_ue);
    ctx.condition = l.condition;
    ctx.pathloss_db = l.pathloss_db;

    double received = 0.0;
    if (channel_->kind() == ChannelModelKind::Simple)
    {
        ChannelSample s = channel_->sample(ctx, t, *l.fading_stream);
        received = l.rx_base_mw * analytic_gain_linear(b, scheduled_ue, victim_ue) * s.fading;
        if (record)
            *record = {b, victim_ue, l.condition, l.shadowing_db, s.fading, std::nullopt};
    }
    else
    {
        ctx.tx_array = &bs.array;
        ctx.rx_array = &victim_node.array;
        ctx.tx_weights = &sched.bs_beam.weights;
        ctx.rx_weights = &victim.ue_beam.weights;
        ctx.tx_position = positions_[static_cast<std::size_t>(bs.id)];
        ctx.rx_position = positions_[static_cast<std::size_t>(victim.node)];
        bool moving = victim_node.velocity.norm() > 0.0 &&
                      victim_node.velocity.norm() * t < victim_node.travel_limit_m;
        ctx.rx_velocity = moving ? victim_node.velocity : Vec3{};
        ctx.wavelength_m = config_.wavelength_m();
        ChannelSample s = channel_->sample(ctx, t, *l.fading_stream);
        received = l.rx_base_mw * std::pow(10.0, s.bf_gain_db / 10.0);
        if (record)
            *record = {b, victim_ue, l.condition, l.shadowing_db, 1.0, s.bf_gain_db};
    }
    return received;
}

void Network::deliver(UeState& ue, std::vector<Packet>& packets, double t_end)
{
    for (const auto& p : packets)
    {
        latency_.record(p);
        if (tcp_)
        {
            std::uint64_t ack = tcp_rx_.on_segment(p.seq, p.bytes);
            std::uint64_t id = next_msg_id_++;
            acks_.emplace(id, PendingAck{ack, p.origin_time});
            sim_.schedule(t_end + config_.uplink_delay_s + config_.core_delay_s, kTcpAck, 0, id);
        }
    }
    (void)ue;
}

void Network::serve_fallback(double t, double t_end)
{
    if (deployment_.fallback_id < 0)
        return;
    for (auto& ue : ues_)
    {
        if (ue.serving != deployment_.fallback_id)
            continue;
        ++fallback_slots_;
        ue.fallback_credit_bits += config_.fallback_rate_bps * frame_.slot_duration_s;
        auto bytes = static_cast<std::uint64_t>(ue.fallback_credit_bits / 8.0);
        ue.fallback_credit_bits -= static_cast<double>(bytes) * 8.0;
        if (ue.buffer.empty())
        {
            ue.fallback_credit_bits = 0.0;
            continue;
        }
        auto done = ue.buffer.dequeue(bytes, t, t_end);
        deliver(ue, done, t_end);
    }
}

void Network::on_slot(std::uint64_t k)
{
    const double slot = frame_.slot_duration_s;
    const double t = static_cast<double>(k) * slot;
    const double t_end = t + slot;
    ++slots_;

    bool beam_tick = k % beam_slots_ == 0;
    bool epoch = k % epoch_slots_ == 0;
    if (beam_tick || epoch)
    {
        update_positions(t);
        if (epoch)
            update_large_scale(t, k == 0);
        update_pathloss();
        gain_cache_.clear();
        if (epoch)
            run_handover(t, k == 0);
        if (beam_tick)
            for (auto& ue : ues_)
                refresh_beam(ue, t);
    }

    std::vector<std::pair<int, int>> active;
    for (int b = 0; b < n_bs_; ++b)
    {
        int u = schedulers_[static_cast<std::size_t>(b)].next(
            [this](int m) { return !ues_[static_cast<std::size_t>(m)].buffer.empty(); });
        if (u >= 0)
            active.emplace_back(b, u);
    }

    SlotProbe probe;
    const bool probing = static_cast<bool>(probe_) && !active.empty();
    if (probing)
    {
        probe.t = t;
        probe.positions = positions_;
    }

    std::vector<double> sinr(active.size());
    for (std::size_t i = 0; i < active.size(); ++i)
    {
        auto [b, u] = active[i];
        ProbeLink rec;
        double signal = evaluate_link(b, u, u, t, probing ? &rec : nullptr);
        if (probing)
            probe.links.push_back(rec);
        double interference = 0.0;
        for (std::size_t j = 0; j < active.size(); ++j)
        {
            if (j == i)
                continue;
            interference += evaluate_link(active[j].first, active[j].second, u, t, probing ? &rec : nullptr);
            if (probing)
                probe.links.push_back(rec);
        }
        sinr[i] = signal / (noise_mw_ + interference);
    }

    for (std::size_t i = 0; i < active.size(); ++i)
    {
        auto [b, u] = active[i];
        UeState& ue = ues_[static_cast<std::size_t>(u)];
        double s_db = 10.0 * std::log10(sinr[i]);
        ++scheduled_slots_;
        sinr_db_sum_ += s_db;
        double se = spectral_efficiency(s_db, config_.rate_map);
        std::uint64_t bits = transport_block_bits(se, frame_.data_symbols(), frame_);
        auto done = ue.buffer.dequeue(bits / 8, t, t_end);
        deliver(ue, done, t_end);
        if (probing)
            probe.transmissions.push_back({b, u, {ue.bs_beam.theta_s, ue.bs_beam.phi_s},
                                           {ue.ue_beam.theta_s, ue.ue_beam.phi_s}, sinr[i]});
    }
    serve_fallback(t, t_end);

    if (probing)
        probe_(probe);
    if (k + 1 < total_slots_)
        sim_.schedule(static_cast<double>(k + 1) * slot, kSlot, 0, k + 1);
}

RunResult simulate_once(const ScenarioConfig& config, std::uint64_t seed)
{
    Network net(config, seed);
    return net.run();
}

} // namespace mmwsim
