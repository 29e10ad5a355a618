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


#include "mmwsim/transport.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mmwsim
{

void UdpSource::validate() const
{
    if (!(rate_bps > 0.0))
        throw std::invalid_argument("UDP rate must be positive");
    if (packet_bytes <= 0)
        throw std::invalid_argument("UDP packet size must be positive");
}

std::string to_string(TcpPhase p)
{
    switch (p)
    {
    case TcpPhase::SlowStart:
        return "slow-start";
    case TcpPhase::CongestionAvoidance:
        return "congestion-avoidance";
    case TcpPhase::FastRecovery:
        return "fast-recovery";
    }
    return "?";
}

std::string to_string(SlowStartExitCause c)
{
    switch (c)
    {
    case SlowStartExitCause::TripleDupack:
        return "triple-dupack";
    case SlowStartExitCause::Timeout:
        return "timeout";
    case SlowStartExitCause::SsthreshReached:
        return "ssthresh";
    }
    return "?";
}

TcpState TcpState::initial(std::uint64_t mss, int initial_cwnd_mss, std::uint64_t max_window)
{
    TcpState s;
    s.mss = mss;
    s.max_window = max_window;
    s.cwnd = std::min<std::uint64_t>(mss * static_cast<std::uint64_t>(initial_cwnd_mss), max_window);
    s.ssthresh = max_window;
    return s;
}

void tcp_on_ack(TcpState& s, std::uint64_t acked)
{
    if (acked > s.in_flight)
        throw std::invalid_argument("ACK covers " + std::to_string(acked) + " bytes but only " +
                                    std::to_string(s.in_flight) + " are in flight");
    s.in_flight -= acked;
    s.dupacks = 0;
    switch (s.phase)
    {
    case TcpPhase::SlowStart:
        s.cwnd += acked;
        if (s.cwnd >= s.ssthresh)
            s.phase = TcpPhase::CongestionAvoidance;
        break;
    case TcpPhase::CongestionAvoidance:
        s.cwnd += std::max<std::uint64_t>(1, acked * s.mss / s.cwnd);
        break;
    case TcpPhase::FastRecovery:
        break;
    }
    s.cwnd = std::min(s.cwnd, s.max_window);
}

void tcp_on_loss(TcpState& s, LossKind kind)
{
    s.ssthresh = std::max(s.cwnd / 2, 2 * s.mss);
    s.dupacks = 0;
    if (kind == LossKind::TripleDupack)
    {
        s.cwnd = s.ssthresh;
        s.phase = TcpPhase::FastRecovery;
    }
    else
    {
        s.cwnd = s.mss;
        s.phase = TcpPhase::SlowStart;
    }
}

std::uint64_t tcp_window(const TcpState& s)
{
    std::uint64_t w = std::min(s.cwnd, s.max_window);
    return w > s.in_flight ? w - s.in_flight : 0;
}

void TcpConfig::validate() const
{
    if (mss_bytes <= 0 || initial_cwnd_mss < 1)
        throw std::invalid_argument("TCP mss and initial window must be positive");
    if (max_window_bytes < static_cast<std::uint64_t>(mss_bytes))
        throw std::invalid_argument("TCP max window must hold at least one mss");
    if (!(min_rto_s > 0.0) || !(initial_rto_s > 0.0) || max_rto_s < min_rto_s)
        throw std::invalid_argument("invalid TCP retransmission timer bounds");
}

TcpSender::TcpSender(TcpConfig config)
    : config_(config),
      state_(TcpState::initial(static_cast<std::uint64_t>(config.mss_bytes), config.initial_cwnd_mss,
                               config.max_window_bytes)),
      rto_(config.initial_rto_s)
{
    config_.validate();
}

TcpSegment TcpSender::make_segment(std::uint64_t seq, double now, bool retransmission)
{
    TcpSegment seg;
    seg.seq = seq;
    seg.len = static_cast<std::uint32_t>(state_.mss);
    seg.sent_at = now;
    seg.retransmission = retransmission;
    if (retransmission)
        ++retransmissions_;
    return seg;
}

std::vector<TcpSegment> TcpSender::send_allowed(double now)
{
    std::vector<TcpSegment> out;
    sync_in_flight();
    while (tcp_window(state_) >= state_.mss)
    {
        out.push_back(make_segment(snd_nxt_, now, snd_nxt_ < high_water_));
        snd_nxt_ += state_.mss;
        high_water_ = std::max(high_water_, snd_nxt_);
        sync_in_flight();
    }
    if (!out.empty() && rto_deadline_ < 0.0)
        arm_timer(now);
    return out;
}

std::vector<TcpSegment> TcpSender::start(double now)
{
    return send_allowed(now);
}

void TcpSender::sample_rtt(double r)
{
    if (srtt_ < 0.0)
    {
        srtt_ = r;
        rttvar_ = r / 2.0;
    }
    else
    {
        rttvar_ = 0.75 * rttvar_ + 0.25 * std::abs(srtt_ - r);
        srtt_ = 0.875 * srtt_ + 0.125 * r;
    }
    rto_ = std::clamp(srtt_ + 4.0 * rttvar_, config_.min_rto_s, config_.max_rto_s);
}

void TcpSender::enter_loss(LossKind kind, double now)
{
    if (state_.phase == TcpPhase::SlowStart)
    {
        SlowStartExit e;
        e.t = now;
        e.cause = kind == LossKind::Timeout ? SlowStartExitCause::Timeout : SlowStartExitCause::TripleDupack;
        e.cwnd_before = state_.cwnd;
        e.lost_seq = snd_una_;
        exits_.push_back(e);
    }
    tcp_on_loss(state_, kind);
    recover_ = high_water_;
    loss_time_ = now;
    any_loss_ = true;
    partial_seen_ = false;
}

std::vector<TcpSegment> TcpSender::on_ack(std::uint64_t ack, double echoed_sent_at, double now)
{
    if (ack > high_water_)
        throw std::invalid_argument("ACK " + std::to_string(ack) + " beyond the highest byte sent " +
                                    std::to_string(high_water_));
    std::vector<TcpSegment> out;
    if (ack > snd_una_)
    {
        if (ack > snd_nxt_)
            snd_nxt_ = ack; // data sent before a go-back-N reset got through
        sync_in_flight();
        std::uint64_t acked = ack - snd_una_;
        sample_rtt(now - echoed_sent_at);

        if (state_.phase == TcpPhase::FastRecovery)
        {
            snd_una_ = ack;
            sync_in_flight();
            if (ack >= recover_)
            {
                state_.cwnd = state_.ssthresh;
                state_.phase = TcpPhase::CongestionAvoidance;
            }
            else
            {
                // partial ACK: the next hole is lost too
                state_.cwnd = state_.cwnd > acked ? state_.cwnd - acked : 0;
                state_.cwnd = std::max(state_.cwnd + state_.mss, state_.mss);
                out.push_back(make_segment(snd_una_, now, true));
                ++fast_retransmits_;
            }
            state_.dupacks = 0;
        }
        else
        {
            bool was_slow_start = state_.phase == TcpPhase::SlowStart;
            std::uint64_t cwnd_before = state_.cwnd;
            tcp_on_ack(state_, acked);
            snd_una_ = ack;
            if (was_slow_start && state_.phase == TcpPhase::CongestionAvoidance)
                exits_.push_back({now, SlowStartExitCause::SsthreshReached, cwnd_before, snd_una_});
        }
        sync_in_flight();
        // impatient NewReno: only the first partial ACK of a recovery restarts the timer
        bool partial = state_.phase == TcpPhase::FastRecovery;
        if (snd_nxt_ <= snd_una_)
            rto_deadline_ = -1.0;
        else if (!partial || !partial_seen_)
            rto_deadline_ = now + rto_;
        partial_seen_ = partial_seen_ || partial;
    }
    else if (ack == snd_una_ && snd_nxt_ > snd_una_)
    {
        if (state_.phase == TcpPhase::FastRecovery)
        {
            state_.cwnd = std::min(state_.cwnd + state_.mss, state_.max_window);
        }
        // a duplicate ACK echoing data sent after the last recovery started
        // reports a new loss even below recover_ (timestamp heuristic)
        else if (++state_.dupacks >= 3 && (!any_loss_ || ack > recover_ || echoed_sent_at > loss_time_))
        {
            enter_loss(LossKind::TripleDupack, now);
            state_.cwnd = std::min(state_.cwnd + 3 * state_.mss, state_.max_window);
            out.push_back(make_segment(snd_una_, now, true));
            ++fast_retransmits_;
            arm_timer(now);
        }
    }
    auto more = send_allowed(now);
    out.insert(out.end(), more.begin(), more.end());
    return out;
}

std::vector<TcpSegment> TcpSender::on_timeout(double now)
{
    if (snd_nxt_ == snd_una_)
    {
        rto_deadline_ = -1.0;
        return {};
    }
    ++timeouts_;
    enter_loss(LossKind::Timeout, now);
    rto_ = std::min(2.0 * rto_, config_.max_rto_s);
    snd_nxt_ = snd_una_;
    rto_deadline_ = -1.0;
    return send_allowed(now);
}

std::uint64_t TcpReceiver::on_segment(std::uint64_t seq, std::uint32_t len)
{
    std::uint64_t end = seq + len;
    if (end <= rcv_nxt_)
        return rcv_nxt_;
    if (seq > rcv_nxt_)
    {
        auto& slot = pending_[seq];
        slot = std::max(slot, end);
        return rcv_nxt_;
    }
    rcv_nxt_ = end;
    while (!pending_.empty() && pending_.begin()->first <= rcv_nxt_)
    {
        rcv_nxt_ = std::max(rcv_nxt_, pending_.begin()->second);
        pending_.erase(pending_.begin());
    }
    return rcv_nxt_;
}

} // namespace mmwsim
