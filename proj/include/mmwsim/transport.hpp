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


#ifndef MMWSIM_TRANSPORT_HPP
#define MMWSIM_TRANSPORT_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace mmwsim
{

struct UdpSource
{
    double rate_bps = 4e8;
    int packet_bytes = 1400;

    void validate() const;
    double interval_s() const { return packet_bytes * 8.0 / rate_bps; }
};

enum class TcpPhase
{
    SlowStart,
    CongestionAvoidance,
    FastRecovery,
};

std::string to_string(TcpPhase p);

enum class LossKind
{
    TripleDupack,
    Timeout,
};

struct TcpState
{
    std::uint64_t mss = 1400;
    std::uint64_t cwnd = 14000;
    std::uint64_t ssthresh = 1ULL << 30;
    std::uint64_t max_window = 1ULL << 30;
    std::uint64_t in_flight = 0;
    int dupacks = 0;
    TcpPhase phase = TcpPhase::SlowStart;

    static TcpState initial(std::uint64_t mss, int initial_cwnd_mss, std::uint64_t max_window);
};

// Window growth for `acked` newly acknowledged bytes. Slow start adds the
// acked bytes, congestion avoidance adds mss*mss/cwnd per mss. Leaving slow
// start because cwnd reached ssthresh happens here. Throws
// std::invalid_argument if more bytes are acked than are in flight.
void tcp_on_ack(TcpState& s, std::uint64_t acked);

// ssthresh = max(cwnd / 2, 2 mss); triple dupack keeps cwnd = ssthresh and
// enters fast recovery, timeout collapses cwnd to one mss in slow start.
void tcp_on_loss(TcpState& s, LossKind kind);

// min(cwnd, max_window) - in_flight, floored at zero.
std::uint64_t tcp_window(const TcpState& s);

struct TcpConfig
{
    int mss_bytes = 1400;
    int initial_cwnd_mss = 10;
    std::uint64_t max_window_bytes = 1ULL << 30;
    double min_rto_s = 0.2;
    double initial_rto_s = 1.0;
    double max_rto_s = 60.0;

    void validate() const;
};

struct TcpSegment
{
    std::uint64_t seq = 0;
    std::uint32_t len = 0;
    double sent_at = 0.0; // echoed back by the receiver
    bool retransmission = false;
};

enum class SlowStartExitCause
{
    TripleDupack,
    Timeout,
    SsthreshReached,
};

std::string to_string(SlowStartExitCause c);

struct SlowStartExit
{
    double t = 0.0;
    SlowStartExitCause cause = SlowStartExitCause::SsthreshReached;
    std::uint64_t cwnd_before = 0;
    std::uint64_t lost_seq = 0; // first unacknowledged byte when the loss was detected
};

// NewReno sender with an unlimited backlog. Every call returns the
// segments to put on the wire now.
class TcpSender
{
  public:
    explicit TcpSender(TcpConfig config);

    std::vector<TcpSegment> start(double now);
    std::vector<TcpSegment> on_ack(std::uint64_t ack, double echoed_sent_at, double now);
    std::vector<TcpSegment> on_timeout(double now);

    // Absolute expiry of the retransmission timer, or a negative value when
    // nothing is outstanding.
    double rto_deadline() const { return rto_deadline_; }
    double rto() const { return rto_; }
    double srtt() const { return srtt_; }

    const TcpState& state() const { return state_; }
    std::uint64_t snd_una() const { return snd_una_; }
    std::uint64_t snd_nxt() const { return snd_nxt_; }
    const std::vector<SlowStartExit>& slow_start_exits() const { return exits_; }
    std::uint64_t retransmissions() const { return retransmissions_; }
    std::uint64_t timeouts() const { return timeouts_; }
    std::uint64_t fast_retransmits() const { return fast_retransmits_; }

  private:
    std::vector<TcpSegment> send_allowed(double now);
    TcpSegment make_segment(std::uint64_t seq, double now, bool retransmission);
    void sample_rtt(double r);
    void enter_loss(LossKind kind, double now);
    void arm_timer(double now) { rto_deadline_ = now + rto_; }
    void sync_in_flight() { state_.in_flight = snd_nxt_ - snd_una_; }

    TcpConfig config_;
    TcpState state_;
    std::uint64_t snd_una_ = 0;
    std::uint64_t snd_nxt_ = 0;
    std::uint64_t high_water_ = 0; // highest byte ever sent
    std::uint64_t recover_ = 0;
    bool any_loss_ = false;
    double loss_time_ = 0.0;
    bool partial_seen_ = false; // timer already restarted once in this recovery
    double srtt_ = -1.0;
    double rttvar_ = 0.0;
    double rto_;
    double rto_deadline_ = -1.0;
    std::vector<SlowStartExit> exits_;
    std::uint64_t retransmissions_ = 0;
    std::uint64_t timeouts_ = 0;
    std::uint64_t fast_retransmits_ = 0;
};

// Cumulative-ACK receiver with out-of-order reassembly; one ACK per segment.
class TcpReceiver
{
  public:
    // Returns the cumulative ACK (next expected byte).
    std::uint64_t on_segment(std::uint64_t seq, std::uint32_t len);
    std::uint64_t delivered_bytes() const { return rcv_nxt_; }

  private:
    std::uint64_t rcv_nxt_ = 0;
    std::map<std::uint64_t, std::uint64_t> pending_; // seq -> end
};

} // namespace mmwsim

#endif
