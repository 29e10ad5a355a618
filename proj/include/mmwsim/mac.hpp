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


#ifndef MMWSIM_MAC_HPP
#define MMWSIM_MAC_HPP

#include <cstdint>
#include <deque>
#include <vector>

namespace mmwsim
{

struct Packet
{
    std::uint64_t id = 0;
    int flow = 0;
    std::uint32_t bytes = 0;
    std::uint64_t seq = 0; // TCP: first byte; UDP: packet index
    double origin_time = 0.0; // left the traffic source
    double pdcp_in = 0.0;
    double mac_in = -1.0;  // reached the head of its RLC queue
    double mac_out = -1.0; // last byte left the radio
};

// Per-flow RLC queue with a byte capacity. Service is byte-granular: the
// head packet may be split over several slots and counts as delivered when
// its last byte is sent.
class RlcBuffer
{
  public:
    explicit RlcBuffer(std::uint64_t capacity_bytes);

    std::uint64_t capacity() const { return capacity_; }
    std::uint64_t occupancy() const { return occupancy_; }
    bool empty() const { return queue_.empty(); }
    std::size_t packets() const { return queue_.size(); }

    // Accepted iff occupancy + bytes <= capacity.
    bool enqueue(Packet p, double t);

    // Sends up to `budget_bytes` in a transmission that starts at t_start
    // and ends at t_end; returns packets completed by this transmission.
    std::vector<Packet> dequeue(std::uint64_t budget_bytes, double t_start, double t_end);

    std::uint64_t enqueued_bytes() const { return enqueued_bytes_; }
    std::uint64_t delivered_bytes() const { return delivered_bytes_; }
    std::uint64_t dropped_bytes() const { return dropped_bytes_; }
    std::uint64_t dropped_packets() const { return dropped_packets_; }

  private:
    std::uint64_t capacity_;
    std::uint64_t occupancy_ = 0;
    std::uint64_t head_sent_ = 0;
    std::deque<Packet> queue_;
    std::uint64_t enqueued_bytes_ = 0;
    std::uint64_t delivered_bytes_ = 0;
    std::uint64_t dropped_bytes_ = 0;
    std::uint64_t dropped_packets_ = 0;
};

struct LatencySummary
{
    std::uint64_t count = 0;
    double mean = 0.0;
    double p50 = 0.0;
    double p95 = 0.0;
};

class LatencyTracker
{
  public:
    // Throws std::logic_error if the timestamps are out of order.
    void record(const Packet& p);

    LatencySummary mac() const { return summarize(mac_); }
    LatencySummary pdcp() const { return summarize(pdcp_); }

  private:
    static LatencySummary summarize(std::vector<double> v);

    std::vector<double> mac_;
    std::vector<double> pdcp_;
};

// Round robin over a changing member set: the next backlogged member after
// the one served last, in ascending id order.
class RoundRobin
{
  public:
    void add(int member);
    void remove(int member);
    bool contains(int member) const;
    const std::vector<int>& members() const { return members_; }

    template <typename Backlogged>
    int next(Backlogged&& backlogged)
    {
        if (members_.empty())
            return -1;
        std::size_t start = 0;
        while (start < members_.size() && members_[start] <= last_)
            ++start;
        for (std::size_t k = 0; k < members_.size(); ++k)
        {
            int m = members_[(start + k) % members_.size()];
            if (backlogged(m))
            {
                last_ = m;
                return m;
            }
        }
        return -1;
    }

  private:
    std::vector<int> members_;
    int last_ = -1;
};

struct CellMeasurement
{
    int bs_id = 0;
    double snr_db = 0.0; // long-term, without fast fading
};

// Strongest cell with hysteresis against the incumbent. When every cell is
// below floor_db the fallback is chosen (if there is one). An incumbent that
// dropped below the floor is replaced without hysteresis.
int select_serving_bs(const std::vector<CellMeasurement>& cells, int incumbent, double hysteresis_db,
                      double floor_db, int fallback_id = -1);

} // namespace mmwsim

#endif
