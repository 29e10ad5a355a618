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


#include "mmwsim/mac.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace mmwsim
{

RlcBuffer::RlcBuffer(std::uint64_t capacity_bytes) : capacity_(capacity_bytes)
{
    if (capacity_bytes == 0)
        throw std::invalid_argument("RLC buffer capacity must be positive");
}

bool RlcBuffer::enqueue(Packet p, double t)
{
    if (occupancy_ + p.bytes > capacity_)
    {
        ++dropped_packets_;
        dropped_bytes_ += p.bytes;
        return false;
    }
    p.pdcp_in = t;
    p.mac_in = queue_.empty() ? t : -1.0;
    p.mac_out = -1.0;
    occupancy_ += p.bytes;
    enqueued_bytes_ += p.bytes;
    queue_.push_back(p);
    return true;
}

std::vector<Packet> RlcBuffer::dequeue(std::uint64_t budget_bytes, double t_start, double t_end)
{
    std::vector<Packet> done;
    while (budget_bytes > 0 && !queue_.empty())
    {
        Packet& head = queue_.front();
        if (head.mac_in < 0.0)
            head.mac_in = t_start;
        std::uint64_t left = head.bytes - head_sent_;
        std::uint64_t take = std::min(left, budget_bytes);
        budget_bytes -= take;
        head_sent_ += take;
        occupancy_ -= take;
        delivered_bytes_ += take;
        if (head_sent_ == head.bytes)
        {
            head.mac_out = t_end;
            done.push_back(head);
            queue_.pop_front();
            head_sent_ = 0;
        }
    }
    if (!queue_.empty() && queue_.front().mac_in < 0.0)
        queue_.front().mac_in = t_end;
    return done;
}

void LatencyTracker::record(const Packet& p)
{
    if (!(p.mac_out >= p.mac_in && p.mac_in >= p.pdcp_in))
        throw std::logic_error("packet timestamps out of order");
    mac_.push_back(p.mac_out - p.mac_in);
    pdcp_.push_back(p.mac_out - p.pdcp_in);
}

LatencySummary LatencyTracker::summarize(std::vector<double> v)
{
    LatencySummary s;
    s.count = v.size();
    if (v.empty())
        return s;
    s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    auto quantile = [&v](double q) {
        auto k = static_cast<std::size_t>(q * static_cast<double>(v.size() - 1) + 0.5);
        std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
        return v[k];
    };
    s.p50 = quantile(0.5);
    s.p95 = quantile(0.95);
    return s;
}

void RoundRobin::add(int member)
{
    auto it = std::lower_bound(members_.begin(), members_.end(), member);
    if (it == members_.end() || *it != member)
        members_.insert(it, member);
}

void RoundRobin::remove(int member)
{
    auto it = std::lower_bound(members_.begin(), members_.end(), member);
    if (it != members_.end() && *it == member)
        members_.erase(it);
}

bool RoundRobin::contains(int member) const
{
    return std::binary_search(members_.begin(), members_.end(), member);
}

int select_serving_bs(const std::vector<CellMeasurement>& cells, int incumbent, double hysteresis_db,
                      double floor_db, int fallback_id)
{
    if (cells.empty())
    {
        if (fallback_id < 0)
            throw std::invalid_argument("no base station to select from");
        return fallback_id;
    }
    // ties resolve to the lowest id
    const CellMeasurement* best = &cells.front();
    for (const auto& c : cells)
        if (c.snr_db > best->snr_db || (c.snr_db == best->snr_db && c.bs_id < best->bs_id))
            best = &c;

    if (fallback_id >= 0 && best->snr_db < floor_db)
        return fallback_id;

    const CellMeasurement* current = nullptr;
    for (const auto& c : cells)
        if (c.bs_id == incumbent)
            current = &c;
    if (!current || current->snr_db < floor_db)
        return best->bs_id;
    return best->snr_db > current->snr_db + hysteresis_db ? best->bs_id : current->bs_id;
}

} // namespace mmwsim
