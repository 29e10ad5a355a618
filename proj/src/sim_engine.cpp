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

#include "mmwsim/sim_engine.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace mmwsim
{

namespace
{

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace

std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view label)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : label)
    {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return splitmix64(splitmix64(master_seed) ^ h);
}

RandomStream::RandomStream(std::uint64_t master_seed, std::string_view label)
    : label_(label), seed_(derive_seed(master_seed, label)), engine_(seed_)
{
}

double RandomStream::uniform()
{
    ++draws_;
    return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
}

double RandomStream::uniform(double lo, double hi)
{
    ++draws_;
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
}

double RandomStream::normal()
{
    ++draws_;
    return std::normal_distribution<double>(0.0, 1.0)(engine_);
}

double RandomStream::exponential(double mean)
{
    ++draws_;
    return std::exponential_distribution<double>(1.0 / mean)(engine_);
}

double RandomStream::gamma(double shape, double scale)
{
    ++draws_;
    return std::gamma_distribution<double>(shape, scale)(engine_);
}

double RandomStream::laplacian(double scale)
{
    ++draws_;
    // inverse CDF on u in (-1/2, 1/2)
    double u = std::uniform_real_distribution<double>(-0.5, 0.5)(engine_);
    double sign = u < 0.0 ? -1.0 : 1.0;
    return -scale * sign * std::log1p(-2.0 * std::abs(u));
}

bool RandomStream::bernoulli(double p)
{
    return uniform() < p;
}

Simulator::Simulator(std::uint64_t master_seed) : master_seed_(master_seed)
{
}

EventHandle Simulator::schedule(double at, std::uint32_t kind, std::uint32_t target, std::uint64_t arg)
{
    if (!(at >= now_))
        throw std::invalid_argument("cannot schedule an event at t=" + std::to_string(at) +
                                    " before the current time t=" + std::to_string(now_));
    Event ev;
    ev.fire_time = at;
    ev.sequence = next_sequence_++;
    ev.kind = kind;
    ev.target = target;
    ev.arg = arg;
    queue_.push(ev);
    return EventHandle{ev.sequence};
}

EventHandle Simulator::schedule_in(double delay, std::uint32_t kind, std::uint32_t target, std::uint64_t arg)
{
    return schedule(now_ + delay, kind, target, arg);
}

void Simulator::cancel(EventHandle handle)
{
    if (handle.valid())
        cancelled_.insert(handle.sequence);
}

SimStats Simulator::run_until(double t_end)
{
    if (t_end < now_)
        throw std::invalid_argument("run_until target lies in the past");

    SimStats stats;
    auto start = std::chrono::steady_clock::now();
    while (!queue_.empty() && queue_.top().fire_time <= t_end)
    {
        Event ev = queue_.top();
        queue_.pop();
        if (!cancelled_.empty())
        {
            auto it = cancelled_.find(ev.sequence);
            if (it != cancelled_.end())
            {
                cancelled_.erase(it);
                continue;
            }
        }
        now_ = ev.fire_time;
        if (trace_)
            trace_(ev);
        if (handler_)
            handler_(ev);
        ++stats.events_processed;
    }
    now_ = t_end;
    auto stop = std::chrono::steady_clock::now();
    stats.wall_clock_s = std::chrono::duration<double>(stop - start).count();
    stats.sim_time_s = now_;
    total_processed_ += stats.events_processed;
    return stats;
}

} // namespace mmwsim
