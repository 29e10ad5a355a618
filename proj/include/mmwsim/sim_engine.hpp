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

#ifndef MMWSIM_SIM_ENGINE_HPP
#define MMWSIM_SIM_ENGINE_HPP

#include <cstdint>
#include <functional>
#include <queue>
#include <random>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace mmwsim
{

// An event is an opaque (kind, target, arg) triple; the owner of the
// simulator decides what the fields mean.
struct Event
{
    double fire_time = 0.0;
    std::uint64_t sequence = 0;
    std::uint32_t kind = 0;
    std::uint32_t target = 0;
    std::uint64_t arg = 0;
};

struct EventHandle
{
    std::uint64_t sequence = 0;
    bool valid() const { return sequence != 0; }
};

struct SimStats
{
    std::uint64_t events_processed = 0;
    double wall_clock_s = 0.0;
    double sim_time_s = 0.0;
};

/// Reproducible random substream. The seed is a pure function of
/// (master seed, label), so two streams with the same label replay the same
/// sequence and streams with different labels are statistically independent.
class RandomStream
{
  public:
    RandomStream(std::uint64_t master_seed, std::string_view label);

    const std::string& label() const { return label_; }
    std::uint64_t seed() const { return seed_; }

    double uniform();                        // [0, 1)
    double uniform(double lo, double hi);    // [lo, hi)
    double normal();                         // N(0, 1)
    double exponential(double mean);
    double gamma(double shape, double scale);
    double laplacian(double scale);          // zero mean, density exp(-|x|/scale)/(2 scale)
    bool bernoulli(double p);

    // Number of variates drawn so far; feeds the fading work counters.
    std::uint64_t draws() const { return draws_; }

  private:
    std::string label_;
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    std::uint64_t draws_ = 0;
};

/// 64-bit seed derivation used by RandomStream (FNV-1a of the label mixed
/// into the master seed, finalised with splitmix64).
std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view label);

class Simulator
{
  public:
    using Handler = std::function<void(const Event&)>;
    using TraceHook = std::function<void(const Event&)>;

    explicit Simulator(std::uint64_t master_seed = 1);

    double now() const { return now_; }
    std::uint64_t master_seed() const { return master_seed_; }

    // Throws std::invalid_argument when `at` lies before the current clock.
    EventHandle schedule(double at, std::uint32_t kind, std::uint32_t target = 0, std::uint64_t arg = 0);
    EventHandle schedule_in(double delay, std::uint32_t kind, std::uint32_t target = 0, std::uint64_t arg = 0);
    void cancel(EventHandle handle);

    void set_handler(Handler handler) { handler_ = std::move(handler); }
    void set_trace(TraceHook hook) { trace_ = std::move(hook); }

    // Processes every event with fire_time <= t_end in (time, sequence)
    // order and leaves the clock at t_end. Wall-clock time is measured
    // around the dispatch loop only.
    SimStats run_until(double t_end);

    RandomStream rng_stream(std::string_view label) const { return RandomStream(master_seed_, label); }

  private:
    struct Later
    {
        bool operator()(const Event& a, const Event& b) const
        {
            if (a.fire_time != b.fire_time)
                return a.fire_time > b.fire_time;
            return a.sequence > b.sequence;
        }
    };

    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    std::unordered_set<std::uint64_t> cancelled_;
    Handler handler_;
    TraceHook trace_;
    double now_ = 0.0;
    std::uint64_t next_sequence_ = 1;
    std::uint64_t master_seed_;
    std::uint64_t total_processed_ = 0;
};

} // namespace mmwsim

#endif
