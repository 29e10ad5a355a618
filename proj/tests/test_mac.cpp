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


#include "doctest.h"
#include "mmwsim/mac.hpp"
#include "mmwsim/sim_engine.hpp"
#include "oracles.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace mmwsim;

namespace
{

Packet pkt(std::uint32_t bytes, std::uint64_t seq = 0)
{
    Packet p;
    p.bytes = bytes;
    p.seq = seq;
    return p;
}

} // namespace

TEST_CASE("RLC admission at the capacity boundary")
{
    RlcBuffer b(3000);
    CHECK(b.enqueue(pkt(1400), 0.0));
    CHECK(b.enqueue(pkt(1600), 0.0));
    CHECK(b.occupancy() == b.capacity());
    CHECK_FALSE(b.enqueue(pkt(1), 0.0));
    CHECK(b.dropped_packets() == 1);
    CHECK(b.dropped_bytes() == 1);
    CHECK(b.packets() == 2);
}

TEST_CASE("head packet splits across slots")
{
    RlcBuffer b(1'000'000);
    b.enqueue(pkt(1000, 1), 0.0);
    b.enqueue(pkt(1000, 2), 0.0);
    auto first = b.dequeue(600, 1.0, 2.0);
    CHECK(first.empty());
    CHECK(b.occupancy() == 1400);
    auto second = b.dequeue(600, 2.0, 3.0);
    REQUIRE(second.size() == 1);
    CHECK(second[0].seq == 1);
    CHECK(second[0].mac_out == 3.0);
    CHECK(second[0].mac_in == 0.0);
    auto rest = b.dequeue(10'000, 3.0, 4.0);
    REQUIRE(rest.size() == 1);
    CHECK(rest[0].mac_in == 2.0); // reached the head inside the previous transmission
    CHECK(b.empty());
    CHECK(b.delivered_bytes() == 2000);
    CHECK(b.dequeue(500, 4.0, 5.0).empty());
}

TEST_CASE("RLC byte conservation under random load")
{
    RandomStream s(1, "rlc");
    RlcBuffer b(50'000);
    std::uint64_t offered = 0;
    double t = 0.0;
    for (int i = 0; i < 20000; ++i)
    {
        auto bytes = static_cast<std::uint32_t>(s.uniform(40, 1500));
        offered += bytes;
        b.enqueue(pkt(bytes), t);
        if (i % 3 == 0)
            b.dequeue(static_cast<std::uint64_t>(s.uniform(0, 4000)), t, t + 1e-4);
        t += 1e-4;
        CHECK(b.occupancy() <= b.capacity());
    }
    CHECK(b.delivered_bytes() + b.dropped_bytes() + b.occupancy() == offered);
    CHECK(b.enqueued_bytes() == b.delivered_bytes() + b.occupancy());
}

TEST_CASE("latency bookkeeping")
{
    RlcBuffer b(1'000'000);
    LatencyTracker lt;
    const double slot = 125e-6;
    b.enqueue(pkt(100), 0.3 * slot); // mid-slot arrival
    auto done = b.dequeue(1000, slot, 2 * slot);
    REQUIRE(done.size() == 1);
    lt.record(done[0]);
    CHECK(lt.mac().count == 1);
    CHECK(lt.mac().mean < 2 * slot);
    CHECK(lt.pdcp().mean == doctest::Approx(1.7 * slot));

    Packet broken = pkt(10);
    broken.pdcp_in = 1.0;
    broken.mac_in = 0.5;
    broken.mac_out = 2.0;
    CHECK_THROWS_AS(lt.record(broken), std::logic_error);

    LatencyTracker many;
    for (int i = 1; i <= 100; ++i)
    {
        Packet p = pkt(1);
        p.pdcp_in = 0.0;
        p.mac_in = 0.0;
        p.mac_out = i;
        many.record(p);
    }
    CHECK(many.mac().mean == doctest::Approx(50.5));
    CHECK(many.mac().p50 == doctest::Approx(51.0));
    CHECK(many.mac().p95 == doctest::Approx(95.0));
    CHECK(LatencyTracker{}.pdcp().count == 0);
}

TEST_CASE("round robin alternates between backlogged members")
{
    RoundRobin rr;
    CHECK(rr.next([](int) { return true; }) == -1);
    rr.add(4);
    rr.add(1);
    rr.add(4);
    CHECK(rr.members() == std::vector<int>{1, 4});
    std::vector<int> served;
    for (int i = 0; i < 6; ++i)
        served.push_back(rr.next([](int) { return true; }));
    CHECK(served == std::vector<int>{1, 4, 1, 4, 1, 4});
    CHECK(rr.next([](int m) { return m == 4; }) == 4);
    CHECK(rr.next([](int) { return false; }) == -1);
    rr.add(2);
    CHECK(rr.next([](int) { return true; }) == 1);
    CHECK(rr.next([](int) { return true; }) == 2);
    rr.remove(4);
    CHECK_FALSE(rr.contains(4));
    CHECK(rr.next([](int) { return true; }) == 1);
}

TEST_CASE("cell selection")
{
    CHECK(select_serving_bs({{7, 3.0}}, -1, 3.0, -5.0) == 7);
    CHECK(select_serving_bs({{7, -30.0}}, 7, 3.0, -5.0) == 7);
    CHECK(select_serving_bs({{0, -30.0}, {1, -20.0}}, 0, 3.0, -5.0, 9) == 9);
    CHECK(select_serving_bs({}, -1, 3.0, -5.0, 9) == 9);
    CHECK_THROWS_AS(select_serving_bs({}, -1, 3.0, -5.0), std::invalid_argument);
    // within hysteresis the incumbent stays
    CHECK(select_serving_bs({{0, 10.0}, {1, 12.9}}, 0, 3.0, -5.0) == 0);
    CHECK(select_serving_bs({{0, 10.0}, {1, 13.1}}, 0, 3.0, -5.0) == 1);
    // an incumbent below the floor is dropped
    CHECK(select_serving_bs({{0, -6.0}, {1, -4.0}}, 0, 3.0, -5.0) == 1);
}

TEST_CASE("walking between two equal base stations hands over once")
{
    // LOS path loss from two sites 100 m apart, measurements with +-1 dB noise
    RandomStream noise(3, "meas");
    const double tx = 30.0 + 24.08, n0 = oracle::thermal_noise_dbm(1e9, 5.0);
    int serving = -1, handovers = 0;
    std::vector<double> switch_points;
    for (double x = 5.0; x <= 95.0; x += 0.1)
    {
        double d0 = std::hypot(x, 8.5), d1 = std::hypot(100.0 - x, 8.5);
        std::vector<CellMeasurement> cells = {
            {0, tx - oracle::uma_pathloss_db(d0, 28.0, true, 1.5) - n0 + noise.uniform(-1, 1)},
            {1, tx - oracle::uma_pathloss_db(d1, 28.0, true, 1.5) - n0 + noise.uniform(-1, 1)}};
        int chosen = select_serving_bs(cells, serving, 3.0, -5.0);
        if (serving >= 0 && chosen != serving)
        {
            ++handovers;
            switch_points.push_back(x);
        }
        serving = chosen;
    }
    CHECK(handovers == 1);
    CHECK(serving == 1);
    REQUIRE(switch_points.size() == 1);
    CHECK(switch_points[0] > 50.0);
}
