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
#include "mmwsim/sim_engine.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace mmwsim;

TEST_CASE("events fire at their scheduled time")
{
    Simulator sim;
    std::vector<double> fired;
    sim.set_handler([&](const Event& ev) { fired.push_back(ev.fire_time); });
    sim.schedule(0.5, 1);
    sim.run_until(1.0);
    REQUIRE(fired.size() == 1);
    CHECK(fired[0] == 0.5);
    CHECK(sim.now() == 1.0);
}

TEST_CASE("simultaneous events keep scheduling order")
{
    Simulator sim;
    std::vector<std::uint64_t> order;
    sim.set_handler([&](const Event& ev) { order.push_back(ev.arg); });
    for (std::uint64_t i = 0; i < 5; ++i)
        sim.schedule(1.0, 1, 0, i);
    sim.run_until(2.0);
    CHECK(order == std::vector<std::uint64_t>{0, 1, 2, 3, 4});
}

TEST_CASE("scheduling into the past throws")
{
    Simulator sim;
    sim.run_until(0.2);
    CHECK_THROWS_AS(sim.schedule(0.1, 1), std::invalid_argument);
    CHECK_THROWS_AS(sim.run_until(0.1), std::invalid_argument);
}

TEST_CASE("run_until stops at the horizon")
{
    Simulator sim;
    SimStats empty = sim.run_until(10.0);
    CHECK(empty.events_processed == 0);
    CHECK(sim.now() == 10.0);

    Simulator s2;
    int n = 0;
    s2.set_handler([&](const Event&) { ++n; });
    s2.schedule(1.0, 1);
    s2.schedule(2.0, 1);
    s2.schedule(3.0, 1);
    SimStats st = s2.run_until(2.5);
    CHECK(st.events_processed == 2);
    CHECK(n == 2);
    s2.run_until(3.0);
    CHECK(n == 3);
}

TEST_CASE("cancelled events are skipped")
{
    Simulator sim;
    int n = 0;
    sim.set_handler([&](const Event&) { ++n; });
    auto h = sim.schedule(1.0, 1);
    sim.schedule(1.5, 1);
    sim.cancel(h);
    CHECK(sim.run_until(2.0).events_processed == 1);
    CHECK(n == 1);
}

TEST_CASE("handlers may schedule follow-up events")
{
    Simulator sim;
    std::vector<double> trace;
    sim.set_handler([&](const Event& ev) {
        trace.push_back(ev.fire_time);
        if (ev.arg < 3)
            sim.schedule_in(0.25, 1, 0, ev.arg + 1);
    });
    sim.schedule(0.0, 1);
    sim.run_until(5.0);
    CHECK(trace == std::vector<double>{0.0, 0.25, 0.5, 0.75});
}

TEST_CASE("random streams replay by label")
{
    Simulator sim(42);
    RandomStream a = sim.rng_stream("fading/link-0");
    RandomStream b = sim.rng_stream("fading/link-0");
    for (int i = 0; i < 100; ++i)
        CHECK(a.uniform() == b.uniform());
    CHECK(a.draws() == 100);

    RandomStream other_seed(43, "fading/link-0");
    RandomStream c(42, "fading/link-0");
    int same = 0;
    for (int i = 0; i < 100; ++i)
        same += other_seed.uniform() == c.uniform();
    CHECK(same == 0);
}

TEST_CASE("differently labelled streams are uncorrelated")
{
    RandomStream a(7, "fading/link-0");
    RandomStream b(7, "fading/link-1");
    const int n = 100000;
    double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
    for (int i = 0; i < n; ++i)
    {
        double x = a.uniform(), y = b.uniform();
        sa += x;
        sb += y;
        saa += x * x;
        sbb += y * y;
        sab += x * y;
    }
    double cov = sab / n - (sa / n) * (sb / n);
    double r = cov / std::sqrt((saa / n - sa * sa / n / n) * (sbb / n - sb * sb / n / n));
    CHECK(std::abs(r) < 0.01);
}

TEST_CASE("distribution helpers have the right first moments")
{
    RandomStream s(3, "moments");
    const int n = 200000;
    double e = 0, l = 0, l2 = 0, u = 0;
    for (int i = 0; i < n; ++i)
    {
        e += s.exponential(2.0);
        double x = s.laplacian(1.5);
        l += x;
        l2 += x * x;
        u += s.uniform(-1.0, 3.0);
    }
    CHECK(e / n == doctest::Approx(2.0).epsilon(0.01));
    CHECK(std::abs(l / n) < 0.02);
    CHECK(l2 / n == doctest::Approx(2.0 * 1.5 * 1.5).epsilon(0.02));
    CHECK(u / n == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("seed derivation separates labels and seeds")
{
    CHECK(derive_seed(1, "a") != derive_seed(1, "b"));
    CHECK(derive_seed(1, "a") != derive_seed(2, "a"));
    CHECK(derive_seed(1, "a") == derive_seed(1, "a"));
}
