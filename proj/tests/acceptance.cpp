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


// Acceptance gate. Each criterion prints one PASS/FAIL line; the exit code
// is nonzero when any selected criterion fails. Scenario runs shared by
// several criteria are cached under --cache and reused while the binary and
// the config files are unchanged.

#include "mmwsim/beamforming.hpp"
#include "mmwsim/fading.hpp"
#include "mmwsim/network.hpp"
#include "mmwsim/runner.hpp"
#include "mmwsim/scenario.hpp"
#include "oracles.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace mmwsim;
namespace fs = std::filesystem;

namespace
{

struct Verdict
{
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok)
        {
            pass = false;
            detail << "[violated] " << what << "; ";
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string read_text(const fs::path& p)
{
    std::ifstream in(p);
    if (!in)
        throw std::runtime_error("cannot read " + p.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path config_path(const std::string& name)
{
    return fs::path(MMWSIM_CONFIG_DIR) / name;
}

// ------------------------------------------------------------ shared runs

struct ExitCheck
{
    std::string model;
    std::uint64_t b_rlc_bytes = 0;
    std::uint64_t seed = 0;
    std::string cause = "none";
    int matched = 0; // a recorded loss of the same segment precedes the exit
};

struct Experiment
{
    std::vector<MetricsRow> rows;
    std::vector<ExitCheck> exits;
};

class Cache
{
  public:
    explicit Cache(fs::path dir) : dir_(std::move(dir)) {}

    // Runs every cell of `config_file` on one thread (so wall clocks are
    // comparable), or returns the cached result of an identical earlier run.
    Experiment get(const std::string& config_file)
    {
        std::string text = read_text(config_path(config_file));
        std::string stamp = binary_stamp() + "\n" + text;
        fs::path base = dir_ / fs::path(config_file).stem();
        fs::path stamp_file = base;
        stamp_file += ".stamp";
        fs::path rows_file = base;
        rows_file += ".csv";
        fs::path exits_file = base;
        exits_file += ".exits";

        Experiment e;
        if (fs::exists(stamp_file) && read_text(stamp_file) == stamp)
        {
            e.rows = read_csv(rows_file.string());
            std::ifstream in(exits_file);
            ExitCheck x;
            while (in >> x.model >> x.b_rlc_bytes >> x.seed >> x.cause >> x.matched)
                e.exits.push_back(x);
            std::cerr << "using cached runs from " << rows_file << '\n';
            return e;
        }

        std::cerr << "running " << config_file << " ...\n";
        ConfigMatrix m = parse_config(text, config_file);
        for (auto& cell : run_cells(m.cells(), 1))
        {
            if (!cell.error.empty())
                throw std::runtime_error(cell.error);
            e.rows.push_back(cell.row);
            const RunResult& r = *cell.result;
            if (cell.config.kind != ScenarioKind::TcpLine)
                continue;
            ExitCheck x{cell.config.model, cell.config.b_rlc_bytes, cell.seed, "none", 0};
            if (!r.slow_start_exits.empty())
            {
                const SlowStartExit& first = r.slow_start_exits.front();
                x.cause = to_string(first.cause);
                for (const auto& l : r.losses)
                    if (l.seq == first.lost_seq && l.t <= first.t)
                        x.matched = 1;
            }
            e.exits.push_back(x);
        }

        fs::create_directories(dir_);
        write_csv(e.rows, rows_file.string());
        std::ofstream out(exits_file);
        for (const auto& x : e.exits)
            out << x.model << ' ' << x.b_rlc_bytes << ' ' << x.seed << ' ' << x.cause << ' ' << x.matched << '\n';
        std::ofstream(stamp_file) << stamp;
        return e;
    }

  private:
    static std::string binary_stamp()
    {
        auto t = fs::last_write_time("/proc/self/exe");
        return std::to_string(t.time_since_epoch().count());
    }

    fs::path dir_;
};

struct ModelMeans
{
    std::size_t n = 0;
    double throughput = 0.0;
    double mac_latency = 0.0;
    double pdcp_latency = 0.0;
    double wall_clock = 0.0; // summed, not averaged
};

std::map<std::string, ModelMeans> means_by_model(const std::vector<MetricsRow>& rows, std::uint64_t b_rlc = 0)
{
    std::map<std::string, ModelMeans> out;
    for (const auto& r : rows)
    {
        if (b_rlc != 0 && r.b_rlc_bytes != b_rlc)
            continue;
        ModelMeans& m = out[r.model];
        ++m.n;
        m.throughput += r.throughput_bps;
        m.mac_latency += r.mac_latency_s;
        m.pdcp_latency += r.pdcp_latency_s;
        m.wall_clock += r.wall_clock_s;
    }
    for (auto& [name, m] : out)
    {
        m.throughput /= static_cast<double>(m.n);
        m.mac_latency /= static_cast<double>(m.n);
        m.pdcp_latency /= static_cast<double>(m.n);
    }
    return out;
}

double total_wall_clock(const std::vector<MetricsRow>& rows)
{
    double s = 0.0;
    for (const auto& r : rows)
        s += r.wall_clock_s;
    return s;
}

// ------------------------------------------------------------- criteria

void array_factor(Verdict& v)
{
    auto t0 = std::chrono::steady_clock::now();
    RandomStream rng(2024, "acceptance-array");
    double worst_matched = 0.0;
    double worst_excess = -1e300;
    v.detail << "max random gain - 10log10 n:";
    for (int side : {1, 2, 4, 8})
    {
        double side_excess = -1e300;
        UpaConfig upa = UpaConfig::square(side);
        double peak = 10.0 * std::log10(static_cast<double>(upa.elements()));
        for (int i = 0; i < 100; ++i)
        {
            double th = rng.uniform(0.0, kPi), ph = rng.uniform(-kPi, kPi);
            worst_matched = std::max(worst_matched, std::abs(array_factor_db(upa, th, ph, th, ph) - peak));
        }
        for (int i = 0; i < 10000; ++i)
        {
            double th = rng.uniform(0.0, kPi), ph = rng.uniform(-kPi, kPi);
            double ths = rng.uniform(0.0, kPi), phs = rng.uniform(-kPi, kPi);
            side_excess = std::max(side_excess, array_factor_db(upa, th, ph, ths, phs) - peak);
        }
        v.detail << " n=" << upa.elements() << " " << side_excess << " dB";
        worst_excess = std::max(worst_excess, side_excess);
    }
    double elapsed = seconds_since(t0);
    v.detail << "; max |matched - 10log10 n| = " << worst_matched << " dB; " << elapsed << " s; ";
    v.require(worst_matched <= 1e-9, "matched gain within 1e-9 dB of 10log10 n");
    v.require(worst_excess <= 1e-9, "random steering never exceeds 10log10 n");
    v.require(elapsed < 1.0, "runtime < 1 s");
}

void nakagami(Verdict& v)
{
    auto t0 = std::chrono::steady_clock::now();
    const std::vector<std::pair<double, double>> cases = {{1, 1}, {2, 1}, {3, 1}, {10, 2}, {20, 1}};
    for (auto [m, omega] : cases)
    {
        RandomStream rng(7, "acceptance-nakagami-" + std::to_string(m));
        std::vector<double> x(100000);
        for (auto& g : x)
            g = sample_nakagami_gain(m, omega, rng);
        oracle::Moments mo = oracle::moments(x);
        double mean_err = std::abs(mo.mean - omega) / omega;
        double var_err = std::abs(mo.variance - omega * omega / m) / (omega * omega / m);
        v.detail << "m=" << m << " mean err " << mean_err << " var err " << var_err;
        v.require(mean_err <= 0.02, "mean within 2% for m=" + std::to_string(m));
        v.require(var_err <= 0.05, "variance within 5% for m=" + std::to_string(m));
        if (m == 1.0)
        {
            for (auto& g : x)
                g /= omega;
            double d = oracle::ks_exponential(x);
            double crit = oracle::ks_critical_1pct(x.size());
            v.detail << " KS " << d << " (crit " << crit << ")";
            v.require(d < crit, "m=1 passes the exponential KS test at 1%");
        }
        v.detail << "; ";
    }
    double elapsed = seconds_since(t0);
    v.detail << elapsed << " s; ";
    v.require(elapsed < 5.0, "runtime < 5 s");
}

// Recomputes every SINR of a probed slot from positions, beam directions,
// LOS states, shadowing and fading with the textbook formulas.
double worst_sinr_error(const SlotProbe& p, const Network& net)
{
    const ScenarioConfig& c = net.config();
    const Deployment& d = net.deployment();
    const double fc_ghz = c.carrier_hz / 1e9;
    const double noise_mw = std::pow(10.0, oracle::thermal_noise_dbm(c.bandwidth_hz, c.noise_figure_db) / 10.0);

    auto find_link = [&](int bs, int ue) -> const ProbeLink& {
        for (const auto& l : p.links)
            if (l.bs == bs && l.ue == ue)
                return l;
        throw std::runtime_error("probe is missing a link");
    };
    auto xyz = [&](int node) {
        const Vec3& q = p.positions.at(static_cast<std::size_t>(node));
        return oracle::Xyz{q.x, q.y, q.z};
    };
    // Received power from BS `tx.bs` (beam aimed by `tx`) at the UE of `rx`.
    auto received = [&](const ProbeTransmission& tx, const ProbeTransmission& rx) {
        const ProbeLink& l = find_link(tx.bs, rx.ue);
        const NodeState& bs = d.node(d.bs_ids.at(static_cast<std::size_t>(tx.bs)));
        const NodeState& ue = d.node(d.ue_ids.at(static_cast<std::size_t>(rx.ue)));
        oracle::Xyz a = xyz(bs.id), b = xyz(ue.id);
        double th, ph;
        oracle::angles(a, b, bs.array.boresight_azimuth, th, ph);
        double g_bs = oracle::array_gain_linear(bs.array.side, th, ph, tx.bs_steering.zenith, tx.bs_steering.azimuth,
                                                bs.array.spacing_v, bs.array.spacing_h);
        oracle::angles(b, a, ue.array.boresight_azimuth, th, ph);
        double g_ue = oracle::array_gain_linear(ue.array.side, th, ph, rx.ue_steering.zenith, rx.ue_steering.azimuth,
                                                ue.array.spacing_v, ue.array.spacing_h);
        double d3 = std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) + (a.z - b.z) * (a.z - b.z));
        double pl = oracle::uma_pathloss_db(d3, fc_ghz, l.condition == LosCondition::Los, b.z) + l.shadowing_db;
        return std::pow(10.0, (bs.tx_power_dbm - pl) / 10.0) * g_bs * g_ue * l.fading;
    };

    double worst = 0.0;
    for (const auto& rx : p.transmissions)
    {
        double interference = 0.0;
        for (const auto& tx : p.transmissions)
            if (&tx != &rx)
                interference += received(tx, rx);
        double sinr = received(rx, rx) / (noise_mw + interference);
        worst = std::max(worst, std::abs(rx.sinr_linear - sinr) / sinr);
    }
    return worst;
}

void sinr_oracle(Verdict& v)
{
    ConfigMatrix m = load_config(config_path("scenario1.json").string());
    ScenarioConfig c = m.base;
    c.model = "simple-A";
    const auto slots = static_cast<std::uint64_t>(std::llround(c.duration_s / c.slot_duration_s));

    // 10^3 distinct slot indices drawn uniformly over the run
    RandomStream pick(11, "acceptance-probe-instants");
    std::set<std::uint64_t> wanted;
    while (wanted.size() < 1000)
        wanted.insert(static_cast<std::uint64_t>(pick.uniform() * static_cast<double>(slots)));

    Network net(c, c.seeds.front());
    std::uint64_t index = 0, checked = 0, links = 0, interfered = 0;
    double worst = 0.0;
    net.set_probe([&](const SlotProbe& p) {
        if (wanted.count(index++) == 0)
            return;
        ++checked;
        links += p.links.size();
        interfered += p.transmissions.size() > 1 ? 1 : 0;
        worst = std::max(worst, worst_sinr_error(p, net));
    });
    net.run();
    v.detail << checked << " instants, " << links << " links, " << interfered
             << " with interference, max relative error " << worst << "; ";
    v.require(checked == 1000, "1000 probe instants evaluated");
    v.require(interfered > 0, "some instants carry interference");
    v.require(worst <= 1e-10, "relative error <= 1e-10");
}

std::string csv_without_wall_clock(const std::vector<MetricsRow>& rows)
{
    auto copy = rows;
    for (auto& r : copy)
        r.wall_clock_s = 0.0;
    std::ostringstream s;
    write_csv(copy, s);
    return s.str();
}

std::string first_difference(const std::string& a, const std::string& b)
{
    auto [ia, ib] = std::mismatch(a.begin(), a.end(), b.begin(), b.end());
    return "at byte " + std::to_string(ia - a.begin());
}

void determinism(Verdict& v)
{
    std::vector<ScenarioConfig> configs;
    for (const char* name : {"scenario1.json", "scenario2.json"})
    {
        ConfigMatrix m = load_config(config_path(name).string());
        m.base.seeds = {3};
        m.base.duration_s = m.base.kind == ScenarioKind::TcpLine ? 2.0 : 0.2;
        for (auto& c : m.cells())
            configs.push_back(std::move(c));
    }
    auto rows = [&](unsigned threads) {
        std::vector<MetricsRow> out;
        for (auto& cell : run_cells(configs, threads))
        {
            if (!cell.error.empty())
                throw std::runtime_error(cell.error);
            out.push_back(cell.row);
        }
        return out;
    };
    std::string a = csv_without_wall_clock(rows(1));
    std::string b = csv_without_wall_clock(rows(1));
    std::string c = csv_without_wall_clock(rows(4));
    v.detail << configs.size() << " cells, " << a.size() << " CSV bytes; ";
    v.require(a == b, "repeat run is byte-identical (" + first_difference(a, b) + ")");
    v.require(a == c, "parallel run is byte-identical (" + first_difference(a, c) + ")");
}

void throughput_ordering(Verdict& v, Cache& cache)
{
    Experiment e = cache.get("scenario1.json");
    auto mm = means_by_model(e.rows);
    double a = mm["simple-A"].throughput, b = mm["simple-B"].throughput, s = mm["scm"].throughput;
    double deficit = (s - a) / s;
    double runtime = total_wall_clock(e.rows);
    v.detail << "mean throughput simple-A " << a / 1e6 << " simple-B " << b / 1e6 << " scm " << s / 1e6
             << " Mbit/s, simple-A deficit " << 100.0 * deficit << "%, simple-B deficit " << 100.0 * (s - b) / s
             << "%, runtime " << runtime << " s; ";
    v.require(mm["scm"].n == 10 && mm["simple-A"].n == 10 && mm["simple-B"].n == 10, "10 paired seeds per model");
    v.require(a < b, "simple-A < simple-B");
    v.require(b < s, "simple-B < scm");
    v.require(deficit >= 0.02 && deficit <= 0.40, "simple-vs-scm deficit in [2%, 40%]");
    v.require(runtime < 600.0, "runtime < 10 min");
}

void mac_latency_agreement(Verdict& v, Cache& cache)
{
    Experiment e = cache.get("scenario1.json");
    double lo = 1e300, hi = 0.0;
    for (const auto& [name, m] : means_by_model(e.rows))
    {
        v.detail << name << " " << m.mac_latency * 1e3 << " ms, ";
        lo = std::min(lo, m.mac_latency);
        hi = std::max(hi, m.mac_latency);
    }
    double spread = (hi - lo) / lo;
    v.detail << "spread " << 100.0 * spread << "%; ";
    v.require(spread <= 0.10, "mean MAC latency within 10% across models");
}

// Per-sample complex multiply-accumulates of a short run divided by U S,
// minus N M. What is left is the share of samples that also carry the
// single-ray specular LOS component.
double scm_work_residual(int bs_side, int ue_side, int clusters, int rays)
{
    ConfigMatrix m = load_config(config_path("scenario1.json").string());
    ScenarioConfig c = m.base;
    c.model = "scm";
    c.duration_s = 0.01;
    c.bs_array_side = bs_side;
    c.ue_array_side = ue_side;
    c.scm.clusters = clusters;
    c.scm.rays_per_cluster = rays;
    Network net(c, 1);
    FadingWork work = net.run().work;
    double us = static_cast<double>(bs_side * bs_side) * ue_side * ue_side;
    return static_cast<double>(work.complex_macs) / us / static_cast<double>(work.samples) - clusters * rays;
}

void scm_speedup(Verdict& v, Cache& cache)
{
    Experiment e = cache.get("scenario1.json");
    auto mm = means_by_model(e.rows);
    double scm = mm["scm"].wall_clock;
    double speed_a = scm / mm["simple-A"].wall_clock, speed_b = scm / mm["simple-B"].wall_clock;
    v.detail << "wall clock scm " << scm << " s, speedup vs simple-A " << speed_a << ", vs simple-B " << speed_b
             << "; ";
    v.require(std::min(speed_a, speed_b) >= 5.0, "wall-clock ratio >= 5");

    struct Point
    {
        int bs, ue, n, m;
    };
    double lo = 1e300, hi = -1e300;
    for (Point p : {Point{8, 2, 12, 20}, Point{4, 2, 12, 20}, Point{8, 1, 12, 20}, Point{8, 2, 6, 20},
                    Point{8, 2, 12, 10}, Point{2, 1, 3, 5}})
    {
        double r = scm_work_residual(p.bs, p.ue, p.n, p.m);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    v.detail << "SCM MACs per sample = U S (N M + r), r in [" << lo << ", " << hi << "] over 6 array/cluster sizes; ";
    v.require(hi - lo <= 1e-9 && lo >= 0.0 && hi <= 1.0, "SCM work per sample linear in U S N M");

    // simple model: one draw and no matrix work per sample, whatever the arrays
    std::set<double> simple_draws;
    std::uint64_t simple_macs = 0;
    for (int side : {1, 2, 4, 8})
    {
        ConfigMatrix m = load_config(config_path("scenario1.json").string());
        ScenarioConfig c = m.base;
        c.model = "simple-A";
        c.duration_s = 0.01;
        c.bs_array_side = side;
        Network net(c, 1);
        FadingWork w = net.run().work;
        simple_draws.insert(static_cast<double>(w.random_draws) / static_cast<double>(w.samples));
        simple_macs += w.complex_macs;
    }
    v.detail << "simple draws per sample " << *simple_draws.begin() << ", MACs " << simple_macs << "; ";
    v.require(simple_draws.size() == 1 && simple_macs == 0, "simple-model work constant per sample");
}

void buffer_ordering(Verdict& v, Cache& cache)
{
    Experiment e = cache.get("scenario2.json");
    const std::vector<std::uint64_t> buffers = {1'000'000, 10'000'000, 20'000'000};
    std::map<std::uint64_t, std::map<std::string, ModelMeans>> by_buffer;
    for (auto b : buffers)
        by_buffer[b] = means_by_model(e.rows, b);
    for (const char* model : {"simple-B", "scm"})
    {
        v.detail << model << ":";
        for (std::size_t i = 0; i < buffers.size(); ++i)
        {
            const ModelMeans& m = by_buffer[buffers[i]][model];
            v.detail << " " << buffers[i] / 1'000'000 << "MB " << m.throughput / 1e6 << " Mbit/s " << m.pdcp_latency * 1e3
                     << " ms";
            v.require(m.n == 10, std::string(model) + " has 10 seeds per buffer");
            if (i == 0)
                continue;
            const ModelMeans& prev = by_buffer[buffers[i - 1]][model];
            v.require(m.throughput >= prev.throughput,
                      std::string(model) + " throughput non-decreasing at " + std::to_string(buffers[i]));
            v.require(m.pdcp_latency >= prev.pdcp_latency,
                      std::string(model) + " latency non-decreasing at " + std::to_string(buffers[i]));
        }
        v.detail << "; ";
    }
    const ModelMeans& s = by_buffer[20'000'000]["scm"];
    const ModelMeans& b = by_buffer[20'000'000]["simple-B"];
    v.require(s.pdcp_latency >= b.pdcp_latency, "20 MB latency scm >= simple");
    v.require(s.throughput >= b.throughput, "20 MB throughput scm >= simple");
    double runtime = total_wall_clock(e.rows);
    v.detail << "runtime " << runtime << " s; ";
    v.require(runtime < 600.0, "runtime < 10 min");
}

void tcp_slow_start_exit(Verdict& v, Cache& cache)
{
    Experiment e = cache.get("scenario2.json");
    std::map<std::string, int> causes;
    int matched = 0;
    for (const auto& x : e.exits)
    {
        ++causes[x.cause];
        matched += x.matched;
        if (x.cause == "none" || x.cause == to_string(SlowStartExitCause::SsthreshReached) || !x.matched)
            v.require(false, x.model + " B=" + std::to_string(x.b_rlc_bytes) + " seed " + std::to_string(x.seed) +
                                 " first exit '" + x.cause + "'" + (x.matched ? "" : " without a matching loss"));
    }
    v.detail << e.exits.size() << " runs, first-exit causes:";
    for (const auto& [cause, n] : causes)
        v.detail << " " << cause << "=" << n;
    v.detail << ", matched to a recorded loss " << matched << "; ";
    v.require(!e.exits.empty(), "scenario 2 produced runs");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Acceptance checks"};
    std::vector<std::string> criteria;
    std::string cache_dir = "acceptance-cache";
    app.add_option("--criterion", criteria, "Criterion to check (repeatable; default: all)");
    app.add_option("--cache", cache_dir, "Directory for cached scenario runs");
    CLI11_PARSE(app, argc, argv);

    Cache cache(cache_dir);
    const std::vector<std::pair<std::string, std::function<void(Verdict&)>>> all = {
        {"array-factor", array_factor},
        {"nakagami", nakagami},
        {"sinr-oracle", sinr_oracle},
        {"determinism", determinism},
        {"throughput-ordering", [&](Verdict& v) { throughput_ordering(v, cache); }},
        {"mac-latency-agreement", [&](Verdict& v) { mac_latency_agreement(v, cache); }},
        {"scm-speedup", [&](Verdict& v) { scm_speedup(v, cache); }},
        {"buffer-ordering", [&](Verdict& v) { buffer_ordering(v, cache); }},
        {"tcp-slow-start-exit", [&](Verdict& v) { tcp_slow_start_exit(v, cache); }},
    };
    if (criteria.empty())
        for (const auto& [name, fn] : all)
            criteria.push_back(name);

    bool ok = true;
    for (const auto& name : criteria)
    {
        auto it = std::find_if(all.begin(), all.end(), [&](const auto& c) { return c.first == name; });
        if (it == all.end())
        {
            std::cerr << "unknown criterion '" << name << "'\n";
            return 2;
        }
        Verdict v;
        try
        {
            it->second(v);
        }
        catch (const std::exception& ex)
        {
            v.require(false, std::string("error: ") + ex.what());
        }
        std::cout << (v.pass ? "PASS " : "FAIL ") << name << ": " << v.detail.str() << std::endl;
        ok = ok && v.pass;
    }
    return ok ? 0 : 1;
}
