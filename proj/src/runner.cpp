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


#include "mmwsim/runner.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>
#include <type_traits>

namespace mmwsim
{

const std::vector<std::string>& csv_columns()
{
    static const std::vector<std::string> cols = {
        "scenario",       "model",          "n_ue",          "b_rlc_bytes",       "seed",
        "throughput_bps", "mac_latency_s",  "pdcp_latency_s", "drops",            "handovers",
        "wall_clock_s",   "events",         "mac_latency_p95_s", "pdcp_latency_p95_s", "mean_sinr_db",
        "complex_macs",   "slow_start_exit"};
    return cols;
}

MetricsRow make_row(const ScenarioConfig& config, std::uint64_t seed, const RunResult& r)
{
    MetricsRow row;
    row.scenario = config.scenario_id();
    row.model = config.model;
    row.n_ue = static_cast<int>(r.ues.size());
    row.b_rlc_bytes = config.b_rlc_bytes;
    row.seed = seed;
    row.throughput_bps = r.mean_throughput_bps();
    row.mac_latency_s = r.mac.mean;
    row.pdcp_latency_s = r.pdcp.mean;
    row.drops = r.drops;
    row.handovers = r.handovers;
    row.wall_clock_s = r.stats.wall_clock_s;
    row.events = r.stats.events_processed;
    row.mac_latency_p95_s = r.mac.p95;
    row.pdcp_latency_p95_s = r.pdcp.p95;
    row.mean_sinr_db = r.mean_sinr_db;
    row.complex_macs = r.work.complex_macs;
    if (!r.slow_start_exits.empty())
        row.slow_start_exit = to_string(r.slow_start_exits.front().cause);
    return row;
}

std::vector<CellResult> run_cells(const std::vector<ScenarioConfig>& configs, unsigned threads)
{
    std::vector<CellResult> cells;
    for (const auto& c : configs)
        for (auto seed : c.seeds)
        {
            CellResult cell;
            cell.config = c;
            cell.seed = seed;
            cells.push_back(std::move(cell));
        }

    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, cells.size())));

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next++; i < cells.size(); i = next++)
        {
            CellResult& cell = cells[i];
            try
            {
                cell.result = simulate_once(cell.config, cell.seed);
                cell.row = make_row(cell.config, cell.seed, *cell.result);
            }
            catch (const std::exception& e)
            {
                cell.error = "scenario " + cell.config.scenario_id() + ", model " + cell.config.model + ", seed " +
                             std::to_string(cell.seed) + ": " + e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < threads; ++k)
        pool.emplace_back(worker);
    worker();
    for (auto& th : pool)
        th.join();
    return cells;
}

std::vector<MetricsRow> run_experiment(const ScenarioConfig& config, unsigned threads)
{
    std::vector<MetricsRow> rows;
    for (auto& cell : run_cells({config}, threads))
    {
        if (!cell.error.empty())
            throw std::runtime_error(cell.error);
        rows.push_back(cell.row);
    }
    return rows;
}

namespace
{

double mean_of(const std::vector<double>& v)
{
    double s = 0.0;
    for (double x : v)
        s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double ci95(const std::vector<double>& v)
{
    if (v.size() < 2)
        return 0.0;
    double m = mean_of(v), ss = 0.0;
    for (double x : v)
        ss += (x - m) * (x - m);
    return 1.96 * std::sqrt(ss / static_cast<double>(v.size() - 1)) / std::sqrt(static_cast<double>(v.size()));
}

double rel_pct(double value, double reference)
{
    return reference == 0.0 ? 0.0 : 100.0 * (value - reference) / reference;
}

} // namespace

ComparisonReport compare_models(const std::vector<MetricsRow>& rows, const std::string& reference)
{
    using Point = std::tuple<std::string, int, std::uint64_t>;
    std::map<Point, std::map<std::string, std::map<std::uint64_t, const MetricsRow*>>> grouped;
    std::vector<Point> point_order;
    std::map<Point, std::vector<std::string>> model_order;
    for (const auto& r : rows)
    {
        Point p{r.scenario, r.n_ue, r.b_rlc_bytes};
        if (!grouped.count(p))
            point_order.push_back(p);
        auto& models = grouped[p];
        if (!models.count(r.model))
            model_order[p].push_back(r.model);
        models[r.model][r.seed] = &r;
    }

    ComparisonReport report;
    for (const auto& p : point_order)
    {
        auto& models = grouped[p];
        auto ref_it = models.find(reference);
        if (ref_it == models.end())
            throw std::invalid_argument("no '" + reference + "' rows for scenario " + std::get<0>(p) +
                                        " to compare against");
        const auto& ref = ref_it->second;
        for (const auto& name : model_order[p])
        {
            const auto& runs = models[name];
            if (runs.size() != ref.size() ||
                !std::equal(runs.begin(), runs.end(), ref.begin(),
                            [](const auto& a, const auto& b) { return a.first == b.first; }))
                throw std::invalid_argument("model '" + name + "' and '" + reference + "' ran different seeds in scenario " +
                                            std::get<0>(p));
            std::vector<double> thr, mac, pdcp;
            double wall_ref = 0.0, wall_model = 0.0, thr_model = 0.0, thr_ref = 0.0;
            for (const auto& [seed, row] : runs)
            {
                const MetricsRow* r0 = ref.at(seed);
                thr.push_back(rel_pct(row->throughput_bps, r0->throughput_bps));
                mac.push_back(rel_pct(row->mac_latency_s, r0->mac_latency_s));
                pdcp.push_back(rel_pct(row->pdcp_latency_s, r0->pdcp_latency_s));
                wall_ref += r0->wall_clock_s;
                wall_model += row->wall_clock_s;
                thr_model += row->throughput_bps;
                thr_ref += r0->throughput_bps;
            }
            ComparisonEntry e;
            e.scenario = std::get<0>(p);
            e.n_ue = std::get<1>(p);
            e.b_rlc_bytes = std::get<2>(p);
            e.model = name;
            e.reference = reference;
            e.seeds = runs.size();
            e.throughput_delta_pct = mean_of(thr);
            e.throughput_ci_pct = ci95(thr);
            e.mac_latency_delta_pct = mean_of(mac);
            e.pdcp_latency_delta_pct = mean_of(pdcp);
            e.speedup = name == reference ? 1.0 : (wall_model > 0.0 ? wall_ref / wall_model : 0.0);
            e.model_not_above_reference = thr_model <= thr_ref;
            report.entries.push_back(e);
        }
    }
    return report;
}

std::string format_double(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace
{

std::string quote(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s)
    {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i)
    {
        char c = line[i];
        if (quoted)
        {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"')
            {
                cur += '"';
                ++i;
            }
            else if (c == '"')
                quoted = false;
            else
                cur += c;
        }
        else if (c == '"')
            quoted = true;
        else if (c == ',')
        {
            out.push_back(cur);
            cur.clear();
        }
        else
            cur += c;
    }
    out.push_back(cur);
    return out;
}

template <typename T>
T parse_number(const std::string& s, const std::string& column)
{
    T v{};
    if constexpr (std::is_floating_point_v<T>)
    {
        if (s == "nan")
            return std::nan("");
        if (s == "inf" || s == "-inf")
            return s[0] == '-' ? -INFINITY : INFINITY;
    }
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw std::invalid_argument("bad value '" + s + "' in CSV column " + column);
    return v;
}

} // namespace

void write_csv(const std::vector<MetricsRow>& rows, std::ostream& out)
{
    const auto& cols = csv_columns();
    for (std::size_t i = 0; i < cols.size(); ++i)
        out << (i ? "," : "") << cols[i];
    out << '\n';
    for (const auto& r : rows)
    {
        out << quote(r.scenario) << ',' << quote(r.model) << ',' << r.n_ue << ',' << r.b_rlc_bytes << ',' << r.seed
            << ',' << format_double(r.throughput_bps) << ',' << format_double(r.mac_latency_s) << ','
            << format_double(r.pdcp_latency_s) << ',' << r.drops << ',' << r.handovers << ','
            << format_double(r.wall_clock_s) << ',' << r.events << ',' << format_double(r.mac_latency_p95_s) << ','
            << format_double(r.pdcp_latency_p95_s) << ',' << format_double(r.mean_sinr_db) << ',' << r.complex_macs
            << ',' << quote(r.slow_start_exit) << '\n';
    }
}

void write_csv(const std::vector<MetricsRow>& rows, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    write_csv(rows, out);
    out.flush();
    if (!out)
        throw std::runtime_error("failed writing '" + path + "'");
}

std::vector<MetricsRow> read_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line))
        throw std::invalid_argument("empty CSV");
    const auto& cols = csv_columns();
    if (split_csv_line(line) != cols)
        throw std::invalid_argument("unexpected CSV header: " + line);
    std::vector<MetricsRow> rows;
    while (std::getline(in, line))
    {
        if (line.empty())
            continue;
        auto f = split_csv_line(line);
        if (f.size() != cols.size())
            throw std::invalid_argument("CSV row has " + std::to_string(f.size()) + " fields: " + line);
        MetricsRow r;
        r.scenario = f[0];
        r.model = f[1];
        r.n_ue = parse_number<int>(f[2], cols[2]);
        r.b_rlc_bytes = parse_number<std::uint64_t>(f[3], cols[3]);
        r.seed = parse_number<std::uint64_t>(f[4], cols[4]);
        r.throughput_bps = parse_number<double>(f[5], cols[5]);
        r.mac_latency_s = parse_number<double>(f[6], cols[6]);
        r.pdcp_latency_s = parse_number<double>(f[7], cols[7]);
        r.drops = parse_number<std::uint64_t>(f[8], cols[8]);
        r.handovers = parse_number<int>(f[9], cols[9]);
        r.wall_clock_s = parse_number<double>(f[10], cols[10]);
        r.events = parse_number<std::uint64_t>(f[11], cols[11]);
        r.mac_latency_p95_s = parse_number<double>(f[12], cols[12]);
        r.pdcp_latency_p95_s = parse_number<double>(f[13], cols[13]);
        r.mean_sinr_db = parse_number<double>(f[14], cols[14]);
        r.complex_macs = parse_number<std::uint64_t>(f[15], cols[15]);
        r.slow_start_exit = f[16];
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<MetricsRow> read_csv(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open '" + path + "'");
    return read_csv(in);
}

void write_report_csv(const ComparisonReport& report, std::ostream& out)
{
    out << "scenario,n_ue,b_rlc_bytes,model,reference,seeds,throughput_delta_pct,throughput_ci_pct,"
           "mac_latency_delta_pct,pdcp_latency_delta_pct,speedup,model_not_above_reference\n";
    for (const auto& e : report.entries)
        out << quote(e.scenario) << ',' << e.n_ue << ',' << e.b_rlc_bytes << ',' << quote(e.model) << ','
            << quote(e.reference) << ',' << e.seeds << ',' << format_double(e.throughput_delta_pct) << ','
            << format_double(e.throughput_ci_pct) << ',' << format_double(e.mac_latency_delta_pct) << ','
            << format_double(e.pdcp_latency_delta_pct) << ',' << format_double(e.speedup) << ','
            << (e.model_not_above_reference ? 1 : 0) << '\n';
}

void write_report_csv(const ComparisonReport& report, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    write_report_csv(report, out);
    out.flush();
    if (!out)
        throw std::runtime_error("failed writing '" + path + "'");
}

} // namespace mmwsim
