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


#ifndef MMWSIM_RUNNER_HPP
#define MMWSIM_RUNNER_HPP

#include "mmwsim/network.hpp"
#include "mmwsim/scenario.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mmwsim
{

struct MetricsRow
{
    std::string scenario;
    std::string model;
    int n_ue = 0;
    std::uint64_t b_rlc_bytes = 0;
    std::uint64_t seed = 0;
    double throughput_bps = 0.0; // mean over UEs
    double mac_latency_s = 0.0;
    double pdcp_latency_s = 0.0;
    std::uint64_t drops = 0;
    int handovers = 0;
    double wall_clock_s = 0.0;
    std::uint64_t events = 0;
    double mac_latency_p95_s = 0.0;
    double pdcp_latency_p95_s = 0.0;
    double mean_sinr_db = 0.0;
    std::uint64_t complex_macs = 0;
    std::string slow_start_exit; // cause of the first exit, TCP only

    bool operator==(const MetricsRow&) const = default;
};

// Column names in MetricsRow field order.
const std::vector<std::string>& csv_columns();

MetricsRow make_row(const ScenarioConfig& config, std::uint64_t seed, const RunResult& result);

struct CellResult
{
    ScenarioConfig config;
    std::uint64_t seed = 0;
    std::optional<RunResult> result;
    MetricsRow row;
    std::string error; // empty on success
};

// Runs every (config, seed) cell on up to `threads` workers. Results come
// back in input order (config-major, then seed order), whatever the
// completion order. A failing cell records its error instead of throwing.
std::vector<CellResult> run_cells(const std::vector<ScenarioConfig>& configs, unsigned threads = 0);

// One row per seed of a single config. Throws std::runtime_error naming the
// scenario, model and seed if any cell fails.
std::vector<MetricsRow> run_experiment(const ScenarioConfig& config, unsigned threads = 0);

struct ComparisonEntry
{
    std::string scenario;
    int n_ue = 0;
    std::uint64_t b_rlc_bytes = 0;
    std::string model;
    std::string reference;
    std::size_t seeds = 0;
    double throughput_delta_pct = 0.0; // mean over seeds of (model - reference) / reference
    double throughput_ci_pct = 0.0;    // 95% half-width of that mean
    double mac_latency_delta_pct = 0.0;
    double pdcp_latency_delta_pct = 0.0;
    double speedup = 0.0;              // wallclock(reference) / wallclock(model)
    bool model_not_above_reference = false;
};

struct ComparisonReport
{
    std::vector<ComparisonEntry> entries;
};

// Pairs rows by (scenario, load, buffer, seed) against the reference model.
// Throws std::invalid_argument when the seed sets of the paired models
// differ or the reference is missing for a load point.
ComparisonReport compare_models(const std::vector<MetricsRow>& rows, const std::string& reference = "scm");

std::string format_double(double v);

void write_csv(const std::vector<MetricsRow>& rows, std::ostream& out);
void write_csv(const std::vector<MetricsRow>& rows, const std::string& path);
std::vector<MetricsRow> read_csv(std::istream& in);
std::vector<MetricsRow> read_csv(const std::string& path);

void write_report_csv(const ComparisonReport& report, std::ostream& out);
void write_report_csv(const ComparisonReport& report, const std::string& path);

} // namespace mmwsim

#endif
