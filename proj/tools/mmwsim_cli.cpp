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
#include "mmwsim/scenario.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace mmwsim;

namespace
{

struct Common
{
    int seeds = 0;
    bool full = false;
    unsigned threads = 0;
};

std::vector<ScenarioConfig> expand(const std::vector<std::string>& paths, const Common& opt)
{
    std::vector<ScenarioConfig> out;
    for (const auto& path : paths)
    {
        ConfigMatrix m = load_config(path);
        if (opt.full)
        {
            m.base.duration_s = 10.0;
            m.base.seeds.clear();
            for (int s = 1; s <= 20; ++s)
                m.base.seeds.push_back(static_cast<std::uint64_t>(s));
            if (m.base.kind == ScenarioKind::UdpGrid)
                m.n_ue_per_bs = {2, 5, 10};
        }
        if (opt.seeds > 0)
        {
            m.base.seeds.clear();
            for (int s = 1; s <= opt.seeds; ++s)
                m.base.seeds.push_back(static_cast<std::uint64_t>(s));
        }
        for (auto& c : m.cells())
            out.push_back(std::move(c));
    }
    return out;
}

// Returns the successful rows; reports failures on stderr.
std::vector<MetricsRow> execute(const std::vector<ScenarioConfig>& configs, unsigned threads, bool& failed)
{
    std::vector<MetricsRow> rows;
    for (auto& cell : run_cells(configs, threads))
    {
        if (!cell.error.empty())
        {
            std::cerr << "error: " << cell.error << '\n';
            failed = true;
            continue;
        }
        rows.push_back(cell.row);
    }
    return rows;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Packet-level mmWave cellular simulator"};
    app.require_subcommand(1);

    Common opt;
    std::string config_path, out_path, rows_path, reference = "scm";
    std::vector<std::string> config_paths;

    auto* sim = app.add_subcommand("simulate", "Run every cell of one config and write per-seed metrics");
    sim->add_option("--config", config_path, "Config file (JSON)")->required()->check(CLI::ExistingFile);
    sim->add_option("--seeds", opt.seeds, "Run seeds 1..N instead of the configured list")->check(CLI::PositiveNumber);
    sim->add_option("--out", out_path, "Output CSV (default: stdout)");
    sim->add_flag("--full", opt.full, "Full-scale runs: 10 s, 20 seeds, all UDP loads");
    sim->add_option("--threads", opt.threads, "Worker threads (default: all cores)");

    auto* cmp = app.add_subcommand("compare", "Run several configs and write the paired model comparison");
    cmp->add_option("--configs", config_paths, "Config files (JSON)")->required()->check(CLI::ExistingFile);
    cmp->add_option("--out", out_path, "Comparison CSV")->required();
    cmp->add_option("--rows", rows_path, "Also write the per-seed metrics CSV here");
    cmp->add_option("--reference", reference, "Reference model for the deltas");
    cmp->add_option("--seeds", opt.seeds, "Run seeds 1..N instead of the configured list")->check(CLI::PositiveNumber);
    cmp->add_flag("--full", opt.full, "Full-scale runs: 10 s, 20 seeds, all UDP loads");
    cmp->add_option("--threads", opt.threads, "Worker threads (default: all cores)");

    CLI11_PARSE(app, argc, argv);

    try
    {
        bool failed = false;
        if (sim->parsed())
        {
            auto rows = execute(expand({config_path}, opt), opt.threads, failed);
            if (out_path.empty())
                write_csv(rows, std::cout);
            else
                write_csv(rows, out_path);
        }
        else
        {
            auto rows = execute(expand(config_paths, opt), opt.threads, failed);
            if (!rows_path.empty())
                write_csv(rows, rows_path);
            write_report_csv(compare_models(rows, reference), out_path);
        }
        return failed ? 1 : 0;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
