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


#include "mmwsim/scenario.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace mmwsim
{

using nlohmann::json;

ScenarioKind parse_scenario_kind(const std::string& s)
{
    if (s == "udp-grid")
        return ScenarioKind::UdpGrid;
    if (s == "tcp-line")
        return ScenarioKind::TcpLine;
    throw std::invalid_argument("unknown scenario '" + s + "' (expected udp-grid|tcp-line)");
}

std::string to_string(ScenarioKind k)
{
    return k == ScenarioKind::UdpGrid ? "udp-grid" : "tcp-line";
}

namespace
{

void require(bool ok, const std::string& what)
{
    if (!ok)
        throw std::invalid_argument(what);
}

} // namespace

void ScenarioConfig::validate() const
{
    require(duration_s > 0.0 && std::isfinite(duration_s), "duration_s must be positive");
    require(udp_rate_bps > 0.0, "udp_rate_bps must be positive");
    require(packet_bytes > 0, "packet_bytes must be positive");
    require(b_rlc_bytes > 0, "b_rlc_bytes must be positive");
    require(!seeds.empty(), "at least one seed is required");
    require(carrier_hz > 0.0, "carrier_hz must be positive");
    require(bandwidth_hz > 0.0, "bandwidth_hz must be positive");
    require(beam_period_s > 0.0, "beam_period_s must be positive");
    require(std::isfinite(bs_tx_power_dbm), "bs_tx_power_dbm must be finite");
    require(bs_height_m > 0.0 && ue_height_m > 0.0, "node heights must be positive");
    require(disc_radius_m > 0.0, "disc_radius_m must be positive");
    require(square_side_m > 0.0, "square_side_m must be positive");
    require(ue_speed_mps >= 0.0, "ue_speed_mps must be non-negative");
    require(path_length_m > 0.0, "path_length_m must be positive");
    require(fallback_rate_bps > 0.0, "fallback_rate_bps must be positive");
    require(bs_array_side >= 1 && ue_array_side >= 1, "array sides must be >= 1");
    require(hysteresis_db >= 0.0, "hysteresis_db must be non-negative");
    require(epoch_s > 0.0, "epoch_s must be positive");
    require(mss_bytes > 0 && initial_cwnd_mss >= 1, "mss_bytes and initial_cwnd_mss must be positive");
    require(core_delay_s >= 0.0 && uplink_delay_s >= 0.0, "delays must be non-negative");
    require(max_window_bytes >= static_cast<std::uint64_t>(mss_bytes), "max_window_bytes must hold one MSS");
    require(min_rto_s > 0.0, "min_rto_s must be positive");
    if (kind == ScenarioKind::TcpLine)
        require(!bs_offsets_m.empty(), "bs_offsets_m needs at least one base station");
    require(n_ue_per_bs >= 1, "n_ue_per_bs must be >= 1");
    if (strict && kind == ScenarioKind::UdpGrid)
        require(n_ue_per_bs == 2 || n_ue_per_bs == 5 || n_ue_per_bs == 10,
                "n_ue_per_bs must be 2, 5 or 10 (set strict=false to allow " + std::to_string(n_ue_per_bs) + ")");
    parse_model_selector(model);
    pathloss.validate();
    scm.validate();
    sectored.validate();
    noise().validate();
    rate_map.validate();
    frame().validate();
}

NoiseConfig ScenarioConfig::noise() const
{
    NoiseConfig n;
    n.density_dbm_hz = noise_density_dbm_hz;
    n.noise_figure_db = noise_figure_db;
    n.bandwidth_hz = bandwidth_hz;
    return n;
}

FrameConfig ScenarioConfig::frame() const
{
    FrameConfig f;
    f.slot_duration_s = slot_duration_s;
    f.symbols_per_slot = symbols_per_slot;
    f.control_symbols = control_symbols;
    f.bandwidth_hz = bandwidth_hz;
    return f;
}

double ScenarioConfig::wavelength_m() const
{
    return kSpeedOfLight / carrier_hz;
}

std::vector<ScenarioConfig> ConfigMatrix::cells() const
{
    std::vector<ScenarioConfig> out;
    auto loads = n_ue_per_bs.empty() ? std::vector<int>{base.n_ue_per_bs} : n_ue_per_bs;
    auto buffers = b_rlc_bytes.empty() ? std::vector<std::uint64_t>{base.b_rlc_bytes} : b_rlc_bytes;
    auto names = models.empty() ? std::vector<std::string>{base.model} : models;
    for (int load : loads)
        for (auto b : buffers)
            for (const auto& m : names)
            {
                ScenarioConfig c = base;
                c.n_ue_per_bs = load;
                c.b_rlc_bytes = b;
                c.model = m;
                c.validate();
                out.push_back(std::move(c));
            }
    return out;
}

namespace
{

template <typename T>
T as(const json& v, const std::string& key)
{
    try
    {
        return v.get<T>();
    }
    catch (const json::exception&)
    {
        throw std::invalid_argument("config key '" + key + "' has the wrong type (" + v.dump() + ")");
    }
}

std::uint64_t as_bytes(const json& v, const std::string& key)
{
    if (!v.is_number() || v.get<double>() < 0.0)
        throw std::invalid_argument("config key '" + key + "' must be a non-negative number");
    return static_cast<std::uint64_t>(std::llround(v.get<double>()));
}

template <typename T, typename Fn>
std::vector<T> scalar_or_list(const json& v, const std::string& key, Fn convert)
{
    std::vector<T> out;
    if (v.is_array())
    {
        if (v.empty())
            throw std::invalid_argument("config key '" + key + "' must not be an empty list");
        for (const auto& e : v)
            out.push_back(convert(e, key));
    }
    else
        out.push_back(convert(v, key));
    return out;
}

} // namespace

ConfigMatrix parse_config(const std::string& text, const std::string& origin)
{
    json doc;
    try
    {
        doc = json::parse(text, nullptr, true, true);
    }
    catch (const json::parse_error& e)
    {
        throw std::invalid_argument(origin + ": malformed config: " + e.what());
    }
    if (!doc.is_object())
        throw std::invalid_argument(origin + ": config must be a JSON object");

    ConfigMatrix m;
    ScenarioConfig& c = m.base;
    for (int s = 1; s <= 20; ++s)
        c.seeds.push_back(static_cast<std::uint64_t>(s));

    using Setter = std::function<void(const json&, const std::string&)>;
    auto num = [](double& dst) -> Setter { return [&dst](const json& v, const std::string& k) { dst = as<double>(v, k); }; };
    auto integer = [](int& dst) -> Setter { return [&dst](const json& v, const std::string& k) { dst = as<int>(v, k); }; };
    auto flag = [](bool& dst) -> Setter { return [&dst](const json& v, const std::string& k) { dst = as<bool>(v, k); }; };
    auto degrees = [](double& dst) -> Setter {
        return [&dst](const json& v, const std::string& k) { dst = as<double>(v, k) * kPi / 180.0; };
    };

    const std::map<std::string, Setter> setters = {
        {"scenario", [&](const json& v, const std::string& k) { c.kind = parse_scenario_kind(as<std::string>(v, k)); }},
        {"name", [&](const json& v, const std::string& k) { c.name = as<std::string>(v, k); }},
        {"model",
         [&](const json& v, const std::string& k) {
             m.models = scalar_or_list<std::string>(v, k, [](const json& e, const std::string& kk) {
                 return as<std::string>(e, kk);
             });
         }},
        {"n_ue_per_bs",
         [&](const json& v, const std::string& k) {
             m.n_ue_per_bs = scalar_or_list<int>(v, k, [](const json& e, const std::string& kk) { return as<int>(e, kk); });
         }},
        {"b_rlc_bytes",
         [&](const json& v, const std::string& k) { m.b_rlc_bytes = scalar_or_list<std::uint64_t>(v, k, as_bytes); }},
        {"seeds",
         [&](const json& v, const std::string& k) {
             c.seeds.clear();
             if (v.is_number_integer())
             {
                 auto n = as<long long>(v, k);
                 if (n < 1)
                     throw std::invalid_argument("config key 'seeds' must be >= 1");
                 for (long long s = 1; s <= n; ++s)
                     c.seeds.push_back(static_cast<std::uint64_t>(s));
             }
             else
                 c.seeds = as<std::vector<std::uint64_t>>(v, k);
         }},
        {"udp_rate_bps", num(c.udp_rate_bps)},
        {"packet_bytes", integer(c.packet_bytes)},
        {"duration_s", num(c.duration_s)},
        {"carrier_hz", num(c.carrier_hz)},
        {"bandwidth_hz", num(c.bandwidth_hz)},
        {"beam_period_s", num(c.beam_period_s)},
        {"bs_tx_power_dbm", num(c.bs_tx_power_dbm)},
        {"bs_height_m", num(c.bs_height_m)},
        {"ue_height_m", num(c.ue_height_m)},
        {"disc_radius_m", num(c.disc_radius_m)},
        {"square_side_m", num(c.square_side_m)},
        {"ue_speed_mps", num(c.ue_speed_mps)},
        {"path_length_m", num(c.path_length_m)},
        {"bs_offsets_m", [&](const json& v, const std::string& k) { c.bs_offsets_m = as<std::vector<double>>(v, k); }},
        {"bs_lateral_m", num(c.bs_lateral_m)},
        {"fallback_rate_bps", num(c.fallback_rate_bps)},
        {"bs_array_side", integer(c.bs_array_side)},
        {"ue_array_side", integer(c.ue_array_side)},
        {"beamforming",
         [&](const json& v, const std::string& k) { c.beamforming = parse_beamforming_mode(as<std::string>(v, k)); }},
        {"sector_beamwidth_deg", degrees(c.sectored.beamwidth)},
        {"sector_main_gain_db", num(c.sectored.main_gain_db)},
        {"sector_side_gain_db", num(c.sectored.side_gain_db)},
        {"shadowing", flag(c.pathloss.shadowing_enabled)},
        {"shadowing_correlated", flag(c.pathloss.shadowing_correlated)},
        {"noise_figure_db", num(c.noise_figure_db)},
        {"noise_density_dbm_hz", num(c.noise_density_dbm_hz)},
        {"se_cap", num(c.rate_map.se_cap)},
        {"sinr_floor_db", num(c.rate_map.sinr_floor_db)},
        {"slot_duration_s", num(c.slot_duration_s)},
        {"symbols_per_slot", integer(c.symbols_per_slot)},
        {"control_symbols", integer(c.control_symbols)},
        {"hysteresis_db", num(c.hysteresis_db)},
        {"epoch_s", num(c.epoch_s)},
        {"scm_clusters", integer(c.scm.clusters)},
        {"scm_rays", integer(c.scm.rays_per_cluster)},
        {"scm_delay_spread_s", num(c.scm.delay_spread_s)},
        {"scm_angular_spread_deg", num(c.scm.cluster_angular_spread_deg)},
        {"scm_k_db", num(c.scm.ricean_k_db)},
        {"scm_epoch_s", num(c.scm.update_epoch_s)},
        {"scm_power_jitter_db", num(c.scm.cluster_power_jitter_db)},
        {"scm_sector_deg", num(c.scm.cluster_sector_deg)},
        {"scm_combining",
         [&](const json& v, const std::string& k) { c.scm.combining = parse_scm_combining(as<std::string>(v, k)); }},
        {"mss_bytes", integer(c.mss_bytes)},
        {"initial_cwnd_mss", integer(c.initial_cwnd_mss)},
        {"core_delay_s", num(c.core_delay_s)},
        {"uplink_delay_s", num(c.uplink_delay_s)},
        {"max_window_bytes", [&](const json& v, const std::string& k) { c.max_window_bytes = as_bytes(v, k); }},
        {"min_rto_s", num(c.min_rto_s)},
        {"strict", flag(c.strict)},
    };

    for (const auto& [key, value] : doc.items())
    {
        auto it = setters.find(key);
        if (it == setters.end())
            throw std::invalid_argument(origin + ": unknown config key '" + key + "'");
        try
        {
            it->second(value, key);
        }
        catch (const std::invalid_argument& e)
        {
            throw std::invalid_argument(origin + ": " + e.what());
        }
    }
    if (!doc.contains("scenario"))
        throw std::invalid_argument(origin + ": config key 'scenario' is required");

    if (!m.models.empty())
        c.model = m.models.front();
    if (!m.b_rlc_bytes.empty())
        c.b_rlc_bytes = m.b_rlc_bytes.front();
    if (!m.n_ue_per_bs.empty())
        c.n_ue_per_bs = m.n_ue_per_bs.front();
    try
    {
        for (const auto& cell : m.cells())
            cell.validate();
    }
    catch (const std::invalid_argument& e)
    {
        throw std::invalid_argument(origin + ": " + e.what());
    }
    return m;
}

ConfigMatrix load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

Vec3 position_at(const NodeState& node, double t)
{
    if (t < 0.0)
        throw std::invalid_argument("position_at: negative time");
    double speed = node.velocity.norm();
    if (speed == 0.0)
        return node.position;
    double travel = std::min(speed * t, node.travel_limit_m);
    return node.position + node.velocity * (travel / speed);
}

namespace
{

NodeState make_bs(int id, const Vec3& pos, const ScenarioConfig& c)
{
    NodeState n;
    n.id = id;
    n.role = NodeRole::Bs;
    n.position = pos;
    n.tx_power_dbm = c.bs_tx_power_dbm;
    n.array = UpaConfig::square(c.bs_array_side);
    return n;
}

NodeState make_ue(int id, const Vec3& pos, const ScenarioConfig& c)
{
    NodeState n;
    n.id = id;
    n.role = NodeRole::Ue;
    n.position = pos;
    n.array = UpaConfig::square(c.ue_array_side);
    return n;
}

} // namespace

Deployment build_udp_scenario(const ScenarioConfig& config, RandomStream& placement)
{
    config.validate();
    Deployment d;
    const double h = config.square_side_m / 2.0;
    const Vec3 sites[] = {{0.0, 0.0, config.bs_height_m},
                          {-h, -h, config.bs_height_m},
                          {h, -h, config.bs_height_m},
                          {h, h, config.bs_height_m},
                          {-h, h, config.bs_height_m}};
    for (const auto& s : sites)
    {
        int id = static_cast<int>(d.nodes.size());
        d.nodes.push_back(make_bs(id, s, config));
        d.bs_ids.push_back(id);
    }
    for (int bs : d.bs_ids)
    {
        const Vec3 centre = d.node(bs).position;
        for (int k = 0; k < config.n_ue_per_bs; ++k)
        {
            double r = config.disc_radius_m * std::sqrt(placement.uniform());
            double a = placement.uniform(-kPi, kPi);
            int id = static_cast<int>(d.nodes.size());
            d.nodes.push_back(make_ue(id, {centre.x + r * std::cos(a), centre.y + r * std::sin(a), config.ue_height_m}, config));
            d.ue_ids.push_back(id);
            d.home_bs.push_back(bs);
        }
    }
    return d;
}

Deployment build_tcp_scenario(const ScenarioConfig& config)
{
    config.validate();
    Deployment d;
    for (double offset : config.bs_offsets_m)
    {
        int id = static_cast<int>(d.nodes.size());
        d.nodes.push_back(make_bs(id, {offset, config.bs_lateral_m, config.bs_height_m}, config));
        d.bs_ids.push_back(id);
    }

    NodeState fb;
    fb.id = static_cast<int>(d.nodes.size());
    fb.role = NodeRole::FallbackBs;
    fb.position = {config.path_length_m / 2.0, -config.bs_lateral_m, config.bs_height_m};
    fb.tx_power_dbm = config.bs_tx_power_dbm;
    d.nodes.push_back(fb);
    d.fallback_id = fb.id;

    NodeState ue = make_ue(static_cast<int>(d.nodes.size()), {0.0, 0.0, config.ue_height_m}, config);
    ue.velocity = {config.ue_speed_mps, 0.0, 0.0};
    ue.travel_limit_m = config.path_length_m;
    d.nodes.push_back(ue);
    d.ue_ids.push_back(ue.id);
    d.home_bs.push_back(d.bs_ids.front());
    return d;
}

Deployment build_deployment(const ScenarioConfig& config, RandomStream& placement)
{
    return config.kind == ScenarioKind::UdpGrid ? build_udp_scenario(config, placement) : build_tcp_scenario(config);
}

} // namespace mmwsim
