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


#include "mmwsim/fading.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mmwsim
{

double ChannelSample::total_gain_linear() const
{
    return fading * std::pow(10.0, (bf_gain_db - pathloss_db) / 10.0);
}

double ChannelSample::total_gain_db() const
{
    return 10.0 * std::log10(total_gain_linear());
}

void NakagamiParams::validate() const
{
    if (!(m_los >= 0.5) || !(m_nlos >= 0.5))
        throw std::invalid_argument("Nakagami m must be >= 0.5");
    if (!(omega > 0.0))
        throw std::invalid_argument("Nakagami omega must be positive");
}

double sample_nakagami_gain(double m, double omega, RandomStream& stream)
{
    if (!(m >= 0.5))
        throw std::invalid_argument("Nakagami m must be >= 0.5, got " + std::to_string(m));
    if (!(omega > 0.0))
        throw std::invalid_argument("Nakagami omega must be positive");
    return stream.gamma(m, omega / m);
}

ScmCombining parse_scm_combining(const std::string& s)
{
    if (s == "wideband")
        return ScmCombining::Wideband;
    if (s == "narrowband")
        return ScmCombining::Narrowband;
    throw std::invalid_argument("unknown SCM combining '" + s + "' (expected wideband|narrowband)");
}

std::string to_string(ScmCombining c)
{
    return c == ScmCombining::Wideband ? "wideband" : "narrowband";
}

void ScmConfig::validate() const
{
    if (clusters < 1)
        throw std::invalid_argument("SCM cluster count must be >= 1");
    if (rays_per_cluster < 1)
        throw std::invalid_argument("SCM rays per cluster must be >= 1");
    if (!(delay_spread_s > 0.0))
        throw std::invalid_argument("SCM delay spread must be positive");
    if (!(cluster_angular_spread_deg > 0.0))
        throw std::invalid_argument("SCM angular spread must be positive");
    if (!(update_epoch_s > 0.0))
        throw std::invalid_argument("SCM update epoch must be positive");
    if (cluster_power_jitter_db < 0.0)
        throw std::invalid_argument("SCM cluster power jitter must be non-negative");
    if (cluster_sector_deg < 0.0 || cluster_sector_deg > 360.0)
        throw std::invalid_argument("SCM cluster sector must lie in [0, 360] degrees");
}

double specular_power_fraction(double k_db)
{
    if (std::isinf(k_db))
        return k_db > 0 ? 1.0 : 0.0;
    double k = std::pow(10.0, k_db / 10.0);
    return k / (1.0 + k);
}

namespace
{

constexpr double kDeg = kPi / 180.0;

Direction offset_direction(const Direction& base, double d_zenith, double d_azimuth)
{
    Direction d;
    d.zenith = std::clamp(base.zenith + d_zenith, 0.0, kPi);
    d.azimuth = wrap_angle(base.azimuth + d_azimuth);
    return d;
}

} // namespace

ScmLargeScale scm_draw_large_scale(const Direction& los_departure, const Direction& los_arrival,
                                   const ScmConfig& config, LosCondition condition, RandomStream& stream, double t)
{
    config.validate();
    ScmLargeScale ls;
    ls.condition = condition;
    ls.drawn_at = t;
    ls.epoch_index = static_cast<std::int64_t>(std::floor(t / config.update_epoch_s + 1e-9));
    ls.k_factor_db = condition == LosCondition::Los ? config.ricean_k_db : -INFINITY;

    std::vector<ScmCluster> diffuse(static_cast<std::size_t>(config.clusters));
    for (auto& c : diffuse)
        c.delay_s = stream.exponential(config.delay_spread_s);
    std::sort(diffuse.begin(), diffuse.end(), [](const ScmCluster& a, const ScmCluster& b) {
        return a.delay_s < b.delay_s;
    });

    const double half_sector = 0.5 * config.cluster_sector_deg * kDeg;
    double total = 0.0;
    for (auto& c : diffuse)
    {
        double jitter_db = config.cluster_power_jitter_db * stream.normal();
        c.power = std::exp(-c.delay_s / config.delay_spread_s) * std::pow(10.0, jitter_db / 10.0);
        total += c.power;
        c.departure = offset_direction(los_departure, stream.uniform(-half_sector, half_sector) / 2.0,
                                       stream.uniform(-half_sector, half_sector));
        c.arrival = offset_direction(los_arrival, stream.uniform(-half_sector, half_sector) / 2.0,
                                     stream.uniform(-half_sector, half_sector));
    }

    double diffuse_share = 1.0;
    if (condition == LosCondition::Los)
    {
        ScmCluster specular;
        specular.specular = true;
        specular.delay_s = 0.0;
        specular.departure = los_departure;
        specular.arrival = los_arrival;
        specular.power = specular_power_fraction(config.ricean_k_db);
        diffuse_share = 1.0 - specular.power;
        ls.clusters.push_back(specular);
    }
    for (auto& c : diffuse)
    {
        c.power = diffuse_share * c.power / total;
        ls.clusters.push_back(c);
    }
    return ls;
}

ScmRays scm_draw_rays(const ScmLargeScale& ls, const ScmConfig& config, RandomStream& stream)
{
    // Laplacian with standard deviation equal to the configured spread.
    const double scale = config.cluster_angular_spread_deg * kDeg / std::sqrt(2.0);
    ScmRays out;
    out.rays.reserve(ls.clusters.size());
    for (const auto& cluster : ls.clusters)
    {
        std::vector<ScmRay> rays;
        if (cluster.specular)
        {
            rays.push_back({cluster.departure, cluster.arrival, stream.uniform(0.0, 2.0 * kPi)});
        }
        else
        {
            rays.reserve(static_cast<std::size_t>(config.rays_per_cluster));
            for (int m = 0; m < config.rays_per_cluster; ++m)
            {
                ScmRay r;
                r.departure = offset_direction(cluster.departure, stream.laplacian(scale), stream.laplacian(scale));
                r.arrival = offset_direction(cluster.arrival, stream.laplacian(scale), stream.laplacian(scale));
                r.phase = stream.uniform(0.0, 2.0 * kPi);
                rays.push_back(r);
            }
        }
        out.rays.push_back(std::move(rays));
    }
    return out;
}

ChannelMatrix::ChannelMatrix(int rx, int tx, double t)
    : rx_elements(rx), tx_elements(tx), entries(static_cast<std::size_t>(rx * tx)), generated_at(t)
{
}

double ChannelMatrix::frobenius_norm2() const
{
    double s = 0.0;
    for (const auto& e : entries)
        s += std::norm(e);
    return s;
}

namespace
{

// dst[s] += row * tx[s], spelled out in real arithmetic so the loop
// vectorises without the library's NaN-recovery path.
__attribute__((target_clones("avx2", "default"))) void accumulate_outer_row(std::complex<double> row, const std::complex<double>* tx, std::complex<double>* dst, int n)
{
    const double rr = row.real(), ri = row.imag();
    auto* d = reinterpret_cast<double*>(dst);
    const auto* a = reinterpret_cast<const double*>(tx);
    for (int s = 0; s < n; ++s)
    {
        const double ar = a[2 * s], ai = a[2 * s + 1];
        d[2 * s] += rr * ar - ri * ai;
        d[2 * s + 1] += rr * ai + ri * ar;
    }
}

} // namespace

ScmRayResponses scm_ray_responses(const ScmRays& rays, const ScmLinkGeometry& geometry)
{
    ScmRayResponses out;
    for (const auto& cluster_rays : rays.rays)
    {
        std::vector<ComplexVector> rx, tx;
        std::vector<double> doppler;
        for (const auto& ray : cluster_rays)
        {
            rx.push_back(steering_vector(ray.arrival.zenith, ray.arrival.azimuth, geometry.rx_array));
            tx.push_back(steering_vector(ray.departure.zenith, ray.departure.azimuth, geometry.tx_array));
            Vec3 arrival_global = unit_vector(to_global(ray.arrival, geometry.rx_array.boresight_azimuth));
            doppler.push_back(geometry.rx_velocity.dot(arrival_global) / geometry.wavelength_m);
        }
        out.a_rx.push_back(std::move(rx));
        out.a_tx.push_back(std::move(tx));
        out.doppler_hz.push_back(std::move(doppler));
    }
    return out;
}

std::vector<ChannelMatrix> scm_cluster_matrices(const ScmLargeScale& ls, const ScmRays& rays,
                                                const ScmLinkGeometry& geometry, double t,
                                                const ScmConfig& config, FadingWork* work)
{
    return scm_cluster_matrices(ls, rays, scm_ray_responses(rays, geometry), geometry, t, config, work);
}

std::vector<ChannelMatrix> scm_cluster_matrices(const ScmLargeScale& ls, const ScmRays& rays,
                                                const ScmRayResponses& responses, const ScmLinkGeometry& geometry,
                                                double t, const ScmConfig& config, FadingWork* work)
{
    if (rays.rays.size() != ls.clusters.size() || responses.a_rx.size() != ls.clusters.size())
        throw std::invalid_argument("ray set does not match the large-scale cluster list");
    if (static_cast<std::int64_t>(std::floor(t / config.update_epoch_s + 1e-9)) != ls.epoch_index || t < ls.drawn_at - 1e-12)
        throw std::logic_error("SCM large-scale state is stale; refresh it before generating H");

    const int U = geometry.rx_array.elements();
    const int S = geometry.tx_array.elements();
    const double array_norm = std::sqrt(static_cast<double>(U) * S);

    std::vector<ChannelMatrix> out;
    out.reserve(ls.clusters.size());
    for (std::size_t k = 0; k < ls.clusters.size(); ++k)
    {
        ChannelMatrix h(U, S, t);
        const auto& cluster_rays = rays.rays[k];
        const double amplitude = array_norm * std::sqrt(ls.clusters[k].power / cluster_rays.size());
        for (std::size_t m = 0; m < cluster_rays.size(); ++m)
        {
            std::complex<double> coeff =
                std::polar(amplitude, cluster_rays[m].phase + 2.0 * kPi * responses.doppler_hz[k][m] * t);
            const ComplexVector& a_rx = responses.a_rx[k][m];
            const ComplexVector& a_tx = responses.a_tx[k][m];
            for (int u = 0; u < U; ++u)
                accumulate_outer_row(coeff * a_rx[static_cast<std::size_t>(u)], a_tx.data(),
                                     &h.entries[static_cast<std::size_t>(u * S)], S);
            if (work)
                work->complex_macs += static_cast<std::uint64_t>(U) * static_cast<std::uint64_t>(S);
        }
        out.push_back(std::move(h));
    }
    return out;
}
ChannelMatrix scm_small_scale_matrix(const ScmLargeScale& ls, const ScmRays& rays, const ScmLinkGeometry& geometry,
                                     double t, const ScmConfig& config, FadingWork* work)
{
    auto clusters = scm_cluster_matrices(ls, rays, geometry, t, config, work);
    ChannelMatrix total(geometry.rx_array.elements(), geometry.tx_array.elements(), t);
    for (const auto& c : clusters)
        for (std::size_t i = 0; i < total.entries.size(); ++i)
            total.entries[i] += c.entries[i];
    return total;
}

double scm_effective_gain(const ChannelMatrix& h, const ComplexVector& w_tx, const ComplexVector& w_rx)
{
    if (static_cast<int>(w_tx.size()) != h.tx_elements || static_cast<int>(w_rx.size()) != h.rx_elements)
        throw std::invalid_argument("beamforming vectors do not match the channel matrix dimensions");
    double n_tx = 0.0, n_rx = 0.0;
    for (const auto& w : w_tx)
        n_tx += std::norm(w);
    for (const auto& w : w_rx)
        n_rx += std::norm(w);
    if (n_tx == 0.0 || n_rx == 0.0)
        throw std::invalid_argument("beamforming vectors must be non-zero");

    const auto* w = reinterpret_cast<const double*>(w_tx.data());
    double acc_r = 0.0, acc_i = 0.0;
    for (int u = 0; u < h.rx_elements; ++u)
    {
        const auto* row = reinterpret_cast<const double*>(&h.entries[static_cast<std::size_t>(u * h.tx_elements)]);
        double sr = 0.0, si = 0.0;
        for (int s = 0; s < h.tx_elements; ++s)
        {
            sr += row[2 * s] * w[2 * s] - row[2 * s + 1] * w[2 * s + 1];
            si += row[2 * s] * w[2 * s + 1] + row[2 * s + 1] * w[2 * s];
        }
        const double wr = w_rx[static_cast<std::size_t>(u)].real(), wi = w_rx[static_cast<std::size_t>(u)].imag();
        acc_r += wr * sr - wi * si;
        acc_i += wr * si + wi * sr;
    }
    const std::complex<double> acc{acc_r, acc_i};
    return std::norm(acc) / (n_tx * n_rx);
}

double scm_wideband_gain(const std::vector<ChannelMatrix>& clusters, const ComplexVector& w_tx,
                         const ComplexVector& w_rx)
{
    double g = 0.0;
    for (const auto& h : clusters)
        g += scm_effective_gain(h, w_tx, w_rx);
    return g;
}

ModelSelector parse_model_selector(const std::string& s)
{
    ModelSelector sel;
    sel.name = s;
    if (s == "simple-A")
    {
        sel.kind = ChannelModelKind::Simple;
        sel.nakagami = NakagamiParams::setting_a();
        return sel;
    }
    if (s == "simple-B")
    {
        sel.kind = ChannelModelKind::Simple;
        sel.nakagami = NakagamiParams::setting_b();
        return sel;
    }
    if (s == "scm")
    {
        sel.kind = ChannelModelKind::Scm;
        return sel;
    }
    const std::string prefix = "simple:";
    if (s.rfind(prefix, 0) == 0)
    {
        auto body = s.substr(prefix.size());
        auto comma = body.find(',');
        if (comma != std::string::npos)
        {
            try
            {
                std::size_t used_los = 0, used_nlos = 0;
                std::string los = body.substr(0, comma), nlos = body.substr(comma + 1);
                sel.nakagami.m_los = std::stod(los, &used_los);
                sel.nakagami.m_nlos = std::stod(nlos, &used_nlos);
                if (used_los == los.size() && used_nlos == nlos.size())
                {
                    sel.nakagami.omega = 1.0;
                    sel.nakagami.validate();
                    sel.kind = ChannelModelKind::Simple;
                    return sel;
                }
            }
            catch (const std::logic_error&)
            {
            }
        }
    }
    throw std::invalid_argument("unknown channel model '" + s + "' (expected simple-A|simple-B|scm|simple:<mLOS>,<mNLOS>)");
}

SimpleChannel::SimpleChannel(NakagamiParams params) : params_(params)
{
    params_.validate();
}

ChannelSample SimpleChannel::sample(const LinkContext& link, double, RandomStream& stream)
{
    ChannelSample s;
    s.condition = link.condition;
    s.pathloss_db = link.pathloss_db;
    s.bf_gain_db = link.bf_gain_db;
    s.fading = sample_nakagami_gain(params_.m_for(link.condition), params_.omega, stream);
    ++work_.samples;
    ++work_.random_draws;
    return s;
}

ScmLiteChannel::ScmLiteChannel(ScmConfig config) : config_(config)
{
    config_.validate();
}

const ScmLargeScale* ScmLiteChannel::large_scale(std::uint64_t link_id) const
{
    auto it = links_.find(link_id);
    return it == links_.end() ? nullptr : &it->second.large_scale;
}

ChannelSample ScmLiteChannel::sample(const LinkContext& link, double t, RandomStream& stream)
{
    if (!link.tx_array || !link.rx_array || !link.tx_weights || !link.rx_weights)
        throw std::invalid_argument("SCM channel sample needs arrays and steering weights at both ends");

    const auto epoch = static_cast<std::int64_t>(std::floor(t / config_.update_epoch_s + 1e-9));
    auto it = links_.find(link.link_id);
    bool refresh = it == links_.end() || it->second.large_scale.epoch_index != epoch ||
                   it->second.large_scale.condition != link.condition;
    if (refresh)
    {
        Direction dep = to_local(direction_between(link.tx_position, link.rx_position), link.tx_array->boresight_azimuth);
        Direction arr = to_local(direction_between(link.rx_position, link.tx_position), link.rx_array->boresight_azimuth);
        std::uint64_t before = stream.draws();
        LinkState st;
        st.large_scale = scm_draw_large_scale(dep, arr, config_, link.condition, stream, epoch * config_.update_epoch_s);
        st.rays = scm_draw_rays(st.large_scale, config_, stream);
        work_.random_draws += stream.draws() - before;
        st.responses = scm_ray_responses(st.rays, {*link.tx_array, *link.rx_array, link.rx_velocity, link.wavelength_m});
        it = links_.insert_or_assign(link.link_id, std::move(st)).first;
    }

    ScmLinkGeometry geom{*link.tx_array, *link.rx_array, link.rx_velocity, link.wavelength_m};
    const auto& st = it->second;
    auto clusters = scm_cluster_matrices(st.large_scale, st.rays, st.responses, geom, t, config_, &work_);

    double gain = 0.0;
    if (config_.combining == ScmCombining::Wideband)
    {
        gain = scm_wideband_gain(clusters, *link.tx_weights, *link.rx_weights);
    }
    else
    {
        ChannelMatrix h(geom.rx_array.elements(), geom.tx_array.elements(), t);
        for (const auto& c : clusters)
            for (std::size_t i = 0; i < h.entries.size(); ++i)
                h.entries[i] += c.entries[i];
        gain = scm_effective_gain(h, *link.tx_weights, *link.rx_weights);
    }
    ++work_.samples;

    ChannelSample s;
    s.condition = link.condition;
    s.pathloss_db = link.pathloss_db;
    s.bf_gain_db = 10.0 * std::log10(std::max(gain, 1e-30));
    s.fading = 1.0;
    return s;
}

std::unique_ptr<ChannelModel> make_channel_model(const ModelSelector& selector, const ScmConfig& scm)
{
    switch (selector.kind)
    {
    case ChannelModelKind::Simple:
        return std::make_unique<SimpleChannel>(selector.nakagami);
    case ChannelModelKind::Scm:
        return std::make_unique<ScmLiteChannel>(scm);
    }
    throw std::invalid_argument("unknown channel model kind");
}

} // namespace mmwsim
