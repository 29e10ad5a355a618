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


#ifndef MMWSIM_FADING_HPP
#define MMWSIM_FADING_HPP

#include "mmwsim/beamforming.hpp"
#include "mmwsim/geometry.hpp"
#include "mmwsim/propagation.hpp"
#include "mmwsim/sim_engine.hpp"

#include <complex>
#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

namespace mmwsim
{

// Per-link, per-instant decomposition of the channel: received power is
// P_tx * fading * 10^((bf_gain_db - pathloss_db) / 10).
struct ChannelSample
{
    double pathloss_db = 0.0; // includes shadowing
    double bf_gain_db = 0.0;  // for the SCM path: combined fading + beamforming gain
    double fading = 1.0;      // linear power gain h
    LosCondition condition = LosCondition::Los;

    double total_gain_linear() const;
    double total_gain_db() const;
};

// Work accounting used to compare model cost independently of wall clock.
struct FadingWork
{
    std::uint64_t samples = 0;
    std::uint64_t random_draws = 0;
    std::uint64_t complex_macs = 0;
};

// ---------------------------------------------------------------- Nakagami

struct NakagamiParams
{
    double m_los = 3.0;
    double m_nlos = 2.0;
    double omega = 1.0;

    void validate() const;
    double m_for(LosCondition c) const { return c == LosCondition::Los ? m_los : m_nlos; }

    static NakagamiParams setting_a() { return {3.0, 2.0, 1.0}; }
    static NakagamiParams setting_b() { return {20.0, 10.0, 1.0}; }
};

// Power gain of a Nakagami-m amplitude: Gamma(shape m, scale omega/m).
// Throws std::invalid_argument for m < 0.5 or omega <= 0.
double sample_nakagami_gain(double m, double omega, RandomStream& stream);

// ----------------------------------------------------------------- SCM-lite

enum class ScmCombining
{
    Wideband,   // cross-cluster terms average out over the carrier bandwidth
    Narrowband, // all clusters add coherently in one matrix
};

ScmCombining parse_scm_combining(const std::string& s);
std::string to_string(ScmCombining c);

struct ScmConfig
{
    int clusters = 12;                     // N (diffuse clusters)
    int rays_per_cluster = 20;             // M
    double delay_spread_s = 100e-9;
    double cluster_angular_spread_deg = 5.0;
    double ricean_k_db = 9.0;
    double update_epoch_s = 0.1;
    double cluster_power_jitter_db = 3.0;
    double cluster_sector_deg = 60.0;      // full width of the sector holding cluster mean angles
    ScmCombining combining = ScmCombining::Narrowband;

    void validate() const;
};

struct ScmCluster
{
    double delay_s = 0.0;
    double power = 0.0;
    Direction departure; // in the transmit panel frame
    Direction arrival;   // in the receive panel frame
    bool specular = false;
};

struct ScmLargeScale
{
    std::vector<ScmCluster> clusters;
    double k_factor_db = 0.0;
    LosCondition condition = LosCondition::Nlos;
    double drawn_at = 0.0;
    std::int64_t epoch_index = 0;
};

// Specular fraction of the total power for a Ricean factor given in dB.
double specular_power_fraction(double k_db);

ScmLargeScale scm_draw_large_scale(const Direction& los_departure, const Direction& los_arrival,
                                   const ScmConfig& config, LosCondition condition, RandomStream& stream, double t);

struct ScmRay
{
    Direction departure;
    Direction arrival;
    double phase = 0.0;
};

// Fast-fading ray parameters; rays[k] belongs to large-scale cluster k.
struct ScmRays
{
    std::vector<std::vector<ScmRay>> rays;
};

ScmRays scm_draw_rays(const ScmLargeScale& ls, const ScmConfig& config, RandomStream& stream);

struct ChannelMatrix
{
    int rx_elements = 0; // U
    int tx_elements = 0; // S
    std::vector<std::complex<double>> entries; // row-major U x S
    double generated_at = 0.0;

    ChannelMatrix() = default;
    ChannelMatrix(int rx, int tx, double t);

    std::complex<double>& at(int u, int s) { return entries[static_cast<std::size_t>(u * tx_elements + s)]; }
    const std::complex<double>& at(int u, int s) const { return entries[static_cast<std::size_t>(u * tx_elements + s)]; }
    double frobenius_norm2() const;
};

struct ScmLinkGeometry
{
    UpaConfig tx_array;
    UpaConfig rx_array;
    Vec3 rx_velocity;
    double wavelength_m = kSpeedOfLight / 28e9;
};

// Per-ray array responses and Doppler shifts; constant while the ray set is.
struct ScmRayResponses
{
    std::vector<std::vector<ComplexVector>> a_rx;
    std::vector<std::vector<ComplexVector>> a_tx;
    std::vector<std::vector<double>> doppler_hz;
};

ScmRayResponses scm_ray_responses(const ScmRays& rays, const ScmLinkGeometry& geometry);

// One matrix per cluster; the narrowband channel is their sum.
std::vector<ChannelMatrix> scm_cluster_matrices(const ScmLargeScale& ls, const ScmRays& rays,
                                                const ScmLinkGeometry& geometry, double t,
                                                const ScmConfig& config, FadingWork* work = nullptr);
std::vector<ChannelMatrix> scm_cluster_matrices(const ScmLargeScale& ls, const ScmRays& rays,
                                                const ScmRayResponses& responses, const ScmLinkGeometry& geometry,
                                                double t, const ScmConfig& config, FadingWork* work = nullptr);

// H(t) = sum over clusters and rays. Throws std::logic_error if the
// large-scale state is older than the update epoch.
ChannelMatrix scm_small_scale_matrix(const ScmLargeScale& ls, const ScmRays& rays, const ScmLinkGeometry& geometry,
                                     double t, const ScmConfig& config, FadingWork* work = nullptr);

// |w_rx^T H w_tx|^2 / (||w_rx||^2 ||w_tx||^2). Weights follow the array
// factor convention (conjugate phases already applied), so a rank-one
// channel sqrt(U S) a_rx a_tx^T with matched weights yields U * S.
double scm_effective_gain(const ChannelMatrix& h, const ComplexVector& w_tx, const ComplexVector& w_rx);

// Sum of per-cluster effective gains.
double scm_wideband_gain(const std::vector<ChannelMatrix>& clusters, const ComplexVector& w_tx,
                         const ComplexVector& w_rx);

// -------------------------------------------------------- channel interface

enum class ChannelModelKind
{
    Simple,
    Scm,
};

struct ModelSelector
{
    ChannelModelKind kind = ChannelModelKind::Simple;
    NakagamiParams nakagami = NakagamiParams::setting_a();
    std::string name = "simple-A";
};

// "simple-A", "simple-B", "scm", or "simple:<m_los>,<m_nlos>". Throws on
// anything else.
ModelSelector parse_model_selector(const std::string& s);

// Everything a channel model needs to know about one directed link at one
// instant. Path loss (with shadowing) and the analytic beamforming gain are
// computed by the caller; the SCM path ignores bf_gain_db and applies the
// steering weights to its own channel matrix.
struct LinkContext
{
    std::uint64_t link_id = 0;
    LosCondition condition = LosCondition::Los;
    double pathloss_db = 0.0;
    double bf_gain_db = 0.0;

    const UpaConfig* tx_array = nullptr;
    const UpaConfig* rx_array = nullptr;
    const ComplexVector* tx_weights = nullptr;
    const ComplexVector* rx_weights = nullptr;
    Vec3 tx_position;
    Vec3 rx_position;
    Vec3 rx_velocity;
    double wavelength_m = kSpeedOfLight / 28e9;
};

class ChannelModel
{
  public:
    virtual ~ChannelModel() = default;

    virtual ChannelModelKind kind() const = 0;
    virtual ChannelSample sample(const LinkContext& link, double t, RandomStream& stream) = 0;

    const FadingWork& work() const { return work_; }

  protected:
    FadingWork work_;
};

class SimpleChannel final : public ChannelModel
{
  public:
    explicit SimpleChannel(NakagamiParams params);

    ChannelModelKind kind() const override { return ChannelModelKind::Simple; }
    ChannelSample sample(const LinkContext& link, double t, RandomStream& stream) override;

    const NakagamiParams& params() const { return params_; }

  private:
    NakagamiParams params_;
};

class ScmLiteChannel final : public ChannelModel
{
  public:
    explicit ScmLiteChannel(ScmConfig config);

    ChannelModelKind kind() const override { return ChannelModelKind::Scm; }
    ChannelSample sample(const LinkContext& link, double t, RandomStream& stream) override;

    const ScmConfig& config() const { return config_; }
    // Large-scale state of a link, if it has been drawn.
    const ScmLargeScale* large_scale(std::uint64_t link_id) const;

  private:
    struct LinkState
    {
        ScmLargeScale large_scale;
        ScmRays rays;
        ScmRayResponses responses;
    };

    ScmConfig config_;
    std::unordered_map<std::uint64_t, LinkState> links_;
};

std::unique_ptr<ChannelModel> make_channel_model(const ModelSelector& selector, const ScmConfig& scm);

} // namespace mmwsim

#endif
