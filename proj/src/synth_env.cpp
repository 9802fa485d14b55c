// SPDX-License-Identifier: Apache-2.0
//
// evtmap - extreme-value radio maps for outage-constrained rate selection
// Copyright (C) 2026 The evtmap authors
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

#include "evtmap/synth_env.hpp"

#include "evtmap/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace evtmap {

namespace {

constexpr double kSpeedOfLight = 299792458.0;

void require(bool ok, const char* field, const std::string& what)
{
    if (!ok) {
        throw ConfigError(std::string("config field '") + field + "': " + what);
    }
}

bool finite(double v) { return std::isfinite(v); }

} // namespace

void ScenarioConfig::validate() const
{
    require(grid.nx >= 2 && grid.ny >= 2, "grid", "nx and ny must be >= 2");
    require(finite(grid.width) && grid.width > 0.0, "grid.width", "must be > 0");
    require(finite(grid.height) && grid.height > 0.0, "grid.height", "must be > 0");
    require(m_observed >= 1, "m_observed", "must be >= 1");
    require(m_observed <= grid.size(), "m_observed", "exceeds the number of grid points");
    require(n_samples >= 1, "n_samples", "must be >= 1");
    require(finite(tx_power_mw) && tx_power_mw > 0.0, "tx_power_mw", "must be > 0");
    require(finite(bandwidth_hz) && bandwidth_hz > 0.0, "bandwidth_hz", "must be > 0");
    require(finite(noise_figure_db), "noise_figure_db", "must be finite");
    require(finite(carrier_freq_hz) && carrier_freq_hz > 0.0, "carrier_freq_hz", "must be > 0");
    require(finite(bs_x_m) && finite(bs_y_m), "bs_x_m/bs_y_m", "must be finite");
    require(finite(bs_height_m) && finite(ue_height_m) && bs_height_m != ue_height_m, "bs_height_m",
            "BS and UE heights must be finite and differ");
    require(finite(pathloss_exponent) && pathloss_exponent > 0.0, "pathloss_exponent", "must be > 0");
    require(finite(shadowing_std_db) && shadowing_std_db >= 0.0, "shadowing_std_db", "must be >= 0");
    require(finite(shadowing_decorrelation_m) && shadowing_decorrelation_m > 0.0,
            "shadowing_decorrelation_m", "must be > 0");
    require(finite(kfactor_mean_db), "kfactor_mean_db", "must be finite");
    require(finite(kfactor_std_db) && kfactor_std_db >= 0.0, "kfactor_std_db", "must be >= 0");
    require(finite(kfactor_decorrelation_m) && kfactor_decorrelation_m > 0.0, "kfactor_decorrelation_m",
            "must be > 0");
}

double ScenarioConfig::noise_power_dbm() const { return evtmap::noise_power_dbm(bandwidth_hz, noise_figure_db); }

ScenarioConfig desk_preset() { return ScenarioConfig{}; }

ScenarioConfig paper_preset()
{
    ScenarioConfig c;
    c.grid = GridSpec{100.0, 100.0, 120, 120};
    c.m_observed = 500;
    c.n_samples = 100000;
    return c;
}

double noise_power_dbm(double bandwidth_hz, double noise_figure_db)
{
    return -173.8 + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
}

double reference_loss_db(double carrier_freq_hz)
{
    const double wavelength = kSpeedOfLight / carrier_freq_hz;
    return 20.0 * std::log10(4.0 * std::numbers::pi / wavelength);
}

std::vector<Location> build_grid(const GridSpec& spec)
{
    if (spec.nx < 2 || spec.ny < 2) {
        throw ConfigError("grid needs nx >= 2 and ny >= 2");
    }
    std::vector<Location> out;
    out.reserve(spec.size());
    const double dx = spec.spacing_x();
    const double dy = spec.spacing_y();
    for (std::size_t iy = 0; iy < spec.ny; ++iy) {
        for (std::size_t ix = 0; ix < spec.nx; ++ix) {
            // Last row/column pinned to the exact boundary.
            const double x = ix + 1 == spec.nx ? spec.width : static_cast<double>(ix) * dx;
            const double y = iy + 1 == spec.ny ? spec.height : static_cast<double>(iy) * dy;
            out.push_back({x, y});
        }
    }
    return out;
}

std::vector<double> sample_correlated_field(std::span<const Location> locations, double variance,
                                            double decorrelation_m, std::uint64_t seed)
{
    if (!(decorrelation_m > 0.0)) {
        throw DomainError("decorrelation distance must be > 0");
    }
    if (!(variance >= 0.0)) {
        throw DomainError("field variance must be >= 0");
    }
    const auto n = static_cast<Eigen::Index>(locations.size());
    std::vector<double> out(locations.size(), 0.0);
    if (variance == 0.0 || n == 0) {
        return out;
    }

    Eigen::MatrixXd cov(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        cov(j, j) = variance;
        for (Eigen::Index i = j + 1; i < n; ++i) {
            const double d = distance(locations[static_cast<std::size_t>(i)], locations[static_cast<std::size_t>(j)]);
            cov(i, j) = variance * std::exp(-d / decorrelation_m);
        }
    }

    Eigen::LLT<Eigen::MatrixXd> llt;
    bool ok = false;
    for (double jitter = 1e-10; jitter <= 1e-6 * (1.0 + 1e-9); jitter *= 10.0) {
        Eigen::MatrixXd a = cov;
        a.diagonal().array() += jitter * variance;
        llt.compute(a);
        if (llt.info() == Eigen::Success) {
            ok = true;
            break;
        }
    }
    if (!ok) {
        throw NumericalError("shadowing covariance factorization failed after jitter escalation");
    }

    Engine engine(seed);
    boost::random::normal_distribution<double> normal;
    Eigen::VectorXd z(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        z(i) = normal(engine);
    }
    const Eigen::VectorXd field = llt.matrixL() * z;
    for (Eigen::Index i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = field(i);
    }
    return out;
}

double mean_snr_db(const Location& location, const ScenarioConfig& config)
{
    const double dh = config.bs_height_m - config.ue_height_m;
    const double d2 = std::hypot(location.x - config.bs_x_m, location.y - config.bs_y_m);
    const double d3 = std::hypot(d2, dh);
    const double path_loss = reference_loss_db(config.carrier_freq_hz) + 10.0 * config.pathloss_exponent * std::log10(d3);
    return 10.0 * std::log10(config.tx_power_mw) - path_loss - config.noise_power_dbm();
}

void fill_snr_samples(std::span<double> out, double mean_snr_linear, double k_factor, Engine& engine)
{
    if (k_factor >= kDeterministicK) {
        std::fill(out.begin(), out.end(), mean_snr_linear);
        return;
    }
    // h = sqrt(K/(K+1)) + CN(0, 1/(K+1)); E|h|^2 = 1.
    const double los = std::sqrt(k_factor / (k_factor + 1.0));
    const double scatter = std::sqrt(0.5 / (k_factor + 1.0));
    boost::random::normal_distribution<double> normal;
    for (double& v : out) {
        double power = 0.0;
        do {
            const double re = los + scatter * normal(engine);
            const double im = scatter * normal(engine);
            power = re * re + im * im;
        } while (!(power > 0.0));
        v = mean_snr_linear * power;
    }
}

std::vector<double> draw_snr_samples(double mean_snr_linear, double k_factor, std::size_t n, std::uint64_t seed)
{
    if (!(mean_snr_linear > 0.0)) {
        throw DomainError("mean SNR must be > 0");
    }
    if (!(k_factor >= 0.0)) {
        throw DomainError("K-factor must be >= 0");
    }
    std::vector<double> out(n);
    Engine engine(seed);
    fill_snr_samples(out, mean_snr_linear, k_factor, engine);
    return out;
}

GroundTruthField generate_truth(const ScenarioConfig& config, std::span<const Location> grid)
{
    const auto shadow = sample_correlated_field(grid, config.shadowing_std_db * config.shadowing_std_db,
                                                config.shadowing_decorrelation_m,
                                                derive_seed(config.seed, Stream::Shadowing));
    const auto kfield = sample_correlated_field(grid, config.kfactor_std_db * config.kfactor_std_db,
                                                config.kfactor_decorrelation_m,
                                                derive_seed(config.seed, Stream::KFactor));
    GroundTruthField truth;
    truth.mean_snr_db.resize(grid.size());
    truth.k_factor.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        truth.mean_snr_db[i] = mean_snr_db(grid[i], config) + shadow[i];
        truth.k_factor[i] = db_to_linear(config.kfactor_mean_db + kfield[i]);
    }
    return truth;
}

std::vector<std::size_t> select_observed(std::size_t grid_size, std::size_t m, std::uint64_t seed)
{
    if (m > grid_size) {
        throw ConfigError("config field 'm_observed': exceeds the number of grid points");
    }
    // Partial Fisher-Yates: the first m entries are a uniform draw without
    // replacement.
    std::vector<std::size_t> ids(grid_size);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        ids[i] = i;
    }
    Engine pick = make_engine(seed, Stream::Selection);
    for (std::size_t i = 0; i < m; ++i) {
        boost::random::uniform_int_distribution<std::size_t> u(i, ids.size() - 1);
        std::swap(ids[i], ids[u(pick)]);
    }
    ids.resize(m);
    std::sort(ids.begin(), ids.end());
    return ids;
}

Dataset generate_dataset(const ScenarioConfig& config)
{
    config.validate();
    Dataset ds;
    ds.config = config;
    ds.grid = build_grid(config.grid);
    ds.truth = generate_truth(config, ds.grid);

    const std::vector<std::size_t> ids = select_observed(ds.grid.size(), config.m_observed, config.seed);

    ds.observed.reserve(ids.size());
    for (const std::size_t id : ids) {
        MeasurementSet set;
        set.loc_id = id;
        set.location = ds.grid[id];
        set.samples.resize(config.n_samples);
        Engine engine = make_engine(config.seed, Stream::Observed, id);
        fill_snr_samples(set.samples, db_to_linear(ds.truth.mean_snr_db[id]), ds.truth.k_factor[id], engine);
        ds.observed.push_back(std::move(set));
    }
    return ds;
}

TestSampler::TestSampler(const ScenarioConfig& config, const GroundTruthField& truth)
    : seed_(config.seed), k_factor_(truth.k_factor)
{
    mean_linear_.reserve(truth.mean_snr_db.size());
    for (const double db : truth.mean_snr_db) {
        mean_linear_.push_back(db_to_linear(db));
    }
}

void TestSampler::draw(std::size_t loc_id, std::span<double> out) const
{
    Engine engine = make_engine(seed_, Stream::Test, loc_id);
    fill_snr_samples(out, mean_linear_.at(loc_id), k_factor_.at(loc_id), engine);
}

std::vector<double> TestSampler::draw(std::size_t loc_id, std::size_t n) const
{
    std::vector<double> out(n);
    draw(loc_id, out);
    return out;
}

std::size_t default_test_size(double zeta, std::size_t configured)
{
    if (configured > 0) {
        return configured;
    }
    const double by_target = std::ceil(100.0 / zeta);
    return static_cast<std::size_t>(std::max(1e5, by_target));
}

} // namespace evtmap
