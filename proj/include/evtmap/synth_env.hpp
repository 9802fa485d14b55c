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

#ifndef EVTMAP_SYNTH_ENV_HPP
#define EVTMAP_SYNTH_ENV_HPP

// Synthetic ground truth for the radio environment: log-distance path loss,
// a Gaussian shadowing field with exponential spatial correlation, and
// Rician small-scale fading whose K-factor is itself a correlated field.

#include "evtmap/rng.hpp"
#include "evtmap/types.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace evtmap {

struct ScenarioConfig {
    GridSpec grid{};
    std::size_t m_observed = 100;
    std::size_t n_samples = 10000;
    // Test samples per grid point; 0 selects the default rule in
    // default_test_size().
    std::size_t n_test = 0;

    double tx_power_mw = 1.0;
    double bandwidth_hz = 100e3;
    double noise_figure_db = 7.0;
    double carrier_freq_hz = 1.5e9;
    double bs_x_m = 50.0;
    double bs_y_m = 50.0;
    double bs_height_m = 10.0;
    double ue_height_m = 1.5;
    double pathloss_exponent = 2.1;
    double shadowing_std_db = 4.0;
    double shadowing_decorrelation_m = 10.0;
    double kfactor_mean_db = 9.0;
    double kfactor_std_db = 5.0;
    double kfactor_decorrelation_m = 15.0;
    std::uint64_t seed = 1;

    // Throws ConfigError naming the first offending field.
    void validate() const;
    double noise_power_dbm() const;
};

// 40x40 grid, M = 100, N = 1e4 over a 100 m x 100 m cell.
ScenarioConfig desk_preset();
// 120x120 grid, M = 500, N = 1e5 over a 100 m x 100 m cell.
ScenarioConfig paper_preset();

// Thermal noise floor -173.8 dBm/Hz plus bandwidth and noise figure.
double noise_power_dbm(double bandwidth_hz, double noise_figure_db);
// Free-space loss at the 1 m reference distance.
double reference_loss_db(double carrier_freq_hz);

// Row-major lattice: index = iy * nx + ix.
std::vector<Location> build_grid(const GridSpec& spec);

// One draw of a zero-mean Gaussian field with covariance
// variance * exp(-d / decorrelation_m) over the given locations.
std::vector<double> sample_correlated_field(std::span<const Location> locations, double variance,
                                            double decorrelation_m, std::uint64_t seed);

// Large-scale mean SNR (dB) from transmit power, path loss and noise. The BS
// sits at (bs_x_m, bs_y_m, bs_height_m); the distance is three-dimensional.
double mean_snr_db(const Location& location, const ScenarioConfig& config);

// Rician K-factors at or above this value are treated as a pure LOS channel.
inline constexpr double kDeterministicK = 1e6;

// Fills `out` with i.i.d. draws mean_snr_linear * |h|^2, |h|^2 unit-mean
// Rician power with factor k_factor.
void fill_snr_samples(std::span<double> out, double mean_snr_linear, double k_factor, Engine& engine);
std::vector<double> draw_snr_samples(double mean_snr_linear, double k_factor, std::size_t n,
                                     std::uint64_t seed);

struct GroundTruthField {
    std::vector<double> mean_snr_db;
    std::vector<double> k_factor;
};

struct MeasurementSet {
    std::size_t loc_id = 0;
    Location location{};
    std::vector<double> samples;
};

struct Dataset {
    ScenarioConfig config;
    std::vector<Location> grid;
    GroundTruthField truth;
    std::vector<MeasurementSet> observed; // ascending loc_id
};

GroundTruthField generate_truth(const ScenarioConfig& config, std::span<const Location> grid);
// m distinct grid indices, ascending, drawn uniformly without replacement.
std::vector<std::size_t> select_observed(std::size_t grid_size, std::size_t m, std::uint64_t seed);
Dataset generate_dataset(const ScenarioConfig& config);

// Test samples are independent of the observed samples and regenerated on
// demand from (seed, grid point), so they never have to be stored.
class TestSampler {
public:
    TestSampler(const ScenarioConfig& config, const GroundTruthField& truth);

    std::size_t size() const noexcept { return mean_linear_.size(); }
    void draw(std::size_t loc_id, std::span<double> out) const;
    std::vector<double> draw(std::size_t loc_id, std::size_t n) const;

private:
    std::uint64_t seed_;
    std::vector<double> mean_linear_;
    std::vector<double> k_factor_;
};

// max(1e5, 100 / zeta) unless the configuration overrides it.
std::size_t default_test_size(double zeta, std::size_t configured = 0);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

} // namespace evtmap

#endif
