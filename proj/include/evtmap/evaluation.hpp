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

#ifndef EVTMAP_EVALUATION_HPP
#define EVTMAP_EVALUATION_HPP

#include "evtmap/allocator.hpp"
#include "evtmap/kernels.hpp"
#include "evtmap/synth_env.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace evtmap {

// SNR needed for rate R = log2(1 + gamma): 2^R - 1.
double target_snr(double rate);

struct OutageRow {
    double gamma_tar = 0.0;
    double empirical_outage = 0.0;
    bool met = false;
};

// Fraction of test samples strictly below the target SNR of `rate`.
OutageRow empirical_outage(std::span<const double> test_samples, double rate, double zeta);

// Percentage of rows with empirical outage <= zeta.
double availability(std::span<const OutageRow> rows, double zeta);

struct EcdfPoint {
    double value = 0.0;
    double fraction = 0.0;
};

// Right-continuous empirical CDF, one point per distinct value.
std::vector<EcdfPoint> ecdf(std::span<const double> values);

struct DivergenceMap {
    std::vector<std::optional<double>> d_bh;
    std::size_t missing = 0;
    std::vector<double> present() const;
};

// Bhattacharyya distance between the predicted (xi, sigma) and the tail
// fitted to each grid point's test data, both with a zero threshold.
DivergenceMap tail_divergence_map(const RadioMap& predicted, std::span<const kernels::FitOutcome> test_fits);
DivergenceMap tail_divergence_map(const RadioMap& predicted, const TestSampler& sampler, std::size_t n_test,
                                  double rho, Exec exec = Exec::Parallel);

struct EvalReport {
    Method method = Method::Evt;
    double zeta = 0.0;
    double availability = 0.0; // percent
    double mean_rate = 0.0;
    std::vector<EcdfPoint> rate_ecdf;
    std::vector<EcdfPoint> dbh_ecdf;
    std::size_t dbh_missing = 0;
    std::size_t n_test = 0;
    std::string dataset_hash;
    std::vector<OutageRow> rows;
    std::vector<double> rates;
};

// Scores every rate map against one shared pass over the test data. When
// `divergence_map` is given, the ground-truth tails are fitted as well and
// the distances are attached to every report (and to `divergence_out`).
std::vector<EvalReport> evaluate_rate_maps(const TestSampler& sampler, std::span<const RateMap> maps, double zeta,
                                           std::size_t n_test, const RadioMap* divergence_map, double rho,
                                           DivergenceMap* divergence_out = nullptr, Exec exec = Exec::Parallel);

struct Comparison {
    double mean_rate_gain_pct = 0.0;   // 100 (evt / bench - 1)
    double availability_diff = 0.0;    // percentage points, evt - bench
    double win_fraction = 0.0;         // share of grid points where evt rate > bench rate
};

// Throws IntegrityError when the reports come from different datasets.
Comparison compare_report(const EvalReport& evt, const EvalReport& bench);

} // namespace evtmap

#endif
