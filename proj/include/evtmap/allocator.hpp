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

#ifndef EVTMAP_ALLOCATOR_HPP
#define EVTMAP_ALLOCATOR_HPP

// Rate selection under an outage constraint, two ways:
//  - EVT: krige the per-site GPD tail (mu, xi, sigma), add a tau-quantile
//    margin to mu and invert the tail outage at every grid point;
//  - benchmark: krige the empirical zeta-quantile of ln SNR and back off by
//    a meta-probability margin.

#include "evtmap/evt.hpp"
#include "evtmap/gp.hpp"
#include "evtmap/synth_env.hpp"
#include "evtmap/types.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace evtmap {

struct MapKernelConfig {
    CovarianceKind kind = CovarianceKind::Exponential;
    // When set, hyperparameter fitting is skipped for this map.
    std::optional<CovarianceSpec> fixed;
};

struct AllocationRequest {
    double zeta = 1e-3;
    double rho = 0.99;
    double tau = 1e-3;
    double delta = 1e-3; // benchmark meta-probability
    MapKernelConfig mu_kernel{CovarianceKind::Exponential, std::nullopt};
    MapKernelConfig xi_kernel{CovarianceKind::Matern, std::nullopt};
    MapKernelConfig sigma_kernel{CovarianceKind::Matern, std::nullopt};
    HyperparamOptions hyper{};

    void validate() const;
};

enum class Method { Evt, Benchmark };
std::string to_string(Method m);
Method method_from_string(const std::string& s);

inline constexpr double kMinSigma = 1e-6;

struct RadioMap {
    std::vector<Location> grid;
    std::vector<double> xi_hat;
    std::vector<double> xi_var;
    std::vector<double> sigma_hat;
    std::vector<double> sigma_var;
    std::vector<double> mu_mean;
    std::vector<double> mu_var;
    std::vector<double> mu_tau;
    double tau = 0.0;
    std::size_t sigma_clamped = 0;
};

// Recomputes mu_tau = mu_mean + sqrt(mu_var) Phi^-1(1 - tau) and clamps
// sigma at kMinSigma, counting the clamps.
void apply_margin(RadioMap& map, double tau);

struct SiteFit {
    std::size_t loc_id = 0;
    Location location{};
    std::optional<TailFit> fit;
    std::string error;
};

struct ParameterMapFit {
    HyperparamFit hyper;
    NormalizationStats stats;
    GpPosterior posterior; // physical units
};

struct TailMapBuild {
    RadioMap map;
    std::vector<SiteFit> sites; // same order as the canonical observed list
    std::size_t retained = 0;
    std::size_t excluded = 0;
    ParameterMapFit mu;
    ParameterMapFit xi;
    ParameterMapFit sigma;
};

// Fit tails at the observed sites, krige the three parameter maps onto
// `grid` and apply the tau margin. Sites whose fit fails are excluded from
// the GP observations.
TailMapBuild build_tail_maps(std::span<const MeasurementSet> observed, std::span<const Location> grid,
                             const AllocationRequest& request, Exec exec = Exec::Parallel);

struct RateMap {
    Method method = Method::Evt;
    std::vector<Location> grid;
    std::vector<double> phi; // EVT: psi-domain target; benchmark: theta
    std::vector<double> rate;
};

RateMap allocate_rates_evt(const RadioMap& map, const AllocationRequest& request);

// floor(N * zeta)-th smallest ln-SNR sample. Throws InfeasibleError when
// floor(N * zeta) = 0.
double benchmark_quantile(std::span<const double> samples, double zeta);
std::size_t benchmark_rank(std::size_t n, double zeta);

// log2(1 + exp(theta + sqrt(2) alpha erfinv(2 delta - 1))).
double benchmark_rate(double theta, double alpha, double delta);

struct BenchmarkPosterior {
    std::vector<double> theta;
    std::vector<double> alpha;
    double delta = 1e-3;
    ParameterMapFit quantile;
};

BenchmarkPosterior build_benchmark_map(std::span<const MeasurementSet> observed, std::span<const Location> grid,
                                       double zeta, double delta, const HyperparamOptions& hyper = {},
                                       std::optional<CovarianceSpec> fixed = std::nullopt);

RateMap allocate_rates_benchmark(const BenchmarkPosterior& posterior, std::span<const Location> grid);
RateMap allocate_rates_benchmark(std::span<const MeasurementSet> observed, std::span<const Location> grid,
                                 double zeta, double delta, const HyperparamOptions& hyper = {});

} // namespace evtmap

#endif
