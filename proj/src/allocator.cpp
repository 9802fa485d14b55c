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

#include "evtmap/allocator.hpp"

#include "evtmap/errors.hpp"
#include "evtmap/kernels.hpp"
#include "evtmap/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace evtmap {

namespace {

// Sites in ascending (loc_id, x, y) order, so every downstream result is
// independent of the order the caller supplied them in.
std::vector<std::size_t> canonical_order(std::span<const MeasurementSet> observed)
{
    std::vector<std::size_t> order(observed.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& sa = observed[a];
        const auto& sb = observed[b];
        if (sa.loc_id != sb.loc_id) {
            return sa.loc_id < sb.loc_id;
        }
        if (sa.location.x != sb.location.x) {
            return sa.location.x < sb.location.x;
        }
        return sa.location.y < sb.location.y;
    });
    return order;
}

// Degenerate inputs (a single site, or identical values) keep unit scale so
// the GP still interpolates them.
Normalized normalize_or_center(std::span<const double> values)
{
    try {
        return normalize(values);
    } catch (const InsufficientDataError&) {
        Normalized out;
        const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
        out.stats = {mean, 1.0};
        for (const double v : values) {
            out.values.push_back(v - mean);
        }
        return out;
    }
}

HyperparamOptions grid_bounds(std::span<const Location> grid, HyperparamOptions options)
{
    if (grid.size() < 2) {
        return options;
    }
    if (options.range_lower <= 0.0) {
        double spacing = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < grid.size(); ++i) {
            const double d = distance(grid[0], grid[i]);
            if (d > 0.0) {
                spacing = std::min(spacing, d);
            }
        }
        if (std::isfinite(spacing)) {
            options.range_lower = 0.1 * spacing;
        }
    }
    if (options.range_upper <= 0.0) {
        double x0 = grid[0].x, x1 = x0, y0 = grid[0].y, y1 = y0;
        for (const auto& l : grid) {
            x0 = std::min(x0, l.x);
            x1 = std::max(x1, l.x);
            y0 = std::min(y0, l.y);
            y1 = std::max(y1, l.y);
        }
        const double diag = std::hypot(x1 - x0, y1 - y0);
        if (diag > 0.0) {
            options.range_upper = 10.0 * diag;
        }
    }
    return options;
}

ParameterMapFit krige(std::span<const double> values, std::span<const Location> locations,
                      std::span<const Location> grid, const MapKernelConfig& kernel, const HyperparamOptions& hyper,
                      Exec exec)
{
    const Normalized norm = normalize_or_center(values);
    ParameterMapFit out;
    out.stats = norm.stats;
    if (kernel.fixed) {
        kernel.fixed->validate();
        out.hyper.spec = *kernel.fixed;
        out.hyper.log_marginal = std::numeric_limits<double>::quiet_NaN();
    } else {
        out.hyper = fit_hyperparams(norm.values, locations, kernel.kind, hyper);
    }
    out.posterior = denormalize(predict(norm.values, locations, grid, out.hyper.spec, exec), norm.stats);
    return out;
}

double softplus_log2(double x)
{
    const double sp = x > 30.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
    return sp / std::numbers::ln2;
}

} // namespace

void AllocationRequest::validate() const
{
    if (!(zeta > 0.0 && zeta < 1.0)) {
        throw ConfigError("zeta must lie in (0, 1)");
    }
    if (!(rho > 0.0 && rho < 1.0)) {
        throw ConfigError("rho must lie in (0, 1)");
    }
    if (!(tau > 0.0 && tau <= 0.5)) {
        throw ConfigError("tau must lie in (0, 0.5]");
    }
    if (!(delta > 0.0 && delta <= 0.5)) {
        throw ConfigError("delta must lie in (0, 0.5]");
    }
}

std::string to_string(Method m) { return m == Method::Evt ? "evt" : "benchmark"; }

Method method_from_string(const std::string& s)
{
    if (s == "evt") {
        return Method::Evt;
    }
    if (s == "benchmark") {
        return Method::Benchmark;
    }
    throw ConfigError("unknown method '" + s + "' (expected evt or benchmark)");
}

void apply_margin(RadioMap& map, double tau)
{
    map.tau = tau;
    map.mu_tau.resize(map.mu_mean.size());
    for (std::size_t i = 0; i < map.mu_mean.size(); ++i) {
        map.mu_tau[i] = gaussian_upper_quantile(tau, map.mu_mean[i], map.mu_var[i]);
    }
    map.sigma_clamped = 0;
    for (double& s : map.sigma_hat) {
        if (!(s >= kMinSigma)) {
            s = kMinSigma;
            ++map.sigma_clamped;
        }
    }
}

TailMapBuild build_tail_maps(std::span<const MeasurementSet> observed, std::span<const Location> grid,
                             const AllocationRequest& request, Exec exec)
{
    request.validate();
    if (observed.empty()) {
        throw InsufficientDataError("no observed sites");
    }
    const std::vector<std::size_t> order = canonical_order(observed);
    std::vector<std::span<const double>> sample_sets;
    sample_sets.reserve(order.size());
    for (const std::size_t i : order) {
        sample_sets.emplace_back(observed[i].samples);
    }
    const std::vector<kernels::FitOutcome> outcomes = kernels::fit_sites(sample_sets, request.rho, exec);

    TailMapBuild build;
    std::vector<Location> locs;
    std::vector<double> mu, xi, sigma;
    for (std::size_t k = 0; k < order.size(); ++k) {
        const MeasurementSet& set = observed[order[k]];
        SiteFit site{set.loc_id, set.location, outcomes[k].fit, outcomes[k].error};
        if (site.fit) {
            locs.push_back(set.location);
            mu.push_back(site.fit->mu);
            xi.push_back(site.fit->xi);
            sigma.push_back(site.fit->sigma);
        }
        build.sites.push_back(std::move(site));
    }
    build.retained = locs.size();
    build.excluded = order.size() - locs.size();
    if (locs.empty()) {
        throw NumericalError("tail fit failed at every observed site");
    }

    const HyperparamOptions hyper = grid_bounds(grid, request.hyper);
    build.mu = krige(mu, locs, grid, request.mu_kernel, hyper, exec);
    build.xi = krige(xi, locs, grid, request.xi_kernel, hyper, exec);
    build.sigma = krige(sigma, locs, grid, request.sigma_kernel, hyper, exec);

    RadioMap& map = build.map;
    map.grid.assign(grid.begin(), grid.end());
    map.mu_mean = build.mu.posterior.mean;
    map.mu_var = build.mu.posterior.var;
    map.xi_hat = build.xi.posterior.mean;
    map.xi_var = build.xi.posterior.var;
    map.sigma_hat = build.sigma.posterior.mean;
    map.sigma_var = build.sigma.posterior.var;
    apply_margin(map, request.tau);
    return build;
}

RateMap allocate_rates_evt(const RadioMap& map, const AllocationRequest& request)
{
    request.validate();
    if (request.zeta > 1.0 - request.rho) {
        throw TargetTooLooseError("zeta exceeds 1 - rho: raise rho (and the sample count N) to resolve this target");
    }
    if (map.mu_tau.size() != map.grid.size()) {
        throw DomainError("radio map has no margin applied");
    }
    RateMap out;
    out.method = Method::Evt;
    out.grid = map.grid;
    out.phi.resize(map.grid.size());
    out.rate.resize(map.grid.size());
    for (std::size_t i = 0; i < map.grid.size(); ++i) {
        const TailFit fit{map.mu_tau[i], map.xi_hat[i], std::max(map.sigma_hat[i], kMinSigma), request.rho, 0, 0.0};
        out.phi[i] = invert_tail_outage(request.zeta, fit);
        out.rate[i] = rate_from_phi(out.phi[i]);
    }
    return out;
}

std::size_t benchmark_rank(std::size_t n, double zeta)
{
    if (!(zeta > 0.0 && zeta < 1.0)) {
        throw DomainError("zeta must lie in (0, 1)");
    }
    const double v = static_cast<double>(n) * zeta;
    return static_cast<std::size_t>(std::floor(v + 1e-9 * std::max(1.0, v)));
}

double benchmark_quantile(std::span<const double> samples, double zeta)
{
    const std::size_t k = benchmark_rank(samples.size(), zeta);
    if (k == 0) {
        throw InfeasibleError("benchmark quantile needs N >= 1/zeta (floor(N * zeta) = 0 for N = " +
                              std::to_string(samples.size()) + ")");
    }
    std::vector<double> logs;
    logs.reserve(samples.size());
    for (const double g : samples) {
        if (!(g > 0.0)) {
            throw DomainError("benchmark_quantile: SNR samples must be > 0");
        }
        logs.push_back(std::log(g));
    }
    auto nth = logs.begin() + static_cast<std::ptrdiff_t>(k - 1);
    std::nth_element(logs.begin(), nth, logs.end());
    return *nth;
}

double benchmark_rate(double theta, double alpha, double delta)
{
    if (!(alpha >= 0.0)) {
        throw DomainError("benchmark std must be >= 0");
    }
    if (!(delta > 0.0 && delta < 1.0)) {
        throw DomainError("delta must lie in (0, 1)");
    }
    const double margin = alpha == 0.0 ? 0.0 : std::numbers::sqrt2 * alpha * inverse_erf(2.0 * delta - 1.0);
    return softplus_log2(theta + margin);
}

BenchmarkPosterior build_benchmark_map(std::span<const MeasurementSet> observed, std::span<const Location> grid,
                                       double zeta, double delta, const HyperparamOptions& hyper,
                                       std::optional<CovarianceSpec> fixed)
{
    if (observed.empty()) {
        throw InsufficientDataError("no observed sites");
    }
    if (!(delta > 0.0 && delta <= 0.5)) {
        throw ConfigError("delta must lie in (0, 0.5]");
    }
    const std::vector<std::size_t> order = canonical_order(observed);
    std::vector<Location> locs;
    std::vector<double> q;
    for (const std::size_t i : order) {
        locs.push_back(observed[i].location);
        q.push_back(benchmark_quantile(observed[i].samples, zeta));
    }
    BenchmarkPosterior out;
    out.delta = delta;
    const MapKernelConfig kernel{CovarianceKind::Exponential, fixed};
    out.quantile = krige(q, locs, grid, kernel, grid_bounds(grid, hyper), Exec::Parallel);
    out.theta = out.quantile.posterior.mean;
    out.alpha.reserve(out.theta.size());
    for (const double v : out.quantile.posterior.var) {
        out.alpha.push_back(std::sqrt(std::max(0.0, v)));
    }
    return out;
}

RateMap allocate_rates_benchmark(const BenchmarkPosterior& posterior, std::span<const Location> grid)
{
    if (posterior.theta.size() != grid.size()) {
        throw DomainError("benchmark posterior size differs from the grid size");
    }
    RateMap out;
    out.method = Method::Benchmark;
    out.grid.assign(grid.begin(), grid.end());
    out.phi = posterior.theta;
    out.rate.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out.rate[i] = benchmark_rate(posterior.theta[i], posterior.alpha[i], posterior.delta);
    }
    return out;
}

RateMap allocate_rates_benchmark(std::span<const MeasurementSet> observed, std::span<const Location> grid,
                                 double zeta, double delta, const HyperparamOptions& hyper)
{
    return allocate_rates_benchmark(build_benchmark_map(observed, grid, zeta, delta, hyper), grid);
}

} // namespace evtmap
