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

// Serial reference kernels against their OpenMP counterparts.

#include "evtmap/gp.hpp"
#include "evtmap/kernels.hpp"
#include "evtmap/synth_env.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace evtmap;

namespace {

std::vector<Location> scatter(std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 eng(seed);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    std::vector<Location> out(n);
    for (auto& l : out) {
        l = {u(eng), u(eng)};
    }
    return out;
}

Exec exec_of(const benchmark::State& state)
{
    return state.range(0) == 0 ? Exec::Serial : Exec::Parallel;
}

void BM_CrossCovariance(benchmark::State& state)
{
    const auto a = scatter(1600, 1);
    const auto b = scatter(100, 2);
    const CovarianceSpec spec{CovarianceKind::Matern, 1.0, 10.0, 2.5, 0.0};
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernels::cross_covariance(a, b, spec, exec_of(state)));
    }
}

void BM_PredictiveMoments(benchmark::State& state)
{
    const auto obs = scatter(100, 3);
    const auto targets = scatter(1600, 4);
    const CovarianceSpec spec{CovarianceKind::Exponential, 1.0, 10.0, 0.5, 0.1};
    const auto factor = factor_gram(covariance_matrix(obs, obs, spec), spec);
    const Eigen::VectorXd alpha = factor.solve(Eigen::VectorXd::Ones(100));
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernels::predictive_moments(factor, alpha, obs, targets, spec, exec_of(state)));
    }
}

void BM_FitSites(benchmark::State& state)
{
    std::vector<std::vector<double>> sets;
    for (std::uint64_t k = 0; k < 100; ++k) {
        sets.push_back(draw_snr_samples(50.0, 8.0, 10000, k));
    }
    const std::vector<std::span<const double>> spans(sets.begin(), sets.end());
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernels::fit_sites(spans, 0.99, exec_of(state)));
    }
}

void BM_ScoreSites(benchmark::State& state)
{
    ScenarioConfig c = desk_preset();
    c.n_samples = 100;
    const Dataset ds = generate_dataset(c);
    const TestSampler sampler(ds.config, ds.truth);
    std::vector<std::vector<double>> targets(1);
    for (const double db : ds.truth.mean_snr_db) {
        targets[0].push_back(0.01 * db_to_linear(db));
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernels::score_sites(sampler, 20000, targets, std::nullopt, exec_of(state)));
    }
}

} // namespace

BENCHMARK(BM_CrossCovariance)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PredictiveMoments)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FitSites)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScoreSites)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
