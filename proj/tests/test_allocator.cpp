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
#include "evtmap/evt.hpp"
#include "evtmap/synth_env.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace evtmap;

namespace {

ScenarioConfig small_config(std::uint64_t seed = 3)
{
    ScenarioConfig c;
    c.grid = {30.0, 30.0, 12, 12};
    c.m_observed = 20;
    c.n_samples = 2000;
    c.bs_x_m = 15.0;
    c.bs_y_m = 15.0;
    c.seed = seed;
    return c;
}

RadioMap single_point_map(double mu, double xi, double sigma, double mu_var = 0.0)
{
    RadioMap m;
    m.grid = {{0.0, 0.0}};
    m.mu_mean = {mu};
    m.mu_var = {mu_var};
    m.xi_hat = {xi};
    m.xi_var = {0.0};
    m.sigma_hat = {sigma};
    m.sigma_var = {0.0};
    return m;
}

RadioMap random_map(std::size_t n, std::uint64_t seed)
{
    Engine eng(seed);
    RadioMap m;
    for (std::size_t i = 0; i < n; ++i) {
        m.grid.push_back({static_cast<double>(i), 0.0});
        m.mu_mean.push_back(-10.0 + 12.0 * test::uniform_open(eng));
        m.mu_var.push_back(2.0 * test::uniform_open(eng));
        m.xi_hat.push_back(-0.4 + 0.8 * test::uniform_open(eng));
        m.xi_var.push_back(0.01);
        m.sigma_hat.push_back(-0.05 + 1.5 * test::uniform_open(eng));
        m.sigma_var.push_back(0.01);
    }
    return m;
}

AllocationRequest request_at(double zeta, double tau = 1e-3)
{
    AllocationRequest r;
    r.zeta = zeta;
    r.tau = tau;
    return r;
}

} // namespace

TEST_SUITE("evt allocation")
{
    TEST_CASE("closed-form chain")
    {
        RadioMap m = single_point_map(2.0, 0.1, 0.5);
        apply_margin(m, 1e-3);
        CHECK(m.mu_tau[0] == 2.0);
        const RateMap r = allocate_rates_evt(m, request_at(1e-3));
        CHECK(r.method == Method::Evt);
        CHECK(r.phi[0] == doctest::Approx(3.2946270589708366).epsilon(1e-13));
        CHECK(r.rate[0] == doctest::Approx(0.052529791360933634).epsilon(1e-13));
    }

    TEST_CASE("target at the tail fraction allocates at the threshold")
    {
        RadioMap m = random_map(50, 5);
        apply_margin(m, 1e-3);
        const RateMap r = allocate_rates_evt(m, request_at(0.01));
        for (std::size_t i = 0; i < 50; ++i) {
            CHECK(r.rate[i] == doctest::Approx(std::log2(1.0 + std::exp(-m.mu_tau[i]))).epsilon(1e-12));
        }
    }

    TEST_CASE("too loose a target is rejected")
    {
        RadioMap m = single_point_map(2.0, 0.1, 0.5);
        apply_margin(m, 1e-3);
        CHECK_THROWS_AS(allocate_rates_evt(m, request_at(0.02)), TargetTooLooseError);
    }

    TEST_CASE("stricter targets never raise a rate")
    {
        RadioMap m = random_map(400, 6);
        apply_margin(m, 1e-3);
        const RateMap loose = allocate_rates_evt(m, request_at(1e-3));
        const RateMap strict = allocate_rates_evt(m, request_at(1e-4));
        for (std::size_t i = 0; i < 400; ++i) {
            CHECK(strict.rate[i] <= loose.rate[i]);
            CHECK(std::isfinite(strict.rate[i]));
            CHECK(strict.rate[i] >= 0.0);
        }
    }

    TEST_CASE("margin is conservative and monotone in tau")
    {
        RadioMap m = random_map(400, 7);
        std::vector<double> prev_rate;
        for (const double tau : {0.5, 0.1, 1e-2, 1e-3, 1e-4, 1e-5}) {
            RadioMap mt = m;
            apply_margin(mt, tau);
            for (std::size_t i = 0; i < 400; ++i) {
                CHECK(mt.mu_tau[i] >= mt.mu_mean[i]);
            }
            const RateMap r = allocate_rates_evt(mt, request_at(1e-3, tau));
            if (!prev_rate.empty()) {
                for (std::size_t i = 0; i < 400; ++i) {
                    CHECK(r.rate[i] <= prev_rate[i]);
                }
            }
            prev_rate = r.rate;
        }
    }

    TEST_CASE("nonpositive scale predictions are clamped and counted")
    {
        RadioMap m = random_map(200, 8);
        const auto expected = static_cast<std::size_t>(
            std::count_if(m.sigma_hat.begin(), m.sigma_hat.end(), [](double s) { return s < kMinSigma; }));
        REQUIRE(expected > 0);
        apply_margin(m, 1e-3);
        CHECK(m.sigma_clamped == expected);
        CHECK(*std::min_element(m.sigma_hat.begin(), m.sigma_hat.end()) >= kMinSigma);
    }

    TEST_CASE("request validation")
    {
        CHECK_THROWS_AS(request_at(1e-3, 0.6).validate(), ConfigError);
        CHECK_THROWS_AS(request_at(0.0).validate(), ConfigError);
        CHECK(method_from_string("benchmark") == Method::Benchmark);
        CHECK(to_string(Method::Evt) == "evt");
        CHECK_THROWS_AS(method_from_string("oracle"), ConfigError);
    }
}

TEST_SUITE("tail maps")
{
    TEST_CASE("interpolation collapse with a single site")
    {
        MeasurementSet site;
        site.loc_id = 0;
        site.location = {4.0, 2.0};
        site.samples = draw_snr_samples(30.0, 2.0, 5000, 1);
        AllocationRequest req;
        const CovarianceSpec exact{CovarianceKind::Exponential, 1.0, 5.0, 0.5, 0.0};
        req.mu_kernel.fixed = exact;
        req.xi_kernel.fixed = CovarianceSpec{CovarianceKind::Matern, 1.0, 5.0, 1.5, 0.0};
        req.sigma_kernel.fixed = CovarianceSpec{CovarianceKind::Matern, 1.0, 5.0, 2.5, 0.0};
        const std::vector<MeasurementSet> obs{site};
        const std::vector<Location> grid{site.location};
        const TailMapBuild b = build_tail_maps(obs, grid, req);
        const TailFit direct = fit_tail(site.samples, req.rho);
        CHECK(b.map.mu_mean[0] == doctest::Approx(direct.mu).epsilon(1e-9));
        CHECK(b.map.xi_hat[0] == doctest::Approx(direct.xi).epsilon(1e-9));
        CHECK(b.map.sigma_hat[0] == doctest::Approx(direct.sigma).epsilon(1e-9));
        CHECK(b.map.mu_var[0] <= 1e-6);
        CHECK(b.retained == 1);
    }

    TEST_CASE("failed sites are excluded and counted")
    {
        const Dataset ds = generate_dataset(small_config());
        auto obs = ds.observed;
        obs[3].samples.assign(obs[3].samples.size(), 1.0);
        obs[11].samples.resize(20);
        AllocationRequest req;
        const TailMapBuild b = build_tail_maps(obs, ds.grid, req);
        CHECK(b.excluded == 2);
        CHECK(b.retained + b.excluded == obs.size());
        CHECK(b.map.mu_mean.size() == ds.grid.size());
        std::size_t failed = 0;
        for (const auto& s : b.sites) {
            if (!s.fit) {
                ++failed;
                CHECK_FALSE(s.error.empty());
            }
        }
        CHECK(failed == 2);
    }

    TEST_CASE("rate map is invariant to the order of sites and samples")
    {
        const Dataset ds = generate_dataset(small_config());
        const AllocationRequest req;
        const RateMap base = allocate_rates_evt(build_tail_maps(ds.observed, ds.grid, req).map, req);

        auto shuffled = ds.observed;
        std::mt19937_64 eng(99);
        std::shuffle(shuffled.begin(), shuffled.end(), eng);
        for (auto& s : shuffled) {
            std::shuffle(s.samples.begin(), s.samples.end(), eng);
        }
        const RateMap again = allocate_rates_evt(build_tail_maps(shuffled, ds.grid, req).map, req);
        CHECK(again.rate == base.rate);
        CHECK(again.phi == base.phi);
    }

    TEST_CASE("serial and parallel builds agree exactly")
    {
        const Dataset ds = generate_dataset(small_config(4));
        const AllocationRequest req;
        const TailMapBuild a = build_tail_maps(ds.observed, ds.grid, req, Exec::Serial);
        const TailMapBuild b = build_tail_maps(ds.observed, ds.grid, req, Exec::Parallel);
        CHECK(a.map.mu_tau == b.map.mu_tau);
        CHECK(a.map.xi_hat == b.map.xi_hat);
        CHECK(a.map.sigma_hat == b.map.sigma_hat);
    }
}

TEST_SUITE("benchmark")
{
    TEST_CASE("order statistic rank")
    {
        Engine eng(1);
        std::vector<double> s(2000);
        for (auto& v : s) {
            v = test::uniform_open(eng);
        }
        std::vector<double> sorted = s;
        std::sort(sorted.begin(), sorted.end());
        const std::span<const double> first(s.data(), 1000);
        CHECK(benchmark_quantile(first, 1e-3) == std::log(*std::min_element(first.begin(), first.end())));
        CHECK(benchmark_quantile(s, 1e-3) == std::log(sorted[1]));
        CHECK_THROWS_AS(benchmark_quantile(std::span<const double>(s.data(), 999), 1e-3), InfeasibleError);
        CHECK(benchmark_rank(100000, 1e-5) == 1);
        CHECK(benchmark_rank(10000, 1e-5) == 0);
    }

    TEST_CASE("rate formula")
    {
        for (const double theta : {-3.0, 0.0, 2.5}) {
            CHECK(benchmark_rate(theta, 0.0, 1e-3) == doctest::Approx(std::log2(1.0 + std::exp(theta))).epsilon(1e-14));
            CHECK(benchmark_rate(theta, 1.7, 0.5) == doctest::Approx(std::log2(1.0 + std::exp(theta))).epsilon(1e-14));
        }
        // 40-digit reference, frozen.
        CHECK(benchmark_rate(0.0, 1.0, 1e-3) == doctest::Approx(0.064181174302725801081).epsilon(1e-12));
        CHECK(benchmark_rate(0.0, 1.0, 1e-3) < benchmark_rate(0.0, 0.0, 1e-3));
    }

    TEST_CASE("insufficient samples make the benchmark infeasible")
    {
        ScenarioConfig c = small_config();
        c.n_samples = 5000;
        const Dataset ds = generate_dataset(c);
        CHECK_THROWS_AS(allocate_rates_benchmark(ds.observed, ds.grid, 1e-4, 1e-3), InfeasibleError);
        const RateMap r = allocate_rates_benchmark(ds.observed, ds.grid, 1e-3, 1e-3);
        CHECK(r.method == Method::Benchmark);
        CHECK(r.rate.size() == ds.grid.size());
        for (const double v : r.rate) {
            CHECK(std::isfinite(v));
            CHECK(v >= 0.0);
        }
    }

    TEST_CASE("posterior standard deviation is nonnegative")
    {
        const Dataset ds = generate_dataset(small_config());
        const BenchmarkPosterior p = build_benchmark_map(ds.observed, ds.grid, 1e-3, 1e-3);
        for (const double a : p.alpha) {
            CHECK(a >= 0.0);
        }
        CHECK(p.theta.size() == ds.grid.size());
    }
}
