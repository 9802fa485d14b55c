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

#include "evtmap/errors.hpp"
#include "evtmap/evaluation.hpp"
#include "evtmap/synth_env.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace evtmap;

namespace {

ScenarioConfig tiny_config()
{
    ScenarioConfig c;
    c.grid = {20.0, 20.0, 5, 5};
    c.m_observed = 10;
    c.n_samples = 1000;
    c.bs_x_m = 10.0;
    c.bs_y_m = 10.0;
    c.seed = 11;
    return c;
}

EvalReport report_with(double availability, double mean_rate, std::vector<double> rates, std::string hash = "abc")
{
    EvalReport r;
    r.availability = availability;
    r.mean_rate = mean_rate;
    r.rates = std::move(rates);
    r.dataset_hash = std::move(hash);
    return r;
}

} // namespace

TEST_SUITE("empirical outage")
{
    TEST_CASE("examples")
    {
        const std::vector<double> above{2.0, 3.0, 4.0, 5.0};
        CHECK(empirical_outage(above, 1.0, 1e-3).empirical_outage == 0.0);
        CHECK(empirical_outage(above, 0.0, 1e-3).gamma_tar == 0.0);
        CHECK(empirical_outage(above, 0.0, 1e-3).empirical_outage == 0.0);
        // rate log2(4) gives target 3: samples 2 only are strictly below, 3 is not.
        const OutageRow half = empirical_outage(std::vector<double>{1.0, 2.0, 3.0, 4.0}, 2.0, 0.5);
        CHECK(half.gamma_tar == doctest::Approx(3.0).epsilon(1e-15));
        CHECK(half.empirical_outage == 0.5);
        CHECK(half.met);
        CHECK_THROWS_AS(empirical_outage(std::vector<double>{}, 1.0, 1e-3), InsufficientDataError);
        CHECK_THROWS_AS(empirical_outage(above, -1.0, 1e-3), DomainError);
    }

    TEST_CASE("monotone in the rate")
    {
        const std::vector<double> s = draw_snr_samples(5.0, 3.0, 20000, 2);
        double prev = 0.0;
        for (double rate = 0.0; rate < 5.0; rate += 0.05) {
            const double o = empirical_outage(s, rate, 1e-3).empirical_outage;
            CHECK(o >= prev);
            prev = o;
        }
        CHECK(prev > 0.5);
    }
}

TEST_SUITE("availability")
{
    TEST_CASE("examples")
    {
        std::vector<OutageRow> rows{{0.0, 1e-4, true}, {0.0, 2e-3, false}};
        CHECK(availability(rows, 1e-3) == 50.0);
        CHECK(availability(rows, 1e-2) == 100.0);
        CHECK(availability(rows, 1e-5) == 0.0);
        CHECK_THROWS_AS(availability(std::vector<OutageRow>{}, 1e-3), InsufficientDataError);
    }

    TEST_CASE("monotone in zeta")
    {
        Engine eng(4);
        std::vector<OutageRow> rows(500);
        for (auto& r : rows) {
            r.empirical_outage = 1e-2 * test::uniform_open(eng);
        }
        double prev = 0.0;
        for (double z = 1e-5; z < 2e-2; z *= 1.3) {
            const double a = availability(rows, z);
            CHECK(a >= prev);
            prev = a;
        }
        CHECK(prev == 100.0);
    }
}

TEST_SUITE("ecdf")
{
    TEST_CASE("examples")
    {
        const auto e = ecdf(std::vector<double>{3.0, 1.0, 2.0});
        REQUIRE(e.size() == 3);
        CHECK(e[0].value == 1.0);
        CHECK(e[0].fraction == doctest::Approx(1.0 / 3.0));
        CHECK(e[1].value == 2.0);
        CHECK(e[1].fraction == doctest::Approx(2.0 / 3.0));
        CHECK(e[2].value == 3.0);
        CHECK(e[2].fraction == 1.0);

        const auto single = ecdf(std::vector<double>{5.0});
        REQUIRE(single.size() == 1);
        CHECK(single[0].value == 5.0);
        CHECK(single[0].fraction == 1.0);

        const auto ties = ecdf(std::vector<double>{1.0, 1.0, 2.0});
        REQUIRE(ties.size() == 2);
        CHECK(ties[0].value == 1.0);
        CHECK(ties[0].fraction == doctest::Approx(2.0 / 3.0));
        CHECK(ties[1].fraction == 1.0);

        CHECK_THROWS_AS(ecdf(std::vector<double>{}), InsufficientDataError);
    }

    TEST_CASE("valid distribution function")
    {
        Engine eng(5);
        std::vector<double> v(997);
        for (auto& x : v) {
            x = std::floor(50.0 * test::uniform_open(eng));
        }
        const auto e = ecdf(v);
        for (std::size_t i = 1; i < e.size(); ++i) {
            CHECK(e[i].value > e[i - 1].value);
            CHECK(e[i].fraction > e[i - 1].fraction);
        }
        CHECK(e.front().fraction > 0.0);
        CHECK(e.back().fraction == 1.0);
        for (const auto& p : e) {
            const auto count = std::count_if(v.begin(), v.end(), [&](double x) { return x <= p.value; });
            CHECK(p.fraction == doctest::Approx(static_cast<double>(count) / 997.0).epsilon(1e-14));
        }
    }
}

TEST_SUITE("compare")
{
    TEST_CASE("examples")
    {
        const EvalReport a = report_with(99.0, 1.281, {1.0, 2.0, 3.0});
        const EvalReport b = report_with(98.5, 1.0, {1.5, 1.0, 3.0});
        const Comparison c = compare_report(a, b);
        CHECK(c.mean_rate_gain_pct == doctest::Approx(28.1).epsilon(1e-12));
        CHECK(c.availability_diff == doctest::Approx(0.5));
        CHECK(c.win_fraction == doctest::Approx(1.0 / 3.0));

        const Comparison self = compare_report(a, a);
        CHECK(self.mean_rate_gain_pct == 0.0);
        CHECK(self.availability_diff == 0.0);
        CHECK(self.win_fraction == 0.0);

        CHECK_THROWS_AS(compare_report(a, report_with(98.5, 1.0, {1.0, 1.0, 1.0}, "def")), IntegrityError);
    }
}

TEST_SUITE("scoring")
{
    TEST_CASE("batched scoring matches direct counts")
    {
        const Dataset ds = generate_dataset(tiny_config());
        const TestSampler sampler(ds.config, ds.truth);
        RateMap m;
        m.grid = ds.grid;
        Engine eng(6);
        for (std::size_t i = 0; i < ds.grid.size(); ++i) {
            m.rate.push_back(0.3 * test::uniform_open(eng));
        }
        const std::size_t n_test = 5000;
        const std::vector<RateMap> maps{m};
        const auto reports = evaluate_rate_maps(sampler, maps, 1e-2, n_test, nullptr, 0.99, nullptr, Exec::Serial);
        REQUIRE(reports.size() == 1);
        std::vector<OutageRow> direct;
        for (std::size_t i = 0; i < ds.grid.size(); ++i) {
            const auto s = sampler.draw(i, n_test);
            direct.push_back(empirical_outage(s, m.rate[i], 1e-2));
            CHECK(reports[0].rows[i].empirical_outage == direct.back().empirical_outage);
            CHECK(reports[0].rows[i].met == direct.back().met);
        }
        CHECK(reports[0].availability == availability(direct, 1e-2));
        CHECK(reports[0].rate_ecdf.back().fraction == 1.0);

        const auto par = evaluate_rate_maps(sampler, maps, 1e-2, n_test, nullptr, 0.99, nullptr, Exec::Parallel);
        CHECK(par[0].availability == reports[0].availability);
    }

    TEST_CASE("divergence of a prediction equal to the test fit is zero")
    {
        const Dataset ds = generate_dataset(tiny_config());
        const TestSampler sampler(ds.config, ds.truth);
        const std::size_t n_test = 20000;
        std::vector<kernels::FitOutcome> fits;
        RadioMap pred;
        pred.grid = ds.grid;
        for (std::size_t i = 0; i < ds.grid.size(); ++i) {
            kernels::FitOutcome f;
            f.fit = fit_tail(sampler.draw(i, n_test), 0.99);
            pred.xi_hat.push_back(f.fit->xi);
            pred.sigma_hat.push_back(f.fit->sigma);
            fits.push_back(f);
        }
        fits[2].fit.reset();
        fits[2].error = "forced";
        const DivergenceMap d = tail_divergence_map(pred, fits);
        CHECK(d.missing == 1);
        CHECK_FALSE(d.d_bh[2].has_value());
        const auto present = d.present();
        CHECK(present.size() == ds.grid.size() - 1);
        for (const double v : present) {
            CHECK(std::abs(v) < 1e-9);
        }

        const DivergenceMap lazy = tail_divergence_map(pred, sampler, n_test, 0.99, Exec::Serial);
        CHECK(lazy.missing == 0);
        for (const double v : lazy.present()) {
            CHECK(v >= 0.0);
            CHECK(std::abs(v) < 1e-9);
        }
    }
}
