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

#include "evtmap/kernels.hpp"
#include "test_support.hpp"

#include <doctest.h>

using namespace evtmap;

namespace {

ScenarioConfig tiny_config()
{
    ScenarioConfig c;
    c.grid = {24.0, 24.0, 6, 6};
    c.m_observed = 8;
    c.n_samples = 1000;
    c.bs_x_m = 12.0;
    c.bs_y_m = 12.0;
    c.seed = 31;
    return c;
}

} // namespace

TEST_SUITE("parallel kernels")
{
    TEST_CASE("cross covariance")
    {
        const auto a = test::random_locations(150, 50.0, 1);
        const auto b = test::random_locations(90, 50.0, 2);
        for (const CovarianceSpec spec : {CovarianceSpec{CovarianceKind::Exponential, 1.3, 8.0, 0.5, 0.0},
                                          CovarianceSpec{CovarianceKind::Matern, 0.7, 12.0, 1.5, 0.0},
                                          CovarianceSpec{CovarianceKind::Matern, 2.0, 5.0, 2.5, 0.0}}) {
            const Eigen::MatrixXd s = kernels::cross_covariance(a, b, spec, Exec::Serial);
            const Eigen::MatrixXd p = kernels::cross_covariance(a, b, spec, Exec::Parallel);
            CHECK(s.rows() == 150);
            CHECK(s.cols() == 90);
            CHECK((s.array() == p.array()).all());
            CHECK(s(3, 4) == spec(distance(a[3], b[4])));
        }
    }

    TEST_CASE("predictive moments")
    {
        const auto obs = test::random_locations(60, 40.0, 3);
        const auto targets = test::random_locations(500, 40.0, 4);
        const CovarianceSpec spec{CovarianceKind::Matern, 1.0, 9.0, 1.5, 0.05};
        Engine eng(5);
        Eigen::VectorXd y(60);
        for (Eigen::Index i = 0; i < 60; ++i) {
            y(i) = test::uniform_open(eng) - 0.5;
        }
        const auto factor = factor_gram(covariance_matrix(obs, obs, spec), spec);
        const Eigen::VectorXd alpha = factor.solve(y);
        const auto s = kernels::predictive_moments(factor, alpha, obs, targets, spec, Exec::Serial);
        const auto p = kernels::predictive_moments(factor, alpha, obs, targets, spec, Exec::Parallel);
        CHECK(s.mean == p.mean);
        CHECK(s.var == p.var);
        for (const double v : s.var) {
            CHECK(v >= 0.0);
            CHECK(v <= spec.omega2 + 1e-8);
        }
    }

    TEST_CASE("site fitting")
    {
        std::vector<std::vector<double>> sets;
        for (std::uint64_t k = 0; k < 12; ++k) {
            sets.push_back(draw_snr_samples(20.0 + static_cast<double>(k), 1.0 + static_cast<double>(k), 3000, k));
        }
        sets.push_back(std::vector<double>(3000, 2.0));
        std::vector<std::span<const double>> spans(sets.begin(), sets.end());
        const auto s = kernels::fit_sites(spans, 0.99, Exec::Serial);
        const auto p = kernels::fit_sites(spans, 0.99, Exec::Parallel);
        REQUIRE(s.size() == sets.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            REQUIRE(s[i].fit.has_value() == p[i].fit.has_value());
            if (s[i].fit) {
                CHECK(s[i].fit->mu == p[i].fit->mu);
                CHECK(s[i].fit->xi == p[i].fit->xi);
                CHECK(s[i].fit->sigma == p[i].fit->sigma);
            } else {
                CHECK(s[i].error == p[i].error);
            }
        }
        CHECK_FALSE(s.back().fit.has_value());
        CHECK_FALSE(s.back().error.empty());
    }

    TEST_CASE("site scoring")
    {
        const Dataset ds = generate_dataset(tiny_config());
        const TestSampler sampler(ds.config, ds.truth);
        std::vector<std::vector<double>> targets(2);
        for (std::size_t i = 0; i < ds.grid.size(); ++i) {
            targets[0].push_back(0.01 * db_to_linear(ds.truth.mean_snr_db[i]));
            targets[1].push_back(0.1 * db_to_linear(ds.truth.mean_snr_db[i]));
        }
        const auto s = kernels::score_sites(sampler, 4000, targets, 0.99, Exec::Serial);
        const auto p = kernels::score_sites(sampler, 4000, targets, 0.99, Exec::Parallel);
        REQUIRE(s.size() == ds.grid.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            CHECK(s[i].below == p[i].below);
            CHECK(s[i].below[0] <= s[i].below[1]);
            REQUIRE(s[i].test_fit.fit.has_value());
            CHECK(s[i].test_fit.fit->xi == p[i].test_fit.fit->xi);
        }
    }
}
