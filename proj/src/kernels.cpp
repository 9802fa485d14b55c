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

#include "evtmap/errors.hpp"

#include <algorithm>
#include <exception>

namespace evtmap::kernels {

namespace {

constexpr Eigen::Index kTargetBlock = 128;

} // namespace

Eigen::MatrixXd cross_covariance(std::span<const Location> a, std::span<const Location> b,
                                 const CovarianceSpec& spec, Exec exec)
{
    const auto rows = static_cast<Eigen::Index>(a.size());
    const auto cols = static_cast<Eigen::Index>(b.size());
    Eigen::MatrixXd k(rows, cols);
    if (exec == Exec::Serial) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            for (Eigen::Index i = 0; i < rows; ++i) {
                k(i, j) = spec(distance(a[static_cast<std::size_t>(i)], b[static_cast<std::size_t>(j)]));
            }
        }
        return k;
    }
#pragma omp parallel for schedule(static)
    for (Eigen::Index j = 0; j < cols; ++j) {
        const Location& bj = b[static_cast<std::size_t>(j)];
        for (Eigen::Index i = 0; i < rows; ++i) {
            k(i, j) = spec(distance(a[static_cast<std::size_t>(i)], bj));
        }
    }
    return k;
}

Moments predictive_moments(const Eigen::LLT<Eigen::MatrixXd>& factor, const Eigen::VectorXd& alpha,
                           std::span<const Location> observed, std::span<const Location> targets,
                           const CovarianceSpec& spec, Exec exec)
{
    const auto n_targets = static_cast<Eigen::Index>(targets.size());
    const double prior = spec(0.0);
    Moments out;
    out.mean.resize(targets.size());
    out.var.resize(targets.size());

    if (exec == Exec::Serial) {
        const Eigen::MatrixXd k_star = cross_covariance(targets, observed, spec, Exec::Serial);
        const Eigen::VectorXd mean = k_star * alpha;
        const Eigen::MatrixXd v = factor.matrixL().solve(k_star.transpose());
        for (Eigen::Index t = 0; t < n_targets; ++t) {
            out.mean[static_cast<std::size_t>(t)] = mean(t);
            out.var[static_cast<std::size_t>(t)] = std::max(0.0, prior - v.col(t).squaredNorm());
        }
        return out;
    }

    const Eigen::Index n_blocks = (n_targets + kTargetBlock - 1) / kTargetBlock;
#pragma omp parallel for schedule(dynamic)
    for (Eigen::Index block = 0; block < n_blocks; ++block) {
        const Eigen::Index first = block * kTargetBlock;
        const Eigen::Index count = std::min(kTargetBlock, n_targets - first);
        const Eigen::MatrixXd k_star = cross_covariance(
            targets.subspan(static_cast<std::size_t>(first), static_cast<std::size_t>(count)), observed, spec,
            Exec::Serial);
        const Eigen::VectorXd mean = k_star * alpha;
        const Eigen::MatrixXd v = factor.matrixL().solve(k_star.transpose());
        for (Eigen::Index t = 0; t < count; ++t) {
            const auto idx = static_cast<std::size_t>(first + t);
            out.mean[idx] = mean(t);
            out.var[idx] = std::max(0.0, prior - v.col(t).squaredNorm());
        }
    }
    return out;
}

namespace {

FitOutcome fit_one(std::span<const double> samples, double rho)
{
    FitOutcome outcome;
    try {
        outcome.fit = fit_tail(samples, rho);
    } catch (const Error& e) {
        outcome.error = e.what();
    }
    return outcome;
}

} // namespace

std::vector<FitOutcome> fit_sites(std::span<const std::span<const double>> sets, double rho, Exec exec)
{
    std::vector<FitOutcome> out(sets.size());
    const auto n = static_cast<std::ptrdiff_t>(sets.size());
    if (exec == Exec::Serial) {
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            out[static_cast<std::size_t>(i)] = fit_one(sets[static_cast<std::size_t>(i)], rho);
        }
        return out;
    }
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = fit_one(sets[static_cast<std::size_t>(i)], rho);
    }
    return out;
}

namespace {

SiteScore score_one(const TestSampler& sampler, std::size_t site, std::vector<double>& buffer,
                    std::span<const std::vector<double>> target_snr, std::optional<double> fit_rho)
{
    sampler.draw(site, buffer);
    SiteScore score;
    score.below.reserve(target_snr.size());
    for (const auto& map : target_snr) {
        const double target = map[site];
        score.below.push_back(static_cast<std::size_t>(
            std::count_if(buffer.begin(), buffer.end(), [target](double v) { return v < target; })));
    }
    if (fit_rho) {
        score.test_fit = fit_one(buffer, *fit_rho);
    }
    return score;
}

} // namespace

std::vector<SiteScore> score_sites(const TestSampler& sampler, std::size_t n_test,
                                   std::span<const std::vector<double>> target_snr, std::optional<double> fit_rho,
                                   Exec exec)
{
    for (const auto& map : target_snr) {
        if (map.size() != sampler.size()) {
            throw DomainError("score_sites: target map size differs from the grid size");
        }
    }
    std::vector<SiteScore> out(sampler.size());
    const auto n = static_cast<std::ptrdiff_t>(sampler.size());
    if (exec == Exec::Serial) {
        std::vector<double> buffer(n_test);
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            out[static_cast<std::size_t>(i)] =
                score_one(sampler, static_cast<std::size_t>(i), buffer, target_snr, fit_rho);
        }
        return out;
    }
#pragma omp parallel
    {
        std::vector<double> buffer(n_test);
#pragma omp for schedule(dynamic, 4)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            out[static_cast<std::size_t>(i)] =
                score_one(sampler, static_cast<std::size_t>(i), buffer, target_snr, fit_rho);
        }
    }
    return out;
}

} // namespace evtmap::kernels
