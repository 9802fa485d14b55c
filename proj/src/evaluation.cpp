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

#include "evtmap/evaluation.hpp"

#include "evtmap/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace evtmap {

double target_snr(double rate)
{
    if (!(rate >= 0.0) || !std::isfinite(rate)) {
        throw DomainError("rate must be finite and >= 0");
    }
    return std::expm1(rate * std::numbers::ln2);
}

OutageRow empirical_outage(std::span<const double> test_samples, double rate, double zeta)
{
    if (test_samples.empty()) {
        throw InsufficientDataError("empty test set");
    }
    OutageRow row;
    row.gamma_tar = target_snr(rate);
    const double target = row.gamma_tar;
    const auto below = std::count_if(test_samples.begin(), test_samples.end(), [target](double v) { return v < target; });
    row.empirical_outage = static_cast<double>(below) / static_cast<double>(test_samples.size());
    row.met = row.empirical_outage <= zeta;
    return row;
}

double availability(std::span<const OutageRow> rows, double zeta)
{
    if (rows.empty()) {
        throw InsufficientDataError("availability of an empty result set");
    }
    const auto met = std::count_if(rows.begin(), rows.end(), [zeta](const OutageRow& r) { return r.empirical_outage <= zeta; });
    return 100.0 * static_cast<double>(met) / static_cast<double>(rows.size());
}

std::vector<EcdfPoint> ecdf(std::span<const double> values)
{
    if (values.empty()) {
        throw InsufficientDataError("ECDF of an empty sample");
    }
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());
    std::vector<EcdfPoint> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i + 1 < v.size() && v[i + 1] == v[i]) {
            continue;
        }
        out.push_back({v[i], i + 1 == v.size() ? 1.0 : static_cast<double>(i + 1) / n});
    }
    return out;
}

std::vector<double> DivergenceMap::present() const
{
    std::vector<double> out;
    for (const auto& d : d_bh) {
        if (d) {
            out.push_back(*d);
        }
    }
    return out;
}

DivergenceMap tail_divergence_map(const RadioMap& predicted, std::span<const kernels::FitOutcome> test_fits)
{
    if (test_fits.size() != predicted.grid.size()) {
        throw DomainError("tail_divergence_map: one test fit per grid point required");
    }
    DivergenceMap out;
    out.d_bh.resize(test_fits.size());
    for (std::size_t i = 0; i < test_fits.size(); ++i) {
        if (!test_fits[i].fit) {
            ++out.missing;
            continue;
        }
        const TailFit truth{0.0, test_fits[i].fit->xi, test_fits[i].fit->sigma, test_fits[i].fit->rho, 0, 0.0};
        const TailFit pred{0.0, predicted.xi_hat[i], std::max(predicted.sigma_hat[i], kMinSigma), truth.rho, 0, 0.0};
        try {
            out.d_bh[i] = bhattacharyya_gpd(pred, truth);
        } catch (const Error&) {
            ++out.missing;
        }
    }
    return out;
}

DivergenceMap tail_divergence_map(const RadioMap& predicted, const TestSampler& sampler, std::size_t n_test,
                                  double rho, Exec exec)
{
    const auto scores = kernels::score_sites(sampler, n_test, {}, rho, exec);
    std::vector<kernels::FitOutcome> fits;
    fits.reserve(scores.size());
    for (const auto& s : scores) {
        fits.push_back(s.test_fit);
    }
    return tail_divergence_map(predicted, fits);
}

std::vector<EvalReport> evaluate_rate_maps(const TestSampler& sampler, std::span<const RateMap> maps, double zeta,
                                           std::size_t n_test, const RadioMap* divergence_map, double rho,
                                           DivergenceMap* divergence_out, Exec exec)
{
    if (n_test == 0) {
        throw InsufficientDataError("empty test set");
    }
    std::vector<std::vector<double>> targets;
    for (const auto& m : maps) {
        if (m.rate.size() != sampler.size()) {
            throw DomainError("rate map size differs from the grid size");
        }
        std::vector<double> t;
        t.reserve(m.rate.size());
        for (const double r : m.rate) {
            t.push_back(target_snr(r));
        }
        targets.push_back(std::move(t));
    }
    const std::optional<double> fit_rho = divergence_map ? std::optional<double>(rho) : std::nullopt;
    const auto scores = kernels::score_sites(sampler, n_test, targets, fit_rho, exec);

    DivergenceMap divergence;
    if (divergence_map) {
        std::vector<kernels::FitOutcome> fits;
        fits.reserve(scores.size());
        for (const auto& s : scores) {
            fits.push_back(s.test_fit);
        }
        divergence = tail_divergence_map(*divergence_map, fits);
        if (divergence_out) {
            *divergence_out = divergence;
        }
    }

    std::vector<EvalReport> reports;
    for (std::size_t k = 0; k < maps.size(); ++k) {
        EvalReport rep;
        rep.method = maps[k].method;
        rep.zeta = zeta;
        rep.n_test = n_test;
        rep.rates = maps[k].rate;
        rep.rows.reserve(scores.size());
        for (std::size_t i = 0; i < scores.size(); ++i) {
            OutageRow row;
            row.gamma_tar = targets[k][i];
            row.empirical_outage = static_cast<double>(scores[i].below[k]) / static_cast<double>(n_test);
            row.met = row.empirical_outage <= zeta;
            rep.rows.push_back(row);
        }
        rep.availability = availability(rep.rows, zeta);
        rep.mean_rate = std::accumulate(rep.rates.begin(), rep.rates.end(), 0.0) / static_cast<double>(rep.rates.size());
        rep.rate_ecdf = ecdf(rep.rates);
        if (divergence_map) {
            const auto d = divergence.present();
            if (!d.empty()) {
                rep.dbh_ecdf = ecdf(d);
            }
            rep.dbh_missing = divergence.missing;
        }
        reports.push_back(std::move(rep));
    }
    return reports;
}

Comparison compare_report(const EvalReport& evt, const EvalReport& bench)
{
    if (evt.dataset_hash != bench.dataset_hash) {
        throw IntegrityError("reports come from different datasets (hash " + evt.dataset_hash + " vs " +
                             bench.dataset_hash + ")");
    }
    Comparison c;
    c.mean_rate_gain_pct = bench.mean_rate > 0.0 ? 100.0 * (evt.mean_rate / bench.mean_rate - 1.0) : 0.0;
    c.availability_diff = evt.availability - bench.availability;
    if (!evt.rates.empty() && evt.rates.size() == bench.rates.size()) {
        std::size_t wins = 0;
        for (std::size_t i = 0; i < evt.rates.size(); ++i) {
            wins += evt.rates[i] > bench.rates[i] ? 1 : 0;
        }
        c.win_fraction = static_cast<double>(wins) / static_cast<double>(evt.rates.size());
    }
    return c;
}

} // namespace evtmap
