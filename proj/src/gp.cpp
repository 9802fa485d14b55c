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

#include "evtmap/gp.hpp"

#include "evtmap/errors.hpp"
#include "evtmap/kernels.hpp"
#include "evtmap/optimize.hpp"
#include "evtmap/special.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace evtmap {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool supported_nu(double nu)
{
    return std::any_of(std::begin(kMaternNus), std::end(kMaternNus), [nu](double v) { return v == nu; });
}

double sample_variance(std::span<const double> v)
{
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (const double x : v) {
        ss += (x - mean) * (x - mean);
    }
    return ss / (n - 1.0);
}

} // namespace

std::string to_string(CovarianceKind kind)
{
    return kind == CovarianceKind::Exponential ? "exponential" : "matern";
}

CovarianceKind covariance_kind_from_string(const std::string& s)
{
    if (s == "exponential") {
        return CovarianceKind::Exponential;
    }
    if (s == "matern") {
        return CovarianceKind::Matern;
    }
    throw ConfigError("unknown covariance kind '" + s + "'");
}

double CovarianceSpec::operator()(double d) const
{
    if (d == 0.0) {
        return omega2;
    }
    if (kind == CovarianceKind::Exponential) {
        return omega2 * std::exp(-d / range_m);
    }
    const double u = std::sqrt(nu) * d / range_m;
    const double e = std::exp(-u);
    if (nu == 0.5) {
        return omega2 * e;
    }
    if (nu == 1.5) {
        return omega2 * (1.0 + u) * e;
    }
    if (nu == 2.5) {
        return omega2 * (1.0 + u + u * u / 3.0) * e;
    }
    throw DomainError("Matern smoothness must be one of 0.5, 1.5, 2.5");
}

void CovarianceSpec::validate() const
{
    if (!(omega2 > 0.0) || !(range_m > 0.0) || !(noise2 >= 0.0) || !std::isfinite(omega2) ||
        !std::isfinite(range_m) || !std::isfinite(noise2)) {
        throw DomainError("covariance spec needs omega2 > 0, range > 0, noise2 >= 0");
    }
    if (kind == CovarianceKind::Matern && !supported_nu(nu)) {
        throw DomainError("Matern smoothness must be one of 0.5, 1.5, 2.5");
    }
}

Normalized normalize(std::span<const double> values)
{
    if (values.size() < 2) {
        throw InsufficientDataError("normalization needs at least 2 values");
    }
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    const double sd = std::sqrt(sample_variance(values));
    if (!(sd > 0.0) || !std::isfinite(sd)) {
        throw InsufficientDataError("normalization of a constant vector (zero standard deviation)");
    }
    Normalized out;
    out.stats = {mean, sd};
    out.values.reserve(values.size());
    for (const double v : values) {
        out.values.push_back((v - mean) / sd);
    }
    return out;
}

std::vector<double> denormalize_values(std::span<const double> values, const NormalizationStats& stats)
{
    std::vector<double> out;
    out.reserve(values.size());
    for (const double v : values) {
        out.push_back(v * stats.std + stats.mean);
    }
    return out;
}

Eigen::MatrixXd covariance_matrix(std::span<const Location> a, std::span<const Location> b,
                                  const CovarianceSpec& spec)
{
    spec.validate();
    return kernels::cross_covariance(a, b, spec, Exec::Parallel);
}

Eigen::MatrixXd distance_matrix(std::span<const Location> a)
{
    const auto n = static_cast<Eigen::Index>(a.size());
    Eigen::MatrixXd d(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        d(j, j) = 0.0;
        for (Eigen::Index i = j + 1; i < n; ++i) {
            d(i, j) = distance(a[static_cast<std::size_t>(i)], a[static_cast<std::size_t>(j)]);
            d(j, i) = d(i, j);
        }
    }
    return d;
}

Eigen::LLT<Eigen::MatrixXd> factor_gram(const Eigen::MatrixXd& gram, const CovarianceSpec& spec)
{
    Eigen::LLT<Eigen::MatrixXd> llt;
    for (double jitter = 1e-10; jitter <= 1e-4 * (1.0 + 1e-9); jitter *= 10.0) {
        Eigen::MatrixXd a = gram;
        a.diagonal().array() += std::max(spec.noise2, jitter * spec.omega2);
        llt.compute(a);
        if (llt.info() == Eigen::Success) {
            return llt;
        }
    }
    throw NumericalError("Gram matrix factorization failed after jitter escalation");
}

double log_marginal_likelihood(std::span<const double> y, const Eigen::MatrixXd& distances,
                               const CovarianceSpec& spec)
{
    const Eigen::Index n = distances.rows();
    Eigen::MatrixXd gram(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = j; i < n; ++i) {
            gram(i, j) = spec(distances(i, j));
        }
    }
    Eigen::LLT<Eigen::MatrixXd> llt;
    try {
        llt = factor_gram(gram, spec);
    } catch (const NumericalError&) {
        return kNegInf;
    }
    const Eigen::Map<const Eigen::VectorXd> yv(y.data(), n);
    const Eigen::VectorXd w = llt.matrixL().solve(yv);
    const double log_det_half = llt.matrixLLT().diagonal().array().log().sum();
    return -0.5 * w.squaredNorm() - log_det_half - 0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
}

HyperparamFit fit_hyperparams(std::span<const double> y, std::span<const Location> locations, CovarianceKind kind,
                              const HyperparamOptions& options)
{
    if (y.size() != locations.size()) {
        throw DomainError("fit_hyperparams: value and location counts differ");
    }
    if (y.size() < 10) {
        throw InsufficientDataError("hyperparameter fit needs at least 10 observations");
    }
    const double s2 = sample_variance(y);
    if (!(s2 > 0.0)) {
        throw InsufficientDataError("hyperparameter fit on constant observations");
    }
    const Eigen::MatrixXd dist = distance_matrix(locations);

    double r_lo = options.range_lower;
    double r_hi = options.range_upper;
    if (r_lo <= 0.0) {
        double dmin = std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < dist.cols(); ++j) {
            for (Eigen::Index i = j + 1; i < dist.rows(); ++i) {
                if (dist(i, j) > 0.0) {
                    dmin = std::min(dmin, dist(i, j));
                }
            }
        }
        r_lo = 0.1 * (std::isfinite(dmin) ? dmin : 1.0);
    }
    if (r_hi <= 0.0) {
        double x0 = locations[0].x, x1 = x0, y0 = locations[0].y, y1 = y0;
        for (const auto& l : locations) {
            x0 = std::min(x0, l.x);
            x1 = std::max(x1, l.x);
            y0 = std::min(y0, l.y);
            y1 = std::max(y1, l.y);
        }
        r_hi = 10.0 * std::max(std::hypot(x1 - x0, y1 - y0), r_lo * 10.0);
    }
    if (!(r_lo > 0.0 && r_hi > r_lo)) {
        throw ConfigError("hyperparameter range bounds must satisfy 0 < lower < upper");
    }

    SimplexOptions opt;
    opt.max_iterations = 400;
    opt.f_tolerance = 1e-10;
    opt.x_tolerance = 1e-7;
    opt.lower = {std::log(options.omega2_lower * s2), std::log(r_lo), std::log(options.noise_lower * s2)};
    opt.upper = {std::log(options.omega2_upper * s2), std::log(r_hi), std::log(options.noise_upper * s2)};
    const std::array<double, 3> step{0.5, 0.5, 0.5};

    // Deterministic multi-start: four ranges spread log-uniformly across the
    // bounds, each with a low- and a high-noise start.
    std::vector<std::vector<double>> starts;
    const int n_starts = std::max(1, options.starts);
    for (int s = 0; s < n_starts; ++s) {
        const int r_slot = s / 2;
        const int r_slots = (n_starts + 1) / 2;
        const double f = (static_cast<double>(r_slot) + 0.5) / static_cast<double>(r_slots);
        const double log_r = std::log(r_lo) + f * (std::log(r_hi) - std::log(r_lo)) * 0.6;
        const double noise_frac = (s % 2 == 0) ? 0.02 : 0.4;
        starts.push_back({std::log(s2 * (1.0 - noise_frac)), log_r, std::log(noise_frac * s2)});
    }

    std::vector<double> nus;
    if (kind == CovarianceKind::Matern) {
        nus.assign(std::begin(kMaternNus), std::end(kMaternNus));
    } else {
        nus.push_back(0.5);
    }

    HyperparamFit best;
    best.log_marginal = kNegInf;
    for (const double nu : nus) {
        const Objective objective = [&](std::span<const double> p) {
            CovarianceSpec spec{kind, std::exp(p[0]), std::exp(p[1]), nu, std::exp(p[2])};
            return -log_marginal_likelihood(y, dist, spec);
        };
        for (const auto& start : starts) {
            const SimplexResult res = minimize_simplex(objective, start, step, opt);
            const double lml = -res.value;
            if (std::isfinite(lml) && lml > best.log_marginal) {
                best.log_marginal = lml;
                best.spec = CovarianceSpec{kind, std::exp(res.x[0]), std::exp(res.x[1]), nu, std::exp(res.x[2])};
            }
        }
    }
    if (!std::isfinite(best.log_marginal)) {
        throw NumericalError("every hyperparameter candidate was numerically singular");
    }
    best.low_spatial_signal = best.spec.range_m <= 1.5 * r_lo || best.spec.noise2 > best.spec.omega2;
    return best;
}

GpPosterior predict(std::span<const double> y, std::span<const Location> observed,
                    std::span<const Location> targets, const CovarianceSpec& spec, Exec exec)
{
    spec.validate();
    if (y.size() != observed.size() || observed.empty()) {
        throw DomainError("predict: need one value per observed location");
    }
    const Eigen::MatrixXd gram = kernels::cross_covariance(observed, observed, spec, exec);
    const Eigen::LLT<Eigen::MatrixXd> llt = factor_gram(gram, spec);
    const Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(y.size()));
    const Eigen::VectorXd alpha = llt.solve(yv);

    kernels::Moments m = kernels::predictive_moments(llt, alpha, observed, targets, spec, exec);
    GpPosterior out;
    out.targets.assign(targets.begin(), targets.end());
    out.mean = std::move(m.mean);
    out.var = std::move(m.var);
    out.spec = spec;
    return out;
}

GpPosterior denormalize(GpPosterior posterior, const NormalizationStats& stats)
{
    for (double& m : posterior.mean) {
        m = m * stats.std + stats.mean;
    }
    for (double& v : posterior.var) {
        v *= stats.std * stats.std;
    }
    posterior.stats = stats;
    return posterior;
}

double gaussian_upper_quantile(double tau, double mean, double var)
{
    if (!(tau > 0.0 && tau <= 0.5)) {
        throw DomainError("margin level tau must lie in (0, 0.5]");
    }
    if (!(var >= 0.0)) {
        throw DomainError("variance must be >= 0");
    }
    if (var == 0.0) {
        return mean;
    }
    return mean - std::sqrt(var) * inverse_normal_cdf(tau);
}

} // namespace evtmap
