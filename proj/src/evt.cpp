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

#include "evtmap/evt.hpp"

#include "evtmap/errors.hpp"
#include "evtmap/optimize.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

namespace evtmap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ceil(v) tolerant of products like 0.99 * 100 landing one ulp above 99.
std::size_t ceil_count(double v)
{
    return static_cast<std::size_t>(std::ceil(v - 1e-9 * std::max(1.0, std::abs(v))));
}

// Upper end of the GPD support, +inf for xi >= 0.
double support_end(double xi, double sigma)
{
    return xi < 0.0 ? -sigma / xi : kInf;
}

void check_scale(double sigma)
{
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw DomainError("GPD scale must be finite and > 0");
    }
}

} // namespace

double mirror_transform(double gamma)
{
    if (!(gamma > 0.0)) {
        throw DomainError("mirror_transform: SNR must be > 0");
    }
    return -std::log(gamma);
}

std::vector<double> mirror_transform(std::span<const double> gamma)
{
    std::vector<double> out;
    out.reserve(gamma.size());
    for (const double g : gamma) {
        out.push_back(mirror_transform(g));
    }
    return out;
}

std::size_t threshold_rank(std::size_t n, double rho)
{
    if (!(rho > 0.0 && rho < 1.0)) {
        throw DomainError("tail fraction rho must lie in (0, 1)");
    }
    return std::max<std::size_t>(1, ceil_count(rho * static_cast<double>(n)));
}

std::size_t min_samples_for(double rho)
{
    if (!(rho > 0.0 && rho < 1.0)) {
        throw DomainError("tail fraction rho must lie in (0, 1)");
    }
    return ceil_count(1.0 / (1.0 - rho));
}

double dumouchel_threshold(std::span<const double> psi, double rho)
{
    const std::size_t n = psi.size();
    if (n < min_samples_for(rho)) {
        throw InsufficientDataError("threshold needs at least " + std::to_string(min_samples_for(rho)) +
                                    " samples, got " + std::to_string(n));
    }
    const std::size_t k = threshold_rank(n, rho);
    std::vector<double> work(psi.begin(), psi.end());
    auto nth = work.begin() + static_cast<std::ptrdiff_t>(k - 1);
    std::nth_element(work.begin(), nth, work.end());
    const double mu = *nth;
    const bool any_above = std::any_of(nth + 1, work.end(), [mu](double v) { return v > mu; });
    if (!any_above) {
        throw InsufficientDataError("no samples above the threshold (degenerate tail)");
    }
    return mu;
}

std::vector<double> excesses(std::span<const double> psi, double mu)
{
    if (!std::isfinite(mu)) {
        throw DomainError("excesses: threshold must be finite");
    }
    std::vector<double> out;
    for (const double v : psi) {
        if (v > mu) {
            out.push_back(v - mu);
        }
    }
    if (out.empty()) {
        throw InsufficientDataError("threshold leaves no exceedances");
    }
    return out;
}

double gpd_cdf(double z, double xi, double sigma)
{
    check_scale(sigma);
    if (z <= 0.0) {
        return 0.0;
    }
    if (std::abs(xi) < kXiZero) {
        return -std::expm1(-z / sigma);
    }
    const double t = 1.0 + xi * z / sigma;
    if (t <= 0.0) {
        return 1.0; // past the finite endpoint of a xi < 0 tail
    }
    return -std::expm1(-std::log1p(xi * z / sigma) / xi);
}

double gpd_log_pdf(double z, double xi, double sigma)
{
    check_scale(sigma);
    if (z < 0.0) {
        return -kInf;
    }
    if (std::abs(xi) < kXiZero) {
        return -std::log(sigma) - z / sigma;
    }
    const double t = xi * z / sigma;
    if (1.0 + t <= 0.0) {
        return -kInf;
    }
    return -std::log(sigma) - (1.0 / xi + 1.0) * std::log1p(t);
}

double gpd_log_likelihood(std::span<const double> z, double xi, double sigma)
{
    if (!(sigma > 0.0) || !std::isfinite(sigma) || !std::isfinite(xi)) {
        return -kInf;
    }
    const double n = static_cast<double>(z.size());
    if (std::abs(xi) < kXiZero) {
        double s = 0.0;
        for (const double v : z) {
            s += v;
        }
        return -n * std::log(sigma) - s / sigma;
    }
    const double r = xi / sigma;
    double s = 0.0;
    for (const double v : z) {
        const double t = r * v;
        if (1.0 + t <= 0.0) {
            return -kInf;
        }
        s += std::log1p(t);
    }
    return -n * std::log(sigma) - (1.0 + 1.0 / xi) * s;
}

GpdEstimate gpd_pwm(std::span<const double> excesses)
{
    std::vector<double> x(excesses.begin(), excesses.end());
    std::sort(x.begin(), x.end());
    const std::size_t n = x.size();
    double a0 = 0.0;
    double a1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        a0 += x[i];
        a1 += x[i] * static_cast<double>(n - 1 - i) / static_cast<double>(n - 1);
    }
    a0 /= static_cast<double>(n);
    a1 /= static_cast<double>(n);
    const double denom = a0 - 2.0 * a1;
    GpdEstimate est;
    est.xi = 2.0 - a0 / denom; // Hosking's k = -xi
    est.sigma = 2.0 * a0 * a1 / denom;
    est.loglik = gpd_log_likelihood(x, est.xi, est.sigma);
    return est;
}

GpdEstimate fit_gpd_mle(std::span<const double> excesses)
{
    if (excesses.size() < 2) {
        throw InsufficientDataError("GPD fit needs at least 2 excesses");
    }
    std::vector<double> z(excesses.begin(), excesses.end());
    std::sort(z.begin(), z.end());
    if (!(z.front() >= 0.0) || !std::isfinite(z.back())) {
        throw DomainError("GPD excesses must be finite and >= 0");
    }
    if (z.front() == z.back()) {
        throw InsufficientDataError("GPD fit needs excesses that are not all equal");
    }
    const double zmax = z.back();
    const double zmean = std::accumulate(z.begin(), z.end(), 0.0) / static_cast<double>(z.size());

    GpdEstimate start = gpd_pwm(z);
    if (!std::isfinite(start.xi) || !std::isfinite(start.sigma) || start.sigma <= 0.0) {
        start.xi = 0.0;
        start.sigma = zmean;
    }
    start.xi = std::clamp(start.xi, -0.9, 2.0);
    if (start.xi < 0.0 && 1.0 + start.xi * zmax / start.sigma <= 0.0) {
        start.sigma = -start.xi * zmax * 1.05;
    }

    // The likelihood is unbounded for xi < -1; the MLE is sought in xi > -1.
    const Objective negloglik = [&z](std::span<const double> p) {
        if (p[0] <= -1.0) {
            return kInf;
        }
        return -gpd_log_likelihood(z, p[0], std::exp(p[1]));
    };

    SimplexOptions opt;
    opt.max_iterations = 500;
    const std::array<double, 2> step{0.1, 0.1};
    SimplexResult best = minimize_simplex(negloglik, {start.xi, std::log(start.sigma)}, step, opt);
    int iterations = best.iterations;
    if (!best.converged) {
        // Restart at a perturbed start.
        const std::array<double, 2> wide{0.25, 0.25};
        SimplexResult retry =
            minimize_simplex(negloglik, {best.x[0] + 0.05, best.x[1] - 0.05}, wide, opt);
        iterations += retry.iterations;
        if (retry.value < best.value || retry.converged) {
            best = retry;
        }
        if (!best.converged) {
            throw NumericalError("GPD likelihood maximization did not converge");
        }
    }
    // A second descent from the optimum guards against premature simplex
    // collapse.
    const std::array<double, 2> fine{0.01, 0.01};
    SimplexResult polish = minimize_simplex(negloglik, best.x, fine, opt);
    iterations += polish.iterations;
    if (polish.value <= best.value) {
        best = polish;
    }
    if (!std::isfinite(best.value)) {
        throw NumericalError("GPD likelihood maximization ended outside the support");
    }

    GpdEstimate out;
    out.xi = best.x[0];
    out.sigma = std::exp(best.x[1]);
    out.loglik = -best.value;
    out.iterations = iterations;
    return out;
}

TailFit fit_tail(std::span<const double> snr_linear, double rho)
{
    const std::vector<double> psi = mirror_transform(snr_linear);
    const double mu = dumouchel_threshold(psi, rho);
    const std::vector<double> z = excesses(psi, mu);
    const GpdEstimate est = fit_gpd_mle(z);
    return TailFit{mu, est.xi, est.sigma, rho, z.size(), est.loglik};
}

double tail_outage(double phi, const TailFit& fit)
{
    check_scale(fit.sigma);
    if (phi < fit.mu) {
        throw OutsideTailError("target lies below the tail threshold; outage is <= 1 - rho but not tail-resolvable");
    }
    const double p_tail = 1.0 - fit.rho;
    return p_tail * (1.0 - gpd_cdf(phi - fit.mu, fit.xi, fit.sigma));
}

double invert_tail_outage(double zeta, const TailFit& fit)
{
    check_scale(fit.sigma);
    const double p_tail = 1.0 - fit.rho;
    if (!(zeta > 0.0)) {
        throw DomainError("target outage must be > 0");
    }
    if (zeta > p_tail) {
        throw TargetTooLooseError("target outage exceeds 1 - rho; it is met at the threshold already");
    }
    const double log_ratio = std::log(zeta / p_tail); // <= 0
    if (std::abs(fit.xi) < kXiZero) {
        return fit.mu - fit.sigma * log_ratio;
    }
    return fit.mu + fit.sigma / fit.xi * std::expm1(-fit.xi * log_ratio);
}

double rate_from_phi(double phi)
{
    if (!std::isfinite(phi)) {
        throw DomainError("rate_from_phi: phi must be finite");
    }
    return std::log1p(std::exp(-phi)) / std::numbers::ln2;
}

double bhattacharyya_gpd(const TailFit& a, const TailFit& b)
{
    check_scale(a.sigma);
    check_scale(b.sigma);
    const auto integrand = [&](double z) {
        const double l = 0.5 * (gpd_log_pdf(z, a.xi, a.sigma) + gpd_log_pdf(z, b.xi, b.sigma));
        return std::isfinite(l) ? std::exp(l) : 0.0;
    };
    const double end = std::min(support_end(a.xi, a.sigma), support_end(b.xi, b.sigma));
    double coefficient = 0.0;
    double error = 0.0;
    constexpr double tol = 1e-12;
    if (std::isfinite(end)) {
        boost::math::quadrature::tanh_sinh<double> quad;
        coefficient = quad.integrate(integrand, 0.0, end, tol, &error);
    } else {
        boost::math::quadrature::exp_sinh<double> quad;
        coefficient = quad.integrate(integrand, 0.0, kInf, tol, &error);
    }
    if (!std::isfinite(coefficient) || coefficient <= 0.0) {
        throw NumericalError("Bhattacharyya coefficient is not positive (disjoint or degenerate supports)");
    }
    if (error > 1e-8) {
        throw NumericalError("Bhattacharyya integral did not reach the 1e-8 tolerance");
    }
    return std::max(0.0, -std::log(coefficient));
}

} // namespace evtmap
