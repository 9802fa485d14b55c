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

#ifndef EVTMAP_EVT_HPP
#define EVTMAP_EVT_HPP

// Peaks-over-threshold machinery in the mirrored domain psi = -ln(SNR):
// the lower SNR tail becomes an upper tail modelled by a generalized Pareto
// distribution above a fixed-fraction threshold.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace evtmap {

// Below this |xi| the exponential limit of the GPD is used.
inline constexpr double kXiZero = 1e-8;

struct TailFit {
    double mu = 0.0;    // threshold in the psi domain
    double xi = 0.0;    // shape
    double sigma = 1.0; // scale, > 0
    double rho = 0.99;  // tail fraction: Pr{psi > mu} = 1 - rho
    std::size_t n_exceed = 0;
    double loglik = 0.0;
};

double mirror_transform(double gamma);
std::vector<double> mirror_transform(std::span<const double> gamma);

// 1-based rank ceil(rho * n) of the threshold order statistic.
std::size_t threshold_rank(std::size_t n, double rho);
// Smallest sample count that leaves at least one exceedance.
std::size_t min_samples_for(double rho);

// Empirical rho-quantile: ascending sort, element at rank ceil(rho * N).
double dumouchel_threshold(std::span<const double> psi, double rho);

// {psi - mu : psi > mu}, in input order. Throws InsufficientDataError when empty.
std::vector<double> excesses(std::span<const double> psi, double mu);

double gpd_cdf(double z, double xi, double sigma);
double gpd_log_pdf(double z, double xi, double sigma);
// Returns -infinity when an excess falls outside the support.
double gpd_log_likelihood(std::span<const double> excesses, double xi, double sigma);

struct GpdEstimate {
    double xi = 0.0;
    double sigma = 1.0;
    double loglik = 0.0;
    int iterations = 0;
};

// Probability-weighted-moments starting point (Hosking & Wallis).
GpdEstimate gpd_pwm(std::span<const double> excesses);

// Maximum-likelihood fit over (xi, ln sigma) by simplex descent. The
// result does not depend on the order of `excesses`.
GpdEstimate fit_gpd_mle(std::span<const double> excesses);

// Complete per-location fit from linear SNR samples.
TailFit fit_tail(std::span<const double> snr_linear, double rho);

// (1 - rho) * (1 + xi (phi - mu) / sigma)^(-1/xi). Throws OutsideTailError
// for phi < mu.
double tail_outage(double phi, const TailFit& fit);

// phi with tail_outage(phi) = zeta. Throws TargetTooLooseError for
// zeta > 1 - rho.
double invert_tail_outage(double zeta, const TailFit& fit);

// log2(1 + exp(-phi)).
double rate_from_phi(double phi);

// -ln of the Bhattacharyya coefficient between two GPD excess densities
// (thresholds are ignored; both start at z = 0).
double bhattacharyya_gpd(const TailFit& a, const TailFit& b);

inline double inverse_mirror(double psi) noexcept
{
    return std::exp(-psi);
}

} // namespace evtmap

#endif
