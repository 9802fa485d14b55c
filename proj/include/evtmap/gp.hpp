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

#ifndef EVTMAP_GP_HPP
#define EVTMAP_GP_HPP

// Gaussian-process kriging of scalar fields sampled at scattered locations.

#include "evtmap/types.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

namespace evtmap {

enum class CovarianceKind { Exponential, Matern };

std::string to_string(CovarianceKind kind);
CovarianceKind covariance_kind_from_string(const std::string& s);

// Smoothness values with closed-form Matern kernels.
inline constexpr double kMaternNus[] = {0.5, 1.5, 2.5};

struct CovarianceSpec {
    CovarianceKind kind = CovarianceKind::Exponential;
    double omega2 = 1.0;  // process variance
    double range_m = 10.0; // decorrelation distance
    double nu = 0.5;      // Matern smoothness, one of kMaternNus
    double noise2 = 0.0;  // observation noise variance

    // Exponential: omega2 exp(-d / r).
    // Matern: omega2 2^(1-nu)/Gamma(nu) u^nu K_nu(u) with u = sqrt(nu) d / r.
    double operator()(double d) const;
    void validate() const;
};

struct NormalizationStats {
    double mean = 0.0;
    double std = 1.0;
};

struct Normalized {
    std::vector<double> values;
    NormalizationStats stats;
};

// Zero mean, unit Bessel-corrected standard deviation.
Normalized normalize(std::span<const double> values);
std::vector<double> denormalize_values(std::span<const double> values, const NormalizationStats& stats);

Eigen::MatrixXd covariance_matrix(std::span<const Location> a, std::span<const Location> b,
                                  const CovarianceSpec& spec);
Eigen::MatrixXd distance_matrix(std::span<const Location> a);

// Cholesky factor of K + max(noise2, j * omega2) I with j = 1e-10,
// escalated x10 up to 1e-4 when the factorization fails. Throws
// NumericalError on failure.
Eigen::LLT<Eigen::MatrixXd> factor_gram(const Eigen::MatrixXd& gram, const CovarianceSpec& spec);

// Zero-mean Gaussian log marginal likelihood of y under `spec`, given the
// pairwise distance matrix. Returns -inf when the Gram matrix cannot be
// factorized.
double log_marginal_likelihood(std::span<const double> y, const Eigen::MatrixXd& distances,
                               const CovarianceSpec& spec);

struct HyperparamOptions {
    double range_lower = 0.0; // 0: 0.1 x smallest nonzero pairwise distance
    double range_upper = 0.0; // 0: 10 x bounding-box diagonal
    double noise_lower = 1e-6; // relative to the sample variance
    double noise_upper = 10.0;
    double omega2_lower = 1e-4;
    double omega2_upper = 1e2;
    int starts = 8;
};

struct HyperparamFit {
    CovarianceSpec spec;
    double log_marginal = 0.0;
    // Range at its lower bound or noise dominating the process variance.
    bool low_spatial_signal = false;
};

// Maximizes the log marginal likelihood over (ln omega2, ln r, ln noise2).
// For Matern kernels nu is chosen from kMaternNus by best likelihood.
HyperparamFit fit_hyperparams(std::span<const double> y, std::span<const Location> locations, CovarianceKind kind,
                              const HyperparamOptions& options = {});

struct GpPosterior {
    std::vector<Location> targets;
    std::vector<double> mean;
    std::vector<double> var;
    NormalizationStats stats{};
    CovarianceSpec spec{};
};

// Posterior mean and latent variance at targets, zero prior mean.
GpPosterior predict(std::span<const double> y, std::span<const Location> observed,
                    std::span<const Location> targets, const CovarianceSpec& spec, Exec exec = Exec::Parallel);

// Back to physical units: mean * std + mean, var * std^2.
GpPosterior denormalize(GpPosterior posterior, const NormalizationStats& stats);

// mean + sqrt(var) * Phi^-1(1 - tau): the value exceeded with probability tau.
double gaussian_upper_quantile(double tau, double mean, double var);

} // namespace evtmap

#endif
