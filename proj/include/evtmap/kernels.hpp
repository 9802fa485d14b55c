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

#ifndef EVTMAP_KERNELS_HPP
#define EVTMAP_KERNELS_HPP

// Data-parallel hot loops. Every kernel has a serial reference path
// (Exec::Serial) and an OpenMP path (Exec::Parallel); the test suite checks
// them against each other and bench/ times them.

#include "evtmap/evt.hpp"
#include "evtmap/gp.hpp"
#include "evtmap/synth_env.hpp"
#include "evtmap/types.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace evtmap::kernels {

// Entry (i, j) = spec(|a_i - b_j|).
Eigen::MatrixXd cross_covariance(std::span<const Location> a, std::span<const Location> b,
                                 const CovarianceSpec& spec, Exec exec);

struct Moments {
    std::vector<double> mean;
    std::vector<double> var; // latent variance, clamped at 0
};

// Predictive mean k_*^T alpha and variance k(0) - |L^-1 k_*|^2 for every
// target, given the Cholesky factor of the noisy Gram matrix and
// alpha = (K + noise2 I)^-1 y. Serial assembles the full cross-covariance
// and solves all targets at once; Parallel works in target blocks.
Moments predictive_moments(const Eigen::LLT<Eigen::MatrixXd>& factor, const Eigen::VectorXd& alpha,
                           std::span<const Location> observed, std::span<const Location> targets,
                           const CovarianceSpec& spec, Exec exec);

struct FitOutcome {
    std::optional<TailFit> fit;
    std::string error; // set when fit is empty
};

// Independent tail fit per sample set.
std::vector<FitOutcome> fit_sites(std::span<const std::span<const double>> sample_sets, double rho, Exec exec);

struct SiteScore {
    // below[k] = number of test samples strictly below target_snr[k][site].
    std::vector<std::size_t> below;
    FitOutcome test_fit; // only when requested
};

// Draws n_test samples per grid point from the sampler and scores them
// against every target-SNR map. Optionally fits the ground-truth tail.
std::vector<SiteScore> score_sites(const TestSampler& sampler, std::size_t n_test,
                                   std::span<const std::vector<double>> target_snr, std::optional<double> fit_rho,
                                   Exec exec);

} // namespace evtmap::kernels

#endif
