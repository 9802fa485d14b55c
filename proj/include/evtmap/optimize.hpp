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

#ifndef EVTMAP_OPTIMIZE_HPP
#define EVTMAP_OPTIMIZE_HPP

#include <functional>
#include <span>
#include <vector>

namespace evtmap {

struct SimplexOptions {
    int max_iterations = 500;
    // Converged when both the spread of function values and the simplex
    // diameter (infinity norm) fall below these.
    double f_tolerance = 1e-12;
    double x_tolerance = 1e-10;
    // Optional box; vertices are projected onto it. Empty means unbounded.
    std::vector<double> lower;
    std::vector<double> upper;
};

struct SimplexResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

// Derivative-free Nelder-Mead minimization. Non-finite objective values are
// treated as +infinity, which lets callers encode infeasible regions.
SimplexResult minimize_simplex(const Objective& f, std::vector<double> start, std::span<const double> step,
                               const SimplexOptions& options = {});

} // namespace evtmap

#endif
