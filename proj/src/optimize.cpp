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

#include "evtmap/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace evtmap {

namespace {

constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;

struct BoundedObjective {
    const Objective& f;
    const SimplexOptions& opt;

    void project(std::vector<double>& x) const
    {
        if (!opt.lower.empty()) {
            for (std::size_t i = 0; i < x.size(); ++i) {
                x[i] = std::max(x[i], opt.lower[i]);
            }
        }
        if (!opt.upper.empty()) {
            for (std::size_t i = 0; i < x.size(); ++i) {
                x[i] = std::min(x[i], opt.upper[i]);
            }
        }
    }

    double operator()(std::vector<double>& x) const
    {
        project(x);
        const double v = f(std::span<const double>(x));
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    }
};

} // namespace

SimplexResult minimize_simplex(const Objective& f, std::vector<double> start, std::span<const double> step,
                               const SimplexOptions& options)
{
    const std::size_t n = start.size();
    if (n == 0 || step.size() != n) {
        throw std::invalid_argument("minimize_simplex: start and step must have equal nonzero size");
    }
    if ((!options.lower.empty() && options.lower.size() != n) ||
        (!options.upper.empty() && options.upper.size() != n)) {
        throw std::invalid_argument("minimize_simplex: bound dimension mismatch");
    }

    const BoundedObjective eval{f, options};
    std::vector<std::vector<double>> pts(n + 1, start);
    std::vector<double> vals(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        pts[i + 1][i] += step[i];
        // A vertex pinned to the start by a bound would collapse the simplex.
        eval.project(pts[i + 1]);
        if (pts[i + 1][i] == start[i]) {
            pts[i + 1][i] -= step[i];
        }
    }
    for (std::size_t i = 0; i <= n; ++i) {
        vals[i] = eval(pts[i]);
    }

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), trial(n), trial2(n);
    SimplexResult result;
    int it = 0;
    for (; it < options.max_iterations; ++it) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[n - 1];

        double diameter = 0.0;
        for (std::size_t i = 0; i <= n; ++i) {
            for (std::size_t k = 0; k < n; ++k) {
                diameter = std::max(diameter, std::abs(pts[i][k] - pts[best][k]));
            }
        }
        const double spread = vals[worst] - vals[best];
        if (std::isfinite(vals[worst]) && spread <= options.f_tolerance * (1.0 + std::abs(vals[best])) &&
            diameter <= options.x_tolerance * (1.0 + diameter)) {
            result.converged = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) {
                continue;
            }
            for (std::size_t k = 0; k < n; ++k) {
                centroid[k] += pts[i][k];
            }
        }
        for (double& c : centroid) {
            c /= static_cast<double>(n);
        }

        for (std::size_t k = 0; k < n; ++k) {
            trial[k] = centroid[k] + kReflect * (centroid[k] - pts[worst][k]);
        }
        const double f_reflect = eval(trial);

        if (f_reflect < vals[best]) {
            for (std::size_t k = 0; k < n; ++k) {
                trial2[k] = centroid[k] + kExpand * (trial[k] - centroid[k]);
            }
            const double f_expand = eval(trial2);
            if (f_expand < f_reflect) {
                pts[worst] = trial2;
                vals[worst] = f_expand;
            } else {
                pts[worst] = trial;
                vals[worst] = f_reflect;
            }
            continue;
        }
        if (f_reflect < vals[second]) {
            pts[worst] = trial;
            vals[worst] = f_reflect;
            continue;
        }

        const bool outside = f_reflect < vals[worst];
        for (std::size_t k = 0; k < n; ++k) {
            trial2[k] = outside ? centroid[k] + kContract * (trial[k] - centroid[k])
                                : centroid[k] + kContract * (pts[worst][k] - centroid[k]);
        }
        const double f_contract = eval(trial2);
        if (f_contract < std::min(f_reflect, vals[worst])) {
            pts[worst] = trial2;
            vals[worst] = f_contract;
            continue;
        }

        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) {
                continue;
            }
            for (std::size_t k = 0; k < n; ++k) {
                pts[i][k] = pts[best][k] + kShrink * (pts[i][k] - pts[best][k]);
            }
            vals[i] = eval(pts[i]);
        }
    }

    const auto best = static_cast<std::size_t>(std::min_element(vals.begin(), vals.end()) - vals.begin());
    result.x = pts[best];
    result.value = vals[best];
    result.iterations = it;
    return result;
}

} // namespace evtmap
