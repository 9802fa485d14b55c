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

#ifndef EVTMAP_TYPES_HPP
#define EVTMAP_TYPES_HPP

#include <cmath>
#include <algorithm>
#include <cstddef>
#include <vector>

namespace evtmap {

// Planar position in meters.
struct Location {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Location&, const Location&) = default;
};

inline double distance(const Location& a, const Location& b) noexcept
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

// Regular evaluation lattice covering [0, width] x [0, height].
struct GridSpec {
    double width = 100.0;
    double height = 100.0;
    std::size_t nx = 40;
    std::size_t ny = 40;

    std::size_t size() const noexcept { return nx * ny; }
    double spacing_x() const noexcept { return nx > 1 ? width / static_cast<double>(nx - 1) : 0.0; }
    double spacing_y() const noexcept { return ny > 1 ? height / static_cast<double>(ny - 1) : 0.0; }
    double spacing() const noexcept { return std::min(spacing_x(), spacing_y()); }
    double diagonal() const noexcept { return std::hypot(width, height); }
};

// Execution policy for the data-parallel kernels. Serial runs the reference
// loop; Parallel runs the OpenMP version.
enum class Exec { Serial, Parallel };

} // namespace evtmap

#endif
