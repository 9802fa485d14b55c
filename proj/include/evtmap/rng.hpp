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

#ifndef EVTMAP_RNG_HPP
#define EVTMAP_RNG_HPP

#include <cstdint>
#include <random>

namespace evtmap {

// Independent random streams derived from one scenario seed. Each stream is
// further split by an index (grid point id) so that per-location draws do not
// depend on iteration order or thread count.
enum class Stream : std::uint64_t {
    Shadowing = 1,
    KFactor = 2,
    Selection = 3,
    Observed = 4,
    Test = 5,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, Stream stream, std::uint64_t index = 0) noexcept
{
    return splitmix64(splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(stream)) + index);
}

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed, Stream stream, std::uint64_t index = 0)
{
    return Engine(derive_seed(seed, stream, index));
}

} // namespace evtmap

#endif
