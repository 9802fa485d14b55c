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

#ifndef EVTMAP_TEST_SUPPORT_HPP
#define EVTMAP_TEST_SUPPORT_HPP

#include "evtmap/rng.hpp"
#include "evtmap/types.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <unistd.h>

namespace evtmap::test {

// 53-bit uniform on (0, 1), independent of the library's distributions.
inline double uniform_open(Engine& eng)
{
    double u;
    do {
        u = static_cast<double>(eng() >> 11) * 0x1.0p-53;
    } while (u == 0.0);
    return u;
}

inline std::vector<double> gpd_sample(double xi, double sigma, std::size_t n, std::uint64_t seed)
{
    Engine eng(seed);
    std::vector<double> out(n);
    for (auto& z : out) {
        const double u = uniform_open(eng);
        z = xi == 0.0 ? -sigma * std::log(u) : sigma / xi * (std::pow(u, -xi) - 1.0);
    }
    return out;
}

// Textbook GPD log-likelihood in long double; -inf outside the support.
inline long double oracle_gpd_loglik(const std::vector<double>& z, long double xi, long double sigma)
{
    if (sigma <= 0) {
        return -INFINITY;
    }
    long double ll = 0;
    for (const double v : z) {
        if (std::fabs(static_cast<double>(xi)) < 1e-12) {
            ll += -std::log(sigma) - v / sigma;
            continue;
        }
        const long double t = 1 + xi * v / sigma;
        if (t <= 0) {
            return -INFINITY;
        }
        ll += -std::log(sigma) - (1 / xi + 1) * std::log(t);
    }
    return ll;
}

inline std::vector<Location> random_locations(std::size_t n, double extent, std::uint64_t seed)
{
    Engine eng(seed);
    std::vector<Location> out(n);
    for (auto& l : out) {
        l.x = extent * uniform_open(eng);
        l.y = extent * uniform_open(eng);
    }
    return out;
}

// Fresh directory under the system temp dir, removed on destruction.
class ScratchDir {
public:
    explicit ScratchDir(const std::string& name)
        : path_(std::filesystem::temp_directory_path() /
                ("evtmap_" + name + "_" + std::to_string(static_cast<long>(::getpid()))))
    {
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~ScratchDir()
    {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    ScratchDir(const ScratchDir&) = delete;
    ScratchDir& operator=(const ScratchDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(const std::string& leaf) const { return path_ / leaf; }

private:
    std::filesystem::path path_;
};

} // namespace evtmap::test

#endif
