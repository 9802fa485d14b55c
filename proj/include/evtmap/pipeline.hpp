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

#ifndef EVTMAP_PIPELINE_HPP
#define EVTMAP_PIPELINE_HPP

#include "evtmap/allocator.hpp"
#include "evtmap/evaluation.hpp"
#include "evtmap/io.hpp"
#include "evtmap/synth_env.hpp"

#include <cstdint>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace evtmap::app {

namespace fs = std::filesystem;

enum class ExitCode : int {
    Ok = 0,
    Failure = 1,
    Config = 2,     // bad flags, bad config fields, zeta > 1 - rho
    Infeasible = 3, // benchmark needs N >= 1/zeta
    Numerical = 4,  // fits or factorizations that could not be completed
    Integrity = 5,  // artifacts from different datasets, malformed files
};

ExitCode exit_code_for(const std::exception& e) noexcept;

struct Options {
    std::optional<fs::path> config;
    std::optional<std::string> preset; // "desk" or "paper"
    std::optional<std::uint64_t> seed;
    fs::path out = ".";
    std::optional<fs::path> data; // dataset directory, defaults to `out`
    std::optional<double> zeta;
    std::optional<double> rho;
    std::optional<double> tau; // defaults to zeta
    std::optional<double> delta;
    std::optional<Method> method;
    Exec exec = Exec::Parallel;
    bool quiet = false;
};

struct SweepOptions {
    std::vector<double> zetas{1e-3};
    std::vector<std::size_t> n_samples{1000, 10000, 100000};
    std::vector<std::uint64_t> seeds{1, 2, 3};
    std::vector<Method> methods{Method::Evt, Method::Benchmark};
};

// Preset (desk when neither is given), then config file, then --seed.
ScenarioConfig resolve_config(const Options& opts);
AllocationRequest resolve_request(const Options& opts);

void cmd_generate(const Options& opts);
void cmd_fit_maps(const Options& opts);
void cmd_allocate(const Options& opts);
void cmd_evaluate(const Options& opts);
void cmd_compare(const Options& opts);
void cmd_sweep(const Options& opts, const SweepOptions& sweep);

struct SweepCell {
    double zeta = 0.0;
    std::size_t n_samples = 0;
    std::uint64_t seed = 0;
    Method method = Method::Evt;
    std::string status = "ok"; // or the error class that stopped the cell
    std::string message;
    double availability = 0.0;
    double mean_rate = 0.0;
};

struct SweepSummaryRow {
    double zeta = 0.0;
    std::size_t n_samples = 0;
    Method method = Method::Evt;
    std::size_t n_ok = 0;
    double availability = 0.0; // mean over successful seeds
    double mean_rate = 0.0;
};

// Runs the cartesian product in memory. A cell that fails is recorded with
// its status and the sweep moves on.
std::vector<SweepCell> run_sweep(const ScenarioConfig& base, const AllocationRequest& request,
                                 const SweepOptions& sweep, Exec exec = Exec::Parallel);
std::vector<SweepSummaryRow> summarize_sweep(std::span<const SweepCell> cells);

// Parses argv and dispatches; returns the process exit code.
int run_cli(int argc, const char* const* argv);

} // namespace evtmap::app

#endif
