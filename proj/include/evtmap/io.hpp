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

#ifndef EVTMAP_IO_HPP
#define EVTMAP_IO_HPP

// On-disk formats. CSV: UTF-8, '.' decimal separator, header row, doubles
// in shortest round-trip form. JSON: pretty-printed with a fixed key order.

#include "evtmap/allocator.hpp"
#include "evtmap/evaluation.hpp"
#include "evtmap/synth_env.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace evtmap::io {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

// Above this many samples, measurements go to a little-endian float64
// sidecar (measurements.bin) indexed by measurements_index.csv.
inline constexpr std::size_t kBinarySidecarThreshold = 10'000'000;

std::string format_double(double v);
double parse_double(std::string_view s);

// Minimal CSV table: header plus string cells.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const; // throws IntegrityError when absent
};

CsvTable read_csv(const fs::path& path);

Json config_to_json(const ScenarioConfig& config);
// Fields missing from the document keep their desk-preset value; unknown or
// ill-typed fields raise ConfigError naming the field.
// Fields absent from `doc` keep their value in `base`.
ScenarioConfig config_from_json(const Json& doc, const ScenarioConfig& base = desk_preset());
ScenarioConfig read_config(const fs::path& path, const ScenarioConfig& base = desk_preset());
void write_json(const fs::path& path, const Json& doc);
Json read_json(const fs::path& path);

// 64-bit FNV-1a over the configuration, the truth field and every observed
// sample, rendered as 16 hex digits.
std::string dataset_hash(const Dataset& ds);

void write_dataset(const fs::path& dir, const Dataset& ds);
Dataset read_dataset(const fs::path& dir);

void write_tailfits(const fs::path& path, std::span<const SiteFit> sites);

struct MapRow {
    std::size_t loc_id;
    Location location;
    double mean;
    double var;
};

void write_map(const fs::path& path, std::span<const Location> grid, std::span<const double> mean,
               std::span<const double> var);
std::vector<MapRow> read_map(const fs::path& path);

Json covariance_to_json(const CovarianceSpec& spec);
CovarianceSpec covariance_from_json(const Json& j);

void write_rates(const fs::path& path, const RateMap& rates);
RateMap read_rates(const fs::path& path, Method method);

void write_outage(const fs::path& path, std::span<const Location> grid, std::span<const OutageRow> rows);
void write_dbh(const fs::path& path, const DivergenceMap& dbh);

Json eval_to_json(const EvalReport& report);
EvalReport eval_from_json(const Json& j);

} // namespace evtmap::io

#endif
