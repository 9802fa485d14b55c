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

#include "evtmap/io.hpp"

#include "evtmap/errors.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

namespace evtmap::io {

namespace {

std::ofstream open_out(const fs::path& path, bool binary = false)
{
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
    if (!out) {
        throw Error("cannot open '" + path.string() + "' for writing");
    }
    return out;
}

std::ifstream open_in(const fs::path& path, bool binary = false)
{
    std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
    if (!in) {
        throw Error("cannot open '" + path.string() + "'");
    }
    return in;
}

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        cells.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
    return cells;
}

std::size_t parse_size(std::string_view s)
{
    std::size_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw IntegrityError("malformed integer '" + std::string(s) + "'");
    }
    return v;
}

class Fnv1a {
public:
    void bytes(const void* data, std::size_t n)
    {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            h_ ^= p[i];
            h_ *= 0x100000001b3ULL;
        }
    }
    void u64(std::uint64_t v)
    {
        unsigned char b[8];
        for (int i = 0; i < 8; ++i) {
            b[i] = static_cast<unsigned char>(v >> (8 * i));
        }
        bytes(b, 8);
    }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    std::string hex() const
    {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h_));
        return buf;
    }

private:
    std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

template <typename T>
T get_field(const Json& doc, const char* name, T fallback)
{
    if (!doc.contains(name)) {
        return fallback;
    }
    try {
        return doc.at(name).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(std::string("config field '") + name + "' has the wrong type");
    }
}

void write_f64_le(std::ostream& out, double v)
{
    std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) {
        b[i] = static_cast<unsigned char>(bits >> (8 * i));
    }
    out.write(reinterpret_cast<const char*>(b), 8);
}

} // namespace

std::string format_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view s)
{
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw IntegrityError("malformed number '" + std::string(s) + "'");
    }
    return v;
}

std::size_t CsvTable::column(const std::string& name) const
{
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
        throw IntegrityError("CSV column '" + name + "' missing");
    }
    return static_cast<std::size_t>(it - header.begin());
}

CsvTable read_csv(const fs::path& path)
{
    std::ifstream in = open_in(path);
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) {
        throw IntegrityError("'" + path.string() + "' is empty");
    }
    table.header = split(line);
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        auto cells = split(line);
        if (cells.size() != table.header.size()) {
            throw IntegrityError("'" + path.string() + "': row width differs from header");
        }
        table.rows.push_back(std::move(cells));
    }
    return table;
}

Json config_to_json(const ScenarioConfig& c)
{
    Json j;
    j["grid"] = Json{{"width_m", c.grid.width}, {"height_m", c.grid.height}, {"nx", c.grid.nx}, {"ny", c.grid.ny}};
    j["m_observed"] = c.m_observed;
    j["n_samples"] = c.n_samples;
    j["n_test"] = c.n_test;
    j["tx_power_mw"] = c.tx_power_mw;
    j["bandwidth_hz"] = c.bandwidth_hz;
    j["noise_figure_db"] = c.noise_figure_db;
    j["carrier_freq_hz"] = c.carrier_freq_hz;
    j["bs_x_m"] = c.bs_x_m;
    j["bs_y_m"] = c.bs_y_m;
    j["bs_height_m"] = c.bs_height_m;
    j["ue_height_m"] = c.ue_height_m;
    j["pathloss_exponent"] = c.pathloss_exponent;
    j["shadowing_std_db"] = c.shadowing_std_db;
    j["shadowing_decorrelation_m"] = c.shadowing_decorrelation_m;
    j["kfactor_mean_db"] = c.kfactor_mean_db;
    j["kfactor_std_db"] = c.kfactor_std_db;
    j["kfactor_decorrelation_m"] = c.kfactor_decorrelation_m;
    j["seed"] = c.seed;
    return j;
}

ScenarioConfig config_from_json(const Json& doc, const ScenarioConfig& base)
{
    if (!doc.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    static const char* known[] = {"grid",
                                  "m_observed",
                                  "n_samples",
                                  "n_test",
                                  "tx_power_mw",
                                  "bandwidth_hz",
                                  "noise_figure_db",
                                  "carrier_freq_hz",
                                  "bs_x_m",
                                  "bs_y_m",
                                  "bs_height_m",
                                  "ue_height_m",
                                  "pathloss_exponent",
                                  "shadowing_std_db",
                                  "shadowing_decorrelation_m",
                                  "kfactor_mean_db",
                                  "kfactor_std_db",
                                  "kfactor_decorrelation_m",
                                  "seed"};
    for (const auto& [key, value] : doc.items()) {
        if (std::none_of(std::begin(known), std::end(known), [&](const char* k) { return key == k; })) {
            throw ConfigError("unknown config field '" + key + "'");
        }
    }
    ScenarioConfig c = base;
    if (doc.contains("grid")) {
        const Json& g = doc.at("grid");
        if (!g.is_object()) {
            throw ConfigError("config field 'grid' must be an object");
        }
        c.grid.width = get_field(g, "width_m", c.grid.width);
        c.grid.height = get_field(g, "height_m", c.grid.height);
        c.grid.nx = get_field(g, "nx", c.grid.nx);
        c.grid.ny = get_field(g, "ny", c.grid.ny);
    }
    c.m_observed = get_field(doc, "m_observed", c.m_observed);
    c.n_samples = get_field(doc, "n_samples", c.n_samples);
    c.n_test = get_field(doc, "n_test", c.n_test);
    c.tx_power_mw = get_field(doc, "tx_power_mw", c.tx_power_mw);
    c.bandwidth_hz = get_field(doc, "bandwidth_hz", c.bandwidth_hz);
    c.noise_figure_db = get_field(doc, "noise_figure_db", c.noise_figure_db);
    c.carrier_freq_hz = get_field(doc, "carrier_freq_hz", c.carrier_freq_hz);
    c.bs_x_m = get_field(doc, "bs_x_m", c.bs_x_m);
    c.bs_y_m = get_field(doc, "bs_y_m", c.bs_y_m);
    c.bs_height_m = get_field(doc, "bs_height_m", c.bs_height_m);
    c.ue_height_m = get_field(doc, "ue_height_m", c.ue_height_m);
    c.pathloss_exponent = get_field(doc, "pathloss_exponent", c.pathloss_exponent);
    c.shadowing_std_db = get_field(doc, "shadowing_std_db", c.shadowing_std_db);
    c.shadowing_decorrelation_m = get_field(doc, "shadowing_decorrelation_m", c.shadowing_decorrelation_m);
    c.kfactor_mean_db = get_field(doc, "kfactor_mean_db", c.kfactor_mean_db);
    c.kfactor_std_db = get_field(doc, "kfactor_std_db", c.kfactor_std_db);
    c.kfactor_decorrelation_m = get_field(doc, "kfactor_decorrelation_m", c.kfactor_decorrelation_m);
    c.seed = get_field(doc, "seed", c.seed);
    c.validate();
    return c;
}

ScenarioConfig read_config(const fs::path& path, const ScenarioConfig& base)
{
    Json doc;
    try {
        doc = read_json(path);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("'" + path.string() + "' is not valid JSON: " + e.what());
    }
    return config_from_json(doc, base);
}

void write_json(const fs::path& path, const Json& doc)
{
    std::ofstream out = open_out(path);
    out << doc.dump(2) << '\n';
}

Json read_json(const fs::path& path)
{
    std::ifstream in = open_in(path);
    return Json::parse(in);
}

std::string dataset_hash(const Dataset& ds)
{
    Fnv1a h;
    const std::string cfg = config_to_json(ds.config).dump();
    h.bytes(cfg.data(), cfg.size());
    h.u64(ds.grid.size());
    for (std::size_t i = 0; i < ds.grid.size(); ++i) {
        h.f64(ds.grid[i].x);
        h.f64(ds.grid[i].y);
        h.f64(ds.truth.mean_snr_db[i]);
        h.f64(ds.truth.k_factor[i]);
    }
    h.u64(ds.observed.size());
    for (const auto& set : ds.observed) {
        h.u64(set.loc_id);
        h.f64(set.location.x);
        h.f64(set.location.y);
        h.u64(set.samples.size());
        for (const double v : set.samples) {
            h.f64(v);
        }
    }
    return h.hex();
}

void write_dataset(const fs::path& dir, const Dataset& ds)
{
    fs::create_directories(dir);
    write_json(dir / "config.json", config_to_json(ds.config));

    {
        std::ofstream out = open_out(dir / "grid.csv");
        out << "loc_id,x_m,y_m,mean_snr_db,k_factor\n";
        for (std::size_t i = 0; i < ds.grid.size(); ++i) {
            out << i << ',' << format_double(ds.grid[i].x) << ',' << format_double(ds.grid[i].y) << ','
                << format_double(ds.truth.mean_snr_db[i]) << ',' << format_double(ds.truth.k_factor[i]) << '\n';
        }
    }

    std::size_t total = 0;
    for (const auto& set : ds.observed) {
        total += set.samples.size();
    }
    // Only one representation exists in a dataset directory.
    fs::remove(dir / "measurements.csv");
    fs::remove(dir / "measurements.bin");
    fs::remove(dir / "measurements_index.csv");
    if (total > kBinarySidecarThreshold) {
        std::ofstream index = open_out(dir / "measurements_index.csv");
        std::ofstream bin = open_out(dir / "measurements.bin", true);
        index << "loc_id,x_m,y_m,offset,count\n";
        std::size_t offset = 0;
        for (const auto& set : ds.observed) {
            index << set.loc_id << ',' << format_double(set.location.x) << ',' << format_double(set.location.y) << ','
                  << offset << ',' << set.samples.size() << '\n';
            for (const double v : set.samples) {
                write_f64_le(bin, v);
            }
            offset += set.samples.size();
        }
        return;
    }
    std::ofstream out = open_out(dir / "measurements.csv");
    out << "loc_id,x_m,y_m,sample_idx,snr_linear\n";
    for (const auto& set : ds.observed) {
        const std::string prefix =
            std::to_string(set.loc_id) + ',' + format_double(set.location.x) + ',' + format_double(set.location.y) + ',';
        for (std::size_t k = 0; k < set.samples.size(); ++k) {
            out << prefix << k << ',' << format_double(set.samples[k]) << '\n';
        }
    }
}

Dataset read_dataset(const fs::path& dir)
{
    Dataset ds;
    ds.config = read_config(dir / "config.json");

    const CsvTable grid = read_csv(dir / "grid.csv");
    const std::size_t c_id = grid.column("loc_id"), c_x = grid.column("x_m"), c_y = grid.column("y_m"),
                      c_m = grid.column("mean_snr_db"), c_k = grid.column("k_factor");
    for (std::size_t r = 0; r < grid.rows.size(); ++r) {
        const auto& row = grid.rows[r];
        if (parse_size(row[c_id]) != r) {
            throw IntegrityError("grid.csv loc_id out of order at row " + std::to_string(r));
        }
        ds.grid.push_back({parse_double(row[c_x]), parse_double(row[c_y])});
        ds.truth.mean_snr_db.push_back(parse_double(row[c_m]));
        ds.truth.k_factor.push_back(parse_double(row[c_k]));
    }
    if (ds.grid.size() != ds.config.grid.size()) {
        throw IntegrityError("grid.csv does not match the configured grid size");
    }

    if (fs::exists(dir / "measurements_index.csv")) {
        const CsvTable index = read_csv(dir / "measurements_index.csv");
        std::ifstream bin = open_in(dir / "measurements.bin", true);
        const std::size_t i_id = index.column("loc_id"), i_x = index.column("x_m"), i_y = index.column("y_m"),
                          i_off = index.column("offset"), i_n = index.column("count");
        for (const auto& row : index.rows) {
            MeasurementSet set;
            set.loc_id = parse_size(row[i_id]);
            set.location = {parse_double(row[i_x]), parse_double(row[i_y])};
            const std::size_t count = parse_size(row[i_n]);
            bin.seekg(static_cast<std::streamoff>(parse_size(row[i_off]) * 8));
            std::vector<unsigned char> raw(count * 8);
            bin.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
            if (!bin) {
                throw IntegrityError("measurements.bin is shorter than its index");
            }
            set.samples.resize(count);
            for (std::size_t k = 0; k < count; ++k) {
                std::uint64_t bits = 0;
                for (int b = 0; b < 8; ++b) {
                    bits |= static_cast<std::uint64_t>(raw[k * 8 + static_cast<std::size_t>(b)]) << (8 * b);
                }
                set.samples[k] = std::bit_cast<double>(bits);
            }
            ds.observed.push_back(std::move(set));
        }
        return ds;
    }

    std::ifstream in = open_in(dir / "measurements.csv");
    std::string line;
    std::getline(in, line);
    if (split(line) != std::vector<std::string>{"loc_id", "x_m", "y_m", "sample_idx", "snr_linear"}) {
        throw IntegrityError("measurements.csv has an unexpected header");
    }
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const auto cells = split(line);
        if (cells.size() != 5) {
            throw IntegrityError("measurements.csv: malformed row");
        }
        const std::size_t id = parse_size(cells[0]);
        if (ds.observed.empty() || ds.observed.back().loc_id != id) {
            MeasurementSet set;
            set.loc_id = id;
            set.location = {parse_double(cells[1]), parse_double(cells[2])};
            set.samples.reserve(ds.config.n_samples);
            ds.observed.push_back(std::move(set));
        }
        auto& set = ds.observed.back();
        if (parse_size(cells[3]) != set.samples.size()) {
            throw IntegrityError("measurements.csv: sample_idx out of sequence");
        }
        set.samples.push_back(parse_double(cells[4]));
    }
    return ds;
}

void write_tailfits(const fs::path& path, std::span<const SiteFit> sites)
{
    std::ofstream out = open_out(path);
    out << "loc_id,mu,xi,sigma,rho,n_exceed\n";
    for (const auto& s : sites) {
        if (s.fit) {
            out << s.loc_id << ',' << format_double(s.fit->mu) << ',' << format_double(s.fit->xi) << ','
                << format_double(s.fit->sigma) << ',' << format_double(s.fit->rho) << ',' << s.fit->n_exceed << '\n';
        } else {
            out << s.loc_id << ",nan,nan,nan,nan,0\n";
        }
    }
}

void write_map(const fs::path& path, std::span<const Location> grid, std::span<const double> mean,
               std::span<const double> var)
{
    std::ofstream out = open_out(path);
    out << "loc_id,x_m,y_m,mean,var\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out << i << ',' << format_double(grid[i].x) << ',' << format_double(grid[i].y) << ','
            << format_double(mean[i]) << ',' << format_double(var[i]) << '\n';
    }
}

std::vector<MapRow> read_map(const fs::path& path)
{
    const CsvTable t = read_csv(path);
    const std::size_t c_id = t.column("loc_id"), c_x = t.column("x_m"), c_y = t.column("y_m"),
                      c_m = t.column("mean"), c_v = t.column("var");
    std::vector<MapRow> out;
    out.reserve(t.rows.size());
    for (const auto& row : t.rows) {
        out.push_back({parse_size(row[c_id]), {parse_double(row[c_x]), parse_double(row[c_y])},
                       parse_double(row[c_m]), parse_double(row[c_v])});
    }
    return out;
}

Json covariance_to_json(const CovarianceSpec& spec)
{
    Json j;
    j["kind"] = to_string(spec.kind);
    j["omega2"] = spec.omega2;
    j["range_m"] = spec.range_m;
    j["nu"] = spec.nu;
    j["noise2"] = spec.noise2;
    return j;
}

CovarianceSpec covariance_from_json(const Json& j)
{
    CovarianceSpec spec;
    spec.kind = covariance_kind_from_string(j.at("kind").get<std::string>());
    spec.omega2 = j.at("omega2").get<double>();
    spec.range_m = j.at("range_m").get<double>();
    spec.nu = j.at("nu").get<double>();
    spec.noise2 = j.at("noise2").get<double>();
    spec.validate();
    return spec;
}

void write_rates(const fs::path& path, const RateMap& rates)
{
    std::ofstream out = open_out(path);
    out << "loc_id,x_m,y_m,phi_or_theta,rate_bpshz\n";
    for (std::size_t i = 0; i < rates.grid.size(); ++i) {
        out << i << ',' << format_double(rates.grid[i].x) << ',' << format_double(rates.grid[i].y) << ','
            << format_double(rates.phi[i]) << ',' << format_double(rates.rate[i]) << '\n';
    }
}

RateMap read_rates(const fs::path& path, Method method)
{
    const CsvTable t = read_csv(path);
    const std::size_t c_id = t.column("loc_id"), c_x = t.column("x_m"), c_y = t.column("y_m"),
                      c_p = t.column("phi_or_theta"), c_r = t.column("rate_bpshz");
    RateMap out;
    out.method = method;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        if (parse_size(row[c_id]) != r) {
            throw IntegrityError("rates file loc_id out of order");
        }
        out.grid.push_back({parse_double(row[c_x]), parse_double(row[c_y])});
        out.phi.push_back(parse_double(row[c_p]));
        out.rate.push_back(parse_double(row[c_r]));
    }
    return out;
}

void write_outage(const fs::path& path, std::span<const Location> grid, std::span<const OutageRow> rows)
{
    std::ofstream out = open_out(path);
    out << "loc_id,x_m,y_m,gamma_tar,empirical_outage,met\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out << i << ',' << format_double(grid[i].x) << ',' << format_double(grid[i].y) << ','
            << format_double(rows[i].gamma_tar) << ',' << format_double(rows[i].empirical_outage) << ','
            << (rows[i].met ? 1 : 0) << '\n';
    }
}

void write_dbh(const fs::path& path, const DivergenceMap& dbh)
{
    std::ofstream out = open_out(path);
    out << "loc_id,d_bh\n";
    for (std::size_t i = 0; i < dbh.d_bh.size(); ++i) {
        out << i << ',' << (dbh.d_bh[i] ? format_double(*dbh.d_bh[i]) : std::string("nan")) << '\n';
    }
}

namespace {

Json ecdf_to_json(std::span<const EcdfPoint> pts)
{
    Json arr = Json::array();
    for (const auto& p : pts) {
        arr.push_back(Json::array({p.value, p.fraction}));
    }
    return arr;
}

std::vector<EcdfPoint> ecdf_from_json(const Json& arr)
{
    std::vector<EcdfPoint> out;
    for (const auto& p : arr) {
        out.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    }
    return out;
}

} // namespace

Json eval_to_json(const EvalReport& r)
{
    Json j;
    j["method"] = to_string(r.method);
    j["zeta"] = r.zeta;
    j["availability_pct"] = r.availability;
    j["mean_rate_bpshz"] = r.mean_rate;
    j["n_locations"] = r.rows.size();
    j["n_test"] = r.n_test;
    j["dataset_hash"] = r.dataset_hash;
    j["dbh_missing"] = r.dbh_missing;
    j["rate_ecdf"] = ecdf_to_json(r.rate_ecdf);
    j["bhattacharyya_ecdf"] = ecdf_to_json(r.dbh_ecdf);
    return j;
}

EvalReport eval_from_json(const Json& j)
{
    EvalReport r;
    r.method = method_from_string(j.at("method").get<std::string>());
    r.zeta = j.at("zeta").get<double>();
    r.availability = j.at("availability_pct").get<double>();
    r.mean_rate = j.at("mean_rate_bpshz").get<double>();
    r.n_test = j.at("n_test").get<std::size_t>();
    r.dataset_hash = j.at("dataset_hash").get<std::string>();
    r.dbh_missing = j.at("dbh_missing").get<std::size_t>();
    r.rate_ecdf = ecdf_from_json(j.at("rate_ecdf"));
    r.dbh_ecdf = ecdf_from_json(j.at("bhattacharyya_ecdf"));
    return r;
}

} // namespace evtmap::io
