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

#include "evtmap/errors.hpp"
#include "evtmap/io.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

using namespace evtmap;
using evtmap::test::ScratchDir;

namespace {

ScenarioConfig tiny_config(std::uint64_t seed = 21)
{
    ScenarioConfig c;
    c.grid = {20.0, 16.0, 5, 4};
    c.m_observed = 6;
    c.n_samples = 300;
    c.bs_x_m = 10.0;
    c.bs_y_m = 8.0;
    c.seed = seed;
    return c;
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void check_same_dataset(const Dataset& a, const Dataset& b)
{
    CHECK(io::config_to_json(a.config) == io::config_to_json(b.config));
    CHECK(a.grid == b.grid);
    CHECK(a.truth.mean_snr_db == b.truth.mean_snr_db);
    CHECK(a.truth.k_factor == b.truth.k_factor);
    REQUIRE(a.observed.size() == b.observed.size());
    for (std::size_t i = 0; i < a.observed.size(); ++i) {
        CHECK(a.observed[i].loc_id == b.observed[i].loc_id);
        CHECK(a.observed[i].location == b.observed[i].location);
        CHECK(a.observed[i].samples == b.observed[i].samples);
    }
}

} // namespace

TEST_SUITE("number formatting")
{
    TEST_CASE("shortest round trip")
    {
        Engine eng(1);
        for (int i = 0; i < 2000; ++i) {
            const double v = std::bit_cast<double>(eng());
            if (!std::isfinite(v)) {
                continue;
            }
            CHECK(std::bit_cast<std::uint64_t>(io::parse_double(io::format_double(v))) ==
                  std::bit_cast<std::uint64_t>(v));
        }
        CHECK(io::format_double(0.5) == "0.5");
        CHECK(io::format_double(1e-300) == "1e-300");
        CHECK(std::isnan(io::parse_double(io::format_double(std::numeric_limits<double>::quiet_NaN()))));
    }

    TEST_CASE("malformed numbers are integrity errors")
    {
        CHECK_THROWS_AS(io::parse_double("1.5x"), IntegrityError);
        CHECK_THROWS_AS(io::parse_double(""), IntegrityError);
        CHECK_THROWS_AS(io::parse_double("abc"), IntegrityError);
    }
}

TEST_SUITE("config files")
{
    TEST_CASE("round trip")
    {
        const ScenarioConfig c = tiny_config();
        const ScenarioConfig back = io::config_from_json(io::config_to_json(c));
        CHECK(io::config_to_json(back) == io::config_to_json(c));
        CHECK(back.grid.nx == 5);
        CHECK(back.bs_y_m == 8.0);
    }

    TEST_CASE("partial documents overlay the base")
    {
        const ScenarioConfig c = io::config_from_json(io::Json::parse(R"({"seed": 9, "grid": {"nx": 10}})"));
        CHECK(c.seed == 9);
        CHECK(c.grid.nx == 10);
        CHECK(c.grid.ny == desk_preset().grid.ny);
        CHECK(c.n_samples == desk_preset().n_samples);
    }

    TEST_CASE("bad documents name the field")
    {
        auto message = [](const char* text) {
            try {
                io::config_from_json(io::Json::parse(text));
            } catch (const ConfigError& e) {
                return std::string(e.what());
            }
            return std::string("no error");
        };
        CHECK(message(R"({"m_obsreved": 5})").find("m_obsreved") != std::string::npos);
        CHECK(message(R"({"n_samples": "many"})").find("n_samples") != std::string::npos);
        CHECK(message(R"({"shadowing_std_db": -1})").find("shadowing_std_db") != std::string::npos);
        CHECK(message(R"({"grid": 3})").find("grid") != std::string::npos);
        CHECK(message("[1, 2]") != "no error");

        ScratchDir dir("cfg");
        {
            std::ofstream out(dir / "broken.json");
            out << "{\"seed\": ";
        }
        CHECK_THROWS_AS(io::read_config(dir / "broken.json"), ConfigError);
    }
}

TEST_SUITE("dataset files")
{
    TEST_CASE("hash is stable and sensitive")
    {
        const Dataset a = generate_dataset(tiny_config());
        const Dataset b = generate_dataset(tiny_config());
        CHECK(io::dataset_hash(a) == io::dataset_hash(b));
        CHECK(io::dataset_hash(a).size() == 16);
        Dataset c = a;
        c.observed[2].samples[7] = std::nextafter(c.observed[2].samples[7], 1e300);
        CHECK(io::dataset_hash(c) != io::dataset_hash(a));
        CHECK(io::dataset_hash(generate_dataset(tiny_config(22))) != io::dataset_hash(a));
    }

    TEST_CASE("csv round trip is exact")
    {
        ScratchDir dir("csv");
        const Dataset ds = generate_dataset(tiny_config());
        io::write_dataset(dir.path(), ds);
        CHECK(std::filesystem::exists(dir / "measurements.csv"));
        CHECK_FALSE(std::filesystem::exists(dir / "measurements.bin"));
        const Dataset back = io::read_dataset(dir.path());
        check_same_dataset(ds, back);
        CHECK(io::dataset_hash(back) == io::dataset_hash(ds));

        const std::string first = slurp(dir / "measurements.csv");
        io::write_dataset(dir.path(), back);
        CHECK(slurp(dir / "measurements.csv") == first);
    }

    TEST_CASE("large sample sets use the binary sidecar")
    {
        ScratchDir dir("bin");
        ScenarioConfig c = tiny_config();
        c.m_observed = 10;
        c.n_samples = io::kBinarySidecarThreshold / c.m_observed + 1;
        const Dataset ds = generate_dataset(c);
        io::write_dataset(dir.path(), ds);
        CHECK(std::filesystem::exists(dir / "measurements_index.csv"));
        CHECK(std::filesystem::file_size(dir / "measurements.bin") == 8 * c.m_observed * c.n_samples);
        CHECK_FALSE(std::filesystem::exists(dir / "measurements.csv"));
        const Dataset back = io::read_dataset(dir.path());
        check_same_dataset(ds, back);

        // Rewriting a small dataset into the same directory drops the stale sidecar.
        io::write_dataset(dir.path(), generate_dataset(tiny_config()));
        CHECK_FALSE(std::filesystem::exists(dir / "measurements.bin"));
        CHECK(io::read_dataset(dir.path()).observed[0].samples.size() == tiny_config().n_samples);
    }

    TEST_CASE("corrupted files are integrity errors")
    {
        ScratchDir dir("corrupt");
        io::write_dataset(dir.path(), generate_dataset(tiny_config()));
        std::string text = slurp(dir / "measurements.csv");
        // Drop the second data row so the sample index skips a value.
        const auto row1 = text.find('\n', text.find('\n') + 1);
        const auto row2 = text.find('\n', row1 + 1);
        REQUIRE(row2 != std::string::npos);
        text.erase(row1, row2 - row1);
        {
            std::ofstream out(dir / "measurements.csv", std::ios::binary);
            out << text;
        }
        CHECK_THROWS_AS(io::read_dataset(dir.path()), IntegrityError);

        const std::string table = "a,b\n1,2\n3\n";
        {
            std::ofstream out(dir / "ragged.csv");
            out << table;
        }
        CHECK_THROWS_AS(io::read_csv(dir / "ragged.csv"), IntegrityError);
        CHECK_THROWS_AS(io::read_csv(dir / "ragged.csv").column("zz"), IntegrityError);
    }
}

TEST_SUITE("result files")
{
    TEST_CASE("map and rate round trips")
    {
        ScratchDir dir("maps");
        const std::vector<Location> grid = build_grid({10.0, 10.0, 3, 3});
        std::vector<double> mean, var;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            mean.push_back(0.1 * static_cast<double>(i) - 0.33);
            var.push_back(1.0 / static_cast<double>(i + 3));
        }
        io::write_map(dir / "map.csv", grid, mean, var);
        const auto rows = io::read_map(dir / "map.csv");
        REQUIRE(rows.size() == grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            CHECK(rows[i].loc_id == i);
            CHECK(rows[i].location == grid[i]);
            CHECK(rows[i].mean == mean[i]);
            CHECK(rows[i].var == var[i]);
        }

        RateMap r;
        r.method = Method::Benchmark;
        r.grid = grid;
        r.phi = mean;
        r.rate = var;
        io::write_rates(dir / "rates.csv", r);
        const RateMap back = io::read_rates(dir / "rates.csv", Method::Benchmark);
        CHECK(back.method == Method::Benchmark);
        CHECK(back.grid == grid);
        CHECK(back.phi == mean);
        CHECK(back.rate == var);
        const io::CsvTable t = io::read_csv(dir / "rates.csv");
        CHECK(t.header == std::vector<std::string>{"loc_id", "x_m", "y_m", "phi_or_theta", "rate_bpshz"});
    }

    TEST_CASE("covariance and evaluation documents")
    {
        const CovarianceSpec spec{CovarianceKind::Matern, 1.25, 17.5, 2.5, 0.03};
        const CovarianceSpec back = io::covariance_from_json(io::covariance_to_json(spec));
        CHECK(back.kind == spec.kind);
        CHECK(back.omega2 == spec.omega2);
        CHECK(back.range_m == spec.range_m);
        CHECK(back.nu == spec.nu);
        CHECK(back.noise2 == spec.noise2);

        EvalReport r;
        r.method = Method::Evt;
        r.zeta = 1e-3;
        r.availability = 97.5;
        r.mean_rate = 1.234;
        r.n_test = 100000;
        r.dataset_hash = "0123456789abcdef";
        r.dbh_missing = 2;
        r.rate_ecdf = ecdf(std::vector<double>{0.5, 0.25, 1.0});
        r.dbh_ecdf = ecdf(std::vector<double>{1e-3});
        const io::Json j = io::eval_to_json(r);
        const EvalReport e = io::eval_from_json(io::Json::parse(j.dump(2)));
        CHECK(e.method == r.method);
        CHECK(e.zeta == r.zeta);
        CHECK(e.availability == r.availability);
        CHECK(e.mean_rate == r.mean_rate);
        CHECK(e.n_test == r.n_test);
        CHECK(e.dataset_hash == r.dataset_hash);
        CHECK(e.dbh_missing == 2);
        REQUIRE(e.rate_ecdf.size() == 3);
        CHECK(e.rate_ecdf[1].value == 0.5);
        CHECK(e.rate_ecdf[1].fraction == r.rate_ecdf[1].fraction);
        CHECK(e.dbh_ecdf.size() == 1);
    }

    TEST_CASE("failed fits are written as missing")
    {
        ScratchDir dir("fits");
        std::vector<SiteFit> sites(2);
        sites[0].loc_id = 4;
        sites[0].fit = TailFit{1.5, 0.1, 0.7, 0.99, 100, -12.0};
        sites[1].loc_id = 9;
        sites[1].error = "constant samples";
        io::write_tailfits(dir / "tailfits.csv", sites);
        const io::CsvTable t = io::read_csv(dir / "tailfits.csv");
        REQUIRE(t.rows.size() == 2);
        CHECK(io::parse_double(t.rows[0][t.column("xi")]) == 0.1);
        CHECK(std::isnan(io::parse_double(t.rows[1][t.column("xi")])));
    }
}
