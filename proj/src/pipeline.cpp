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

#include "evtmap/pipeline.hpp"

#include "evtmap/errors.hpp"
#include "evtmap/evt.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <tuple>

namespace evtmap::app {

using io::Json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Timings live under "timings_s" so that everything else in a manifest is
// reproducible byte for byte.
class Manifest {
public:
    Manifest(std::string subcommand, const Options& opts)
        : subcommand_(std::move(subcommand))
    {
        doc_["subcommand"] = subcommand_;
        doc_["config_path"] = opts.config ? opts.config->generic_string() : std::string();
        doc_["preset"] = opts.preset.value_or("");
        doc_["seed"] = nullptr;
        doc_["dataset_hash"] = "";
        doc_["inputs"] = Json::array();
        doc_["outputs"] = Json::array();
        doc_["timings_s"] = Json::object();
    }

    void seed(std::uint64_t s) { doc_["seed"] = s; }
    void hash(const std::string& h) { doc_["dataset_hash"] = h; }
    void input(const fs::path& p) { doc_["inputs"].push_back(p.generic_string()); }
    void output(const fs::path& p) { doc_["outputs"].push_back(p.generic_string()); }
    void set(const std::string& key, Json value) { doc_[key] = std::move(value); }

    // Starts a named stage; the returned object records it on destruction.
    class Stage {
    public:
        Stage(Manifest& m, std::string name)
            : m_(m)
            , name_(std::move(name))
            , t0_(Clock::now())
        {
        }
        ~Stage() { m_.doc_["timings_s"][name_] = seconds_since(t0_); }
        Stage(const Stage&) = delete;
        Stage& operator=(const Stage&) = delete;

    private:
        Manifest& m_;
        std::string name_;
        Clock::time_point t0_;
    };

    Stage stage(std::string name) { return Stage(*this, std::move(name)); }

    void write(const fs::path& dir) const { io::write_json(dir / ("manifest_" + subcommand_ + ".json"), doc_); }

private:
    std::string subcommand_;
    Json doc_;
};

void log(const Options& opts, const std::string& msg)
{
    if (!opts.quiet) {
        std::cerr << "evtmap: " << msg << '\n';
    }
}

fs::path data_dir(const Options& opts)
{
    return opts.data.value_or(opts.out);
}

struct Loaded {
    Dataset ds;
    std::string hash;
};

// Reads the dataset, hashes it and checks the hash against the one recorded
// when the dataset was generated.
Loaded load_dataset(const Options& opts, Manifest& manifest)
{
    const fs::path dir = data_dir(opts);
    if (!fs::exists(dir / "config.json")) {
        throw ConfigError("no dataset in '" + dir.string() + "' (run generate first)");
    }
    Loaded l;
    {
        auto stage = manifest.stage("read_dataset");
        l.ds = io::read_dataset(dir);
        l.hash = io::dataset_hash(l.ds);
    }
    if (opts.seed && *opts.seed != l.ds.config.seed) {
        throw ConfigError("--seed " + std::to_string(*opts.seed) + " differs from the dataset seed " +
                          std::to_string(l.ds.config.seed));
    }
    const fs::path gen = dir / "manifest_generate.json";
    if (fs::exists(gen)) {
        const Json g = io::read_json(gen);
        if (g.value("dataset_hash", std::string()) != l.hash) {
            throw IntegrityError("dataset in '" + dir.string() + "' does not match its generation manifest");
        }
    }
    manifest.input(dir);
    manifest.hash(l.hash);
    manifest.seed(l.ds.config.seed);
    return l;
}

void expect_hash(const Json& doc, const std::string& hash, const std::string& what)
{
    const std::string recorded = doc.value("dataset_hash", std::string());
    if (recorded != hash) {
        throw IntegrityError(what + " was produced from dataset " + recorded + ", current dataset is " + hash);
    }
}

Json request_to_json(const AllocationRequest& r, Method m)
{
    Json j;
    j["method"] = to_string(m);
    j["zeta"] = r.zeta;
    j["rho"] = r.rho;
    if (m == Method::Evt) {
        j["tau"] = r.tau;
    } else {
        j["delta"] = r.delta;
    }
    return j;
}

Json hyper_to_json(const ParameterMapFit& fit)
{
    Json j = io::covariance_to_json(fit.hyper.spec);
    j["log_marginal"] = fit.hyper.log_marginal;
    j["low_spatial_signal"] = fit.hyper.low_spatial_signal;
    j["normalization"] = Json{{"mean", fit.stats.mean}, {"std", fit.stats.std}};
    return j;
}

std::string map_file(const std::string& param)
{
    return "map_" + param + ".csv";
}

// Parameter maps as written by fit-maps, with sigma left unclamped.
RadioMap read_radio_map(const fs::path& dir, std::span<const Location> grid)
{
    RadioMap map;
    map.grid.assign(grid.begin(), grid.end());
    const auto load = [&](const std::string& param, std::vector<double>& mean, std::vector<double>& var) {
        const auto rows = io::read_map(dir / map_file(param));
        if (rows.size() != grid.size()) {
            throw IntegrityError(map_file(param) + " does not cover the dataset grid");
        }
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].loc_id != i || !(rows[i].location == grid[i])) {
                throw IntegrityError(map_file(param) + " row " + std::to_string(i) + " does not match the grid");
            }
            mean.push_back(rows[i].mean);
            var.push_back(rows[i].var);
        }
    };
    load("mu", map.mu_mean, map.mu_var);
    load("xi", map.xi_hat, map.xi_var);
    load("sigma", map.sigma_hat, map.sigma_var);
    return map;
}

std::vector<Method> methods_in_report(const Json& report)
{
    std::vector<Method> out;
    for (const Method m : {Method::Evt, Method::Benchmark}) {
        if (report.contains(to_string(m))) {
            out.push_back(m);
        }
    }
    return out;
}

void write_csv_lines(const fs::path& path, const std::string& header, const std::vector<std::string>& lines)
{
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw Error("cannot open '" + path.string() + "' for writing");
    }
    out << header << '\n';
    for (const auto& l : lines) {
        out << l << '\n';
    }
}

std::string status_for(const std::exception& e)
{
    switch (exit_code_for(e)) {
    case ExitCode::Config: return "config";
    case ExitCode::Infeasible: return "infeasible";
    case ExitCode::Numerical: return "numerical";
    case ExitCode::Integrity: return "integrity";
    default: return "error";
    }
}

} // namespace

ExitCode exit_code_for(const std::exception& e) noexcept
{
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const TargetTooLooseError*>(&e) ||
        dynamic_cast<const DomainError*>(&e)) {
        return ExitCode::Config;
    }
    if (dynamic_cast<const InfeasibleError*>(&e)) {
        return ExitCode::Infeasible;
    }
    if (dynamic_cast<const NumericalError*>(&e) || dynamic_cast<const InsufficientDataError*>(&e) ||
        dynamic_cast<const OutsideTailError*>(&e)) {
        return ExitCode::Numerical;
    }
    if (dynamic_cast<const IntegrityError*>(&e) || dynamic_cast<const nlohmann::json::exception*>(&e)) {
        return ExitCode::Integrity;
    }
    return ExitCode::Failure;
}

ScenarioConfig resolve_config(const Options& opts)
{
    ScenarioConfig cfg = desk_preset();
    if (opts.preset) {
        if (*opts.preset == "paper") {
            cfg = paper_preset();
        } else if (*opts.preset != "desk") {
            throw ConfigError("unknown preset '" + *opts.preset + "' (expected desk or paper)");
        }
    }
    if (opts.config) {
        cfg = io::read_config(*opts.config, cfg);
    }
    if (opts.seed) {
        cfg.seed = *opts.seed;
    }
    cfg.validate();
    return cfg;
}

AllocationRequest resolve_request(const Options& opts)
{
    AllocationRequest r;
    r.zeta = opts.zeta.value_or(r.zeta);
    r.rho = opts.rho.value_or(r.rho);
    r.tau = opts.tau.value_or(r.zeta);
    r.delta = opts.delta.value_or(r.delta);
    if (!(r.zeta > 0.0 && r.zeta < 1.0)) {
        throw ConfigError("--zeta must lie in (0, 1)");
    }
    if (!(r.rho > 0.0 && r.rho < 1.0)) {
        throw ConfigError("--rho must lie in (0, 1)");
    }
    r.validate();
    return r;
}

void cmd_generate(const Options& opts)
{
    Manifest manifest("generate", opts);
    const ScenarioConfig cfg = resolve_config(opts);
    manifest.seed(cfg.seed);
    Dataset ds;
    {
        auto stage = manifest.stage("generate");
        ds = generate_dataset(cfg);
    }
    const std::string hash = io::dataset_hash(ds);
    {
        auto stage = manifest.stage("write");
        io::write_dataset(opts.out, ds);
    }
    manifest.hash(hash);
    if (opts.config) {
        manifest.input(*opts.config);
    }
    for (const char* f : {"config.json", "grid.csv", "measurements.csv", "measurements.bin", "measurements_index.csv"}) {
        if (fs::exists(opts.out / f)) {
            manifest.output(opts.out / f);
        }
    }
    std::size_t total = 0;
    for (const auto& s : ds.observed) {
        total += s.samples.size();
    }
    manifest.set("grid_points", ds.grid.size());
    manifest.set("observed_sites", ds.observed.size());
    manifest.set("total_samples", total);
    manifest.write(opts.out);
    log(opts, "generated " + std::to_string(ds.observed.size()) + " sites x " + std::to_string(cfg.n_samples) +
                  " samples, dataset " + hash);
}

void cmd_fit_maps(const Options& opts)
{
    Manifest manifest("fit-maps", opts);
    const Loaded l = load_dataset(opts, manifest);
    const AllocationRequest req = resolve_request(opts);
    TailMapBuild build;
    {
        auto stage = manifest.stage("build_tail_maps");
        build = build_tail_maps(l.ds.observed, l.ds.grid, req, opts.exec);
    }
    io::write_tailfits(opts.out / "tailfits.csv", build.sites);
    io::write_map(opts.out / map_file("mu"), l.ds.grid, build.mu.posterior.mean, build.mu.posterior.var);
    io::write_map(opts.out / map_file("xi"), l.ds.grid, build.xi.posterior.mean, build.xi.posterior.var);
    io::write_map(opts.out / map_file("sigma"), l.ds.grid, build.sigma.posterior.mean, build.sigma.posterior.var);

    Json hp;
    hp["dataset_hash"] = l.hash;
    hp["rho"] = req.rho;
    hp["retained"] = build.retained;
    hp["excluded"] = build.excluded;
    Json excluded = Json::array();
    for (const auto& s : build.sites) {
        if (!s.fit) {
            excluded.push_back(Json{{"loc_id", s.loc_id}, {"error", s.error}});
        }
    }
    hp["excluded_sites"] = excluded;
    hp["mu"] = hyper_to_json(build.mu);
    hp["xi"] = hyper_to_json(build.xi);
    hp["sigma"] = hyper_to_json(build.sigma);
    io::write_json(opts.out / "hyperparams.json", hp);

    for (const char* f : {"tailfits.csv", "map_mu.csv", "map_xi.csv", "map_sigma.csv", "hyperparams.json"}) {
        manifest.output(opts.out / f);
    }
    manifest.write(opts.out);
    log(opts, "fitted " + std::to_string(build.retained) + " tails (" + std::to_string(build.excluded) +
                  " excluded), maps over " + std::to_string(l.ds.grid.size()) + " grid points");
}

void cmd_allocate(const Options& opts)
{
    Manifest manifest("allocate", opts);
    const Method method = opts.method.value_or(Method::Evt);
    const Loaded l = load_dataset(opts, manifest);
    AllocationRequest req = resolve_request(opts);

    Json entry;
    RateMap rates;
    const auto t0 = Clock::now();
    if (method == Method::Evt) {
        const fs::path hp_path = opts.out / "hyperparams.json";
        if (!fs::exists(hp_path)) {
            throw ConfigError("no parameter maps in '" + opts.out.string() + "' (run fit-maps first)");
        }
        const Json hp = io::read_json(hp_path);
        expect_hash(hp, l.hash, "hyperparams.json");
        const double fitted_rho = hp.at("rho").get<double>();
        if (opts.rho && *opts.rho != fitted_rho) {
            throw ConfigError("maps were fitted with rho = " + io::format_double(fitted_rho) +
                              "; rerun fit-maps to change it");
        }
        req.rho = fitted_rho;
        manifest.input(hp_path);
        RadioMap map = read_radio_map(opts.out, l.ds.grid);
        {
            auto stage = manifest.stage("allocate");
            apply_margin(map, req.tau);
            rates = allocate_rates_evt(map, req);
        }
        entry["request"] = request_to_json(req, method);
        entry["excluded_sites"] = hp.at("excluded_sites");
        entry["sigma_clamped"] = map.sigma_clamped;
    } else {
        BenchmarkPosterior post;
        {
            auto stage = manifest.stage("allocate");
            post = build_benchmark_map(l.ds.observed, l.ds.grid, req.zeta, req.delta, req.hyper);
            rates = allocate_rates_benchmark(post, l.ds.grid);
        }
        entry["request"] = request_to_json(req, method);
        entry["excluded_sites"] = Json::array();
        entry["sigma_clamped"] = 0;
        entry["quantile_map"] = hyper_to_json(post.quantile);
    }
    entry["timings_s"] = Json{{"allocate", seconds_since(t0)}};

    const fs::path rates_path = opts.out / ("rates_" + to_string(method) + ".csv");
    io::write_rates(rates_path, rates);

    const fs::path report_path = opts.out / "run_report.json";
    Json report;
    if (fs::exists(report_path)) {
        report = io::read_json(report_path);
        if (report.value("dataset_hash", std::string()) != l.hash) {
            report = Json();
        }
    }
    report["dataset_hash"] = l.hash;
    report[to_string(method)] = entry;
    io::write_json(report_path, report);

    manifest.set("request", request_to_json(req, method));
    manifest.output(rates_path);
    manifest.output(report_path);
    manifest.write(opts.out);
    log(opts, to_string(method) + " rates allocated at zeta = " + io::format_double(req.zeta));
}

void cmd_evaluate(const Options& opts)
{
    Manifest manifest("evaluate", opts);
    const Loaded l = load_dataset(opts, manifest);
    const fs::path report_path = opts.out / "run_report.json";
    if (!fs::exists(report_path)) {
        throw ConfigError("no rate maps in '" + opts.out.string() + "' (run allocate first)");
    }
    const Json report = io::read_json(report_path);
    expect_hash(report, l.hash, "run_report.json");
    manifest.input(report_path);

    std::vector<Method> methods;
    if (opts.method) {
        if (!report.contains(to_string(*opts.method))) {
            throw ConfigError("no " + to_string(*opts.method) + " rate map to evaluate");
        }
        methods.push_back(*opts.method);
    } else {
        methods = methods_in_report(report);
    }

    // Group methods by the target they are scored against so that each group
    // shares one pass over the test data.
    std::map<double, std::vector<Method>> groups;
    for (const Method m : methods) {
        const double zeta = opts.zeta.value_or(report.at(to_string(m)).at("request").at("zeta").get<double>());
        groups[zeta].push_back(m);
    }

    std::optional<RadioMap> predicted;
    double fit_rho = 0.0;
    const fs::path hp_path = opts.out / "hyperparams.json";
    if (fs::exists(hp_path)) {
        const Json hp = io::read_json(hp_path);
        expect_hash(hp, l.hash, "hyperparams.json");
        fit_rho = hp.at("rho").get<double>();
        predicted = read_radio_map(opts.out, l.ds.grid);
        apply_margin(*predicted, 0.5);
        manifest.input(hp_path);
    }

    const TestSampler sampler(l.ds.config, l.ds.truth);
    bool dbh_written = false;
    Json summary = Json::object();
    for (const auto& [zeta, group] : groups) {
        std::vector<RateMap> maps;
        for (const Method m : group) {
            const fs::path p = opts.out / ("rates_" + to_string(m) + ".csv");
            maps.push_back(io::read_rates(p, m));
            manifest.input(p);
            for (std::size_t i = 0; i < maps.back().grid.size(); ++i) {
                if (!(maps.back().grid[i] == l.ds.grid[i])) {
                    throw IntegrityError(p.filename().string() + " does not match the dataset grid");
                }
            }
        }
        const std::size_t n_test = default_test_size(zeta, l.ds.config.n_test);
        const bool with_dbh = predicted && !dbh_written;
        DivergenceMap dbh;
        std::vector<EvalReport> reports;
        {
            auto stage = manifest.stage("evaluate_zeta_" + io::format_double(zeta));
            reports = evaluate_rate_maps(sampler, maps, zeta, n_test, with_dbh ? &*predicted : nullptr, fit_rho,
                                         &dbh, opts.exec);
        }
        if (with_dbh) {
            io::write_dbh(opts.out / "dbh.csv", dbh);
            manifest.output(opts.out / "dbh.csv");
            dbh_written = true;
        }
        for (auto& rep : reports) {
            rep.dataset_hash = l.hash;
            const std::string tag = to_string(rep.method);
            Json doc = io::eval_to_json(rep);
            doc["request"] = report.at(tag).at("request");
            const fs::path eval_path = opts.out / ("eval_" + tag + ".json");
            io::write_json(eval_path, doc);
            const fs::path outage_path = opts.out / ("outage_" + tag + ".csv");
            io::write_outage(outage_path, l.ds.grid, rep.rows);
            manifest.output(eval_path);
            manifest.output(outage_path);
            summary[tag] = Json{{"availability_pct", rep.availability}, {"mean_rate_bpshz", rep.mean_rate}};
            log(opts, tag + ": availability " + io::format_double(rep.availability) + " %, mean rate " +
                          io::format_double(rep.mean_rate) + " bps/Hz");
        }
    }
    manifest.set("summary", summary);
    manifest.write(opts.out);
}

void cmd_compare(const Options& opts)
{
    Manifest manifest("compare", opts);
    const auto load = [&](Method m) {
        const std::string tag = to_string(m);
        const fs::path eval_path = opts.out / ("eval_" + tag + ".json");
        const fs::path rates_path = opts.out / ("rates_" + tag + ".csv");
        if (!fs::exists(eval_path)) {
            throw ConfigError("missing " + eval_path.string() + " (run evaluate for both methods first)");
        }
        EvalReport rep = io::eval_from_json(io::read_json(eval_path));
        rep.rates = io::read_rates(rates_path, m).rate;
        manifest.input(eval_path);
        manifest.input(rates_path);
        return rep;
    };
    const EvalReport evt = load(Method::Evt);
    const EvalReport bench = load(Method::Benchmark);
    if (evt.zeta != bench.zeta) {
        throw IntegrityError("reports were evaluated against different targets");
    }
    const Comparison c = compare_report(evt, bench);
    manifest.hash(evt.dataset_hash);

    Json doc;
    doc["dataset_hash"] = evt.dataset_hash;
    doc["zeta"] = evt.zeta;
    doc["evt"] = Json{{"availability_pct", evt.availability}, {"mean_rate_bpshz", evt.mean_rate}};
    doc["benchmark"] = Json{{"availability_pct", bench.availability}, {"mean_rate_bpshz", bench.mean_rate}};
    doc["mean_rate_gain_pct"] = c.mean_rate_gain_pct;
    doc["availability_diff_pp"] = c.availability_diff;
    doc["win_fraction"] = c.win_fraction;
    io::write_json(opts.out / "compare.json", doc);
    manifest.output(opts.out / "compare.json");
    manifest.write(opts.out);
    log(opts, "evt vs benchmark: mean rate " + io::format_double(c.mean_rate_gain_pct) + " %, availability " +
                  io::format_double(c.availability_diff) + " pp");
}

std::vector<SweepCell> run_sweep(const ScenarioConfig& base, const AllocationRequest& request,
                                 const SweepOptions& sweep, Exec exec)
{
    if (sweep.zetas.empty() || sweep.n_samples.empty() || sweep.seeds.empty() || sweep.methods.empty()) {
        throw ConfigError("sweep lists must be nonempty");
    }
    const bool want_evt = std::find(sweep.methods.begin(), sweep.methods.end(), Method::Evt) != sweep.methods.end();
    const bool want_bench =
        std::find(sweep.methods.begin(), sweep.methods.end(), Method::Benchmark) != sweep.methods.end();
    const bool tau_follows_zeta = request.tau == request.zeta;

    std::vector<SweepCell> cells;
    for (const std::uint64_t seed : sweep.seeds) {
        ScenarioConfig cfg = base;
        cfg.seed = seed;
        // Rate maps per zeta, scored together below. Entry k matches pending[k].
        std::map<double, std::vector<RateMap>> maps;
        std::map<double, std::vector<SweepCell>> pending;
        GroundTruthField truth;
        for (const std::size_t n : sweep.n_samples) {
            cfg.n_samples = n;
            const auto fail_all = [&](Method m, const std::exception& e) {
                for (const double zeta : sweep.zetas) {
                    cells.push_back({zeta, n, seed, m, status_for(e), e.what(), 0.0, 0.0});
                }
            };
            Dataset ds;
            try {
                cfg.validate();
                ds = generate_dataset(cfg);
            } catch (const std::exception& e) {
                for (const Method m : sweep.methods) {
                    fail_all(m, e);
                }
                continue;
            }
            truth = ds.truth;

            std::optional<TailMapBuild> build;
            if (want_evt) {
                try {
                    build = build_tail_maps(ds.observed, ds.grid, request, exec);
                } catch (const std::exception& e) {
                    fail_all(Method::Evt, e);
                }
            }
            for (const double zeta : sweep.zetas) {
                AllocationRequest req = request;
                req.zeta = zeta;
                if (tau_follows_zeta) {
                    req.tau = zeta;
                }
                if (build) {
                    try {
                        RadioMap map = build->map;
                        apply_margin(map, req.tau);
                        maps[zeta].push_back(allocate_rates_evt(map, req));
                        pending[zeta].push_back({zeta, n, seed, Method::Evt, "ok", "", 0.0, 0.0});
                    } catch (const std::exception& e) {
                        cells.push_back({zeta, n, seed, Method::Evt, status_for(e), e.what(), 0.0, 0.0});
                    }
                }
                if (want_bench) {
                    try {
                        maps[zeta].push_back(
                            allocate_rates_benchmark(ds.observed, ds.grid, zeta, req.delta, req.hyper));
                        pending[zeta].push_back({zeta, n, seed, Method::Benchmark, "ok", "", 0.0, 0.0});
                    } catch (const std::exception& e) {
                        cells.push_back({zeta, n, seed, Method::Benchmark, status_for(e), e.what(), 0.0, 0.0});
                    }
                }
            }
        }
        if (maps.empty()) {
            continue;
        }
        const TestSampler sampler(cfg, truth);
        for (auto& [zeta, group] : maps) {
            auto& todo = pending[zeta];
            try {
                const auto reports = evaluate_rate_maps(sampler, group, zeta, default_test_size(zeta, cfg.n_test),
                                                        nullptr, request.rho, nullptr, exec);
                for (std::size_t k = 0; k < todo.size(); ++k) {
                    todo[k].availability = reports[k].availability;
                    todo[k].mean_rate = reports[k].mean_rate;
                    cells.push_back(todo[k]);
                }
            } catch (const std::exception& e) {
                for (auto& c : todo) {
                    c.status = status_for(e);
                    c.message = e.what();
                    cells.push_back(c);
                }
            }
        }
    }

    const auto pos = [](const auto& list, const auto& v) {
        return std::find(list.begin(), list.end(), v) - list.begin();
    };
    std::stable_sort(cells.begin(), cells.end(), [&](const SweepCell& a, const SweepCell& b) {
        return std::make_tuple(pos(sweep.zetas, a.zeta), pos(sweep.n_samples, a.n_samples), pos(sweep.seeds, a.seed),
                               pos(sweep.methods, a.method)) < std::make_tuple(pos(sweep.zetas, b.zeta),
                                                                               pos(sweep.n_samples, b.n_samples),
                                                                               pos(sweep.seeds, b.seed),
                                                                               pos(sweep.methods, b.method));
    });
    return cells;
}

std::vector<SweepSummaryRow> summarize_sweep(std::span<const SweepCell> cells)
{
    std::vector<SweepSummaryRow> rows;
    for (const auto& c : cells) {
        auto it = std::find_if(rows.begin(), rows.end(), [&](const SweepSummaryRow& r) {
            return r.zeta == c.zeta && r.n_samples == c.n_samples && r.method == c.method;
        });
        if (it == rows.end()) {
            rows.push_back({c.zeta, c.n_samples, c.method, 0, 0.0, 0.0});
            it = rows.end() - 1;
        }
        if (c.status == "ok") {
            it->n_ok += 1;
            it->availability += c.availability;
            it->mean_rate += c.mean_rate;
        }
    }
    for (auto& r : rows) {
        if (r.n_ok > 0) {
            r.availability /= static_cast<double>(r.n_ok);
            r.mean_rate /= static_cast<double>(r.n_ok);
        }
    }
    return rows;
}

void cmd_sweep(const Options& opts, const SweepOptions& sweep)
{
    Manifest manifest("sweep", opts);
    const ScenarioConfig base = resolve_config(opts);
    const AllocationRequest req = resolve_request(opts);
    if (opts.config) {
        manifest.input(*opts.config);
    }
    std::vector<SweepCell> cells;
    {
        auto stage = manifest.stage("sweep");
        cells = run_sweep(base, req, sweep, opts.exec);
    }
    const auto summary = summarize_sweep(cells);

    std::vector<std::string> lines;
    for (const auto& c : cells) {
        const bool ok = c.status == "ok";
        lines.push_back(io::format_double(c.zeta) + ',' + std::to_string(c.n_samples) + ',' + std::to_string(c.seed) +
                        ',' + to_string(c.method) + ',' + c.status + ',' +
                        (ok ? io::format_double(c.availability) : "") + ',' +
                        (ok ? io::format_double(c.mean_rate) : ""));
    }
    write_csv_lines(opts.out / "sweep.csv", "zeta,n_samples,seed,method,status,availability_pct,mean_rate_bpshz",
                    lines);
    lines.clear();
    for (const auto& r : summary) {
        const bool ok = r.n_ok > 0;
        lines.push_back(io::format_double(r.zeta) + ',' + std::to_string(r.n_samples) + ',' + to_string(r.method) +
                        ',' + std::to_string(r.n_ok) + ',' + (ok ? io::format_double(r.availability) : "") + ',' +
                        (ok ? io::format_double(r.mean_rate) : ""));
    }
    write_csv_lines(opts.out / "sweep_summary.csv", "zeta,n_samples,method,n_ok,availability_pct,mean_rate_bpshz",
                    lines);

    Json failures = Json::array();
    for (const auto& c : cells) {
        if (c.status != "ok") {
            failures.push_back(Json{{"zeta", c.zeta},
                                    {"n_samples", c.n_samples},
                                    {"seed", c.seed},
                                    {"method", to_string(c.method)},
                                    {"status", c.status},
                                    {"message", c.message}});
        }
    }
    manifest.set("failed_cells", failures);
    manifest.output(opts.out / "sweep.csv");
    manifest.output(opts.out / "sweep_summary.csv");
    manifest.write(opts.out);
    log(opts, std::to_string(cells.size()) + " sweep cells, " + std::to_string(failures.size()) + " failed");
}

int run_cli(int argc, const char* const* argv)
{
    CLI::App app{"evtmap: extreme-value radio maps for outage-constrained rate selection"};
    app.require_subcommand(1);

    Options opts;
    SweepOptions sweep;
    std::string method_flag;
    bool serial = false;
    std::vector<std::string> sweep_methods;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opts.config, "scenario configuration (JSON)")->check(CLI::ExistingFile);
        sub->add_option("--preset", opts.preset, "scenario preset")->check(CLI::IsMember({"desk", "paper"}));
        sub->add_option("--seed", opts.seed, "master seed");
        sub->add_option("--out", opts.out, "output (and working) directory");
        sub->add_option("--data", opts.data, "dataset directory (default: --out)");
        sub->add_option("--zeta", opts.zeta, "outage target");
        sub->add_option("--rho", opts.rho, "tail threshold quantile");
        sub->add_option("--tau", opts.tau, "margin level on the threshold map (default: zeta)");
        sub->add_option("--delta", opts.delta, "benchmark meta-probability");
        sub->add_option("--method", method_flag, "allocation method")->check(CLI::IsMember({"evt", "benchmark"}));
        sub->add_flag("--serial", serial, "use the single-threaded reference kernels");
        sub->add_flag("--quiet", opts.quiet, "suppress progress messages");
    };

    auto* gen = app.add_subcommand("generate", "synthesize a dataset");
    auto* fit = app.add_subcommand("fit-maps", "fit tails and krige the parameter maps");
    auto* alloc = app.add_subcommand("allocate", "allocate rates from the maps");
    auto* eval = app.add_subcommand("evaluate", "score rate maps against test data");
    auto* sw = app.add_subcommand("sweep", "sweep targets, sample counts and seeds");
    auto* cmp = app.add_subcommand("compare", "compare the evt and benchmark evaluations");
    for (auto* s : {gen, fit, alloc, eval, sw, cmp}) {
        add_common(s);
    }
    sw->add_option("--zetas", sweep.zetas, "outage targets")->delimiter(',');
    sw->add_option("--n-list", sweep.n_samples, "samples per observed site")->delimiter(',');
    sw->add_option("--seeds", sweep.seeds, "seeds")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(ExitCode::Config);
    }

    try {
        if (!method_flag.empty()) {
            opts.method = method_from_string(method_flag);
        }
        opts.exec = serial ? Exec::Serial : Exec::Parallel;
        if (gen->parsed()) {
            cmd_generate(opts);
        } else if (fit->parsed()) {
            cmd_fit_maps(opts);
        } else if (alloc->parsed()) {
            cmd_allocate(opts);
        } else if (eval->parsed()) {
            cmd_evaluate(opts);
        } else if (cmp->parsed()) {
            cmd_compare(opts);
        } else if (sw->parsed()) {
            if (sw->count("--zetas") == 0 && opts.zeta) {
                sweep.zetas = {*opts.zeta};
            }
            if (opts.method) {
                sweep.methods = {*opts.method};
            }
            cmd_sweep(opts, sweep);
        }
    } catch (const std::exception& e) {
        const ExitCode code = exit_code_for(e);
        std::cerr << "evtmap: error: " << e.what() << '\n';
        return static_cast<int>(code);
    }
    return 0;
}

} // namespace evtmap::app
