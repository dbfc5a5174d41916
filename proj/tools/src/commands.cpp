/*
* Copyright (C) 2026 Epizone
*
* Licensed under the Apache License, Version 2.0 (the "License");
* you may not use this file except in compliance with the License.
* You may obtain a copy of the License at
*
*     http://www.apache.org/licenses/LICENSE-2.0
*
* Unless required by applicable law or agreed to in writing, software
* distributed under the License is distributed on an "AS IS" BASIS,
* WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
* See the License for the specific language governing permissions and
* limitations under the License.
*/
#include "epizone_cli/app.h"
#include "epizone/csv.h"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

namespace epizone::cli
{

ArtifactSet cmd_excess(const ExcessOptions& options)
{
    auto panels = parse_mortality_csv(options.mortality);
    if (!options.aggregation.empty()) {
        panels = aggregate(panels, parse_aggregation_csv(options.aggregation));
    }
    const Calendar calendar = target_year_calendar(panels, options.target_year);
    std::ostringstream out;
    out << "unit_id,date,excess,raw_excess\n";
    for (const auto& panel : panels) {
        const auto excess = compute_excess(panel, options.target_year, options.baseline_years, calendar);
        for (std::size_t t = 0; t < excess.raw.size(); ++t) {
            out << csv_field(panel.unit.id) << ',' << calendar.date_at(static_cast<int>(t)).to_string() << ','
                << format_number(excess.floored.counts()[t], 17) << ',' << format_number(excess.raw[t], 17) << '\n';
        }
    }
    ArtifactSet artifacts;
    artifacts.add("excess.csv", out.str());
    artifacts.commit(options.out);
    return artifacts;
}

ArtifactSet cmd_synth(const std::filesystem::path& scenario, const std::filesystem::path& out)
{
    const Scenario sc = parse_scenario(scenario);
    const SyntheticDataset data = make_scenario(sc, discretize_gamma_si(sc.serial_interval));
    ArtifactSet artifacts;
    artifacts.add("incidence.csv", render_incidence_csv(data.series));
    artifacts.add("geometry.geojson", render_geojson(data.geometries));
    artifacts.add("truth.csv", render_partition_csv(data.truth));
    artifacts.commit(out);
    return artifacts;
}

ArtifactSet cmd_rt(const PipelineConfig& config)
{
    config.validate_parameters();
    std::vector<std::vector<double>> raw;
    auto series = load_incidence(config, &raw);
    std::sort(series.begin(), series.end(), [](const auto& a, const auto& b) {
        return a.unit() < b.unit();
    });
    ArtifactSet artifacts;
    artifacts.add("rt.csv", render_rt_csv(estimate_trends(series, config)));
    artifacts.commit(config.out);
    return artifacts;
}

ArtifactSet cmd_distances(const std::filesystem::path& rt_csv, const PipelineConfig& config)
{
    config.validate_parameters();
    auto in = open_input(rt_csv);
    const auto rt = read_rt_csv(in, rt_csv.string());
    ArtifactSet artifacts;
    artifacts.add("distances.csv", render_distance_csv(distance_matrix(rt, config.dtw, config.threads)));
    artifacts.commit(config.out);
    return artifacts;
}

ArtifactSet cmd_graph(const std::filesystem::path& geometry, const std::filesystem::path& distances,
                      const PipelineConfig& config)
{
    config.validate_parameters();
    const DistanceMatrix d = parse_distance_csv(distances);
    const auto geoms = order_geometries(parse_geometry(geometry), d.units());
    const SpatialGraph graph = build_graph(geoms, config.graph);
    const SpanningTree tree = minimum_spanning_tree(graph, d);
    ArtifactSet artifacts;
    artifacts.add("graph.csv", render_graph_csv(graph, d));
    artifacts.add("mst.csv", render_tree_csv(tree));
    artifacts.commit(config.out);
    return artifacts;
}

ArtifactSet cmd_cluster(const std::filesystem::path& distances, const std::filesystem::path& tree_csv,
                        const PipelineConfig& config)
{
    config.validate_parameters();
    const DistanceMatrix d = parse_distance_csv(distances);
    auto in = open_input(tree_csv);
    const SpanningTree tree(d.units(), read_edge_csv(in, d.units(), tree_csv.string()));
    const Partition partition = zone(tree, d, config);
    ArtifactSet artifacts;
    artifacts.add("clusters.csv", render_partition_csv(partition));
    artifacts.add("report.json", build_report(config, partition, nullptr, tree).dump(2) + "\n");
    artifacts.commit(config.out);
    return artifacts;
}

namespace
{

/// Flags shared by the commands that take a PipelineConfig; set flags override the config file.
struct ConfigFlags {
    std::string config;
    std::string mode;
    std::string incidence;
    bool cumulative = false;
    std::string geometry;
    std::string mortality;
    std::string aggregation;
    int target_year = 0;
    std::vector<int> baseline_years;
    int reference_week = 0;
    std::string start_date;
    std::string end_date;
    int k = 0;
    int min_size = 0;
    double si_mean = 0;
    double si_sd = 0;
    int si_max_lag = 0;
    int smooth_window = 0;
    std::string dtw_step;
    bool dtw_normalize = true;
    int dtw_window = 0;
    std::string graph;
    std::string objective;
    std::string algorithm;
    std::uint64_t seed = 0;
    std::string out;
    int threads = 0;
    std::map<std::string, CLI::Option*> opts;

    void add(CLI::App* app, bool inputs)
    {
        opts["config"] = app->add_option("--config", config, "JSON config file");
        if (inputs) {
            opts["mode"] = app->add_option("--mode", mode, "cases | excess_mortality");
            opts["incidence"] = app->add_option("--incidence", incidence, "incidence CSV (unit_id,date,count)");
            opts["cumulative"] = app->add_flag("--cumulative", cumulative, "incidence holds cumulative totals");
            opts["mortality"] = app->add_option("--mortality", mortality, "mortality CSV (unit_id,date,deaths)");
            opts["aggregation"] = app->add_option("--aggregation", aggregation, "fine-to-coarse map CSV");
            opts["target-year"] = app->add_option("--target-year", target_year, "excess-mortality target year");
            opts["baseline-years"] =
                app->add_option("--baseline-years", baseline_years, "baseline years (default: all others)");
            opts["reference-week"] =
                app->add_option("--reference-week", reference_week, "reference week of cluster_weekly.csv");
            opts["start-date"] = app->add_option("--start-date", start_date, "first day kept (YYYY-MM-DD)");
            opts["end-date"] = app->add_option("--end-date", end_date, "last day kept (YYYY-MM-DD)");
            opts["si-mean"] = app->add_option("--si-mean", si_mean, "serial interval mean (days)");
            opts["si-sd"] = app->add_option("--si-sd", si_sd, "serial interval sd (days)");
            opts["si-max-lag"] = app->add_option("--si-max-lag", si_max_lag, "serial interval support (days)");
            opts["smooth-window"] = app->add_option("--smooth-window", smooth_window, "odd R(t) smoothing window");
        }
        opts["geometry"] = app->add_option("--geometry", geometry, "GeoJSON or centroid CSV");
        opts["k"] = app->add_option("--k", k, "number of zones");
        opts["min-size"] = app->add_option("--min-size", min_size, "minimum zone size");
        opts["dtw-step"] = app->add_option("--dtw-step", dtw_step, "symmetric1 | symmetric2");
        opts["dtw-normalize"] = app->add_option("--dtw-normalize", dtw_normalize, "normalize DTW (true|false)");
        opts["dtw-window"] = app->add_option("--dtw-window", dtw_window, "Sakoe-Chiba band half-width");
        opts["graph"] = app->add_option("--graph", graph, "auto | contiguity | gabriel | knn:K");
        opts["objective"] = app->add_option("--objective", objective, "ssd_analogue | mean_pairwise");
        opts["algorithm"] = app->add_option("--algorithm", algorithm, "skater | grow");
        opts["seed"] = app->add_option("--seed", seed, "random seed (recorded in the report)");
        opts["out"] = app->add_option("--out", out, "output directory");
        opts["threads"] = app->add_option("--threads", threads, "worker threads (default EPIZONE_THREADS)");
    }

    bool set(const std::string& name) const
    {
        auto it = opts.find(name);
        return it != opts.end() && it->second->count() > 0;
    }

    PipelineConfig resolve() const
    {
        nlohmann::json doc = nlohmann::json::object();
        PipelineConfig c = set("config") ? load_config(config) : PipelineConfig{};
        // overrides go through the JSON reader so flags and config share validation
        if (set("mode")) {
            doc["mode"] = mode;
        }
        if (set("graph")) {
            doc["graph"] = graph;
        }
        if (set("objective")) {
            doc["objective"] = objective;
        }
        if (set("algorithm")) {
            doc["algorithm"] = algorithm;
        }
        if (set("dtw-step")) {
            doc["dtw"]["step"] = dtw_step;
        }
        const PipelineConfig parsed = config_from_json(doc);
        if (set("mode")) {
            c.mode = parsed.mode;
        }
        if (set("graph")) {
            c.graph = parsed.graph;
        }
        if (set("objective")) {
            c.objective = parsed.objective;
        }
        if (set("algorithm")) {
            c.algorithm = parsed.algorithm;
        }
        if (set("dtw-step")) {
            c.dtw.step_pattern = parsed.dtw.step_pattern;
        }
        if (set("incidence")) {
            c.incidence = incidence;
        }
        if (set("cumulative")) {
            c.cumulative_input = cumulative;
        }
        if (set("geometry")) {
            c.geometry = geometry;
        }
        if (set("mortality")) {
            c.mortality = mortality;
        }
        if (set("aggregation")) {
            c.aggregation = aggregation;
        }
        if (set("target-year")) {
            c.target_year = target_year;
        }
        if (set("baseline-years")) {
            c.baseline_years = baseline_years;
        }
        if (set("reference-week")) {
            c.reference_week = reference_week;
        }
        if (set("start-date")) {
            c.start_date = Date::parse(start_date);
        }
        if (set("end-date")) {
            c.end_date = Date::parse(end_date);
        }
        if (set("k")) {
            c.k = k;
        }
        if (set("min-size")) {
            c.min_size = min_size;
        }
        if (set("si-mean")) {
            c.si.mean = si_mean;
        }
        if (set("si-sd")) {
            c.si.sd = si_sd;
        }
        if (set("si-max-lag")) {
            c.si.max_lag = si_max_lag;
        }
        if (set("smooth-window")) {
            c.smooth_window = smooth_window;
        }
        if (set("dtw-normalize")) {
            c.dtw.normalize = dtw_normalize;
        }
        if (set("dtw-window")) {
            c.dtw.window = dtw_window;
        }
        if (set("seed")) {
            c.seed = seed;
        }
        if (set("out")) {
            c.out = out;
        }
        c.threads = set("threads") ? threads : default_thread_count();
        if (c.threads < 1) {
            throw Error(ErrorCode::InvalidConfig, "threads must be >= 1");
        }
        return c;
    }
};

void report_error(const std::string& code, const std::string& message)
{
    nlohmann::ordered_json err;
    err["error"] = {{"code", code}, {"message", message}};
    std::cerr << err.dump() << '\n';
}

} // namespace

int run(int argc, char** argv)
{
    CLI::App app{"Spatially contiguous zoning of epidemic dynamics", "epizone"};
    app.set_version_flag("--version", version);
    app.require_subcommand(1);

    ConfigFlags pipeline_flags;
    auto* pipeline = app.add_subcommand("pipeline", "ingest, R(t), DTW, graph and zoning in one run");
    pipeline_flags.add(pipeline, true);

    ExcessOptions excess_opts;
    std::string excess_out = "out";
    auto* excess = app.add_subcommand("excess", "excess-mortality series per (coarse) unit");
    excess->add_option("--mortality", excess_opts.mortality, "mortality CSV (unit_id,date,deaths)")->required();
    excess->add_option("--aggregation", excess_opts.aggregation, "fine-to-coarse map CSV");
    excess->add_option("--target-year", excess_opts.target_year, "target year")->capture_default_str();
    excess->add_option("--baseline-years", excess_opts.baseline_years, "baseline years (default: all others)");
    excess->add_option("--out", excess_out, "output directory")->capture_default_str();

    std::string scenario;
    std::string synth_out = "out";
    auto* synth = app.add_subcommand("synth", "simulate a lattice scenario with known zones");
    synth->add_option("scenario", scenario, "scenario JSON")->required();
    synth->add_option("--out", synth_out, "output directory")->capture_default_str();

    ConfigFlags rt_flags;
    auto* rt = app.add_subcommand("rt", "smoothed R(t) per unit (rt.csv)");
    rt_flags.add(rt, true);

    ConfigFlags dist_flags;
    std::string rt_csv;
    auto* distances = app.add_subcommand("distances", "pairwise DTW distances from rt.csv");
    distances->add_option("--rt", rt_csv, "rt.csv of the rt stage")->required();
    dist_flags.add(distances, false);

    ConfigFlags graph_flags;
    std::string graph_distances;
    auto* graph = app.add_subcommand("graph", "proximity graph and its minimum spanning tree");
    graph->add_option("--distances", graph_distances, "distances.csv")->required();
    graph_flags.add(graph, false);

    ConfigFlags cluster_flags;
    std::string cluster_distances;
    std::string tree_csv;
    auto* cluster = app.add_subcommand("cluster", "zoning of a spanning tree");
    cluster->add_option("--distances", cluster_distances, "distances.csv")->required();
    cluster->add_option("--tree", tree_csv, "mst.csv of the graph stage")->required();
    cluster_flags.add(cluster, false);

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);
        }
        report_error("UsageError", e.what());
        return 2;
    }

    try {
        if (pipeline->parsed()) {
            const auto result = cmd_pipeline(pipeline_flags.resolve());
            std::cout << "wrote " << result.artifacts.files().size() << " artifacts, k=" << result.partition.k
                      << ", objective=" << format_number(result.partition.objective) << '\n';
        }
        else if (excess->parsed()) {
            excess_opts.out = excess_out;
            cmd_excess(excess_opts);
        }
        else if (synth->parsed()) {
            cmd_synth(scenario, synth_out);
        }
        else if (rt->parsed()) {
            cmd_rt(rt_flags.resolve());
        }
        else if (distances->parsed()) {
            cmd_distances(rt_csv, dist_flags.resolve());
        }
        else if (graph->parsed()) {
            auto c = graph_flags.resolve();
            if (c.geometry.empty()) {
                throw Error(ErrorCode::InvalidConfig, "a geometry file is required");
            }
            cmd_graph(c.geometry, graph_distances, c);
        }
        else if (cluster->parsed()) {
            cmd_cluster(cluster_distances, tree_csv, cluster_flags.resolve());
        }
    }
    catch (const Error& e) {
        report_error(to_string(e.code()), e.message());
        return 1;
    }
    catch (const std::exception& e) {
        report_error("InternalError", e.what());
        return 1;
    }
    return 0;
}

} // namespace epizone::cli
