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

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace epizone::cli
{

namespace
{

std::string json_version()
{
    return std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
           std::to_string(NLOHMANN_JSON_VERSION_PATCH);
}

/// Keeps the days of `raw` that survived truncation of `before` into `after`.
std::vector<double> slice_like(const std::vector<double>& raw, const IncidenceSeries& before,
                               const IncidenceSeries& after)
{
    const int offset = after.calendar().start() - before.calendar().start();
    return {raw.begin() + offset, raw.begin() + offset + after.calendar().length()};
}

} // namespace

void ArtifactSet::add(const std::string& name, std::string content)
{
    m_files[name] = std::move(content);
}

void ArtifactSet::commit(const std::filesystem::path& dir) const
{
    namespace fs = std::filesystem;
    std::vector<fs::path> written;
    const bool existed = fs::exists(dir);
    try {
        fs::create_directories(dir);
        // stage every file under a temporary name first so a failure leaves no finished artifact
        std::vector<std::pair<fs::path, fs::path>> staged;
        for (const auto& [name, content] : m_files) {
            fs::path target = dir / name;
            fs::path tmp = dir / ("." + name + ".partial");
            written.push_back(tmp);
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            out << content;
            out.close();
            if (!out) {
                throw Error(ErrorCode::IoError, "cannot write " + target.string());
            }
            staged.emplace_back(tmp, target);
        }
        for (const auto& [tmp, target] : staged) {
            fs::rename(tmp, target);
            written.push_back(target);
        }
    }
    catch (...) {
        std::error_code ec;
        for (const auto& p : written) {
            fs::remove(p, ec);
        }
        if (!existed) {
            fs::remove(dir, ec);
        }
        try {
            throw;
        }
        catch (const fs::filesystem_error& e) {
            throw Error(ErrorCode::IoError, e.what());
        }
    }
}

std::vector<IncidenceSeries> load_incidence(const PipelineConfig& config, std::vector<std::vector<double>>* raw_excess)
{
    std::optional<AggregationMap> map;
    if (!config.aggregation.empty()) {
        map = parse_aggregation_csv(config.aggregation);
    }
    std::vector<IncidenceSeries> series;
    std::vector<std::vector<double>> raw;
    if (config.mode == PipelineMode::Cases && config.incidence.empty()) {
        throw Error(ErrorCode::InvalidConfig, "cases mode needs an incidence file");
    }
    if (config.mode == PipelineMode::ExcessMortality && config.mortality.empty()) {
        throw Error(ErrorCode::InvalidConfig, "excess_mortality mode needs a mortality file");
    }
    if (config.mode == PipelineMode::Cases) {
        series = parse_incidence_csv(config.incidence);
        if (config.cumulative_input) {
            for (auto& s : series) {
                s = difference_cumulative(s);
            }
        }
        if (map) {
            series = aggregate(series, *map);
        }
    }
    else {
        auto panels = parse_mortality_csv(config.mortality);
        if (map) {
            panels = aggregate(panels, *map);
        }
        const Calendar calendar = target_year_calendar(panels, config.target_year);
        for (const auto& panel : panels) {
            auto excess = compute_excess(panel, config.target_year, config.baseline_years, calendar);
            raw.push_back(std::move(excess.raw));
            series.push_back(std::move(excess.floored));
        }
    }
    if (config.start_date || config.end_date) {
        auto cut = truncate(series, config.start_date, config.end_date);
        for (std::size_t i = 0; i < raw.size(); ++i) {
            raw[i] = slice_like(raw[i], series[i], cut[i]);
        }
        series = std::move(cut);
    }
    if (raw_excess) {
        *raw_excess = std::move(raw);
    }
    return series;
}

std::vector<RtSeries> estimate_trends(const std::vector<IncidenceSeries>& series, const PipelineConfig& config)
{
    const SerialInterval si = discretize_gamma_si(config.si);
    std::vector<RtSeries> out;
    out.reserve(series.size());
    for (const auto& s : series) {
        out.push_back(smooth_rt(estimate_rt(s, si), config.smooth_window));
    }
    return out;
}

std::vector<UnitGeometry> order_geometries(const std::vector<UnitGeometry>& geoms, const std::vector<UnitId>& units)
{
    std::map<std::string, const UnitGeometry*> by_id;
    for (const auto& g : geoms) {
        if (!by_id.emplace(g.unit.id, &g).second) {
            throw Error(ErrorCode::DuplicateUnit, g.unit.id);
        }
    }
    std::vector<UnitGeometry> out;
    out.reserve(units.size());
    for (const auto& u : units) {
        auto it = by_id.find(u.id);
        if (it == by_id.end()) {
            throw Error(ErrorCode::MissingGeometry, u.id);
        }
        out.push_back(*it->second);
    }
    return out;
}

SpatialGraph build_graph(const std::vector<UnitGeometry>& geoms, const GraphMode& mode)
{
    GraphKind kind = mode.kind;
    if (kind == GraphKind::Auto) {
        const bool polygons = std::all_of(geoms.begin(), geoms.end(), [](const UnitGeometry& g) {
            return g.polygon.has_value();
        });
        kind = polygons ? GraphKind::Contiguity : GraphKind::Gabriel;
    }
    if (geoms.size() == 1) {
        return SpatialGraph({geoms.front().unit});
    }
    switch (kind) {
    case GraphKind::Contiguity:
        return ensure_connected(build_contiguity(geoms), geoms);
    case GraphKind::Knn:
        return ensure_connected(build_knn(geoms, mode.knn), geoms);
    default:
        return ensure_connected(build_gabriel(geoms), geoms);
    }
}

Partition zone(const SpanningTree& tree, const DistanceMatrix& d, const PipelineConfig& config)
{
    if (config.k < 1) {
        throw Error(ErrorCode::InvalidConfig, "k must be set (>= 1)");
    }
    if (config.algorithm == Algorithm::Grow) {
        return grow_partition(tree, d, farthest_point_seeds(d, config.k), config.objective);
    }
    return skater_partition(tree, d, config.k, config.min_size, config.objective);
}

std::string render_incidence_csv(const std::vector<IncidenceSeries>& series)
{
    std::ostringstream out;
    out << "unit_id,date,count\n";
    for (const auto& s : series) {
        for (std::size_t t = 0; t < s.size(); ++t) {
            out << csv_field(s.unit().id) << ',' << s.calendar().date_at(static_cast<int>(t)).to_string() << ','
                << format_number(s.counts()[t], 17) << '\n';
        }
    }
    return out.str();
}

std::string render_geojson(const std::vector<UnitGeometry>& geoms)
{
    nlohmann::ordered_json features = nlohmann::ordered_json::array();
    for (const auto& g : geoms) {
        nlohmann::ordered_json feature;
        feature["type"] = "Feature";
        feature["properties"] = {{"unit_id", g.unit.id}, {"label", g.unit.label}};
        if (g.polygon) {
            nlohmann::ordered_json coords = nlohmann::ordered_json::array();
            for (const auto& part : *g.polygon) {
                nlohmann::ordered_json rings = nlohmann::ordered_json::array();
                auto ring_json = [](const Ring& ring) {
                    nlohmann::ordered_json r = nlohmann::ordered_json::array();
                    for (const auto& p : ring) {
                        r.push_back({p.x, p.y});
                    }
                    return r;
                };
                rings.push_back(ring_json(part.outer));
                for (const auto& hole : part.holes) {
                    rings.push_back(ring_json(hole));
                }
                coords.push_back(std::move(rings));
            }
            feature["geometry"] = {{"type", "MultiPolygon"}, {"coordinates", std::move(coords)}};
        }
        else {
            feature["geometry"] = {{"type", "Point"}, {"coordinates", {g.centroid.x, g.centroid.y}}};
        }
        features.push_back(std::move(feature));
    }
    nlohmann::ordered_json doc;
    doc["type"] = "FeatureCollection";
    doc["crs"] = {{"type", "name"}, {"properties", {{"name", "urn:epizone:planar"}}}};
    doc["features"] = std::move(features);
    return doc.dump(1) + "\n";
}

std::string render_rt_csv(const std::vector<RtSeries>& rt)
{
    std::ostringstream out;
    out << "unit,date,rt,valid\n";
    for (const auto& r : rt) {
        for (std::size_t t = 0; t < r.size(); ++t) {
            out << csv_field(r.unit().id) << ',' << r.calendar().date_at(static_cast<int>(t)).to_string() << ',';
            if (r.valid()[t]) {
                out << format_number(r.values()[t], 17);
            }
            out << ',' << (r.valid()[t] ? 1 : 0) << '\n';
        }
    }
    return out.str();
}

std::vector<RtSeries> read_rt_csv(std::istream& in, const std::string& source)
{
    CsvReader reader(in, source);
    reader.expect_header({"unit", "date", "rt", "valid"});
    struct Rows {
        Date start;
        Date last;
        std::vector<double> values;
        std::vector<bool> valid;
    };
    std::vector<std::string> order;
    std::map<std::string, Rows> rows;
    std::vector<std::string> f;
    while (reader.next(f)) {
        if (f.size() != 4) {
            reader.fail("expected unit,date,rt,valid");
        }
        Date date;
        try {
            date = Date::parse(f[1]);
        }
        catch (const Error& e) {
            reader.fail(e.message());
        }
        const bool valid = f[3] == "1";
        if (!valid && f[3] != "0") {
            reader.fail("valid must be 0 or 1");
        }
        const double value = valid ? reader.parse_double(f[2], "rt") : std::nan("");
        auto [it, fresh] = rows.try_emplace(f[0]);
        if (fresh) {
            order.push_back(f[0]);
            it->second.start = date;
        }
        else if (date - it->second.last != 1) {
            reader.fail("dates of unit '" + f[0] + "' are not consecutive");
        }
        it->second.last = date;
        it->second.values.push_back(value);
        it->second.valid.push_back(valid);
    }
    if (order.empty()) {
        throw Error(ErrorCode::EmptySeries, source + ": no R(t) rows");
    }
    std::sort(order.begin(), order.end());
    std::vector<RtSeries> out;
    for (const auto& id : order) {
        auto& r = rows.at(id);
        const int length = static_cast<int>(r.values.size());
        out.emplace_back(UnitId(id), Calendar(r.start, length), std::move(r.values), std::move(r.valid));
    }
    return out;
}

std::string render_partition_csv(const Partition& p)
{
    std::ostringstream out;
    write_cluster_csv(out, p);
    return out.str();
}

std::string render_distance_csv(const DistanceMatrix& d)
{
    std::ostringstream out;
    write_distance_csv(out, d);
    return out.str();
}

std::string render_graph_csv(const SpatialGraph& graph, const DistanceMatrix& d)
{
    std::ostringstream out;
    write_edge_csv(out, graph, d);
    return out.str();
}

std::string render_tree_csv(const SpanningTree& tree)
{
    std::ostringstream out;
    write_edge_csv(out, tree);
    return out.str();
}

std::string render_cluster_weekly_csv(const std::vector<IncidenceSeries>& series, const Partition& partition,
                                      int reference_week)
{
    std::ostringstream out;
    out << "cluster,week,start_date,total,percent_change\n";
    if (series.empty() || series.front().size() / 7 < static_cast<std::size_t>(reference_week)) {
        return out.str();
    }
    std::map<std::string, const IncidenceSeries*> by_id;
    for (const auto& s : series) {
        by_id.emplace(s.unit().id, &s);
    }
    const Calendar calendar = series.front().calendar();
    const auto members = partition.members();
    for (std::size_t c = 0; c < members.size(); ++c) {
        std::vector<double> daily(static_cast<std::size_t>(calendar.length()), 0.0);
        for (std::size_t i : members[c]) {
            const auto& s = *by_id.at(partition.units[i].id);
            for (std::size_t t = 0; t < daily.size(); ++t) {
                daily[t] += s.counts()[t];
            }
        }
        const auto weekly = weekly_percent_change(daily, reference_week);
        for (std::size_t w = 0; w < weekly.totals.size(); ++w) {
            out << c + 1 << ',' << w + 1 << ',' << calendar.date_at(static_cast<int>(7 * w)).to_string() << ','
                << format_number(weekly.totals[w]) << ',';
            if (std::isfinite(weekly.percent_change[w])) {
                out << format_number(weekly.percent_change[w]);
            }
            out << '\n';
        }
    }
    return out.str();
}

nlohmann::ordered_json build_report(const PipelineConfig& config, const Partition& partition,
                                    const SpatialGraph* graph, const SpanningTree& tree)
{
    nlohmann::ordered_json report;
    report["units"] = partition.units.size();
    report["k"] = partition.k;
    report["objective_kind"] = epizone::to_string(partition.objective_kind);
    report["objective"] = partition.objective;
    nlohmann::ordered_json clusters = nlohmann::ordered_json::array();
    const auto members = partition.members();
    for (std::size_t c = 0; c < members.size(); ++c) {
        nlohmann::ordered_json ids = nlohmann::ordered_json::array();
        for (std::size_t i : members[c]) {
            ids.push_back(partition.units[i].id);
        }
        clusters.push_back({{"cluster", c + 1},
                            {"size", members[c].size()},
                            {"cost", partition.cluster_costs[c]},
                            {"units", std::move(ids)}});
    }
    report["clusters"] = std::move(clusters);
    nlohmann::ordered_json removed = nlohmann::ordered_json::array();
    for (const auto& [a, b] : partition.removed_edges) {
        removed.push_back({partition.units[a].id, partition.units[b].id});
    }
    report["removed_edges"] = std::move(removed);
    if (graph) {
        std::map<std::string, std::size_t> by_kind;
        for (const auto& e : graph->edges()) {
            ++by_kind[epizone::to_string(e.provenance)];
        }
        report["graph"] = {{"edges", graph->edges().size()}, {"by_provenance", by_kind}};
    }
    report["tree"] = {{"edges", tree.edges().size()}, {"total_weight", tree.total_weight()}};
    report["config"] = config.to_json();
    report["versions"] = {{"epizone", version}, {"nlohmann_json", json_version()}};
    return report;
}

PipelineResult run_pipeline(const PipelineConfig& config)
{
    config.validate();
    std::vector<std::vector<double>> raw_excess;
    auto series = load_incidence(config, &raw_excess);
    std::map<std::string, std::vector<double>> raw_by_id;
    for (std::size_t i = 0; i < raw_excess.size(); ++i) {
        raw_by_id.emplace(series[i].unit().id, std::move(raw_excess[i]));
    }
    ValidatedDataset dataset = validate_dataset(std::move(series), parse_geometry(config.geometry));

    std::vector<RtSeries> rt = estimate_trends(dataset.series, config);
    DistanceMatrix distances = distance_matrix(rt, config.dtw, config.threads);
    SpatialGraph graph = build_graph(dataset.geometries, config.graph);
    SpanningTree tree = minimum_spanning_tree(graph, distances);
    Partition partition = zone(tree, distances, config);

    ArtifactSet artifacts;
    artifacts.add("rt.csv", render_rt_csv(rt));
    artifacts.add("distances.csv", render_distance_csv(distances));
    artifacts.add("graph.csv", render_graph_csv(graph, distances));
    artifacts.add("mst.csv", render_tree_csv(tree));
    artifacts.add("clusters.csv", render_partition_csv(partition));
    artifacts.add("report.json", build_report(config, partition, &graph, tree).dump(2) + "\n");
    artifacts.add("map.svg", render_map_svg(dataset.geometries, partition, &tree));
    artifacts.add("trends.svg", render_trends_svg(rt, partition));
    artifacts.add("cluster_weekly.csv", render_cluster_weekly_csv(dataset.series, partition, config.reference_week));
    if (config.mode == PipelineMode::ExcessMortality) {
        std::ostringstream out;
        out << "unit_id,date,excess,raw_excess\n";
        for (const auto& s : dataset.series) {
            const auto& raw = raw_by_id.at(s.unit().id);
            for (std::size_t t = 0; t < s.size(); ++t) {
                out << csv_field(s.unit().id) << ',' << s.calendar().date_at(static_cast<int>(t)).to_string() << ','
                    << format_number(s.counts()[t], 17) << ',' << format_number(raw[t], 17) << '\n';
            }
        }
        artifacts.add("excess.csv", out.str());
    }
    return PipelineResult{std::move(dataset), std::move(rt),        std::move(distances), std::move(graph),
                          std::move(tree),    std::move(partition), std::move(artifacts)};
}

PipelineResult cmd_pipeline(const PipelineConfig& config)
{
    PipelineResult result = run_pipeline(config);
    result.artifacts.commit(config.out);
    return result;
}

} // namespace epizone::cli
