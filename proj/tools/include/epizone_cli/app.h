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
#ifndef EPIZONE_CLI_APP_H
#define EPIZONE_CLI_APP_H

#include "epizone/dtw.h"
#include "epizone/geograph.h"
#include "epizone/ingest.h"
#include "epizone/repro.h"
#include "epizone/synth.h"
#include "epizone/zoner.h"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace epizone::cli
{

inline constexpr const char* version = "0.1.0";

enum class PipelineMode
{
    Cases,
    ExcessMortality,
};

enum class GraphKind
{
    Auto, ///< contiguity when every unit has a polygon, Gabriel otherwise
    Contiguity,
    Gabriel,
    Knn,
};

struct GraphMode {
    GraphKind kind = GraphKind::Auto;
    int knn = 0;

    static GraphMode parse(const std::string& text);
    std::string to_string() const;
};

enum class Algorithm
{
    Skater,
    Grow,
};

struct PipelineConfig {
    PipelineMode mode = PipelineMode::Cases;
    std::filesystem::path incidence;
    bool cumulative_input = false;
    std::filesystem::path geometry;
    std::filesystem::path mortality;
    std::filesystem::path aggregation;
    int target_year = 2020;
    std::vector<int> baseline_years;
    int reference_week = 2;
    std::optional<Date> start_date;
    std::optional<Date> end_date;
    SerialIntervalParams si;
    int smooth_window = 7;
    DtwConfig dtw;
    GraphMode graph;
    int k = 0;
    int min_size = 2;
    Objective objective = Objective::SsdAnalogue;
    Algorithm algorithm = Algorithm::Skater;
    std::uint64_t seed = 0;
    std::filesystem::path out = "out";
    int threads = 1;

    /// Effective parameters, including defaults.
    nlohmann::ordered_json to_json() const;
    /// Checks the inputs a full pipeline run needs, then the parameters; throws
    /// Error(InvalidConfig).
    void validate() const;
    /// Parameter ranges only, for the stage commands.
    void validate_parameters() const;
};

/// Parses a config document; unknown keys are rejected. Relative paths are resolved
/// against `base_dir`.
PipelineConfig config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);

/// Files produced by a command, written together or not at all.
class ArtifactSet
{
public:
    void add(const std::string& name, std::string content);
    const std::map<std::string, std::string>& files() const
    {
        return m_files;
    }
    /// Writes every file into `dir`; on failure removes what was written and rethrows.
    void commit(const std::filesystem::path& dir) const;

private:
    std::map<std::string, std::string> m_files;
};

struct PipelineResult {
    ValidatedDataset dataset;
    std::vector<RtSeries> rt;
    DistanceMatrix distances;
    SpatialGraph graph;
    SpanningTree tree;
    Partition partition;
    ArtifactSet artifacts;
};

// Pipeline stages shared by `pipeline` and the standalone stage commands.

/// Incidence series of the configured mode (floored excess in excess mode), truncated to the
/// configured dates. `raw_excess` receives the unfloored differentials in excess mode.
std::vector<IncidenceSeries> load_incidence(const PipelineConfig& config,
                                            std::vector<std::vector<double>>* raw_excess = nullptr);
/// Smoothed R(t) per series.
std::vector<RtSeries> estimate_trends(const std::vector<IncidenceSeries>& series, const PipelineConfig& config);
/// Geometries reordered to `units`; throws Error(MissingGeometry).
std::vector<UnitGeometry> order_geometries(const std::vector<UnitGeometry>& geoms, const std::vector<UnitId>& units);
/// Proximity graph of the configured kind, completed with bridge edges.
SpatialGraph build_graph(const std::vector<UnitGeometry>& geoms, const GraphMode& mode);
/// SKATER or seeded growth, as configured.
Partition zone(const SpanningTree& tree, const DistanceMatrix& d, const PipelineConfig& config);

/// Runs ingest → R(t) → DTW → graph → zoning and renders all artifacts (not written).
PipelineResult run_pipeline(const PipelineConfig& config);

/// Runs the pipeline and writes its artifacts into config.out.
PipelineResult cmd_pipeline(const PipelineConfig& config);

struct ExcessOptions {
    std::filesystem::path mortality;
    std::filesystem::path aggregation; ///< optional
    int target_year = 2020;
    std::vector<int> baseline_years;
    std::filesystem::path out = "out";
};

/// Aggregates panels to coarse units and writes excess.csv (unit_id,date,excess,raw_excess).
ArtifactSet cmd_excess(const ExcessOptions& options);

/// Simulates a scenario and writes incidence.csv, geometry.geojson and truth.csv.
ArtifactSet cmd_synth(const std::filesystem::path& scenario, const std::filesystem::path& out);

// Stage subcommands operating on the files of the previous stage.
ArtifactSet cmd_rt(const PipelineConfig& config);
ArtifactSet cmd_distances(const std::filesystem::path& rt_csv, const PipelineConfig& config);
ArtifactSet cmd_graph(const std::filesystem::path& geometry, const std::filesystem::path& distances,
                      const PipelineConfig& config);
ArtifactSet cmd_cluster(const std::filesystem::path& distances, const std::filesystem::path& tree_csv,
                        const PipelineConfig& config);

// Serialization helpers shared by the commands.
std::string render_incidence_csv(const std::vector<IncidenceSeries>& series);
std::string render_geojson(const std::vector<UnitGeometry>& geoms);
std::string render_rt_csv(const std::vector<RtSeries>& rt);
std::vector<RtSeries> read_rt_csv(std::istream& in, const std::string& source = "<stream>");
std::string render_partition_csv(const Partition& p);
std::string render_distance_csv(const DistanceMatrix& d);
std::string render_graph_csv(const SpatialGraph& graph, const DistanceMatrix& d);
std::string render_tree_csv(const SpanningTree& tree);
/// Weekly totals per cluster and their percentage change against `reference_week`
/// (columns cluster,week,start_date,total,percent_change).
std::string render_cluster_weekly_csv(const std::vector<IncidenceSeries>& series, const Partition& partition,
                                      int reference_week);
/// report.json: partition summary, graph summary, effective config and versions.
nlohmann::ordered_json build_report(const PipelineConfig& config, const Partition& partition,
                                    const SpatialGraph* graph, const SpanningTree& tree);

/// Fixed categorical palette, cycled by cluster label.
const std::vector<std::string>& cluster_palette();
std::string render_map_svg(const std::vector<UnitGeometry>& geoms, const Partition& partition,
                           const SpanningTree* tree = nullptr);
std::string render_trends_svg(const std::vector<RtSeries>& rt, const Partition& partition);

/// Command line entry point; returns the process exit code.
int run(int argc, char** argv);

} // namespace epizone::cli

#endif // EPIZONE_CLI_APP_H
