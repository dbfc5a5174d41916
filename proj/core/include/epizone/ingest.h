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
#ifndef EPIZONE_INGEST_H
#define EPIZONE_INGEST_H

#include "epizone/core.h"

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace epizone
{

constexpr double earth_radius_m = 6371000.0;

/**
 * Reads `unit_id,date,count` rows. All units are placed on the calendar spanning the
 * earliest to the latest date found in the file; days a unit does not report are
 * zero-filled and flagged as imputed. Output is sorted by unit id.
 */
std::vector<IncidenceSeries> parse_incidence_csv(const std::filesystem::path& path);
std::vector<IncidenceSeries> read_incidence_csv(std::istream& in, const std::string& source = "<stream>");

/// Turns cumulative totals into daily increments. Negative increments (downward
/// revisions) are clamped to 0 and flagged as imputed.
IncidenceSeries difference_cumulative(const IncidenceSeries& cumulative);

/// Restricts a set of series to [start, end] (either bound optional).
std::vector<IncidenceSeries> truncate(const std::vector<IncidenceSeries>& series, std::optional<Date> start,
                                      std::optional<Date> end);

struct MortalityPanel {
    UnitId unit;
    std::map<int, std::vector<DatedValue>> by_year;
};

std::vector<MortalityPanel> parse_mortality_csv(const std::filesystem::path& path);
std::vector<MortalityPanel> read_mortality_csv(std::istream& in, const std::string& source = "<stream>");

struct ExcessResult {
    std::vector<double> raw;
    IncidenceSeries floored;
};

/// Calendar covering all target-year dates present in any of the panels.
Calendar target_year_calendar(const std::vector<MortalityPanel>& panels, int target_year);

/**
 * Daily mortality differential of the target year against the mean of the baseline
 * years, matched by month and day. Feb 29 is dropped from every year; a target-year
 * Feb 29 therefore reappears as an imputed zero. Baseline days without a row count as 0.
 *
 * `baseline_years` empty means every year in the panel other than the target year.
 */
ExcessResult compute_excess(const MortalityPanel& panel, int target_year, const std::vector<int>& baseline_years = {},
                            std::optional<Calendar> calendar = std::nullopt);

class AggregationMap
{
public:
    AggregationMap() = default;
    explicit AggregationMap(std::map<std::string, std::string> entries);

    const std::map<std::string, std::string>& entries() const
    {
        return m_entries;
    }
    /// Coarse id of a fine unit; throws Error(UnmappedUnit).
    const std::string& coarse_of(const std::string& fine) const;

private:
    std::map<std::string, std::string> m_entries;
};

AggregationMap parse_aggregation_csv(const std::filesystem::path& path);
AggregationMap read_aggregation_csv(std::istream& in, const std::string& source = "<stream>");

/// Day-wise sums of fine series into coarse series (sorted by coarse id). A coarse day is
/// flagged imputed only if every member day is.
std::vector<IncidenceSeries> aggregate(const std::vector<IncidenceSeries>& series, const AggregationMap& map);

/// Sums mortality panels by coarse unit and date.
std::vector<MortalityPanel> aggregate(const std::vector<MortalityPanel>& panels, const AggregationMap& map);

enum class Crs
{
    Planar,
    LonLat,
};

/**
 * Reads unit geometries from a GeoJSON FeatureCollection (property `unit_id`, Polygon or
 * MultiPolygon) or from a centroid CSV `unit_id,x,y[,crs]`. Lon/lat inputs are projected
 * with an equirectangular projection about the mean centroid latitude of the dataset.
 * GeoJSON without a `crs` member is taken as lon/lat; a `crs` name other than
 * CRS84/EPSG:4326 marks the coordinates as planar.
 */
std::vector<UnitGeometry> parse_geometry(const std::filesystem::path& path);
std::vector<UnitGeometry> read_geojson(std::istream& in, const std::string& source = "<stream>");
std::vector<UnitGeometry> read_centroid_csv(std::istream& in, const std::string& source = "<stream>");

/// x = R·λ·cos φ₀, y = R·φ (angles in radians).
Point project_equirectangular(double lon_deg, double lat_deg, double reference_lat_deg);

/**
 * Weekly totals (7-day blocks from the calendar start, trailing partial week dropped)
 * and their percentage change against the 1-based `reference_week`.
 */
struct WeeklyChange {
    std::vector<double> totals;
    std::vector<double> percent_change;
};
WeeklyChange weekly_percent_change(const std::vector<double>& daily, int reference_week = 2);

} // namespace epizone

#endif // EPIZONE_INGEST_H
