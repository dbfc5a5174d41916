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
#include "epizone/ingest.h"
#include "epizone/csv.h"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace epizone
{

namespace
{

bool is_feb29(Date d)
{
    return d.month() == 2 && d.day() == 29;
}

// Groups (unit, date, value) rows into per-unit series on the spanning calendar.
std::vector<IncidenceSeries> build_series(std::map<std::string, std::vector<DatedValue>>& rows)
{
    if (rows.empty()) {
        return {};
    }
    Date first = rows.begin()->second.front().date;
    Date last = first;
    for (const auto& [unit, obs] : rows) {
        for (const auto& o : obs) {
            first = std::min(first, o.date);
            last = std::max(last, o.date);
        }
    }
    Calendar calendar(first, (last - first) + 1);
    std::vector<IncidenceSeries> out;
    out.reserve(rows.size());
    for (const auto& [unit, obs] : rows) {
        out.push_back(align_to_calendar(UnitId(unit), obs, calendar));
    }
    return out;
}

} // namespace

std::vector<IncidenceSeries> parse_incidence_csv(const std::filesystem::path& path)
{
    auto in = open_input(path);
    return read_incidence_csv(in, path.string());
}

std::vector<IncidenceSeries> read_incidence_csv(std::istream& in, const std::string& source)
{
    CsvReader reader(in, source);
    reader.expect_header({"unit_id", "date", "count"});
    std::map<std::string, std::vector<DatedValue>> rows;
    std::set<std::pair<std::string, Date>> seen;
    std::vector<std::string> f;
    while (reader.next(f)) {
        if (f.size() != 3) {
            reader.fail("expected 3 fields, got " + std::to_string(f.size()));
        }
        if (f[0].empty()) {
            reader.fail("empty unit_id");
        }
        Date date;
        try {
            date = Date::parse(f[1]);
        }
        catch (const Error& e) {
            reader.fail(e.message());
        }
        double count = reader.parse_double(f[2], "count");
        if (!std::isfinite(count)) {
            reader.fail("non-finite count");
        }
        if (count < 0) {
            throw Error(ErrorCode::NegativeCount, source + ":" + std::to_string(reader.line()) + ": unit '" + f[0] +
                                                      "' " + f[1] + " count " + f[2]);
        }
        if (!seen.emplace(f[0], date).second) {
            throw Error(ErrorCode::DuplicateRecord, "unit '" + f[0] + "' date " + f[1] + " (line " +
                                                        std::to_string(reader.line()) + ")");
        }
        rows[f[0]].push_back(DatedValue{date, count});
    }
    return build_series(rows);
}

IncidenceSeries difference_cumulative(const IncidenceSeries& cumulative)
{
    const auto& c = cumulative.counts();
    std::vector<double> daily(c.size());
    std::vector<bool> imputed = cumulative.imputed();
    for (std::size_t t = 0; t < c.size(); ++t) {
        double inc = t == 0 ? c[0] : c[t] - c[t - 1];
        if (inc < 0) {
            inc = 0.0;
            imputed[t] = true;
        }
        daily[t] = inc;
    }
    return IncidenceSeries(cumulative.unit(), cumulative.calendar(), std::move(daily), std::move(imputed));
}

std::vector<IncidenceSeries> truncate(const std::vector<IncidenceSeries>& series, std::optional<Date> start,
                                      std::optional<Date> end)
{
    std::vector<IncidenceSeries> out;
    out.reserve(series.size());
    for (const auto& s : series) {
        Date from = start ? std::max(*start, s.calendar().start()) : s.calendar().start();
        Date to = end ? std::min(*end, s.calendar().last()) : s.calendar().last();
        if (to < from) {
            throw Error(ErrorCode::EmptyOverlap, "truncation window excludes all days of '" + s.unit().id + "'");
        }
        out.push_back(align_to_calendar(s, Calendar(from, (to - from) + 1)));
    }
    return out;
}

std::vector<MortalityPanel> parse_mortality_csv(const std::filesystem::path& path)
{
    auto in = open_input(path);
    return read_mortality_csv(in, path.string());
}

std::vector<MortalityPanel> read_mortality_csv(std::istream& in, const std::string& source)
{
    CsvReader reader(in, source);
    reader.expect_header({"unit_id", "date", "deaths"});
    std::map<std::string, MortalityPanel> panels;
    std::set<std::pair<std::string, Date>> seen;
    std::vector<std::string> f;
    while (reader.next(f)) {
        if (f.size() != 3) {
            reader.fail("expected 3 fields, got " + std::to_string(f.size()));
        }
        if (f[0].empty()) {
            reader.fail("empty unit_id");
        }
        Date date;
        try {
            date = Date::parse(f[1]);
        }
        catch (const Error& e) {
            reader.fail(e.message());
        }
        double deaths = reader.parse_double(f[2], "deaths");
        if (!std::isfinite(deaths)) {
            reader.fail("non-finite deaths");
        }
        if (deaths < 0) {
            throw Error(ErrorCode::NegativeCount, source + ":" + std::to_string(reader.line()) + ": unit '" + f[0] +
                                                      "' " + f[1]);
        }
        if (!seen.emplace(f[0], date).second) {
            throw Error(ErrorCode::DuplicateRecord, "unit '" + f[0] + "' date " + f[1]);
        }
        auto it = panels.try_emplace(f[0], MortalityPanel{UnitId(f[0]), {}}).first;
        it->second.by_year[date.year()].push_back(DatedValue{date, deaths});
    }
    std::vector<MortalityPanel> out;
    out.reserve(panels.size());
    for (auto& [id, panel] : panels) {
        out.push_back(std::move(panel));
    }
    return out;
}

Calendar target_year_calendar(const std::vector<MortalityPanel>& panels, int target_year)
{
    std::optional<Date> first;
    std::optional<Date> last;
    for (const auto& p : panels) {
        auto it = p.by_year.find(target_year);
        if (it == p.by_year.end()) {
            continue;
        }
        for (const auto& obs : it->second) {
            if (is_feb29(obs.date)) {
                continue;
            }
            first = first ? std::min(*first, obs.date) : obs.date;
            last = last ? std::max(*last, obs.date) : obs.date;
        }
    }
    if (!first) {
        throw Error(ErrorCode::MissingTargetYear, "no panel has data for " + std::to_string(target_year));
    }
    return Calendar(*first, (*last - *first) + 1);
}

ExcessResult compute_excess(const MortalityPanel& panel, int target_year, const std::vector<int>& baseline_years,
                            std::optional<Calendar> calendar)
{
    auto target_it = panel.by_year.find(target_year);
    if (target_it == panel.by_year.end() || target_it->second.empty()) {
        throw Error(ErrorCode::MissingTargetYear, "unit '" + panel.unit.id + "' has no data for " +
                                                      std::to_string(target_year));
    }
    std::vector<int> years = baseline_years;
    if (years.empty()) {
        for (const auto& [year, obs] : panel.by_year) {
            if (year != target_year) {
                years.push_back(year);
            }
        }
    }
    if (years.empty()) {
        throw Error(ErrorCode::EmptyBaseline, "unit '" + panel.unit.id + "'");
    }

    // deaths keyed by (month, day), Feb 29 dropped
    auto by_month_day = [](const std::vector<DatedValue>& obs) {
        std::map<std::pair<unsigned, unsigned>, double> m;
        for (const auto& o : obs) {
            if (!is_feb29(o.date)) {
                m[{o.date.month(), o.date.day()}] += o.value;
            }
        }
        return m;
    };
    std::vector<std::map<std::pair<unsigned, unsigned>, double>> baseline;
    for (int y : years) {
        auto it = panel.by_year.find(y);
        baseline.push_back(it == panel.by_year.end() ? std::map<std::pair<unsigned, unsigned>, double>{}
                                                     : by_month_day(it->second));
    }

    std::vector<DatedValue> target;
    for (const auto& o : target_it->second) {
        if (!is_feb29(o.date)) {
            target.push_back(o);
        }
    }
    if (target.empty()) {
        throw Error(ErrorCode::MissingTargetYear, "unit '" + panel.unit.id + "' only reports Feb 29");
    }
    if (!calendar) {
        calendar = target_year_calendar({panel}, target_year);
    }
    IncidenceSeries deaths = align_to_calendar(panel.unit, target, *calendar);

    const int n = calendar->length();
    std::vector<double> raw(static_cast<std::size_t>(n));
    std::vector<double> floored(raw.size());
    std::vector<bool> imputed = deaths.imputed();
    for (int t = 0; t < n; ++t) {
        Date d = calendar->date_at(t);
        if (is_feb29(d)) {
            raw[t] = 0.0;
            floored[t] = 0.0;
            imputed[t] = true;
            continue;
        }
        double sum = 0.0;
        for (const auto& b : baseline) {
            auto it = b.find({d.month(), d.day()});
            if (it != b.end()) {
                sum += it->second;
            }
        }
        raw[t] = deaths.counts()[t] - sum / static_cast<double>(baseline.size());
        floored[t] = std::max(raw[t], 0.0);
    }
    return ExcessResult{std::move(raw), IncidenceSeries(panel.unit, *calendar, std::move(floored), std::move(imputed))};
}

AggregationMap::AggregationMap(std::map<std::string, std::string> entries)
    : m_entries(std::move(entries))
{
    for (const auto& [fine, coarse] : m_entries) {
        if (fine.empty() || coarse.empty()) {
            throw Error(ErrorCode::InvalidArgument, "aggregation ids must be nonempty");
        }
    }
}

const std::string& AggregationMap::coarse_of(const std::string& fine) const
{
    auto it = m_entries.find(fine);
    if (it == m_entries.end()) {
        throw Error(ErrorCode::UnmappedUnit, fine);
    }
    return it->second;
}

AggregationMap parse_aggregation_csv(const std::filesystem::path& path)
{
    auto in = open_input(path);
    return read_aggregation_csv(in, path.string());
}

AggregationMap read_aggregation_csv(std::istream& in, const std::string& source)
{
    CsvReader reader(in, source);
    reader.expect_header({"fine_id", "coarse_id"});
    std::map<std::string, std::string> entries;
    std::vector<std::string> f;
    while (reader.next(f)) {
        if (f.size() != 2 || f[0].empty() || f[1].empty()) {
            reader.fail("expected fine_id,coarse_id");
        }
        auto [it, inserted] = entries.emplace(f[0], f[1]);
        if (!inserted && it->second != f[1]) {
            throw Error(ErrorCode::DuplicateRecord, "fine unit '" + f[0] + "' mapped twice");
        }
    }
    return AggregationMap(std::move(entries));
}

std::vector<IncidenceSeries> aggregate(const std::vector<IncidenceSeries>& series, const AggregationMap& map)
{
    struct Acc {
        std::vector<double> counts;
        std::vector<bool> imputed;
    };
    std::map<std::string, Acc> groups;
    if (series.empty()) {
        return {};
    }
    const Calendar calendar = series.front().calendar();
    for (const auto& s : series) {
        const auto& coarse = map.coarse_of(s.unit().id);
        if (!(s.calendar() == calendar)) {
            throw Error(ErrorCode::CalendarMismatch, s.unit().id);
        }
        auto [it, inserted] =
            groups.try_emplace(coarse, Acc{std::vector<double>(s.size(), 0.0), std::vector<bool>(s.size(), true)});
        for (std::size_t t = 0; t < s.size(); ++t) {
            it->second.counts[t] += s.counts()[t];
            it->second.imputed[t] = it->second.imputed[t] && s.imputed()[t];
        }
    }
    std::vector<IncidenceSeries> out;
    out.reserve(groups.size());
    for (auto& [id, acc] : groups) {
        out.emplace_back(UnitId(id), calendar, std::move(acc.counts), std::move(acc.imputed));
    }
    return out;
}

std::vector<MortalityPanel> aggregate(const std::vector<MortalityPanel>& panels, const AggregationMap& map)
{
    std::map<std::string, std::map<Date, double>> sums;
    for (const auto& p : panels) {
        auto& target = sums[map.coarse_of(p.unit.id)];
        for (const auto& [year, obs] : p.by_year) {
            for (const auto& o : obs) {
                target[o.date] += o.value;
            }
        }
    }
    std::vector<MortalityPanel> out;
    out.reserve(sums.size());
    for (const auto& [id, by_date] : sums) {
        MortalityPanel panel{UnitId(id), {}};
        for (const auto& [date, value] : by_date) {
            panel.by_year[date.year()].push_back(DatedValue{date, value});
        }
        out.push_back(std::move(panel));
    }
    return out;
}

Point project_equirectangular(double lon_deg, double lat_deg, double reference_lat_deg)
{
    constexpr double rad = std::numbers::pi / 180.0;
    return Point{earth_radius_m * lon_deg * rad * std::cos(reference_lat_deg * rad), earth_radius_m * lat_deg * rad};
}

std::vector<UnitGeometry> parse_geometry(const std::filesystem::path& path)
{
    auto in = open_input(path);
    char first = 0;
    while (in.get(first) && std::isspace(static_cast<unsigned char>(first))) {
    }
    in.clear();
    in.seekg(0);
    if (first == '{') {
        return read_geojson(in, path.string());
    }
    return read_centroid_csv(in, path.string());
}

std::vector<UnitGeometry> read_centroid_csv(std::istream& in, const std::string& source)
{
    CsvReader reader(in, source);
    auto header = reader.expect_header({"unit_id", "x", "y"}, {"crs"});
    struct Row {
        std::string id;
        double x, y;
    };
    std::vector<Row> rows;
    std::optional<Crs> crs;
    std::vector<std::string> f;
    while (reader.next(f)) {
        if (f.size() != header.size()) {
            reader.fail("expected " + std::to_string(header.size()) + " fields");
        }
        if (f[0].empty()) {
            throw Error(ErrorCode::MissingUnitProperty, source + ":" + std::to_string(reader.line()));
        }
        Crs row_crs = Crs::Planar;
        if (f.size() == 4) {
            if (f[3] == "lonlat") {
                row_crs = Crs::LonLat;
            }
            else if (f[3] != "planar") {
                reader.fail("crs must be 'planar' or 'lonlat'");
            }
        }
        if (crs && *crs != row_crs) {
            reader.fail("mixed crs values");
        }
        crs = row_crs;
        double x = reader.parse_double(f[1], "x");
        double y = reader.parse_double(f[2], "y");
        if (!std::isfinite(x) || !std::isfinite(y)) {
            reader.fail("non-finite coordinate");
        }
        rows.push_back(Row{f[0], x, y});
    }
    double ref_lat = 0.0;
    if (crs == Crs::LonLat && !rows.empty()) {
        for (const auto& r : rows) {
            ref_lat += r.y;
        }
        ref_lat /= static_cast<double>(rows.size());
    }
    std::vector<UnitGeometry> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
        Point c = crs == Crs::LonLat ? project_equirectangular(r.x, r.y, ref_lat) : Point{r.x, r.y};
        out.push_back(UnitGeometry{UnitId(r.id), c, std::nullopt});
    }
    return out;
}

std::vector<UnitGeometry> read_geojson(std::istream& in, const std::string& source)
{
    using nlohmann::json;
    json doc;
    try {
        doc = json::parse(in);
    }
    catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, source + ": " + e.what());
    }
    if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" || !doc.contains("features") ||
        !doc["features"].is_array()) {
        throw Error(ErrorCode::ParseError, source + ": expected a GeoJSON FeatureCollection");
    }
    Crs crs = Crs::LonLat;
    if (doc.contains("crs")) {
        std::string name = doc["crs"].value("properties", json::object()).value("name", "");
        bool geographic = name.find("4326") != std::string::npos || name.find("CRS84") != std::string::npos ||
                          name.find("lonlat") != std::string::npos;
        crs = geographic ? Crs::LonLat : Crs::Planar;
    }

    auto read_ring = [&](const json& coords, const std::string& unit) {
        if (!coords.is_array()) {
            throw Error(ErrorCode::ParseError, source + ": ring of '" + unit + "' is not an array");
        }
        Ring ring;
        ring.reserve(coords.size());
        for (const auto& p : coords) {
            if (!p.is_array() || p.size() < 2 || !p[0].is_number() || !p[1].is_number()) {
                throw Error(ErrorCode::ParseError, source + ": bad position in unit '" + unit + "'");
            }
            ring.push_back(Point{p[0].get<double>(), p[1].get<double>()});
        }
        return ring;
    };
    auto read_polygon = [&](const json& coords, const std::string& unit) {
        if (!coords.is_array() || coords.empty()) {
            throw Error(ErrorCode::ParseError, source + ": empty polygon in unit '" + unit + "'");
        }
        PolygonPart part;
        part.outer = read_ring(coords[0], unit);
        for (std::size_t i = 1; i < coords.size(); ++i) {
            part.holes.push_back(read_ring(coords[i], unit));
        }
        return part;
    };

    std::vector<UnitGeometry> out;
    for (std::size_t fi = 0; fi < doc["features"].size(); ++fi) {
        const auto& feature = doc["features"][fi];
        const json props = feature.value("properties", json::object());
        if (!props.is_object() || !props.contains("unit_id") || props["unit_id"].is_null()) {
            throw Error(ErrorCode::MissingUnitProperty, source + ": feature " + std::to_string(fi));
        }
        std::string id = props["unit_id"].is_string() ? props["unit_id"].get<std::string>() : props["unit_id"].dump();
        std::string label = props.contains("label") && props["label"].is_string() ? props["label"].get<std::string>()
                                                                                   : id;
        const json geom = feature.value("geometry", json());
        if (!geom.is_object()) {
            throw Error(ErrorCode::ParseError, source + ": feature '" + id + "' has no geometry");
        }
        std::string type = geom.value("type", "");
        MultiPolygon polygon;
        if (type == "Polygon") {
            polygon.push_back(read_polygon(geom.at("coordinates"), id));
        }
        else if (type == "MultiPolygon") {
            for (const auto& poly : geom.at("coordinates")) {
                polygon.push_back(read_polygon(poly, id));
            }
        }
        else {
            throw Error(ErrorCode::ParseError, source + ": unsupported geometry type '" + type + "'");
        }
        if (polygon.empty()) {
            throw Error(ErrorCode::ParseError, source + ": empty geometry for '" + id + "'");
        }
        for (const auto& part : polygon) {
            if (!is_valid_ring(part.outer)) {
                throw Error(ErrorCode::InvalidRing, "outer ring of unit '" + id + "'");
            }
            for (const auto& hole : part.holes) {
                if (!is_valid_ring(hole)) {
                    throw Error(ErrorCode::InvalidRing, "hole of unit '" + id + "'");
                }
            }
        }
        out.push_back(UnitGeometry{UnitId(id, label), polygon_centroid(polygon), std::move(polygon)});
    }

    if (crs == Crs::LonLat && !out.empty()) {
        double ref_lat = 0.0;
        for (const auto& g : out) {
            ref_lat += g.centroid.y;
        }
        ref_lat /= static_cast<double>(out.size());
        for (auto& g : out) {
            for (auto& part : *g.polygon) {
                for (auto& p : part.outer) {
                    p = project_equirectangular(p.x, p.y, ref_lat);
                }
                for (auto& hole : part.holes) {
                    for (auto& p : hole) {
                        p = project_equirectangular(p.x, p.y, ref_lat);
                    }
                }
            }
            g.centroid = polygon_centroid(*g.polygon);
        }
    }
    return out;
}

WeeklyChange weekly_percent_change(const std::vector<double>& daily, int reference_week)
{
    const std::size_t weeks = daily.size() / 7;
    if (reference_week < 1 || static_cast<std::size_t>(reference_week) > weeks) {
        throw Error(ErrorCode::InvalidArgument, "reference week " + std::to_string(reference_week) +
                                                    " outside the " + std::to_string(weeks) + " complete weeks");
    }
    WeeklyChange out;
    out.totals.assign(weeks, 0.0);
    for (std::size_t w = 0; w < weeks; ++w) {
        for (std::size_t d = 0; d < 7; ++d) {
            out.totals[w] += daily[7 * w + d];
        }
    }
    const double ref = out.totals[static_cast<std::size_t>(reference_week - 1)];
    out.percent_change.reserve(weeks);
    for (double total : out.totals) {
        out.percent_change.push_back(ref > 0 ? 100.0 * (total - ref) / ref : std::numeric_limits<double>::quiet_NaN());
    }
    return out;
}

} // namespace epizone
