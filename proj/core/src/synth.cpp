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
#include "epizone/synth.h"
#include "epizone/csv.h"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>

namespace epizone
{

RProfile::RProfile(std::vector<ProfileSegment> segments)
    : m_segments(std::move(segments))
{
    if (m_segments.empty() || m_segments.front().from != 0) {
        throw Error(ErrorCode::InvalidProfile, "profile must start at day 0");
    }
    for (std::size_t i = 0; i < m_segments.size(); ++i) {
        if (!(m_segments[i].value >= 0) || !std::isfinite(m_segments[i].value)) {
            throw Error(ErrorCode::InvalidProfile, "R values must be finite and nonnegative");
        }
        if (i > 0 && m_segments[i].from <= m_segments[i - 1].from) {
            throw Error(ErrorCode::InvalidProfile, "profile segments must start on increasing days");
        }
    }
}

double RProfile::at(int day) const
{
    double value = m_segments.front().value;
    for (const auto& s : m_segments) {
        if (s.from > day) {
            break;
        }
        value = s.value;
    }
    return value;
}

std::vector<double> RProfile::expand(int days) const
{
    std::vector<double> out(static_cast<std::size_t>(std::max(days, 0)));
    for (int t = 0; t < days; ++t) {
        out[t] = at(t);
    }
    return out;
}

std::vector<double> simulate_renewal(const std::vector<double>& profile, const SerialInterval& si, double initial,
                                     int days, std::mt19937_64& rng, SimulationMode mode)
{
    if (!(initial >= 1) || !std::isfinite(initial)) {
        throw Error(ErrorCode::InvalidArgument, "initial cases must be >= 1");
    }
    if (days <= si.max_lag()) {
        throw Error(ErrorCode::InvalidArgument, "simulation horizon must exceed the serial interval support");
    }
    if (profile.size() < static_cast<std::size_t>(days)) {
        throw Error(ErrorCode::InvalidProfile, "profile covers " + std::to_string(profile.size()) + " of " +
                                                   std::to_string(days) + " days");
    }
    for (double r : profile) {
        if (!(r >= 0) || !std::isfinite(r)) {
            throw Error(ErrorCode::InvalidProfile, "R values must be finite and nonnegative");
        }
    }
    std::vector<double> counts(static_cast<std::size_t>(days), 0.0);
    counts[0] = initial;
    for (int t = 1; t < days; ++t) {
        double pressure = 0.0;
        for (int lag = 1; lag <= std::min(t, si.max_lag()); ++lag) {
            pressure += counts[t - lag] * si(lag);
        }
        const double lambda = profile[t] * pressure;
        if (mode == SimulationMode::Deterministic) {
            counts[t] = lambda;
        }
        else {
            counts[t] = lambda > 0 ? static_cast<double>(std::poisson_distribution<long long>(lambda)(rng)) : 0.0;
        }
    }
    return counts;
}

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t cell)
{
    return splitmix64(splitmix64(seed) ^ cell);
}

std::string Scenario::cell_id(int row, int col) const
{
    auto width = [](int n) {
        return static_cast<int>(std::to_string(std::max(n - 1, 0)).size());
    };
    char buf[64];
    std::snprintf(buf, sizeof(buf), "r%0*dc%0*d", width(rows), row, width(cols), col);
    return buf;
}

Scenario read_scenario(std::istream& in, const std::string& source)
{
    using nlohmann::json;
    json doc;
    try {
        doc = json::parse(in);
    }
    catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, source + ": " + e.what());
    }
    static const std::set<std::string> known{"rows", "cols",  "regions", "profiles",   "initial_cases",  "days",
                                             "seed", "mode", "start_date", "serial_interval"};
    if (!doc.is_object()) {
        throw Error(ErrorCode::InvalidConfig, source + ": scenario must be a JSON object");
    }
    for (const auto& [key, value] : doc.items()) {
        if (!known.count(key)) {
            throw Error(ErrorCode::InvalidConfig, source + ": unknown scenario key '" + key + "'");
        }
    }
    try {
        Scenario sc;
        sc.rows = doc.at("rows").get<int>();
        sc.cols = doc.at("cols").get<int>();
        sc.days = doc.at("days").get<int>();
        sc.seed = doc.value("seed", std::uint64_t{0});
        std::string mode = doc.value("mode", "poisson");
        if (mode == "poisson") {
            sc.mode = SimulationMode::Poisson;
        }
        else if (mode == "deterministic") {
            sc.mode = SimulationMode::Deterministic;
        }
        else {
            throw Error(ErrorCode::InvalidConfig, source + ": mode must be 'poisson' or 'deterministic'");
        }
        sc.start_date = doc.value("start_date", sc.start_date);
        const auto& regions = doc.at("regions");
        for (const auto& row : regions) {
            if (row.is_array()) {
                for (const auto& cell : row) {
                    sc.regions.push_back(cell.get<int>());
                }
            }
            else {
                sc.regions.push_back(row.get<int>());
            }
        }
        for (const auto& [key, segments] : doc.at("profiles").items()) {
            std::vector<ProfileSegment> segs;
            for (const auto& s : segments) {
                segs.push_back(ProfileSegment{s.at("from").get<int>(), s.at("r").get<double>()});
            }
            sc.profiles.emplace(std::stoi(key), RProfile(std::move(segs)));
        }
        const auto& init = doc.at("initial_cases");
        if (init.is_array()) {
            for (const auto& v : init) {
                sc.initial_cases.push_back(v.get<double>());
            }
        }
        else {
            sc.initial_cases.push_back(init.get<double>());
        }
        if (doc.contains("serial_interval")) {
            const auto& si = doc["serial_interval"];
            for (const auto& [key, value] : si.items()) {
                if (key != "mean" && key != "sd" && key != "max_lag") {
                    throw Error(ErrorCode::InvalidConfig, source + ": unknown serial_interval key '" + key + "'");
                }
            }
            sc.serial_interval.mean = si.value("mean", sc.serial_interval.mean);
            sc.serial_interval.sd = si.value("sd", sc.serial_interval.sd);
            sc.serial_interval.max_lag = si.value("max_lag", sc.serial_interval.max_lag);
        }
        return sc;
    }
    catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, source + ": " + e.what());
    }
    catch (const std::invalid_argument&) {
        throw Error(ErrorCode::InvalidConfig, source + ": profile keys must be integer region labels");
    }
}

Scenario parse_scenario(const std::filesystem::path& path)
{
    auto in = open_input(path);
    return read_scenario(in, path.string());
}

SyntheticDataset make_scenario(const Scenario& sc, const SerialInterval& si)
{
    if (sc.rows < 2 || sc.cols < 2) {
        throw Error(ErrorCode::InvalidArgument, "lattice must be at least 2x2");
    }
    const std::size_t cells = static_cast<std::size_t>(sc.rows) * static_cast<std::size_t>(sc.cols);
    if (sc.regions.size() != cells) {
        throw Error(ErrorCode::InvalidArgument, "region map has " + std::to_string(sc.regions.size()) +
                                                    " cells, lattice has " + std::to_string(cells));
    }
    if (sc.initial_cases.size() != 1 && sc.initial_cases.size() != cells) {
        throw Error(ErrorCode::InvalidArgument, "initial_cases must be a single value or one per cell");
    }
    std::set<int> labels;
    for (int r : sc.regions) {
        if (r < 0) {
            throw Error(ErrorCode::InvalidArgument, "region labels must be >= 0");
        }
        if (r > 0) {
            labels.insert(r);
        }
    }
    if (labels.empty()) {
        throw Error(ErrorCode::InvalidArgument, "scenario has no cells");
    }
    for (int label : labels) {
        auto it = sc.profiles.find(label);
        if (it == sc.profiles.end()) {
            throw Error(ErrorCode::InvalidProfile, "no profile for region " + std::to_string(label));
        }
        for (const auto& seg : it->second.segments()) {
            if (!(seg.value > 0)) {
                throw Error(ErrorCode::InvalidProfile, "scenario R values must be positive");
            }
        }
        // rook connectivity of the region
        std::vector<bool> seen(cells, false);
        std::size_t start = cells;
        std::size_t size = 0;
        for (std::size_t c = 0; c < cells; ++c) {
            if (sc.regions[c] == label) {
                start = std::min(start, c);
                ++size;
            }
        }
        std::queue<std::size_t> queue;
        queue.push(start);
        seen[start] = true;
        std::size_t reached = 0;
        while (!queue.empty()) {
            std::size_t c = queue.front();
            queue.pop();
            ++reached;
            const int row = static_cast<int>(c) / sc.cols;
            const int col = static_cast<int>(c) % sc.cols;
            const int dr[] = {-1, 1, 0, 0};
            const int dc[] = {0, 0, -1, 1};
            for (int k = 0; k < 4; ++k) {
                int r2 = row + dr[k];
                int c2 = col + dc[k];
                if (r2 < 0 || r2 >= sc.rows || c2 < 0 || c2 >= sc.cols) {
                    continue;
                }
                std::size_t n2 = static_cast<std::size_t>(r2 * sc.cols + c2);
                if (!seen[n2] && sc.regions[n2] == label) {
                    seen[n2] = true;
                    queue.push(n2);
                }
            }
        }
        if (reached != size) {
            throw Error(ErrorCode::DisconnectedRegion, "region " + std::to_string(label));
        }
    }

    const Calendar calendar(Date::parse(sc.start_date), sc.days);
    SyntheticDataset out;
    std::vector<int> truth_labels;
    std::vector<UnitId> units;
    for (int row = 0; row < sc.rows; ++row) {
        for (int col = 0; col < sc.cols; ++col) {
            const std::size_t cell = static_cast<std::size_t>(row * sc.cols + col);
            const int region = sc.regions[cell];
            if (region == 0) {
                continue;
            }
            UnitId id(sc.cell_id(row, col));
            std::mt19937_64 rng(substream_seed(sc.seed, cell));
            auto counts = simulate_renewal(sc.profiles.at(region).expand(sc.days), si, sc.initial_at(cell), sc.days,
                                           rng, sc.mode);
            out.series.emplace_back(id, calendar, std::move(counts));
            const double x0 = col;
            const double y0 = row;
            Ring square{{x0, y0}, {x0 + 1, y0}, {x0 + 1, y0 + 1}, {x0, y0 + 1}, {x0, y0}};
            MultiPolygon poly{PolygonPart{square, {}}};
            out.geometries.push_back(UnitGeometry{id, polygon_centroid(poly), std::move(poly)});
            units.push_back(id);
            truth_labels.push_back(region);
        }
    }
    std::map<int, int> renumber;
    for (int& l : truth_labels) {
        l = renumber.try_emplace(l, static_cast<int>(renumber.size()) + 1).first->second;
    }
    out.truth.units = std::move(units);
    out.truth.k = static_cast<int>(renumber.size());
    out.truth.labels = std::move(truth_labels);
    return out;
}

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b)
{
    if (a.size() != b.size()) {
        throw Error(ErrorCode::UnitMismatch, "partitions label different numbers of units");
    }
    auto comb2 = [](double x) {
        return 0.5 * x * (x - 1.0);
    };
    std::map<std::pair<int, int>, double> table;
    std::map<int, double> rows;
    std::map<int, double> cols;
    for (std::size_t i = 0; i < a.size(); ++i) {
        table[{a[i], b[i]}] += 1.0;
        rows[a[i]] += 1.0;
        cols[b[i]] += 1.0;
    }
    double index = 0.0;
    for (const auto& [key, count] : table) {
        index += comb2(count);
    }
    double sum_a = 0.0;
    for (const auto& [key, count] : rows) {
        sum_a += comb2(count);
    }
    double sum_b = 0.0;
    for (const auto& [key, count] : cols) {
        sum_b += comb2(count);
    }
    const double total = comb2(static_cast<double>(a.size()));
    const double expected = total > 0 ? sum_a * sum_b / total : 0.0;
    const double max_index = 0.5 * (sum_a + sum_b);
    if (max_index == expected) {
        return index == max_index ? 1.0 : 0.0;
    }
    return (index - expected) / (max_index - expected);
}

double adjusted_rand_index(const Partition& p, const Partition& truth)
{
    if (p.units.size() != truth.units.size()) {
        throw Error(ErrorCode::UnitMismatch, "partitions cover different unit sets");
    }
    std::map<std::string, int> truth_label;
    for (std::size_t i = 0; i < truth.units.size(); ++i) {
        truth_label.emplace(truth.units[i].id, truth.labels[i]);
    }
    std::vector<int> aligned;
    aligned.reserve(p.units.size());
    for (const auto& u : p.units) {
        auto it = truth_label.find(u.id);
        if (it == truth_label.end()) {
            throw Error(ErrorCode::UnitMismatch, "unit '" + u.id + "' missing from the reference partition");
        }
        aligned.push_back(it->second);
    }
    return adjusted_rand_index(p.labels, aligned);
}

} // namespace epizone
