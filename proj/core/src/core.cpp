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
#include "epizone/core.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <numeric>
#include <thread>

namespace epizone
{

const char* to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::InvalidArgument:
        return "InvalidArgument";
    case ErrorCode::InputNotFound:
        return "InputNotFound";
    case ErrorCode::InvalidConfig:
        return "InvalidConfig";
    case ErrorCode::IoError:
        return "IoError";
    case ErrorCode::MissingGeometry:
        return "MissingGeometry";
    case ErrorCode::CalendarMismatch:
        return "CalendarMismatch";
    case ErrorCode::DuplicateUnit:
        return "DuplicateUnit";
    case ErrorCode::NegativeCount:
        return "NegativeCount";
    case ErrorCode::EmptyOverlap:
        return "EmptyOverlap";
    case ErrorCode::ParseError:
        return "ParseError";
    case ErrorCode::DuplicateRecord:
        return "DuplicateRecord";
    case ErrorCode::MissingTargetYear:
        return "MissingTargetYear";
    case ErrorCode::EmptyBaseline:
        return "EmptyBaseline";
    case ErrorCode::UnmappedUnit:
        return "UnmappedUnit";
    case ErrorCode::MissingUnitProperty:
        return "MissingUnitProperty";
    case ErrorCode::InvalidRing:
        return "InvalidRing";
    case ErrorCode::InvalidParams:
        return "InvalidParams";
    case ErrorCode::EmptySeries:
        return "EmptySeries";
    case ErrorCode::InvalidWindow:
        return "InvalidWindow";
    case ErrorCode::InfeasibleWindow:
        return "InfeasibleWindow";
    case ErrorCode::AllInvalid:
        return "AllInvalid";
    case ErrorCode::MissingPolygon:
        return "MissingPolygon";
    case ErrorCode::DuplicateCentroid:
        return "DuplicateCentroid";
    case ErrorCode::Disconnected:
        return "Disconnected";
    case ErrorCode::EmptyCluster:
        return "EmptyCluster";
    case ErrorCode::EmptyFrontier:
        return "EmptyFrontier";
    case ErrorCode::InfeasibleMinSize:
        return "InfeasibleMinSize";
    case ErrorCode::SeedOverlap:
        return "SeedOverlap";
    case ErrorCode::InvalidProfile:
        return "InvalidProfile";
    case ErrorCode::DisconnectedRegion:
        return "DisconnectedRegion";
    case ErrorCode::UnitMismatch:
        return "UnitMismatch";
    }
    return "Unknown";
}

Date::Date(int year, unsigned month, unsigned day)
{
    std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}};
    if (!ymd.ok()) {
        throw Error(ErrorCode::ParseError, "invalid date " + std::to_string(year) + "-" + std::to_string(month) +
                                               "-" + std::to_string(day));
    }
    m_days = std::chrono::sys_days(ymd);
}

Date Date::parse(std::string_view text)
{
    auto fail = [&]() {
        return Error(ErrorCode::ParseError, "malformed date '" + std::string(text) + "'");
    };
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        throw fail();
    }
    auto field = [&](std::size_t pos, std::size_t len) {
        int value = 0;
        auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, value);
        if (ec != std::errc() || ptr != text.data() + pos + len) {
            throw fail();
        }
        return value;
    };
    int y = field(0, 4);
    int m = field(5, 2);
    int d = field(8, 2);
    if (m < 1 || m > 12 || d < 1 || d > 31) {
        throw fail();
    }
    return Date(y, static_cast<unsigned>(m), static_cast<unsigned>(d));
}

std::string Date::to_string() const
{
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", year(), month(), day());
    return buf;
}

int Date::year() const
{
    return static_cast<int>(std::chrono::year_month_day(m_days).year());
}

unsigned Date::month() const
{
    return static_cast<unsigned>(std::chrono::year_month_day(m_days).month());
}

unsigned Date::day() const
{
    return static_cast<unsigned>(std::chrono::year_month_day(m_days).day());
}

Calendar::Calendar(Date start, int length)
    : m_start(start)
    , m_length(length)
{
    if (length < 1) {
        throw Error(ErrorCode::InvalidArgument, "calendar length must be positive");
    }
}

std::optional<int> Calendar::index_of(Date date) const
{
    int offset = date - m_start;
    if (offset < 0 || offset >= m_length) {
        return std::nullopt;
    }
    return offset;
}

UnitId::UnitId(std::string id_, std::string label_)
    : id(std::move(id_))
    , label(std::move(label_))
{
    if (id.empty()) {
        throw Error(ErrorCode::InvalidArgument, "unit id must be nonempty");
    }
    if (label.empty()) {
        label = id;
    }
}

IncidenceSeries::IncidenceSeries(UnitId unit, Calendar calendar, std::vector<double> counts,
                                 std::vector<bool> imputed)
    : m_unit(std::move(unit))
    , m_calendar(calendar)
    , m_counts(std::move(counts))
    , m_imputed(std::move(imputed))
{
    if (m_counts.size() != static_cast<std::size_t>(m_calendar.length())) {
        throw Error(ErrorCode::CalendarMismatch, "series of unit '" + m_unit.id + "' has " +
                                                     std::to_string(m_counts.size()) + " days, calendar has " +
                                                     std::to_string(m_calendar.length()));
    }
    if (m_imputed.empty()) {
        m_imputed.assign(m_counts.size(), false);
    }
    if (m_imputed.size() != m_counts.size()) {
        throw Error(ErrorCode::InvalidArgument, "imputed flags do not match series length");
    }
    for (std::size_t t = 0; t < m_counts.size(); ++t) {
        if (!std::isfinite(m_counts[t]) || m_counts[t] < 0) {
            throw Error(ErrorCode::NegativeCount,
                        "unit '" + m_unit.id + "' day " + m_calendar.date_at(static_cast<int>(t)).to_string());
        }
    }
}

double IncidenceSeries::total() const
{
    return std::accumulate(m_counts.begin(), m_counts.end(), 0.0);
}

std::vector<UnitId> ValidatedDataset::units() const
{
    std::vector<UnitId> ids;
    ids.reserve(series.size());
    for (const auto& s : series) {
        ids.push_back(s.unit());
    }
    return ids;
}

ValidatedDataset validate_dataset(std::vector<IncidenceSeries> series, std::vector<UnitGeometry> geometries)
{
    if (series.empty() || geometries.empty()) {
        throw Error(ErrorCode::InvalidArgument, "dataset needs at least one series and one geometry");
    }
    std::sort(series.begin(), series.end(), [](const auto& a, const auto& b) {
        return a.unit() < b.unit();
    });
    for (std::size_t i = 1; i < series.size(); ++i) {
        if (series[i].unit() == series[i - 1].unit()) {
            throw Error(ErrorCode::DuplicateUnit, series[i].unit().id);
        }
    }
    std::map<std::string, UnitGeometry*> by_id;
    for (auto& g : geometries) {
        if (!by_id.emplace(g.unit.id, &g).second) {
            throw Error(ErrorCode::DuplicateUnit, g.unit.id);
        }
    }
    const Calendar calendar = series.front().calendar();
    std::vector<UnitGeometry> matched;
    matched.reserve(series.size());
    for (const auto& s : series) {
        if (!(s.calendar() == calendar)) {
            throw Error(ErrorCode::CalendarMismatch, s.unit().id);
        }
        for (std::size_t t = 0; t < s.size(); ++t) {
            if (!(s.counts()[t] >= 0) || !std::isfinite(s.counts()[t])) {
                throw Error(ErrorCode::NegativeCount, s.unit().id + " day " + std::to_string(t));
            }
        }
        auto it = by_id.find(s.unit().id);
        if (it == by_id.end()) {
            throw Error(ErrorCode::MissingGeometry, s.unit().id);
        }
        const auto& g = *it->second;
        if (!std::isfinite(g.centroid.x) || !std::isfinite(g.centroid.y)) {
            throw Error(ErrorCode::InvalidArgument, "non-finite centroid for unit '" + g.unit.id + "'");
        }
        matched.push_back(g);
    }
    return ValidatedDataset{calendar, std::move(series), std::move(matched)};
}

IncidenceSeries align_to_calendar(const UnitId& unit, std::span<const DatedValue> observations,
                                  const Calendar& target)
{
    std::vector<double> counts(static_cast<std::size_t>(target.length()), 0.0);
    std::vector<bool> imputed(counts.size(), true);
    bool any = false;
    for (const auto& obs : observations) {
        if (auto day = target.index_of(obs.date)) {
            counts[*day] += obs.value;
            imputed[*day] = false;
            any = true;
        }
    }
    if (!any) {
        throw Error(ErrorCode::EmptyOverlap, "no observation of unit '" + unit.id + "' within " +
                                                 target.start().to_string() + ".." + target.last().to_string());
    }
    return IncidenceSeries(unit, target, std::move(counts), std::move(imputed));
}

IncidenceSeries align_to_calendar(const IncidenceSeries& series, const Calendar& target)
{
    std::vector<double> counts(static_cast<std::size_t>(target.length()), 0.0);
    std::vector<bool> imputed(counts.size(), true);
    bool any = false;
    for (int t = 0; t < static_cast<int>(series.size()); ++t) {
        if (auto day = target.index_of(series.calendar().date_at(t))) {
            counts[*day] = series.counts()[t];
            imputed[*day] = series.imputed()[t];
            any = true;
        }
    }
    if (!any) {
        throw Error(ErrorCode::EmptyOverlap, "series of unit '" + series.unit().id + "' does not overlap target");
    }
    return IncidenceSeries(series.unit(), target, std::move(counts), std::move(imputed));
}

int default_thread_count()
{
    if (const char* env = std::getenv("EPIZONE_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) {
            return n;
        }
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

} // namespace epizone
