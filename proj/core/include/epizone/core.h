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
#ifndef EPIZONE_CORE_H
#define EPIZONE_CORE_H

#include "epizone/error.h"
#include "epizone/geometry.h"

#include <chrono>
#include <compare>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace epizone
{

/// Civil date (no time zone, daily resolution).
class Date
{
public:
    Date() = default;
    explicit Date(std::chrono::sys_days days)
        : m_days(days)
    {
    }
    Date(int year, unsigned month, unsigned day);

    /// Parses `YYYY-MM-DD`. Throws Error(ParseError) on malformed or impossible dates.
    static Date parse(std::string_view text);

    std::string to_string() const;

    int year() const;
    unsigned month() const;
    unsigned day() const;

    std::chrono::sys_days sys_days() const
    {
        return m_days;
    }

    Date operator+(int days) const
    {
        return Date(m_days + std::chrono::days(days));
    }

    /// Signed number of days from `other` to this date.
    int operator-(const Date& other) const
    {
        return static_cast<int>((m_days - other.m_days).count());
    }

    auto operator<=>(const Date&) const = default;
    bool operator==(const Date&) const = default;

private:
    std::chrono::sys_days m_days{};
};

/// Shared observation window: `length` consecutive days starting at `start`.
class Calendar
{
public:
    Calendar(Date start, int length);

    Date start() const
    {
        return m_start;
    }
    int length() const
    {
        return m_length;
    }
    Date last() const
    {
        return m_start + (m_length - 1);
    }
    Date date_at(int day) const
    {
        return m_start + day;
    }

    /// Day index of `date`, or nullopt if it falls outside the window.
    std::optional<int> index_of(Date date) const;

    bool operator==(const Calendar&) const = default;

private:
    Date m_start;
    int m_length;
};

struct UnitId {
    std::string id;
    std::string label;

    explicit UnitId(std::string id_, std::string label_ = {});

    bool operator==(const UnitId& other) const
    {
        return id == other.id;
    }
    auto operator<=>(const UnitId& other) const
    {
        return id <=> other.id;
    }
};

/**
 * Daily nonnegative counts of one unit on a calendar. Counts are real valued so that
 * excess-mortality differentials can share the type with case counts.
 * Days that were filled in because no observation existed carry an `imputed` flag.
 */
class IncidenceSeries
{
public:
    IncidenceSeries(UnitId unit, Calendar calendar, std::vector<double> counts, std::vector<bool> imputed = {});

    const UnitId& unit() const
    {
        return m_unit;
    }
    const Calendar& calendar() const
    {
        return m_calendar;
    }
    const std::vector<double>& counts() const
    {
        return m_counts;
    }
    const std::vector<bool>& imputed() const
    {
        return m_imputed;
    }
    std::size_t size() const
    {
        return m_counts.size();
    }
    double total() const;

private:
    UnitId m_unit;
    Calendar m_calendar;
    std::vector<double> m_counts;
    std::vector<bool> m_imputed;
};

struct UnitGeometry {
    UnitId unit;
    Point centroid;
    std::optional<MultiPolygon> polygon;
};

/// Series and geometries that passed validation, ordered by unit id.
struct ValidatedDataset {
    Calendar calendar;
    std::vector<IncidenceSeries> series;
    std::vector<UnitGeometry> geometries;

    std::size_t size() const
    {
        return series.size();
    }
    std::vector<UnitId> units() const;
};

ValidatedDataset validate_dataset(std::vector<IncidenceSeries> series, std::vector<UnitGeometry> geometries);

struct DatedValue {
    Date date;
    double value;
};

/**
 * Places dated observations on the target calendar. Missing days become 0 and are
 * flagged as imputed; observations outside the window are dropped; repeated dates
 * accumulate.
 */
IncidenceSeries align_to_calendar(const UnitId& unit, std::span<const DatedValue> observations,
                                  const Calendar& target);

/// Re-aligns an existing series; imputed flags of days kept are carried over.
IncidenceSeries align_to_calendar(const IncidenceSeries& series, const Calendar& target);

/// Number of worker threads: EPIZONE_THREADS if set and positive, else hardware concurrency.
int default_thread_count();

} // namespace epizone

#endif // EPIZONE_CORE_H
