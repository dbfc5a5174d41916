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
#ifndef EPIZONE_REPRO_H
#define EPIZONE_REPRO_H

#include "epizone/core.h"

#include <vector>

namespace epizone
{

/**
 * Discrete serial interval: probability mass over lags 1..max_lag days. Same-day and
 * negative lags carry no mass.
 */
class SerialInterval
{
public:
    /// `pmf[0]` is the mass at lag 1. Throws Error(InvalidParams) unless the masses are
    /// nonnegative and sum to 1 within 1e-9.
    explicit SerialInterval(std::vector<double> pmf);

    int max_lag() const
    {
        return static_cast<int>(m_pmf.size());
    }

    /// Mass at `lag`; 0 outside 1..max_lag.
    double operator()(int lag) const
    {
        return lag >= 1 && lag <= max_lag() ? m_pmf[static_cast<std::size_t>(lag - 1)] : 0.0;
    }

    const std::vector<double>& pmf() const
    {
        return m_pmf;
    }

private:
    std::vector<double> m_pmf;
};

/// Default serial interval parameters (days).
struct SerialIntervalParams {
    double mean = 6.5;
    double sd = 4.0;
    int max_lag = 30;
};

/**
 * Gamma(mean, sd) discretized on integer lags: w(τ) = F(τ+0.5) − F(τ−0.5) for
 * τ = 1..L−1, w(L) = 1 − F(L−0.5), renormalized to sum 1.
 */
SerialInterval discretize_gamma_si(double mean, double sd, int max_lag);

inline SerialInterval discretize_gamma_si(const SerialIntervalParams& p)
{
    return discretize_gamma_si(p.mean, p.sd, p.max_lag);
}

class RtSeries
{
public:
    RtSeries(UnitId unit, Calendar calendar, std::vector<double> values, std::vector<bool> valid);

    const UnitId& unit() const
    {
        return m_unit;
    }
    const Calendar& calendar() const
    {
        return m_calendar;
    }
    /// Undefined days hold NaN.
    const std::vector<double>& values() const
    {
        return m_values;
    }
    const std::vector<bool>& valid() const
    {
        return m_valid;
    }
    std::size_t size() const
    {
        return m_values.size();
    }
    std::size_t valid_count() const;

private:
    UnitId m_unit;
    Calendar m_calendar;
    std::vector<double> m_values;
    std::vector<bool> m_valid;
};

/**
 * Wallinga–Teunis case reproduction number
 *
 *   R(t) = Σ_{s>t} N_s w(s−t) / Σ_{u<s} N_u w(s−u).
 *
 * Day t is invalid when N_t = 0, when t ≥ T − L (right censoring), or when a contributing
 * day has a zero denominator. Counts are rescaled by their maximum before summation, so
 * the result does not depend on the scale of the counts.
 */
RtSeries estimate_rt(const IncidenceSeries& series, const SerialInterval& si);

/**
 * Centered moving average over the valid days of an odd window. An output day is valid
 * iff at least ceil(window/2) of its window positions are valid.
 */
RtSeries smooth_rt(const RtSeries& rt, int window = 7);

} // namespace epizone

#endif // EPIZONE_REPRO_H
