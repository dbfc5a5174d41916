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
#include "epizone/repro.h"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace epizone
{

SerialInterval::SerialInterval(std::vector<double> pmf)
    : m_pmf(std::move(pmf))
{
    if (m_pmf.empty()) {
        throw Error(ErrorCode::InvalidParams, "serial interval needs at least one lag");
    }
    double sum = 0.0;
    for (double w : m_pmf) {
        if (!(w >= 0) || !std::isfinite(w)) {
            throw Error(ErrorCode::InvalidParams, "serial interval masses must be finite and nonnegative");
        }
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw Error(ErrorCode::InvalidParams, "serial interval masses sum to " + std::to_string(sum));
    }
}

SerialInterval discretize_gamma_si(double mean, double sd, int max_lag)
{
    if (!(mean > 0) || !(sd > 0) || !std::isfinite(mean) || !std::isfinite(sd) || max_lag < 1) {
        throw Error(ErrorCode::InvalidParams, "gamma serial interval needs mean > 0, sd > 0, max_lag >= 1");
    }
    const double shape = mean * mean / (sd * sd);
    const double scale = sd * sd / mean;
    auto cdf = [&](double x) {
        return x <= 0 ? 0.0 : boost::math::gamma_p(shape, x / scale);
    };
    std::vector<double> pmf(static_cast<std::size_t>(max_lag));
    for (int lag = 1; lag < max_lag; ++lag) {
        pmf[lag - 1] = cdf(lag + 0.5) - cdf(lag - 0.5);
    }
    pmf[max_lag - 1] = 1.0 - cdf(max_lag - 0.5);
    double total = std::accumulate(pmf.begin(), pmf.end(), 0.0);
    if (!(total > 0)) {
        throw Error(ErrorCode::InvalidParams, "gamma serial interval has no mass at lags >= 1");
    }
    for (double& w : pmf) {
        w /= total;
    }
    return SerialInterval(std::move(pmf));
}

RtSeries::RtSeries(UnitId unit, Calendar calendar, std::vector<double> values, std::vector<bool> valid)
    : m_unit(std::move(unit))
    , m_calendar(calendar)
    , m_values(std::move(values))
    , m_valid(std::move(valid))
{
    if (m_values.size() != static_cast<std::size_t>(m_calendar.length()) || m_valid.size() != m_values.size()) {
        throw Error(ErrorCode::CalendarMismatch, "R(t) series of '" + m_unit.id + "' does not match its calendar");
    }
    for (std::size_t t = 0; t < m_values.size(); ++t) {
        if (m_valid[t] && (!std::isfinite(m_values[t]) || m_values[t] < 0)) {
            throw Error(ErrorCode::InvalidArgument, "R(t) of '" + m_unit.id + "' must be finite and nonnegative");
        }
        if (!m_valid[t]) {
            m_values[t] = std::numeric_limits<double>::quiet_NaN();
        }
    }
}

std::size_t RtSeries::valid_count() const
{
    return static_cast<std::size_t>(std::count(m_valid.begin(), m_valid.end(), true));
}

RtSeries estimate_rt(const IncidenceSeries& series, const SerialInterval& si)
{
    const int T = static_cast<int>(series.size());
    if (T == 0) {
        throw Error(ErrorCode::EmptySeries, series.unit().id);
    }
    const int L = si.max_lag();
    const double scale = *std::max_element(series.counts().begin(), series.counts().end());
    std::vector<double> values(static_cast<std::size_t>(T), std::numeric_limits<double>::quiet_NaN());
    std::vector<bool> valid(values.size(), false);
    if (scale == 0.0) {
        return RtSeries(series.unit(), series.calendar(), std::move(values), std::move(valid));
    }

    std::vector<double> n(static_cast<std::size_t>(T));
    for (int t = 0; t < T; ++t) {
        n[t] = series.counts()[t] / scale;
    }
    // infectiousness pressure on day s from all earlier days
    std::vector<double> pressure(n.size(), 0.0);
    for (int s = 1; s < T; ++s) {
        double sum = 0.0;
        for (int lag = 1; lag <= std::min(s, L); ++lag) {
            sum += n[s - lag] * si(lag);
        }
        pressure[s] = sum;
    }

    for (int t = 0; t < T - L; ++t) {
        if (n[t] == 0.0) {
            continue;
        }
        double r = 0.0;
        bool ok = true;
        for (int lag = 1; lag <= L && t + lag < T; ++lag) {
            const int s = t + lag;
            const double w = si(lag);
            if (n[s] == 0.0 || w == 0.0) {
                continue;
            }
            if (pressure[s] == 0.0) {
                ok = false;
                break;
            }
            r += n[s] * w / pressure[s];
        }
        if (ok) {
            values[t] = r;
            valid[t] = true;
        }
    }
    return RtSeries(series.unit(), series.calendar(), std::move(values), std::move(valid));
}

RtSeries smooth_rt(const RtSeries& rt, int window)
{
    if (window < 1 || window % 2 == 0) {
        throw Error(ErrorCode::InvalidWindow, "smoothing window must be odd and >= 1, got " + std::to_string(window));
    }
    const int T = static_cast<int>(rt.size());
    const int half = window / 2;
    const int needed = (window + 1) / 2;
    std::vector<double> values(rt.size(), std::numeric_limits<double>::quiet_NaN());
    std::vector<bool> valid(rt.size(), false);
    for (int t = 0; t < T; ++t) {
        double sum = 0.0;
        int count = 0;
        for (int u = std::max(0, t - half); u <= std::min(T - 1, t + half); ++u) {
            if (rt.valid()[u]) {
                sum += rt.values()[u];
                ++count;
            }
        }
        if (count >= needed) {
            values[t] = sum / count;
            valid[t] = true;
        }
    }
    return RtSeries(rt.unit(), rt.calendar(), std::move(values), std::move(valid));
}

} // namespace epizone
