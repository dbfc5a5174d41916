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
#include "epizone/dtw.h"
#include "epizone/csv.h"
#include "epizone/parallel.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

namespace epizone
{

const char* to_string(StepPattern p)
{
    return p == StepPattern::Symmetric1 ? "symmetric1" : "symmetric2";
}

StepPattern step_pattern_from_string(const std::string& s)
{
    if (s == "symmetric1") {
        return StepPattern::Symmetric1;
    }
    if (s == "symmetric2") {
        return StepPattern::Symmetric2;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown step pattern '" + s + "'");
}

double dtw_distance(std::span<const double> x, std::span<const double> y, const DtwConfig& cfg)
{
    const std::size_t n = x.size();
    const std::size_t m = y.size();
    if (n == 0 || m == 0) {
        throw Error(ErrorCode::EmptySeries, "DTW needs two nonempty series");
    }
    std::size_t band = std::max(n, m);
    if (cfg.window) {
        if (*cfg.window < 0) {
            throw Error(ErrorCode::InvalidArgument, "DTW window must be nonnegative");
        }
        band = static_cast<std::size_t>(*cfg.window);
        std::size_t diff = n > m ? n - m : m - n;
        if (band < diff) {
            throw Error(ErrorCode::InfeasibleWindow, "band " + std::to_string(band) + " < length difference " +
                                                         std::to_string(diff));
        }
    }
    const bool sym2 = cfg.step_pattern == StepPattern::Symmetric2;
    constexpr double inf = std::numeric_limits<double>::infinity();

    std::vector<double> prev(m, inf);
    std::vector<double> curr(m, inf);
    for (std::size_t i = 0; i < n; ++i) {
        std::fill(curr.begin(), curr.end(), inf);
        const std::size_t lo = i > band ? i - band : 0;
        const std::size_t hi = std::min(m - 1, i + band);
        for (std::size_t j = lo; j <= hi; ++j) {
            const double d = std::abs(x[i] - y[j]);
            if (i == 0 && j == 0) {
                curr[0] = sym2 ? d + d : d;
                continue;
            }
            const double up = i > 0 ? prev[j] : inf;
            const double left = j > 0 ? curr[j - 1] : inf;
            double diag = i > 0 && j > 0 ? prev[j - 1] : inf;
            if (sym2) {
                diag = diag + d;
            }
            curr[j] = d + std::min({up, left, diag});
        }
        std::swap(prev, curr);
    }
    double total = prev[m - 1];
    if (cfg.normalize) {
        total /= sym2 ? static_cast<double>(n + m) : static_cast<double>(std::max(n, m));
    }
    return total;
}

std::vector<double> prepare_trend(const RtSeries& rt)
{
    const auto& valid = rt.valid();
    const auto& values = rt.values();
    auto first = std::find(valid.begin(), valid.end(), true);
    if (first == valid.end()) {
        throw Error(ErrorCode::AllInvalid, rt.unit().id);
    }
    const std::size_t begin = static_cast<std::size_t>(first - valid.begin());
    std::size_t end = valid.size();
    while (!valid[end - 1]) {
        --end;
    }
    std::vector<double> out(values.begin() + static_cast<std::ptrdiff_t>(begin),
                            values.begin() + static_cast<std::ptrdiff_t>(end));
    // interpolate interior gaps between the surrounding valid days
    std::size_t last_valid = 0;
    for (std::size_t k = 1; k < out.size(); ++k) {
        if (!valid[begin + k]) {
            continue;
        }
        if (k > last_valid + 1) {
            const double a = out[last_valid];
            const double b = out[k];
            const double span = static_cast<double>(k - last_valid);
            for (std::size_t g = last_valid + 1; g < k; ++g) {
                out[g] = a + (b - a) * static_cast<double>(g - last_valid) / span;
            }
        }
        last_valid = k;
    }
    return out;
}

DistanceMatrix::DistanceMatrix(std::vector<UnitId> units, std::vector<double> values)
    : m_units(std::move(units))
    , m_values(std::move(values))
{
    const std::size_t n = m_units.size();
    if (m_values.size() != n * n) {
        throw Error(ErrorCode::InvalidArgument, "distance matrix must be n x n");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (m_values[i * n + i] != 0.0) {
            throw Error(ErrorCode::InvalidArgument, "distance matrix diagonal must be zero");
        }
        for (std::size_t j = 0; j < n; ++j) {
            double v = m_values[i * n + j];
            if (!std::isfinite(v) || v < 0 || v != m_values[j * n + i]) {
                throw Error(ErrorCode::InvalidArgument,
                            "distance matrix must be symmetric, finite and nonnegative (" + m_units[i].id + ", " +
                                m_units[j].id + ")");
            }
        }
    }
}

DistanceMatrix DistanceMatrix::scaled(double factor) const
{
    std::vector<double> v = m_values;
    for (double& x : v) {
        x *= factor;
    }
    return DistanceMatrix(m_units, std::move(v));
}

DistanceMatrix distance_matrix(const std::vector<RtSeries>& trends, const DtwConfig& cfg, int threads)
{
    const std::size_t n = trends.size();
    if (n < 2) {
        throw Error(ErrorCode::InvalidArgument, "distance matrix needs at least two units");
    }
    std::vector<std::vector<double>> prepared;
    std::vector<UnitId> units;
    prepared.reserve(n);
    units.reserve(n);
    for (const auto& t : trends) {
        prepared.push_back(prepare_trend(t));
        units.push_back(t.unit());
    }
    std::vector<double> values(n * n, 0.0);
    // one task per row keeps the result independent of scheduling
    parallel_for(n, threads, [&](std::size_t i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            values[i * n + j] = dtw_distance(prepared[i], prepared[j], cfg);
        }
    });
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            values[j * n + i] = values[i * n + j];
        }
    }
    return DistanceMatrix(std::move(units), std::move(values));
}

void write_distance_csv(std::ostream& out, const DistanceMatrix& d)
{
    out << "unit_id";
    for (const auto& u : d.units()) {
        out << ',' << csv_field(u.id);
    }
    out << '\n';
    for (std::size_t i = 0; i < d.size(); ++i) {
        out << csv_field(d.units()[i].id);
        for (std::size_t j = 0; j < d.size(); ++j) {
            out << ',' << format_number(d(i, j), 9);
        }
        out << '\n';
    }
}

DistanceMatrix read_distance_csv(std::istream& in, const std::string& source)
{
    CsvReader reader(in, source);
    std::vector<std::string> header;
    if (!reader.next(header) || header.empty() || header[0] != "unit_id") {
        reader.fail("expected header starting with 'unit_id'");
    }
    const std::size_t n = header.size() - 1;
    std::vector<UnitId> units;
    for (std::size_t j = 1; j < header.size(); ++j) {
        units.emplace_back(header[j]);
    }
    std::vector<double> values;
    values.reserve(n * n);
    std::vector<std::string> f;
    std::size_t row = 0;
    while (reader.next(f)) {
        if (row >= n || f.size() != n + 1 || f[0] != units[row].id) {
            reader.fail("row does not match header order");
        }
        for (std::size_t j = 1; j <= n; ++j) {
            values.push_back(reader.parse_double(f[j], "distance"));
        }
        ++row;
    }
    if (row != n) {
        reader.fail("expected " + std::to_string(n) + " rows");
    }
    return DistanceMatrix(std::move(units), std::move(values));
}

DistanceMatrix parse_distance_csv(const std::filesystem::path& path)
{
    auto in = open_input(path);
    return read_distance_csv(in, path.string());
}

} // namespace epizone
