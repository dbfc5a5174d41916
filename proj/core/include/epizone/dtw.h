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
#ifndef EPIZONE_DTW_H
#define EPIZONE_DTW_H

#include "epizone/core.h"
#include "epizone/repro.h"

#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace epizone
{

enum class StepPattern
{
    Symmetric1, ///< D(i,j) = d(i,j) + min(D(i-1,j), D(i,j-1), D(i-1,j-1))
    Symmetric2, ///< diagonal steps weigh d(i,j) twice
};

const char* to_string(StepPattern p);
StepPattern step_pattern_from_string(const std::string& s);

struct DtwConfig {
    StepPattern step_pattern = StepPattern::Symmetric2;
    /// Sakoe-Chiba band half-width |i - j| <= window, none if unset.
    std::optional<int> window;
    /// Divide by n+m (symmetric2) or max(n, m) (symmetric1).
    bool normalize = true;
};

/// DTW distance with local cost |x_i - y_j|.
double dtw_distance(std::span<const double> x, std::span<const double> y, const DtwConfig& cfg = {});

/**
 * Gap-free trend for alignment: invalid leading and trailing days are trimmed, interior
 * invalid days are linearly interpolated. Throws Error(AllInvalid) if nothing is valid.
 */
std::vector<double> prepare_trend(const RtSeries& rt);

class DistanceMatrix
{
public:
    DistanceMatrix(std::vector<UnitId> units, std::vector<double> values);

    std::size_t size() const
    {
        return m_units.size();
    }
    const std::vector<UnitId>& units() const
    {
        return m_units;
    }
    double operator()(std::size_t i, std::size_t j) const
    {
        return m_values[i * m_units.size() + j];
    }
    const std::vector<double>& values() const
    {
        return m_values;
    }
    DistanceMatrix scaled(double factor) const;

private:
    std::vector<UnitId> m_units;
    std::vector<double> m_values;
};

/// Pairwise DTW over the prepared trends; trends must be in unit order.
DistanceMatrix distance_matrix(const std::vector<RtSeries>& trends, const DtwConfig& cfg = {}, int threads = 1);

/// Header row and column of unit ids, 9 significant digits.
void write_distance_csv(std::ostream& out, const DistanceMatrix& d);
DistanceMatrix read_distance_csv(std::istream& in, const std::string& source = "<stream>");
DistanceMatrix parse_distance_csv(const std::filesystem::path& path);

} // namespace epizone

#endif // EPIZONE_DTW_H
