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
#ifndef EPIZONE_SYNTH_H
#define EPIZONE_SYNTH_H

#include "epizone/core.h"
#include "epizone/repro.h"
#include "epizone/zoner.h"

#include <cstdint>
#include <istream>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace epizone
{

/// Piecewise-constant reproduction number: `value` from day `from` until the next segment.
struct ProfileSegment {
    int from = 0;
    double value = 1.0;
};

class RProfile
{
public:
    RProfile() = default;
    /// Segments must start at day 0, be strictly increasing and carry R >= 0.
    explicit RProfile(std::vector<ProfileSegment> segments);

    static RProfile constant(double value)
    {
        return RProfile({ProfileSegment{0, value}});
    }

    double at(int day) const;
    std::vector<double> expand(int days) const;
    const std::vector<ProfileSegment>& segments() const
    {
        return m_segments;
    }

private:
    std::vector<ProfileSegment> m_segments;
};

enum class SimulationMode
{
    Poisson,
    Deterministic, ///< N_t = λ_t
};

/**
 * Renewal process N_0 = I0, N_t ~ Poisson(λ_t) with
 * λ_t = R(t) Σ_{τ=1..min(t,L)} N_{t-τ} w(τ). `profile` holds R(t) for t = 0..T-1.
 */
std::vector<double> simulate_renewal(const std::vector<double>& profile, const SerialInterval& si, double initial,
                                     int days, std::mt19937_64& rng, SimulationMode mode = SimulationMode::Poisson);

/// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed of the random substream of one lattice cell: splitmix64(splitmix64(seed) ^ cell).
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t cell);

/**
 * Lattice of unit squares; cell (r, c) covers [c, c+1] x [r, r+1] and has row-major index
 * r * cols + c. Region label 0 marks an absent cell (no unit).
 */
struct Scenario {
    int rows = 0;
    int cols = 0;
    std::vector<int> regions;              ///< row-major region label per cell
    std::map<int, RProfile> profiles;      ///< per region label
    std::vector<double> initial_cases;     ///< one value for all cells, or one per cell
    int days = 0;
    std::uint64_t seed = 0;
    SimulationMode mode = SimulationMode::Poisson;
    std::string start_date = "2020-02-24";
    SerialIntervalParams serial_interval;

    double initial_at(std::size_t cell) const
    {
        return initial_cases.size() == 1 ? initial_cases.front() : initial_cases[cell];
    }
    std::string cell_id(int row, int col) const;
};

/// Reads the scenario JSON document described in the README.
Scenario read_scenario(std::istream& in, const std::string& source = "<stream>");
Scenario parse_scenario(const std::filesystem::path& path);

struct SyntheticDataset {
    std::vector<IncidenceSeries> series;
    std::vector<UnitGeometry> geometries;
    Partition truth;
};

/// Simulates every present cell with its region profile; the truth partition numbers
/// regions by first appearance in unit order.
SyntheticDataset make_scenario(const Scenario& scenario, const SerialInterval& si);

/**
 * Adjusted Rand index between two labellings of the same units, from the pair-counting
 * contingency table. When both partitions make the expected and maximum index equal
 * (e.g. both trivial) the result is 1 for identical partitions and 0 otherwise.
 */
double adjusted_rand_index(const Partition& p, const Partition& truth);
double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b);

} // namespace epizone

#endif // EPIZONE_SYNTH_H
