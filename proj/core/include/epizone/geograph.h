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
#ifndef EPIZONE_GEOGRAPH_H
#define EPIZONE_GEOGRAPH_H

#include "epizone/core.h"
#include "epizone/dtw.h"

#include <compare>
#include <istream>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

namespace epizone
{

enum class Provenance
{
    Contiguity,
    Gabriel,
    Knn,
    Bridge,
};

const char* to_string(Provenance p);
Provenance provenance_from_string(const std::string& s);

/// Undirected edge between unit indices, always stored with first < second.
struct Edge {
    std::size_t first;
    std::size_t second;
    Provenance provenance = Provenance::Contiguity;

    auto operator<=>(const Edge& other) const
    {
        return std::tie(first, second) <=> std::tie(other.first, other.second);
    }
    bool operator==(const Edge& other) const
    {
        return first == other.first && second == other.second;
    }
};

/// Proximity graph over units in dataset order. Edges are kept sorted and unique.
class SpatialGraph
{
public:
    explicit SpatialGraph(std::vector<UnitId> units);

    /// Adds (i, j); returns false if the edge already exists or i == j.
    bool add_edge(std::size_t i, std::size_t j, Provenance provenance);
    bool has_edge(std::size_t i, std::size_t j) const;

    const std::vector<UnitId>& units() const
    {
        return m_units;
    }
    std::size_t size() const
    {
        return m_units.size();
    }
    const std::vector<Edge>& edges() const
    {
        return m_edges;
    }

    /// Component label per unit, labels numbered by lowest member index.
    std::vector<std::size_t> components(std::size_t* count = nullptr) const;

private:
    std::vector<UnitId> m_units;
    std::vector<Edge> m_edges;
};

/// Queen contiguity: units sharing at least one boundary point (within `tolerance`).
SpatialGraph build_contiguity(const std::vector<UnitGeometry>& geoms, double tolerance = 1e-6);

/// Gabriel graph on centroids: (i, j) iff no other centroid lies strictly inside the
/// disk with diameter ij.
SpatialGraph build_gabriel(const std::vector<UnitGeometry>& geoms);

/// Symmetric k-nearest-neighbour graph on centroids (ties by unit order).
SpatialGraph build_knn(const std::vector<UnitGeometry>& geoms, int k);

/**
 * Adds `bridge` edges until the graph is connected, each time joining the closest
 * centroid pair lying in different components (ties: lowest index pair).
 */
SpatialGraph ensure_connected(SpatialGraph graph, const std::vector<UnitGeometry>& geoms);

struct TreeEdge {
    std::size_t first;
    std::size_t second;
    double weight;
    Provenance provenance;
};

class SpanningTree
{
public:
    SpanningTree(std::vector<UnitId> units, std::vector<TreeEdge> edges);

    const std::vector<UnitId>& units() const
    {
        return m_units;
    }
    std::size_t size() const
    {
        return m_units.size();
    }
    const std::vector<TreeEdge>& edges() const
    {
        return m_edges;
    }
    double total_weight() const;

    /// Neighbour lists (indices into units) sorted ascending.
    const std::vector<std::vector<std::size_t>>& adjacency() const
    {
        return m_adjacency;
    }

private:
    std::vector<UnitId> m_units;
    std::vector<TreeEdge> m_edges;
    std::vector<std::vector<std::size_t>> m_adjacency;
};

/// Kruskal over the graph edges weighted by DTW distance; ties by (first, second).
SpanningTree minimum_spanning_tree(const SpatialGraph& graph, const DistanceMatrix& d);

/// `src_id,dst_id,weight,provenance`
void write_edge_csv(std::ostream& out, const SpatialGraph& graph, const DistanceMatrix& d);
void write_edge_csv(std::ostream& out, const SpanningTree& tree);

/// Reads an edge CSV; unit indices refer to `units` (usually the distance matrix order).
std::vector<TreeEdge> read_edge_csv(std::istream& in, const std::vector<UnitId>& units,
                                    const std::string& source = "<stream>");

} // namespace epizone

#endif // EPIZONE_GEOGRAPH_H
