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
#ifndef EPIZONE_ZONER_H
#define EPIZONE_ZONER_H

#include "epizone/dtw.h"
#include "epizone/geograph.h"

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace epizone
{

/**
 * Within-cluster heterogeneity of a set C with pairwise distance sum P:
 *  - SsdAnalogue:  P / |C|  (the pairwise form of the within-cluster sum of squares)
 *  - MeanPairwise: P / (|C|(|C|-1)/2), the average distance over pairs
 * Singletons cost 0 under both.
 */
enum class Objective
{
    SsdAnalogue,
    MeanPairwise,
};

const char* to_string(Objective o);
Objective objective_from_string(const std::string& s);

double cost_from_pair_sum(double pair_sum, std::size_t size, Objective objective);

/// Cost of the units in `cluster` (indices into d). Throws Error(EmptyCluster).
double cluster_cost(std::span<const std::size_t> cluster, const DistanceMatrix& d,
                    Objective objective = Objective::SsdAnalogue);

/// Mean pairwise distance over cluster ∪ {candidate}.
double admission_score(std::size_t candidate, std::span<const std::size_t> cluster, const DistanceMatrix& d);

/**
 * Frontier unit whose addition gives the lowest mean pairwise distance over
 * cluster ∪ {unit}; ties go to the lowest index. Throws Error(EmptyFrontier).
 */
std::size_t admission_test(std::span<const std::size_t> cluster, std::span<const std::size_t> frontier,
                           const DistanceMatrix& d);

struct Partition {
    std::vector<UnitId> units;
    /// Cluster label per unit, 1..k.
    std::vector<int> labels;
    int k = 0;
    Objective objective_kind = Objective::SsdAnalogue;
    double objective = 0.0;
    /// cost of cluster c + 1
    std::vector<double> cluster_costs;
    /// Tree edges cut to form the clusters, in removal order (empty for grown partitions).
    std::vector<std::pair<std::size_t, std::size_t>> removed_edges;

    std::vector<std::vector<std::size_t>> members() const;
};

/**
 * Greedy tree-edge removal. Each of the k-1 rounds cuts, over all current subtrees, the
 * edge with the largest gain cost(T) - cost(T1) - cost(T2) among edges leaving both sides
 * with at least `min_size` units. Ties go to the lexicographically smallest edge. Only
 * the two subtrees produced by the previous cut are re-evaluated; gains of the other
 * subtrees are reused.
 */
Partition skater_partition(const SpanningTree& tree, const DistanceMatrix& d, int k, int min_size = 2,
                           Objective objective = Objective::SsdAnalogue);

/**
 * Agglomerative growth from seeds: clusters take turns (in seed order) absorbing the
 * admission-test winner among unassigned tree neighbours until every unit is assigned.
 */
Partition grow_partition(const SpanningTree& tree, const DistanceMatrix& d, const std::vector<std::size_t>& seeds,
                         Objective objective = Objective::SsdAnalogue);

/**
 * Greedy farthest-point seeds: the most distant pair first (lowest index pair on ties),
 * then repeatedly the unit maximizing its minimum distance to the chosen seeds.
 * For k = 1 the first unit.
 */
std::vector<std::size_t> farthest_point_seeds(const DistanceMatrix& d, int k);

/// Labels from a CSV `unit_id,cluster` in the order of `units`.
std::vector<int> read_cluster_csv(std::istream& in, const std::vector<UnitId>& units,
                                  const std::string& source = "<stream>");
void write_cluster_csv(std::ostream& out, const Partition& p);

/// Every cluster induces a connected subgraph of the tree.
bool is_contiguous(const std::vector<int>& labels, const SpanningTree& tree);

/// Objective and per-cluster costs for a given labelling.
Partition make_partition(std::vector<UnitId> units, std::vector<int> labels, const DistanceMatrix& d,
                         Objective objective);

} // namespace epizone

#endif // EPIZONE_ZONER_H
