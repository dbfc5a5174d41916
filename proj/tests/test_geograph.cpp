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
#include "epizone/geograph.h"
#include "oracles.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace
{

using namespace epizone;

UnitGeometry square(const std::string& id, double x, double y, double size = 1.0)
{
    Ring r{{x, y}, {x + size, y}, {x + size, y + size}, {x, y + size}, {x, y}};
    MultiPolygon mp{PolygonPart{r, {}}};
    return UnitGeometry{UnitId(id), polygon_centroid(mp), mp};
}

UnitGeometry point(const std::string& id, double x, double y)
{
    return UnitGeometry{UnitId(id), Point{x, y}, std::nullopt};
}

std::vector<UnitId> ids(std::size_t n)
{
    std::vector<UnitId> out;
    for (std::size_t i = 0; i < n; ++i) {
        out.emplace_back("u" + std::to_string(100 + i));
    }
    return out;
}

std::vector<UnitGeometry> random_points(std::mt19937_64& rng, std::size_t n)
{
    std::uniform_real_distribution<double> coord(0.0, 100.0);
    std::vector<UnitGeometry> pts;
    for (std::size_t i = 0; i < n; ++i) {
        pts.push_back(point("u" + std::to_string(100 + i), coord(rng), coord(rng)));
    }
    return pts;
}

/// Distance matrix with the given off-diagonal entries (row-major upper triangle).
DistanceMatrix matrix(std::size_t n, const std::vector<double>& upper)
{
    std::vector<double> v(n * n, 0.0);
    std::size_t next = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            v[i * n + j] = v[j * n + i] = upper[next++];
        }
    }
    return DistanceMatrix(ids(n), v);
}

std::set<std::pair<std::size_t, std::size_t>> edge_set(const SpatialGraph& g)
{
    std::set<std::pair<std::size_t, std::size_t>> out;
    for (const auto& e : g.edges()) {
        out.emplace(e.first, e.second);
    }
    return out;
}

} // namespace

TEST(SpatialGraph, edges_are_normalized_and_unique)
{
    SpatialGraph g(ids(3));
    EXPECT_TRUE(g.add_edge(2, 0, Provenance::Gabriel));
    EXPECT_FALSE(g.add_edge(0, 2, Provenance::Gabriel));
    EXPECT_FALSE(g.add_edge(1, 1, Provenance::Gabriel));
    ASSERT_EQ(g.edges().size(), 1u);
    EXPECT_EQ(g.edges()[0].first, 0u);
    EXPECT_EQ(g.edges()[0].second, 2u);
    std::size_t count = 0;
    EXPECT_EQ(g.components(&count), (std::vector<std::size_t>{0, 1, 0}));
    EXPECT_EQ(count, 2u);
}

TEST(Contiguity, shared_edge_corner_and_disjoint)
{
    const auto edge = build_contiguity({square("a", 0, 0), square("b", 1, 0)});
    EXPECT_TRUE(edge.has_edge(0, 1));
    const auto corner = build_contiguity({square("a", 0, 0), square("b", 1, 1)});
    EXPECT_TRUE(corner.has_edge(0, 1));
    const auto apart = build_contiguity({square("a", 0, 0), square("b", 1.5, 0)});
    EXPECT_TRUE(apart.edges().empty());
}

TEST(Contiguity, lattice_has_queen_neighbours)
{
    std::vector<UnitGeometry> cells;
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            cells.push_back(square("c" + std::to_string(r * 3 + c), c, r));
        }
    }
    const auto g = build_contiguity(cells);
    // 12 rook pairs plus 8 diagonal pairs
    EXPECT_EQ(g.edges().size(), 20u);
    EXPECT_TRUE(g.has_edge(0, 4));
    EXPECT_FALSE(g.has_edge(0, 2));
    for (const auto& e : g.edges()) {
        EXPECT_EQ(e.provenance, Provenance::Contiguity);
    }
}

TEST(Contiguity, requires_polygons)
{
    EXPECT_THROW(build_contiguity({square("a", 0, 0), point("b", 1, 1)}), Error);
}

TEST(Gabriel, collinear_points_skip_the_long_edge)
{
    const auto g = build_gabriel({point("a", 0, 0), point("b", 1, 0), point("c", 2, 0)});
    EXPECT_EQ(edge_set(g), (std::set<std::pair<std::size_t, std::size_t>>{{0, 1}, {1, 2}}));
}

TEST(Gabriel, point_on_the_circle_keeps_the_edge)
{
    // c lies exactly on the circle with diameter ab
    const auto g = build_gabriel({point("a", -1, 0), point("b", 1, 0), point("c", 0, 1)});
    EXPECT_TRUE(g.has_edge(0, 1));
    EXPECT_TRUE(g.has_edge(0, 2));
    EXPECT_TRUE(g.has_edge(1, 2));
}

TEST(Gabriel, random_sets_match_brute_force_and_contain_the_mst)
{
    std::mt19937_64 rng(10);
    for (int trial = 0; trial < 50; ++trial) {
        const auto geoms = random_points(rng, 2 + static_cast<std::size_t>(trial % 11));
        std::vector<Point> pts;
        for (const auto& g : geoms) {
            pts.push_back(g.centroid);
        }
        const auto g = build_gabriel(geoms);
        const auto expected = oracle::gabriel_brute_force(pts);
        const std::set<std::pair<std::size_t, std::size_t>> oracle_edges(expected.begin(), expected.end());
        EXPECT_EQ(edge_set(g), oracle_edges);
        for (const auto& e : oracle::euclidean_mst(pts)) {
            EXPECT_TRUE(g.has_edge(e.first, e.second));
        }
    }
}

TEST(Knn, symmetric_neighbours)
{
    const auto g = build_knn({point("a", 0, 0), point("b", 1, 0), point("c", 5, 0), point("d", 5.5, 0)}, 1);
    EXPECT_EQ(edge_set(g), (std::set<std::pair<std::size_t, std::size_t>>{{0, 1}, {2, 3}}));
    EXPECT_THROW(build_knn({point("a", 0, 0)}, 0), Error);
}

TEST(EnsureConnected, bridges_the_closest_pair)
{
    const std::vector<UnitGeometry> geoms{point("a", 0, 0), point("b", 1, 0), point("c", 3, 0)};
    SpatialGraph g(ids(3));
    g.add_edge(0, 1, Provenance::Gabriel);
    const auto connected = ensure_connected(g, geoms);
    ASSERT_EQ(connected.edges().size(), 2u);
    EXPECT_TRUE(connected.has_edge(1, 2));
    EXPECT_EQ(connected.edges()[1].provenance, Provenance::Bridge);
}

TEST(EnsureConnected, adds_components_minus_one_edges)
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        const auto geoms = random_points(rng, 12);
        SpatialGraph g(ids(12));
        std::uniform_int_distribution<std::size_t> pick(0, 11);
        for (int e = 0; e < trial % 8; ++e) {
            g.add_edge(pick(rng), pick(rng), Provenance::Knn);
        }
        std::size_t before = 0;
        g.components(&before);
        const auto connected = ensure_connected(g, geoms);
        std::size_t after = 0;
        connected.components(&after);
        EXPECT_EQ(after, 1u);
        EXPECT_EQ(connected.edges().size() - g.edges().size(), before - 1);
        const auto bridges = std::count_if(connected.edges().begin(), connected.edges().end(),
                                           [](const Edge& e) { return e.provenance == Provenance::Bridge; });
        EXPECT_EQ(static_cast<std::size_t>(bridges), before - 1);
    }
}

TEST(MinimumSpanningTree, triangle)
{
    SpatialGraph g(ids(3));
    g.add_edge(0, 1, Provenance::Gabriel);
    g.add_edge(1, 2, Provenance::Gabriel);
    g.add_edge(0, 2, Provenance::Gabriel);
    const auto tree = minimum_spanning_tree(g, matrix(3, {1, 3, 2}));
    EXPECT_EQ(tree.edges().size(), 2u);
    EXPECT_EQ(tree.total_weight(), 3.0);
    EXPECT_EQ(tree.adjacency()[1], (std::vector<std::size_t>{0, 2}));
}

TEST(MinimumSpanningTree, tree_input_is_returned_whole)
{
    SpatialGraph g(ids(4));
    g.add_edge(0, 1, Provenance::Contiguity);
    g.add_edge(1, 2, Provenance::Contiguity);
    g.add_edge(2, 3, Provenance::Bridge);
    const auto tree = minimum_spanning_tree(g, matrix(4, {5, 1, 1, 7, 1, 9}));
    EXPECT_EQ(tree.edges().size(), 3u);
    EXPECT_EQ(tree.total_weight(), 5.0 + 7.0 + 9.0);
    EXPECT_EQ(tree.edges().back().provenance, Provenance::Bridge);
}

TEST(MinimumSpanningTree, ties_prefer_the_smallest_edge)
{
    SpatialGraph g(ids(3));
    g.add_edge(0, 1, Provenance::Gabriel);
    g.add_edge(1, 2, Provenance::Gabriel);
    g.add_edge(0, 2, Provenance::Gabriel);
    const auto tree = minimum_spanning_tree(g, matrix(3, {1, 1, 1}));
    ASSERT_EQ(tree.edges().size(), 2u);
    std::set<std::pair<std::size_t, std::size_t>> chosen;
    for (const auto& e : tree.edges()) {
        chosen.emplace(e.first, e.second);
    }
    EXPECT_EQ(chosen, (std::set<std::pair<std::size_t, std::size_t>>{{0, 1}, {0, 2}}));
}

TEST(MinimumSpanningTree, disconnected_graph_is_rejected)
{
    SpatialGraph g(ids(3));
    g.add_edge(0, 1, Provenance::Gabriel);
    try {
        minimum_spanning_tree(g, matrix(3, {1, 1, 1}));
        ADD_FAILURE();
    }
    catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Disconnected);
    }
}

TEST(MinimumSpanningTree, random_graphs_match_exhaustive_search)
{
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> w(0.0, 10.0);
    std::bernoulli_distribution keep(0.6);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 6);
        std::vector<double> upper(n * (n - 1) / 2);
        for (double& v : upper) {
            v = trial % 3 == 0 ? std::floor(w(rng) / 4.0) : w(rng); // every third trial has ties
        }
        const auto d = matrix(n, upper);
        SpatialGraph g(ids(n));
        std::vector<oracle::WeightedEdge> edges;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                if (keep(rng) || j == i + 1) {
                    g.add_edge(i, j, Provenance::Gabriel);
                    edges.push_back({i, j, d(i, j)});
                }
            }
        }
        const auto tree = minimum_spanning_tree(g, d);
        const auto best = oracle::min_spanning_tree_exhaustive(n, edges);
        ASSERT_TRUE(best.has_value());
        EXPECT_NEAR(tree.total_weight(), *best, 1e-12);

        // spanning tree: n - 1 graph edges, connected
        ASSERT_EQ(tree.edges().size(), n - 1);
        SpatialGraph as_graph(ids(n));
        for (const auto& e : tree.edges()) {
            EXPECT_TRUE(g.has_edge(e.first, e.second));
            EXPECT_EQ(e.weight, d(e.first, e.second));
            as_graph.add_edge(e.first, e.second, e.provenance);
        }
        std::size_t count = 0;
        as_graph.components(&count);
        EXPECT_EQ(count, 1u);

        // cut property: each tree edge is a lightest edge across the cut it defines
        for (std::size_t cut = 0; cut < tree.edges().size(); ++cut) {
            std::vector<std::pair<std::size_t, std::size_t>> tree_pairs;
            for (const auto& e : tree.edges()) {
                tree_pairs.emplace_back(e.first, e.second);
            }
            const auto side = oracle::components_without(n, tree_pairs, {cut});
            for (const auto& e : edges) {
                if (side[e.a] != side[e.b]) {
                    EXPECT_LE(tree.edges()[cut].weight, e.w);
                }
            }
        }
    }
}

TEST(EdgeCsv, tree_round_trip)
{
    SpatialGraph g(ids(3));
    g.add_edge(0, 1, Provenance::Contiguity);
    g.add_edge(1, 2, Provenance::Bridge);
    const auto d = matrix(3, {0.5, 2, 1.25});
    const auto tree = minimum_spanning_tree(g, d);
    std::ostringstream out;
    write_edge_csv(out, tree);
    EXPECT_EQ(out.str(), "src_id,dst_id,weight,provenance\nu100,u101,0.5,contiguity\nu101,u102,1.25,bridge\n");
    std::istringstream in(out.str());
    const auto edges = read_edge_csv(in, ids(3));
    ASSERT_EQ(edges.size(), 2u);
    EXPECT_EQ(edges[1].provenance, Provenance::Bridge);
    EXPECT_EQ(edges[1].weight, 1.25);
}
