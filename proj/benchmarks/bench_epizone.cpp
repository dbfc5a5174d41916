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
#include "epizone/geograph.h"
#include "epizone/zoner.h"

#include <benchmark/benchmark.h>

#include <cmath>
#include <cstdio>
#include <random>

namespace
{

using namespace epizone;

std::vector<double> random_walk(std::mt19937_64& rng, std::size_t length)
{
    // log-scale walk: R(t) stays positive
    std::normal_distribution<double> step(0.0, 0.05);
    std::vector<double> x(length);
    double v = 0.0;
    for (double& e : x) {
        v += step(rng);
        e = std::exp(v);
    }
    return x;
}

std::vector<RtSeries> random_trends(std::size_t units, std::size_t length)
{
    std::mt19937_64 rng(1);
    std::vector<RtSeries> out;
    for (std::size_t u = 0; u < units; ++u) {
        auto values = random_walk(rng, length);
        out.emplace_back(UnitId("u" + std::to_string(1000 + u)), Calendar(Date(2020, 2, 24), static_cast<int>(length)),
                         std::move(values), std::vector<bool>(length, true));
    }
    return out;
}

void BM_dtw_distance(benchmark::State& state)
{
    std::mt19937_64 rng(2);
    const auto length = static_cast<std::size_t>(state.range(0));
    const auto x = random_walk(rng, length);
    const auto y = random_walk(rng, length);
    DtwConfig cfg;
    for (auto _ : state) {
        benchmark::DoNotOptimize(dtw_distance(x, y, cfg));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(length * length));
}
BENCHMARK(BM_dtw_distance)->Arg(60)->Arg(120)->Arg(240);

void BM_dtw_distance_banded(benchmark::State& state)
{
    std::mt19937_64 rng(3);
    const auto x = random_walk(rng, 240);
    const auto y = random_walk(rng, 240);
    DtwConfig cfg;
    cfg.window = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(dtw_distance(x, y, cfg));
    }
}
BENCHMARK(BM_dtw_distance_banded)->Arg(7)->Arg(28);

void BM_distance_matrix(benchmark::State& state)
{
    const auto trends = random_trends(static_cast<std::size_t>(state.range(0)), 120);
    const int threads = static_cast<int>(state.range(1));
    for (auto _ : state) {
        benchmark::DoNotOptimize(distance_matrix(trends, {}, threads));
    }
}
BENCHMARK(BM_distance_matrix)->Args({101, 1})->Args({101, 4})->Unit(benchmark::kMillisecond);

/// Lattice units with a queen contiguity tree under random-walk DTW distances.
struct ZoningInput {
    DistanceMatrix d;
    SpanningTree tree;
};

ZoningInput zoning_input(int side)
{
    std::vector<UnitGeometry> geoms;
    for (int r = 0; r < side; ++r) {
        for (int c = 0; c < side; ++c) {
            char id[32];
            std::snprintf(id, sizeof(id), "r%03dc%03d", r, c);
            Ring ring{{double(c), double(r)}, {c + 1.0, double(r)}, {c + 1.0, r + 1.0}, {double(c), r + 1.0},
                      {double(c), double(r)}};
            MultiPolygon poly{PolygonPart{ring, {}}};
            geoms.push_back(UnitGeometry{UnitId(id), polygon_centroid(poly), poly});
        }
    }
    const auto trends = random_trends(geoms.size(), 60);
    std::vector<RtSeries> named;
    for (std::size_t i = 0; i < geoms.size(); ++i) {
        named.emplace_back(geoms[i].unit, trends[i].calendar(), trends[i].values(), trends[i].valid());
    }
    auto d = distance_matrix(named);
    auto tree = minimum_spanning_tree(build_contiguity(geoms), d);
    return {std::move(d), std::move(tree)};
}

void BM_skater_partition(benchmark::State& state)
{
    const auto input = zoning_input(static_cast<int>(state.range(0)));
    const int k = static_cast<int>(state.range(1));
    for (auto _ : state) {
        benchmark::DoNotOptimize(skater_partition(input.tree, input.d, k));
    }
}
BENCHMARK(BM_skater_partition)->Args({10, 4})->Args({25, 8})->Unit(benchmark::kMillisecond);

void BM_minimum_spanning_tree(benchmark::State& state)
{
    const auto input = zoning_input(25);
    std::vector<UnitGeometry> geoms;
    for (std::size_t i = 0; i < input.d.size(); ++i) {
        geoms.push_back(UnitGeometry{input.d.units()[i], Point{double(i % 25), double(i / 25)}, std::nullopt});
    }
    const auto graph = build_gabriel(geoms);
    for (auto _ : state) {
        benchmark::DoNotOptimize(minimum_spanning_tree(graph, input.d));
    }
}
BENCHMARK(BM_minimum_spanning_tree)->Unit(benchmark::kMicrosecond);

} // namespace

BENCHMARK_MAIN();
