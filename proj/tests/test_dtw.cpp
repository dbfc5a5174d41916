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
#include "oracles.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

namespace
{

using namespace epizone;

DtwConfig raw(StepPattern p)
{
    DtwConfig cfg;
    cfg.step_pattern = p;
    cfg.normalize = false;
    return cfg;
}

std::vector<double> random_series(std::mt19937_64& rng, std::size_t max_len)
{
    std::uniform_int_distribution<std::size_t> len(1, max_len);
    std::uniform_real_distribution<double> v(-2.0, 3.0);
    std::vector<double> x(len(rng));
    for (double& e : x) {
        e = v(rng);
    }
    return x;
}

RtSeries trend(const std::string& id, std::vector<double> values, std::vector<bool> valid = {})
{
    if (valid.empty()) {
        valid.assign(values.size(), true);
    }
    for (std::size_t t = 0; t < values.size(); ++t) {
        if (!valid[t]) {
            values[t] = std::nan("");
        }
    }
    const int length = static_cast<int>(values.size());
    return RtSeries(UnitId(id), Calendar(Date::parse("2020-02-24"), length), std::move(values), std::move(valid));
}

} // namespace

TEST(DtwDistance, identical_series_are_zero)
{
    const std::vector<double> x{0.3, 1.2, 2.5, 2.0};
    for (auto p : {StepPattern::Symmetric1, StepPattern::Symmetric2}) {
        for (bool norm : {true, false}) {
            DtwConfig cfg{p, std::nullopt, norm};
            EXPECT_EQ(dtw_distance(x, x, cfg), 0.0);
            cfg.window = 0;
            EXPECT_EQ(dtw_distance(x, x, cfg), 0.0);
        }
    }
}

TEST(DtwDistance, single_cell)
{
    EXPECT_EQ(dtw_distance(std::vector<double>{0}, std::vector<double>{5}, raw(StepPattern::Symmetric1)), 5.0);
    EXPECT_EQ(dtw_distance(std::vector<double>{0}, std::vector<double>{5}, raw(StepPattern::Symmetric2)), 10.0);
    EXPECT_EQ(dtw_distance(std::vector<double>{0}, std::vector<double>{5}), 5.0); // 10 / (1 + 1)
}

TEST(DtwDistance, small_case_matches_path_enumeration)
{
    const std::vector<double> x{0, 0, 1};
    const std::vector<double> y{0, 1};
    EXPECT_EQ(oracle::count_paths(3, 2), 5);
    EXPECT_EQ(dtw_distance(x, y, raw(StepPattern::Symmetric1)), oracle::dtw_paths(x, y, StepPattern::Symmetric1));
    EXPECT_EQ(dtw_distance(x, y, raw(StepPattern::Symmetric1)), 0.0);
    EXPECT_EQ(dtw_distance(x, y, raw(StepPattern::Symmetric2)), oracle::dtw_paths(x, y, StepPattern::Symmetric2));
}

TEST(DtwDistance, random_pairs_match_path_enumeration)
{
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 100; ++trial) {
        const auto x = random_series(rng, 6);
        const auto y = random_series(rng, 6);
        for (auto p : {StepPattern::Symmetric1, StepPattern::Symmetric2}) {
            const double expected = oracle::dtw_paths(x, y, p);
            EXPECT_NEAR(dtw_distance(x, y, raw(p)), expected, 1e-12 * std::max(1.0, expected));
        }
    }
}

TEST(DtwDistance, symmetric1_equals_dijkstra_on_lattice)
{
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 100; ++trial) {
        const auto x = random_series(rng, 8);
        const auto y = random_series(rng, 8);
        const double expected = oracle::dtw_dijkstra(x, y);
        EXPECT_NEAR(dtw_distance(x, y, raw(StepPattern::Symmetric1)), expected, 1e-12 * std::max(1.0, expected));
    }
}

TEST(DtwDistance, normalization)
{
    const std::vector<double> x{0, 1, 2};
    const std::vector<double> y{1, 1, 1, 4, 0};
    EXPECT_DOUBLE_EQ(dtw_distance(x, y, DtwConfig{StepPattern::Symmetric2, std::nullopt, true}),
                     dtw_distance(x, y, raw(StepPattern::Symmetric2)) / 8.0);
    EXPECT_DOUBLE_EQ(dtw_distance(x, y, DtwConfig{StepPattern::Symmetric1, std::nullopt, true}),
                     dtw_distance(x, y, raw(StepPattern::Symmetric1)) / 5.0);
}

TEST(DtwDistance, symmetry_nonnegativity_and_band_monotonicity)
{
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        const auto x = random_series(rng, 9);
        const auto y = random_series(rng, 9);
        for (auto p : {StepPattern::Symmetric1, StepPattern::Symmetric2}) {
            const DtwConfig cfg = raw(p);
            const double d = dtw_distance(x, y, cfg);
            EXPECT_EQ(d, dtw_distance(y, x, cfg));
            EXPECT_GE(d, 0.0);
            const int gap = std::abs(static_cast<int>(x.size()) - static_cast<int>(y.size()));
            double previous = std::numeric_limits<double>::infinity();
            for (int w = gap; w <= 9; ++w) {
                DtwConfig banded = cfg;
                banded.window = w;
                const double b = dtw_distance(x, y, banded);
                EXPECT_LE(b, previous);
                EXPECT_GE(b, d);
                previous = b;
            }
            EXPECT_EQ(previous, d);
        }
    }
}

TEST(DtwDistance, errors)
{
    const std::vector<double> empty;
    const std::vector<double> x{1, 2, 3, 4};
    try {
        dtw_distance(empty, x);
        ADD_FAILURE();
    }
    catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptySeries);
    }
    DtwConfig cfg;
    cfg.window = 1;
    try {
        dtw_distance(x, std::vector<double>{1}, cfg);
        ADD_FAILURE();
    }
    catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InfeasibleWindow);
    }
}

TEST(StepPattern, names)
{
    EXPECT_EQ(step_pattern_from_string("symmetric1"), StepPattern::Symmetric1);
    EXPECT_EQ(step_pattern_from_string(to_string(StepPattern::Symmetric2)), StepPattern::Symmetric2);
    EXPECT_THROW(step_pattern_from_string("asymmetric"), Error);
}

TEST(PrepareTrend, trims_and_interpolates)
{
    const auto t = prepare_trend(trend("a", {9, 1, 0, 0, 4, 5, 9}, {false, true, false, false, true, true, false}));
    EXPECT_EQ(t, (std::vector<double>{1, 2, 3, 4, 5}));
    try {
        prepare_trend(trend("a", {1, 2}, {false, false}));
        ADD_FAILURE();
    }
    catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::AllInvalid);
    }
}

TEST(DistanceMatrix, identical_trends_give_zero_matrix)
{
    const std::vector<RtSeries> trends{trend("a", {1, 2, 3}), trend("b", {1, 2, 3}), trend("c", {1, 2, 3})};
    const auto d = distance_matrix(trends);
    for (double v : d.values()) {
        EXPECT_EQ(v, 0.0);
    }
}

TEST(DistanceMatrix, random_trends_match_oracle_and_are_symmetric)
{
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> v(0.2, 3.0);
    std::vector<RtSeries> trends;
    std::vector<std::vector<double>> raw_values;
    for (const char* id : {"a", "b", "c", "d"}) {
        std::vector<double> x(5);
        for (double& e : x) {
            e = v(rng);
        }
        raw_values.push_back(x);
        trends.push_back(trend(id, x));
    }
    for (int threads : {1, 3}) {
        const auto d = distance_matrix(trends, raw(StepPattern::Symmetric2), threads);
        for (std::size_t i = 0; i < 4; ++i) {
            EXPECT_EQ(d(i, i), 0.0);
            for (std::size_t j = 0; j < 4; ++j) {
                EXPECT_EQ(d(i, j), d(j, i));
                if (i != j) {
                    EXPECT_NEAR(d(i, j), oracle::dtw_paths(raw_values[i], raw_values[j], StepPattern::Symmetric2),
                                1e-12);
                }
            }
        }
    }
}

TEST(DistanceMatrix, thread_count_does_not_change_bytes)
{
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> v(0.2, 3.0);
    std::vector<RtSeries> trends;
    for (int u = 0; u < 25; ++u) {
        std::vector<double> x(40);
        for (double& e : x) {
            e = v(rng);
        }
        trends.push_back(trend("u" + std::to_string(u + 10), x));
    }
    EXPECT_EQ(distance_matrix(trends, {}, 1).values(), distance_matrix(trends, {}, 4).values());
}

TEST(DistanceMatrix, all_invalid_unit)
{
    const std::vector<RtSeries> trends{trend("a", {1, 2}), trend("b", {1, 2}, {false, false})};
    try {
        distance_matrix(trends);
        ADD_FAILURE();
    }
    catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::AllInvalid);
    }
}

TEST(DistanceMatrix, validates_contents)
{
    std::vector<UnitId> units{UnitId("a"), UnitId("b")};
    EXPECT_THROW(DistanceMatrix(units, {0, 1, 2, 0}), Error);
    EXPECT_THROW(DistanceMatrix(units, {1, 1, 1, 0}), Error);
    EXPECT_THROW(DistanceMatrix(units, {0, -1, -1, 0}), Error);
    EXPECT_THROW(DistanceMatrix(units, {0, 1, 1}), Error);
    EXPECT_NO_THROW(DistanceMatrix(units, {0, 1, 1, 0}));
}

TEST(DistanceMatrix, csv_round_trip)
{
    const DistanceMatrix d({UnitId("a"), UnitId("b,c"), UnitId("d")}, {0, 1.5, 2.123456789123, 1.5, 0, 0.25,
                                                                        2.123456789123, 0.25, 0});
    std::ostringstream out;
    write_distance_csv(out, d);
    EXPECT_NE(out.str().find("2.12345679"), std::string::npos) << out.str();
    std::istringstream in(out.str());
    const auto back = read_distance_csv(in);
    ASSERT_EQ(back.size(), 3u);
    EXPECT_EQ(back.units()[1].id, "b,c");
    EXPECT_EQ(back(0, 1), 1.5);
    EXPECT_NEAR(back(0, 2), 2.123456789123, 1e-8);
}
