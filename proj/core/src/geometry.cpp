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
#include "epizone/geometry.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace epizone
{

namespace
{

double cross(Point o, Point a, Point b)
{
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

int orientation(Point o, Point a, Point b)
{
    double c = cross(o, a, b);
    return (c > 0) - (c < 0);
}

bool on_segment(Point a, Point b, Point p)
{
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
           p.y <= std::max(a.y, b.y);
}

bool segments_intersect(Point a, Point b, Point c, Point d)
{
    int o1 = orientation(a, b, c);
    int o2 = orientation(a, b, d);
    int o3 = orientation(c, d, a);
    int o4 = orientation(c, d, b);
    if (o1 != o2 && o3 != o4) {
        return true;
    }
    return (o1 == 0 && on_segment(a, b, c)) || (o2 == 0 && on_segment(a, b, d)) ||
           (o3 == 0 && on_segment(c, d, a)) || (o4 == 0 && on_segment(c, d, b));
}

double point_segment_distance(Point p, Point a, Point b)
{
    double dx = b.x - a.x;
    double dy = b.y - a.y;
    double len2 = dx * dx + dy * dy;
    double t = len2 > 0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::sqrt(squared_distance(p, Point{a.x + t * dx, a.y + t * dy}));
}

Point ring_centroid(const Ring& ring, double area)
{
    double cx = 0.0;
    double cy = 0.0;
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
        double f = ring[i].x * ring[i + 1].y - ring[i + 1].x * ring[i].y;
        cx += (ring[i].x + ring[i + 1].x) * f;
        cy += (ring[i].y + ring[i + 1].y) * f;
    }
    return Point{cx / (6.0 * area), cy / (6.0 * area)};
}

} // namespace

double squared_distance(Point a, Point b)
{
    double dx = a.x - b.x;
    double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

double signed_area(const Ring& ring)
{
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
        sum += ring[i].x * ring[i + 1].y - ring[i + 1].x * ring[i].y;
    }
    return 0.5 * sum;
}

Point polygon_centroid(const MultiPolygon& polygon)
{
    double total = 0.0;
    double cx = 0.0;
    double cy = 0.0;
    for (const auto& part : polygon) {
        double area = signed_area(part.outer);
        if (area == 0.0) {
            continue;
        }
        Point c = ring_centroid(part.outer, area);
        cx += std::abs(area) * c.x;
        cy += std::abs(area) * c.y;
        total += std::abs(area);
    }
    if (total == 0.0) {
        return Point{std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
    }
    return Point{cx / total, cy / total};
}

BoundingBox bounding_box(const MultiPolygon& polygon)
{
    BoundingBox box{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                    -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const auto& part : polygon) {
        for (const auto& p : part.outer) {
            box.min_x = std::min(box.min_x, p.x);
            box.min_y = std::min(box.min_y, p.y);
            box.max_x = std::max(box.max_x, p.x);
            box.max_y = std::max(box.max_y, p.y);
        }
    }
    return box;
}

bool is_valid_ring(const Ring& ring)
{
    if (ring.size() < 4 || !(ring.front() == ring.back())) {
        return false;
    }
    for (const auto& p : ring) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
            return false;
        }
    }
    if (signed_area(ring) == 0.0) {
        return false;
    }
    const std::size_t edges = ring.size() - 1;
    for (std::size_t i = 0; i < edges; ++i) {
        for (std::size_t j = i + 1; j < edges; ++j) {
            bool adjacent = j == i + 1 || (i == 0 && j == edges - 1);
            if (adjacent) {
                // adjacent edges may only share their common vertex
                Point shared = j == i + 1 ? ring[j] : ring[0];
                Point other_i = j == i + 1 ? ring[i] : ring[1];
                Point other_j = j == i + 1 ? ring[j + 1] : ring[edges - 1];
                if (orientation(shared, other_i, other_j) == 0) {
                    double dot = (other_i.x - shared.x) * (other_j.x - shared.x) +
                                 (other_i.y - shared.y) * (other_j.y - shared.y);
                    if (dot > 0) {
                        return false; // spike folding back on itself
                    }
                }
                continue;
            }
            if (segments_intersect(ring[i], ring[i + 1], ring[j], ring[j + 1])) {
                return false;
            }
        }
    }
    return true;
}

double segment_distance(Point a, Point b, Point c, Point d)
{
    if (segments_intersect(a, b, c, d)) {
        return 0.0;
    }
    return std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d), point_segment_distance(c, a, b),
                     point_segment_distance(d, a, b)});
}

} // namespace epizone
