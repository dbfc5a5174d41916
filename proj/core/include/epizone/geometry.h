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
#ifndef EPIZONE_GEOMETRY_H
#define EPIZONE_GEOMETRY_H

#include <vector>

namespace epizone
{

/// Planar coordinates in meters (or any metric CRS unit).
struct Point {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Point&) const = default;
};

/// Closed ring: first point repeated as last.
using Ring = std::vector<Point>;

struct PolygonPart {
    Ring outer;
    std::vector<Ring> holes;
};

using MultiPolygon = std::vector<PolygonPart>;

struct BoundingBox {
    double min_x, min_y, max_x, max_y;

    bool intersects(const BoundingBox& other, double tol) const
    {
        return min_x <= other.max_x + tol && other.min_x <= max_x + tol && min_y <= other.max_y + tol &&
               other.min_y <= max_y + tol;
    }
};

double squared_distance(Point a, Point b);

/// Shoelace signed area; positive for counter-clockwise rings.
double signed_area(const Ring& ring);

/// Area-weighted centroid of the outer rings.
Point polygon_centroid(const MultiPolygon& polygon);

BoundingBox bounding_box(const MultiPolygon& polygon);

/// Closed, at least 3 distinct vertices, nonzero area, no two non-adjacent edges touch.
bool is_valid_ring(const Ring& ring);

/// Minimum distance between segments [a,b] and [c,d].
double segment_distance(Point a, Point b, Point c, Point d);

} // namespace epizone

#endif // EPIZONE_GEOMETRY_H
