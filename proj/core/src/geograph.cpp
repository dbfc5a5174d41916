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
#include "epizone/csv.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>

namespace epizone
{

namespace
{

class DisjointSets
{
public:
    explicit DisjointSets(std::size_t n)
        : m_parent(n)
    {
        std::iota(m_parent.begin(), m_parent.end(), std::size_t{0});
    }

    std::size_t find(std::size_t x)
    {
        while (m_parent[x] != x) {
            m_parent[x] = m_parent[m_parent[x]];
            x = m_parent[x];
        }
        return x;
    }

    bool unite(std::size_t a, std::size_t b)
    {
        a = find(a);
        b = find(b);
        if (a == b) {
            return false;
        }
        if (b < a) {
            std::swap(a, b);
        }
        m_parent[b] = a;
        return true;
    }

private:
    std::vector<std::size_t> m_parent;
};

std::vector<UnitId> unit_ids(const std::vector<UnitGeometry>& geoms)
{
    std::vector<UnitId> ids;
    ids.reserve(geoms.size());
    for (const auto& g : geoms) {
        ids.push_back(g.unit);
    }
    return ids;
}

struct Segment {
    Point a;
    Point b;
    BoundingBox box;
};

std::vector<Segment> boundary_segments(const MultiPolygon& polygon)
{
    std::vector<Segment> out;
    auto add_ring = [&](const Ring& ring) {
        for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
            Point a = ring[i];
            Point b = ring[i + 1];
            out.push_back(Segment{a, b,
                                  BoundingBox{std::min(a.x, b.x), std::min(a.y, b.y), std::max(a.x, b.x),
                                              std::max(a.y, b.y)}});
        }
    };
    for (const auto& part : polygon) {
        add_ring(part.outer);
        for (const auto& hole : part.holes) {
            add_ring(hole);
        }
    }
    return out;
}

} // namespace

const char* to_string(Provenance p)
{
    switch (p) {
    case Provenance::Contiguity:
        return "contiguity";
    case Provenance::Gabriel:
        return "gabriel";
    case Provenance::Knn:
        return "knn";
    case Provenance::Bridge:
        return "bridge";
    }
    return "unknown";
}

Provenance provenance_from_string(const std::string& s)
{
    for (auto p : {Provenance::Contiguity, Provenance::Gabriel, Provenance::Knn, Provenance::Bridge}) {
        if (s == to_string(p)) {
            return p;
        }
    }
    throw Error(ErrorCode::InvalidArgument, "unknown edge provenance '" + s + "'");
}

SpatialGraph::SpatialGraph(std::vector<UnitId> units)
    : m_units(std::move(units))
{
}

bool SpatialGraph::add_edge(std::size_t i, std::size_t j, Provenance provenance)
{
    if (i >= m_units.size() || j >= m_units.size()) {
        throw Error(ErrorCode::InvalidArgument, "edge endpoint out of range");
    }
    if (i == j) {
        return false;
    }
    Edge e{std::min(i, j), std::max(i, j), provenance};
    auto it = std::lower_bound(m_edges.begin(), m_edges.end(), e);
    if (it != m_edges.end() && *it == e) {
        return false;
    }
    m_edges.insert(it, e);
    return true;
}

bool SpatialGraph::has_edge(std::size_t i, std::size_t j) const
{
    Edge e{std::min(i, j), std::max(i, j)};
    return std::binary_search(m_edges.begin(), m_edges.end(), e);
}

std::vector<std::size_t> SpatialGraph::components(std::size_t* count) const
{
    DisjointSets sets(m_units.size());
    for (const auto& e : m_edges) {
        sets.unite(e.first, e.second);
    }
    std::vector<std::size_t> label(m_units.size());
    std::map<std::size_t, std::size_t> renumber;
    for (std::size_t i = 0; i < m_units.size(); ++i) {
        label[i] = renumber.try_emplace(sets.find(i), renumber.size()).first->second;
    }
    if (count) {
        *count = renumber.size();
    }
    return label;
}

SpatialGraph build_contiguity(const std::vector<UnitGeometry>& geoms, double tolerance)
{
    SpatialGraph graph(unit_ids(geoms));
    std::vector<std::vector<Segment>> segments;
    std::vector<BoundingBox> boxes;
    segments.reserve(geoms.size());
    for (const auto& g : geoms) {
        if (!g.polygon || g.polygon->empty()) {
            throw Error(ErrorCode::MissingPolygon, g.unit.id);
        }
        segments.push_back(boundary_segments(*g.polygon));
        boxes.push_back(bounding_box(*g.polygon));
    }
    for (std::size_t i = 0; i < geoms.size(); ++i) {
        for (std::size_t j = i + 1; j < geoms.size(); ++j) {
            if (!boxes[i].intersects(boxes[j], tolerance)) {
                continue;
            }
            std::vector<const Segment*> near_j;
            for (const auto& s : segments[j]) {
                if (s.box.intersects(boxes[i], tolerance)) {
                    near_j.push_back(&s);
                }
            }
            bool touching = false;
            for (const auto& s : segments[i]) {
                if (touching || !s.box.intersects(boxes[j], tolerance)) {
                    continue;
                }
                for (const Segment* t : near_j) {
                    if (s.box.intersects(t->box, tolerance) && segment_distance(s.a, s.b, t->a, t->b) <= tolerance) {
                        touching = true;
                        break;
                    }
                }
            }
            if (touching) {
                graph.add_edge(i, j, Provenance::Contiguity);
            }
        }
    }
    return graph;
}

SpatialGraph build_gabriel(const std::vector<UnitGeometry>& geoms)
{
    const std::size_t n = geoms.size();
    if (n < 2) {
        throw Error(ErrorCode::InvalidArgument, "Gabriel graph needs at least two units");
    }
    SpatialGraph graph(unit_ids(geoms));
    std::vector<std::size_t> by_x(n);
    std::iota(by_x.begin(), by_x.end(), std::size_t{0});
    std::sort(by_x.begin(), by_x.end(), [&](std::size_t a, std::size_t b) {
        return std::tie(geoms[a].centroid.x, geoms[a].centroid.y, a) < std::tie(geoms[b].centroid.x,
                                                                                  geoms[b].centroid.y, b);
    });
    for (std::size_t k = 1; k < n; ++k) {
        if (geoms[by_x[k]].centroid == geoms[by_x[k - 1]].centroid) {
            throw Error(ErrorCode::DuplicateCentroid,
                        geoms[by_x[k - 1]].unit.id + " and " + geoms[by_x[k]].unit.id);
        }
    }
    std::vector<double> xs(n);
    for (std::size_t k = 0; k < n; ++k) {
        xs[k] = geoms[by_x[k]].centroid.x;
    }

    for (std::size_t i = 0; i < n; ++i) {
        const Point a = geoms[i].centroid;
        for (std::size_t j = i + 1; j < n; ++j) {
            const Point b = geoms[j].centroid;
            const double cx = 0.5 * (a.x + b.x);
            const double radius = 0.5 * std::sqrt(squared_distance(a, b));
            // only centroids whose x lies within the disk's horizontal extent can block
            auto lo = std::lower_bound(xs.begin(), xs.end(), cx - radius);
            auto hi = std::upper_bound(xs.begin(), xs.end(), cx + radius);
            bool blocked = false;
            for (auto it = lo; it != hi && !blocked; ++it) {
                const std::size_t k = by_x[static_cast<std::size_t>(it - xs.begin())];
                if (k == i || k == j) {
                    continue;
                }
                const Point p = geoms[k].centroid;
                // angle apb is obtuse iff p lies strictly inside the diametral disk
                blocked = (a.x - p.x) * (b.x - p.x) + (a.y - p.y) * (b.y - p.y) < 0.0;
            }
            if (!blocked) {
                graph.add_edge(i, j, Provenance::Gabriel);
            }
        }
    }
    return graph;
}

SpatialGraph build_knn(const std::vector<UnitGeometry>& geoms, int k)
{
    if (k < 1) {
        throw Error(ErrorCode::InvalidArgument, "knn needs k >= 1");
    }
    SpatialGraph graph(unit_ids(geoms));
    const std::size_t n = geoms.size();
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < n; ++i) {
        order.clear();
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) {
                order.push_back(j);
            }
        }
        const std::size_t take = std::min(order.size(), static_cast<std::size_t>(k));
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                          [&](std::size_t a, std::size_t b) {
                              double da = squared_distance(geoms[i].centroid, geoms[a].centroid);
                              double db = squared_distance(geoms[i].centroid, geoms[b].centroid);
                              return std::tie(da, a) < std::tie(db, b);
                          });
        for (std::size_t t = 0; t < take; ++t) {
            graph.add_edge(i, order[t], Provenance::Knn);
        }
    }
    return graph;
}

SpatialGraph ensure_connected(SpatialGraph graph, const std::vector<UnitGeometry>& geoms)
{
    if (geoms.size() != graph.size()) {
        throw Error(ErrorCode::InvalidArgument, "geometries do not match graph units");
    }
    const std::size_t n = graph.size();
    for (;;) {
        std::size_t count = 0;
        auto comp = graph.components(&count);
        if (count <= 1) {
            return graph;
        }
        double best = std::numeric_limits<double>::infinity();
        std::size_t bi = 0;
        std::size_t bj = 0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                if (comp[i] == comp[j]) {
                    continue;
                }
                double d = squared_distance(geoms[i].centroid, geoms[j].centroid);
                if (d < best) {
                    best = d;
                    bi = i;
                    bj = j;
                }
            }
        }
        graph.add_edge(bi, bj, Provenance::Bridge);
    }
}

SpanningTree::SpanningTree(std::vector<UnitId> units, std::vector<TreeEdge> edges)
    : m_units(std::move(units))
    , m_edges(std::move(edges))
    , m_adjacency(m_units.size())
{
    const std::size_t n = m_units.size();
    if (n == 0 || m_edges.size() != n - 1) {
        throw Error(ErrorCode::Disconnected, "a spanning tree over " + std::to_string(n) + " units needs " +
                                                 std::to_string(n == 0 ? 0 : n - 1) + " edges, got " +
                                                 std::to_string(m_edges.size()));
    }
    DisjointSets sets(n);
    for (auto& e : m_edges) {
        if (e.first >= n || e.second >= n || e.first == e.second) {
            throw Error(ErrorCode::InvalidArgument, "tree edge endpoint out of range");
        }
        if (e.second < e.first) {
            std::swap(e.first, e.second);
        }
        if (!sets.unite(e.first, e.second)) {
            throw Error(ErrorCode::InvalidArgument, "tree edges contain a cycle");
        }
        m_adjacency[e.first].push_back(e.second);
        m_adjacency[e.second].push_back(e.first);
    }
    for (auto& adj : m_adjacency) {
        std::sort(adj.begin(), adj.end());
    }
}

double SpanningTree::total_weight() const
{
    double total = 0.0;
    for (const auto& e : m_edges) {
        total += e.weight;
    }
    return total;
}

SpanningTree minimum_spanning_tree(const SpatialGraph& graph, const DistanceMatrix& d)
{
    const std::size_t n = graph.size();
    if (d.size() != n) {
        throw Error(ErrorCode::InvalidArgument, "distance matrix does not match graph units");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!(d.units()[i] == graph.units()[i])) {
            throw Error(ErrorCode::InvalidArgument, "distance matrix and graph use different unit order");
        }
    }
    std::vector<Edge> edges = graph.edges();
    std::stable_sort(edges.begin(), edges.end(), [&](const Edge& a, const Edge& b) {
        double wa = d(a.first, a.second);
        double wb = d(b.first, b.second);
        return std::tie(wa, a.first, a.second) < std::tie(wb, b.first, b.second);
    });
    DisjointSets sets(n);
    std::vector<TreeEdge> tree;
    tree.reserve(n > 0 ? n - 1 : 0);
    for (const auto& e : edges) {
        if (sets.unite(e.first, e.second)) {
            tree.push_back(TreeEdge{e.first, e.second, d(e.first, e.second), e.provenance});
        }
    }
    if (n == 0 || tree.size() != n - 1) {
        throw Error(ErrorCode::Disconnected, "spatial graph is not connected");
    }
    return SpanningTree(graph.units(), std::move(tree));
}

void write_edge_csv(std::ostream& out, const SpatialGraph& graph, const DistanceMatrix& d)
{
    out << "src_id,dst_id,weight,provenance\n";
    for (const auto& e : graph.edges()) {
        out << csv_field(graph.units()[e.first].id) << ',' << csv_field(graph.units()[e.second].id) << ','
            << format_number(d(e.first, e.second), 9) << ',' << to_string(e.provenance) << '\n';
    }
}

void write_edge_csv(std::ostream& out, const SpanningTree& tree)
{
    out << "src_id,dst_id,weight,provenance\n";
    for (const auto& e : tree.edges()) {
        out << csv_field(tree.units()[e.first].id) << ',' << csv_field(tree.units()[e.second].id) << ','
            << format_number(e.weight, 9) << ',' << to_string(e.provenance) << '\n';
    }
}

std::vector<TreeEdge> read_edge_csv(std::istream& in, const std::vector<UnitId>& units, const std::string& source)
{
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < units.size(); ++i) {
        index.emplace(units[i].id, i);
    }
    CsvReader reader(in, source);
    reader.expect_header({"src_id", "dst_id", "weight", "provenance"});
    std::vector<TreeEdge> edges;
    std::vector<std::string> f;
    while (reader.next(f)) {
        if (f.size() != 4) {
            reader.fail("expected 4 fields");
        }
        auto a = index.find(f[0]);
        auto b = index.find(f[1]);
        if (a == index.end() || b == index.end()) {
            throw Error(ErrorCode::UnitMismatch, source + ":" + std::to_string(reader.line()) + ": unknown unit");
        }
        Provenance p;
        try {
            p = provenance_from_string(f[3]);
        }
        catch (const Error& e) {
            reader.fail(e.message());
        }
        edges.push_back(TreeEdge{std::min(a->second, b->second), std::max(a->second, b->second),
                                 reader.parse_double(f[2], "weight"), p});
    }
    return edges;
}

} // namespace epizone
