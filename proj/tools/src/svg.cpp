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
#include "epizone_cli/app.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace epizone::cli
{

namespace
{

constexpr double canvas_width = 800.0;
constexpr double margin = 20.0;
constexpr double legend_width = 140.0;

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    std::string s = buf;
    return s == "-0.00" ? "0.00" : s;
}

std::string xml_escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&':
            out += "&amp;";
            break;
        case '<':
            out += "&lt;";
            break;
        case '>':
            out += "&gt;";
            break;
        case '"':
            out += "&quot;";
            break;
        default:
            out += c;
        }
    }
    return out;
}

const std::string& color_of(int label)
{
    const auto& palette = cluster_palette();
    return palette[static_cast<std::size_t>(label - 1) % palette.size()];
}

void write_legend(std::ostringstream& out, int k, double x, double y)
{
    for (int c = 1; c <= k; ++c) {
        const double row = y + 20.0 * (c - 1);
        out << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(row) << "\" width=\"14\" height=\"14\" fill=\""
            << color_of(c) << "\" stroke=\"#333333\" stroke-width=\"0.5\"/>\n";
        out << "<text x=\"" << fmt(x + 20) << "\" y=\"" << fmt(row + 11) << "\" font-family=\"sans-serif\" "
            << "font-size=\"12\">cluster " << c << "</text>\n";
    }
}

} // namespace

const std::vector<std::string>& cluster_palette()
{
    static const std::vector<std::string> palette{"#a6cee3", "#1f78b4", "#b2df8a", "#33a02c",
                                                  "#fb9a99", "#e31a1c", "#fdbf6f", "#ff7f00",
                                                  "#cab2d6", "#6a3d9a", "#ffff99", "#b15928"};
    return palette;
}

std::string render_map_svg(const std::vector<UnitGeometry>& geoms, const Partition& partition,
                           const SpanningTree* tree)
{
    BoundingBox box{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                    -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    auto extend = [&box](const Point& p) {
        box.min_x = std::min(box.min_x, p.x);
        box.min_y = std::min(box.min_y, p.y);
        box.max_x = std::max(box.max_x, p.x);
        box.max_y = std::max(box.max_y, p.y);
    };
    for (const auto& g : geoms) {
        extend(g.centroid);
        if (g.polygon) {
            for (const auto& part : *g.polygon) {
                for (const auto& p : part.outer) {
                    extend(p);
                }
            }
        }
    }
    const double span_x = std::max(box.max_x - box.min_x, 1e-12);
    const double span_y = std::max(box.max_y - box.min_y, 1e-12);
    const double draw_w = canvas_width - 2 * margin - legend_width;
    const double scale = std::min(draw_w / span_x, draw_w / span_y);
    const double height = std::max(span_y * scale + 2 * margin, 20.0 * partition.k + 2 * margin);
    // north up: larger y is drawn higher
    auto sx = [&](double x) {
        return margin + (x - box.min_x) * scale;
    };
    auto sy = [&](double y) {
        return margin + (box.max_y - y) * scale;
    };

    std::map<std::string, int> label_of;
    for (std::size_t i = 0; i < partition.units.size(); ++i) {
        label_of.emplace(partition.units[i].id, partition.labels[i]);
    }

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(canvas_width) << "\" height=\"" << fmt(height)
        << "\" viewBox=\"0 0 " << fmt(canvas_width) << ' ' << fmt(height) << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    for (const auto& g : geoms) {
        auto it = label_of.find(g.unit.id);
        const std::string fill = it == label_of.end() ? "#dddddd" : color_of(it->second);
        if (g.polygon) {
            out << "<path fill=\"" << fill << "\" stroke=\"#333333\" stroke-width=\"0.5\" fill-rule=\"evenodd\" d=\"";
            for (const auto& part : *g.polygon) {
                auto ring_path = [&](const Ring& ring) {
                    for (std::size_t p = 0; p + 1 < ring.size(); ++p) {
                        out << (p == 0 ? 'M' : 'L') << fmt(sx(ring[p].x)) << ',' << fmt(sy(ring[p].y));
                    }
                    out << 'Z';
                };
                ring_path(part.outer);
                for (const auto& hole : part.holes) {
                    ring_path(hole);
                }
            }
            out << "\"><title>" << xml_escape(g.unit.id) << "</title></path>\n";
        }
        else {
            out << "<circle cx=\"" << fmt(sx(g.centroid.x)) << "\" cy=\"" << fmt(sy(g.centroid.y))
                << "\" r=\"5\" fill=\"" << fill << "\" stroke=\"#333333\" stroke-width=\"0.5\"><title>"
                << xml_escape(g.unit.id) << "</title></circle>\n";
        }
    }
    if (tree) {
        std::map<std::string, const UnitGeometry*> by_id;
        for (const auto& g : geoms) {
            by_id.emplace(g.unit.id, &g);
        }
        out << "<g stroke=\"#555555\" stroke-width=\"0.7\" stroke-opacity=\"0.6\">\n";
        for (const auto& e : tree->edges()) {
            auto a = by_id.find(tree->units()[e.first].id);
            auto b = by_id.find(tree->units()[e.second].id);
            if (a == by_id.end() || b == by_id.end()) {
                continue;
            }
            out << "<line x1=\"" << fmt(sx(a->second->centroid.x)) << "\" y1=\"" << fmt(sy(a->second->centroid.y))
                << "\" x2=\"" << fmt(sx(b->second->centroid.x)) << "\" y2=\"" << fmt(sy(b->second->centroid.y))
                << "\"/>\n";
        }
        out << "</g>\n";
    }
    write_legend(out, partition.k, canvas_width - legend_width + margin, margin);
    out << "</svg>\n";
    return out.str();
}

std::string render_trends_svg(const std::vector<RtSeries>& rt, const Partition& partition)
{
    constexpr double plot_h = 400.0;
    constexpr double left = 50.0;
    constexpr double top = 20.0;
    const double plot_w = canvas_width - left - legend_width - margin;
    const std::size_t days = rt.empty() ? 0 : rt.front().size();

    std::map<std::string, const RtSeries*> by_id;
    for (const auto& r : rt) {
        by_id.emplace(r.unit().id, &r);
    }
    // per-cluster mean over the members valid on each day
    const auto members = partition.members();
    std::vector<std::vector<double>> mean(members.size(), std::vector<double>(days, std::nan("")));
    double y_max = 1.0;
    for (std::size_t c = 0; c < members.size(); ++c) {
        for (std::size_t t = 0; t < days; ++t) {
            double sum = 0.0;
            int count = 0;
            for (std::size_t i : members[c]) {
                auto it = by_id.find(partition.units[i].id);
                if (it != by_id.end() && t < it->second->size() && it->second->valid()[t]) {
                    sum += it->second->values()[t];
                    ++count;
                }
            }
            if (count > 0) {
                mean[c][t] = sum / count;
                y_max = std::max(y_max, mean[c][t]);
            }
        }
    }
    y_max = std::ceil(y_max * 2.0) / 2.0;
    auto px = [&](double t) {
        return left + (days > 1 ? t / static_cast<double>(days - 1) : 0.0) * plot_w;
    };
    auto py = [&](double v) {
        return top + plot_h * (1.0 - v / y_max);
    };

    std::ostringstream out;
    const double height = top + plot_h + 50.0;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(canvas_width) << "\" height=\"" << fmt(height)
        << "\" viewBox=\"0 0 " << fmt(canvas_width) << ' ' << fmt(height) << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    out << "<g font-family=\"sans-serif\" font-size=\"11\" stroke=\"#000000\" stroke-width=\"1\">\n";
    out << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(top + plot_h) << "\" x2=\"" << fmt(left + plot_w)
        << "\" y2=\"" << fmt(top + plot_h) << "\"/>\n";
    out << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(top) << "\" x2=\"" << fmt(left) << "\" y2=\""
        << fmt(top + plot_h) << "\"/>\n";
    for (double v = 0.0; v <= y_max + 1e-9; v += 0.5) {
        out << "<text x=\"" << fmt(left - 6) << "\" y=\"" << fmt(py(v) + 4) << "\" text-anchor=\"end\" stroke=\"none\">"
            << fmt(v) << "</text>\n";
    }
    if (days > 0) {
        const Calendar& cal = rt.front().calendar();
        for (std::size_t t = 0; t < days; t += 28) {
            out << "<text x=\"" << fmt(px(static_cast<double>(t))) << "\" y=\"" << fmt(top + plot_h + 16)
                << "\" text-anchor=\"middle\" stroke=\"none\">" << cal.date_at(static_cast<int>(t)).to_string()
                << "</text>\n";
        }
    }
    out << "<text x=\"" << fmt(left + plot_w / 2) << "\" y=\"" << fmt(height - 8)
        << "\" text-anchor=\"middle\" stroke=\"none\">date</text>\n";
    out << "<text x=\"14\" y=\"" << fmt(top + plot_h / 2) << "\" text-anchor=\"middle\" stroke=\"none\" "
        << "transform=\"rotate(-90 14 " << fmt(top + plot_h / 2) << ")\">mean R(t)</text>\n";
    out << "</g>\n";
    out << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(py(1.0)) << "\" x2=\"" << fmt(left + plot_w) << "\" y2=\""
        << fmt(py(1.0)) << "\" stroke=\"#888888\" stroke-dasharray=\"4 3\"/>\n";
    for (std::size_t c = 0; c < mean.size(); ++c) {
        // one polyline per run of defined days
        std::vector<std::string> runs;
        std::string current;
        for (std::size_t t = 0; t <= days; ++t) {
            if (t < days && std::isfinite(mean[c][t])) {
                current += (current.empty() ? "" : " ") + fmt(px(static_cast<double>(t))) + "," + fmt(py(mean[c][t]));
            }
            else if (!current.empty()) {
                runs.push_back(current);
                current.clear();
            }
        }
        for (const auto& points : runs) {
            out << "<polyline fill=\"none\" stroke=\"" << color_of(static_cast<int>(c) + 1)
                << "\" stroke-width=\"2\" points=\"" << points << "\"/>\n";
        }
    }
    write_legend(out, partition.k, canvas_width - legend_width, top);
    out << "</svg>\n";
    return out.str();
}

} // namespace epizone::cli
