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
#include "epizone/zoner.h"
#include "epizone/csv.h"

#include <algorithm>
#include <iterator>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <set>

namespace epizone
{

namespace
{

/// Relabels clusters 1..k in order of their lowest member index.
std::vector<int> canonical_labels(const std::vector<int>& labels)
{
    std::map<int, int> renumber;
    std::vector<int> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out[i] = renumber.try_emplace(labels[i], static_cast<int>(renumber.size()) + 1).first->second;
    }
    return out;
}

struct Subtree {
    std::vector<std::size_t> members; // ascending
    std::optional<double> best_gain;
    std::size_t cut_parent = 0;
    std::size_t cut_child = 0;

    std::pair<std::size_t, std::size_t> cut_edge() const
    {
        return {std::min(cut_parent, cut_child), std::max(cut_parent, cut_child)};
    }
};

class TreeSplitter
{
public:
    TreeSplitter(const SpanningTree& tree, const DistanceMatrix& d, std::size_t min_size, Objective objective)
        : m_tree(tree)
        , m_d(d)
        , m_min_size(min_size)
        , m_objective(objective)
        , m_cluster_of(tree.size(), 0)
        , m_tin(tree.size(), 0)
        , m_size(tree.size(), 0)
        , m_parent(tree.size(), 0)
        , m_pair_sum(tree.size(), 0.0)
        , m_rowsum(tree.size(), 0.0)
    {
    }

    /// Computes the best feasible cut of `t` (cluster id `id`) from subtree pair sums.
    void evaluate(Subtree& t, std::size_t id)
    {
        t.best_gain.reset();
        const std::size_t m = t.members.size();
        if (m < 2 * m_min_size) {
            return;
        }
        for (std::size_t a : t.members) {
            double s = 0.0;
            for (std::size_t b : t.members) {
                s += m_d(a, b);
            }
            m_rowsum[a] = s;
        }

        // preorder with ascending children; every subtree is a contiguous range
        m_order.clear();
        std::vector<std::size_t> stack{t.members.front()};
        m_parent[t.members.front()] = t.members.front();
        while (!stack.empty()) {
            std::size_t v = stack.back();
            stack.pop_back();
            m_tin[v] = m_order.size();
            m_order.push_back(v);
            const auto& adj = m_tree.adjacency()[v];
            for (auto it = adj.rbegin(); it != adj.rend(); ++it) {
                if (m_cluster_of[*it] == id && *it != m_parent[v]) {
                    m_parent[*it] = v;
                    stack.push_back(*it);
                }
            }
        }
        if (m_order.size() != m) {
            throw Error(ErrorCode::Disconnected, "cluster is not connected in the spanning tree");
        }

        // pair sums of every rooted subtree; each pair is visited once, at its lowest common ancestor
        for (std::size_t r = m; r-- > 0;) {
            const std::size_t v = m_order[r];
            std::size_t end = r + 1;
            double sum = 0.0;
            const auto& adj = m_tree.adjacency()[v];
            for (std::size_t c : adj) {
                if (m_cluster_of[c] != id || c == m_parent[v] || m_parent[c] != v || m_tin[c] <= m_tin[v]) {
                    continue;
                }
                const std::size_t c_begin = m_tin[c];
                const std::size_t c_end = c_begin + m_size[c];
                double cross = 0.0;
                for (std::size_t a = r; a < c_begin; ++a) {
                    for (std::size_t b = c_begin; b < c_end; ++b) {
                        cross += m_d(m_order[a], m_order[b]);
                    }
                }
                sum += m_pair_sum[c] + cross;
                end = c_end;
            }
            m_size[v] = end - r;
            m_pair_sum[v] = sum;
        }

        const double total = m_pair_sum[t.members.front()];
        const double total_cost = cost_from_pair_sum(total, m, m_objective);
        for (std::size_t r = 1; r < m; ++r) {
            const std::size_t c = m_order[r];
            const std::size_t inside = m_size[c];
            const std::size_t outside = m - inside;
            if (inside < m_min_size || outside < m_min_size) {
                continue;
            }
            double row = 0.0;
            for (std::size_t a = r; a < r + inside; ++a) {
                row += m_rowsum[m_order[a]];
            }
            const double p_in = m_pair_sum[c];
            const double cross = std::max(0.0, row - 2.0 * p_in);
            const double p_out = std::max(0.0, total - p_in - cross);
            const double gain = total_cost - cost_from_pair_sum(p_in, inside, m_objective) -
                                cost_from_pair_sum(p_out, outside, m_objective);
            Subtree candidate;
            candidate.cut_parent = m_parent[c];
            candidate.cut_child = c;
            if (!t.best_gain || gain > *t.best_gain ||
                (gain == *t.best_gain && candidate.cut_edge() < t.cut_edge())) {
                t.best_gain = gain;
                t.cut_parent = m_parent[c];
                t.cut_child = c;
            }
        }
    }

    /// Members of the side of the cut containing `child`, found by walking the tree.
    std::vector<std::size_t> side_of(const Subtree& t, std::size_t id) const
    {
        std::vector<std::size_t> side;
        std::vector<std::size_t> stack{t.cut_child};
        std::set<std::size_t> seen{t.cut_child, t.cut_parent};
        while (!stack.empty()) {
            std::size_t v = stack.back();
            stack.pop_back();
            side.push_back(v);
            for (std::size_t u : m_tree.adjacency()[v]) {
                if (m_cluster_of[u] == id && seen.insert(u).second) {
                    stack.push_back(u);
                }
            }
        }
        std::sort(side.begin(), side.end());
        return side;
    }

    std::vector<std::size_t>& cluster_of()
    {
        return m_cluster_of;
    }

private:
    const SpanningTree& m_tree;
    const DistanceMatrix& m_d;
    std::size_t m_min_size;
    Objective m_objective;
    std::vector<std::size_t> m_cluster_of;
    std::vector<std::size_t> m_order;
    std::vector<std::size_t> m_tin;
    std::vector<std::size_t> m_size;
    std::vector<std::size_t> m_parent;
    std::vector<double> m_pair_sum;
    std::vector<double> m_rowsum;
};

void check_inputs(const SpanningTree& tree, const DistanceMatrix& d)
{
    if (tree.size() != d.size()) {
        throw Error(ErrorCode::InvalidArgument, "distance matrix does not match tree units");
    }
    for (std::size_t i = 0; i < tree.size(); ++i) {
        if (!(tree.units()[i] == d.units()[i])) {
            throw Error(ErrorCode::InvalidArgument, "distance matrix and tree use different unit order");
        }
    }
}

} // namespace

const char* to_string(Objective o)
{
    return o == Objective::SsdAnalogue ? "ssd_analogue" : "mean_pairwise";
}

Objective objective_from_string(const std::string& s)
{
    if (s == "ssd_analogue") {
        return Objective::SsdAnalogue;
    }
    if (s == "mean_pairwise") {
        return Objective::MeanPairwise;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown objective '" + s + "'");
}

double cost_from_pair_sum(double pair_sum, std::size_t size, Objective objective)
{
    if (size < 2) {
        return 0.0;
    }
    const double n = static_cast<double>(size);
    return objective == Objective::SsdAnalogue ? pair_sum / n : pair_sum / (0.5 * n * (n - 1.0));
}

double cluster_cost(std::span<const std::size_t> cluster, const DistanceMatrix& d, Objective objective)
{
    if (cluster.empty()) {
        throw Error(ErrorCode::EmptyCluster, "cluster cost of an empty set");
    }
    double sum = 0.0;
    for (std::size_t a = 0; a < cluster.size(); ++a) {
        for (std::size_t b = a + 1; b < cluster.size(); ++b) {
            sum += d(cluster[a], cluster[b]);
        }
    }
    return cost_from_pair_sum(sum, cluster.size(), objective);
}

double admission_score(std::size_t candidate, std::span<const std::size_t> cluster, const DistanceMatrix& d)
{
    std::vector<std::size_t> joined(cluster.begin(), cluster.end());
    joined.push_back(candidate);
    return cluster_cost(joined, d, Objective::MeanPairwise);
}

std::size_t admission_test(std::span<const std::size_t> cluster, std::span<const std::size_t> frontier,
                           const DistanceMatrix& d)
{
    if (frontier.empty()) {
        throw Error(ErrorCode::EmptyFrontier, "no unit contiguous to the cluster is unassigned");
    }
    std::size_t best = frontier.front();
    double best_score = std::numeric_limits<double>::infinity();
    for (std::size_t q : frontier) {
        double score = admission_score(q, cluster, d);
        if (score < best_score || (score == best_score && q < best)) {
            best = q;
            best_score = score;
        }
    }
    return best;
}

std::vector<std::vector<std::size_t>> Partition::members() const
{
    std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out[static_cast<std::size_t>(labels[i] - 1)].push_back(i);
    }
    return out;
}

Partition make_partition(std::vector<UnitId> units, std::vector<int> labels, const DistanceMatrix& d,
                         Objective objective)
{
    if (units.size() != labels.size() || units.size() != d.size()) {
        throw Error(ErrorCode::UnitMismatch, "labels, units and distance matrix differ in size");
    }
    Partition p;
    p.units = std::move(units);
    p.labels = canonical_labels(labels);
    p.k = p.labels.empty() ? 0 : *std::max_element(p.labels.begin(), p.labels.end());
    p.objective_kind = objective;
    for (const auto& members : p.members()) {
        p.cluster_costs.push_back(cluster_cost(members, d, objective));
        p.objective += p.cluster_costs.back();
    }
    return p;
}

Partition skater_partition(const SpanningTree& tree, const DistanceMatrix& d, int k, int min_size,
                           Objective objective)
{
    check_inputs(tree, d);
    const std::size_t n = tree.size();
    if (k < 1 || static_cast<std::size_t>(k) > n) {
        throw Error(ErrorCode::InvalidArgument, "k must lie in 1.." + std::to_string(n));
    }
    if (min_size < 1) {
        throw Error(ErrorCode::InvalidArgument, "min_size must be >= 1");
    }
    if (static_cast<std::size_t>(k) * static_cast<std::size_t>(min_size) > n) {
        throw Error(ErrorCode::InfeasibleMinSize, std::to_string(k) + " clusters of at least " +
                                                      std::to_string(min_size) + " units need more than " +
                                                      std::to_string(n) + " units");
    }

    TreeSplitter splitter(tree, d, static_cast<std::size_t>(min_size), objective);
    std::vector<Subtree> clusters(1);
    clusters[0].members.resize(n);
    std::iota(clusters[0].members.begin(), clusters[0].members.end(), std::size_t{0});
    splitter.evaluate(clusters[0], 0);

    std::vector<std::pair<std::size_t, std::size_t>> removed;
    for (int round = 1; round < k; ++round) {
        std::optional<std::size_t> pick;
        for (std::size_t c = 0; c < clusters.size(); ++c) {
            const auto& t = clusters[c];
            if (!t.best_gain) {
                continue;
            }
            const auto& best = clusters[pick.value_or(c)];
            if (!pick || *t.best_gain > *best.best_gain ||
                (*t.best_gain == *best.best_gain && t.cut_edge() < best.cut_edge())) {
                pick = c;
            }
        }
        if (!pick) {
            throw Error(ErrorCode::InfeasibleMinSize, "no edge leaves both sides with at least " +
                                                          std::to_string(min_size) + " units in round " +
                                                          std::to_string(round));
        }
        Subtree& parent = clusters[*pick];
        removed.push_back(parent.cut_edge());
        const std::size_t new_id = clusters.size();
        std::vector<std::size_t> split = splitter.side_of(parent, *pick);
        std::vector<std::size_t> rest;
        std::set_difference(parent.members.begin(), parent.members.end(), split.begin(), split.end(),
                            std::back_inserter(rest));
        for (std::size_t v : split) {
            splitter.cluster_of()[v] = new_id;
        }
        parent.members = std::move(rest);
        Subtree child;
        child.members = std::move(split);
        clusters.push_back(std::move(child));
        // only the two halves of the last cut need new gains
        splitter.evaluate(clusters[*pick], *pick);
        splitter.evaluate(clusters.back(), new_id);
    }

    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        labels[i] = static_cast<int>(splitter.cluster_of()[i]);
    }
    Partition p = make_partition(tree.units(), std::move(labels), d, objective);
    p.removed_edges = std::move(removed);
    return p;
}

Partition grow_partition(const SpanningTree& tree, const DistanceMatrix& d, const std::vector<std::size_t>& seeds,
                         Objective objective)
{
    check_inputs(tree, d);
    const std::size_t n = tree.size();
    if (seeds.empty() || seeds.size() > n) {
        throw Error(ErrorCode::InvalidArgument, "grow mode needs between 1 and n seeds");
    }
    std::vector<int> label(n, 0);
    std::vector<std::vector<std::size_t>> clusters(seeds.size());
    for (std::size_t c = 0; c < seeds.size(); ++c) {
        if (seeds[c] >= n) {
            throw Error(ErrorCode::InvalidArgument, "seed index out of range");
        }
        if (label[seeds[c]] != 0) {
            throw Error(ErrorCode::SeedOverlap, tree.units()[seeds[c]].id);
        }
        label[seeds[c]] = static_cast<int>(c) + 1;
        clusters[c].push_back(seeds[c]);
    }
    std::size_t unassigned = n - seeds.size();
    while (unassigned > 0) {
        bool progress = false;
        for (std::size_t c = 0; c < clusters.size() && unassigned > 0; ++c) {
            std::set<std::size_t> frontier;
            for (std::size_t v : clusters[c]) {
                for (std::size_t u : tree.adjacency()[v]) {
                    if (label[u] == 0) {
                        frontier.insert(u);
                    }
                }
            }
            if (frontier.empty()) {
                continue;
            }
            std::vector<std::size_t> candidates(frontier.begin(), frontier.end());
            std::size_t q = admission_test(clusters[c], candidates, d);
            label[q] = static_cast<int>(c) + 1;
            clusters[c].push_back(q);
            --unassigned;
            progress = true;
        }
        if (!progress) {
            throw Error(ErrorCode::Disconnected, "units unreachable from every seed");
        }
    }
    Partition p;
    p.units = tree.units();
    p.labels = label; // seed order is the label order
    p.k = static_cast<int>(seeds.size());
    p.objective_kind = objective;
    for (const auto& members : p.members()) {
        p.cluster_costs.push_back(cluster_cost(members, d, objective));
        p.objective += p.cluster_costs.back();
    }
    return p;
}

std::vector<std::size_t> farthest_point_seeds(const DistanceMatrix& d, int k)
{
    const std::size_t n = d.size();
    if (k < 1 || static_cast<std::size_t>(k) > n) {
        throw Error(ErrorCode::InvalidArgument, "k must lie in 1.." + std::to_string(n));
    }
    if (k == 1) {
        return {0};
    }
    std::size_t a = 0;
    std::size_t b = 1;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (d(i, j) > d(a, b)) {
                a = i;
                b = j;
            }
        }
    }
    std::vector<std::size_t> seeds{a, b};
    std::vector<double> nearest(n);
    for (std::size_t i = 0; i < n; ++i) {
        nearest[i] = std::min(d(i, a), d(i, b));
    }
    while (seeds.size() < static_cast<std::size_t>(k)) {
        std::size_t best = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (std::find(seeds.begin(), seeds.end(), i) != seeds.end()) {
                continue;
            }
            if (best == n || nearest[i] > nearest[best]) {
                best = i;
            }
        }
        seeds.push_back(best);
        for (std::size_t i = 0; i < n; ++i) {
            nearest[i] = std::min(nearest[i], d(i, best));
        }
    }
    return seeds;
}

std::vector<int> read_cluster_csv(std::istream& in, const std::vector<UnitId>& units, const std::string& source)
{
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < units.size(); ++i) {
        index.emplace(units[i].id, i);
    }
    CsvReader reader(in, source);
    reader.expect_header({"unit_id", "cluster"});
    std::vector<int> labels(units.size(), 0);
    std::vector<std::string> f;
    while (reader.next(f)) {
        if (f.size() != 2) {
            reader.fail("expected unit_id,cluster");
        }
        auto it = index.find(f[0]);
        if (it == index.end()) {
            throw Error(ErrorCode::UnitMismatch, "unknown unit '" + f[0] + "'");
        }
        long c = reader.parse_long(f[1], "cluster");
        if (c < 1) {
            reader.fail("cluster labels start at 1");
        }
        labels[it->second] = static_cast<int>(c);
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == 0) {
            throw Error(ErrorCode::UnitMismatch, "unit '" + units[i].id + "' has no cluster");
        }
    }
    return labels;
}

void write_cluster_csv(std::ostream& out, const Partition& p)
{
    out << "unit_id,cluster\n";
    for (std::size_t i = 0; i < p.units.size(); ++i) {
        out << csv_field(p.units[i].id) << ',' << p.labels[i] << '\n';
    }
}

bool is_contiguous(const std::vector<int>& labels, const SpanningTree& tree)
{
    const std::size_t n = tree.size();
    if (labels.size() != n) {
        return false;
    }
    std::vector<bool> seen(n, false);
    std::set<int> started;
    for (std::size_t s = 0; s < n; ++s) {
        if (seen[s]) {
            continue;
        }
        if (!started.insert(labels[s]).second) {
            return false; // second component with the same label
        }
        std::queue<std::size_t> queue;
        queue.push(s);
        seen[s] = true;
        while (!queue.empty()) {
            std::size_t v = queue.front();
            queue.pop();
            for (std::size_t u : tree.adjacency()[v]) {
                if (!seen[u] && labels[u] == labels[s]) {
                    seen[u] = true;
                    queue.push(u);
                }
            }
        }
    }
    return true;
}

} // namespace epizone
