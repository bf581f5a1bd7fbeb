#pragma once

// Weighted multigraphs of site clusters and the rewrite rules that act on them.
//
// A node's weight is the number of sites in the cluster; an edge is a gate that
// joins two distinct clusters. Self-loops never appear.

#include <nlohmann/json.hpp>

#include <algorithm>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "tdesign/architecture.hpp"
#include "tdesign/errors.hpp"

namespace tdesign {

struct ClusterGraph {
    std::vector<int> weights;
    std::vector<std::pair<int, int>> edges;

    int size() const noexcept { return static_cast<int>(weights.size()); }
    int edge_count() const noexcept { return static_cast<int>(edges.size()); }

    int total_weight() const { return std::accumulate(weights.begin(), weights.end(), 0); }

    std::vector<int> degrees() const {
        std::vector<int> d(weights.size(), 0);
        for (auto [a, b] : edges) {
            ++d[a];
            ++d[b];
        }
        return d;
    }

    /// Incident edge ids per node, ascending.
    std::vector<std::vector<int>> incidence() const {
        std::vector<std::vector<int>> inc(weights.size());
        for (int e = 0; e < edge_count(); ++e) {
            inc[edges[e].first].push_back(e);
            inc[edges[e].second].push_back(e);
        }
        return inc;
    }

    int other_end(int e, int v) const { return edges[e].first == v ? edges[e].second : edges[e].first; }

    /// Component label per node, numbered by lowest member.
    std::vector<int> component_labels() const {
        DisjointSets s(size());
        for (auto [a, b] : edges) s.unite(a, b);
        return s.labels();
    }

    int component_count() const {
        DisjointSets s(size());
        for (auto [a, b] : edges) s.unite(a, b);
        return s.components();
    }

    bool connected() const { return size() > 0 && component_count() == 1; }

    friend bool operator==(const ClusterGraph&, const ClusterGraph&) = default;
};

inline void validate(const ClusterGraph& g) {
    for (int i = 0; i < g.size(); ++i)
        require(g.weights[i] >= 1, "node " + std::to_string(i) + " has non-positive weight");
    for (int e = 0; e < g.edge_count(); ++e) {
        const auto [a, b] = g.edges[e];
        require(a >= 0 && a < g.size() && b >= 0 && b < g.size(),
                "edge " + std::to_string(e) + " has an endpoint out of range");
        require(a != b, "edge " + std::to_string(e) + " is a self-loop");
    }
    const auto deg = g.degrees();
    for (int i = 0; i < g.size(); ++i)
        require(deg[i] <= g.weights[i], "node " + std::to_string(i) + " has degree " + std::to_string(deg[i]) +
                                            " above its weight " + std::to_string(g.weights[i]));
}

inline nlohmann::ordered_json to_json(const ClusterGraph& g) {
    nlohmann::ordered_json j;
    j["weights"] = g.weights;
    auto edges = nlohmann::ordered_json::array();
    for (auto [a, b] : g.edges) edges.push_back({a, b});
    j["edges"] = std::move(edges);
    return j;
}

inline ClusterGraph parse_cluster_graph(const nlohmann::json& j) {
    require(j.is_object() && j.contains("weights") && j["weights"].is_array(),
            "cluster graph needs a weights array");
    ClusterGraph g;
    for (const auto& w : j["weights"]) {
        require(w.is_number_integer(), "weights must be integers");
        g.weights.push_back(w.get<int>());
    }
    if (j.contains("edges")) {
        for (const auto& e : j["edges"]) {
            require(e.is_array() && e.size() == 2 && e[0].is_number_integer() && e[1].is_number_integer(),
                    "each edge must be a pair of node indices");
            g.edges.emplace_back(e[0].get<int>(), e[1].get<int>());
        }
    }
    validate(g);
    return g;
}

/// Nodes are the connected components of layers [0, merged_through] (singletons when
/// merged_through < 0); one edge per gate of `layer` that joins two distinct components.
inline ClusterGraph build_cluster_graph(const Architecture& a, int merged_through, int layer) {
    require(merged_through < layer, "merged_through must precede the layer");
    require(layer >= 0 && layer < a.depth(), "layer index out of range");
    DisjointSets sets(a.num_sites);
    for (int i = 0; i <= merged_through; ++i) apply_layer(sets, a.layers[i]);
    const auto label = sets.labels();
    ClusterGraph g;
    g.weights.assign(sets.components(), 0);
    for (int s = 0; s < a.num_sites; ++s) ++g.weights[label[s]];
    for (const auto& gate : a.layers[layer].gates) {
        require(gate.size() == 2, "cluster graphs need 2-site gates");
        const int u = label[gate[0]];
        const int v = label[gate[1]];
        if (u != v) g.edges.emplace_back(std::min(u, v), std::max(u, v));
    }
    return g;
}

// ---------------------------------------------------------------------------
// Rewrite rules

/// The part carved out of a node by a split: its weight and the incident edge ids it takes.
struct SplitPart {
    int weight = 0;
    std::vector<int> edges;
};

struct RewriteStep {
    std::string rule;
    nlohmann::ordered_json args;
    ClusterGraph result;
};

inline nlohmann::ordered_json to_json(const RewriteStep& s) {
    nlohmann::ordered_json j;
    j["rule"] = s.rule;
    j["args"] = s.args;
    j["graph"] = to_json(s.result);
    return j;
}

/// The merged node takes the lower index; edges between a and b become internal and vanish.
inline ClusterGraph merge(const ClusterGraph& g, int a, int b) {
    require(a >= 0 && a < g.size() && b >= 0 && b < g.size(), "merge: node out of range");
    require(a != b, "merge: nodes must differ");
    const int keep = std::min(a, b);
    const int gone = std::max(a, b);
    auto remap = [&](int v) {
        if (v == gone) return keep;
        return v > gone ? v - 1 : v;
    };
    ClusterGraph out;
    for (int i = 0; i < g.size(); ++i)
        if (i != gone) out.weights.push_back(g.weights[i]);
    out.weights[keep] += g.weights[gone];
    for (auto [u, v] : g.edges) {
        const int x = remap(u);
        const int y = remap(v);
        if (x != y) out.edges.emplace_back(x, y);
    }
    validate(out);
    return out;
}

namespace detail {

inline ClusterGraph split_node(const ClusterGraph& g, int a, const SplitPart& part, bool link) {
    require(a >= 0 && a < g.size(), "split: node out of range");
    require(part.weight >= 1 && part.weight < g.weights[a], "split: both parts need positive weight");
    ClusterGraph out = g;
    const int fresh = g.size();
    out.weights[a] -= part.weight;
    out.weights.push_back(part.weight);
    std::vector<bool> moved(g.edges.size(), false);
    for (int e : part.edges) {
        require(e >= 0 && e < g.edge_count(), "split: edge id out of range");
        require(g.edges[e].first == a || g.edges[e].second == a,
                "split: edge " + std::to_string(e) + " is not incident to node " + std::to_string(a));
        require(!moved[e], "split: edge listed twice");
        moved[e] = true;
        auto& [u, v] = out.edges[e];
        if (u == a)
            u = fresh;
        else
            v = fresh;
    }
    if (link) out.edges.emplace_back(a, fresh);
    validate(out);
    return out;
}

}  // namespace detail

/// Moves `part` into a new node (index size()); the graph must stay as connected as before.
inline ClusterGraph split_connected(const ClusterGraph& g, int a, const SplitPart& part) {
    ClusterGraph out = detail::split_node(g, a, part, false);
    require(out.component_count() <= g.component_count(), "split_connected: split disconnects the graph");
    return out;
}

/// Moves `part` into a new node and joins the two halves with a new edge.
inline ClusterGraph split_with_link(const ClusterGraph& g, int a, const SplitPart& part) {
    return detail::split_node(g, a, part, true);
}

inline ClusterGraph add_edge(const ClusterGraph& g, int a, int b) {
    require(a >= 0 && a < g.size() && b >= 0 && b < g.size(), "add_edge: node out of range");
    require(a != b, "add_edge: self-loops are not allowed");
    ClusterGraph out = g;
    out.edges.emplace_back(std::min(a, b), std::max(a, b));
    validate(out);
    return out;
}

// ---------------------------------------------------------------------------
// Shape certificates

enum class Shape { none, strings, brickwork_compatible_strings, loops };

inline const char* to_string(Shape s) {
    switch (s) {
        case Shape::strings: return "strings";
        case Shape::brickwork_compatible_strings: return "brickwork_compatible_strings";
        case Shape::loops: return "loops";
        default: return "none";
    }
}

inline Shape validate_shape(const ClusterGraph& g) {
    const auto deg = g.degrees();
    const auto label = g.component_labels();
    const int comps = g.component_count();
    std::vector<int> nodes(comps, 0), edges(comps, 0);
    for (int i = 0; i < g.size(); ++i) ++nodes[label[i]];
    for (auto [a, b] : g.edges) ++edges[label[a]];

    bool strings = true;
    for (int c = 0; c < comps; ++c)
        if (edges[c] != nodes[c] - 1) strings = false;
    for (int d : deg)
        if (d > 2) strings = false;
    if (strings) {
        for (int i = 0; i < g.size(); ++i)
            if (deg[i] == 2 && g.weights[i] % 2 != 0) return Shape::strings;
        return Shape::brickwork_compatible_strings;
    }
    if (g.size() > 0) {
        bool loops = true;
        for (int i = 0; i < g.size(); ++i)
            if (deg[i] != 2 || g.weights[i] % 2 != 0) loops = false;
        if (loops) return Shape::loops;
    }
    return Shape::none;
}

// ---------------------------------------------------------------------------
// Euler reduction

struct EulerReduction {
    std::vector<int> loop_sizes;  // one per component that carries edges
    std::vector<RewriteStep> trace;
    ClusterGraph result;
};

namespace detail {

struct Circuit {
    std::vector<int> nodes;  // v_0 .. v_{E-1}; edge j joins nodes[j] and nodes[j+1 mod E]
    std::vector<int> edges;
};

/// Hierholzer's algorithm from `start`, always taking the lowest unused incident edge id.
inline Circuit euler_circuit(const ClusterGraph& g, int start, const std::vector<std::vector<int>>& inc,
                             std::vector<bool>& used) {
    std::vector<std::size_t> next(g.size(), 0);
    std::vector<std::pair<int, int>> stack{{start, -1}};
    std::vector<int> rev_nodes, rev_edges;
    while (!stack.empty()) {
        const int v = stack.back().first;
        auto& ptr = next[v];
        while (ptr < inc[v].size() && used[inc[v][ptr]]) ++ptr;
        if (ptr < inc[v].size()) {
            const int e = inc[v][ptr];
            used[e] = true;
            stack.emplace_back(g.other_end(e, v), e);
        } else {
            rev_nodes.push_back(v);
            if (stack.back().second >= 0) rev_edges.push_back(stack.back().second);
            stack.pop_back();
        }
    }
    Circuit c;
    c.nodes.assign(rev_nodes.rbegin(), rev_nodes.rend());
    c.nodes.pop_back();  // closing return to start
    c.edges.assign(rev_edges.rbegin(), rev_edges.rend());
    return c;
}

}  // namespace detail

/// Splits every node along an Eulerian circuit of its component, then breaks each node
/// into weight-2 pieces; each component with edges ends as a loop of weight-2 nodes.
inline EulerReduction euler_reduce(const ClusterGraph& g) {
    validate(g);
    const auto deg = g.degrees();
    for (int i = 0; i < g.size(); ++i) {
        require(deg[i] % 2 == 0, "euler_reduce: node " + std::to_string(i) + " has odd degree " +
                                     std::to_string(deg[i]));
        require(g.weights[i] % 2 == 0, "euler_reduce: node " + std::to_string(i) + " has odd weight " +
                                           std::to_string(g.weights[i]));
    }

    EulerReduction out;
    ClusterGraph cur = g;
    const auto inc = g.incidence();
    std::vector<bool> used(g.edges.size(), false);
    std::vector<bool> seen(g.size(), false);
    const auto label = g.component_labels();

    // Circuits are computed on the input graph; node indices of the input stay valid
    // because splits only append nodes.
    std::vector<detail::Circuit> circuits;
    for (int v = 0; v < g.size(); ++v) {
        if (seen[label[v]] || deg[v] == 0) continue;
        seen[label[v]] = true;
        circuits.push_back(detail::euler_circuit(g, v, inc, used));
        int m = 0;
        for (int u = 0; u < g.size(); ++u)
            if (label[u] == label[v]) m += g.weights[u];
        out.loop_sizes.push_back(m);
    }

    auto record = [&](std::string rule, nlohmann::ordered_json args) {
        out.trace.push_back({std::move(rule), std::move(args), cur});
    };

    for (const auto& c : circuits) {
        const int len = static_cast<int>(c.edges.size());
        std::vector<int> visits_seen(g.size(), 0);
        for (int j = 0; j < len; ++j) {
            const int v = c.nodes[j];
            if (visits_seen[v]++ == 0) continue;
            const int e_in = c.edges[(j - 1 + len) % len];
            const int e_out = c.edges[j];
            SplitPart part{2, {e_in, e_out}};
            cur = split_connected(cur, v, part);
            record("split_connected", {{"node", v}, {"weight", 2}, {"edges", part.edges}});
        }
    }

    // every node now has degree 2; reduce weights to 2 with linked splits
    const int nodes_after_circuits = cur.size();
    for (int v = 0; v < nodes_after_circuits; ++v) {
        while (cur.weights[v] > 2 && deg[v] > 0) {
            const auto inc_now = cur.incidence();
            // keep the lowest edge on v, move the other one to the new node
            const int moving = inc_now[v].back();
            SplitPart part{2, {moving}};
            cur = split_with_link(cur, v, part);
            record("split_with_link", {{"node", v}, {"weight", 2}, {"edges", part.edges}});
        }
    }
    out.result = cur;
    return out;
}

}  // namespace tdesign
