#pragma once

// Layer decompositions of connected cluster graphs into layers of isolated strings,
// with odd-node splitting to make every layer brickwork-compatible.
//
// Construction goes through an abstract plan: each plan layer lists edges between
// "the cluster that currently contains original node x", optionally split into
// weighted parts. Plans for disjoint subtrees are zipped layer by layer, then
// replayed against a union-find to produce concrete layer graphs.

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tdesign/cluster_graph.hpp"
#include "tdesign/errors.hpp"

namespace tdesign {

/// One layer of a decomposition. `members[i]` lists the original nodes whose cluster
/// node i belongs to; `link[e]` marks edges added by a linked split rather than taken
/// from the input tree.
struct LayerGraph {
    ClusterGraph graph;
    std::vector<std::vector<int>> members;
    std::vector<bool> link;
    Shape certificate = Shape::none;
};

struct LayerDecomposition {
    std::string method;
    ClusterGraph input;
    std::vector<std::pair<int, int>> tree_edges;
    std::vector<int> dropped_edges;  // input edge ids removed to reach the spanning tree
    int max_tree_degree = 0;
    int ceiling = 0;
    std::vector<LayerGraph> layers;

    int layer_count() const noexcept { return static_cast<int>(layers.size()); }

    bool all_brickwork_compatible() const {
        return std::all_of(layers.begin(), layers.end(), [](const LayerGraph& l) {
            return l.certificate == Shape::brickwork_compatible_strings;
        });
    }
};

inline int ceil_log2(long long n) {
    int k = 0;
    while ((1LL << k) < n) ++k;
    return k;
}

inline int floor_log2(long long n) {
    int k = 0;
    while ((2LL << k) <= n) ++k;
    return k;
}

/// 2·min(⌈d/2⌉, 6)·⌈log₂ N⌉
inline int tree_layer_ceiling(int n, int max_degree) {
    return 2 * std::min((max_degree + 1) / 2, 6) * ceil_log2(n);
}

/// 8⌈log₂⌊log₂(N+1)⌋⌉ + 2
inline int loglog_layer_ceiling(int n) {
    require(n >= 1, "node count must be positive");
    return 8 * ceil_log2(floor_log2(static_cast<long long>(n) + 1)) + 2;
}

// ---------------------------------------------------------------------------
// Odd-node splitting

namespace detail {

inline Shape certify(const ClusterGraph& g) { return validate_shape(g); }

/// Contracts `keep` edges of `layer`, returning the quotient graph carrying `rest`.
inline LayerGraph contract_layer(const LayerGraph& layer, const std::vector<int>& keep,
                                 const std::vector<int>& rest) {
    DisjointSets sets(layer.graph.size());
    for (int e : keep) sets.unite(layer.graph.edges[e].first, layer.graph.edges[e].second);
    const auto label = sets.labels();
    LayerGraph out;
    const int n = sets.components();
    out.graph.weights.assign(n, 0);
    out.members.assign(n, {});
    for (int i = 0; i < layer.graph.size(); ++i) {
        out.graph.weights[label[i]] += layer.graph.weights[i];
        auto& m = out.members[label[i]];
        m.insert(m.end(), layer.members[i].begin(), layer.members[i].end());
    }
    for (auto& m : out.members) {
        std::sort(m.begin(), m.end());
        m.erase(std::unique(m.begin(), m.end()), m.end());
    }
    for (int e : rest) {
        const auto [a, b] = layer.graph.edges[e];
        out.graph.edges.emplace_back(label[a], label[b]);
        out.link.push_back(layer.link[e]);
    }
    out.certificate = certify(out.graph);
    return out;
}

inline LayerGraph edge_subset(const LayerGraph& layer, const std::vector<int>& keep) {
    LayerGraph out;
    out.graph.weights = layer.graph.weights;
    out.members = layer.members;
    for (int e : keep) {
        out.graph.edges.push_back(layer.graph.edges[e]);
        out.link.push_back(layer.link[e]);
    }
    out.certificate = certify(out.graph);
    return out;
}

}  // namespace detail

/// Splits a layer of isolated strings into at most two layers of brickwork-compatible
/// strings. Odd nodes o_1..o_k of each string (endpoints included) are paired; the left
/// edge of o_1, o_3, … and the right edge of o_2, o_4, … go to the second layer. When k is
/// odd, o_k loses its left edge as well, leaving it as the right end of the second layer.
inline std::vector<LayerGraph> split_odd_strings(const LayerGraph& layer) {
    const Shape shape = validate_shape(layer.graph);
    require(shape == Shape::strings || shape == Shape::brickwork_compatible_strings,
            "split_odd_strings: layer has a component that is not a string");
    if (shape == Shape::brickwork_compatible_strings) {
        LayerGraph same = layer;
        same.certificate = shape;
        return {same};
    }

    const auto& g = layer.graph;
    const auto inc = g.incidence();
    std::vector<bool> removed(g.edges.size(), false);
    std::vector<bool> visited(g.size(), false);
    for (int start = 0; start < g.size(); ++start) {
        if (visited[start] || inc[start].size() > 1) continue;
        // walk the string from its lower-index endpoint
        std::vector<int> nodes{start};
        std::vector<int> edges;
        visited[start] = true;
        int v = start;
        int prev_edge = -1;
        while (true) {
            int next_edge = -1;
            for (int e : inc[v])
                if (e != prev_edge) next_edge = e;
            if (next_edge < 0) break;
            v = g.other_end(next_edge, v);
            edges.push_back(next_edge);
            nodes.push_back(v);
            visited[v] = true;
            prev_edge = next_edge;
        }
        std::vector<int> odd;  // positions along the string
        for (std::size_t i = 0; i < nodes.size(); ++i)
            if (g.weights[nodes[i]] % 2 != 0) odd.push_back(static_cast<int>(i));
        const int k = static_cast<int>(odd.size());
        const int paired = k - (k % 2);
        auto drop_left = [&](int pos) {
            if (pos > 0) removed[edges[pos - 1]] = true;
        };
        auto drop_right = [&](int pos) {
            if (pos + 1 < static_cast<int>(nodes.size())) removed[edges[pos]] = true;
        };
        for (int i = 0; i < paired; ++i) {
            if (i % 2 == 0)
                drop_left(odd[i]);
            else
                drop_right(odd[i]);
        }
        if (k % 2 == 1) drop_left(odd[k - 1]);
    }

    std::vector<int> keep, rest;
    for (int e = 0; e < g.edge_count(); ++e) (removed[e] ? rest : keep).push_back(e);
    std::vector<LayerGraph> out;
    out.push_back(detail::edge_subset(layer, keep));
    if (!rest.empty()) out.push_back(detail::contract_layer(layer, keep, rest));
    return out;
}

// ---------------------------------------------------------------------------
// Plans

namespace detail {

struct PlanEnd {
    int node = 0;
    int part = -1;
};

struct PlanEdge {
    PlanEnd a, b;
    bool link = false;
};

struct PlanSplit {
    int node = 0;
    std::vector<int> weights;
};

struct PlanLayer {
    std::vector<PlanEdge> edges;
    std::vector<PlanSplit> splits;
};

using Plan = std::vector<PlanLayer>;

inline void zip_into(Plan& into, const Plan& other) {
    if (into.size() < other.size()) into.resize(other.size());
    for (std::size_t i = 0; i < other.size(); ++i) {
        into[i].edges.insert(into[i].edges.end(), other[i].edges.begin(), other[i].edges.end());
        into[i].splits.insert(into[i].splits.end(), other[i].splits.begin(), other[i].splits.end());
    }
}

inline void append(Plan& into, const Plan& other) { into.insert(into.end(), other.begin(), other.end()); }

struct Child {
    int node = 0;
    int weight = 0;
};

/// One half-round of the star contraction: `kids` are absorbed into the center of
/// weight `w` via a string of sub-nodes (two children each), then the sub-nodes are
/// rejoined by their link string.
inline Plan star_round(int center, int w, const std::vector<Child>& kids) {
    const int h = static_cast<int>(kids.size());
    const int m = (h + 1) / 2;
    std::vector<int> alloc(m);
    for (int j = 0; j < m; ++j) {
        const int n_kids = std::min(2, h - 2 * j);
        const int links = m == 1 ? 0 : ((j == 0 || j == m - 1) ? 1 : 2);
        alloc[j] = n_kids + links;
    }
    int used = 0;
    for (int a : alloc) used += a;
    if (used > w) throw std::logic_error("star contraction: center has too few sites");
    alloc[0] += w - used;

    PlanLayer absorb;
    absorb.splits.push_back({center, alloc});
    std::vector<int> grown = alloc;
    for (int i = 0; i < h; ++i) {
        absorb.edges.push_back({{kids[i].node, -1}, {center, i / 2}, false});
        grown[i / 2] += kids[i].weight;
    }
    Plan plan{absorb};
    if (m > 1) {
        PlanLayer rejoin;
        rejoin.splits.push_back({center, grown});
        for (int j = 0; j + 1 < m; ++j) rejoin.edges.push_back({{center, j}, {center, j + 1}, true});
        plan.push_back(std::move(rejoin));
    }
    return plan;
}

/// Absorbs all `kids` into `center` in min(⌈g/2⌉, 4) layers.
inline Plan absorb_children(int center, int w, const std::vector<Child>& kids) {
    const int g = static_cast<int>(kids.size());
    Plan plan;
    if (g == 0) return plan;
    if (g <= 8) {
        for (int i = 0; i < g; i += 2) {
            PlanLayer l;
            l.edges.push_back({{kids[i].node, -1}, {center, -1}, false});
            if (i + 1 < g) l.edges.push_back({{center, -1}, {kids[i + 1].node, -1}, false});
            plan.push_back(std::move(l));
        }
        return plan;
    }
    const int h = g / 2;
    std::vector<Child> first(kids.begin(), kids.begin() + h);
    std::vector<Child> second(kids.begin() + h, kids.end());
    append(plan, star_round(center, w, first));
    for (const auto& c : first) w += c.weight;
    append(plan, star_round(center, w, second));
    return plan;
}

struct RootedTree {
    int root = 0;
    std::vector<int> parent;
    std::vector<std::vector<int>> children;  // ascending
    std::vector<int> subtree_nodes;
    std::vector<int> subtree_weight;
};

inline RootedTree root_tree(int n, const std::vector<std::pair<int, int>>& tree_edges, int root,
                            const std::vector<int>& weights) {
    std::vector<std::vector<int>> adj(n);
    for (auto [a, b] : tree_edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    RootedTree t;
    t.root = root;
    t.parent.assign(n, -1);
    t.children.assign(n, {});
    t.subtree_nodes.assign(n, 1);
    t.subtree_weight = weights;
    std::vector<int> order{root};
    std::vector<bool> seen(n, false);
    seen[root] = true;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const int v = order[i];
        std::vector<int> nb = adj[v];
        std::sort(nb.begin(), nb.end());
        for (int u : nb) {
            if (seen[u]) continue;
            seen[u] = true;
            t.parent[u] = v;
            t.children[v].push_back(u);
            order.push_back(u);
        }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const int v = *it;
        if (t.parent[v] >= 0) {
            t.subtree_nodes[t.parent[v]] += t.subtree_nodes[v];
            t.subtree_weight[t.parent[v]] += t.subtree_weight[v];
        }
    }
    return t;
}

/// Root-to-leaf path that always steps to the child with the most subtree nodes.
inline std::vector<int> heavy_path(const RootedTree& t, int from) {
    std::vector<int> path{from};
    int v = from;
    while (!t.children[v].empty()) {
        int best = t.children[v].front();
        for (int c : t.children[v])
            if (t.subtree_nodes[c] > t.subtree_nodes[best]) best = c;
        path.push_back(best);
        v = best;
    }
    return path;
}

inline Plan plan_subtree(const RootedTree& t, const std::vector<int>& weights, int root) {
    const auto path = heavy_path(t, root);
    Plan recursive, absorb;
    for (std::size_t i = 0; i < path.size(); ++i) {
        const int p = path[i];
        const int on_path = i + 1 < path.size() ? path[i + 1] : -1;
        std::vector<Child> kids;
        for (int c : t.children[p]) {
            if (c == on_path) continue;
            zip_into(recursive, plan_subtree(t, weights, c));
            kids.push_back({c, t.subtree_weight[c]});
        }
        zip_into(absorb, absorb_children(p, weights[p], kids));
    }
    Plan plan = recursive;
    append(plan, absorb);
    if (path.size() > 1) {
        PlanLayer l;
        for (std::size_t i = 0; i + 1 < path.size(); ++i) l.edges.push_back({{path[i], -1}, {path[i + 1], -1}, false});
        plan.push_back(std::move(l));
    }
    return plan;
}

/// Replays a plan against the evolving clusters of the input graph.
inline std::vector<LayerGraph> materialize(const Plan& plan, const std::vector<int>& weights) {
    const int n = static_cast<int>(weights.size());
    DisjointSets sets(n);
    std::vector<int> cluster_weight = weights;  // indexed by root
    std::vector<LayerGraph> layers;
    for (const auto& step : plan) {
        if (step.edges.empty()) continue;
        std::map<int, std::vector<int>> split_of;
        for (const auto& s : step.splits) {
            const int r = sets.find(s.node);
            int total = 0;
            for (int w : s.weights) total += w;
            if (total != cluster_weight[r] || split_of.count(r))
                throw std::logic_error("decomposition plan splits a cluster inconsistently");
            split_of[r] = s.weights;
        }
        std::map<int, std::vector<int>> members;
        for (int v = 0; v < n; ++v) members[sets.find(v)].push_back(v);
        std::vector<int> cluster_order;
        std::vector<bool> listed(n, false);
        for (int v = 0; v < n; ++v) {
            const int r = sets.find(v);
            if (!listed[r]) {
                listed[r] = true;
                cluster_order.push_back(r);
            }
        }
        LayerGraph lg;
        std::map<std::pair<int, int>, int> node_id;
        for (int r : cluster_order) {
            auto it = split_of.find(r);
            if (it == split_of.end()) {
                node_id[{r, -1}] = lg.graph.size();
                lg.graph.weights.push_back(cluster_weight[r]);
                lg.members.push_back(members[r]);
            } else {
                for (std::size_t p = 0; p < it->second.size(); ++p) {
                    node_id[{r, static_cast<int>(p)}] = lg.graph.size();
                    lg.graph.weights.push_back(it->second[p]);
                    lg.members.push_back(members[r]);
                }
            }
        }
        auto lookup = [&](const PlanEnd& e) {
            auto it = node_id.find({sets.find(e.node), e.part});
            if (it == node_id.end()) throw std::logic_error("decomposition plan references a missing node");
            return it->second;
        };
        for (const auto& e : step.edges) {
            lg.graph.edges.emplace_back(lookup(e.a), lookup(e.b));
            lg.link.push_back(e.link);
        }
        validate(lg.graph);
        lg.certificate = validate_shape(lg.graph);
        for (const auto& e : step.edges) {
            const int ra = sets.find(e.a.node);
            const int rb = sets.find(e.b.node);
            if (ra == rb) continue;
            const int w = cluster_weight[ra] + cluster_weight[rb];
            sets.unite(ra, rb);
            cluster_weight[sets.find(ra)] = w;
        }
        layers.push_back(std::move(lg));
    }
    return layers;
}

inline std::vector<LayerGraph> make_brickwork_compatible(const std::vector<LayerGraph>& layers) {
    std::vector<LayerGraph> out;
    for (const auto& l : layers) {
        for (auto& piece : split_odd_strings(l))
            if (!piece.graph.edges.empty()) out.push_back(std::move(piece));
    }
    return out;
}

struct SpanningTree {
    std::vector<std::pair<int, int>> edges;
    std::vector<int> dropped;
    int max_degree = 0;
};

/// Breadth-first spanning tree from node 0, scanning incident edges by id.
inline SpanningTree bfs_spanning_tree(const ClusterGraph& g) {
    SpanningTree st;
    const auto inc = g.incidence();
    std::vector<bool> seen(g.size(), false);
    std::vector<bool> tree_edge(g.edges.size(), false);
    std::queue<int> q;
    q.push(0);
    seen[0] = true;
    while (!q.empty()) {
        const int v = q.front();
        q.pop();
        for (int e : inc[v]) {
            const int u = g.other_end(e, v);
            if (seen[u]) continue;
            seen[u] = true;
            tree_edge[e] = true;
            q.push(u);
        }
    }
    std::vector<int> deg(g.size(), 0);
    for (int e = 0; e < g.edge_count(); ++e) {
        if (tree_edge[e]) {
            st.edges.push_back(g.edges[e]);
            ++deg[g.edges[e].first];
            ++deg[g.edges[e].second];
        } else {
            st.dropped.push_back(e);
        }
    }
    st.max_degree = g.size() > 0 ? *std::max_element(deg.begin(), deg.end()) : 0;
    return st;
}

inline LayerDecomposition start_decomposition(const ClusterGraph& g, std::string method) {
    validate(g);
    require(g.connected(), method + ": cluster graph must be connected");
    LayerDecomposition d;
    d.method = std::move(method);
    d.input = g;
    auto st = bfs_spanning_tree(g);
    d.tree_edges = std::move(st.edges);
    d.dropped_edges = std::move(st.dropped);
    d.max_tree_degree = st.max_degree;
    return d;
}

}  // namespace detail

/// Spanning tree, then recursive heavy-path halving: subtrees off the path are
/// decomposed in parallel, absorbed into their path node, and the path contracts in
/// one final layer.
inline LayerDecomposition tree_decompose(const ClusterGraph& g) {
    auto d = detail::start_decomposition(g, "tree");
    d.ceiling = tree_layer_ceiling(g.size(), d.max_tree_degree);
    if (g.size() == 1) return d;

    std::vector<int> deg(g.size(), 0);
    for (auto [a, b] : d.tree_edges) {
        ++deg[a];
        ++deg[b];
    }
    const int root = static_cast<int>(std::find(deg.begin(), deg.end(), 1) - deg.begin());
    const auto t = detail::root_tree(g.size(), d.tree_edges, root, g.weights);
    const auto plan = detail::plan_subtree(t, g.weights, root);
    d.layers = detail::make_brickwork_compatible(detail::materialize(plan, g.weights));
    return d;
}

/// First layer contracts every heavy path; the resulting shallow tree is then halved
/// repeatedly by letting even-depth nodes absorb their children.
inline LayerDecomposition loglog_decompose(const ClusterGraph& g) {
    auto d = detail::start_decomposition(g, "loglog");
    d.ceiling = loglog_layer_ceiling(g.size());
    if (g.size() == 1) return d;

    const int root = static_cast<int>(std::max_element(g.weights.begin(), g.weights.end()) - g.weights.begin());
    const auto t = detail::root_tree(g.size(), d.tree_edges, root, g.weights);

    // heavy-path partition; each path is named by its head
    detail::PlanLayer paths;
    std::vector<int> head_of(g.size(), -1);
    std::vector<int> path_weight(g.size(), 0);
    std::deque<int> heads{root};
    std::vector<int> head_list;
    while (!heads.empty()) {
        const int h = heads.front();
        heads.pop_front();
        head_list.push_back(h);
        const auto path = detail::heavy_path(t, h);
        for (std::size_t i = 0; i < path.size(); ++i) {
            head_of[path[i]] = h;
            path_weight[h] += g.weights[path[i]];
            if (i + 1 < path.size()) paths.edges.push_back({{path[i], -1}, {path[i + 1], -1}, false});
        }
        for (std::size_t i = 0; i < path.size(); ++i)
            for (int c : t.children[path[i]])
                if (i + 1 >= path.size() || c != path[i + 1]) heads.push_back(c);
    }
    detail::Plan plan{paths};

    // contracted tree over path heads
    std::map<int, int> parent;
    std::map<int, std::vector<int>> kids;
    std::map<int, int> weight;
    for (int h : head_list) {
        parent[h] = h == root ? -1 : head_of[t.parent[h]];
        weight[h] = path_weight[h];
        kids[h];
    }
    for (int h : head_list)
        if (parent[h] >= 0) kids[parent[h]].push_back(h);
    for (auto& [h, ks] : kids) std::sort(ks.begin(), ks.end());

    while (!kids[root].empty()) {
        std::map<int, int> depth{{root, 0}};
        std::vector<int> order{root};
        for (std::size_t i = 0; i < order.size(); ++i)
            for (int c : kids[order[i]]) {
                depth[c] = depth[order[i]] + 1;
                order.push_back(c);
            }
        detail::Plan round;
        std::map<int, std::vector<int>> next_kids;
        std::map<int, int> next_weight;
        for (int v : order) {
            if (depth[v] % 2 != 0) continue;
            std::vector<detail::Child> absorbed;
            std::vector<int> grand;
            int w = weight[v];
            for (int c : kids[v]) {
                absorbed.push_back({c, weight[c]});
                w += weight[c];
                grand.insert(grand.end(), kids[c].begin(), kids[c].end());
            }
            detail::zip_into(round, detail::absorb_children(v, weight[v], absorbed));
            std::sort(grand.begin(), grand.end());
            next_kids[v] = grand;
            next_weight[v] = w;
        }
        detail::append(plan, round);
        kids = std::move(next_kids);
        weight = std::move(next_weight);
    }
    d.layers = detail::make_brickwork_compatible(detail::materialize(plan, g.weights));
    return d;
}

/// Replays the layers against the input: every node must sit inside one current
/// cluster, each cluster's weight must be fully distributed over its nodes, and the
/// final contraction must leave a single cluster.
inline bool contraction_consistent(const LayerDecomposition& d) {
    const int n = d.input.size();
    DisjointSets sets(n);
    std::vector<int> cluster_weight = d.input.weights;
    for (const auto& layer : d.layers) {
        std::vector<int> share(n, 0);
        std::vector<int> node_root(layer.graph.size());
        for (int i = 0; i < layer.graph.size(); ++i) {
            const auto& m = layer.members[i];
            if (m.empty()) return false;
            const int r = sets.find(m.front());
            for (int v : m)
                if (sets.find(v) != r) return false;
            node_root[i] = r;
            share[r] += layer.graph.weights[i];
        }
        for (int v = 0; v < n; ++v)
            if (sets.find(v) == v && share[v] != cluster_weight[v]) return false;
        for (auto [a, b] : layer.graph.edges) {
            const int ra = sets.find(node_root[a]);
            const int rb = sets.find(node_root[b]);
            if (ra == rb) continue;
            const int w = cluster_weight[ra] + cluster_weight[rb];
            sets.unite(ra, rb);
            cluster_weight[sets.find(ra)] = w;
        }
    }
    return sets.components() == 1;
}

inline nlohmann::ordered_json to_json(const LayerGraph& l) {
    nlohmann::ordered_json j = to_json(l.graph);
    j["members"] = l.members;
    std::vector<int> links;
    for (std::size_t e = 0; e < l.link.size(); ++e)
        if (l.link[e]) links.push_back(static_cast<int>(e));
    j["link_edges"] = links;
    j["certificate"] = to_string(l.certificate);
    return j;
}

inline nlohmann::ordered_json to_json(const LayerDecomposition& d) {
    nlohmann::ordered_json j;
    j["method"] = d.method;
    j["nodes"] = d.input.size();
    j["max_tree_degree"] = d.max_tree_degree;
    j["dropped_edges"] = d.dropped_edges;
    j["layer_count"] = d.layer_count();
    j["ceiling"] = d.ceiling;
    j["contraction_consistent"] = contraction_consistent(d);
    auto layers = nlohmann::ordered_json::array();
    for (const auto& l : d.layers) layers.push_back(to_json(l));
    j["layers"] = std::move(layers);
    return j;
}

}  // namespace tdesign
