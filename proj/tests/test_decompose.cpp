#include <gtest/gtest.h>

#include <random>

#include "tdesign/decompose.hpp"

using namespace tdesign;

namespace {

ClusterGraph random_tree(int n, int max_degree, std::mt19937_64& rng) {
    ClusterGraph g;
    g.weights.assign(n, 0);
    std::vector<int> deg(n, 0);
    for (int v = 1; v < n; ++v) {
        int p;
        do p = std::uniform_int_distribution<int>(0, v - 1)(rng);
        while (deg[p] >= max_degree);
        g.edges.emplace_back(p, v);
        ++deg[p];
        ++deg[v];
    }
    for (int v = 0; v < n; ++v) g.weights[v] = std::max(1, deg[v]) + std::uniform_int_distribution<int>(0, 2)(rng);
    return g;
}

int max_degree(const ClusterGraph& g) {
    int d = 0;
    for (int x : g.degrees()) d = std::max(d, x);
    return d;
}

void check(const LayerDecomposition& d, int ceiling) {
    EXPECT_LE(d.layer_count(), ceiling) << d.method;
    for (const auto& l : d.layers) {
        EXPECT_EQ(validate_shape(l.graph), Shape::brickwork_compatible_strings) << d.method;
        EXPECT_EQ(l.members.size(), static_cast<std::size_t>(l.graph.size()));
    }
    EXPECT_TRUE(contraction_consistent(d)) << d.method;
}

}  // namespace

TEST(Ceilings, Formulas) {
    EXPECT_EQ(tree_layer_ceiling(64, 3), 2 * 2 * 6);
    EXPECT_EQ(tree_layer_ceiling(64, 40), 2 * 6 * 6);
    EXPECT_EQ(loglog_layer_ceiling(15), 18);
    EXPECT_EQ(loglog_layer_ceiling(1), 2);
    EXPECT_EQ(loglog_layer_ceiling(3), 10);
    EXPECT_EQ(ceil_log2(1), 0);
    EXPECT_EQ(ceil_log2(5), 3);
    EXPECT_EQ(floor_log2(16), 4);
}

TEST(SplitOddStrings, PairsOddNodes) {
    LayerGraph s;
    s.graph = {{2, 3, 3, 2}, {{0, 1}, {1, 2}, {2, 3}}};
    s.members = {{0}, {1}, {2}, {3}};
    s.link = {false, false, false};
    const auto out = split_odd_strings(s);
    ASSERT_EQ(out.size(), 2u);
    EXPECT_EQ(out[0].graph.edges, (std::vector<std::pair<int, int>>{{1, 2}}));
    EXPECT_EQ(out[1].graph.weights, (std::vector<int>{2, 6, 2}));
    for (const auto& l : out) EXPECT_EQ(validate_shape(l.graph), Shape::brickwork_compatible_strings);

    // a lone odd node sends its left edge to the second layer
    LayerGraph one;
    one.graph = {{2, 3, 2}, {{0, 1}, {1, 2}}};
    one.members = {{0}, {1}, {2}};
    one.link = {false, false};
    const auto o = split_odd_strings(one);
    ASSERT_EQ(o.size(), 2u);
    EXPECT_EQ(o[0].graph.edges, (std::vector<std::pair<int, int>>{{1, 2}}));

    LayerGraph star;
    star.graph = {{3, 1, 1, 1}, {{0, 1}, {0, 2}, {0, 3}}};
    star.members = {{0}, {1}, {2}, {3}};
    star.link = {false, false, false};
    EXPECT_THROW(split_odd_strings(star), InvalidInput);
}

TEST(TreeDecompose, PathAndStar) {
    const ClusterGraph path{{1, 2, 2, 2, 1}, {{0, 1}, {1, 2}, {2, 3}, {3, 4}}};
    const auto p = tree_decompose(path);
    check(p, tree_layer_ceiling(5, 2));
    EXPECT_EQ(p.layer_count(), 1);

    const ClusterGraph star{{6, 2, 2, 2, 2, 2, 2}, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}, {0, 6}}};
    const auto s = tree_decompose(star);
    check(s, tree_layer_ceiling(7, 6));
    const auto l = loglog_decompose(star);
    check(l, loglog_layer_ceiling(7));
}

TEST(TreeDecompose, CyclesAreCutToASpanningTree) {
    const ClusterGraph g{{2, 2, 2, 2}, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}};
    const auto d = tree_decompose(g);
    EXPECT_EQ(d.tree_edges.size(), 3u);
    EXPECT_EQ(d.dropped_edges.size(), 1u);
    check(d, tree_layer_ceiling(4, 2));
    EXPECT_THROW(tree_decompose(ClusterGraph{{1, 1, 1, 1}, {{0, 1}, {2, 3}}}), InvalidInput);
}

TEST(Decompositions, RandomTreesMeetCeilings) {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 150; ++i) {
        const int n = std::uniform_int_distribution<int>(1, 64)(rng);
        const int md = std::max(n > 2 ? 2 : 1, std::uniform_int_distribution<int>(1, 12)(rng));
        const auto g = random_tree(n, md, rng);
        check(tree_decompose(g), tree_layer_ceiling(n, max_degree(g)));
        check(loglog_decompose(g), loglog_layer_ceiling(n));
    }
}

TEST(Decompositions, JsonCarriesCertificates) {
    const ClusterGraph g{{1, 3, 1, 1}, {{0, 1}, {1, 2}, {1, 3}}};
    const auto j = to_json(tree_decompose(g));
    EXPECT_EQ(j["method"], "tree");
    ASSERT_TRUE(j["layers"].is_array());
    for (const auto& l : j["layers"]) EXPECT_EQ(l["certificate"], "brickwork_compatible_strings");
}
