#include <gtest/gtest.h>

#include <random>

#include "tdesign/architecture.hpp"

using namespace tdesign;

TEST(Architecture, JsonRoundTrip) {
    const auto a = brickwork_1d(6, Boundary::periodic, 3.0);
    const auto text = serialize(a);
    EXPECT_EQ(text.substr(0, 30), R"({"N":6,"q":3,"periodic_depth":)");
    const auto b = parse_architecture(text);
    EXPECT_EQ(serialize(b), text);
    EXPECT_EQ(b.layers.size(), 2u);
    EXPECT_EQ(b.periodic_depth, 2);
}

TEST(Architecture, ValidationNamesTheOffendingGate) {
    auto expect_message = [](const std::string& json, const std::string& fragment) {
        try {
            parse_architecture(json);
            FAIL() << "accepted " << json;
        } catch (const InvalidInput& e) {
            EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
        }
    };
    expect_message(R"({"N":4,"q":2,"layers":[[[0,1],[1,2]]]})", "layer 0 gate 1");
    expect_message(R"({"N":4,"q":2,"layers":[[[0,4]]]})", "layer 0 gate 0");
    expect_message(R"({"N":4,"q":2,"layers":[[[0,0]]]})", "layer 0 gate 0");
    expect_message(R"({"N":4,"q":1,"layers":[]})", "q");
    expect_message(R"({"q":2,"layers":[]})", "N");
    expect_message(R"({"N":4,"q":2,"layers":[[[0,1]]],)", "JSON");
}

TEST(Architecture, BrickworkLayouts) {
    const auto p = brickwork_1d(4, Boundary::periodic);
    ASSERT_EQ(p.layers[1].gates.size(), 2u);
    EXPECT_EQ(p.layers[1].gates[1], (Gate{3, 0}));
    EXPECT_TRUE(is_complete(p));
    const auto o = brickwork_1d(4, Boundary::open);
    EXPECT_EQ(o.layers[1].gates.size(), 1u);
    EXPECT_FALSE(is_complete(o));
    const auto odd = brickwork_1d(5, Boundary::open);
    EXPECT_EQ(odd.layers[0].gates.size(), 2u);
    EXPECT_EQ(odd.layers[1].gates.back(), (Gate{3, 4}));
    EXPECT_TRUE(is_connected(odd));
    EXPECT_THROW(brickwork_1d(5, Boundary::periodic), InvalidInput);
}

TEST(Architecture, DDimensionalBrickwork) {
    const auto a = brickwork_ddim(4, 2);
    EXPECT_EQ(a.num_sites, 16);
    EXPECT_EQ(a.depth(), 4);
    EXPECT_EQ(a.periodic_depth, 4);
    for (const auto& l : a.layers) EXPECT_TRUE(is_complete(l, 16));
    EXPECT_TRUE(is_connected_block(a, 0, 3));
    EXPECT_FALSE(is_connected_block(a, 0, 1));
    // 1D case coincides with the 1D periodic brickwork
    EXPECT_EQ(serialize(brickwork_ddim(6, 1)), serialize(brickwork_1d(6, Boundary::periodic)));
}

TEST(Blocks, GreedyDecomposition) {
    const auto a = repeat_periods(brickwork_1d(4, Boundary::periodic), 3);
    const auto d = greedy_block_decomposition(a);
    ASSERT_EQ(d.count(), 3);
    EXPECT_EQ(d.blocks[1], (Block{2, 3, 2}));
    EXPECT_TRUE(d.interstitial.empty());
    EXPECT_DOUBLE_EQ(*d.mean_block_size(), 2.0);

    // a trailing layer that cannot close a block is interstitial
    auto b = a;
    b.layers.push_back(Layer{{{0, 1}}});
    const auto e = greedy_block_decomposition(b);
    EXPECT_EQ(e.count(), 3);
    ASSERT_EQ(e.interstitial.size(), 1u);
    EXPECT_EQ(e.interstitial[0], std::make_pair(6, 6));
}

TEST(Blocks, MergingOnlyCountAndManualRanges) {
    Architecture a;
    a.num_sites = 4;
    a.local_dim = 2;
    a.layers = {Layer{{{0, 1}}}, Layer{{{0, 1}}}, Layer{{{2, 3}}}, Layer{{{1, 2}}}};
    EXPECT_EQ(greedy_block_decomposition(a).blocks[0].size, 4);
    EXPECT_EQ(greedy_block_decomposition(a, true).blocks[0].size, 3);
    const auto d = block_decomposition_from_ranges(a, {{1, 3}});
    EXPECT_EQ(d.blocks[0].size, 3);
    EXPECT_EQ(d.interstitial.front(), std::make_pair(0, 0));
    EXPECT_THROW(block_decomposition_from_ranges(a, {{0, 2}}), InvalidInput);
}

TEST(Random, ConnectedSamplesAndGateSequences) {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 20; ++i) {
        const auto a = random_connected(6, 3, rng, 2.0, true);
        EXPECT_TRUE(is_connected(a));
        EXPECT_TRUE(is_complete(a));
        EXPECT_NO_THROW(validate(a));
    }
    const auto g = InteractionGraph::path(5);
    const auto s = sample_gate_sequence(g, 7, rng);
    EXPECT_EQ(s.depth(), 7);
    for (const auto& l : s.layers) {
        ASSERT_EQ(l.gates.size(), 1u);
        EXPECT_EQ(l.gates[0][1] - l.gates[0][0], 1);
    }
    EXPECT_EQ(InteractionGraph::complete(5).edges.size(), 10u);
}

TEST(DisjointSets, LabelsAndSlicing) {
    DisjointSets s(5);
    EXPECT_TRUE(s.unite(3, 4));
    EXPECT_FALSE(s.unite(4, 3));
    EXPECT_EQ(s.components(), 4);
    const auto a = brickwork_1d(4, Boundary::open);
    const auto sl = slice(a, 1, 1);
    EXPECT_EQ(sl.depth(), 1);
    EXPECT_EQ(sl.layers[0].gates, a.layers[1].gates);
}
