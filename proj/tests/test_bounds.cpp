#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "tdesign/bounds.hpp"
#include "tdesign/search.hpp"

using namespace tdesign;

namespace {

std::optional<CValue> find(const std::vector<CValue>& cat, CSource s) {
    for (const auto& c : cat)
        if (c.source == s) return c;
    return std::nullopt;
}

const BoundReport& path_of(const std::vector<BoundReport>& r, TheoremPath p) {
    for (const auto& x : r)
        if (x.path == p) return x;
    throw std::runtime_error("path missing");
}

}  // namespace

TEST(Catalog, EntriesAndAssumptions) {
    const auto cat = c_catalog(2.0, 2);
    const double sharp = std::log(1.25);
    EXPECT_NEAR(find(cat, CSource::hunterjones_t2_open)->value, 1.0 / (2.0 * sharp), 1e-12);
    EXPECT_NEAR(find(cat, CSource::hunterjones_t2_periodic)->value, 1.0 / (4.0 * sharp), 1e-12);
    EXPECT_FALSE(find(cat, CSource::conjectured)->rigorous);
    EXPECT_FALSE(find(cat, CSource::largeq_leading).has_value());  // needs q > 2
    EXPECT_TRUE(find(cat, CSource::haferkamp_q2).has_value());
    // ⌈log_2 8⌉ = 3 exactly
    EXPECT_NEAR(find(cat, CSource::brandao_general)->value,
                261500.0 * 9.0 * 4.0 * std::pow(2.0, 5.0 + 3.1 / std::log(2.0)), 1e-3);

    const auto t3 = c_catalog(3.0, 3);
    EXPECT_FALSE(find(t3, CSource::hunterjones_t2_open).has_value());
    EXPECT_FALSE(find(t3, CSource::haferkamp_q2).has_value());
    EXPECT_FALSE(find(t3, CSource::largeq_leading)->rigorous);

    // √2 only admits the q² family and the t = 2 values
    const auto r2 = c_catalog(std::sqrt(2.0), 2);
    EXPECT_FALSE(find(r2, CSource::brandao_general).has_value());
    EXPECT_TRUE(find(r2, CSource::brandao_q2plus).has_value());
    EXPECT_THROW(c_catalog(1.0, 2), InvalidInput);
}

TEST(Catalog, TightestSkipsNonRigorousUnlessAllowed) {
    const auto c = tightest_c(2.0, 2);
    ASSERT_TRUE(c);
    EXPECT_EQ(c->source, CSource::hunterjones_t2_periodic);
    const auto big_q = tightest_c(50.0, 3, true);
    EXPECT_EQ(big_q->source, CSource::conjectured);
    EXPECT_EQ(tightest_c(50.0, 3, false)->source, CSource::brandao_general);
}

TEST(Formulas, KnownValues) {
    EXPECT_NEAR(k_star(4, 2.0, 2, 0.01, 0.64), 35.1691, 1e-4);
    EXPECT_NEAR(k_star(4, 2.0, 2, 0.01, 0.8), 70.338, 1e-3);
    EXPECT_NEAR(k_star(10, 2.0, 2, 1e-3, 0.8), 155.208, 1e-3);
    EXPECT_EQ(x_expansion(15), 18);
    EXPECT_EQ(x_expansion(10), 18);
    EXPECT_NEAR(conjectured_block_count(10, 2.0, 2, 1e-3), 77.604, 1e-3);
    EXPECT_NEAR(s_star_periodic(1.0 / (4.0 * std::log(1.25)), 2.0), 0.64, 1e-12);
    // longer periods can only weaken s_*
    EXPECT_LT(s_star_periodic(1.0, 2.0), s_star_periodic(1.0, 3.0));
    EXPECT_NEAR(std::exp(-log_inv_s_star(1.0, 1.0)), s_star_periodic(1.0, 2.0), 1e-14);
    // huge C keeps precision
    EXPECT_GT(log_inv_s_star(1e12, 1.0), 0.0);
    EXPECT_THROW(s_star_periodic(1.0, 1.0), InvalidInput);
    EXPECT_THROW(k_star(4, 2.0, 2, 1.5, 0.5), InvalidInput);
    EXPECT_THROW(k_star(4, 2.0, 2, 0.1, 1.0), InvalidInput);
}

TEST(Formulas, TightLogTerm) {
    // min(t!, q^{2t}) = 2 per site; 2^N − min(2, (2^N)!) = 2^N − 2
    EXPECT_NEAR(log_prefactor(4, 2.0, 2, true), std::log(16.0 - 2.0), 1e-12);
    EXPECT_LT(k_star(4, 2.0, 2, 0.01, 0.64, true), k_star(4, 2.0, 2, 0.01, 0.64, false));
    EXPECT_THROW(log_prefactor(1, 2.0, 2, true), InvalidInput);
}

TEST(Pipeline, PeriodicBrickwork) {
    BoundOptions opt;
    opt.eps = 0.01;
    const auto r = bound_pipeline(brickwork_1d(4, Boundary::periodic), opt);
    const auto& c = path_of(r, TheoremPath::complete_periodic);
    EXPECT_TRUE(c.tightest);
    EXPECT_NEAR(c.s_star, 0.64, 1e-12);
    EXPECT_NEAR(c.k_star, 35.17, 0.01);
    EXPECT_EQ(c.d_star, 72);
    EXPECT_TRUE(c.chain_ok);
    for (const auto& x : r) {
        EXPECT_TRUE(x.chain_ok);
        EXPECT_GT(x.s_star, 0.0);
        EXPECT_LT(x.s_star, 1.0);
        if (x.conjectured) {
            EXPECT_FALSE(x.tightest);
        }
    }
    const auto& inc = path_of(r, TheoremPath::incomplete_periodic);
    EXPECT_NEAR(inc.c_used->value, 1.0 / (4.0 * std::log(1.5 / std::sqrt(2.0))), 1e-12);
    const auto& integer = path_of(r, TheoremPath::incomplete_integer);
    EXPECT_GT(integer.k_star, c.k_star);
    EXPECT_EQ(std::count_if(r.begin(), r.end(), [](const auto& x) { return x.tightest; }), 1);
}

TEST(Pipeline, IncompleteAndAperiodic) {
    BoundOptions opt;
    const auto open = bound_pipeline(brickwork_1d(5, Boundary::open), opt);
    EXPECT_FALSE(std::any_of(open.begin(), open.end(),
                             [](const auto& x) { return x.path == TheoremPath::complete_periodic; }));
    Architecture a;
    a.num_sites = 4;
    a.local_dim = 2;
    a.layers = {Layer{{{0, 1}, {2, 3}}}, Layer{{{1, 2}}}, Layer{{{0, 3}}}, Layer{{{0, 1}, {2, 3}}}, Layer{{{1, 2}}}};
    const auto r = bound_pipeline(a, opt);
    const auto& ap = path_of(r, TheoremPath::aperiodic);
    EXPECT_EQ(ap.blocks, 2);
    EXPECT_DOUBLE_EQ(*ap.ell_bar, 2.0);
    EXPECT_FALSE(ap.d_star.has_value());
    EXPECT_TRUE(ap.satisfied.has_value());
    opt.allow_conjectured = true;
    const auto rc = bound_pipeline(a, opt);
    EXPECT_TRUE(path_of(rc, TheoremPath::conjectured).tightest);
    Architecture disc = a;
    disc.layers = {Layer{{{0, 1}}}};
    EXPECT_THROW(bound_pipeline(disc, opt), InvalidInput);
}

TEST(Pipeline, AveragingOneArchitectureReproducesPipeline) {
    const auto a = repeat_periods(brickwork_1d(4, Boundary::periodic), 40);
    BoundOptions opt;
    const auto r = bound_pipeline(a, opt);
    std::mt19937_64 rng(1);
    std::function<Architecture(std::mt19937_64&)> atom = [&](std::mt19937_64&) { return a; };
    const auto avg = averaged_bound_check(atom, 2, 0.01, 3, rng, true);
    const auto& ap = path_of(r, TheoremPath::aperiodic);
    EXPECT_NEAR(avg.mean_k_star, ap.k_star, 1e-9);
    EXPECT_NEAR(avg.log_mean_bound, avg.mean_log_bound, 1e-12);
    EXPECT_NEAR(*avg.conjectured_k_threshold, path_of(r, TheoremPath::conjectured).k_star, 1e-9);
}

TEST(TwoCluster, DerivedAndPrintedVariants) {
    EXPECT_NEAR(two_cluster_formula(2, 2.0), square_value(2.0), 1e-14);
    EXPECT_NEAR(two_cluster_formula(2, 3.0), square_value(3.0), 1e-14);
    EXPECT_NEAR(two_cluster_formula(3, 2.0), 0.189884539677, 1e-9);
    EXPECT_NEAR(square_value(2.0), 0.32, 1e-15);
    EXPECT_THROW(two_cluster_formula_printed(2, 2.0), InvalidInput);
    EXPECT_NEAR(two_cluster_formula_printed(3, 2.0), 0.14306, 1e-4);
    // both decay to the same limit
    EXPECT_NEAR(two_cluster_formula(8, 2.0), two_cluster_formula_printed(8, 2.0), 1e-12);
}

TEST(Hypercube, TailAndProductBounds) {
    EXPECT_NEAR(hypercube_tail_bound(2.0), 0.47827, 1e-5);
    EXPECT_THROW(hypercube_tail_bound(1.4), InvalidInput);
    double prev = 0.0;
    for (int d = 2; d <= 10; ++d) {
        const double p = hypercube_product_bound(2.0, d);
        EXPECT_GE(p, prev);
        EXPECT_LE(p, hypercube_tail_bound(2.0) + 1e-12);
        prev = p;
    }
    EXPECT_NEAR(hypercube_product_bound(2.0, 2), 0.32, 1e-14);
}

TEST(DDim, OneDimensionMatchesBrickwork) {
    const double c = tightest_c(2.0, 2)->value;
    const double k = k_star(8, 2.0, 2, 0.01, s_star_periodic(c, 3.0));
    EXPECT_NEAR(ddim_brickwork_bound(8, 1, 2.0, 0.01), 2.0 * k, 1e-9);
    EXPECT_GT(ddim_brickwork_bound(4, 2, 2.0, 0.01), ddim_brickwork_bound(4, 1, 2.0, 0.01));
    EXPECT_THROW(ddim_brickwork_bound(4, 2, 2.0, 0.01, 3), InvalidInput);
    EXPECT_THROW(ddim_brickwork_bound(5, 2, 2.0, 0.01), InvalidInput);
}

TEST(Crossover, AlternatingBlocks) {
    const double c = alternating_block_crossover();
    EXPECT_NEAR(c, 0.51952, 1e-5);
    EXPECT_NEAR(3.0 / log_inv_s_star(c, 2.0), 6.0 / log_inv_s_star(c, 1.0), 1e-9);
}
