// Acceptance run: one PASS/FAIL line per criterion. Criterion 13 is reported but
// never fails the run; its violations would be counterexample candidates.

#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "tdesign/tdesign.hpp"

using namespace tdesign;

namespace {

int hard_failures = 0;

void report(int id, bool ok, const std::string& what, bool soft = false) {
    std::printf("[%s] %2d %s\n", ok ? "PASS" : (soft ? "SOFT" : "FAIL"), id, what.c_str());
    std::fflush(stdout);
    if (!ok && !soft) ++hard_failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

double dense_ssv(const Architecture& a, int t = 2) {
    SsvOptions o;
    o.method = Method::dense;
    return subleading_singular_value(period_operator(a, t), o).ssv;
}

double ssv_of(const ClusterGraph& g) { return layer_restricted_ssv(g, 2, 2.0).ssv; }

// Random connected multigraph with weights summing to at most 8 and degree <= weight.
ClusterGraph random_cluster_graph(std::mt19937_64& rng) {
    for (;;) {
        const int n = std::uniform_int_distribution<int>(2, 4)(rng);
        ClusterGraph g;
        g.weights.assign(n, 1);
        int budget = 8 - n;
        while (budget > 0 && std::bernoulli_distribution(0.7)(rng)) {
            ++g.weights[std::uniform_int_distribution<int>(0, n - 1)(rng)];
            --budget;
        }
        std::vector<int> deg(n, 0);
        const int tries = std::uniform_int_distribution<int>(n - 1, 3 * n)(rng);
        for (int k = 0; k < tries; ++k) {
            int u = std::uniform_int_distribution<int>(0, n - 1)(rng);
            int v = std::uniform_int_distribution<int>(0, n - 1)(rng);
            if (u == v || deg[u] >= g.weights[u] || deg[v] >= g.weights[v]) continue;
            g.edges.emplace_back(std::min(u, v), std::max(u, v));
            ++deg[u];
            ++deg[v];
        }
        if (g.connected()) return g;
    }
}

// Connected graph with even weights and even degrees, total weight <= 8.
ClusterGraph random_eulerian_graph(std::mt19937_64& rng) {
    for (;;) {
        const int n = std::uniform_int_distribution<int>(2, 4)(rng);
        ClusterGraph g;
        g.weights.assign(n, 2);
        int budget = 8 - 2 * n;
        while (budget >= 2 && std::bernoulli_distribution(0.6)(rng)) {
            g.weights[std::uniform_int_distribution<int>(0, n - 1)(rng)] += 2;
            budget -= 2;
        }
        std::vector<int> deg(n, 0);
        for (int k = 0; k < 6; ++k) {
            // closed walk through a random subset, length >= 2
            std::vector<int> order(n);
            for (int i = 0; i < n; ++i) order[i] = i;
            std::shuffle(order.begin(), order.end(), rng);
            const int len = std::uniform_int_distribution<int>(2, n)(rng);
            bool fits = true;
            for (int i = 0; i < len; ++i) fits = fits && deg[order[i]] + 2 <= g.weights[order[i]];
            if (!fits) continue;
            for (int i = 0; i < len; ++i) {
                const int u = order[i], v = order[(i + 1) % len];
                g.edges.emplace_back(std::min(u, v), std::max(u, v));
                deg[u] += 1;
                deg[v] += 1;
            }
        }
        if (g.connected()) return g;
    }
}

// Random tree with bounded degree and weights >= degree.
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

// Component count after moving `part` out of node a without a link.
int split_node_components(const ClusterGraph& g, int a, const SplitPart& part) {
    ClusterGraph h = g;
    const int fresh = g.size();
    h.weights[a] -= part.weight;
    h.weights.push_back(part.weight);
    for (int e : part.edges) {
        auto& [u, v] = h.edges[e];
        (u == a ? u : v) = fresh;
    }
    return h.component_count();
}

void criterion1() {
    const auto f = ortho_frame(2, 2.0);
    const Eigen::MatrixXd p = gate_projector(2, 2, 2.0);
    // label (I,S) in orthonormal coordinates
    const Eigen::VectorXd e_i = f.state_coords.col(0), e_s = f.state_coords.col(1);
    const Eigen::VectorXd in = detail::kron(e_i, e_s);
    const Eigen::VectorXd want = 0.4 * (detail::kron(e_i, e_i) + detail::kron(e_s, e_s));
    const double err = (p * in - want).norm();
    report(1, err <= 1e-12, fmt("gate (I,S) -> 2/5[(I,I)+(S,S)], error %.2e", err));
}

void criterion2() {
    bool ok = true;
    std::string vals;
    const std::vector<std::vector<double>> pinned = {{0.32, 0.48, 0.546274169980}, {0.18, 0.27, 0.307279220614}};
    for (int qi = 0; qi < 2; ++qi) {
        const double q = qi == 0 ? 2.0 : 3.0;
        const double lam = std::pow(2.0 * q / (q * q + 1.0), 2);
        for (int ni = 0; ni < 3; ++ni) {
            const int n = 4 + 2 * ni;
            const double s = dense_ssv(brickwork_1d(n, Boundary::periodic, q));
            ok = ok && s <= lam + 1e-9 && std::abs(s - pinned[qi][ni]) < 1e-9;
            vals += fmt(" q=%g,N=%g:%.6f", q, n, s);
        }
    }
    report(2, ok, "periodic brickwork SSV <= (2q/(q^2+1))^2, pinned;" + vals);
}

void criterion3() {
    bool ok = true;
    std::string vals;
    for (int n : {4, 6, 8}) {
        const double p = dense_ssv(brickwork_1d(n, Boundary::periodic, 2.0));
        const double o = dense_ssv(brickwork_1d(n, Boundary::open, 2.0));
        ok = ok && p <= o + 1e-9 && o <= 0.8 + 1e-9;
        vals += fmt(" N=%g:%.6f<=%.6f", n, p, o);
    }
    report(3, ok, "periodic <= open <= 0.8;" + vals);
}

void criterion4() {
    std::mt19937_64 rng(404);
    int bad = 0;
    double worst = -1.0;
    for (int i = 0; i < 50; ++i) {
        const int n = 2 * std::uniform_int_distribution<int>(1, 4)(rng);
        const int layers = std::uniform_int_distribution<int>(n == 2 ? 1 : 2, 5)(rng);
        const auto a = random_connected(n, layers, rng, 2.0, true);
        const double s = subleading_singular_value(transfer_matrix(a, 0, a.depth() - 1, 2)).ssv;
        const double b = layer_gap_bound(block_layer_ssvs(a, 0, a.depth() - 1, 2));
        worst = std::max(worst, s * s - b * b);
        if (s * s > b * b + 1e-9) ++bad;
    }
    report(4, bad == 0, fmt("block bound ssv^2 <= 1-prod(1-s_i^2) on 50 random circuits; violations %g, max slack use %.2e", bad, worst));
}

void criterion5() {
    std::mt19937_64 rng(505);
    int bad = 0, checks = 0;
    for (int i = 0; i < 100; ++i) {
        const auto g = random_cluster_graph(rng);
        const double s0 = ssv_of(g);
        const auto deg = g.degrees();
        // merge two random distinct nodes
        {
            const int a = std::uniform_int_distribution<int>(0, g.size() - 1)(rng);
            int b = std::uniform_int_distribution<int>(0, g.size() - 2)(rng);
            if (b >= a) ++b;
            ++checks;
            if (ssv_of(merge(g, a, b)) > s0 + 1e-9) ++bad;
        }
        // add an edge where both ends have a free site
        for (int a = 0; a < g.size(); ++a)
            for (int b = a + 1; b < g.size(); ++b)
                if (deg[a] < g.weights[a] && deg[b] < g.weights[b]) {
                    ++checks;
                    if (ssv_of(add_edge(g, a, b)) > s0 + 1e-9) ++bad;
                    a = b = g.size();
                }
        // splits: a linked split adds one site use on each side
        for (int a = 0; a < g.size(); ++a) {
            if (g.weights[a] < 2) continue;
            const auto inc = g.incidence()[a];
            SplitPart part;
            part.weight = std::uniform_int_distribution<int>(1, g.weights[a] - 1)(rng);
            for (int e : inc)
                if (static_cast<int>(part.edges.size()) < part.weight && std::bernoulli_distribution(0.5)(rng))
                    part.edges.push_back(e);
            const int moved = static_cast<int>(part.edges.size());
            const int left = static_cast<int>(inc.size()) - moved;
            if (left > g.weights[a] - part.weight) continue;
            if (g.component_count() == split_node_components(g, a, part)) {
                ++checks;
                if (ssv_of(split_connected(g, a, part)) < s0 - 1e-9) ++bad;
            }
            if (moved + 1 <= part.weight && left + 1 <= g.weights[a] - part.weight) {
                ++checks;
                if (ssv_of(split_with_link(g, a, part)) < s0 - 1e-9) ++bad;
            }
            break;
        }
        // Euler reduction on an even graph
        const auto ge = random_eulerian_graph(rng);
        const auto er = euler_reduce(ge);
        ++checks;
        if (ssv_of(er.result) < ssv_of(ge) - 1e-9) ++bad;
    }
    report(5, bad == 0, fmt("rewrite monotonicity on 100 graphs, %g checks, %g violations", checks, bad));
}

void criterion6() {
    const ClusterGraph two{{4, 4}, {{0, 1}, {0, 1}, {0, 1}, {0, 1}}};
    const double s = ssv_of(two);
    const double f = two_cluster_formula(3, 2.0);
    const ClusterGraph square{{2, 2}, {{0, 1}, {0, 1}}};
    const double sq = ssv_of(square);
    const bool ok = std::abs(s - f) <= 1e-8 && std::abs(sq - 0.32) <= 1e-12 && std::abs(square_value(2.0) - 0.32) <= 1e-15;
    report(6, ok, fmt("two weight-4 clusters %.10f vs formula %.10f; square %.12f", s, f, sq));
}

void criterion7() {
    Architecture one;
    one.num_sites = 2;
    one.local_dim = 2.0;
    one.layers = {Layer{{{0, 1}}}};
    const double exact = frame_potential_exact(one, 1, 2);
    std::mt19937_64 rng(707);
    const auto mc = frame_potential_mc(one, 1, 2, 10000, rng);
    bool ok = std::abs(exact - 2.0) < 1e-10 && std::abs(mc.estimate - exact) <= 3.0 * mc.std_error;
    std::string vals = fmt(" single gate exact %.8f mc %.4f+-%.4f;", exact, mc.estimate, mc.std_error);
    const auto bw = brickwork_1d(4, Boundary::periodic, 2.0);
    for (int k = 1; k <= 3; ++k) {
        const double e = frame_potential_exact(bw, k, 2);
        const auto m = frame_potential_mc(bw, k, 2, 10000, rng);
        ok = ok && std::abs(m.estimate - e) <= 3.0 * m.std_error;
        vals += fmt(" k=%g %.5f vs %.4f", k, e, m.estimate);
    }
    report(7, ok, "frame potential exact vs Monte Carlo;" + vals);
}

void criterion8() {
    const auto bw = brickwork_1d(4, Boundary::periodic, 2.0);
    const auto op = period_operator(bw, 2);
    const double s = dense_ssv(bw);
    const double rank = static_cast<double>(op.dim());
    bool ok = true;
    double worst = -1e300;
    for (int k = 1; k <= 5; ++k) {
        const double f = frame_potential_exact(bw, k, 2);
        const double bound = 2.0 + (rank - 2.0) * std::pow(s, 2 * k);
        worst = std::max(worst, f - bound);
        ok = ok && f <= bound + 1e-6;
    }
    report(8, ok, fmt("F(k) <= t! + (rank-t!) ssv^{2k}, k<=5; max(F-bound) %.3e", worst));
}

void criterion9() {
    std::mt19937_64 rng(909);
    int bad = 0, worst_tree = 0, worst_ll = 0;
    for (int i = 0; i < 200; ++i) {
        const int n = std::uniform_int_distribution<int>(1, 64)(rng);
        const int md = std::max(n > 2 ? 2 : 1, std::uniform_int_distribution<int>(1, 12)(rng));
        const auto g = random_tree(n, md, rng);
        const auto t = tree_decompose(g);
        const auto l = loglog_decompose(g);
        const int dmax = [&] {
            int d = 0;
            for (int x : g.degrees()) d = std::max(d, x);
            return d;
        }();
        bool ok = t.layer_count() <= tree_layer_ceiling(n, dmax) && l.layer_count() <= loglog_layer_ceiling(n);
        for (const auto* d : {&t, &l})
            for (const auto& layer : d->layers)
                ok = ok && validate_shape(layer.graph) == Shape::brickwork_compatible_strings;
        ok = ok && contraction_consistent(t) && contraction_consistent(l);
        if (!ok) ++bad;
        worst_tree = std::max(worst_tree, t.layer_count());
        worst_ll = std::max(worst_ll, l.layer_count());
    }
    report(9, bad == 0, fmt("tree/loglog decompositions of 200 random trees; failures %g, deepest %g / %g", bad,
                            worst_tree, worst_ll));
}

void criterion10() {
    const auto a = brickwork_1d(4, Boundary::periodic, 4.0);
    const auto split = site_split(a);
    const auto s1 = singular_values(transfer_matrix(a, 0, a.depth() - 1, 2));
    const auto s2 = singular_values(transfer_matrix(split, 0, split.depth() - 1, 2));
    std::vector<double> v1, v2;
    for (Eigen::Index i = 0; i < s1.size(); ++i)
        if (s1(i) > 1e-7) v1.push_back(s1(i));
    for (Eigen::Index i = 0; i < s2.size(); ++i)
        if (s2(i) > 1e-7) v2.push_back(s2(i));
    bool ok = v1.size() == v2.size();
    double err = 0.0;
    for (std::size_t i = 0; ok && i < v1.size(); ++i) err = std::max(err, std::abs(v1[i] - v2[i]));
    ok = ok && err <= 1e-8;
    report(10, ok, fmt("site splitting q=4 -> 2: %g vs %g nonzero singular values, max diff %.2e",
                       static_cast<double>(v1.size()), static_cast<double>(v2.size()), err));
}

void criterion11() {
    const double k = k_star(4, 2.0, 2, 0.01, 0.64);
    const int x = x_expansion(15);
    const double conj = conjectured_block_count(10, 2.0, 2, 1e-3);
    const double s = s_star_periodic(1.0 / (4.0 * std::log(1.25)), 2.0);
    const bool ok = std::abs(k - 35.17) <= 0.01 && x == 18 && std::abs(conj - 77.6) <= 0.1 &&
                    std::ceil(conj) == 78.0 && std::abs(s - 0.64) <= 1e-12;
    report(11, ok, fmt("k_star %.4f, conjectured count %.4f, s_star %.15f", k, conj, s) + ", x(15) = " +
                       std::to_string(x));
}

void criterion12() {
    std::mt19937_64 rng(1212);
    const auto st = ensemble_connection_stats(InteractionGraph::path(16), 2000, rng);
    double h = 0.0;
    for (int i = 1; i <= 15; ++i) h += 1.0 / i;
    const double expect = 15.0 * h;
    const bool ok = std::abs(st.mean - expect) <= 0.15 * expect && st.min >= 15;
    report(12, ok, fmt("path N=16 gates-to-connect mean %.3f vs 15*H_15 = %.4f", st.mean, expect));
}

void criterion13() {
    bool ok = true;
    std::string vals;
    for (int n : {5, 6}) {
        const double open = dense_ssv(brickwork_1d(n, Boundary::open, 2.0));
        for (std::uint64_t seed : {1u, 2u, 3u}) {
            AnnealConfig cfg;
            cfg.iterations = 2000;
            cfg.seed = seed;
            const auto r = anneal_max_ssv(n, 2.0, 2, n, cfg);
            if (r.best_ssv > open + 1e-6) {
                ok = false;
                std::printf("       counterexample candidate N=%d seed=%llu ssv=%.8f > %.8f: %s\n", n,
                            static_cast<unsigned long long>(seed), r.best_ssv, open, serialize(r.best_arch).c_str());
            }
            vals += fmt(" N=%g:%.6f/%.6f", n, r.best_ssv, open);
        }
    }
    report(13, ok, "annealed best SSV <= open brickwork SSV;" + vals, true);
}

}  // namespace

int main() {
    const std::vector<std::function<void()>> all = {criterion1, criterion2, criterion3,  criterion4,  criterion5,
                                                    criterion6, criterion7, criterion8,  criterion9,  criterion10,
                                                    criterion11, criterion12, criterion13};
    for (std::size_t i = 0; i < all.size(); ++i) {
        try {
            all[i]();
        } catch (const std::exception& e) {
            report(static_cast<int>(i + 1), false, std::string("threw: ") + e.what(), i + 1 == 13);
        }
    }
    std::printf("%d hard failure(s)\n", hard_failures);
    return hard_failures == 0 ? 0 : 1;
}
