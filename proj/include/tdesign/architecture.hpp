#pragma once

// Circuit architectures: N sites of local dimension q, an ordered list of layers,
// each layer a set of site-disjoint gates. Gates are site lists of length >= 2.

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tdesign/errors.hpp"

namespace tdesign {

using Gate = std::vector<int>;

struct Layer {
    std::vector<Gate> gates;

    friend bool operator==(const Layer&, const Layer&) = default;
};

struct Architecture {
    int num_sites = 0;
    double local_dim = 2.0;
    std::vector<Layer> layers;
    std::optional<int> periodic_depth;

    int depth() const noexcept { return static_cast<int>(layers.size()); }

    friend bool operator==(const Architecture&, const Architecture&) = default;
};

/// Throws InvalidInput naming the offending layer/gate.
inline void validate(const Architecture& a) {
    require(a.num_sites >= 2, "N must be at least 2");
    require(a.local_dim > 1.0, "local dimension q must exceed 1");
    if (a.periodic_depth) require(*a.periodic_depth >= 1, "periodic_depth must be positive");
    for (std::size_t li = 0; li < a.layers.size(); ++li) {
        std::vector<bool> used(a.num_sites, false);
        const auto& gates = a.layers[li].gates;
        for (std::size_t gi = 0; gi < gates.size(); ++gi) {
            const std::string where = "layer " + std::to_string(li) + " gate " + std::to_string(gi);
            require(gates[gi].size() >= 2, where + ": gate needs at least 2 sites");
            for (int s : gates[gi]) {
                require(s >= 0 && s < a.num_sites, where + ": site index " + std::to_string(s) + " out of range");
                require(!used[s], where + ": overlapping gates on site " + std::to_string(s));
                used[s] = true;
            }
        }
    }
}

// ---------------------------------------------------------------------------
// JSON

inline Architecture parse_architecture(const nlohmann::json& j) {
    require(j.is_object(), "architecture must be a JSON object");
    require(j.contains("N") && j["N"].is_number_integer(), "field N (integer) is required");
    require(j.contains("q") && j["q"].is_number(), "field q (number) is required");
    require(j.contains("layers") && j["layers"].is_array(), "field layers (array) is required");

    Architecture a;
    a.num_sites = j["N"].get<int>();
    a.local_dim = j["q"].get<double>();
    if (j.contains("periodic_depth") && !j["periodic_depth"].is_null()) {
        require(j["periodic_depth"].is_number_integer(), "periodic_depth must be an integer or null");
        a.periodic_depth = j["periodic_depth"].get<int>();
    }
    for (std::size_t li = 0; li < j["layers"].size(); ++li) {
        const auto& jl = j["layers"][li];
        require(jl.is_array(), "layer " + std::to_string(li) + " must be an array of gates");
        Layer layer;
        for (std::size_t gi = 0; gi < jl.size(); ++gi) {
            const auto& jg = jl[gi];
            require(jg.is_array(), "layer " + std::to_string(li) + " gate " + std::to_string(gi) +
                                       " must be an array of site indices");
            Gate g;
            for (const auto& s : jg) {
                require(s.is_number_integer(), "layer " + std::to_string(li) + " gate " +
                                                   std::to_string(gi) + ": site must be an integer");
                g.push_back(s.get<int>());
            }
            layer.gates.push_back(std::move(g));
        }
        a.layers.push_back(std::move(layer));
    }
    validate(a);
    return a;
}

inline Architecture parse_architecture(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidInput(std::string("architecture JSON: ") + e.what());
    }
    return parse_architecture(j);
}

inline nlohmann::ordered_json to_json(const Architecture& a) {
    nlohmann::ordered_json j;
    j["N"] = a.num_sites;
    if (a.local_dim == std::floor(a.local_dim) && std::abs(a.local_dim) < 1e15)
        j["q"] = static_cast<std::int64_t>(a.local_dim);
    else
        j["q"] = a.local_dim;
    j["periodic_depth"] = a.periodic_depth ? nlohmann::ordered_json(*a.periodic_depth) : nlohmann::ordered_json(nullptr);
    auto layers = nlohmann::ordered_json::array();
    for (const auto& l : a.layers) {
        auto jl = nlohmann::ordered_json::array();
        for (const auto& g : l.gates) jl.push_back(g);
        layers.push_back(std::move(jl));
    }
    j["layers"] = std::move(layers);
    return j;
}

inline std::string serialize(const Architecture& a) { return to_json(a).dump(); }

// ---------------------------------------------------------------------------
// Connectivity

class DisjointSets {
public:
    explicit DisjointSets(int n) : parent_(n), size_(n, 1), components_(n) {
        std::iota(parent_.begin(), parent_.end(), 0);
    }

    int find(int x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    /// Returns true if a and b were in different sets.
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (size_[a] < size_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
        --components_;
        return true;
    }

    int components() const noexcept { return components_; }
    int size() const noexcept { return static_cast<int>(parent_.size()); }

    /// Component label per element, labels numbered by first appearance.
    std::vector<int> labels() {
        std::vector<int> root_label(parent_.size(), -1), out(parent_.size());
        int next = 0;
        for (int i = 0; i < size(); ++i) {
            const int r = find(i);
            if (root_label[r] < 0) root_label[r] = next++;
            out[i] = root_label[r];
        }
        return out;
    }

private:
    std::vector<int> parent_;
    std::vector<int> size_;
    int components_;
};

/// Merges every gate of `layer` into `sets`; returns whether any gate joined distinct sets.
inline bool apply_layer(DisjointSets& sets, const Layer& layer) {
    bool merged = false;
    for (const auto& g : layer.gates)
        for (std::size_t i = 1; i < g.size(); ++i) merged = sets.unite(g[0], g[i]) || merged;
    return merged;
}

/// Every site covered by exactly one gate and every gate acts on 2 sites.
inline bool is_complete(const Layer& layer, int num_sites) {
    std::vector<int> hits(num_sites, 0);
    for (const auto& g : layer.gates) {
        if (g.size() != 2) return false;
        for (int s : g) {
            if (s < 0 || s >= num_sites) return false;
            ++hits[s];
        }
    }
    return std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; });
}

inline bool is_complete(const Architecture& a) {
    return std::all_of(a.layers.begin(), a.layers.end(),
                       [&](const Layer& l) { return is_complete(l, a.num_sites); });
}

inline bool is_connected_block(const Architecture& a, int start, int end) {
    require(start >= 0 && start <= end && end < a.depth(), "block range outside architecture");
    DisjointSets sets(a.num_sites);
    for (int i = start; i <= end; ++i) apply_layer(sets, a.layers[i]);
    return sets.components() == 1;
}

inline bool is_connected(const Architecture& a) {
    return a.depth() > 0 && is_connected_block(a, 0, a.depth() - 1);
}

/// Layers [start, end] as a standalone architecture (no periodicity).
inline Architecture slice(const Architecture& a, int start, int end) {
    require(start >= 0 && start <= end && end < a.depth(), "layer range outside architecture");
    Architecture out = a;
    out.periodic_depth.reset();
    out.layers.assign(a.layers.begin() + start, a.layers.begin() + end + 1);
    return out;
}

// ---------------------------------------------------------------------------
// Block decomposition

struct Block {
    int start = 0;
    int end = 0;
    int size = 0;  // ℓ_i, possibly counting merging layers only

    friend bool operator==(const Block&, const Block&) = default;
};

struct BlockDecomposition {
    std::vector<Block> blocks;
    std::vector<std::pair<int, int>> interstitial;  // inclusive layer ranges
    bool count_merging_only = false;

    int count() const noexcept { return static_cast<int>(blocks.size()); }

    std::optional<double> mean_block_size() const {
        if (blocks.empty()) return std::nullopt;
        double s = 0.0;
        for (const auto& b : blocks) s += b.size;
        return s / static_cast<double>(blocks.size());
    }
};

namespace detail {

inline int count_block_layers(const Architecture& a, int start, int end, bool merging_only) {
    if (!merging_only) return end - start + 1;
    DisjointSets sets(a.num_sites);
    int n = 0;
    for (int i = start; i <= end; ++i)
        if (apply_layer(sets, a.layers[i])) ++n;
    return n;
}

inline void fill_interstitial(BlockDecomposition& d, int depth) {
    int cursor = 0;
    for (const auto& b : d.blocks) {
        if (b.start > cursor) d.interstitial.emplace_back(cursor, b.start - 1);
        cursor = b.end + 1;
    }
    if (cursor < depth) d.interstitial.emplace_back(cursor, depth - 1);
}

}  // namespace detail

/// Scans left to right and closes a block at the first layer where the accumulated
/// union graph spans all sites.
inline BlockDecomposition greedy_block_decomposition(const Architecture& a, bool count_merging_only = false) {
    BlockDecomposition d;
    d.count_merging_only = count_merging_only;
    int start = 0;
    while (start < a.depth()) {
        DisjointSets sets(a.num_sites);
        int merging = 0;
        int end = -1;
        for (int i = start; i < a.depth(); ++i) {
            if (apply_layer(sets, a.layers[i])) ++merging;
            if (sets.components() == 1) {
                end = i;
                break;
            }
        }
        if (end < 0) break;
        d.blocks.push_back({start, end, count_merging_only ? merging : end - start + 1});
        start = end + 1;
    }
    detail::fill_interstitial(d, a.depth());
    return d;
}

/// Manual decomposition: each (start, end) must be a connected block, blocks ordered and
/// non-overlapping; gaps become interstitial ranges.
inline BlockDecomposition block_decomposition_from_ranges(const Architecture& a,
                                                          const std::vector<std::pair<int, int>>& ranges,
                                                          bool count_merging_only = false) {
    BlockDecomposition d;
    d.count_merging_only = count_merging_only;
    int cursor = 0;
    for (const auto& [s, e] : ranges) {
        require(s >= cursor && s <= e && e < a.depth(), "block ranges must be ordered, disjoint and in range");
        require(is_connected_block(a, s, e),
                "layers " + std::to_string(s) + ".." + std::to_string(e) + " do not form a connected block");
        d.blocks.push_back({s, e, detail::count_block_layers(a, s, e, count_merging_only)});
        cursor = e + 1;
    }
    detail::fill_interstitial(d, a.depth());
    return d;
}

// ---------------------------------------------------------------------------
// Generators

enum class Boundary { periodic, open };

/// Gates (2j, 2j+1) then (2j−1, 2j); periodic boundaries wrap the last gate and need
/// even N, open boundaries also allow odd N.
inline Architecture brickwork_1d(int n, Boundary bc, double q = 2.0) {
    require(n >= 2, "1D brickwork needs at least 2 sites");
    require(bc == Boundary::open || n % 2 == 0, "periodic 1D brickwork needs an even number of sites");
    Architecture a;
    a.num_sites = n;
    a.local_dim = q;
    a.periodic_depth = 2;
    Layer first, second;
    for (int j = 0; 2 * j + 1 < n; ++j) first.gates.push_back({2 * j, 2 * j + 1});
    for (int left = 1; left < n; left += 2) {
        const int right = left + 1;
        if (right < n)
            second.gates.push_back({left, right});
        else if (bc == Boundary::periodic)
            second.gates.push_back({left, 0});
    }
    a.layers = {std::move(first), std::move(second)};
    return a;
}

/// Repeats the layer pattern of `period` k times.
inline Architecture repeat_periods(const Architecture& period, int k) {
    require(k >= 1, "period count must be positive");
    Architecture a = period;
    a.periodic_depth = period.depth();
    a.layers.clear();
    for (int i = 0; i < k; ++i) a.layers.insert(a.layers.end(), period.layers.begin(), period.layers.end());
    return a;
}

/// D-dimensional brickwork on the L^D torus: layer i < D pairs (x, x+e_i) with x_i even,
/// layer D+i the same direction with x_i odd. Site index is row-major in x.
inline Architecture brickwork_ddim(int side, int dims, double q = 2.0) {
    require(side >= 2 && side % 2 == 0, "brickwork side length L must be even");
    require(dims >= 1, "dimension D must be positive");
    int n = 1;
    for (int i = 0; i < dims; ++i) {
        require(n <= (1 << 24) / side, "lattice too large");
        n *= side;
    }
    auto coords = [&](int idx) {
        std::vector<int> x(dims);
        for (int i = dims - 1; i >= 0; --i) {
            x[i] = idx % side;
            idx /= side;
        }
        return x;
    };
    auto index = [&](const std::vector<int>& x) {
        int idx = 0;
        for (int i = 0; i < dims; ++i) idx = idx * side + x[i];
        return idx;
    };
    Architecture a;
    a.num_sites = n;
    a.local_dim = q;
    a.periodic_depth = 2 * dims;
    for (int parity = 0; parity < 2; ++parity) {
        for (int dir = 0; dir < dims; ++dir) {
            Layer l;
            for (int s = 0; s < n; ++s) {
                auto x = coords(s);
                if (x[dir] % 2 != parity) continue;
                auto y = x;
                y[dir] = (y[dir] + 1) % side;
                l.gates.push_back({s, index(y)});
            }
            a.layers.push_back(std::move(l));
        }
    }
    return a;
}

/// Random architecture whose layers together connect all sites. With `complete`, each
/// layer is a uniformly random perfect matching (N even); otherwise a random matching
/// of random size.
template <class Rng>
Architecture random_connected(int n, int num_layers, Rng& rng, double q = 2.0, bool complete = true) {
    require(n >= 2, "N must be at least 2");
    require(num_layers >= 1, "need at least one layer");
    if (complete) require(n % 2 == 0, "complete layers need an even number of sites");
    for (int attempt = 0; attempt < 10000; ++attempt) {
        Architecture a;
        a.num_sites = n;
        a.local_dim = q;
        for (int li = 0; li < num_layers; ++li) {
            std::vector<int> sites(n);
            std::iota(sites.begin(), sites.end(), 0);
            std::shuffle(sites.begin(), sites.end(), rng);
            int pairs = n / 2;
            if (!complete) pairs = std::uniform_int_distribution<int>(1, n / 2)(rng);
            Layer l;
            for (int p = 0; p < pairs; ++p) {
                Gate g{sites[2 * p], sites[2 * p + 1]};
                std::sort(g.begin(), g.end());
                l.gates.push_back(std::move(g));
            }
            a.layers.push_back(std::move(l));
        }
        if (is_connected(a)) return a;
    }
    throw InvalidInput("could not sample a connected architecture with " + std::to_string(num_layers) + " layers");
}

// ---------------------------------------------------------------------------
// Interaction graphs and nondeterministic gate sequences

struct InteractionGraph {
    int num_sites = 0;
    std::vector<std::pair<int, int>> edges;

    static InteractionGraph path(int n) {
        InteractionGraph g{n, {}};
        for (int i = 0; i + 1 < n; ++i) g.edges.emplace_back(i, i + 1);
        return g;
    }

    static InteractionGraph complete(int n) {
        InteractionGraph g{n, {}};
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) g.edges.emplace_back(i, j);
        return g;
    }

    bool connected() const {
        DisjointSets s(num_sites);
        for (auto [a, b] : edges) s.unite(a, b);
        return s.components() == 1;
    }
};

/// n_g single-gate layers, each edge drawn i.i.d. uniformly from the interaction graph.
template <class Rng>
Architecture sample_gate_sequence(const InteractionGraph& g, int n_gates, Rng& rng, double q = 2.0) {
    require(!g.edges.empty(), "interaction graph has no edges");
    require(n_gates >= 1, "need at least one gate");
    std::uniform_int_distribution<std::size_t> pick(0, g.edges.size() - 1);
    Architecture a;
    a.num_sites = g.num_sites;
    a.local_dim = q;
    for (int i = 0; i < n_gates; ++i) {
        const auto& [u, v] = g.edges[pick(rng)];
        a.layers.push_back(Layer{{Gate{u, v}}});
    }
    return a;
}

}  // namespace tdesign
