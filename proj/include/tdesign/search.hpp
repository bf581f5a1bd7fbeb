#pragma once

// Stochastic exploration: simulated annealing towards maximal-SSV architectures and
// connection statistics of random gate sequences.

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "tdesign/architecture.hpp"
#include "tdesign/bounds.hpp"
#include "tdesign/errors.hpp"
#include "tdesign/perm_core.hpp"
#include "tdesign/spectral.hpp"

namespace tdesign {

// ---------------------------------------------------------------------------
// Simulated annealing

enum class ConnectivityPolicy { reject, penalize };

inline const char* to_string(ConnectivityPolicy p) { return p == ConnectivityPolicy::reject ? "reject" : "penalize"; }

struct AnnealConfig {
    int iterations = 5000;
    double move_mean = 1.0;
    std::optional<double> cooling;  // per-iteration factor; default reaches 1e-3 of t_start
    std::optional<double> t_start;  // auto: std of the objective over calibration samples
    int calibration_samples = 50;
    std::uint64_t seed = 0;
    ConnectivityPolicy policy = ConnectivityPolicy::reject;
    double penalty = 1.0;
    std::size_t dim_guard = kDenseLimit;
};

struct AnnealStep {
    int iteration = 0;
    double temperature = 0.0;
    double beta = 0.0;
    double ssv = 0.0;       // current state after this step
    double proposed = 0.0;  // objective of the proposal (penalized if disconnected)
    bool accepted = false;
    bool disconnected = false;
};

struct AnnealResult {
    Architecture best_arch;
    double best_ssv = 0.0;
    double t_start = 0.0;
    double cooling = 0.0;
    int accepted = 0;
    int rejected_disconnected = 0;
    std::vector<AnnealStep> trace;
};

/// (t!+1)-th largest singular value of the whole circuit's moment operator; for a
/// connected circuit this is the SSV, for a disconnected one it is 1.
inline double anneal_objective(const Architecture& a, int t, std::size_t dense_limit = kDenseLimit) {
    const auto sv = singular_values(transfer_matrix(a, 0, a.depth() - 1, t, dense_limit), dense_limit);
    const auto idx = static_cast<Eigen::Index>(factorial(t));
    return idx < sv.size() ? sv(idx) : 0.0;
}

namespace detail {

template <class Rng>
bool add_random_gate(Architecture& a, Rng& rng) {
    const int n = a.num_sites;
    std::vector<std::pair<int, std::pair<int, int>>> options;
    for (int li = 0; li < a.depth(); ++li) {
        std::vector<char> used(n, 0);
        for (const auto& g : a.layers[li].gates)
            for (int s : g) used[s] = 1;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (!used[i] && !used[j]) options.push_back({li, {i, j}});
    }
    if (options.empty()) return false;
    const auto& [li, e] = options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
    a.layers[li].gates.push_back(Gate{e.first, e.second});
    return true;
}

template <class Rng>
bool delete_random_gate(Architecture& a, Rng& rng) {
    std::vector<std::pair<int, int>> options;
    for (int li = 0; li < a.depth(); ++li)
        for (int gi = 0; gi < static_cast<int>(a.layers[li].gates.size()); ++gi) options.emplace_back(li, gi);
    if (options.empty()) return false;
    const auto [li, gi] = options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
    auto& gates = a.layers[li].gates;
    gates.erase(gates.begin() + gi);
    return true;
}

/// A batch of geometric(mean move_mean, at least one) edge additions/deletions.
template <class Rng>
Architecture propose(const Architecture& a, double move_mean, Rng& rng) {
    Architecture b = a;
    std::geometric_distribution<int> count(1.0 / (1.0 + move_mean));
    const int moves = std::max(1, count(rng));
    std::bernoulli_distribution coin(0.5);
    for (int m = 0; m < moves; ++m) {
        if (coin(rng)) {
            if (!add_random_gate(b, rng)) delete_random_gate(b, rng);
        } else {
            if (!delete_random_gate(b, rng)) add_random_gate(b, rng);
        }
    }
    return b;
}

inline double stddev(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    double acc = 0.0;
    for (double x : v) acc += (x - mean) * (x - mean);
    return std::sqrt(acc / (v.size() - 1));
}

}  // namespace detail

/// Metropolis search over N-site circuits with num_layers layers of 2-site gates,
/// maximizing the (t!+1)-th singular value. Deterministic in config.seed.
inline AnnealResult anneal_max_ssv(int n, double q, int t, int num_layers, const AnnealConfig& cfg) {
    require(n >= 2, "N must be at least 2");
    require(num_layers >= 1, "need at least one layer");
    require(cfg.iterations >= 1, "iterations must be positive");
    require(cfg.move_mean > 0.0, "move_mean must be positive");
    require(!cfg.cooling || (*cfg.cooling > 0.0 && *cfg.cooling < 1.0), "cooling factor must lie in (0, 1)");
    site_space(t, q, n, cfg.dim_guard);
    std::mt19937_64 rng(cfg.seed);

    AnnealResult res;
    if (cfg.t_start) {
        require(*cfg.t_start > 0.0, "starting temperature must be positive");
        res.t_start = *cfg.t_start;
    } else {
        std::vector<double> vals;
        for (int i = 0; i < cfg.calibration_samples; ++i)
            vals.push_back(anneal_objective(random_connected(n, num_layers, rng, q, false), t, cfg.dim_guard));
        res.t_start = detail::stddev(vals);
        if (!(res.t_start > 1e-12)) res.t_start = 1e-2;
    }
    res.cooling = cfg.cooling ? *cfg.cooling : std::pow(1e-3, 1.0 / cfg.iterations);

    auto score = [&](const Architecture& a, bool& disconnected) {
        disconnected = !is_connected(a);
        if (disconnected && cfg.policy == ConnectivityPolicy::reject) return 0.0;
        const double v = anneal_objective(a, t, cfg.dim_guard);
        return disconnected ? v - cfg.penalty : v;
    };

    Architecture cur = random_connected(n, num_layers, rng, q, false);
    bool disc = false;
    double cur_val = score(cur, disc);
    res.best_arch = cur;
    res.best_ssv = cur_val;

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double temp = res.t_start;
    for (int it = 0; it < cfg.iterations; ++it) {
        AnnealStep step;
        step.iteration = it;
        step.temperature = temp;
        step.beta = 1.0 / temp;
        Architecture cand = detail::propose(cur, cfg.move_mean, rng);
        const double val = score(cand, step.disconnected);
        step.proposed = val;
        if (step.disconnected && cfg.policy == ConnectivityPolicy::reject) {
            ++res.rejected_disconnected;
        } else {
            const double delta = val - cur_val;
            step.accepted = delta >= 0.0 || unit(rng) < std::exp(delta / temp);
        }
        if (step.accepted) {
            cur = std::move(cand);
            cur_val = val;
            ++res.accepted;
            if (!step.disconnected && cur_val > res.best_ssv) {
                res.best_ssv = cur_val;
                res.best_arch = cur;
            }
        }
        step.ssv = cur_val;
        res.trace.push_back(step);
        temp *= res.cooling;
    }
    return res;
}

inline nlohmann::ordered_json to_json(const AnnealConfig& c) {
    nlohmann::ordered_json j;
    j["iterations"] = c.iterations;
    j["move_mean"] = c.move_mean;
    j["cooling"] = c.cooling ? nlohmann::ordered_json(*c.cooling) : nlohmann::ordered_json("auto");
    j["t_start"] = c.t_start ? nlohmann::ordered_json(*c.t_start) : nlohmann::ordered_json("auto");
    j["calibration_samples"] = c.calibration_samples;
    j["seed"] = c.seed;
    j["connectivity_policy"] = to_string(c.policy);
    return j;
}

inline nlohmann::ordered_json to_json(const AnnealResult& r, bool with_trace = true) {
    nlohmann::ordered_json j;
    j["best_ssv"] = r.best_ssv;
    j["best_arch"] = to_json(r.best_arch);
    j["t_start"] = r.t_start;
    j["cooling"] = r.cooling;
    j["accepted"] = r.accepted;
    j["rejected_disconnected"] = r.rejected_disconnected;
    if (with_trace) {
        auto& tr = j["trace"] = nlohmann::ordered_json::array();
        for (const auto& s : r.trace)
            tr.push_back({{"iteration", s.iteration},
                          {"beta", s.beta},
                          {"ssv", s.ssv},
                          {"proposed", s.proposed},
                          {"accepted", s.accepted},
                          {"disconnected", s.disconnected}});
    }
    return j;
}

// ---------------------------------------------------------------------------
// Random gate sequences

struct EnsembleStats {
    int num_sites = 0;
    int trials = 0;
    std::vector<int> gates_to_connect;
    double mean = 0.0;
    double std_dev = 0.0;
    int min = 0;
    int max = 0;
    // fixed-n_g mode
    std::optional<int> fixed_gates;
    std::vector<int> k_samples;
    std::vector<double> ell_bar_samples;
    std::optional<double> mean_k;
    std::optional<double> mean_ell_bar;
};

/// Gates drawn i.i.d. uniformly over edges until the sites connect, per trial. With
/// fixed_gates, also samples n_g-gate sequences and records their greedy (k, ℓ̄).
template <class Rng>
EnsembleStats ensemble_connection_stats(const InteractionGraph& g, int trials, Rng& rng,
                                        std::optional<int> fixed_gates = std::nullopt) {
    require(g.num_sites >= 2, "need at least 2 sites");
    require(g.connected(), "interaction graph must be connected");
    require(trials >= 1, "trials must be positive");
    EnsembleStats st;
    st.num_sites = g.num_sites;
    st.trials = trials;
    std::uniform_int_distribution<std::size_t> pick(0, g.edges.size() - 1);
    for (int tr = 0; tr < trials; ++tr) {
        DisjointSets sets(g.num_sites);
        int count = 0;
        while (sets.components() > 1) {
            const auto& [u, v] = g.edges[pick(rng)];
            sets.unite(u, v);
            ++count;
        }
        st.gates_to_connect.push_back(count);
    }
    std::vector<double> as_double(st.gates_to_connect.begin(), st.gates_to_connect.end());
    st.mean = std::accumulate(as_double.begin(), as_double.end(), 0.0) / trials;
    st.std_dev = detail::stddev(as_double);
    st.min = *std::min_element(st.gates_to_connect.begin(), st.gates_to_connect.end());
    st.max = *std::max_element(st.gates_to_connect.begin(), st.gates_to_connect.end());

    if (fixed_gates) {
        st.fixed_gates = fixed_gates;
        double sk = 0.0, sl = 0.0;
        int with_blocks = 0;
        for (int tr = 0; tr < trials; ++tr) {
            const auto d = greedy_block_decomposition(sample_gate_sequence(g, *fixed_gates, rng));
            st.k_samples.push_back(d.count());
            sk += d.count();
            if (auto m = d.mean_block_size()) {
                st.ell_bar_samples.push_back(*m);
                sl += *m;
                ++with_blocks;
            }
        }
        st.mean_k = sk / trials;
        if (with_blocks > 0) st.mean_ell_bar = sl / with_blocks;
    }
    return st;
}

inline nlohmann::ordered_json to_json(const EnsembleStats& s) {
    nlohmann::ordered_json j;
    j["N"] = s.num_sites;
    j["trials"] = s.trials;
    j["summary"] = {{"mean", s.mean}, {"std", s.std_dev}, {"min", s.min}, {"max", s.max}};
    j["gates_to_connect"] = s.gates_to_connect;
    if (s.fixed_gates) {
        nlohmann::ordered_json f;
        f["n_g"] = *s.fixed_gates;
        f["k_samples"] = s.k_samples;
        f["ell_bar_samples"] = s.ell_bar_samples;
        f["mean_k"] = s.mean_k ? nlohmann::ordered_json(*s.mean_k) : nlohmann::ordered_json(nullptr);
        f["mean_ell_bar"] = s.mean_ell_bar ? nlohmann::ordered_json(*s.mean_ell_bar) : nlohmann::ordered_json(nullptr);
        j["fixed_gates"] = f;
    }
    return j;
}

// ---------------------------------------------------------------------------
// Ensemble-averaged error bound

struct AveragedBoundReport {
    int samples = 0;
    int num_sites = 0;
    double q = 0.0;
    int t = 0;
    double eps = 0.0;
    std::optional<CValue> c_used;
    int disconnected_samples = 0;   // contribute the trivial bound (no blocks)
    double mean_k = 0.0;
    double mean_ell_bar = 0.0;
    double mean_layers_per_block = 0.0;
    // ln of the sampled error bound 2^{...}·Π s_*(ℓ_i), arithmetic mean over samples
    double log_mean_bound = 0.0;
    // the average of ln(bound); below log_mean_bound, so not a bound on the mean
    double mean_log_bound = 0.0;
    // same with every block replaced by the sample's mean block size
    double log_mean_bound_mean_block = 0.0;
    double mean_k_star = 0.0;
    bool satisfied = false;  // log_mean_bound <= ln ε
    std::optional<double> conjectured_k_threshold;
    std::optional<double> conjectured_gate_estimate;
    std::optional<double> conjectured_log_mean_bound;
};

namespace detail {

inline double log_sum_exp(const std::vector<double>& v) {
    const double m = *std::max_element(v.begin(), v.end());
    if (!std::isfinite(m)) return m;
    double acc = 0.0;
    for (double x : v) acc += std::exp(x - m);
    return m + std::log(acc);
}

}  // namespace detail

/// Samples architectures, evaluates the block-product error bound on each and averages
/// the bound itself (not its logarithm). C is taken at q when every sample is complete,
/// at √q otherwise.
template <class Rng>
AveragedBoundReport averaged_bound_check(const std::function<Architecture(Rng&)>& sampler, int t, double eps,
                                         int samples, Rng& rng, bool conjectured = false,
                                         bool allow_conjectured_c = false) {
    require(samples >= 1, "samples must be positive");
    std::vector<Architecture> archs;
    bool all_complete = true;
    for (int i = 0; i < samples; ++i) {
        archs.push_back(sampler(rng));
        validate(archs.back());
        all_complete = all_complete && is_complete(archs.back());
    }
    AveragedBoundReport r;
    r.samples = samples;
    r.num_sites = archs.front().num_sites;
    r.q = archs.front().local_dim;
    r.t = t;
    r.eps = eps;
    for (const auto& a : archs)
        require(a.num_sites == r.num_sites && a.local_dim == r.q, "samples must share N and q");
    r.c_used = tightest_c(all_complete ? r.q : std::sqrt(r.q), t, allow_conjectured_c);
    require(r.c_used.has_value(), "no admissible C for these parameters");
    const double pref = log_prefactor(r.num_sites, r.q, t, false);
    const double conj_log = 2.0 * std::log((r.q * r.q + 1.0) / (2.0 * r.q));

    std::vector<double> logs, logs_mean_block, logs_conj;
    double sum_k = 0.0, sum_ell = 0.0, sum_lpb = 0.0, sum_kstar = 0.0;
    int with_blocks = 0;
    for (const auto& a : archs) {
        const auto d = greedy_block_decomposition(a);
        double lx = pref;
        for (const auto& b : d.blocks)
            if (b.size > 1) lx -= log_inv_s_star(r.c_used->value, b.size - 1.0);
        logs.push_back(lx);
        logs_conj.push_back(pref - d.count() * conj_log);
        sum_k += d.count();
        sum_lpb += d.count() > 0 ? static_cast<double>(a.depth()) / d.count() : a.depth();
        if (auto m = d.mean_block_size()) {
            ++with_blocks;
            sum_ell += *m;
            const double li = *m > 1.0 ? log_inv_s_star(r.c_used->value, *m - 1.0) : 0.0;
            logs_mean_block.push_back(pref - d.count() * li);
            if (li > 0.0) sum_kstar += k_star_from_log(pref, eps, li);
        } else {
            ++r.disconnected_samples;
            logs_mean_block.push_back(pref);
        }
    }
    const double ln_n = std::log(static_cast<double>(samples));
    r.mean_k = sum_k / samples;
    r.mean_ell_bar = with_blocks ? sum_ell / with_blocks : 0.0;
    r.mean_layers_per_block = sum_lpb / samples;
    r.mean_k_star = with_blocks ? sum_kstar / with_blocks : 0.0;
    r.log_mean_bound = detail::log_sum_exp(logs) - ln_n;
    r.mean_log_bound = std::accumulate(logs.begin(), logs.end(), 0.0) / samples;
    r.log_mean_bound_mean_block = detail::log_sum_exp(logs_mean_block) - ln_n;
    r.satisfied = r.log_mean_bound <= std::log(eps);
    if (conjectured) {
        r.conjectured_k_threshold = conjectured_block_count(r.num_sites, r.q, t, eps);
        r.conjectured_gate_estimate = *r.conjectured_k_threshold * r.mean_layers_per_block;
        r.conjectured_log_mean_bound = detail::log_sum_exp(logs_conj) - ln_n;
    }
    return r;
}

inline nlohmann::ordered_json to_json(const AveragedBoundReport& r) {
    nlohmann::ordered_json j;
    j["samples"] = r.samples;
    j["N"] = r.num_sites;
    j["q"] = r.q;
    j["t"] = r.t;
    j["eps"] = r.eps;
    j["c_used"] = r.c_used ? to_json(*r.c_used) : nlohmann::ordered_json(nullptr);
    j["disconnected_samples"] = r.disconnected_samples;
    j["mean_k"] = r.mean_k;
    j["mean_ell_bar"] = r.mean_ell_bar;
    j["mean_layers_per_block"] = r.mean_layers_per_block;
    j["log_mean_bound"] = r.log_mean_bound;
    j["mean_log_bound"] = {{"value", r.mean_log_bound}, {"is_upper_bound", false}};
    j["log_mean_bound_mean_block"] = r.log_mean_bound_mean_block;
    j["mean_k_star"] = r.mean_k_star;
    j["satisfied"] = r.satisfied;
    if (r.conjectured_k_threshold) {
        j["conjectured"] = {{"k_threshold", *r.conjectured_k_threshold},
                            {"gate_estimate", *r.conjectured_gate_estimate},
                            {"log_mean_bound", *r.conjectured_log_mean_bound}};
    }
    return j;
}

}  // namespace tdesign
