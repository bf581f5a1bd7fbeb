#pragma once

// Closed-form design-depth bounds: the C(q,t) catalog, s_* and k_* for periodic,
// incomplete and aperiodic architectures, the conjectured block count, and the
// hypercube/two-cluster layer values for higher-dimensional brickworks.
//
// All logarithms are natural.

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tdesign/architecture.hpp"
#include "tdesign/decompose.hpp"
#include "tdesign/errors.hpp"
#include "tdesign/perm_core.hpp"

namespace tdesign {

// ---------------------------------------------------------------------------
// C(q, t) catalog

enum class CSource {
    brandao_general,
    brandao_q2plus,
    haferkamp_q2,
    hunterjones_t2_open,
    hunterjones_t2_periodic,
    largeq_leading,
    conjectured,
};

inline const char* to_string(CSource s) {
    switch (s) {
        case CSource::brandao_general: return "brandao_general";
        case CSource::brandao_q2plus: return "brandao_q2plus";
        case CSource::haferkamp_q2: return "haferkamp_q2";
        case CSource::hunterjones_t2_open: return "hunterjones_t2_open";
        case CSource::hunterjones_t2_periodic: return "hunterjones_t2_periodic";
        case CSource::largeq_leading: return "largeq_leading";
        default: return "conjectured";
    }
}

struct CValue {
    double value = 0.0;
    CSource source = CSource::conjectured;
    std::string q_range;
    std::string t_range;
    std::string boundary;
    bool rigorous = true;
    std::string note;
};

inline nlohmann::ordered_json to_json(const CValue& c) {
    nlohmann::ordered_json j;
    j["value"] = c.value;
    j["source"] = to_string(c.source);
    j["assumptions"] = {{"q_range", c.q_range}, {"t_range", c.t_range}, {"boundary", c.boundary}};
    j["rigorous"] = c.rigorous;
    if (!c.note.empty()) j["note"] = c.note;
    return j;
}

namespace detail {

inline bool near_integer(double x) { return std::abs(x - std::round(x)) < 1e-9; }

/// ⌈log_q(4t)⌉ with a guard against ln rounding just above an exact power.
inline double ceil_log(double q, int t) { return std::ceil(std::log(4.0 * t) / std::log(q) - 1e-12); }

}  // namespace detail

/// Every catalogued C(q,t) whose assumptions admit (q, t). The conjectured value is
/// always present and carries rigorous = false.
inline std::vector<CValue> c_catalog(double q, int t) {
    require(q > 1.0, "C(q,t) needs q > 1");
    require(t >= 2, "C(q,t) needs t >= 2");
    std::vector<CValue> out;
    const double lq = std::log(q);
    const double sharp = std::log((q * q + 1.0) / (2.0 * q));
    const std::string log_note = "log base of the t exponent taken as natural";

    if (q >= 2.0 && detail::near_integer(q)) {
        const double c = detail::ceil_log(q, t);
        const double v = 261500.0 * c * c * q * q * std::pow(t, 5.0 + 3.1 / lq);
        out.push_back({v, CSource::brandao_general, "integer q >= 2", "t >= 2", "open or periodic", true, log_note});
    }
    if (detail::near_integer(q * q) && q * q >= 2.0) {
        const double c = detail::ceil_log(q, t);
        const double q2 = q * q;
        const double pre = 234.0 * (q2 + 1.0) * std::exp(2.5 * std::log(4.0) * (1.0 + std::log(q2 + 1.0)) / lq + 1.0);
        const double expo = 5.0 + 5.0 * (1.0 + std::log(1.0 + 1.0 / q2)) / (2.0 * lq);
        out.push_back({pre * c * c * std::pow(t, expo), CSource::brandao_q2plus, "integer q^2 >= 2", "t >= 2",
                       "open or periodic", true, log_note});
    }
    if (std::abs(q - 2.0) < 1e-12) {
        const double alpha = 1e13;
        const double lt = std::log(static_cast<double>(t));
        const double v = alpha / (2.0 * std::log(2.0)) * std::pow(lt, 5) *
                         std::pow(t, 4.0 + 3.0 / std::sqrt(std::log2(static_cast<double>(t))));
        out.push_back({v, CSource::haferkamp_q2, "q = 2", "t >= 2", "open or periodic", true, ""});
    }
    if (t == 2) {
        out.push_back({1.0 / (2.0 * sharp), CSource::hunterjones_t2_open, "q > 1", "t = 2", "open", true, ""});
        out.push_back({1.0 / (4.0 * sharp), CSource::hunterjones_t2_periodic, "q > 1", "t = 2", "periodic", true, ""});
    }
    if (q > 2.0) {
        out.push_back({1.0 / (4.0 * std::log(q / 2.0)), CSource::largeq_leading, "q -> infinity", "t >= 2", "periodic",
                       false, "leading order in 1/log q only"});
    }
    out.push_back({1.0 / (4.0 * sharp), CSource::conjectured, "q > 1", "t >= 2", "periodic", false,
                   "conjectured sharp value"});
    return out;
}

/// Smallest admissible C; non-rigorous entries only when allowed.
inline std::optional<CValue> tightest_c(double q, int t, bool allow_conjectured = false) {
    std::optional<CValue> best;
    for (const auto& c : c_catalog(q, t)) {
        if (!c.rigorous && !allow_conjectured) continue;
        if (!best || c.value < best->value) best = c;
    }
    return best;
}

// ---------------------------------------------------------------------------
// s_* and k_*

/// -ln(1 - (1 - e^{-1/(2C)})^exponent), i.e. ln(1/s_*), without cancellation.
inline double log_inv_s_star(double c, double exponent) {
    require(c > 0.0, "C must be positive");
    require(exponent > 0.0, "block exponent must be positive");
    const double a = -std::expm1(-1.0 / (2.0 * c));
    return -std::log1p(-std::exp(exponent * std::log(a)));
}

/// 1 − (1 − e^{−1/(2C)})^{ℓ−1}
inline double s_star_periodic(double c, double ell) {
    require(c > 0.0, "C must be positive");
    require(ell >= 2.0, "a block needs at least 2 layers to merge clusters");
    const double a = -std::expm1(-1.0 / (2.0 * c));
    return -std::expm1((ell - 1.0) * std::log(a));
}

/// 8⌈log₂⌊log₂(N+1)⌋⌉ + 2
inline int x_expansion(int n) { return loglog_layer_ceiling(n); }

/// ln of the prefactor multiplying s_*^k: 2Nt ln q, or with the tight term
/// ln(min(t!, q^{2t})^N − min(t!, (q^N)!)).
inline double log_prefactor(int n, double q, int t, bool tight_log_term) {
    require(n >= 1, "N must be positive");
    require(q > 1.0, "q must exceed 1");
    require(t >= 1, "t must be positive");
    if (!tight_log_term) return 2.0 * n * t * std::log(q);
    const double lfact = std::lgamma(t + 1.0);
    const double per_site = std::min(lfact, 2.0 * t * std::log(q));
    const double big = n * per_site;
    // (q^N)! as a log-gamma; only its comparison with t! matters
    const double qn = std::pow(q, n);
    const double small = std::isfinite(qn) ? std::min(lfact, std::lgamma(qn + 1.0)) : lfact;
    require(big > small + 1e-12, "tight log term is non-positive for these parameters");
    return big + std::log(-std::expm1(small - big));
}

inline double k_star_from_log(double log_pref, double eps, double log_inv_s) {
    require(eps > 0.0 && eps < 1.0, "epsilon must lie in (0, 1)");
    require(log_inv_s > 0.0, "s_* must lie in (0, 1)");
    return (log_pref + std::log(1.0 / eps)) / log_inv_s;
}

/// (2Nt ln q + ln 1/ε) / ln(1/s_*)
inline double k_star(int n, double q, int t, double eps, double s_star, bool tight_log_term = false) {
    require(s_star > 0.0 && s_star < 1.0, "s_* must lie in (0, 1)");
    return k_star_from_log(log_prefactor(n, q, t, tight_log_term), eps, -std::log(s_star));
}

/// Block count of the conjectured bound: (2Nt ln q + ln 1/ε) / (2 ln((q²+1)/2q)).
inline double conjectured_block_count(int n, double q, int t, double eps) {
    return k_star_from_log(log_prefactor(n, q, t, false), eps, 2.0 * std::log((q * q + 1.0) / (2.0 * q)));
}

// ---------------------------------------------------------------------------
// Bound pipeline

enum class TheoremPath {
    complete_periodic,
    incomplete_periodic,
    incomplete_integer,
    aperiodic,
    conjectured,
};

inline const char* to_string(TheoremPath p) {
    switch (p) {
        case TheoremPath::complete_periodic: return "complete_periodic";
        case TheoremPath::incomplete_periodic: return "incomplete_periodic";
        case TheoremPath::incomplete_integer: return "incomplete_integer";
        case TheoremPath::aperiodic: return "aperiodic";
        default: return "conjectured";
    }
}

struct BoundOptions {
    int t = 2;
    double eps = 0.01;
    bool tight_log_term = false;
    bool allow_conjectured = false;
    bool count_merging_only = false;
    std::optional<std::vector<std::pair<int, int>>> block_ranges;
};

struct BoundReport {
    TheoremPath path = TheoremPath::complete_periodic;
    int num_sites = 0;
    double q = 0.0;
    int t = 0;
    double eps = 0.0;
    std::optional<double> ell;
    std::optional<double> ell_bar;
    std::optional<int> blocks;  // connected blocks available in the decomposition
    double s_star = 0.0;
    double k_star = 0.0;
    long k_star_ceil = 0;
    std::optional<long> d_star;
    double depth_estimate = 0.0;
    std::optional<CValue> c_used;
    bool tight_log_term = false;
    bool conjectured = false;
    bool tightest = false;
    bool chain_ok = false;
    std::optional<bool> satisfied;  // blocks >= k_star, for block-count paths
};

namespace detail {

inline BoundReport make_report(TheoremPath path, int n, double q, const BoundOptions& opt, double log_inv_s) {
    BoundReport r;
    r.path = path;
    r.num_sites = n;
    r.q = q;
    r.t = opt.t;
    r.eps = opt.eps;
    r.tight_log_term = opt.tight_log_term;
    const double pref = log_prefactor(n, q, opt.t, opt.tight_log_term);
    r.s_star = std::exp(-log_inv_s);
    r.k_star = k_star_from_log(pref, opt.eps, log_inv_s);
    r.k_star_ceil = static_cast<long>(std::ceil(r.k_star - 1e-12));
    r.chain_ok = pref - r.k_star * log_inv_s <= std::log(opt.eps) + std::log1p(1e-9);
    return r;
}

inline std::optional<CValue> pick_c(double q, int t, bool allow_conjectured) {
    try {
        return tightest_c(q, t, allow_conjectured);
    } catch (const InvalidInput&) {
        return std::nullopt;
    }
}

inline void mark_tightest(std::vector<BoundReport>& reports, bool allow_conjectured) {
    BoundReport* best = nullptr;
    for (auto& r : reports) {
        if (r.conjectured && !allow_conjectured) continue;
        if (!best || r.depth_estimate < best->depth_estimate) best = &r;
    }
    if (best) best->tightest = true;
}

inline void add_block_paths(std::vector<BoundReport>& out, const BlockDecomposition& d, int n, double q, bool complete,
                            int total_layers, const BoundOptions& opt) {
    if (d.count() == 0) return;
    const double ell_bar = *d.mean_block_size();
    const double layers_per_block = static_cast<double>(total_layers) / d.count();
    const double q_eff = complete ? q : std::sqrt(q);
    if (ell_bar > 1.0) {
        if (auto c = pick_c(q_eff, opt.t, opt.allow_conjectured)) {
            auto r = make_report(TheoremPath::aperiodic, n, q, opt, log_inv_s_star(c->value, ell_bar - 1.0));
            r.ell_bar = ell_bar;
            r.blocks = d.count();
            r.c_used = c;
            r.conjectured = !c->rigorous;
            r.depth_estimate = r.k_star_ceil * layers_per_block;
            r.satisfied = d.count() >= r.k_star;
            out.push_back(std::move(r));
        }
    }
    const double log_inv = 2.0 * std::log((q * q + 1.0) / (2.0 * q));
    auto r = make_report(TheoremPath::conjectured, n, q, opt, log_inv);
    r.blocks = d.count();
    r.ell_bar = ell_bar;
    r.conjectured = true;
    r.depth_estimate = r.k_star_ceil * layers_per_block;
    r.satisfied = d.count() >= r.k_star;
    out.push_back(std::move(r));
}

}  // namespace detail

/// Evaluates every theorem path that applies to a block decomposition of an N-site
/// circuit and marks the shallowest non-conjectured one.
inline std::vector<BoundReport> bound_pipeline(const BlockDecomposition& d, int n, double q, bool complete,
                                               const BoundOptions& opt) {
    require(d.count() >= 1, "the circuit never connects all sites; no bound applies");
    int total_layers = 0;
    for (const auto& b : d.blocks) total_layers = std::max(total_layers, b.end + 1);
    for (const auto& [s, e] : d.interstitial) total_layers = std::max(total_layers, e + 1);
    std::vector<BoundReport> out;
    detail::add_block_paths(out, d, n, q, complete, total_layers, opt);
    detail::mark_tightest(out, opt.allow_conjectured);
    return out;
}

inline std::vector<BoundReport> bound_pipeline(const Architecture& a, const BoundOptions& opt) {
    validate(a);
    const BlockDecomposition d = opt.block_ranges
                                     ? block_decomposition_from_ranges(a, *opt.block_ranges, opt.count_merging_only)
                                     : greedy_block_decomposition(a, opt.count_merging_only);
    require(d.count() >= 1, "the circuit never connects all sites; no bound applies");
    const bool complete = is_complete(a);
    const int n = a.num_sites;
    const double q = a.local_dim;
    std::vector<BoundReport> out;

    if (a.periodic_depth && *a.periodic_depth >= 2 && a.depth() >= *a.periodic_depth &&
        is_connected_block(a, 0, *a.periodic_depth - 1)) {
        const int ell = *a.periodic_depth;
        auto periodic = [&](TheoremPath path, const CValue& c, double exponent) {
            auto r = detail::make_report(path, n, q, opt, log_inv_s_star(c.value, exponent));
            r.ell = ell;
            r.c_used = c;
            r.conjectured = !c.rigorous;
            r.d_star = static_cast<long>(ell) * r.k_star_ceil;
            r.depth_estimate = static_cast<double>(*r.d_star);
            out.push_back(std::move(r));
        };
        if (complete)
            if (auto c = detail::pick_c(q, opt.t, opt.allow_conjectured))
                periodic(TheoremPath::complete_periodic, *c, ell - 1.0);
        if (auto c = detail::pick_c(std::sqrt(q), opt.t, opt.allow_conjectured))
            periodic(TheoremPath::incomplete_periodic, *c, ell - 1.0);
        if (auto c = detail::pick_c(q, opt.t, opt.allow_conjectured))
            periodic(TheoremPath::incomplete_integer, *c, static_cast<double>(x_expansion(n)) * ell - 1.0);
    }
    detail::add_block_paths(out, d, n, q, complete, a.depth(), opt);
    detail::mark_tightest(out, opt.allow_conjectured);
    return out;
}

inline nlohmann::ordered_json to_json(const BoundReport& r) {
    nlohmann::ordered_json j;
    j["path"] = to_string(r.path);
    nlohmann::ordered_json in;
    in["N"] = r.num_sites;
    in["q"] = r.q;
    in["t"] = r.t;
    in["eps"] = r.eps;
    if (r.ell) in["ell"] = *r.ell;
    if (r.ell_bar) in["ell_bar"] = *r.ell_bar;
    if (r.blocks) in["k_blocks"] = *r.blocks;
    j["inputs"] = in;
    j["s_star"] = r.s_star;
    j["k_star"] = r.k_star;
    j["k_star_ceil"] = r.k_star_ceil;
    j["d_star"] = r.d_star ? nlohmann::ordered_json(*r.d_star) : nlohmann::ordered_json(nullptr);
    j["depth_estimate"] = r.depth_estimate;
    j["c_used"] = r.c_used ? to_json(*r.c_used) : nlohmann::ordered_json(nullptr);
    j["tight_log_term"] = r.tight_log_term;
    j["conjectured"] = r.conjectured;
    j["tightest"] = r.tightest;
    j["chain_ok"] = r.chain_ok;
    if (r.satisfied) j["satisfied"] = *r.satisfied;
    return j;
}

// ---------------------------------------------------------------------------
// Brickwork layer values

/// s₂ = 2q²/(q²+1)², the square of four sites.
inline double square_value(double q) {
    const double q2 = q * q;
    return 2.0 * q2 / ((q2 + 1.0) * (q2 + 1.0));
}

/// Two clusters of n = 2^{m−1} sites joined by n edges, from the four-state reduction:
/// (1−x)^{-1}·√(2(1+x)(2/(q²+1))^n − 4x), x = q^{−2n}. Equals s₂ at m = 2.
inline double two_cluster_formula(int m, double q) {
    require(m >= 2, "two-cluster formula needs m >= 2");
    require(q > 1.0, "q must exceed 1");
    const double n = std::ldexp(1.0, m - 1);
    const double x = std::pow(q, -2.0 * n);
    const double rad = 2.0 * (1.0 + x) * std::pow(2.0 / (q * q + 1.0), n) - 4.0 * x;
    require(rad >= 0.0, "two-cluster formula out of domain");
    return std::sqrt(rad) / (1.0 - x);
}

/// The variant with (1−x)^{-2} and −8x, kept for comparison.
inline double two_cluster_formula_printed(int m, double q) {
    require(m >= 2, "two-cluster formula needs m >= 2");
    require(q > 1.0, "q must exceed 1");
    const double n = std::ldexp(1.0, m - 1);
    const double x = std::pow(q, -2.0 * n);
    const double rad = 2.0 * (1.0 + x) * std::pow(2.0 / (q * q + 1.0), n) - 8.0 * x;
    if (rad < 0.0) throw InvalidInput("two-cluster formula out of domain (negative radicand)");
    return std::sqrt(rad) / ((1.0 - x) * (1.0 - x));
}

/// √(1 − (1 − s₂²)·exp[−2(16/15)²·16/(q⁸−16)]), the dimension-free hypercube bound.
inline double hypercube_tail_bound(double q) {
    require(std::pow(q, 8) > 16.0, "hypercube tail bound needs q^8 > 16");
    const double s2 = square_value(q);
    const double tail = 2.0 * std::pow(16.0 / 15.0, 2) * 16.0 / (std::pow(q, 8) - 16.0);
    return std::sqrt(1.0 - (1.0 - s2 * s2) * std::exp(-tail));
}

/// √(1 − (1 − s₂²)·Π_{m=3}^{D}(1 − 𝓈_m²)) for the D-dimensional hypercube.
inline double hypercube_product_bound(double q, int dims) {
    require(dims >= 2, "hypercube needs D >= 2");
    const double s2 = square_value(q);
    double prod = 1.0 - s2 * s2;
    for (int m = 3; m <= dims; ++m) {
        const double s = two_cluster_formula(m, q);
        prod *= 1.0 - s * s;
    }
    return std::sqrt(1.0 - prod);
}

/// 2D·(4N ln q + ln 1/ε) / ln[(1 − (1 − e^{−1/(2C(q,2))})²)^{−1}], N = L^D.
inline double ddim_brickwork_bound(int side, int dims, double q, double eps, int t = 2) {
    require(t == 2, "the D-dimensional brickwork bound is stated for t = 2 only");
    require(side >= 2 && side % 2 == 0, "L must be even");
    require(dims >= 1, "D must be positive");
    require(eps > 0.0 && eps < 1.0, "epsilon must lie in (0, 1)");
    const double n = std::pow(static_cast<double>(side), dims);
    const auto c = tightest_c(q, 2, false);
    require(c.has_value(), "no rigorous C(q,2) available");
    return 2.0 * dims * (4.0 * n * std::log(q) + std::log(1.0 / eps)) / log_inv_s_star(c->value, 2.0);
}

/// C at which counting blocks of size ell_a every depth_a layers and blocks of size
/// ell_b every depth_b layers give the same depth bound (bisection on C).
inline double counting_crossover(double ell_a, double depth_a, double ell_b, double depth_b, double lo = 0.05,
                                 double hi = 100.0) {
    auto diff = [&](double c) {
        return depth_a / log_inv_s_star(c, ell_a - 1.0) - depth_b / log_inv_s_star(c, ell_b - 1.0);
    };
    double f_lo = diff(lo);
    require(f_lo * diff(hi) < 0.0, "no crossover inside the search interval");
    for (int i = 0; i < 200; ++i) {
        const double mid = std::sqrt(lo * hi);
        const double f = diff(mid);
        if ((f < 0.0) == (f_lo < 0.0)) {
            lo = mid;
            f_lo = f;
        } else {
            hi = mid;
        }
    }
    return std::sqrt(lo * hi);
}

/// Alternating connected 2- and 4-blocks: all blocks (ℓ̄ = 3, 3 layers each) versus
/// 2-blocks only (ℓ = 2, 6 layers each).
inline double alternating_block_crossover() { return counting_crossover(3.0, 3.0, 2.0, 6.0); }

}  // namespace tdesign
