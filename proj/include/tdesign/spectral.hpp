#pragma once

// Moment operators of averaged circuits in the orthonormalized permutation-label
// basis, their subleading singular values, and frame potentials.
//
// Every site carries the orthonormal frame of span{|σ⟩ : σ ∈ S_t} for virtual
// dimension r. The global space is the Kronecker power with site 0 most significant.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "tdesign/architecture.hpp"
#include "tdesign/cluster_graph.hpp"
#include "tdesign/errors.hpp"
#include "tdesign/perm_core.hpp"

namespace tdesign {

inline constexpr std::size_t kDefaultDimGuard = std::size_t{1} << 20;
inline constexpr std::size_t kDenseLimit = 4096;

struct SiteSpace {
    int t = 0;
    double r = 0.0;
    OrthoFrame frame;
    int num_sites = 0;

    int local_rank() const noexcept { return frame.rank(); }

    std::size_t dim() const {
        std::size_t d = 1;
        for (int i = 0; i < num_sites; ++i) d *= static_cast<std::size_t>(local_rank());
        return d;
    }

    std::size_t stride(int site) const {
        std::size_t s = 1;
        for (int i = site + 1; i < num_sites; ++i) s *= static_cast<std::size_t>(local_rank());
        return s;
    }
};

inline SiteSpace site_space(int t, double r, int num_sites, std::size_t guard = kDefaultDimGuard) {
    require(num_sites >= 1, "site space needs at least one site");
    SiteSpace s{t, r, ortho_frame(t, r), num_sites};
    const double dim = std::pow(static_cast<double>(s.local_rank()), num_sites);
    if (dim > static_cast<double>(guard))
        throw DimensionGuardExceeded(dim > 1.8e19 ? SIZE_MAX : static_cast<std::size_t>(dim), guard);
    return s;
}

namespace detail {

inline Eigen::VectorXd kron(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    Eigen::VectorXd out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

/// Columns (S e_σ)^⊗k for every σ.
inline Eigen::MatrixXd uniform_columns(const OrthoFrame& f, int k) {
    const auto n = f.state_coords.cols();
    Eigen::MatrixXd v(static_cast<Eigen::Index>(std::pow(f.rank(), k)), n);
    for (Eigen::Index c = 0; c < n; ++c) {
        Eigen::VectorXd col = f.state_coords.col(c);
        Eigen::VectorXd acc = col;
        for (int i = 1; i < k; ++i) acc = kron(acc, col);
        v.col(c) = acc;
    }
    return v;
}

inline Eigen::MatrixXd pseudo_inverse_sym(const Eigen::MatrixXd& m, double cutoff) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(m.rows());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        if (std::abs(es.eigenvalues()(i)) > cutoff) inv(i) = 1.0 / es.eigenvalues()(i);
    return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

/// Orthonormal basis of the column span, dropping directions below `rel_cutoff`.
inline Eigen::MatrixXd orthonormal_span(const Eigen::MatrixXd& v, double rel_cutoff = 1e-10) {
    if (v.cols() == 0) return Eigen::MatrixXd(v.rows(), 0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(v.transpose() * v);
    const double top = es.eigenvalues().maxCoeff();
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = es.eigenvalues().size() - 1; i >= 0; --i)
        if (es.eigenvalues()(i) > rel_cutoff * top) keep.push_back(i);
    Eigen::MatrixXd q(v.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j)
        q.col(static_cast<Eigen::Index>(j)) = v * es.eigenvectors().col(keep[j]) / std::sqrt(es.eigenvalues()(keep[j]));
    // one Gram-Schmidt sweep to clean up rounding
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
        for (Eigen::Index i = 0; i < j; ++i) q.col(j) -= q.col(i).dot(q.col(j)) * q.col(i);
        q.col(j).normalize();
    }
    return q;
}

}  // namespace detail

/// Orthogonal projector, in the orthonormal frame of k sites, onto span{|σ⟩^⊗k}.
inline Eigen::MatrixXd gate_projector(int k, int t, double r, double cutoff = kDefaultCutoff) {
    require(k >= 1, "gate must act on at least one site");
    const OrthoFrame f = ortho_frame(t, r, cutoff);
    const Eigen::MatrixXd v = detail::uniform_columns(f, k);
    const Eigen::MatrixXd metric = v.transpose() * v;
    return v * detail::pseudo_inverse_sym(metric, cutoff) * v.transpose();
}

/// Coefficients c_σ with P(|λ_1⟩⊗…⊗|λ_k⟩) = Σ_σ c_σ |σ⟩^⊗k, i.e. Wg(r^k)·(Π_s ⟨σ|λ_s⟩)_σ.
inline Eigen::VectorXd gate_label_action(int t, double r, const std::vector<Permutation>& labels,
                                         double cutoff = kDefaultCutoff) {
    const int k = static_cast<int>(labels.size());
    require(k >= 1, "need at least one site label");
    const GramMatrix g = gram(t, r);
    const auto n = g.entries.rows();
    Eigen::VectorXd overlaps = Eigen::VectorXd::Ones(n);
    for (const auto& l : labels) {
        require(l.copies() == t, "label permutation has the wrong copy count");
        overlaps = overlaps.cwiseProduct(g.entries.col(static_cast<Eigen::Index>(permutation_index(l))));
    }
    return weingarten(t, std::pow(r, k), cutoff).entries * overlaps;
}

// ---------------------------------------------------------------------------
// Moment operators

struct AppliedGate {
    std::vector<int> sites;
    std::shared_ptr<const Eigen::MatrixXd> projector;
};

class MomentOperator {
public:
    SiteSpace space;
    std::vector<std::vector<AppliedGate>> layers;  // applied first to last
    Eigen::MatrixXd unit_basis;
    std::string source;

    std::size_t dim() const { return space.dim(); }
    int unit_dim() const noexcept { return static_cast<int>(unit_basis.cols()); }

    /// x ← T x, column by column.
    void apply(Eigen::MatrixXd& x) const {
        for (const auto& layer : layers)
            for (const auto& g : layer) apply_gate(g, x);
    }

    /// x ← Tᵀ x; every gate projector is symmetric, so only the layer order flips.
    void apply_transpose(Eigen::MatrixXd& x) const {
        for (auto l = layers.rbegin(); l != layers.rend(); ++l)
            for (const auto& g : *l) apply_gate(g, x);
    }

    Eigen::MatrixXd dense() const {
        Eigen::MatrixXd m = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(dim()), static_cast<Eigen::Index>(dim()));
        apply(m);
        return m;
    }

private:
    void apply_gate(const AppliedGate& g, Eigen::MatrixXd& x) const {
        const auto d = static_cast<std::size_t>(space.local_rank());
        const int k = static_cast<int>(g.sites.size());
        const auto block = static_cast<std::size_t>(g.projector->rows());
        std::vector<std::size_t> offsets(block, 0);
        for (std::size_t j = 0; j < block; ++j) {
            std::size_t rem = j;
            for (int i = k - 1; i >= 0; --i) {
                offsets[j] += (rem % d) * space.stride(g.sites[i]);
                rem /= d;
            }
        }
        std::vector<std::size_t> free_strides;
        for (int s = 0; s < space.num_sites; ++s)
            if (std::find(g.sites.begin(), g.sites.end(), s) == g.sites.end()) free_strides.push_back(space.stride(s));
        std::size_t bases = 1;
        for (std::size_t i = 0; i < free_strides.size(); ++i) bases *= d;

        Eigen::MatrixXd sub(static_cast<Eigen::Index>(block), x.cols());
        std::vector<std::size_t> digit(free_strides.size(), 0);
        std::size_t base = 0;
        for (std::size_t count = 0; count < bases; ++count) {
            for (std::size_t j = 0; j < block; ++j) sub.row(static_cast<Eigen::Index>(j)) = x.row(static_cast<Eigen::Index>(base + offsets[j]));
            sub = (*g.projector) * sub;
            for (std::size_t j = 0; j < block; ++j) x.row(static_cast<Eigen::Index>(base + offsets[j])) = sub.row(static_cast<Eigen::Index>(j));
            for (std::size_t i = free_strides.size(); i-- > 0;) {
                if (++digit[i] < d) {
                    base += free_strides[i];
                    break;
                }
                base -= (d - 1) * free_strides[i];
                digit[i] = 0;
            }
        }
    }
};

namespace detail {

class ProjectorCache {
public:
    ProjectorCache(int t, double r) : t_(t), r_(r) {}

    std::shared_ptr<const Eigen::MatrixXd> get(int k) {
        auto it = cache_.find(k);
        if (it != cache_.end()) return it->second;
        auto p = std::make_shared<const Eigen::MatrixXd>(gate_projector(k, t_, r_));
        cache_.emplace(k, p);
        return p;
    }

private:
    int t_;
    double r_;
    std::map<int, std::shared_ptr<const Eigen::MatrixXd>> cache_;
};

inline std::vector<AppliedGate> realize_layer(const Layer& layer, ProjectorCache& cache) {
    std::vector<AppliedGate> out;
    for (const auto& g : layer.gates) out.push_back({g, cache.get(static_cast<int>(g.size()))});
    return out;
}

}  // namespace detail

/// States ⊗_s |σ_{c(s)}⟩ for every assignment of one permutation per site group,
/// orthonormalized. A single group spanning all sites gives the globally uniform states.
inline Eigen::MatrixXd uniform_state_basis(const SiteSpace& space, const std::vector<int>& group_of_site) {
    const int groups = group_of_site.empty() ? 0 : *std::max_element(group_of_site.begin(), group_of_site.end()) + 1;
    const auto n_perm = static_cast<std::size_t>(space.frame.state_coords.cols());
    double combos = std::pow(static_cast<double>(n_perm), groups);
    if (combos > static_cast<double>(space.dim()) * 4.0 + 64.0)
        throw DimensionGuardExceeded(static_cast<std::size_t>(std::min(combos, 1e18)), space.dim());
    const auto count = static_cast<std::size_t>(combos);
    Eigen::MatrixXd v(static_cast<Eigen::Index>(space.dim()), static_cast<Eigen::Index>(count));
    std::vector<std::size_t> choice(groups, 0);
    for (std::size_t c = 0; c < count; ++c) {
        std::size_t rem = c;
        for (int g = groups - 1; g >= 0; --g) {
            choice[g] = rem % n_perm;
            rem /= n_perm;
        }
        Eigen::VectorXd acc = Eigen::VectorXd::Ones(1);
        for (int s = 0; s < space.num_sites; ++s)
            acc = detail::kron(acc, space.frame.state_coords.col(static_cast<Eigen::Index>(choice[group_of_site[s]])));
        v.col(static_cast<Eigen::Index>(c)) = acc;
    }
    return detail::orthonormal_span(v);
}

inline Eigen::MatrixXd global_uniform_basis(const SiteSpace& space) {
    return uniform_state_basis(space, std::vector<int>(space.num_sites, 0));
}

inline MomentOperator transfer_matrix(const Architecture& a, int start, int end, int t,
                                      std::size_t guard = kDefaultDimGuard) {
    validate(a);
    require(start >= 0 && start <= end && end < a.depth(), "layer range outside architecture");
    MomentOperator op;
    op.space = site_space(t, a.local_dim, a.num_sites, guard);
    detail::ProjectorCache cache(t, a.local_dim);
    for (int i = start; i <= end; ++i) op.layers.push_back(detail::realize_layer(a.layers[i], cache));
    op.unit_basis = global_uniform_basis(op.space);
    op.source = "layers " + std::to_string(start) + ".." + std::to_string(end);
    return op;
}

inline MomentOperator layer_operator(const Architecture& a, int layer, int t, std::size_t guard = kDefaultDimGuard) {
    return transfer_matrix(a, layer, layer, t, guard);
}

/// Transfer matrix over one period (periodic_depth layers, or the whole circuit).
inline MomentOperator period_operator(const Architecture& a, int t, std::size_t guard = kDefaultDimGuard) {
    const int len = a.periodic_depth ? std::min(*a.periodic_depth, a.depth()) : a.depth();
    require(len >= 1, "architecture has no layers");
    return transfer_matrix(a, 0, len - 1, t, guard);
}

// ---------------------------------------------------------------------------
// Subleading singular values

enum class Method { automatic, dense, iterative };

inline const char* to_string(Method m) {
    switch (m) {
        case Method::dense: return "dense";
        case Method::iterative: return "iterative";
        default: return "automatic";
    }
}

struct SsvOptions {
    Method method = Method::automatic;
    std::size_t dense_limit = kDenseLimit;
    long max_matvecs = 100000;
    double tolerance = 1e-10;
    int krylov_size = 120;
    std::uint64_t seed = 0x5eed;
};

struct SingularReport {
    int unit_dim = 0;
    double ssv = 0.0;
    Method method = Method::dense;
    double residual = 0.0;
    std::size_t dim = 0;
    long matvecs = 0;
};

namespace detail {

inline void deflate(Eigen::MatrixXd& x, const Eigen::MatrixXd& u) {
    if (u.cols() > 0) x -= u * (u.transpose() * x);
}

inline SingularReport dense_ssv(const MomentOperator& op) {
    Eigen::MatrixXd m = op.dense();
    const Eigen::MatrixXd& u = op.unit_basis;
    if (u.cols() > 0) m -= (m * u) * u.transpose();
    const Eigen::MatrixXd gram = m.transpose() * m;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    const Eigen::Index top = gram.rows() - 1;
    const double lambda = std::max(0.0, es.eigenvalues()(top));
    const Eigen::VectorXd v = es.eigenvectors().col(top);
    SingularReport rep;
    rep.unit_dim = op.unit_dim();
    rep.ssv = std::sqrt(lambda);
    rep.method = Method::dense;
    rep.residual = (gram * v - lambda * v).norm();
    rep.dim = op.dim();
    return rep;
}

/// Lanczos with full reorthogonalization on D TᵀT D, D the projector off the unit space.
/// Restarts from the current top Ritz vector when the Krylov basis fills up.
inline SingularReport lanczos_ssv(const MomentOperator& op, const SsvOptions& opt) {
    const auto n = static_cast<Eigen::Index>(op.dim());
    const Eigen::MatrixXd& u = op.unit_basis;
    const Eigen::Index free_dim = n - u.cols();
    SingularReport rep;
    rep.unit_dim = op.unit_dim();
    rep.method = Method::iterative;
    rep.dim = op.dim();
    if (free_dim <= 0) return rep;

    auto a_times = [&](Eigen::MatrixXd& x) {
        deflate(x, u);
        op.apply(x);
        op.apply_transpose(x);
        deflate(x, u);
        ++rep.matvecs;
    };

    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd start(n, 1);
    for (Eigen::Index i = 0; i < n; ++i) start(i, 0) = normal(rng);
    deflate(start, u);
    if (start.norm() == 0.0) return rep;
    start /= start.norm();

    const Eigen::Index m_max = std::min<Eigen::Index>(opt.krylov_size, free_dim);
    double theta = 0.0;
    double residual = 1.0;
    while (true) {
        Eigen::MatrixXd q(n, m_max);
        std::vector<double> alpha, beta;
        q.col(0) = start.col(0);
        Eigen::Index m = 0;
        bool invariant = false;
        for (; m < m_max; ++m) {
            Eigen::MatrixXd w = q.col(m);
            a_times(w);
            const double a = q.col(m).dot(w.col(0));
            alpha.push_back(a);
            // two passes of classical Gram-Schmidt against the whole basis
            for (int pass = 0; pass < 2; ++pass) {
                const Eigen::VectorXd coef = q.leftCols(m + 1).transpose() * w.col(0);
                w.col(0) -= q.leftCols(m + 1) * coef;
                deflate(w, u);
            }
            const double b = w.norm();
            Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), m + 1);
            Eigen::VectorXd sub = m > 0 ? Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(beta.data(), m)) : Eigen::VectorXd(0);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
            tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
            const Eigen::Index top = m;
            theta = tri.eigenvalues()(top);
            residual = b * std::abs(tri.eigenvectors()(m, top));
            const bool done = residual <= opt.tolerance * std::max(1.0, theta) || b < 1e-14;
            if (done || m + 1 == m_max || rep.matvecs >= opt.max_matvecs) {
                start = q.leftCols(m + 1) * tri.eigenvectors().col(top);
                start /= start.norm();
                invariant = done;
                break;
            }
            beta.push_back(b);
            q.col(m + 1) = w.col(0) / b;
        }
        if (invariant) break;
        if (rep.matvecs >= opt.max_matvecs) {
            throw NonConvergence("Lanczos did not converge within " + std::to_string(opt.max_matvecs) + " matvecs",
                                 std::sqrt(std::max(0.0, theta)), residual);
        }
    }
    rep.ssv = std::sqrt(std::max(0.0, theta));
    rep.residual = residual;
    return rep;
}

}  // namespace detail

/// Largest singular value of T on the orthogonal complement of its known unit space.
inline SingularReport subleading_singular_value(const MomentOperator& op, const SsvOptions& opt = {}) {
    Method m = opt.method;
    if (m == Method::automatic) m = op.dim() <= opt.dense_limit ? Method::dense : Method::iterative;
    if (m == Method::dense) {
        if (op.dim() > opt.dense_limit) throw DimensionGuardExceeded(op.dim(), opt.dense_limit);
        return detail::dense_ssv(op);
    }
    return detail::lanczos_ssv(op, opt);
}

/// All singular values of T, descending (dense).
inline Eigen::VectorXd singular_values(const MomentOperator& op, std::size_t dense_limit = kDenseLimit) {
    if (op.dim() > dense_limit) throw DimensionGuardExceeded(op.dim(), dense_limit);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(op.dense());
    return svd.singularValues();
}

// ---------------------------------------------------------------------------
// Layer-restricted singular values of cluster graphs

/// Sites are laid out node by node; each node hands its lowest free sites to its
/// incident edges in edge order. Q projects every node onto its uniform states,
/// P applies one 2-site gate per edge, and the unit space of PQ (uniform states per
/// connected component) is deflated.
inline MomentOperator cluster_operator(const ClusterGraph& g, int t, double r, std::size_t guard = kDefaultDimGuard) {
    validate(g);
    require(g.size() >= 1, "cluster graph is empty");
    const int n = g.total_weight();
    MomentOperator op;
    op.space = site_space(t, r, n, guard);
    detail::ProjectorCache cache(t, r);

    std::vector<int> first_site(g.size(), 0);
    for (int i = 1; i < g.size(); ++i) first_site[i] = first_site[i - 1] + g.weights[i - 1];
    std::vector<int> next_free = first_site;

    std::vector<AppliedGate> q_layer, p_layer;
    for (int i = 0; i < g.size(); ++i) {
        if (g.weights[i] < 2) continue;
        std::vector<int> sites(g.weights[i]);
        for (int j = 0; j < g.weights[i]; ++j) sites[j] = first_site[i] + j;
        q_layer.push_back({sites, cache.get(g.weights[i])});
    }
    for (auto [a, b] : g.edges) p_layer.push_back({{next_free[a]++, next_free[b]++}, cache.get(2)});
    op.layers = {q_layer, p_layer};

    const auto label = g.component_labels();
    std::vector<int> group(n);
    for (int i = 0; i < g.size(); ++i)
        for (int j = 0; j < g.weights[i]; ++j) group[first_site[i] + j] = label[i];
    op.unit_basis = uniform_state_basis(op.space, group);
    op.source = "cluster graph";
    return op;
}

inline SingularReport layer_restricted_ssv(const ClusterGraph& g, int t, double r, const SsvOptions& opt = {},
                                           std::size_t guard = kDefaultDimGuard) {
    return subleading_singular_value(cluster_operator(g, t, r, guard), opt);
}

/// 𝓈_i for every layer of the block [start, end], each from the cluster graph of that
/// layer over the clusters formed by the earlier layers of the block.
inline std::vector<double> block_layer_ssvs(const Architecture& a, int start, int end, int t,
                                            const SsvOptions& opt = {}) {
    const Architecture block = slice(a, start, end);
    std::vector<double> out;
    for (int i = 0; i < block.depth(); ++i)
        out.push_back(layer_restricted_ssv(build_cluster_graph(block, i - 1, i), t, a.local_dim, opt).ssv);
    return out;
}

/// √(1 − Π(1 − 𝓈_i²))
inline double layer_gap_bound(const std::vector<double>& layer_ssvs) {
    double prod = 1.0;
    for (double s : layer_ssvs) prod *= 1.0 - s * s;
    return std::sqrt(std::max(0.0, 1.0 - prod));
}

// ---------------------------------------------------------------------------
// Site splitting

/// Each site i becomes the twin pair (2i, 2i+1) of dimension √q; each gate acts on all
/// twins of its sites, and a leading layer ties every twin pair together.
inline Architecture site_split(const Architecture& a) {
    validate(a);
    Architecture out;
    out.num_sites = 2 * a.num_sites;
    out.local_dim = std::sqrt(a.local_dim);
    Layer twins;
    for (int i = 0; i < a.num_sites; ++i) twins.gates.push_back({2 * i, 2 * i + 1});
    out.layers.push_back(std::move(twins));
    for (const auto& l : a.layers) {
        Layer doubled;
        for (const auto& g : l.gates) {
            Gate dg;
            for (int s : g) {
                dg.push_back(2 * s);
                dg.push_back(2 * s + 1);
            }
            doubled.gates.push_back(std::move(dg));
        }
        out.layers.push_back(std::move(doubled));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Frame potentials

/// ||T^k||_F² with T the one-period transfer matrix. Sites no gate ever touches keep
/// their full q^{2t}-dimensional identity, which the frame alone would undercount.
inline double frame_potential_exact(const Architecture& a, int k_periods, int t, std::size_t dense_limit = kDenseLimit) {
    require(k_periods >= 1, "need at least one period");
    const MomentOperator op = period_operator(a, t, std::max(dense_limit, std::size_t{1}));
    if (op.dim() > dense_limit) throw DimensionGuardExceeded(op.dim(), dense_limit);
    const Eigen::MatrixXd tm = op.dense();
    Eigen::MatrixXd power = tm;
    for (int i = 1; i < k_periods; ++i) power = tm * power;
    double f = power.squaredNorm();
    std::vector<bool> touched(a.num_sites, false);
    for (const auto& layer : op.layers)
        for (const auto& g : layer)
            for (int s : g.sites) touched[s] = true;
    for (int s = 0; s < a.num_sites; ++s)
        if (!touched[s]) f *= std::pow(a.local_dim, 2 * t) / op.space.local_rank();
    return f;
}

struct FramePotentialEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    long samples = 0;
};

namespace detail {

using CMatrix = Eigen::MatrixXcd;

template <class Rng>
CMatrix haar_unitary(int n, Rng& rng) {
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    CMatrix z(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) z(i, j) = {normal(rng), normal(rng)};
    Eigen::HouseholderQR<CMatrix> qr(z);
    CMatrix q = qr.householderQ();
    const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j) {
        const std::complex<double> d = r(j, j);
        q.col(j) *= d / std::abs(d);
    }
    return q;
}

/// u ← G u for a gate on `sites` of an N-site register of local dimension q.
inline void apply_unitary(CMatrix& u, const CMatrix& gate, const std::vector<int>& sites, int q, int n) {
    std::vector<std::size_t> stride(n);
    std::size_t s = 1;
    for (int i = n - 1; i >= 0; --i) {
        stride[i] = s;
        s *= static_cast<std::size_t>(q);
    }
    const std::size_t dim = s;
    const auto block = static_cast<std::size_t>(gate.rows());
    std::vector<std::size_t> offsets(block, 0);
    for (std::size_t j = 0; j < block; ++j) {
        std::size_t rem = j;
        for (int i = static_cast<int>(sites.size()) - 1; i >= 0; --i) {
            offsets[j] += (rem % q) * stride[sites[i]];
            rem /= q;
        }
    }
    CMatrix sub(static_cast<Eigen::Index>(block), u.cols());
    for (std::size_t base = 0; base < dim; ++base) {
        bool is_base = true;
        for (int st : sites)
            if ((base / stride[st]) % q != 0) is_base = false;
        if (!is_base) continue;
        for (std::size_t j = 0; j < block; ++j) sub.row(static_cast<Eigen::Index>(j)) = u.row(static_cast<Eigen::Index>(base + offsets[j]));
        sub = gate * sub;
        for (std::size_t j = 0; j < block; ++j) u.row(static_cast<Eigen::Index>(base + offsets[j])) = sub.row(static_cast<Eigen::Index>(j));
    }
}

template <class Rng>
CMatrix sample_circuit(const Architecture& a, int layers_per_period, int k_periods, Rng& rng) {
    const int q = static_cast<int>(std::lround(a.local_dim));
    std::size_t dim = 1;
    for (int i = 0; i < a.num_sites; ++i) dim *= static_cast<std::size_t>(q);
    CMatrix u = CMatrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (int p = 0; p < k_periods; ++p)
        for (int l = 0; l < layers_per_period; ++l)
            for (const auto& g : a.layers[l].gates) {
                int block = 1;
                for (std::size_t i = 0; i < g.size(); ++i) block *= q;
                apply_unitary(u, haar_unitary(block, rng), g, q, a.num_sites);
            }
    return u;
}

}  // namespace detail

/// Monte-Carlo average of |tr(U†V)|^{2t} over independent circuit pairs with Haar gates.
template <class Rng>
FramePotentialEstimate frame_potential_mc(const Architecture& a, int k_periods, int t, long samples, Rng& rng,
                                          std::size_t hilbert_cap = 256) {
    validate(a);
    require(samples >= 2, "need at least two samples");
    require(k_periods >= 1, "need at least one period");
    require(a.local_dim == std::floor(a.local_dim) && a.local_dim >= 2.0, "Haar sampling needs integer q >= 2");
    const double hilbert = std::pow(a.local_dim, a.num_sites);
    if (hilbert > static_cast<double>(hilbert_cap))
        throw DimensionGuardExceeded(static_cast<std::size_t>(std::min(hilbert, 1e18)), hilbert_cap);
    const int len = a.periodic_depth ? std::min(*a.periodic_depth, a.depth()) : a.depth();

    double mean = 0.0, m2 = 0.0;
    for (long i = 0; i < samples; ++i) {
        const auto u = detail::sample_circuit(a, len, k_periods, rng);
        const auto v = detail::sample_circuit(a, len, k_periods, rng);
        const std::complex<double> tr = (u.adjoint() * v).trace();
        const double x = std::pow(std::norm(tr), t);
        const double delta = x - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (x - mean);
    }
    FramePotentialEstimate est;
    est.estimate = mean;
    est.samples = samples;
    est.std_error = std::sqrt(m2 / static_cast<double>(samples - 1) / static_cast<double>(samples));
    return est;
}

}  // namespace tdesign
