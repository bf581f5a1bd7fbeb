#pragma once

// Symmetric-group algebra and the r-parameterized metric on permutation states.
//
// Permutations of {0..t-1} are stored in one-line notation. Every matrix indexed
// by permutations uses the lexicographic order of one-line notation, which is the
// order produced by all_permutations().

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "tdesign/errors.hpp"

namespace tdesign {

inline constexpr int kMaxCopies = 6;
inline constexpr double kDefaultCutoff = 1e-12;

inline std::size_t factorial(int n) {
    std::size_t f = 1;
    for (int i = 2; i <= n; ++i) f *= static_cast<std::size_t>(i);
    return f;
}

class Permutation {
public:
    explicit Permutation(std::vector<int> mapping) : map_(std::move(mapping)) {
        std::vector<bool> seen(map_.size(), false);
        for (int v : map_) {
            require(v >= 0 && static_cast<std::size_t>(v) < map_.size() && !seen[v],
                    "permutation mapping is not a bijection");
            seen[v] = true;
        }
        require(!map_.empty(), "permutation needs t >= 1");
    }

    static Permutation identity(int t) {
        std::vector<int> m(t);
        std::iota(m.begin(), m.end(), 0);
        return Permutation(std::move(m));
    }

    static Permutation transposition(int t, int a, int b) {
        auto p = identity(t);
        std::swap(p.map_.at(a), p.map_.at(b));
        return p;
    }

    int copies() const noexcept { return static_cast<int>(map_.size()); }
    int operator()(int i) const { return map_.at(i); }
    const std::vector<int>& mapping() const noexcept { return map_; }

    /// (this ∘ q)(i) = this(q(i)).
    Permutation compose(const Permutation& q) const {
        require(q.copies() == copies(), "permutations act on different copy counts");
        std::vector<int> m(map_.size());
        for (std::size_t i = 0; i < m.size(); ++i) m[i] = map_[q.map_[i]];
        return Permutation(std::move(m));
    }

    Permutation inverse() const {
        std::vector<int> m(map_.size());
        for (std::size_t i = 0; i < m.size(); ++i) m[map_[i]] = static_cast<int>(i);
        return Permutation(std::move(m));
    }

    /// Number of disjoint cycles, fixed points included.
    int cycle_count() const {
        std::vector<bool> seen(map_.size(), false);
        int cycles = 0;
        for (std::size_t i = 0; i < map_.size(); ++i) {
            if (seen[i]) continue;
            ++cycles;
            for (std::size_t j = i; !seen[j]; j = static_cast<std::size_t>(map_[j])) seen[j] = true;
        }
        return cycles;
    }

    friend bool operator==(const Permutation&, const Permutation&) = default;
    friend auto operator<=>(const Permutation& a, const Permutation& b) { return a.map_ <=> b.map_; }

private:
    std::vector<int> map_;
};

inline std::vector<Permutation> all_permutations(int t) {
    require(t >= 1 && t <= kMaxCopies, "copy count t must lie in [1, " + std::to_string(kMaxCopies) + "]");
    std::vector<int> m(t);
    std::iota(m.begin(), m.end(), 0);
    std::vector<Permutation> out;
    out.reserve(factorial(t));
    do {
        out.emplace_back(m);
    } while (std::next_permutation(m.begin(), m.end()));
    return out;
}

/// Position of p in all_permutations(p.copies()).
inline std::size_t permutation_index(const Permutation& p) {
    const int t = p.copies();
    std::size_t idx = 0;
    std::vector<bool> used(t, false);
    for (int i = 0; i < t; ++i) {
        int smaller = 0;
        for (int v = 0; v < p(i); ++v)
            if (!used[v]) ++smaller;
        idx += static_cast<std::size_t>(smaller) * factorial(t - 1 - i);
        used[p(i)] = true;
    }
    return idx;
}

/// Overlaps ⟨σ|τ⟩_r = r^(c(στ⁻¹) − t), unit diagonal.
struct GramMatrix {
    int t = 0;
    double r = 0.0;
    Eigen::MatrixXd entries;
};

struct WeingartenMatrix {
    int t = 0;
    double r = 0.0;
    Eigen::MatrixXd entries;
    int support_rank = 0;
};

inline GramMatrix gram(int t, double r) {
    require(r > 1.0, "virtual dimension r must exceed 1");
    const auto perms = all_permutations(t);
    const auto n = static_cast<Eigen::Index>(perms.size());
    GramMatrix g{t, r, Eigen::MatrixXd(n, n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            const int c = perms[i].compose(perms[j].inverse()).cycle_count();
            const double v = std::pow(r, c - t);
            g.entries(i, j) = v;
            g.entries(j, i) = v;
        }
    }
    return g;
}

/// Moore–Penrose pseudoinverse of the Gram matrix. Eigenvalues with |λ| <= cutoff are
/// treated as null; this also covers the indefinite metrics that occur for non-integer r < t-1.
inline WeingartenMatrix weingarten(int t, double r, double cutoff = kDefaultCutoff) {
    const GramMatrix g = gram(t, r);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.entries);
    const Eigen::VectorXd& lam = es.eigenvalues();
    const Eigen::MatrixXd& U = es.eigenvectors();
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(lam.size());
    int rank = 0;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        if (std::abs(lam(i)) > cutoff) {
            inv(i) = 1.0 / lam(i);
            ++rank;
        }
    }
    return {t, r, U * inv.asDiagonal() * U.transpose(), rank};
}

inline int numeric_rank(const GramMatrix& g, double cutoff = kDefaultCutoff) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.entries, Eigen::EigenvaluesOnly);
    return static_cast<int>((es.eigenvalues().array().abs() > cutoff).count());
}

/// Orthonormal coordinates on the support of the single-site metric.
///
/// `iso_to_ortho` has one row per retained eigenvector, scaled so that
/// iso_to_ortho · G · iso_to_orthoᵀ = I. `state_coords` holds, column by column,
/// the orthonormal coordinates of each permutation state |σ⟩; its Gram is G
/// restricted to the kept spectrum.
struct OrthoFrame {
    int t = 0;
    double r = 0.0;
    double cutoff = kDefaultCutoff;
    Eigen::MatrixXd iso_to_ortho;
    Eigen::MatrixXd state_coords;
    bool metric_psd = true;

    int rank() const noexcept { return static_cast<int>(iso_to_ortho.rows()); }
    int label_dim() const noexcept { return static_cast<int>(iso_to_ortho.cols()); }

    /// Orthonormal coordinates of the vector Σ_σ c_σ |σ⟩.
    Eigen::VectorXd coordinates(const Eigen::VectorXd& label_coeffs) const {
        return state_coords * label_coeffs;
    }
};

inline OrthoFrame ortho_frame(int t, double r, double cutoff = kDefaultCutoff) {
    require(cutoff > 0.0, "eigenvalue cutoff must be positive");
    const GramMatrix g = gram(t, r);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.entries);
    const Eigen::VectorXd& lam = es.eigenvalues();
    const Eigen::MatrixXd& U = es.eigenvectors();

    std::vector<Eigen::Index> keep;
    bool psd = true;
    // descending order so the dominant directions come first
    for (Eigen::Index i = lam.size() - 1; i >= 0; --i) {
        if (lam(i) > cutoff) keep.push_back(i);
        if (lam(i) < -cutoff) psd = false;
    }
    if (keep.empty()) throw InvalidInput("metric has no eigenvalue above the cutoff");

    const auto k = static_cast<Eigen::Index>(keep.size());
    OrthoFrame f{t, r, cutoff, Eigen::MatrixXd(k, lam.size()), Eigen::MatrixXd(k, lam.size()), psd};
    for (Eigen::Index row = 0; row < k; ++row) {
        const Eigen::Index i = keep[row];
        f.iso_to_ortho.row(row) = U.col(i).transpose() / std::sqrt(lam(i));
        f.state_coords.row(row) = U.col(i).transpose() * std::sqrt(lam(i));
    }
    return f;
}

}  // namespace tdesign
