#pragma once

// Normal states rho(a) = sum_k Tr(D_k a_k) on block algebras. Classical
// probability vectors are states on abelian shapes.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "algebra.hpp"

namespace ncp {

/// Eigenvalues <= this fraction of the largest density eigenvalue count as zero.
inline constexpr double kSupportTolerance = 1e-9;

class NormalState {
public:
    const AlgebraShape& shape() const noexcept { return shape_; }
    const std::vector<CMatrix>& densities() const noexcept { return densities_; }
    const CMatrix& density(std::size_t k) const { return densities_.at(k); }

    /// Density as an algebra element (same blocks).
    AlgebraElement density_element() const { return {shape_, densities_}; }

    cplx evaluate(const AlgebraElement& a) const {
        require_same_shape(shape_, a.shape(), "evaluate");
        cplx s = 0.0;
        for (std::size_t k = 0; k < densities_.size(); ++k) {
            // Tr(D a) without forming the product
            s += (densities_[k].transpose().cwiseProduct(a.block(k))).sum();
        }
        return s;
    }

    /// Per-block eigenvalues of the densities, ascending within each block.
    const std::vector<RVector>& eigenvalues() const noexcept { return eigenvalues_; }

    double max_eigenvalue() const noexcept { return max_eigenvalue_; }

    Index rank(std::size_t k, double rel_tol = kSupportTolerance) const {
        const double cut = rel_tol * max_eigenvalue_;
        return static_cast<Index>((eigenvalues_.at(k).array() > cut).count());
    }

    bool is_faithful(double rel_tol = kSupportTolerance) const {
        for (std::size_t k = 0; k < densities_.size(); ++k)
            if (rank(k, rel_tol) != shape_.block_dim(k)) return false;
        return true;
    }

    /// Support projection: per block spectral projection onto eigenvalues
    /// above rel_tol times the largest eigenvalue.
    AlgebraElement support(double rel_tol = kSupportTolerance) const {
        std::vector<CMatrix> out;
        out.reserve(densities_.size());
        const double cut = rel_tol * max_eigenvalue_;
        for (const auto& d : densities_) {
            Eigen::SelfAdjointEigenSolver<CMatrix> es(d);
            const Index n = d.rows();
            CMatrix p = CMatrix::Zero(n, n);
            for (Index i = 0; i < n; ++i) {
                if (es.eigenvalues()(i) > cut) p += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
            }
            out.push_back(std::move(p));
        }
        return {shape_, std::move(out)};
    }

    /// Traciality by the defining sweep: rho(e_a e_b) = rho(e_b e_a) over all
    /// matrix-unit pairs. Products of units in different blocks vanish and
    /// e_ij e_lm = delta_jl e_im, so rho(e_ij e_jm) = D_mi.
    bool is_tracial_by_commutators(double tol = 1e-10) const {
        for (std::size_t k = 0; k < densities_.size(); ++k) {
            const CMatrix& d = densities_[k];
            const Index n = d.rows();
            for (Index i = 0; i < n; ++i)
                for (Index j = 0; j < n; ++j)
                    for (Index l = 0; l < n; ++l)
                        for (Index m = 0; m < n; ++m) {
                            const cplx ab = (j == l) ? d(m, i) : cplx(0.0);
                            const cplx ba = (m == i) ? d(j, l) : cplx(0.0);
                            if (std::abs(ab - ba) > tol) return false;
                        }
        }
        return true;
    }

    /// Traciality as "every density block is a multiple of the identity".
    bool is_tracial_by_scalar_blocks(double tol = 1e-10) const {
        for (const auto& d : densities_) {
            const Index n = d.rows();
            const cplx mean = d.trace() / static_cast<double>(n);
            if ((d - mean * CMatrix::Identity(n, n)).cwiseAbs().maxCoeff() > tol) return false;
        }
        return true;
    }

    bool is_tracial(double tol = 1e-10) const { return is_tracial_by_commutators(tol); }

    /// Max entrywise difference of densities; infinity on shape mismatch.
    double distance(const NormalState& o) const {
        if (shape_ != o.shape_) return std::numeric_limits<double>::infinity();
        double m = 0.0;
        for (std::size_t k = 0; k < densities_.size(); ++k)
            m = std::max(m, (densities_[k] - o.densities_[k]).cwiseAbs().maxCoeff());
        return m;
    }

    double hs_distance(const NormalState& o) const {
        require_same_shape(shape_, o.shape_, "hs_distance");
        double s = 0.0;
        for (std::size_t k = 0; k < densities_.size(); ++k) s += (densities_[k] - o.densities_[k]).squaredNorm();
        return std::sqrt(s);
    }

    /// Probability vector of a state on an abelian shape.
    RVector probabilities() const {
        if (!shape_.is_abelian()) throw ShapeMismatch("probabilities() requires an abelian shape");
        RVector p(static_cast<Index>(densities_.size()));
        for (std::size_t k = 0; k < densities_.size(); ++k) p(static_cast<Index>(k)) = densities_[k](0, 0).real();
        return p;
    }

private:
    friend NormalState mk_state(const AlgebraShape&, std::vector<CMatrix>, double);

    NormalState(AlgebraShape shape, std::vector<CMatrix> d) : shape_(std::move(shape)), densities_(std::move(d)) {
        eigenvalues_.reserve(densities_.size());
        for (const auto& m : densities_) {
            Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
            eigenvalues_.push_back(es.eigenvalues());
            max_eigenvalue_ = std::max(max_eigenvalue_, es.eigenvalues().maxCoeff());
        }
    }

    AlgebraShape shape_;
    std::vector<CMatrix> densities_;
    std::vector<RVector> eigenvalues_;
    double max_eigenvalue_ = 0.0;
};

/// Validates and builds a state. Each block must be Hermitian and PSD within
/// tol and the total trace must be 1 within tol; the stored densities are
/// the exact Hermitian parts.
inline NormalState mk_state(const AlgebraShape& shape, std::vector<CMatrix> densities, double tol = 1e-10) {
    if (densities.size() != shape.num_blocks()) {
        throw InvalidState("state has " + std::to_string(densities.size()) + " density blocks, shape " +
                               shape.to_string() + " expects " + std::to_string(shape.num_blocks()),
                           InvalidState::npos);
    }
    cplx total = 0.0;
    for (std::size_t k = 0; k < densities.size(); ++k) {
        CMatrix& d = densities[k];
        const Index n = shape.block_dim(k);
        if (d.rows() != n || d.cols() != n) {
            throw InvalidState("density block " + std::to_string(k) + " has wrong size", k);
        }
        if ((d - d.adjoint()).norm() > tol) {
            throw InvalidState("density block " + std::to_string(k) + " is not Hermitian", k);
        }
        d = ((d + d.adjoint()) * 0.5).eval();
        const double min_eig = min_hermitian_eigenvalue(d);
        if (min_eig < -tol) {
            throw InvalidState("density block " + std::to_string(k) + " has negative eigenvalue " +
                                   std::to_string(min_eig),
                               k);
        }
        total += d.trace();
    }
    if (std::abs(total - cplx(1.0)) > tol) {
        throw InvalidState("total trace is " + std::to_string(total.real()) + ", expected 1", InvalidState::npos);
    }
    return NormalState(shape, std::move(densities));
}

/// State on the abelian shape [1,...,1] from a probability vector.
inline NormalState from_probabilities(const std::vector<double>& p, double tol = 1e-10) {
    if (p.empty()) throw InvalidShape("probability vector must be nonempty");
    std::vector<CMatrix> d;
    d.reserve(p.size());
    for (double v : p) d.push_back(CMatrix::Constant(1, 1, cplx(v)));
    return mk_state(AlgebraShape::abelian(static_cast<Index>(p.size())), std::move(d), tol);
}

inline NormalState from_probabilities(const RVector& p, double tol = 1e-10) {
    return from_probabilities(std::vector<double>(p.data(), p.data() + p.size()), tol);
}

inline NormalState from_probabilities(std::initializer_list<double> p, double tol = 1e-10) {
    return from_probabilities(std::vector<double>(p), tol);
}

inline cplx evaluate(const NormalState& rho, const AlgebraElement& a) { return rho.evaluate(a); }
inline AlgebraElement support(const NormalState& rho, double rel_tol = kSupportTolerance) {
    return rho.support(rel_tol);
}
inline bool is_tracial(const NormalState& rho, double tol = 1e-10) { return rho.is_tracial(tol); }

// ---------------------------------------------------------------------------
// Seeded generators

using Rng = std::mt19937_64;

inline CMatrix random_complex_gaussian(Index rows, Index cols, Rng& rng) {
    std::normal_distribution<double> nd(0.0, 1.0);
    CMatrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) {
            const double re = nd(rng);
            const double im = nd(rng);
            m(i, j) = cplx(re, im);
        }
    return m;
}

/// Haar-ish unitary from the QR of a complex Gaussian matrix.
inline CMatrix random_unitary(Index n, Rng& rng) {
    CMatrix g = random_complex_gaussian(n, n, rng);
    Eigen::HouseholderQR<CMatrix> qr(g);
    CMatrix q = qr.householderQ();
    CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index i = 0; i < n; ++i) {
        const cplx d = r(i, i);
        if (std::abs(d) > 0) q.col(i) *= d / std::abs(d);
    }
    return q;
}

inline AlgebraElement random_element(const AlgebraShape& shape, Rng& rng) {
    std::vector<CMatrix> b;
    for (Index n : shape.blocks()) b.push_back(random_complex_gaussian(n, n, rng));
    return {shape, std::move(b)};
}

namespace detail {

inline NormalState normalize_wishart(const AlgebraShape& shape, std::vector<CMatrix> d) {
    double total = 0.0;
    for (const auto& m : d) total += m.trace().real();
    for (auto& m : d) m /= total;
    return mk_state(shape, std::move(d), 1e-9);
}

}  // namespace detail

/// Wishart-type random state: D_k = G_k G_k^* with G_k of size n_k x rank_k,
/// normalized to total trace 1. ranks[k] = 0 gives a zero block.
inline NormalState random_state_with_ranks(const AlgebraShape& shape, const std::vector<Index>& ranks, Rng& rng) {
    if (ranks.size() != shape.num_blocks()) throw ShapeMismatch("random_state_with_ranks: rank list size");
    std::vector<CMatrix> d;
    bool any = false;
    for (std::size_t k = 0; k < shape.num_blocks(); ++k) {
        const Index n = shape.block_dim(k);
        const Index r = std::clamp<Index>(ranks[k], 0, n);
        if (r == 0) {
            d.push_back(CMatrix::Zero(n, n));
            continue;
        }
        any = true;
        CMatrix g = random_complex_gaussian(n, r, rng);
        d.push_back(g * g.adjoint());
    }
    if (!any) throw InvalidState("random_state_with_ranks: all ranks are zero", InvalidState::npos);
    return detail::normalize_wishart(shape, std::move(d));
}

/// Deterministic given the seed. With faithful = true the result has every
/// density eigenvalue >= 1e-3 (mixing toward the trace state if needed).
inline NormalState random_state(const AlgebraShape& shape, bool faithful, Rng& rng) {
    std::vector<CMatrix> d;
    for (Index n : shape.blocks()) {
        CMatrix g = random_complex_gaussian(n, n, rng);
        d.push_back(g * g.adjoint());
    }
    NormalState s = detail::normalize_wishart(shape, std::move(d));
    if (!faithful) return s;

    constexpr double floor = 1e-3;
    const double flat = 1.0 / static_cast<double>(shape.matrix_dim());
    if (flat <= floor) throw InvalidShape("random_state: algebra too large for the faithfulness floor");
    double min_eig = 1.0;
    for (const auto& ev : s.eigenvalues()) min_eig = std::min(min_eig, ev.minCoeff());
    if (min_eig >= floor) return s;
    // (1-t) min_eig + t flat = 2 floor
    const double t = std::min(1.0, (2 * floor - min_eig) / (flat - min_eig));
    std::vector<CMatrix> mixed;
    for (std::size_t k = 0; k < shape.num_blocks(); ++k) {
        const Index n = shape.block_dim(k);
        mixed.push_back((1 - t) * s.density(k) + t * flat * CMatrix::Identity(n, n));
    }
    return mk_state(shape, std::move(mixed), 1e-9);
}

inline NormalState random_state(const AlgebraShape& shape, bool faithful, std::uint64_t seed) {
    Rng rng(seed);
    return random_state(shape, faithful, rng);
}

/// Block-scalar density (w_k / n_k) I with random positive block weights.
inline NormalState random_tracial_state(const AlgebraShape& shape, Rng& rng) {
    std::uniform_real_distribution<double> ud(0.05, 1.0);
    std::vector<double> w;
    double total = 0.0;
    for (std::size_t k = 0; k < shape.num_blocks(); ++k) {
        w.push_back(ud(rng));
        total += w.back();
    }
    std::vector<CMatrix> d;
    for (std::size_t k = 0; k < shape.num_blocks(); ++k) {
        const Index n = shape.block_dim(k);
        d.push_back(CMatrix::Identity(n, n) * (w[k] / total / static_cast<double>(n)));
    }
    return mk_state(shape, std::move(d));
}

/// Trace state Tr(a)/N.
inline NormalState trace_state(const AlgebraShape& shape) {
    std::vector<CMatrix> d;
    const double c = 1.0 / static_cast<double>(shape.matrix_dim());
    for (Index n : shape.blocks()) d.push_back(CMatrix::Identity(n, n) * c);
    return mk_state(shape, std::move(d));
}

}  // namespace ncp
