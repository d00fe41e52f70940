#pragma once

// Dense/sparse aliases and the block-aware Hermitian eigensolver shared by
// the GNS, Choi and Riesz computations.

#include <algorithm>
#include <complex>
#include <numeric>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <unsupported/Eigen/KroneckerProduct>

namespace ncp {

using Index = Eigen::Index;
using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using SparseC = Eigen::SparseMatrix<cplx>;
using SparseR = Eigen::SparseMatrix<double>;
using TripletC = Eigen::Triplet<cplx>;

inline constexpr cplx I_unit{0.0, 1.0};

namespace detail {

class UnionFind {
public:
    explicit UnionFind(Index n) : parent_(static_cast<std::size_t>(n)) {
        std::iota(parent_.begin(), parent_.end(), Index{0});
    }

    Index find(Index x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(Index a, Index b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (a < b) parent_[b] = a;
        else parent_[a] = b;
    }

private:
    std::vector<Index> parent_;
};

// Rotate v so its first significant entry is real and positive.
inline void fix_phase(Eigen::Ref<CVector> v) {
    const double scale = v.cwiseAbs().maxCoeff();
    if (scale == 0.0) return;
    for (Index i = 0; i < v.size(); ++i) {
        const double a = std::abs(v(i));
        if (a > 1e-12 * scale) {
            v *= std::conj(v(i)) / a;
            v(i) = cplx(a, 0.0);
            return;
        }
    }
}

}  // namespace detail

/// Eigen-decomposition of a Hermitian matrix, eigenvalues sorted descending.
/// Eigenvectors are unit-norm columns with the phase fixed so that the first
/// significant entry is real positive.
struct HermitianSpectrum {
    RVector values;
    SparseC vectors;
};

/// Hermitian eigensolver that splits the matrix into the connected
/// components of its sparsity graph and diagonalizes each component densely.
/// The result is exactly the spectrum of the full matrix; components keep
/// block-structured problems (abelian algebras, Gram matrices) linear in the
/// number of blocks. Ties are ordered by component, then by local index.
inline HermitianSpectrum hermitian_spectrum(const SparseC& h) {
    const Index n = h.rows();
    detail::UnionFind uf(n);
    for (Index col = 0; col < h.outerSize(); ++col) {
        for (SparseC::InnerIterator it(h, col); it; ++it) {
            if (it.value() != cplx(0.0, 0.0)) uf.unite(it.row(), it.col());
        }
    }

    std::vector<std::vector<Index>> components;
    std::vector<Index> comp_of_root(static_cast<std::size_t>(n), -1);
    for (Index i = 0; i < n; ++i) {
        const Index r = uf.find(i);
        if (comp_of_root[r] < 0) {
            comp_of_root[r] = static_cast<Index>(components.size());
            components.emplace_back();
        }
        components[comp_of_root[r]].push_back(i);
    }

    struct Pair {
        double value;
        std::size_t component;
        CVector vec;
    };
    std::vector<Pair> pairs;
    pairs.reserve(static_cast<std::size_t>(n));

    for (std::size_t c = 0; c < components.size(); ++c) {
        const auto& idx = components[c];
        const Index m = static_cast<Index>(idx.size());
        if (m == 1) {
            pairs.push_back({std::real(h.coeff(idx[0], idx[0])), c, CVector::Ones(1)});
            continue;
        }
        CMatrix sub(m, m);
        for (Index a = 0; a < m; ++a)
            for (Index b = 0; b < m; ++b) sub(a, b) = h.coeff(idx[a], idx[b]);
        sub = (sub + sub.adjoint().eval()) * 0.5;
        Eigen::SelfAdjointEigenSolver<CMatrix> es(sub);
        for (Index k = m - 1; k >= 0; --k) {
            CVector v = es.eigenvectors().col(k);
            detail::fix_phase(v);
            pairs.push_back({es.eigenvalues()(k), c, std::move(v)});
        }
    }

    std::stable_sort(pairs.begin(), pairs.end(),
                     [](const Pair& a, const Pair& b) { return a.value > b.value; });

    HermitianSpectrum out;
    out.values.resize(n);
    std::vector<TripletC> trips;
    for (Index k = 0; k < static_cast<Index>(pairs.size()); ++k) {
        out.values(k) = pairs[k].value;
        const auto& idx = components[pairs[k].component];
        for (Index a = 0; a < pairs[k].vec.size(); ++a) {
            if (pairs[k].vec(a) != cplx(0.0, 0.0)) trips.emplace_back(idx[a], k, pairs[k].vec(a));
        }
    }
    out.vectors.resize(n, n);
    out.vectors.setFromTriplets(trips.begin(), trips.end());
    return out;
}

inline HermitianSpectrum hermitian_spectrum(const CMatrix& h) {
    return hermitian_spectrum(SparseC(h.sparseView()));
}

inline double min_hermitian_eigenvalue(const CMatrix& h) {
    if (h.size() == 0) return 0.0;
    CMatrix sym = (h + h.adjoint()) * 0.5;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(sym, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

inline double max_hermitian_eigenvalue(const CMatrix& h) {
    CMatrix sym = (h + h.adjoint()) * 0.5;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(sym, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(es.eigenvalues().size() - 1);
}

inline double operator_norm(const CMatrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<CMatrix> svd(m);
    return svd.singularValues()(0);
}

/// Apply a real function to a Hermitian matrix through its spectrum.
template <typename F>
CMatrix spectral_apply(const CMatrix& h, F&& f) {
    CMatrix sym = (h + h.adjoint()) * 0.5;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(sym);
    RVector fv = es.eigenvalues().unaryExpr([&](double x) { return f(x); });
    return es.eigenvectors() * fv.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace ncp
