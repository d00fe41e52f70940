#pragma once

// Shared helpers and independent oracles for the unit tests. The oracles here
// work on dense full matrices and never call the library routine they check.

#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "ncp/ncp.hpp"

namespace ncp::test {

inline const std::vector<AlgebraShape>& mixed_shapes() {
    static const std::vector<AlgebraShape> s{AlgebraShape({2}), AlgebraShape({3}), AlgebraShape({1, 1}),
                                             AlgebraShape({2, 1}), AlgebraShape({2, 3})};
    return s;
}

inline double max_abs(const CMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }
inline double max_abs(const RMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

inline double block_distance(const AlgebraElement& a, const AlgebraElement& b) {
    return max_abs(CMatrix(a.full_matrix() - b.full_matrix()));
}

/// Dense Choi matrix of phi o E, built directly from phi applied to every
/// full-matrix unit: C = (1/N) sum_ij E_ij (x) phi(E(E_ij)), with E the
/// block-diagonal compression. Uses only LinearMap::apply.
inline CMatrix choi_oracle(const LinearMap& phi) {
    const AlgebraShape& src = phi.source_shape();
    const Index n = src.matrix_dim();
    const Index na = phi.target_shape().matrix_dim();
    CMatrix c = CMatrix::Zero(n * na, n * na);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            CMatrix eij = CMatrix::Zero(n, n);
            eij(i, j) = 1.0;
            const AlgebraElement b = AlgebraElement::from_full_matrix(src, eij);
            c += Eigen::kroneckerProduct(eij, phi.apply(b).full_matrix()).eval();
        }
    }
    return c / static_cast<double>(n);
}

/// min eigenvalue via Eigen's dense solver.
inline double min_eig(const CMatrix& h) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (h + h.adjoint()));
    return es.eigenvalues().minCoeff();
}

/// SLD by solving the vectorized Lyapunov equation
/// (1 (x) D + D^T (x) 1) vec(L) = 2 vec(dD) with a dense LU.
inline CMatrix sld_lyapunov(const CMatrix& d, const CMatrix& dd) {
    const Index n = d.rows();
    const CMatrix id = CMatrix::Identity(n, n);
    const CMatrix op = Eigen::kroneckerProduct(id, d).eval() + Eigen::kroneckerProduct(CMatrix(d.transpose()), id).eval();
    const CVector rhs = 2.0 * Eigen::Map<const CVector>(dd.data(), n * n);
    const CVector sol = op.fullPivLu().solve(rhs);
    return Eigen::Map<const CMatrix>(sol.data(), n, n);
}

/// Central finite-difference metric oracle built from densities only:
/// g_ij = sum_k Tr(dD_i L_j) with L_j the SLD of block k (faithful states).
inline RMatrix qfi_from_densities(const std::vector<CMatrix>& d, const std::vector<std::vector<CMatrix>>& dd) {
    const Index p = static_cast<Index>(dd.size());
    RMatrix g = RMatrix::Zero(p, p);
    for (Index i = 0; i < p; ++i)
        for (Index j = 0; j < p; ++j)
            for (std::size_t k = 0; k < d.size(); ++k)
                g(i, j) += std::real((dd[i][k] * sld_lyapunov(d[k], dd[j][k])).trace());
    return g;
}

}  // namespace ncp::test
