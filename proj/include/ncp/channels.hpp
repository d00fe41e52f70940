#pragma once

// Linear and CPU maps between block algebras (Heisenberg picture), the Choi
// test, preduals, NCP morphisms, Markov maps and congruent embeddings.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "states.hpp"

namespace ncp {

/// A linear map phi: B -> A between block algebras, stored as a sparse matrix
/// acting on element coordinates: coords(phi(b)) = action * coords(b).
/// "source" is the domain B, "target" the codomain A.
class LinearMap {
public:
    LinearMap(AlgebraShape source, AlgebraShape target, SparseC action)
        : source_(std::move(source)), target_(std::move(target)), action_(std::move(action)) {
        if (action_.rows() != target_.element_dim() || action_.cols() != source_.element_dim()) {
            throw ShapeMismatch("linear action is " + std::to_string(action_.rows()) + "x" +
                                std::to_string(action_.cols()) + ", expected " +
                                std::to_string(target_.element_dim()) + "x" + std::to_string(source_.element_dim()));
        }
        action_.makeCompressed();
    }

    static LinearMap identity(const AlgebraShape& shape) {
        SparseC id(shape.element_dim(), shape.element_dim());
        id.setIdentity();
        return {shape, shape, std::move(id)};
    }

    /// Tabulates f on the matrix-unit basis of the source.
    template <typename F>
    static LinearMap from_function(const AlgebraShape& source, const AlgebraShape& target, F&& f) {
        std::vector<TripletC> trips;
        Index col = 0;
        for (const auto& e : basis(source)) {
            const AlgebraElement img = f(e);
            require_same_shape(img.shape(), target, "LinearMap::from_function");
            const CVector c = img.coords();
            for (Index r = 0; r < c.size(); ++r)
                if (c(r) != cplx(0.0)) trips.emplace_back(r, col, c(r));
            ++col;
        }
        SparseC a(target.element_dim(), source.element_dim());
        a.setFromTriplets(trips.begin(), trips.end());
        return {source, target, std::move(a)};
    }

    const AlgebraShape& source_shape() const noexcept { return source_; }
    const AlgebraShape& target_shape() const noexcept { return target_; }
    const SparseC& action() const noexcept { return action_; }

    AlgebraElement apply(const AlgebraElement& b) const {
        require_same_shape(b.shape(), source_, "LinearMap::apply");
        return AlgebraElement::from_coords(target_, action_ * b.coords());
    }

    AlgebraElement operator()(const AlgebraElement& b) const { return apply(b); }

    /// Dual action on density-like blocks: returns Y on the source with
    /// Tr(Y b) = Tr(X phi(b)) for all b. Linear; no positivity checks, so it
    /// also transports traceless tangent vectors.
    std::vector<CMatrix> dual_apply(const std::vector<CMatrix>& x) const {
        const AlgebraElement xt = AlgebraElement(target_, x).transpose();
        const CVector s = action_.transpose() * xt.coords();
        return AlgebraElement::from_coords(source_, s).transpose().blocks();
    }

    /// Hilbert-Schmidt distance of phi(1) from 1.
    double unitality_defect() const {
        return (apply(AlgebraElement::identity(source_)) - AlgebraElement::identity(target_)).hs_norm();
    }

private:
    AlgebraShape source_;
    AlgebraShape target_;
    SparseC action_;
};

/// outer o inner; requires inner's codomain to be outer's domain.
inline LinearMap compose(const LinearMap& outer, const LinearMap& inner) {
    require_same_shape(inner.target_shape(), outer.source_shape(), "compose");
    SparseC a = (outer.action() * inner.action()).pruned();
    return {inner.source_shape(), outer.target_shape(), std::move(a)};
}

// ---------------------------------------------------------------------------
// Choi test

/// Sparse Choi matrix of phi o E, where E is the trace-preserving conditional
/// expectation of M_N (N = matrix_dim of the source) onto the block-diagonal
/// source algebra. Entry ((i,r),(j,c)) = phi(E_ij)_rc / N, so the identity
/// map on M_n gives the maximally entangled projector.
inline SparseC choi_sparse(const LinearMap& phi) {
    const AlgebraShape& src = phi.source_shape();
    const AlgebraShape& dst = phi.target_shape();
    const Index na = dst.matrix_dim();
    const double scale = 1.0 / static_cast<double>(src.matrix_dim());
    std::vector<TripletC> trips;
    trips.reserve(static_cast<std::size_t>(phi.action().nonZeros()));
    for (Index col = 0; col < phi.action().outerSize(); ++col) {
        const auto [kb, ib, jb] = src.locate(col);
        const Index i = src.row_offset(kb) + ib;
        const Index j = src.row_offset(kb) + jb;
        for (SparseC::InnerIterator it(phi.action(), col); it; ++it) {
            const auto [ka, ra, ca] = dst.locate(it.row());
            const Index r = dst.row_offset(ka) + ra;
            const Index c = dst.row_offset(ka) + ca;
            trips.emplace_back(i * na + r, j * na + c, it.value() * scale);
        }
    }
    const Index n = src.matrix_dim() * na;
    SparseC choi(n, n);
    choi.setFromTriplets(trips.begin(), trips.end());
    return choi;
}

inline CMatrix choi(const LinearMap& phi) { return CMatrix(choi_sparse(phi)); }

struct ChoiReport {
    bool cp = false;
    bool hermitian = false;
    double min_eigenvalue = 0.0;
    double trace = 0.0;
    double tol = 0.0;
};

/// CP iff the Choi matrix of phi o E is Hermitian and PSD; the tolerance is
/// scaled by the Choi trace (max with 1).
inline ChoiReport check_cp(const LinearMap& phi, double tol = 1e-9) {
    const SparseC c = choi_sparse(phi);
    ChoiReport rep;
    rep.tol = tol;
    rep.trace = std::real(CVector(c.diagonal()).sum());
    const double scale = std::max(1.0, std::abs(rep.trace));
    const SparseC skew = c - SparseC(c.adjoint());
    rep.hermitian = skew.norm() <= tol * scale;
    const HermitianSpectrum spec = hermitian_spectrum(c);
    rep.min_eigenvalue = spec.values.size() ? spec.values(spec.values.size() - 1) : 0.0;
    rep.cp = rep.hermitian && rep.min_eigenvalue >= -tol * scale;
    return rep;
}

inline bool is_cp(const LinearMap& phi, double tol = 1e-9) { return check_cp(phi, tol).cp; }
inline bool is_unital(const LinearMap& phi, double tol = 1e-10) { return phi.unitality_defect() <= tol; }

// ---------------------------------------------------------------------------
// CPU maps

/// A unital completely positive map phi: B -> A. Only constructible through
/// checked factories, so holding one means CP and unitality were verified
/// (or hold by construction: Kraus form, stochastic matrices).
class CpuMap {
public:
    /// Runs the Choi and unitality checks; throws InvalidChannel.
    static CpuMap verify(LinearMap map, double cp_tol = 1e-9, double unital_tol = 1e-10) {
        const double defect = map.unitality_defect();
        if (defect > unital_tol) throw InvalidChannel("map is not unital: |phi(1) - 1| = " + std::to_string(defect), defect);
        const ChoiReport rep = check_cp(map, cp_tol);
        if (!rep.cp) {
            throw InvalidChannel("map is not completely positive: min Choi eigenvalue " +
                                     std::to_string(rep.min_eigenvalue),
                                 -rep.min_eigenvalue);
        }
        return CpuMap(std::move(map));
    }

    static CpuMap identity(const AlgebraShape& shape) { return CpuMap(LinearMap::identity(shape)); }

    const LinearMap& linear() const noexcept { return map_; }
    const AlgebraShape& source_shape() const noexcept { return map_.source_shape(); }
    const AlgebraShape& target_shape() const noexcept { return map_.target_shape(); }
    const std::vector<CMatrix>& kraus() const noexcept { return kraus_; }

    AlgebraElement apply(const AlgebraElement& b) const { return map_.apply(b); }
    AlgebraElement operator()(const AlgebraElement& b) const { return map_.apply(b); }

private:
    explicit CpuMap(LinearMap m, std::vector<CMatrix> kraus = {}) : map_(std::move(m)), kraus_(std::move(kraus)) {}

    friend CpuMap from_kraus(const AlgebraShape&, const AlgebraShape&, std::vector<CMatrix>, double);
    friend CpuMap compose(const CpuMap&, const CpuMap&);
    friend CpuMap markov_from_stochastic(const SparseR&, double);

    LinearMap map_;
    std::vector<CMatrix> kraus_;
};

/// Linear map b -> E_A( sum_i K_i^* b K_i ), each K_i of size N_B x N_A and
/// E_A the block-diagonal projection of the target. No unitality check.
inline LinearMap kraus_linear(const AlgebraShape& source, const AlgebraShape& target,
                              const std::vector<CMatrix>& kraus) {
    const Index nb = source.matrix_dim(), na = target.matrix_dim();
    for (std::size_t i = 0; i < kraus.size(); ++i) {
        const CMatrix& k = kraus[i];
        if (k.rows() != nb || k.cols() != na) {
            throw ShapeMismatch("Kraus operator " + std::to_string(i) + " is " + std::to_string(k.rows()) + "x" +
                                std::to_string(k.cols()) + ", expected " + std::to_string(nb) + "x" +
                                std::to_string(na));
        }
    }
    std::vector<TripletC> trips;
    for (std::size_t kb = 0; kb < source.num_blocks(); ++kb) {
        const Index n = source.block_dim(kb), off = source.row_offset(kb);
        for (Index i = 0; i < n; ++i) {
            for (Index j = 0; j < n; ++j) {
                // K^* E_pq K = (row p of K)^* (row q of K)
                CMatrix img = CMatrix::Zero(na, na);
                for (const auto& k : kraus) img += k.row(off + i).adjoint() * k.row(off + j);
                const CVector c = AlgebraElement::from_full_matrix(target, img).coords();
                const Index col = source.coordinate(kb, i, j);
                for (Index r = 0; r < c.size(); ++r)
                    if (std::abs(c(r)) > 0.0) trips.emplace_back(r, col, c(r));
            }
        }
    }
    SparseC a(target.element_dim(), source.element_dim());
    a.setFromTriplets(trips.begin(), trips.end());
    return {source, target, std::move(a)};
}

/// CPU map from Kraus operators; requires sum_i K_i^* K_i = 1 within tol.
/// Complete positivity holds by construction.
inline CpuMap from_kraus(const AlgebraShape& source, const AlgebraShape& target, std::vector<CMatrix> kraus,
                         double tol = 1e-10) {
    if (kraus.empty()) throw InvalidChannel("Kraus list is empty", 0.0);
    LinearMap lin = kraus_linear(source, target, kraus);
    const Index na = target.matrix_dim();
    CMatrix sum = CMatrix::Zero(na, na);
    for (const auto& k : kraus) sum += k.adjoint() * k;
    const double defect = (sum - CMatrix::Identity(na, na)).norm();
    if (defect > tol) {
        throw InvalidChannel("Kraus operators are not unital: |sum K^*K - 1| = " + std::to_string(defect), defect);
    }
    return CpuMap(std::move(lin), std::move(kraus));
}

/// Conjugation b -> U^* b U on M_n (an automorphism).
inline CpuMap unitary_conjugation(const CMatrix& u) {
    const AlgebraShape shape({u.rows()});
    return from_kraus(shape, shape, {u}, 1e-9);
}

/// phi_outer o phi_inner. Kraus data is not carried through composition.
inline CpuMap compose(const CpuMap& outer, const CpuMap& inner) {
    return CpuMap(compose(outer.linear(), inner.linear()));
}

/// Qubit depolarizing map (1 - lambda) b + lambda Tr(b)/2 I as a linear map,
/// valid for any real lambda (CP only on [0, 4/3]).
inline LinearMap depolarizing_linear(double lambda) {
    const AlgebraShape q({2});
    return LinearMap::from_function(q, q, [&](const AlgebraElement& b) {
        return (1.0 - lambda) * b + (lambda * b.trace() / 2.0) * AlgebraElement::identity(q);
    });
}

/// Depolarizing map through its four Pauli Kraus operators; lambda in [0, 4/3].
inline CpuMap depolarizing(double lambda) {
    if (lambda < 0.0 || lambda > 4.0 / 3.0) {
        throw InvalidChannel("depolarizing Kraus form needs lambda in [0, 4/3]", lambda);
    }
    const AlgebraShape q({2});
    std::vector<CMatrix> k{std::sqrt(1.0 - 0.75 * lambda) * CMatrix::Identity(2, 2),
                           std::sqrt(lambda / 4.0) * pauli::x(), std::sqrt(lambda / 4.0) * pauli::y(),
                           std::sqrt(lambda / 4.0) * pauli::z()};
    return from_kraus(q, q, std::move(k));
}

/// Blockwise transpose on a shape (positive, not completely positive unless abelian).
inline LinearMap transpose_map(const AlgebraShape& shape) {
    return LinearMap::from_function(shape, shape, [](const AlgebraElement& b) { return b.transpose(); });
}

/// Random Kraus channel B -> A: Gaussian Kraus stack orthonormalized so that
/// sum K^* K = 1.
inline CpuMap random_kraus_channel(const AlgebraShape& source, const AlgebraShape& target, Index n_kraus, Rng& rng) {
    const Index nb = source.matrix_dim(), na = target.matrix_dim();
    // an isometry C^na -> C^(n*nb) needs n*nb >= na
    n_kraus = std::max(n_kraus, (na + nb - 1) / nb);
    CMatrix v = random_complex_gaussian(n_kraus * nb, na, rng);
    const CMatrix gram = v.adjoint() * v;
    v = (v * spectral_apply(gram, [](double x) { return 1.0 / std::sqrt(x); })).eval();
    std::vector<CMatrix> kraus;
    for (Index i = 0; i < n_kraus; ++i) kraus.push_back(v.block(i * nb, 0, nb, na));
    return from_kraus(source, target, std::move(kraus), 1e-9);
}

// ---------------------------------------------------------------------------
// Preduals

/// The state b -> rho(phi(b)) on the domain of phi. Throws InvalidChannel if
/// the result fails state validation (phi was not CPU).
inline NormalState predual(const LinearMap& phi, const NormalState& rho, double tol = 1e-9) {
    require_same_shape(rho.shape(), phi.target_shape(), "predual");
    try {
        return mk_state(phi.source_shape(), phi.dual_apply(rho.densities()), tol);
    } catch (const InvalidState& e) {
        throw InvalidChannel(std::string("predual is not a state (map not CPU?): ") + e.what(), 0.0);
    }
}

inline NormalState predual(const CpuMap& phi, const NormalState& rho, double tol = 1e-9) {
    return predual(phi.linear(), rho, tol);
}

/// Largest |rho(phi(b)) - sigma(b)| over matrix units b of the domain.
inline double preservation_deviation(const LinearMap& phi, const NormalState& rho, const NormalState& sigma) {
    require_same_shape(rho.shape(), phi.target_shape(), "preservation_deviation");
    require_same_shape(sigma.shape(), phi.source_shape(), "preservation_deviation");
    const auto pulled = phi.dual_apply(rho.densities());
    double dev = 0.0;
    for (std::size_t k = 0; k < pulled.size(); ++k)
        dev = std::max(dev, (pulled[k] - sigma.density(k)).cwiseAbs().maxCoeff());
    return dev;
}

// ---------------------------------------------------------------------------
// Morphisms

/// Phi: (A, rho) -> (B, sigma), carried by a CPU map phi: B -> A with
/// rho o phi = sigma.
class NcpMorphism {
public:
    const NormalState& source() const noexcept { return source_; }
    const NormalState& target() const noexcept { return target_; }
    const CpuMap& cpu() const noexcept { return cpu_; }
    double preservation_deviation() const noexcept { return deviation_; }

private:
    NcpMorphism(NormalState s, NormalState t, CpuMap m, double dev)
        : source_(std::move(s)), target_(std::move(t)), cpu_(std::move(m)), deviation_(dev) {}

    friend NcpMorphism mk_morphism(const NormalState&, const NormalState&, const CpuMap&, double);
    friend NcpMorphism compose(const NcpMorphism&, const NcpMorphism&, double);

    NormalState source_;
    NormalState target_;
    CpuMap cpu_;
    double deviation_;
};

inline NcpMorphism mk_morphism(const NormalState& source, const NormalState& target, const CpuMap& phi,
                               double tol = 1e-9) {
    if (phi.target_shape() != source.shape() || phi.source_shape() != target.shape()) {
        throw ObjectMismatch("morphism (A,rho)->(B,sigma) needs phi: B->A; got phi: " + phi.source_shape().to_string() +
                             "->" + phi.target_shape().to_string() + " for A=" + source.shape().to_string() +
                             ", B=" + target.shape().to_string());
    }
    const double dev = preservation_deviation(phi.linear(), source, target);
    if (dev > tol) {
        throw StatePreservationError("rho o phi differs from sigma by " + std::to_string(dev), dev);
    }
    return NcpMorphism(source, target, phi, dev);
}

inline NcpMorphism identity_morphism(const NormalState& obj) {
    return mk_morphism(obj, obj, CpuMap::identity(obj.shape()), 0.0);
}

/// second o first for first: (A,rho)->(B,sigma), second: (B,sigma)->(C,gamma).
/// The carried map is phi_first o phi_second : C -> A.
inline NcpMorphism compose(const NcpMorphism& second, const NcpMorphism& first, double tol = 1e-9) {
    if (first.target().distance(second.source()) > tol) {
        throw ObjectMismatch("compose: middle objects differ");
    }
    CpuMap phi = compose(first.cpu(), second.cpu());
    const double dev = preservation_deviation(phi.linear(), first.source(), second.target());
    return NcpMorphism(first.source(), second.target(), std::move(phi), dev);
}

/// Random verified morphism out of (A, rho): random Kraus map B -> A with
/// sigma its predual.
inline NcpMorphism random_morphism(const NormalState& rho, const AlgebraShape& target_shape, Rng& rng,
                                   Index n_kraus = 2) {
    CpuMap phi = random_kraus_channel(target_shape, rho.shape(), n_kraus, rng);
    NormalState sigma = predual(phi, rho);
    return mk_morphism(rho, sigma, phi);
}

// ---------------------------------------------------------------------------
// Markov maps

/// Column-stochastic S (m x n) as the Heisenberg map phi(f)_j = sum_i S_ij f_i
/// from functions on m points to functions on n points; its predual sends a
/// probability vector p to S p.
inline CpuMap markov_from_stochastic(const SparseR& s, double tol = 1e-10) {
    const Index m = s.rows(), n = s.cols();
    if (m < 1 || n < 1) throw InvalidChannel("stochastic matrix is empty", 0.0);
    RVector colsum = RVector::Zero(n);
    for (Index j = 0; j < s.outerSize(); ++j) {
        for (SparseR::InnerIterator it(s, j); it; ++it) {
            if (it.value() < 0.0) throw InvalidChannel("stochastic matrix has a negative entry", -it.value());
            colsum(it.col()) += it.value();
        }
    }
    const double dev = (colsum.array() - 1.0).abs().maxCoeff();
    if (dev > tol) throw InvalidChannel("stochastic matrix columns do not sum to 1", dev);
    SparseC a = SparseC(s.transpose().cast<cplx>());
    return CpuMap(LinearMap(AlgebraShape::abelian(m), AlgebraShape::abelian(n), std::move(a)));
}

inline CpuMap markov_from_stochastic(const RMatrix& s, double tol = 1e-10) {
    return markov_from_stochastic(SparseR(s.sparseView()), tol);
}

/// Recovers the column-stochastic matrix of a map between abelian algebras.
inline RMatrix stochastic_matrix(const LinearMap& phi) {
    if (!phi.source_shape().is_abelian() || !phi.target_shape().is_abelian()) {
        throw ShapeMismatch("stochastic_matrix requires abelian shapes");
    }
    return RMatrix(phi.action().real()).transpose();
}

/// Congruent embedding Delta_n -> Delta_m given by a surjection
/// partition: {0..m-1} -> {0..n-1} and positive weights summing to 1 on each
/// fiber: q_i = w_i p_partition(i). The left inverse sums over fibers.
struct CongruentEmbedding {
    std::vector<Index> partition;
    std::vector<double> weights;
    Index coarse_size = 0;

    Index fine_size() const { return static_cast<Index>(partition.size()); }

    /// m x n column-stochastic matrix of the embedding.
    RMatrix stochastic() const {
        RMatrix s = RMatrix::Zero(fine_size(), coarse_size);
        for (Index i = 0; i < fine_size(); ++i) s(i, partition[i]) = weights[i];
        return s;
    }

    /// n x m fiber-summing stochastic matrix.
    RMatrix left_inverse_stochastic() const {
        RMatrix s = RMatrix::Zero(coarse_size, fine_size());
        for (Index i = 0; i < fine_size(); ++i) s(partition[i], i) = 1.0;
        return s;
    }

    CpuMap map() const { return markov_from_stochastic(stochastic()); }
    CpuMap left_inverse() const { return markov_from_stochastic(left_inverse_stochastic()); }
};

inline CongruentEmbedding congruent_embedding(std::vector<Index> partition, std::vector<double> weights,
                                              double tol = 1e-12) {
    if (partition.empty()) throw InvalidChannel("partition is empty", 0.0);
    if (weights.size() != partition.size()) throw InvalidChannel("partition and weights differ in length", 0.0);
    const Index n = *std::max_element(partition.begin(), partition.end()) + 1;
    std::vector<double> fiber(static_cast<std::size_t>(n), 0.0);
    for (std::size_t i = 0; i < partition.size(); ++i) {
        if (partition[i] < 0) throw InvalidChannel("partition index is negative", 0.0);
        if (!(weights[i] > 0.0)) throw InvalidChannel("embedding weights must be strictly positive", weights[i]);
        fiber[partition[i]] += weights[i];
    }
    for (Index j = 0; j < n; ++j) {
        if (fiber[j] == 0.0) throw InvalidChannel("partition is not surjective (empty fiber " + std::to_string(j) + ")", 0.0);
        if (std::abs(fiber[j] - 1.0) > tol) {
            throw InvalidChannel("weights on fiber " + std::to_string(j) + " sum to " + std::to_string(fiber[j]),
                                 std::abs(fiber[j] - 1.0));
        }
    }
    return {std::move(partition), std::move(weights), n};
}

}  // namespace ncp
