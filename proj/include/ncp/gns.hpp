#pragma once

// GNS construction at an object (A, rho) and the induced contractions of
// NCP morphisms.

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "channels.hpp"

namespace ncp {

/// Gram matrix G_ab = rho(e_a^* e_b) over the matrix-unit basis. Since
/// e_ij^* e_lm = delta_il e_jm, G couples (k,i,j) only with (k,i,m), with
/// value D_k(m, j).
inline SparseC gns_gram(const NormalState& rho) {
    const AlgebraShape& shape = rho.shape();
    std::vector<TripletC> trips;
    for (std::size_t k = 0; k < shape.num_blocks(); ++k) {
        const Index n = shape.block_dim(k);
        const CMatrix& d = rho.density(k);
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j)
                for (Index m = 0; m < n; ++m)
                    if (d(m, j) != cplx(0.0)) trips.emplace_back(shape.coordinate(k, i, j), shape.coordinate(k, i, m), d(m, j));
    }
    SparseC g(shape.element_dim(), shape.element_dim());
    g.setFromTriplets(trips.begin(), trips.end());
    return g;
}

/// The GNS Hilbert space H_rho = A / N_rho in orthonormal coordinates.
///
/// The Gram matrix is diagonalized; eigenvectors u_k with eigenvalue
/// lambda_k above rel_tol * lambda_max span the quotient, and
///   iso  = diag(sqrt(lambda)) U^*   (d x E, element coords -> GNS coords)
///   reps = U diag(1/sqrt(lambda))   (E x d, representatives of the basis)
/// so that iso * reps = 1 and <x|y>_rho = (iso x)^* (iso y). The discarded
/// eigenvectors span the Gelfand ideal.
class GnsSpace {
public:
    const NormalState& state() const noexcept { return state_; }
    const AlgebraShape& shape() const noexcept { return state_.shape(); }
    Index dim() const noexcept { return iso_.rows(); }
    const SparseC& iso_matrix() const noexcept { return iso_; }
    const SparseC& reps() const noexcept { return reps_; }
    const SparseC& null_vectors() const noexcept { return null_; }
    const RVector& gram_eigenvalues() const noexcept { return gram_eigenvalues_; }
    const CVector& cyclic() const noexcept { return cyclic_; }
    double tolerance() const noexcept { return tol_; }

    CVector embed(const AlgebraElement& a) const {
        require_same_shape(a.shape(), shape(), "GnsSpace::embed");
        return iso_ * a.coords();
    }

    cplx inner(const AlgebraElement& a, const AlgebraElement& b) const { return embed(a).dot(embed(b)); }

    /// Algebra element whose class is the i-th orthonormal basis vector.
    AlgebraElement rep_element(Index i) const {
        return AlgebraElement::from_coords(shape(), CVector(reps_.col(i)));
    }

    /// Element whose class has the given GNS coordinates.
    AlgebraElement lift(const CVector& xi) const { return AlgebraElement::from_coords(shape(), reps_ * xi); }

private:
    friend GnsSpace build_gns(const NormalState&, double);

    explicit GnsSpace(NormalState s) : state_(std::move(s)) {}

    NormalState state_;
    SparseC iso_;
    SparseC reps_;
    SparseC null_;
    RVector gram_eigenvalues_;
    CVector cyclic_;
    double tol_ = 0.0;
};

inline GnsSpace build_gns(const NormalState& rho, double rel_tol = kSupportTolerance) {
    GnsSpace space(rho);
    space.tol_ = rel_tol;
    const HermitianSpectrum spec = hermitian_spectrum(gns_gram(rho));
    space.gram_eigenvalues_ = spec.values;
    const double cut = rel_tol * std::max(spec.values(0), 0.0);
    Index d = 0;
    while (d < spec.values.size() && spec.values(d) > cut) ++d;

    const Index e = rho.shape().element_dim();
    std::vector<TripletC> iso_t, rep_t, null_t;
    for (Index k = 0; k < spec.vectors.outerSize(); ++k) {
        const double lam = spec.values(k);
        for (SparseC::InnerIterator it(spec.vectors, k); it; ++it) {
            if (k < d) {
                iso_t.emplace_back(k, it.row(), std::conj(it.value()) * std::sqrt(lam));
                rep_t.emplace_back(it.row(), k, it.value() / std::sqrt(lam));
            } else {
                null_t.emplace_back(it.row(), k - d, it.value());
            }
        }
    }
    space.iso_.resize(d, e);
    space.iso_.setFromTriplets(iso_t.begin(), iso_t.end());
    space.reps_.resize(e, d);
    space.reps_.setFromTriplets(rep_t.begin(), rep_t.end());
    space.null_.resize(e, e - d);
    space.null_.setFromTriplets(null_t.begin(), null_t.end());
    space.cyclic_ = space.iso_ * AlgebraElement::identity(rho.shape()).coords();
    return space;
}

inline CVector embed(const GnsSpace& space, const AlgebraElement& a) { return space.embed(a); }
inline cplx inner(const GnsSpace& space, const AlgebraElement& a, const AlgebraElement& b) {
    return space.inner(a, b);
}

/// Phi~ : H_sigma -> H_rho, [b] -> [phi(b)], in orthonormal coordinates.
struct GnsContraction {
    Index source_dim = 0;  // dim H_sigma
    Index target_dim = 0;  // dim H_rho
    CMatrix matrix;
    double operator_norm = 0.0;
    /// max(0, operator_norm - 1); analytically zero.
    double norm_excess = 0.0;
    /// Largest image norm of a sigma-Gelfand-ideal basis vector.
    double ideal_leak = 0.0;
};

inline constexpr double kWellDefinedTolerance = 1e-8;

/// Throws ObjectMismatch if the spaces are not built on the morphism's
/// objects, WellDefinednessError if the sigma-Gelfand ideal is not mapped
/// into the rho-Gelfand ideal within kWellDefinedTolerance.
inline GnsContraction induced_contraction(const NcpMorphism& phi, const GnsSpace& sigma_space,
                                          const GnsSpace& rho_space, double object_tol = 1e-9) {
    if (sigma_space.state().distance(phi.target()) > object_tol) {
        throw ObjectMismatch("induced_contraction: source space is not built on the morphism target (B, sigma)");
    }
    if (rho_space.state().distance(phi.source()) > object_tol) {
        throw ObjectMismatch("induced_contraction: target space is not built on the morphism source (A, rho)");
    }
    const SparseC& action = phi.cpu().linear().action();
    GnsContraction out;
    out.source_dim = sigma_space.dim();
    out.target_dim = rho_space.dim();

    if (sigma_space.null_vectors().cols() > 0) {
        const CMatrix leak = CMatrix(rho_space.iso_matrix() * (action * sigma_space.null_vectors()));
        out.ideal_leak = leak.colwise().norm().maxCoeff();
        if (out.ideal_leak > kWellDefinedTolerance) {
            throw WellDefinednessError("Gelfand ideal of sigma is not mapped into the Gelfand ideal of rho (leak " +
                                           std::to_string(out.ideal_leak) +
                                           "); the support tolerance may misidentify the rank",
                                       out.ideal_leak);
        }
    }
    out.matrix = CMatrix(rho_space.iso_matrix() * (action * sigma_space.reps()));
    out.operator_norm = operator_norm(out.matrix);
    out.norm_excess = std::max(0.0, out.operator_norm - 1.0);
    return out;
}

struct FunctorLawReport {
    double max_identity_deviation = 0.0;
    double max_composition_deviation = 0.0;
    double max_norm_excess = 0.0;
    std::size_t checked_chains = 0;
    double tol = 0.0;
    bool pass = false;
};

/// For each composable chain Phi_1, ..., Phi_L (Phi_{i+1} starting where
/// Phi_i ends) checks G(id) = id at every object and contravariance
/// G(Phi_L o ... o Phi_1) = G(Phi_1) o ... o G(Phi_L) on every prefix.
inline FunctorLawReport check_functor_laws(const std::vector<std::vector<NcpMorphism>>& chains, double tol = 1e-9) {
    FunctorLawReport rep;
    rep.tol = tol;
    for (const auto& chain : chains) {
        if (chain.empty()) continue;
        std::vector<GnsSpace> spaces;
        spaces.push_back(build_gns(chain.front().source()));
        for (const auto& m : chain) spaces.push_back(build_gns(m.target()));

        for (const auto& s : spaces) {
            const auto id = induced_contraction(identity_morphism(s.state()), s, s);
            rep.max_identity_deviation = std::max(
                rep.max_identity_deviation, (id.matrix - CMatrix::Identity(s.dim(), s.dim())).cwiseAbs().maxCoeff());
        }

        NcpMorphism composite = chain.front();
        CMatrix product = induced_contraction(chain.front(), spaces[1], spaces[0]).matrix;
        for (std::size_t i = 1; i < chain.size(); ++i) {
            const auto step = induced_contraction(chain[i], spaces[i + 1], spaces[i]);
            rep.max_norm_excess = std::max(rep.max_norm_excess, step.norm_excess);
            product = (product * step.matrix).eval();
            composite = compose(chain[i], composite);
            const auto direct = induced_contraction(composite, spaces[i + 1], spaces[0]);
            rep.max_composition_deviation =
                std::max(rep.max_composition_deviation, (direct.matrix - product).cwiseAbs().maxCoeff());
        }
        ++rep.checked_chains;
    }
    rep.pass = rep.max_identity_deviation < tol && rep.max_composition_deviation < tol;
    return rep;
}

}  // namespace ncp
