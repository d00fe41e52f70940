#pragma once

// Fields of covariances: Hermitian products on GNS coordinates. The GNS kind
// is the GNS inner product itself; Petz(f) kinds weight the matrix
// coordinates of each block, in the eigenbasis of D_k, by d_j f(d_i / d_j).

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "gns.hpp"

namespace ncp {

struct OperatorMonotoneFunction {
    std::string name;
    std::function<double(double)> eval;
    bool normalized = true;  // f(1) = 1
    bool symmetric = true;   // f(t) = t f(1/t)

    double operator()(double t) const { return eval(t); }
};

namespace omf {

inline OperatorMonotoneFunction sld() {
    return {"sld", [](double t) { return 0.5 * (1.0 + t); }, true, true};
}

/// (t - 1) / ln t, continued by its limit 1 at t = 1.
inline OperatorMonotoneFunction kmb() {
    return {"kmb",
            [](double t) {
                const double u = t - 1.0;
                if (u == 0.0) return 1.0;
                return u / std::log1p(u);
            },
            true, true};
}

inline OperatorMonotoneFunction wy() {
    return {"wy",
            [](double t) {
                const double h = 0.5 * (1.0 + std::sqrt(t));
                return h * h;
            },
            true, true};
}

inline OperatorMonotoneFunction rld() {
    return {"rld", [](double t) { return 2.0 * t / (1.0 + t); }, true, true};
}

/// f = 1; its Petz form is the GNS product (not symmetric).
inline OperatorMonotoneFunction unit() {
    return {"one", [](double) { return 1.0; }, true, false};
}

}  // namespace omf

inline std::vector<OperatorMonotoneFunction> omf_catalog() {
    return {omf::sld(), omf::kmb(), omf::wy(), omf::rld()};
}

/// Looks up a catalog function (or "one") by name.
inline std::optional<OperatorMonotoneFunction> find_omf(const std::string& name) {
    if (name == "one") return omf::unit();
    for (auto& f : omf_catalog())
        if (f.name == name) return f;
    return std::nullopt;
}

struct OmfCheckReport {
    std::string name;
    double normalization_error = 0.0;  // |f(1) - 1|
    double symmetry_error = 0.0;       // max |f(t) - t f(1/t)| / f(t) on the grid
    bool grid_monotone = false;
    double worst_matrix_gap = 0.0;     // most negative eigenvalue of f(B) - f(A)
    bool pass = false;
};

/// Normalization, monotonicity on a log grid of 1000 points in [1e-6, 1e6],
/// and a 2x2 operator-monotonicity spot check on random pairs 0 < A <= B.
inline OmfCheckReport check_operator_monotone(const OperatorMonotoneFunction& f, std::uint64_t seed = 0,
                                              int matrix_pairs = 100) {
    OmfCheckReport rep;
    rep.name = f.name;
    rep.normalization_error = std::abs(f(1.0) - 1.0);

    rep.grid_monotone = true;
    double prev = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < 1000; ++i) {
        const double t = std::pow(10.0, -6.0 + 12.0 * i / 999.0);
        const double v = f(t);
        if (!(v >= prev)) rep.grid_monotone = false;
        prev = v;
        if (f.symmetric) rep.symmetry_error = std::max(rep.symmetry_error, std::abs(v - t * f(1.0 / t)) / v);
    }

    Rng rng(seed);
    for (int p = 0; p < matrix_pairs; ++p) {
        CMatrix ga = random_complex_gaussian(2, 2, rng);
        CMatrix gp = random_complex_gaussian(2, 1, rng);
        CMatrix a = ga * ga.adjoint() + 1e-3 * CMatrix::Identity(2, 2);
        CMatrix b = a + gp * gp.adjoint();
        const auto fm = [&](const CMatrix& m) { return spectral_apply(m, [&](double x) { return f(x); }); };
        const double gap = min_hermitian_eigenvalue(fm(b) - fm(a));
        rep.worst_matrix_gap = std::min(rep.worst_matrix_gap, gap);
    }
    rep.pass = rep.grid_monotone && (!f.normalized || rep.normalization_error <= 1e-12) &&
               rep.symmetry_error <= 1e-10 && rep.worst_matrix_gap >= -1e-8;
    return rep;
}

/// Field-of-covariances descriptor. scale is the global positive constant
/// left free by the uniqueness statement; default 1.
struct CovarianceKind {
    enum class Tag { Gns, Petz };
    Tag tag = Tag::Gns;
    std::optional<OperatorMonotoneFunction> f;
    double scale = 1.0;

    static CovarianceKind gns(double scale = 1.0) { return {Tag::Gns, std::nullopt, scale}; }
    static CovarianceKind petz(OperatorMonotoneFunction f, double scale = 1.0) { return {Tag::Petz, std::move(f), scale}; }

    std::string name() const { return tag == Tag::Gns ? std::string("gns") : f->name; }
};

/// "gns" or an operator monotone function name.
inline std::optional<CovarianceKind> parse_kind(const std::string& name) {
    if (name == "gns") return CovarianceKind::gns();
    if (auto f = find_omf(name)) return CovarianceKind::petz(*f);
    return std::nullopt;
}

/// The catalog as kinds: GNS first, then every Petz kind.
inline std::vector<CovarianceKind> kind_catalog() {
    std::vector<CovarianceKind> out{CovarianceKind::gns()};
    for (auto& f : omf_catalog()) out.push_back(CovarianceKind::petz(f));
    return out;
}

/// The product c_rho in the GNS coordinates of its space. The dimension is
/// always the GNS dimension: a covariance lives on the vector space of H_rho.
class CovarianceGram {
public:
    Index dim() const noexcept { return gram_.rows(); }
    const SparseC& gram() const noexcept { return gram_; }
    CMatrix dense() const { return CMatrix(gram_); }
    const std::string& kind_name() const noexcept { return kind_; }

    cplx pair(const CVector& xi, const CVector& eta) const { return xi.dot(gram_ * eta); }

    /// Testing hook: replaces the matrix, keeping the dimension.
    CovarianceGram with_matrix(const CMatrix& m) const {
        if (m.rows() != dim() || m.cols() != dim()) throw ShapeMismatch("replacement Gram has the wrong dimension");
        return CovarianceGram(kind_ + "*", SparseC(m.sparseView()));
    }

private:
    friend CovarianceGram covariance_gram(const CovarianceKind&, const GnsSpace&);

    CovarianceGram(std::string kind, SparseC g) : kind_(std::move(kind)), gram_(std::move(g)) {}

    std::string kind_;
    SparseC gram_;
};

/// Element-coordinate matrix W of a Petz form: c(x, y) = coords(x)^* W coords(y).
/// Per block, with D = V diag(d) V^*, x~ = V^* x V and
/// c = sum_ij d_j f(d_i/d_j) conj(x~_ij) y~_ij; row-major vec(V^* x V) = (V^* (x) V^T) vec(x).
inline SparseC petz_form(const OperatorMonotoneFunction& f, const NormalState& rho) {
    const AlgebraShape& shape = rho.shape();
    std::vector<TripletC> trips;
    for (std::size_t k = 0; k < shape.num_blocks(); ++k) {
        const Index n = shape.block_dim(k);
        Eigen::SelfAdjointEigenSolver<CMatrix> es(rho.density(k));
        const CMatrix& v = es.eigenvectors();
        const RVector& d = es.eigenvalues();
        RVector w(n * n);
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j) w(i * n + j) = d(j) * f(d(i) / d(j));
        const CMatrix p = Eigen::kroneckerProduct(v.adjoint(), v.transpose()).eval();
        const CMatrix wk = p.adjoint() * w.cast<cplx>().asDiagonal() * p;
        const Index off = shape.offset(k);
        for (Index a = 0; a < n * n; ++a)
            for (Index b = 0; b < n * n; ++b)
                if (wk(a, b) != cplx(0.0)) trips.emplace_back(off + a, off + b, wk(a, b));
    }
    SparseC w(shape.element_dim(), shape.element_dim());
    w.setFromTriplets(trips.begin(), trips.end());
    return w;
}

/// Throws UnsupportedKind for a Petz kind at a non-faithful state.
inline CovarianceGram covariance_gram(const CovarianceKind& kind, const GnsSpace& space) {
    if (kind.tag == CovarianceKind::Tag::Gns) {
        SparseC id(space.dim(), space.dim());
        id.setIdentity();
        return CovarianceGram(kind.name(), kind.scale * id);
    }
    if (!space.state().is_faithful(space.tolerance())) {
        throw UnsupportedKind("covariance kind '" + kind.name() + "' requires a faithful state");
    }
    const SparseC w = petz_form(*kind.f, space.state());
    SparseC g = SparseC(space.reps().adjoint()) * w * space.reps();
    g = (0.5 * (g + SparseC(g.adjoint()))).pruned();
    return CovarianceGram(kind.name(), kind.scale * g);
}

inline cplx covariance_eval(const CovarianceKind& kind, const GnsSpace& space, const AlgebraElement& x,
                            const AlgebraElement& y) {
    return covariance_gram(kind, space).pair(space.embed(x), space.embed(y));
}

struct MonotonicityReport {
    std::string kind;
    double worst_ratio = 0.0;     // sampled max of c_rho(Mxi, Mxi) / c_sigma(xi, xi)
    double exact_max_eig = 0.0;   // max generalized eigenvalue of (M^* G_rho M, G_sigma)
    CVector witness;              // sample attaining worst_ratio
    Index samples = 0;
    double tol = 0.0;
    bool sampled_pass = false;
    bool exact_pass = false;
    bool pass = false;
};

/// Largest generalized eigenvalue of (a, b) with b Hermitian positive definite.
inline double max_generalized_eigenvalue(const CMatrix& a, const CMatrix& b) {
    const CMatrix bh = (b + b.adjoint()) * 0.5;
    Eigen::LLT<CMatrix> llt(bh);
    if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
    const CMatrix l = llt.matrixL();
    const CMatrix linv_a = l.triangularView<Eigen::Lower>().solve(a);
    const CMatrix c = l.triangularView<Eigen::Lower>().solve(linv_a.adjoint()).adjoint();
    return max_hermitian_eigenvalue(c);
}

/// Checks c_rho(M xi, M xi) <= c_sigma(xi, xi) for a contraction matrix M:
/// H_sigma -> H_rho, by sampling (slack tol |xi|^2) and by the exact
/// generalized eigenvalue criterion (<= 1 + tol). The exact criterion decides.
inline MonotonicityReport monotonicity_from_grams(const CMatrix& m, const CovarianceGram& gram_rho,
                                                  const CovarianceGram& gram_sigma, Index n_samples,
                                                  std::uint64_t seed, double tol) {
    if (m.rows() != gram_rho.dim() || m.cols() != gram_sigma.dim()) {
        throw ShapeMismatch("monotonicity: Gram dimensions do not match the contraction");
    }
    MonotonicityReport rep;
    rep.kind = gram_sigma.kind_name();
    rep.samples = n_samples;
    rep.tol = tol;
    const CMatrix gr = gram_rho.dense();
    const CMatrix gs = gram_sigma.dense();

    Rng rng(seed);
    rep.sampled_pass = true;
    rep.worst_ratio = -std::numeric_limits<double>::infinity();
    for (Index s = 0; s < n_samples; ++s) {
        const CVector xi = random_complex_gaussian(m.cols(), 1, rng).col(0);
        const CVector img = m * xi;
        const double lhs = std::real(img.dot(gr * img));
        const double rhs = std::real(xi.dot(gs * xi));
        const double ratio = lhs / rhs;
        if (ratio > rep.worst_ratio) {
            rep.worst_ratio = ratio;
            rep.witness = xi;
        }
        if (lhs > rhs + tol * xi.squaredNorm()) rep.sampled_pass = false;
    }
    rep.exact_max_eig = max_generalized_eigenvalue(m.adjoint() * gr * m, gs);
    rep.exact_pass = rep.exact_max_eig <= 1.0 + tol;
    rep.pass = rep.exact_pass && rep.sampled_pass;
    return rep;
}

inline MonotonicityReport monotonicity_check(const CovarianceKind& kind, const NcpMorphism& phi, Index n_samples,
                                             std::uint64_t seed, double tol = 1e-9) {
    const GnsSpace sigma_space = build_gns(phi.target());
    const GnsSpace rho_space = build_gns(phi.source());
    const GnsContraction c = induced_contraction(phi, sigma_space, rho_space);
    return monotonicity_from_grams(c.matrix, covariance_gram(kind, rho_space), covariance_gram(kind, sigma_space),
                                   n_samples, seed, tol);
}

struct TracialCollapseReport {
    std::size_t states = 0;
    double max_deviation = 0.0;
    std::vector<std::pair<std::string, double>> per_kind;  // max deviation per catalog kind
    double tol = 0.0;
    bool pass = false;
};

/// Random tracial (block-scalar) states on the given shapes; every catalog
/// Petz Gram is compared with the GNS Gram.
inline TracialCollapseReport tracial_collapse_check(const std::vector<AlgebraShape>& shapes, std::size_t n_states,
                                                    std::uint64_t seed, double tol = 1e-9) {
    TracialCollapseReport rep;
    rep.tol = tol;
    const auto catalog = omf_catalog();
    rep.per_kind.reserve(catalog.size());
    for (const auto& f : catalog) rep.per_kind.emplace_back(f.name, 0.0);
    if (shapes.empty()) return rep;
    Rng rng(seed);
    for (std::size_t s = 0; s < n_states; ++s) {
        const AlgebraShape& shape = shapes[s % shapes.size()];
        const NormalState tau = random_tracial_state(shape, rng);
        const GnsSpace space = build_gns(tau);
        const CMatrix g = covariance_gram(CovarianceKind::gns(), space).dense();
        for (std::size_t i = 0; i < catalog.size(); ++i) {
            const CMatrix p = covariance_gram(CovarianceKind::petz(catalog[i]), space).dense();
            const double dev = (p - g).cwiseAbs().maxCoeff();
            rep.per_kind[i].second = std::max(rep.per_kind[i].second, dev);
            rep.max_deviation = std::max(rep.max_deviation, dev);
        }
        ++rep.states;
    }
    rep.pass = rep.max_deviation <= tol;
    return rep;
}

}  // namespace ncp
