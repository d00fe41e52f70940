#pragma once

// Statistical models as parametrized families of states on a fixed algebra,
// group-action models, and the pullback of a field of covariances to a
// Riemannian metric on parameter space.
//
// Pullback: at theta, the differential d_i rho is the real functional
// a -> Tr(d_i D a) on self-adjoint a. Its Riesz representative v_i is taken in
// the real Hilbert structure Re c_rho on the self-adjoint GNS classes, and
// g_ij = Re c_rho(v_i, v_j). With the GNS kind this is the Fisher-Rao metric
// on abelian algebras and the SLD quantum Fisher information (Bures-Helstrom
// times 4) on faithful matrix states.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "covariance.hpp"

namespace ncp {

using Params = RVector;
using Tangent = std::vector<CMatrix>;  // per-block derivative of the densities

enum class DerivativeMode { Analytic, FiniteDifference };

struct StatModel {
    StatModel(std::string n, AlgebraShape s, Index dim) : name(std::move(n)), shape(std::move(s)), param_dim(dim) {}

    std::string name;
    AlgebraShape shape;
    Index param_dim = 0;
    std::function<bool(const Params&)> in_domain;
    std::function<std::vector<CMatrix>(const Params&)> densities;
    /// One Tangent per parameter; may be empty, then finite differences are used.
    std::function<std::vector<Tangent>(const Params&)> analytic_derivatives;
    /// Optional explanation appended to DomainError messages.
    std::function<std::string(const Params&)> domain_message;
    DerivativeMode mode = DerivativeMode::Analytic;
    double fd_step = 1e-5;

    void require_domain(const Params& theta) const {
        if (theta.size() != param_dim) {
            throw DomainError(name + ": expected " + std::to_string(param_dim) + " parameters, got " +
                              std::to_string(theta.size()));
        }
        if (!in_domain(theta)) {
            std::string msg = name + ": parameters outside the model domain";
            if (domain_message) msg += " (" + domain_message(theta) + ")";
            throw DomainError(msg);
        }
    }

    NormalState state_at(const Params& theta) const {
        require_domain(theta);
        return mk_state(shape, densities(theta), 1e-9);
    }

    std::vector<Tangent> derivatives(const Params& theta) const {
        require_domain(theta);
        if (mode == DerivativeMode::Analytic && analytic_derivatives) return analytic_derivatives(theta);
        std::vector<Tangent> out;
        for (Index i = 0; i < param_dim; ++i) {
            Params up = theta, down = theta;
            up(i) += fd_step;
            down(i) -= fd_step;
            require_domain(up);
            require_domain(down);
            const auto dp = densities(up);
            const auto dm = densities(down);
            Tangent t;
            for (std::size_t k = 0; k < dp.size(); ++k) t.push_back((dp[k] - dm[k]) / (2.0 * fd_step));
            out.push_back(std::move(t));
        }
        return out;
    }

    StatModel with_finite_differences(double h = 1e-5) const {
        StatModel m = *this;
        m.mode = DerivativeMode::FiniteDifference;
        m.fd_step = h;
        return m;
    }
};

// ---------------------------------------------------------------------------
// Concrete models

/// Open simplex Delta_n on the abelian algebra with n+1 points; parameters
/// are the first n probabilities.
inline StatModel simplex_model(Index n) {
    if (n < 1) throw DomainError("simplex_model: n must be >= 1");
    StatModel m{"simplex:" + std::to_string(n), AlgebraShape::abelian(n + 1), n};
    m.in_domain = [n](const Params& t) {
        double s = 0.0;
        for (Index i = 0; i < n; ++i) {
            if (!(t(i) > 0.0)) return false;
            s += t(i);
        }
        return 1.0 - s > 0.0;
    };
    m.densities = [n](const Params& t) {
        std::vector<CMatrix> d;
        double s = 0.0;
        for (Index i = 0; i < n; ++i) {
            d.push_back(CMatrix::Constant(1, 1, t(i)));
            s += t(i);
        }
        d.push_back(CMatrix::Constant(1, 1, 1.0 - s));
        return d;
    };
    m.analytic_derivatives = [n](const Params&) {
        std::vector<Tangent> out;
        for (Index i = 0; i < n; ++i) {
            Tangent t(static_cast<std::size_t>(n + 1), CMatrix::Zero(1, 1));
            t[static_cast<std::size_t>(i)](0, 0) = 1.0;
            t[static_cast<std::size_t>(n)](0, 0) = -1.0;
            out.push_back(std::move(t));
        }
        return out;
    };
    return m;
}

namespace detail {

inline CMatrix bloch_density(double r, const Eigen::Vector3d& n) {
    CMatrix d = CMatrix::Identity(2, 2) + r * (n(0) * pauli::x() + n(1) * pauli::y() + n(2) * pauli::z());
    return 0.5 * d;
}

inline CMatrix bloch_traceless(const Eigen::Vector3d& v) {
    return 0.5 * (v(0) * pauli::x() + v(1) * pauli::y() + v(2) * pauli::z());
}

inline Eigen::Vector3d sphere_point(double th, double ph) {
    return {std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
}

inline Eigen::Vector3d sphere_d_theta(double th, double ph) {
    return {std::cos(th) * std::cos(ph), std::cos(th) * std::sin(ph), -std::sin(th)};
}

inline Eigen::Vector3d sphere_d_phi(double th, double ph) {
    return {-std::sin(th) * std::sin(ph), std::sin(th) * std::cos(ph), 0.0};
}

}  // namespace detail

/// Faithful qubit states (I + r n.sigma)/2 in Bloch coordinates (r, theta, phi),
/// r in (0,1), theta in (0, pi). r = 0 and the poles are chart singularities.
inline StatModel qubit_faithful_model() {
    StatModel m{"qubit-faithful", AlgebraShape({2}), 3};
    m.in_domain = [](const Params& t) {
        return t(0) > 0.0 && t(0) < 1.0 && t(1) > 0.0 && t(1) < std::numbers::pi;
    };
    m.densities = [](const Params& t) {
        return std::vector<CMatrix>{detail::bloch_density(t(0), detail::sphere_point(t(1), t(2)))};
    };
    m.analytic_derivatives = [](const Params& t) {
        const double r = t(0), th = t(1), ph = t(2);
        return std::vector<Tangent>{{detail::bloch_traceless(detail::sphere_point(th, ph))},
                                    {detail::bloch_traceless(r * detail::sphere_d_theta(th, ph))},
                                    {detail::bloch_traceless(r * detail::sphere_d_phi(th, ph))}};
    };
    return m;
}

/// Pure qubit states (I + n.sigma)/2 on the sphere, parameters (theta, phi) with
/// theta in (0, pi); rank 1 throughout.
inline StatModel qubit_pure_model() {
    StatModel m{"qubit-pure", AlgebraShape({2}), 2};
    m.in_domain = [](const Params& t) { return t(0) > 0.0 && t(0) < std::numbers::pi; };
    m.densities = [](const Params& t) {
        return std::vector<CMatrix>{detail::bloch_density(1.0, detail::sphere_point(t(0), t(1)))};
    };
    m.analytic_derivatives = [](const Params& t) {
        return std::vector<Tangent>{{detail::bloch_traceless(detail::sphere_d_theta(t(0), t(1)))},
                                    {detail::bloch_traceless(detail::sphere_d_phi(t(0), t(1)))}};
    };
    return m;
}

namespace detail {

inline double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

/// Mass of N(0,1) in [za, zb], using the upper tail on the right half to avoid
/// cancellation.
inline double normal_mass(double za, double zb) {
    if (za >= 0.0) return 0.5 * (std::erfc(za / std::numbers::sqrt2) - std::erfc(zb / std::numbers::sqrt2));
    if (zb <= 0.0) return 0.5 * (std::erfc(-zb / std::numbers::sqrt2) - std::erfc(-za / std::numbers::sqrt2));
    return 1.0 - 0.5 * std::erfc(-za / std::numbers::sqrt2) - 0.5 * std::erfc(zb / std::numbers::sqrt2);
}

}  // namespace detail

/// Uniform binning of [x_min, x_max].
struct BinGrid {
    Index n_bins = 0;
    double x_min = 0.0;
    double x_max = 0.0;

    double width() const { return (x_max - x_min) / static_cast<double>(n_bins); }
    double left(Index j) const { return x_min + width() * static_cast<double>(j); }
    double right(Index j) const { return j + 1 == n_bins ? x_max : left(j + 1); }
};

/// Exact N(mu, sigma^2) bin masses (via the CDF), the mass inside the range,
/// and their analytic derivatives in (mu, sigma).
struct GaussianBinning {
    RVector mass;
    RVector d_mu;
    RVector d_sigma;
    double inside = 0.0;
};

inline GaussianBinning gaussian_bins(const BinGrid& grid, double mu, double sigma) {
    GaussianBinning b;
    b.mass.resize(grid.n_bins);
    b.d_mu.resize(grid.n_bins);
    b.d_sigma.resize(grid.n_bins);
    for (Index j = 0; j < grid.n_bins; ++j) {
        const double za = (grid.left(j) - mu) / sigma;
        const double zb = (grid.right(j) - mu) / sigma;
        const double fa = detail::normal_pdf(za), fb = detail::normal_pdf(zb);
        b.mass(j) = detail::normal_mass(za, zb);
        b.d_mu(j) = (fa - fb) / sigma;
        b.d_sigma(j) = (za * fa - zb * fb) / sigma;
    }
    b.inside = detail::normal_mass((grid.x_min - mu) / sigma, (grid.x_max - mu) / sigma);
    return b;
}

inline constexpr double kGaussianMassLeak = 1e-6;

/// Discretized univariate normal model on [x_min, x_max] with n_bins bins;
/// parameters (mu, sigma). Bin probabilities are exact masses renormalized
/// over the range; the domain requires at least 1 - 1e-6 of the mass inside.
inline StatModel gaussian_model(Index n_bins, double x_min, double x_max) {
    if (n_bins < 2) throw DomainError("gaussian_model: need at least 2 bins");
    if (!(x_min < x_max)) throw DomainError("gaussian_model: need x_min < x_max");
    const BinGrid grid{n_bins, x_min, x_max};
    StatModel m{"gaussian:" + std::to_string(n_bins), AlgebraShape::abelian(n_bins), 2};
    m.in_domain = [grid](const Params& t) {
        if (!(t(1) > 0.0)) return false;
        const double inside = detail::normal_mass((grid.x_min - t(0)) / t(1), (grid.x_max - t(0)) / t(1));
        return inside >= 1.0 - kGaussianMassLeak;
    };
    m.domain_message = [grid](const Params& t) {
        if (!(t(1) > 0.0)) return std::string("sigma must be positive");
        const double inside = detail::normal_mass((grid.x_min - t(0)) / t(1), (grid.x_max - t(0)) / t(1));
        return "leaked mass " + std::to_string(1.0 - inside);
    };
    m.densities = [grid](const Params& t) {
        const GaussianBinning b = gaussian_bins(grid, t(0), t(1));
        const double z = b.mass.sum();
        std::vector<CMatrix> d;
        d.reserve(static_cast<std::size_t>(grid.n_bins));
        for (Index j = 0; j < grid.n_bins; ++j) d.push_back(CMatrix::Constant(1, 1, b.mass(j) / z));
        return d;
    };
    m.analytic_derivatives = [grid](const Params& t) {
        const GaussianBinning b = gaussian_bins(grid, t(0), t(1));
        const double z = b.mass.sum();
        std::vector<Tangent> out;
        for (const RVector* dm : {&b.d_mu, &b.d_sigma}) {
            const double dz = dm->sum();
            Tangent tg;
            tg.reserve(static_cast<std::size_t>(grid.n_bins));
            for (Index j = 0; j < grid.n_bins; ++j)
                tg.push_back(CMatrix::Constant(1, 1, (*dm)(j) / z - b.mass(j) * dz / (z * z)));
            out.push_back(std::move(tg));
        }
        return out;
    };
    return m;
}

/// The model pushed through a CPU map phi: B -> A (A the model algebra):
/// theta -> phi_*(rho_theta) on B. Derivatives are transported linearly.
inline StatModel push_forward(const StatModel& model, const CpuMap& phi) {
    require_same_shape(phi.target_shape(), model.shape, "push_forward");
    StatModel m = model;
    m.name = model.name + ">" + phi.source_shape().to_string();
    m.shape = phi.source_shape();
    const LinearMap lin = phi.linear();
    const auto base_dens = model.densities;
    m.densities = [lin, base_dens](const Params& t) { return lin.dual_apply(base_dens(t)); };
    if (model.analytic_derivatives) {
        const auto base_der = model.analytic_derivatives;
        m.analytic_derivatives = [lin, base_der](const Params& t) {
            std::vector<Tangent> out;
            for (const auto& tg : base_der(t)) out.push_back(lin.dual_apply(tg));
            return out;
        };
    }
    return m;
}

// ---------------------------------------------------------------------------
// Riesz scores and the metric pullback

inline constexpr double kRieszResidualTolerance = 1e-8;

struct RieszResult {
    GnsSpace space;
    CovarianceGram gram;
    std::vector<CVector> scores;  // GNS coordinates of v_1..v_p
    std::vector<double> residuals;
};

/// Throws ScoreNotRepresentable if a differential does not vanish on the
/// Gelfand ideal (relative residual above kRieszResidualTolerance).
inline RieszResult riesz_score(const StatModel& model, const Params& theta, const CovarianceKind& kind) {
    const NormalState rho = model.state_at(theta);
    GnsSpace space = build_gns(rho);
    CovarianceGram gram = covariance_gram(kind, space);

    const SparseC h = self_adjoint_basis_coords(model.shape);
    const SparseC xi = space.iso_matrix() * h;  // d x m
    const SparseC cxi = gram.gram() * xi;
    SparseC q = SparseC(xi.adjoint()) * cxi;
    for (Index k = 0; k < q.outerSize(); ++k)
        for (SparseC::InnerIterator it(q, k); it; ++it) it.valueRef() = cplx(it.value().real(), 0.0);
    q = (0.5 * (q + SparseC(q.adjoint()))).pruned();

    const HermitianSpectrum spec = hermitian_spectrum(q);
    const double cut = 1e-10 * std::max(spec.values.size() ? spec.values(0) : 0.0, 0.0);
    Index rank = 0;
    while (rank < spec.values.size() && spec.values(rank) > cut) ++rank;
    const SparseC u = spec.vectors.leftCols(rank);
    const RVector inv = spec.values.head(rank).cwiseInverse();

    const SparseC ht = SparseC(h.transpose());
    RieszResult res{std::move(space), std::move(gram), {}, {}};
    const auto ders = model.derivatives(theta);
    for (std::size_t i = 0; i < ders.size(); ++i) {
        // l_a = Tr(dD h_a) = coords(dD^T) . coords(h_a)
        const CVector dcoords = AlgebraElement(model.shape, ders[i]).transpose().coords();
        const RVector ell = (ht * dcoords).real();
        const CVector proj = u.adjoint() * ell.cast<cplx>();
        const RVector c = (u * (inv.cast<cplx>().asDiagonal() * proj)).real();
        const RVector qc = (q * c.cast<cplx>()).real();
        const double residual = (ell - qc).norm() / std::max(1.0, ell.norm());
        if (residual > kRieszResidualTolerance) {
            throw ScoreNotRepresentable("score for parameter " + std::to_string(i) +
                                            " is not representable (residual " + std::to_string(residual) + ")",
                                        i, residual);
        }
        res.residuals.push_back(residual);
        res.scores.push_back(xi * c.cast<cplx>());
    }
    return res;
}

/// g_ij = Re c_rho(v_i, v_j) from Riesz scores.
inline RMatrix metric_from_scores(const RieszResult& r) {
    const Index p = static_cast<Index>(r.scores.size());
    RMatrix g(p, p);
    for (Index i = 0; i < p; ++i)
        for (Index j = 0; j < p; ++j) g(i, j) = std::real(r.gram.pair(r.scores[i], r.scores[j]));
    return 0.5 * (g + g.transpose());
}

inline RMatrix metric_pullback(const StatModel& model, const Params& theta, const CovarianceKind& kind) {
    return metric_from_scores(riesz_score(model, theta, kind));
}

// ---------------------------------------------------------------------------
// Closed-form reference metrics

namespace reference {

/// Fisher-Rao on the simplex in the first-n-coordinates chart.
inline RMatrix fisher_rao_simplex(const Params& theta) {
    const Index n = theta.size();
    const double last = 1.0 - theta.sum();
    RMatrix g = RMatrix::Constant(n, n, 1.0 / last);
    for (Index i = 0; i < n; ++i) g(i, i) += 1.0 / theta(i);
    return g;
}

/// Fisher-Rao of N(mu, sigma^2) in (mu, sigma).
inline RMatrix gaussian_fisher(double sigma) {
    RMatrix g = RMatrix::Zero(2, 2);
    g(0, 0) = 1.0 / (sigma * sigma);
    g(1, 1) = 2.0 / (sigma * sigma);
    return g;
}

/// SLD quantum Fisher information in Bloch coordinates (r, theta, phi).
inline RMatrix qubit_qfi(double r, double theta) {
    RMatrix g = RMatrix::Zero(3, 3);
    g(0, 0) = 1.0 / (1.0 - r * r);
    g(1, 1) = r * r;
    g(2, 2) = r * r * std::sin(theta) * std::sin(theta);
    return g;
}

/// Round unit-sphere metric d theta^2 + sin^2 theta d phi^2.
inline RMatrix unit_sphere(double theta) {
    RMatrix g = RMatrix::Zero(2, 2);
    g(0, 0) = 1.0;
    g(1, 1) = std::sin(theta) * std::sin(theta);
    return g;
}

/// Fubini-Study on the Bloch sphere, (1/4)(d theta^2 + sin^2 theta d phi^2).
inline RMatrix fubini_study(double theta) { return 0.25 * unit_sphere(theta); }

/// Factor between the GNS pullback on pure states and Fubini-Study.
inline constexpr double kFubiniStudyFactor = 4.0;

}  // namespace reference

// ---------------------------------------------------------------------------
// Congruence invariance

struct CongruenceReport {
    std::vector<double> deviations;
    double max_deviation = 0.0;
    double tol = 0.0;
    bool pass = false;
};

/// GNS-kind pullback of the model and of its image under a congruent
/// embedding, compared at each sample point.
inline CongruenceReport congruence_invariance_check(const StatModel& model, const CongruentEmbedding& embedding,
                                                    const std::vector<Params>& samples, double tol = 1e-9) {
    if (!model.shape.is_abelian()) throw ShapeMismatch("congruence_invariance_check: model must be abelian");
    const StatModel embedded = push_forward(model, embedding.map());
    CongruenceReport rep;
    rep.tol = tol;
    for (const auto& theta : samples) {
        const RMatrix g = metric_pullback(model, theta, CovarianceKind::gns());
        const RMatrix ge = metric_pullback(embedded, theta, CovarianceKind::gns());
        const double dev = (g - ge).cwiseAbs().maxCoeff();
        rep.deviations.push_back(dev);
        rep.max_deviation = std::max(rep.max_deviation, dev);
    }
    rep.pass = rep.max_deviation <= tol;
    return rep;
}

// ---------------------------------------------------------------------------
// Group actions and the affine/Gaussian instance

/// Affine group element x -> sigma x + mu.
struct Affine {
    double mu = 0.0;
    double sigma = 1.0;

    double operator()(double x) const { return sigma * x + mu; }
    double inverse(double x) const { return (x - mu) / sigma; }
};

/// (mu, sigma) o (mu', sigma') = (mu + sigma mu', sigma sigma').
inline Affine affine_compose(const Affine& a, const Affine& b) {
    if (!(a.sigma > 0.0) || !(b.sigma > 0.0)) throw DomainError("affine_compose: sigma must be positive");
    return {a.mu + a.sigma * b.mu, a.sigma * b.sigma};
}

inline double gaussian_density(const Affine& xi, double x) {
    return detail::normal_pdf((x - xi.mu) / xi.sigma) / xi.sigma;
}

struct PushforwardReport {
    double max_deviation = 0.0;        // density identity
    double max_composition_deviation = 0.0;  // alpha_xi(alpha_xi'(x)) vs alpha_{xi o xi'}(x), relative
    Index points = 0;
    double tol = 0.0;
    bool pass = false;
};

/// Checks p_{xi o xi'}(x) = p_{xi'}(alpha_xi^{-1}(x)) / sigma pointwise on a
/// grid over mu'' +- 8 sigma'' of the composite, and that the composite
/// affine map agrees with the composition of the two maps.
inline PushforwardReport affine_pushforward_check(const Affine& xi, const Affine& xi2, Index grid = 1000,
                                                  double tol = 1e-12) {
    const Affine comp = affine_compose(xi, xi2);
    PushforwardReport rep;
    rep.points = grid;
    rep.tol = tol;
    for (Index i = 0; i < grid; ++i) {
        const double x = comp.mu + comp.sigma * (-8.0 + 16.0 * static_cast<double>(i) / static_cast<double>(grid - 1));
        const double lhs = gaussian_density(comp, x);
        const double rhs = gaussian_density(xi2, xi.inverse(x)) / xi.sigma;
        rep.max_deviation = std::max(rep.max_deviation, std::abs(lhs - rhs));
        const double y = xi(xi2(x));
        rep.max_composition_deviation =
            std::max(rep.max_composition_deviation, std::abs(y - comp(x)) / std::max(1.0, std::abs(y)));
    }
    rep.pass = rep.max_deviation < tol && rep.max_composition_deviation < tol;
    return rep;
}

/// Group element g acts on parameters, and through automorphism_at(g) on the
/// algebra, with phi_g^*(rho_theta) = rho_{g theta}.
struct GroupActionModel {
    StatModel base;
    std::function<Params(const Params& g, const Params& theta)> act_on_params;
    std::function<Params(const Params& g, const Params& h)> group_compose;
    std::function<CpuMap(const Params& g)> automorphism_at;
};

/// Bin-overlap Markov matrix of x -> sigma x + mu: column j spreads bin j's
/// image over the bins it overlaps, proportionally to overlap length. Image
/// mass outside the range is assigned to the nearest edge bin.
inline SparseR affine_bin_stochastic(const BinGrid& grid, const Affine& a) {
    if (!(a.sigma > 0.0)) throw DomainError("affine_bin_stochastic: sigma must be positive");
    const double w = grid.width();
    std::vector<Eigen::Triplet<double>> trips;
    for (Index j = 0; j < grid.n_bins; ++j) {
        const double lo = a(grid.left(j)), hi = a(grid.right(j));
        const double len = hi - lo;
        double below = std::max(0.0, std::min(hi, grid.x_min) - lo);
        double above = std::max(0.0, hi - std::max(lo, grid.x_max));
        const Index ilo = std::clamp<Index>(static_cast<Index>(std::floor((lo - grid.x_min) / w)), 0, grid.n_bins - 1);
        const Index ihi = std::clamp<Index>(static_cast<Index>(std::floor((hi - grid.x_min) / w)), 0, grid.n_bins - 1);
        double col_total = 0.0;
        std::vector<std::pair<Index, double>> entries;
        for (Index i = ilo; i <= ihi; ++i) {
            const double ov = std::min(hi, grid.right(i)) - std::max(lo, grid.left(i));
            if (ov > 0.0) entries.emplace_back(i, ov / len);
        }
        if (below > 0.0) entries.emplace_back(0, below / len);
        if (above > 0.0) entries.emplace_back(grid.n_bins - 1, above / len);
        for (const auto& e : entries) col_total += e.second;
        for (const auto& e : entries) trips.emplace_back(e.first, j, e.second / col_total);
    }
    SparseR s(grid.n_bins, grid.n_bins);
    s.setFromTriplets(trips.begin(), trips.end());
    return s;
}

/// Discretized Gaussian functor: parameters and group elements are (mu, sigma),
/// the action is affine composition and phi_xi(f) = f o alpha_xi on bins.
inline GroupActionModel gaussian_group_model(Index n_bins, double x_min, double x_max) {
    const BinGrid grid{n_bins, x_min, x_max};
    GroupActionModel g{gaussian_model(n_bins, x_min, x_max), {}, {}, {}};
    const auto compose2 = [](const Params& a, const Params& b) {
        const Affine c = affine_compose({a(0), a(1)}, {b(0), b(1)});
        return Params{{c.mu, c.sigma}};
    };
    g.act_on_params = compose2;
    g.group_compose = compose2;
    g.automorphism_at = [grid](const Params& xi) {
        return markov_from_stochastic(affine_bin_stochastic(grid, {xi(0), xi(1)}), 1e-9);
    };
    return g;
}

/// max_b |rho_theta(phi_g(b)) - rho_{g theta}(b)| over matrix units b.
inline double equivariance_deviation(const GroupActionModel& m, const Params& g, const Params& theta) {
    const CpuMap phi = m.automorphism_at(g);
    return preservation_deviation(phi.linear(), m.base.state_at(theta), m.base.state_at(m.act_on_params(g, theta)));
}

/// Functor law phi_{g h} = phi_h o phi_g, compared through the preduals at
/// rho_theta (max entrywise density difference).
inline double functor_law_deviation(const GroupActionModel& m, const Params& g, const Params& h, const Params& theta) {
    const CpuMap direct = m.automorphism_at(m.group_compose(g, h));
    const CpuMap chained = compose(m.automorphism_at(h), m.automorphism_at(g));
    const NormalState rho = m.base.state_at(theta);
    return predual(direct, rho).distance(predual(chained, rho));
}

}  // namespace ncp
