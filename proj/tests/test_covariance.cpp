#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using namespace ncp;
using ncp::test::max_abs;

namespace {

/// c(x, y) = sum_k sum_ij d_j f(d_i/d_j) conj(x~_ij) y~_ij with x~ = V^* x V,
/// computed per block from dense matrices.
cplx petz_oracle(const std::function<double(double)>& f, const NormalState& rho, const AlgebraElement& x,
                 const AlgebraElement& y) {
    cplx total = 0.0;
    for (std::size_t k = 0; k < rho.shape().num_blocks(); ++k) {
        Eigen::SelfAdjointEigenSolver<CMatrix> es(rho.density(k));
        const CMatrix v = es.eigenvectors();
        const RVector d = es.eigenvalues();
        const CMatrix xt = v.adjoint() * x.block(k) * v;
        const CMatrix yt = v.adjoint() * y.block(k) * v;
        for (Index i = 0; i < d.size(); ++i)
            for (Index j = 0; j < d.size(); ++j) total += d(j) * f(d(i) / d(j)) * std::conj(xt(i, j)) * yt(i, j);
    }
    return total;
}

NormalState faithful_qubit(double a) {
    CMatrix d = CMatrix::Zero(2, 2);
    d(0, 0) = a;
    d(1, 1) = 1 - a;
    return mk_state(AlgebraShape({2}), {d});
}

}  // namespace

TEST_CASE("operator monotone catalog values", "[covariance]") {
    CHECK(omf::sld()(1.0) == 1.0);
    CHECK(omf::kmb()(1.0) == 1.0);
    CHECK(omf::kmb()(1.0 + 1e-12) == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(omf::wy()(4.0) == Catch::Approx(9.0 / 4.0));
    CHECK(omf::rld()(1.0) == 1.0);
    CHECK(omf::kmb()(4.0) == Catch::Approx(3.0 / std::log(4.0)));
    REQUIRE(omf_catalog().size() >= 4);
    for (const char* n : {"sld", "kmb", "wy", "rld", "one"}) CHECK(find_omf(n).has_value());
    CHECK_FALSE(find_omf("nope").has_value());
    CHECK_FALSE(parse_kind("nope").has_value());
    CHECK(parse_kind("gns")->tag == CovarianceKind::Tag::Gns);
}

TEST_CASE("catalog functions pass the operator monotone checks", "[covariance][property]") {
    for (const auto& f : omf_catalog()) {
        const auto r = check_operator_monotone(f, 7, 100);
        INFO(f.name);
        CHECK(r.normalization_error <= 1e-12);
        CHECK(r.grid_monotone);
        CHECK(r.symmetry_error <= 1e-10);
        CHECK(r.worst_matrix_gap >= -1e-8);
        CHECK(r.pass);
    }
}

TEST_CASE("t^2 is monotone but not operator monotone", "[covariance]") {
    const OperatorMonotoneFunction sq{"square", [](double t) { return t * t; }, true, false};
    const auto r = check_operator_monotone(sq, 7, 200);
    CHECK(r.grid_monotone);
    CHECK(r.worst_matrix_gap < -1e-8);
    CHECK_FALSE(r.pass);
}

TEST_CASE("covariance_gram examples", "[covariance]") {
    Rng rng(1);
    for (const auto& s : test::mixed_shapes()) {
        const GnsSpace sp = build_gns(random_state(s, false, rng));
        const CMatrix g = covariance_gram(CovarianceKind::gns(), sp).dense();
        CHECK(g == CMatrix::Identity(sp.dim(), sp.dim()));
    }
    const GnsSpace q = build_gns(random_state(AlgebraShape({2}), true, rng));
    const CMatrix one = covariance_gram(CovarianceKind::petz(omf::unit()), q).dense();
    CHECK(max_abs(CMatrix(one - CMatrix::Identity(4, 4))) < 1e-10);

    const GnsSpace half = build_gns(faithful_qubit(0.5));
    for (const auto& k : kind_catalog())
        CHECK(max_abs(CMatrix(covariance_gram(k, half).dense() - CMatrix::Identity(4, 4))) < 1e-10);
}

TEST_CASE("Petz kinds need faithful states", "[covariance]") {
    const NormalState pure = mk_state(AlgebraShape({2}), {(CMatrix(2, 2) << 1, 0, 0, 0).finished()});
    const GnsSpace sp = build_gns(pure);
    CHECK_NOTHROW(covariance_gram(CovarianceKind::gns(), sp));
    CHECK_THROWS_AS(covariance_gram(CovarianceKind::petz(omf::sld()), sp), UnsupportedKind);
}

TEST_CASE("covariance_eval examples", "[covariance]") {
    const NormalState p = from_probabilities({0.5, 0.3, 0.2});
    const GnsSpace sp = build_gns(p);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            const auto fi = AlgebraElement::matrix_unit(p.shape(), i, 0, 0);
            const auto fj = AlgebraElement::matrix_unit(p.shape(), j, 0, 0);
            const double expect = i == j ? p.probabilities()(static_cast<Index>(i)) : 0.0;
            CHECK(std::abs(covariance_eval(CovarianceKind::gns(), sp, fi, fj) - expect) < 1e-12);
        }

    Rng rng(2);
    const NormalState rho = random_state(AlgebraShape({2, 1}), true, rng);
    const GnsSpace sr = build_gns(rho);
    const AlgebraElement one = identity(rho.shape());
    for (const auto& k : kind_catalog()) CHECK(std::abs(covariance_eval(k, sr, one, one) - 1.0) < 1e-10);

    // SLD weight on e_12 at diag(3/4, 1/4): (d1 + d2)/2 = 1/2
    const GnsSpace d = build_gns(faithful_qubit(0.75));
    const auto e12 = AlgebraElement::matrix_unit(d.shape(), 0, 0, 1);
    CHECK(std::abs(covariance_eval(CovarianceKind::petz(omf::sld()), d, e12, e12) - 0.5) < 1e-12);
    // GNS weight on e_12 is d_2 = 1/4
    CHECK(std::abs(covariance_eval(CovarianceKind::gns(), d, e12, e12) - 0.25) < 1e-12);
}

TEST_CASE("GNS kind is rho(x^* y)", "[covariance][property]") {
    Rng rng(3);
    for (const auto& s : test::mixed_shapes()) {
        const NormalState rho = random_state(s, false, rng);
        const GnsSpace sp = build_gns(rho);
        for (int t = 0; t < 10; ++t) {
            const auto x = random_element(s, rng), y = random_element(s, rng);
            CHECK(std::abs(covariance_eval(CovarianceKind::gns(), sp, x, y) - evaluate(rho, adjoint(x) * y)) < 1e-9);
        }
    }
}

TEST_CASE("Petz Grams match the direct eigenbasis oracle", "[covariance][property]") {
    Rng rng(4);
    for (const auto& s : test::mixed_shapes()) {
        const NormalState rho = random_state(s, true, rng);
        const GnsSpace sp = build_gns(rho);
        for (const auto& f : omf_catalog()) {
            const CovarianceGram g = covariance_gram(CovarianceKind::petz(f), sp);
            REQUIRE(g.dim() == sp.dim());  // lives on the GNS coordinate space
            const CMatrix gd = g.dense();
            CHECK(max_abs(CMatrix(gd - gd.adjoint())) < 1e-10);
            CHECK(test::min_eig(gd) > 0.0);
            for (int t = 0; t < 5; ++t) {
                const auto x = random_element(s, rng), y = random_element(s, rng);
                const cplx ref = petz_oracle(f.eval, rho, x, y);
                CHECK(std::abs(g.pair(sp.embed(x), sp.embed(y)) - ref) < 1e-9 * std::max(1.0, std::abs(ref)));
            }
        }
    }
}

TEST_CASE("Petz Gram lower bound", "[covariance][property]") {
    Rng rng(5);
    for (const auto& s : test::mixed_shapes()) {
        const NormalState rho = random_state(s, true, rng);
        const GnsSpace sp = build_gns(rho);
        double dmin = 1.0, dmax = 0.0;
        for (const auto& ev : rho.eigenvalues()) {
            dmin = std::min(dmin, ev.minCoeff());
            dmax = std::max(dmax, ev.maxCoeff());
        }
        for (const auto& f : omf_catalog()) {
            // c(x,x) >= min_ij d_j f(d_i/d_j) |x~|^2 and |x~|^2 >= |[x]|^2 / dmax
            const double fmin = std::min(f(dmin / dmax), f(1.0));
            const double bound = dmin * fmin / dmax;
            CHECK(test::min_eig(covariance_gram(CovarianceKind::petz(f), sp).dense()) >= bound * (1 - 1e-9));
        }
    }
}

TEST_CASE("global scale multiplies the Gram", "[covariance]") {
    Rng rng(6);
    const GnsSpace sp = build_gns(random_state(AlgebraShape({3}), true, rng));
    const CMatrix a = covariance_gram(CovarianceKind::petz(omf::wy()), sp).dense();
    const CMatrix b = covariance_gram(CovarianceKind::petz(omf::wy(), 2.5), sp).dense();
    CHECK(max_abs(CMatrix(b - 2.5 * a)) < 1e-12);
}

TEST_CASE("abelian shapes collapse every normalized kind to GNS", "[covariance][property]") {
    Rng rng(7);
    for (int t = 0; t < 20; ++t) {
        const NormalState p = random_state(AlgebraShape::abelian(2 + t % 5), true, rng);
        const GnsSpace sp = build_gns(p);
        const CMatrix g = covariance_gram(CovarianceKind::gns(), sp).dense();
        for (const auto& f : omf_catalog())
            CHECK(max_abs(CMatrix(covariance_gram(CovarianceKind::petz(f), sp).dense() - g)) < 1e-10);
    }
}

TEST_CASE("max_generalized_eigenvalue matches Eigen's generalized solver", "[covariance]") {
    Rng rng(8);
    for (int t = 0; t < 20; ++t) {
        const CMatrix ga = random_complex_gaussian(5, 5, rng), gb = random_complex_gaussian(5, 5, rng);
        const CMatrix a = ga * ga.adjoint();
        const CMatrix b = gb * gb.adjoint() + CMatrix::Identity(5, 5);
        // reduce to a real symmetric problem of twice the size
        const auto realify = [](const CMatrix& m) {
            RMatrix r(2 * m.rows(), 2 * m.cols());
            r << m.real(), -m.imag(), m.imag(), m.real();
            return r;
        };
        Eigen::GeneralizedSelfAdjointEigenSolver<RMatrix> es(realify(a), realify(b));
        CHECK(max_generalized_eigenvalue(a, b) == Catch::Approx(es.eigenvalues().maxCoeff()).epsilon(1e-10));
    }
}

TEST_CASE("monotonicity examples", "[covariance]") {
    Rng rng(9);
    const NormalState rho = random_state(AlgebraShape({2, 1}), true, rng);
    for (const auto& k : kind_catalog()) {
        const auto r = monotonicity_check(k, identity_morphism(rho), 200, 1);
        CHECK(r.worst_ratio == Catch::Approx(1.0).margin(1e-12));
        CHECK(r.exact_max_eig == Catch::Approx(1.0).margin(1e-12));
        CHECK(r.pass);
    }

    // GNS kind: exact criterion is the squared operator norm of the contraction
    const NcpMorphism phi = random_morphism(rho, AlgebraShape({3}), rng);
    const auto gr = monotonicity_check(CovarianceKind::gns(), phi, 200, 2);
    const GnsContraction c = induced_contraction(phi, build_gns(phi.target()), build_gns(phi.source()));
    CHECK(gr.exact_max_eig == Catch::Approx(c.operator_norm * c.operator_norm).epsilon(1e-10));
    CHECK(gr.exact_max_eig <= 1 + 1e-9);

    // SLD kind, depolarizing on (M2, diag(3/4, 1/4))
    const NormalState d = faithful_qubit(0.75);
    const CpuMap dep = depolarizing(0.5);
    const NcpMorphism m = mk_morphism(d, predual(dep, d), dep);
    const auto sr = monotonicity_check(CovarianceKind::petz(omf::sld()), m, 1000, 7);
    CHECK(sr.exact_max_eig <= 1 + 1e-9);
    CHECK(sr.worst_ratio <= sr.exact_max_eig + 1e-12);
    CHECK(sr.pass);
}

TEST_CASE("corrupted Grams fail monotonicity with a witness", "[covariance]") {
    Rng rng(10);
    const NormalState rho = random_state(AlgebraShape({2}), true, rng);
    const NcpMorphism phi = random_morphism(rho, AlgebraShape({2}), rng);
    const GnsSpace ss = build_gns(phi.target()), sr = build_gns(phi.source());
    const GnsContraction c = induced_contraction(phi, ss, sr);
    const CovarianceGram gs = covariance_gram(CovarianceKind::gns(), ss);
    const CovarianceGram gr = covariance_gram(CovarianceKind::gns(), sr);
    const auto bad = monotonicity_from_grams(c.matrix, gr, gs.with_matrix(0.25 * gs.dense()), 100, 3, 1e-9);
    CHECK_FALSE(bad.pass);
    CHECK_FALSE(bad.exact_pass);
    CHECK(bad.witness.size() == ss.dim());
    const CVector img = c.matrix * bad.witness;
    const double ratio = std::real(img.dot(gr.dense() * img)) / std::real(bad.witness.dot(0.25 * bad.witness));
    CHECK(ratio == Catch::Approx(bad.worst_ratio));
    CHECK(ratio > 1.0);
    CHECK_THROWS_AS(gs.with_matrix(CMatrix::Identity(1, 1)), ShapeMismatch);
}

TEST_CASE("property: monotonicity for every kind", "[covariance][property]") {
    Rng rng(11);
    const auto& shapes = test::mixed_shapes();
    for (const auto& k : kind_catalog()) {
        for (int t = 0; t < 20; ++t) {
            const NormalState rho = random_state(shapes[static_cast<std::size_t>(t) % shapes.size()], true, rng);
            const NcpMorphism phi = random_morphism(rho, shapes[static_cast<std::size_t>(t / 5) % shapes.size()], rng);
            REQUIRE(phi.target().is_faithful());
            const auto r = monotonicity_check(k, phi, 50, static_cast<std::uint64_t>(t));
            INFO(k.name() << " trial " << t);
            CHECK(r.exact_max_eig <= 1 + 1e-8);
            CHECK(r.sampled_pass);
        }
    }
}

TEST_CASE("tracial collapse examples", "[covariance]") {
    const auto a = tracial_collapse_check({AlgebraShape({2})}, 5, 1, 1e-10);
    CHECK(a.max_deviation < 1e-10);
    const auto b = tracial_collapse_check({AlgebraShape({1, 1, 1})}, 5, 2, 1e-10);
    CHECK(b.max_deviation < 1e-10);
    const auto c = tracial_collapse_check({AlgebraShape({2, 3})}, 5, 3, 1e-10);
    CHECK(c.max_deviation < 1e-10);
    CHECK(c.per_kind.size() == omf_catalog().size());
    CHECK(c.pass);
}

TEST_CASE("non-tracial states separate the kinds", "[covariance]") {
    const GnsSpace sp = build_gns(faithful_qubit(0.75));
    const CMatrix g = covariance_gram(CovarianceKind::gns(), sp).dense();
    const CMatrix s = covariance_gram(CovarianceKind::petz(omf::sld()), sp).dense();
    CHECK(max_abs(CMatrix(s - g)) > 0.1);
}
