#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using namespace ncp;
using ncp::test::max_abs;

namespace {

CMatrix diag2(double a, double b) {
    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}

/// Gram oracle G_ab = rho(e_a^* e_b) computed by evaluating the state.
CMatrix gram_oracle(const NormalState& rho) {
    const auto b = basis(rho.shape());
    const Index e = static_cast<Index>(b.size());
    CMatrix g(e, e);
    for (Index i = 0; i < e; ++i)
        for (Index j = 0; j < e; ++j) g(i, j) = evaluate(rho, adjoint(b[i]) * b[j]);
    return g;
}

double singular_min(const CMatrix& m) { return Eigen::JacobiSVD<CMatrix>(m).singularValues().minCoeff(); }

}  // namespace

TEST_CASE("build_gns examples", "[gns]") {
    Rng rng(1);
    const AlgebraShape q({2});
    CHECK(build_gns(random_state(q, true, rng)).dim() == 4);

    const GnsSpace pure = build_gns(mk_state(q, {diag2(1, 0)}));
    CHECK(pure.dim() == 2);
    Eigen::FullPivLU<CMatrix> lu(gram_oracle(pure.state()));
    CHECK(lu.rank() == 2);

    const GnsSpace half = build_gns(from_probabilities({0.5, 0.5}));
    CHECK(half.dim() == 2);
    CVector x(2);
    x << 1.0, -1.0;
    const auto a = AlgebraElement::from_coords(half.shape(), x);
    CHECK(half.embed(a).norm() == Catch::Approx(1.0));
    // <x, y> = sum p_i conj(x_i) y_i
    const auto y = AlgebraElement::from_coords(half.shape(), CVector::Constant(2, cplx(0.0, 2.0)));
    CHECK(std::abs(half.inner(a, y) - (0.5 * cplx(0, 2) - 0.5 * cplx(0, 2))) < 1e-15);
}

TEST_CASE("gns_gram equals the evaluated Gram matrix", "[gns]") {
    Rng rng(2);
    for (const auto& s : test::mixed_shapes()) {
        const NormalState rho = random_state(s, false, rng);
        CHECK(max_abs(CMatrix(CMatrix(gns_gram(rho)) - gram_oracle(rho))) < 1e-15);
    }
}

TEST_CASE("embed and inner examples", "[gns]") {
    Rng rng(3);
    const NormalState rho = random_state(AlgebraShape({2, 3}), false, rng);
    const GnsSpace sp = build_gns(rho);
    const AlgebraElement one = identity(rho.shape());
    CHECK(std::abs(sp.inner(one, one) - 1.0) < 1e-12);

    const GnsSpace pure = build_gns(mk_state(AlgebraShape({2}), {diag2(1, 0)}));
    CHECK(pure.embed(AlgebraElement::matrix_unit(pure.shape(), 0, 0, 1)).norm() < 1e-15);

    for (int t = 0; t < 20; ++t) {
        const auto a = random_element(rho.shape(), rng), b = random_element(rho.shape(), rng);
        CHECK(std::abs(sp.inner(a, b) - evaluate(rho, adjoint(a) * b)) < 1e-9);
        CHECK(std::abs(sp.embed(a).dot(sp.embed(b)) - inner(sp, a, b)) < 1e-12);
    }
    CHECK_THROWS_AS(sp.embed(identity(AlgebraShape({2}))), ShapeMismatch);
}

TEST_CASE("GnsSpace invariants on random states", "[gns][property]") {
    Rng rng(4);
    for (int t = 0; t < 100; ++t) {
        const AlgebraShape s({3, 2});
        const std::vector<Index> ranks{t % 4, 1 + (t / 4) % 2};
        const NormalState rho = random_state_with_ranks(s, ranks, rng);
        const GnsSpace sp = build_gns(rho);
        // dimension formula vs Gram rank
        Index formula = 0;
        for (std::size_t k = 0; k < s.num_blocks(); ++k) formula += s.block_dim(k) * rho.rank(k);
        CHECK(sp.dim() == formula);
        Eigen::FullPivLU<CMatrix> lu(gram_oracle(rho));
        lu.setThreshold(1e-9);
        CHECK(lu.rank() == formula);
        // orthonormality of representatives
        for (Index i = 0; i < sp.dim(); ++i)
            for (Index j = 0; j < sp.dim(); ++j) {
                const cplx v = evaluate(rho, adjoint(sp.rep_element(i)) * sp.rep_element(j));
                CHECK(std::abs(v - (i == j ? 1.0 : 0.0)) < 1e-9);
            }
        CHECK(sp.cyclic().norm() == Catch::Approx(1.0).margin(1e-10));
        // Gelfand ideal: x (1 - support) is null
        const auto x = random_element(s, rng) * (identity(s) - support(rho));
        CHECK(sp.embed(x).norm() < 1e-9);
    }
}

TEST_CASE("induced contraction examples", "[gns]") {
    Rng rng(5);
    const NormalState rho = random_state(AlgebraShape({2, 1}), true, rng);
    const GnsSpace sp = build_gns(rho);
    const GnsContraction id = induced_contraction(identity_morphism(rho), sp, sp);
    CHECK(max_abs(CMatrix(id.matrix - CMatrix::Identity(sp.dim(), sp.dim()))) < 1e-12);

    // unitary conjugation: unitary GNS matrix
    const NormalState q = random_state(AlgebraShape({2}), true, rng);
    const CpuMap u = unitary_conjugation(random_unitary(2, rng));
    const NcpMorphism mu = mk_morphism(q, predual(u, q), u);
    const GnsSpace sq = build_gns(q), sqs = build_gns(mu.target());
    const GnsContraction cu = induced_contraction(mu, sqs, sq);
    const RVector sv = Eigen::JacobiSVD<CMatrix>(cu.matrix).singularValues();
    CHECK((sv.array() - 1.0).abs().maxCoeff() < 1e-10);

    // depolarizing endomorphism of (M2, I/2): all <= 1, some < 1
    const NormalState half = mk_state(AlgebraShape({2}), {0.5 * CMatrix::Identity(2, 2)});
    const NcpMorphism dep = mk_morphism(half, half, depolarizing(0.5));
    const GnsSpace sh = build_gns(half);
    const GnsContraction cd = induced_contraction(dep, sh, sh);
    CHECK(cd.operator_norm <= 1.0 + 1e-9);
    CHECK(singular_min(cd.matrix) < 1.0 - 0.1);
}

TEST_CASE("induced_contraction rejects foreign spaces", "[gns]") {
    Rng rng(6);
    const NormalState rho = random_state(AlgebraShape({2}), true, rng);
    const NormalState other = random_state(AlgebraShape({2}), true, rng);
    const GnsSpace a = build_gns(rho), b = build_gns(other);
    CHECK_THROWS_AS(induced_contraction(identity_morphism(rho), b, a), ObjectMismatch);
}

TEST_CASE("ill-conditioned support is reported as a well-definedness failure", "[gns]") {
    // sigma has a weight just below the 1e-9 cutoff; the coarse cutoff puts the
    // e_2 direction in sigma's ideal, while rho (after a conjugation that mixes
    // it with e_1) keeps it: the ideal leaks.
    const double eps = 5e-10;
    const AlgebraShape q({2});
    const NormalState sigma = mk_state(q, {diag2(1 - eps, eps)});
    const CMatrix h = (CMatrix(2, 2) << 1, 1, 1, -1).finished() / std::sqrt(2.0);
    const CpuMap u = unitary_conjugation(h);
    const NormalState rho = predual(unitary_conjugation(h.adjoint()), sigma);
    const NcpMorphism m = mk_morphism(rho, sigma, u);
    const GnsSpace ss = build_gns(sigma), sr = build_gns(rho, 1e-12);
    CHECK(ss.dim() == 2);
    CHECK(sr.dim() == 4);
    // with the same cutoff everywhere the map is well defined
    CHECK_NOTHROW(induced_contraction(m, ss, build_gns(rho)));
    // a rho space that is too fine keeps ideal directions alive
    CHECK_THROWS_AS(induced_contraction(m, ss, sr), WellDefinednessError);
}

TEST_CASE("property: contraction over random morphisms", "[gns][property]") {
    Rng rng(7);
    const std::vector<AlgebraShape> shapes{AlgebraShape({2}), AlgebraShape({3}), AlgebraShape({1, 1}),
                                           AlgebraShape({2, 1})};
    for (int t = 0; t < 200; ++t) {
        const AlgebraShape& a = shapes[static_cast<std::size_t>(t) % shapes.size()];
        const AlgebraShape& b = shapes[static_cast<std::size_t>(t / 4) % shapes.size()];
        const NormalState rho = t % 3 == 0 ? random_state_with_ranks(a, std::vector<Index>(a.num_blocks(), 1), rng)
                                           : random_state(a, true, rng);
        const NcpMorphism phi = random_morphism(rho, b, rng, 1 + t % 3);
        const GnsSpace ss = build_gns(phi.target()), sr = build_gns(phi.source());
        const GnsContraction c = induced_contraction(phi, ss, sr);
        CHECK(c.operator_norm <= 1.0 + 1e-9);
        CHECK((c.matrix * ss.cyclic() - sr.cyclic()).norm() < 1e-9);
    }
}

TEST_CASE("functor laws", "[gns][property]") {
    Rng rng(8);
    const NormalState rho = random_state(AlgebraShape({2, 1}), true, rng);
    {
        const auto rep = check_functor_laws({{identity_morphism(rho)}});
        CHECK(rep.max_identity_deviation < 1e-14);
        CHECK(rep.max_composition_deviation < 1e-14);
    }
    {
        const NormalState q = random_state(AlgebraShape({2}), true, rng);
        const CpuMap u1 = unitary_conjugation(random_unitary(2, rng));
        const NcpMorphism m1 = mk_morphism(q, predual(u1, q), u1);
        const CpuMap u2 = unitary_conjugation(random_unitary(2, rng));
        const NcpMorphism m2 = mk_morphism(m1.target(), predual(u2, m1.target()), u2);
        const auto rep = check_functor_laws({{m1, m2}});
        CHECK(rep.max_composition_deviation < 1e-10);
        CHECK(rep.pass);
    }
    std::vector<std::vector<NcpMorphism>> chains;
    for (int t = 0; t < 30; ++t) {
        const auto& sh = test::mixed_shapes();
        const NormalState r = random_state(sh[static_cast<std::size_t>(t) % sh.size()], true, rng);
        const NcpMorphism f = random_morphism(r, sh[static_cast<std::size_t>(t + 1) % sh.size()], rng);
        const NcpMorphism g = random_morphism(f.target(), sh[static_cast<std::size_t>(t + 2) % sh.size()], rng);
        const NcpMorphism h = random_morphism(g.target(), sh[static_cast<std::size_t>(t + 3) % sh.size()], rng);
        chains.push_back({f, g, h});
    }
    const auto rep = check_functor_laws(chains);
    CHECK(rep.checked_chains == 30);
    CHECK(rep.max_identity_deviation < 1e-9);
    CHECK(rep.max_composition_deviation < 1e-9);
    CHECK(rep.pass);
}

TEST_CASE("GNS coordinates are reproducible", "[gns]") {
    const NormalState rho = random_state(AlgebraShape({2, 3}), false, std::uint64_t{9});
    const GnsSpace a = build_gns(rho), b = build_gns(rho);
    CHECK(max_abs(CMatrix(CMatrix(a.iso_matrix()) - CMatrix(b.iso_matrix()))) == 0.0);
}
