// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>

#include "support.hpp"

using namespace ncp;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

Params point(std::initializer_list<double> v) {
    Params p(static_cast<Index>(v.size()));
    Index i = 0;
    for (double x : v) p(i++) = x;
    return p;
}

Params simplex_point(Index n, Rng& rng) {
    std::uniform_real_distribution<double> u(0.05, 1.0);
    RVector w(n + 1);
    for (Index i = 0; i <= n; ++i) w(i) = u(rng);
    w /= w.sum();
    return w.head(n);
}

NormalState mixed_state(const AlgebraShape& shape, int t, Rng& rng) {
    if (t % 2 == 0) return random_state(shape, true, rng);
    return random_state_with_ranks(shape, std::vector<Index>(shape.num_blocks(), 1), rng);
}

const AlgebraShape& shape_at(std::size_t i) {
    const auto& s = test::mixed_shapes();
    return s[i % s.size()];
}

// 1
Outcome contractivity() {
    Rng rng(101);
    double worst = 0.0, cyc = 0.0;
    for (int t = 0; t < 200; ++t) {
        const NormalState rho = mixed_state(shape_at(static_cast<std::size_t>(t)), t, rng);
        const NcpMorphism phi = random_morphism(rho, shape_at(static_cast<std::size_t>(t / 5)), rng);
        const GnsSpace ss = build_gns(phi.target()), sr = build_gns(phi.source());
        const GnsContraction c = induced_contraction(phi, ss, sr);
        worst = std::max(worst, c.operator_norm);
        cyc = std::max(cyc, (c.matrix * ss.cyclic() - sr.cyclic()).norm());
    }
    return {worst <= 1.0 + 1e-9 && cyc <= 1e-9, fmt("max norm %.15f, cyclic deviation %.2e", worst, cyc)};
}

// 2
Outcome functoriality() {
    Rng rng(202);
    std::vector<std::vector<NcpMorphism>> chains;
    for (int t = 0; t < 100; ++t) {
        std::vector<NcpMorphism> chain;
        NormalState obj = mixed_state(shape_at(static_cast<std::size_t>(t)), t, rng);
        for (int l = 0; l < 3; ++l) {
            chain.push_back(random_morphism(obj, shape_at(static_cast<std::size_t>(t + 2 * l + 1)), rng));
            obj = chain.back().target();
        }
        chains.push_back(std::move(chain));
    }
    const FunctorLawReport r = check_functor_laws(chains, 1e-9);
    return {r.pass && r.checked_chains == 100,
            fmt("identity deviation %.2e, composition deviation %.2e", r.max_identity_deviation,
                r.max_composition_deviation)};
}

// 3
Outcome monotonicity() {
    Rng rng(303);
    double worst = 0.0;
    std::string worst_kind;
    int checked = 0;
    for (const auto& kind : kind_catalog()) {
        for (int t = 0; t < 100; ++t) {
            const NormalState rho = random_state(shape_at(static_cast<std::size_t>(t)), true, rng);
            const AlgebraShape& b = shape_at(static_cast<std::size_t>(t / 5 + 1));
            // enough Kraus operators that the predual stays faithful
            const Index n = std::max<Index>(2, (b.matrix_dim() + rho.shape().matrix_dim() - 1) / rho.shape().matrix_dim());
            const NcpMorphism phi = random_morphism(rho, b, rng, n);
            const MonotonicityReport r = monotonicity_check(kind, phi, 20, static_cast<std::uint64_t>(t), 1e-8);
            if (r.exact_max_eig > worst) {
                worst = r.exact_max_eig;
                worst_kind = kind.name();
            }
            ++checked;
        }
    }
    return {checked == 500 && worst <= 1.0 + 1e-8,
            fmt("%.0f morphisms, max generalized eigenvalue %.15f", checked, worst) + " (" + worst_kind + ")"};
}

// 4
Outcome fisher_rao() {
    Rng rng(404);
    double worst = 0.0;
    for (Index n = 1; n <= 6; ++n) {
        const StatModel m = simplex_model(n);
        for (int t = 0; t < 50; ++t) {
            const Params th = simplex_point(n, rng);
            const double last = 1.0 - th.sum();
            RMatrix ref = RMatrix::Constant(n, n, 1.0 / last);
            for (Index i = 0; i < n; ++i) ref(i, i) += 1.0 / th(i);
            const RMatrix g = metric_pullback(m, th, CovarianceKind::gns());
            worst = std::max(worst, (g - ref).cwiseAbs().maxCoeff() / std::max(1.0, ref.cwiseAbs().maxCoeff()));
        }
    }
    return {worst <= 1e-9, fmt("300 points, max relative deviation %.2e", worst)};
}

// 5
Outcome qfi() {
    Rng rng(505);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const StatModel m = qubit_faithful_model();
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
        const double r = 0.05 + 0.9 * u(rng), th = 0.05 + (std::numbers::pi - 0.1) * u(rng), ph = 2 * std::numbers::pi * u(rng);
        RMatrix ref = RMatrix::Zero(3, 3);
        ref(0, 0) = 1.0 / (1.0 - r * r);
        ref(1, 1) = r * r;
        ref(2, 2) = r * r * std::sin(th) * std::sin(th);
        worst = std::max(worst, (metric_pullback(m, point({r, th, ph}), CovarianceKind::gns()) - ref).cwiseAbs().maxCoeff());
    }
    return {worst <= 1e-8, fmt("50 points, max deviation %.2e", worst)};
}

// 6
Outcome pure_sphere() {
    Rng rng(606);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const StatModel m = qubit_pure_model();
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
        const double th = 0.05 + (std::numbers::pi - 0.1) * u(rng), ph = 2 * std::numbers::pi * u(rng);
        RMatrix ref = RMatrix::Zero(2, 2);
        ref(0, 0) = 1.0;
        ref(1, 1) = std::sin(th) * std::sin(th);
        worst = std::max(worst, (metric_pullback(m, point({th, ph}), CovarianceKind::gns()) - ref).cwiseAbs().maxCoeff());
    }
    return {worst <= 1e-8, fmt("50 points, max deviation from the unit sphere %.2e", worst)};
}

// 7
Outcome gaussian() {
    const double mu = 0.4, sigma = 1.3;
    RMatrix ref = RMatrix::Zero(2, 2);
    ref(0, 0) = 1.0 / (sigma * sigma);
    ref(1, 1) = 2.0 / (sigma * sigma);
    double prev = std::numeric_limits<double>::infinity(), last = 0.0;
    bool monotone = true;
    for (Index bins : {256, 1024, 4096}) {
        const RMatrix g = metric_pullback(gaussian_model(bins, mu - 10 * sigma, mu + 10 * sigma), point({mu, sigma}),
                                          CovarianceKind::gns());
        last = (g - ref).cwiseAbs().maxCoeff() / ref.cwiseAbs().maxCoeff();
        monotone = monotone && last < prev;
        prev = last;
    }
    Rng rng(707);
    std::uniform_real_distribution<double> u(0.2, 3.0);
    double push = 0.0, comp = 0.0;
    for (int t = 0; t < 20; ++t) {
        const auto r = t == 0 ? affine_pushforward_check({1, 2}, {0, 1})
                              : affine_pushforward_check({u(rng) - 1.5, u(rng)}, {u(rng) - 1.5, u(rng)});
        push = std::max(push, r.max_deviation);
        comp = std::max(comp, r.max_composition_deviation);
    }
    const Affine c = affine_compose({1, 2}, {3, 4});
    const bool example = c.mu == 7.0 && c.sigma == 8.0;
    return {last < 0.01 && monotone && push < 1e-12 && comp < 1e-12 && example,
            fmt("relative error %.2e at 4096 bins, pushforward deviation %.2e", last, push) +
                fmt(", composition deviation %.2e", comp) + (monotone ? ", error decreasing in bins" : ", error not decreasing")};
}

// 8
Outcome congruence() {
    Rng rng(808);
    std::uniform_int_distribution<int> fib(1, 3);
    std::uniform_real_distribution<double> u(0.1, 1.0);
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
        const Index n = 1 + t % 5;
        std::vector<Index> part;
        std::vector<double> w;
        for (Index c = 0; c <= n; ++c) {
            const int k = fib(rng);
            std::vector<double> ws(static_cast<std::size_t>(k));
            double tot = 0.0;
            for (auto& x : ws) tot += (x = u(rng));
            for (double x : ws) {
                part.push_back(c);
                w.push_back(x / tot);
            }
        }
        std::vector<Params> samples;
        for (int s = 0; s < 5; ++s) samples.push_back(simplex_point(n, rng));
        worst = std::max(worst, congruence_invariance_check(simplex_model(n), congruent_embedding(part, w), samples).max_deviation);
    }
    return {worst <= 1e-9, fmt("20 embeddings, max deviation %.2e", worst)};
}

// 9
Outcome tracial() {
    const TracialCollapseReport r = tracial_collapse_check(test::mixed_shapes(), 100, 909, 1e-9);
    return {r.pass && r.states == 100, fmt("100 states, max deviation %.2e", r.max_deviation)};
}

// 10
Outcome channels() {
    const double transpose_min = check_cp(transpose_map(AlgebraShape({2}))).min_eigenvalue;
    bool ok = !is_cp(transpose_map(AlgebraShape({2}))) && std::abs(transpose_min + 0.5) < 1e-12;
    for (int i = 0; i <= 16; ++i) ok = ok && is_cp(depolarizing_linear(i / 12.0));
    ok = ok && !is_cp(depolarizing_linear(-0.05)) && !is_cp(depolarizing_linear(4.0 / 3.0 + 0.05));
    Rng rng(1010);
    double worst_cp = std::numeric_limits<double>::infinity(), worst_unital = 0.0;
    for (int t = 0; t < 100; ++t) {
        const CpuMap phi = random_kraus_channel(shape_at(static_cast<std::size_t>(t)), shape_at(static_cast<std::size_t>(t / 5)),
                                                1 + t % 3, rng);
        const ChoiReport c = check_cp(phi.linear());
        ok = ok && c.cp;
        worst_cp = std::min(worst_cp, c.min_eigenvalue);
        worst_unital = std::max(worst_unital, phi.linear().unitality_defect());
    }
    ok = ok && worst_unital <= 1e-10;
    return {ok, fmt("transpose min Choi eigenvalue %.3f, random channels min Choi eigenvalue %.2e", transpose_min,
                    worst_cp) +
                    fmt(", max unitality defect %.2e", worst_unital)};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> run;
        double budget_s;  // 0 = no time limit
    };
    const std::vector<Criterion> criteria{
        {1, "GNS contractivity", contractivity, 30.0},
        {2, "GNS functoriality", functoriality, 0.0},
        {3, "covariance monotonicity", monotonicity, 0.0},
        {4, "Fisher-Rao recovery", fisher_rao, 0.0},
        {5, "QFI recovery", qfi, 0.0},
        {6, "pure-state metric", pure_sphere, 0.0},
        {7, "Gaussian bridge", gaussian, 60.0},
        {8, "congruence invariance", congruence, 0.0},
        {9, "tracial uniqueness", tracial, 0.0},
        {10, "channel checks", channels, 0.0},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.budget_s > 0.0 && secs > c.budget_s) {
            o.pass = false;
            o.detail += fmt(" [over the %.0f s budget]", c.budget_s);
        }
        failures += !o.pass;
        std::printf("criterion %d: %s %s: %s (%.2f s)\n", c.id, o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
