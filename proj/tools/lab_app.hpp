#pragma once

// ncp-lab: command-line front end. run_lab() is the whole program so the
// test suite can drive it in-process.
//
// Exit codes: 0 pass, 1 property failure, 2 input error.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ncp/json_io.hpp"
#include "ncp/ncp.hpp"

namespace ncp::lab {

using json = nlohmann::json;

inline constexpr int kExitPass = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInput = 2;

/// Worker count: NCP_LAB_THREADS if set and positive, else the hardware count.
inline unsigned thread_count() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("NCP_LAB_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) n = std::min(n, static_cast<unsigned>(v));
        } catch (const std::exception&) {
        }
    }
    return n;
}

/// Runs fn(i) for i in [0, n) on up to thread_count() workers. Results are
/// stored by index, so the output does not depend on scheduling.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t n, Fn fn) {
    std::vector<T> out(n);
    std::vector<std::exception_ptr> errors(n);
    const std::size_t workers = std::min<std::size_t>(thread_count(), std::max<std::size_t>(n, 1));
    auto run = [&](std::size_t w) {
        for (std::size_t i = w; i < n; i += workers) {
            try {
                out[i] = fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        run(0);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

/// Seed of trial i, independent of execution order.
inline std::uint64_t trial_seed(std::uint64_t seed, std::size_t i) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(i)};
    std::uint32_t parts[2];
    seq.generate(parts, parts + 2);
    return (static_cast<std::uint64_t>(parts[0]) << 32) | parts[1];
}

inline std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Raised for bad command-line values that CLI11 cannot catch itself.
class UsageError : public Error {
public:
    using Error::Error;
};

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open input file '" + path + "'");
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return json::parse(text);
}

inline std::vector<double> parse_doubles(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError("not a number: '" + item + "'");
        }
    }
    return out;
}

inline Index parse_index(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        const long v = std::stol(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return static_cast<Index>(v);
    } catch (const std::exception&) {
        throw UsageError(what + ": not an integer: '" + s + "'");
    }
}

/// "2;1,1,1;2,3" -> shapes [2], [1,1,1], [2,3].
inline std::vector<AlgebraShape> parse_shapes(const std::string& s) {
    std::vector<AlgebraShape> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ';')) {
        std::vector<Index> dims;
        std::stringstream is(item);
        std::string d;
        while (std::getline(is, d, ',')) dims.push_back(parse_index(d, "shape"));
        out.emplace_back(dims);
    }
    if (out.empty()) throw UsageError("no shapes given");
    return out;
}

struct ModelSpec {
    enum class Family { Simplex, QubitFaithful, QubitPure, Gaussian };
    Family family;
    StatModel model;
    double x_min = 0.0, x_max = 0.0;
};

/// simplex:n | qubit-faithful | qubit-pure | gaussian:bins[:xmin:xmax]
inline ModelSpec parse_model(const std::string& spec) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    std::string p;
    while (std::getline(ss, p, ':')) parts.push_back(p);
    if (parts.empty()) throw UsageError("empty model spec");
    using F = ModelSpec::Family;
    if (parts[0] == "simplex" && parts.size() == 2) {
        return {F::Simplex, simplex_model(parse_index(parts[1], "simplex dimension"))};
    }
    if (spec == "qubit-faithful") return {F::QubitFaithful, qubit_faithful_model()};
    if (spec == "qubit-pure") return {F::QubitPure, qubit_pure_model()};
    if (parts[0] == "gaussian" && (parts.size() == 2 || parts.size() == 4)) {
        const Index bins = parse_index(parts[1], "gaussian bins");
        const double lo = parts.size() == 4 ? parse_doubles(parts[2]).at(0) : -10.0;
        const double hi = parts.size() == 4 ? parse_doubles(parts[3]).at(0) : 10.0;
        return {F::Gaussian, gaussian_model(bins, lo, hi), lo, hi};
    }
    throw UsageError("unknown model '" + spec + "' (simplex:n, qubit-faithful, qubit-pure, gaussian:bins[:xmin:xmax])");
}

inline CovarianceKind require_kind(const std::string& name) {
    if (auto k = parse_kind(name)) return *k;
    throw UsageError("unknown covariance kind '" + name + "' (gns, sld, kmb, wy, rld, one)");
}

inline json complex_vector_json(const CVector& v) {
    json a = json::array();
    for (Index i = 0; i < v.size(); ++i) a.push_back(io::to_json(v(i)));
    return a;
}

inline json shape_list_json(const std::vector<AlgebraShape>& shapes) {
    json a = json::array();
    for (const auto& s : shapes) a.push_back(s.blocks());
    return a;
}

/// Closed-form metric for the model, if one applies to this kind.
inline std::optional<RMatrix> oracle_metric(const ModelSpec& m, const Params& theta, const CovarianceKind& kind) {
    using F = ModelSpec::Family;
    const bool normalized = kind.scale == 1.0 && (kind.tag == CovarianceKind::Tag::Gns || kind.f->normalized);
    switch (m.family) {
        case F::Simplex:
            if (normalized) return reference::fisher_rao_simplex(theta);
            break;
        case F::Gaussian:
            if (normalized) return reference::gaussian_fisher(theta(1));
            break;
        case F::QubitFaithful:
            if (kind.tag == CovarianceKind::Tag::Gns && kind.scale == 1.0) return reference::qubit_qfi(theta(0), theta(1));
            break;
        case F::QubitPure:
            if (kind.tag == CovarianceKind::Tag::Gns && kind.scale == 1.0) return reference::unit_sphere(theta(0));
            break;
    }
    return std::nullopt;
}

inline double relative_error(const RMatrix& a, const RMatrix& ref) {
    return (a - ref).cwiseAbs().maxCoeff() / std::max(ref.cwiseAbs().maxCoeff(), 1e-300);
}

/// Random interior parameter of an abelian model.
inline Params sample_params(const ModelSpec& m, Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    if (m.family == ModelSpec::Family::Simplex) {
        const Index n = m.model.param_dim;
        std::exponential_distribution<double> e(1.0);
        RVector w(n + 1);
        for (Index i = 0; i <= n; ++i) w(i) = e(rng) + 0.05;
        w /= w.sum();
        return w.head(n);
    }
    const double width = m.x_max - m.x_min;
    const double mid = 0.5 * (m.x_min + m.x_max);
    Params t(2);
    t << mid + width * (u(rng) - 0.5) * 0.2, width * (0.03 + 0.03 * u(rng));
    return t;
}

/// Each coarse point gets a fiber of 1 to 3 fine points with random weights.
inline CongruentEmbedding random_embedding(Index coarse, Rng& rng) {
    std::uniform_int_distribution<int> size(1, 3);
    std::uniform_real_distribution<double> u(0.1, 1.0);
    std::vector<Index> partition;
    std::vector<double> weights;
    for (Index c = 0; c < coarse; ++c) {
        const int k = size(rng);
        std::vector<double> w(static_cast<std::size_t>(k));
        double total = 0.0;
        for (auto& x : w) total += (x = u(rng));
        for (auto& x : w) {
            partition.push_back(c);
            weights.push_back(x / total);
        }
    }
    return congruent_embedding(std::move(partition), std::move(weights));
}

/// Every bin split in two with weights 1/2.
inline CongruentEmbedding bin_halving(Index coarse) {
    std::vector<Index> partition;
    for (Index c = 0; c < coarse; ++c) partition.insert(partition.end(), {c, c});
    std::vector<double> weights(partition.size(), 0.5);
    return congruent_embedding(std::move(partition), std::move(weights));
}

struct Options {
    std::uint64_t seed = 0;
    std::optional<double> tol;
    std::optional<Index> samples;
    std::string out;

    std::string state_path, channel_path, morphism_path;
    std::string kind = "gns";
    std::string model, theta, derivatives = "analytic";
    double fd_step = 1e-5;
    Index bins = 4096;
    double mu = 0.0, sigma = 1.0, width = 10.0;
    std::string sweep = "256,1024,4096";
    std::string shapes = "2;3;1,1,1;2,1;2,3";
};

inline json header(const std::string& command, const Options& o, json tolerances) {
    return json{{"schema", 1},
                {"command", command},
                {"generated_at", utc_timestamp()},
                {"seed", o.seed},
                {"tolerances", std::move(tolerances)}};
}

// ---------------------------------------------------------------------------
// Subcommands. Each fills `report` and returns an exit code.

inline int cmd_gns(const Options& o, json& report) {
    const NormalState rho = io::state_from_json(read_json_file(o.state_path));
    const double tol = o.tol.value_or(kSupportTolerance);
    const GnsSpace space = build_gns(rho, tol);
    Index formula = 0;
    for (std::size_t k = 0; k < rho.shape().num_blocks(); ++k) formula += rho.shape().block_dim(k) * rho.rank(k, tol);
    report = header("gns", o, {{"support_rel", tol}});
    report["shape"] = rho.shape().blocks();
    report["dim"] = space.dim();
    report["dim_formula"] = formula;
    report["faithful"] = rho.is_faithful(tol);
    report["gram_eigenvalues"] = io::to_json(space.gram_eigenvalues());
    report["cyclic_norm"] = space.cyclic().norm();
    report["pass"] = formula == space.dim();
    return formula == space.dim() ? kExitPass : kExitFailure;
}

inline int cmd_check_channel(const Options& o, json& report) {
    const LinearMap phi = io::channel_from_json(read_json_file(o.channel_path));
    const double tol = o.tol.value_or(1e-9);
    constexpr double unital_tol = 1e-10;
    const ChoiReport choi = check_cp(phi, tol);
    const double defect = phi.unitality_defect();
    const bool unital = defect <= unital_tol;
    report = header("check-channel", o, {{"cp", tol}, {"cp_scaled", choi.tol}, {"unital", unital_tol}});
    report["source"] = io::to_json(phi.source_shape());
    report["target"] = io::to_json(phi.target_shape());
    report["cp"] = choi.cp;
    report["unital"] = unital;
    report["min_choi_eig"] = choi.min_eigenvalue;
    report["choi_trace"] = choi.trace;
    report["choi_hermitian"] = choi.hermitian;
    report["unitality_defect"] = defect;
    report["pass"] = choi.cp && unital;
    return choi.cp && unital ? kExitPass : kExitFailure;
}

inline int cmd_monotonicity(const Options& o, json& report) {
    const double tol = o.tol.value_or(1e-9);
    const CovarianceKind kind = require_kind(o.kind);
    const io::MorphismSpec spec = io::morphism_from_json(read_json_file(o.morphism_path));
    const NcpMorphism& phi = spec.morphism;
    const GnsSpace sigma_space = build_gns(phi.target());
    const GnsSpace rho_space = build_gns(phi.source());
    report = header("monotonicity", o,
                    {{"monotonicity", tol}, {"state_preservation", 1e-9}, {"well_defined", kWellDefinedTolerance},
                     {"support_rel", kSupportTolerance}});
    const GnsContraction c = induced_contraction(phi, sigma_space, rho_space);
    CovarianceGram g_rho = covariance_gram(kind, rho_space);
    CovarianceGram g_sigma = covariance_gram(kind, sigma_space);
    if (spec.gram_rho) g_rho = g_rho.with_matrix(*spec.gram_rho);
    if (spec.gram_sigma) g_sigma = g_sigma.with_matrix(*spec.gram_sigma);
    const Index n = o.samples.value_or(1000);
    const MonotonicityReport rep = monotonicity_from_grams(c.matrix, g_rho, g_sigma, n, o.seed, tol);

    report["kind"] = kind.name();
    report["gram_overridden"] = spec.gram_rho.has_value() || spec.gram_sigma.has_value();
    report["samples"] = n;
    report["preservation_deviation"] = phi.preservation_deviation();
    report["contraction_norm"] = c.operator_norm;
    report["norm_excess"] = c.norm_excess;
    report["worst_ratio"] = rep.worst_ratio;
    report["exact_max_eig"] = rep.exact_max_eig;
    report["sampled_pass"] = rep.sampled_pass;
    report["exact_pass"] = rep.exact_pass;
    report["pass"] = rep.pass;
    if (!rep.pass) report["witness"] = {{"xi", complex_vector_json(rep.witness)}, {"ratio", rep.worst_ratio}};
    return rep.pass ? kExitPass : kExitFailure;
}

inline int cmd_pullback(const Options& o, json& report) {
    ModelSpec m = parse_model(o.model);
    const CovarianceKind kind = require_kind(o.kind);
    const std::vector<double> tv = parse_doubles(o.theta);
    if (static_cast<Index>(tv.size()) != m.model.param_dim) {
        throw UsageError(m.model.name + " expects " + std::to_string(m.model.param_dim) + " parameters, got " +
                         std::to_string(tv.size()));
    }
    const Params theta = Eigen::Map<const RVector>(tv.data(), static_cast<Index>(tv.size()));
    if (o.derivatives == "fd") {
        m.model = m.model.with_finite_differences(o.fd_step);
    } else if (o.derivatives != "analytic") {
        throw UsageError("--derivatives must be 'analytic' or 'fd'");
    }
    const bool gaussian = m.family == ModelSpec::Family::Gaussian;
    const bool qubit = m.family == ModelSpec::Family::QubitFaithful || m.family == ModelSpec::Family::QubitPure;
    const double tol = o.tol.value_or(gaussian ? 1e-2 : (qubit ? 1e-8 : 1e-9));

    const RieszResult r = riesz_score(m.model, theta, kind);
    const RMatrix g = metric_from_scores(r);
    report = header("pullback", o,
                    {{"oracle", tol}, {"riesz_residual", kRieszResidualTolerance}, {"support_rel", kSupportTolerance}});
    report["model"] = m.model.name;
    report["theta"] = tv;
    report["kind"] = kind.name();
    report["derivatives"] = o.derivatives;
    report["metric"] = io::to_json(g);
    report["riesz_residuals"] = r.residuals;
    report["gns_dim"] = r.space.dim();
    bool pass = true;
    if (const auto ref = oracle_metric(m, theta, kind)) {
        const double dev = gaussian ? relative_error(g, *ref) : (g - *ref).cwiseAbs().maxCoeff();
        report["oracle"] = io::to_json(*ref);
        report["deviation"] = dev;
        report["deviation_measure"] = gaussian ? "relative_max_abs" : "max_abs";
        pass = dev <= tol;
        if (m.family == ModelSpec::Family::QubitPure) {
            report["fubini_study"] = io::to_json(reference::fubini_study(theta(0)));
            report["fubini_study_factor"] = reference::kFubiniStudyFactor;
        }
    } else {
        report["oracle"] = nullptr;
    }
    report["pass"] = pass;
    return pass ? kExitPass : kExitFailure;
}

inline int cmd_gaussian_demo(const Options& o, json& report) {
    if (!(o.sigma > 0.0)) throw UsageError("--sigma must be positive");
    if (!(o.width > 0.0)) throw UsageError("--width must be positive");
    const double tol = o.tol.value_or(1e-2);
    constexpr double pushforward_tol = 1e-12;
    const double lo = o.mu - o.width * o.sigma;
    const double hi = o.mu + o.width * o.sigma;
    Params theta(2);
    theta << o.mu, o.sigma;
    const RMatrix ref = reference::gaussian_fisher(o.sigma);
    auto run = [&](Index bins) {
        const RMatrix g = metric_pullback(gaussian_model(bins, lo, hi), theta, CovarianceKind::gns());
        return std::pair{g, relative_error(g, ref)};
    };

    report = header("gaussian-demo", o,
                    {{"relative_error", tol}, {"pushforward", pushforward_tol}, {"mass_leak", kGaussianMassLeak}});
    report["mu"] = o.mu;
    report["sigma"] = o.sigma;
    report["range"] = {lo, hi};
    report["bins"] = o.bins;
    const auto [g, err] = run(o.bins);
    report["metric"] = io::to_json(g);
    report["oracle"] = io::to_json(ref);
    report["relative_error"] = err;

    json sweep = json::array();
    bool monotone = true;
    double prev = std::numeric_limits<double>::infinity();
    if (!o.sweep.empty()) {
        for (double b : parse_doubles(o.sweep)) {
            const auto [gb, eb] = run(static_cast<Index>(b));
            sweep.push_back({{"bins", static_cast<Index>(b)}, {"relative_error", eb}});
            if (!(eb < prev)) monotone = false;
            prev = eb;
        }
    }
    report["convergence"] = sweep;
    report["convergence_monotone"] = monotone;

    const Affine xi{1.0, 2.0}, xi2{0.0, 1.0};
    const PushforwardReport push = affine_pushforward_check(xi, xi2);
    const Affine comp = affine_compose({1.0, 2.0}, {3.0, 4.0});
    report["pushforward"] = {{"xi", {xi.mu, xi.sigma}},
                             {"xi_prime", {xi2.mu, xi2.sigma}},
                             {"max_deviation", push.max_deviation},
                             {"composition_deviation", push.max_composition_deviation},
                             {"composition_example", {comp.mu, comp.sigma}}};

    const bool pass = err <= tol && monotone && push.max_deviation < pushforward_tol;
    report["pass"] = pass;
    return pass ? kExitPass : kExitFailure;
}

inline int cmd_tracial(const Options& o, json& report) {
    const double tol = o.tol.value_or(1e-9);
    const auto shapes = parse_shapes(o.shapes);
    const std::size_t n = static_cast<std::size_t>(o.samples.value_or(100));
    const auto trials = parallel_map<TracialCollapseReport>(n, [&](std::size_t i) {
        return tracial_collapse_check({shapes[i % shapes.size()]}, 1, trial_seed(o.seed, i), tol);
    });
    std::vector<std::pair<std::string, double>> per_kind;
    for (const auto& f : omf_catalog()) per_kind.emplace_back(f.name, 0.0);
    double worst = 0.0;
    for (const auto& t : trials) {
        worst = std::max(worst, t.max_deviation);
        for (std::size_t k = 0; k < per_kind.size(); ++k)
            per_kind[k].second = std::max(per_kind[k].second, t.per_kind[k].second);
    }
    report = header("tracial-uniqueness", o, {{"collapse", tol}});
    report["shapes"] = shape_list_json(shapes);
    report["states"] = n;
    report["max_deviation"] = worst;
    json pk = json::object();
    for (const auto& [name, dev] : per_kind) pk[name] = dev;
    report["per_kind"] = pk;
    report["pass"] = worst <= tol;
    return worst <= tol ? kExitPass : kExitFailure;
}

inline int cmd_congruence(const Options& o, json& report) {
    const ModelSpec m = parse_model(o.model);
    if (!m.model.shape.is_abelian()) throw UsageError("congruence-invariance needs an abelian model (simplex or gaussian)");
    const double tol = o.tol.value_or(1e-9);
    const std::size_t n = static_cast<std::size_t>(o.samples.value_or(20));
    Rng rng(o.seed);
    // Gaussian tails below the support cutoff are null directions; a uniform
    // halving keeps the same bins below the cutoff on both sides.
    const bool gaussian = m.family == ModelSpec::Family::Gaussian;
    const CongruentEmbedding emb =
        gaussian ? bin_halving(m.model.shape.element_dim()) : random_embedding(m.model.shape.element_dim(), rng);
    std::vector<Params> thetas;
    for (std::size_t i = 0; i < n; ++i) thetas.push_back(sample_params(m, rng));
    const auto devs = parallel_map<double>(n, [&](std::size_t i) {
        return congruence_invariance_check(m.model, emb, {thetas[i]}, tol).max_deviation;
    });
    const double worst = devs.empty() ? 0.0 : *std::max_element(devs.begin(), devs.end());
    report = header("congruence-invariance", o,
                    {{"invariance", tol}, {"riesz_residual", kRieszResidualTolerance}, {"embedding_weights", 1e-12}});
    report["model"] = m.model.name;
    report["embedding"] = gaussian ? "bin-halving" : "random-partition";
    report["coarse_size"] = emb.coarse_size;
    report["fine_size"] = emb.fine_size();
    report["samples"] = n;
    report["deviations"] = devs;
    report["max_deviation"] = worst;
    report["pass"] = worst <= tol;
    return worst <= tol ? kExitPass : kExitFailure;
}

inline int cmd_omf_catalog(const Options& o, json& report) {
    const Index pairs = o.samples.value_or(100);
    report = header("omf-catalog", o, {{"normalization", 1e-12}, {"symmetry", 1e-10}, {"matrix_monotone", 1e-8}});
    json list = json::array();
    bool all = true;
    for (const auto& f : omf_catalog()) {
        const OmfCheckReport r = check_operator_monotone(f, o.seed, static_cast<int>(pairs));
        all = all && r.pass;
        list.push_back({{"name", f.name},
                        {"normalized", f.normalized},
                        {"symmetric", f.symmetric},
                        {"values", {{"0.25", f(0.25)}, {"1", f(1.0)}, {"4", f(4.0)}}},
                        {"normalization_error", r.normalization_error},
                        {"symmetry_error", r.symmetry_error},
                        {"grid_monotone", r.grid_monotone},
                        {"worst_matrix_gap", r.worst_matrix_gap},
                        {"pass", r.pass}});
    }
    report["functions"] = list;
    report["pass"] = all;
    return all ? kExitPass : kExitFailure;
}

// ---------------------------------------------------------------------------

inline void emit(const json& report, const std::string& path, std::ostream& out) {
    const std::string text = report.dump(2) + "\n";
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream f(path);
    if (!f) throw UsageError("cannot write '" + path + "'");
    f << text;
}

inline json error_report(const std::string& type, const std::string& message) {
    return json{{"schema", 1}, {"generated_at", utc_timestamp()}, {"error", {{"type", type}, {"message", message}}}};
}

inline int run_lab(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Finite-dimensional NCP category toolkit", "ncp-lab"};
    app.require_subcommand(1);
    Options o;
    auto common = [&](CLI::App* sc, bool samples = true) {
        sc->add_option("--seed", o.seed, "Seed for randomized checks");
        sc->add_option("--tol", o.tol, "Tolerance override");
        if (samples) sc->add_option("--samples", o.samples, "Number of random samples or trials");
        sc->add_option("--out", o.out, "Write the JSON report here instead of stdout");
    };

    auto* gns = app.add_subcommand("gns", "GNS space of a state");
    gns->add_option("--state", o.state_path, "State JSON file")->required();
    common(gns, false);

    auto* chk = app.add_subcommand("check-channel", "Complete positivity and unitality of a channel");
    chk->add_option("--channel", o.channel_path, "Channel JSON file")->required();
    common(chk, false);

    auto* mono = app.add_subcommand("monotonicity", "Monotonicity of a covariance under a morphism");
    mono->add_option("--morphism", o.morphism_path, "Morphism JSON file")->required();
    mono->add_option("--kind", o.kind, "gns, sld, kmb, wy, rld or one");
    common(mono);

    auto* pull = app.add_subcommand("pullback", "Metric pulled back from a covariance along a model");
    pull->add_option("--model", o.model, "simplex:n, qubit-faithful, qubit-pure, gaussian:bins[:xmin:xmax]")->required();
    pull->add_option("--theta", o.theta, "Comma-separated parameters")->required();
    pull->add_option("--kind", o.kind, "Covariance kind");
    pull->add_option("--derivatives", o.derivatives, "analytic or fd");
    pull->add_option("--fd-step", o.fd_step, "Central difference step");
    common(pull, false);

    auto* gauss = app.add_subcommand("gaussian-demo", "Discretized Gaussian model against Fisher-Rao");
    gauss->add_option("--bins", o.bins, "Number of bins");
    gauss->add_option("--mu", o.mu, "Mean");
    gauss->add_option("--sigma", o.sigma, "Standard deviation");
    gauss->add_option("--width", o.width, "Range half-width in units of sigma");
    gauss->add_option("--sweep", o.sweep, "Comma-separated bin counts for the convergence sweep ('' to skip)");
    common(gauss, false);

    auto* trac = app.add_subcommand("tracial-uniqueness", "Petz covariances collapse to GNS at tracial states");
    trac->add_option("--shapes", o.shapes, "Shapes, e.g. '2;1,1,1;2,3'");
    common(trac);

    auto* cong = app.add_subcommand("congruence-invariance", "Pullback metric under a random congruent embedding");
    cong->add_option("--model", o.model, "simplex:n or gaussian:bins[:xmin:xmax]")->required();
    common(cong);

    auto* omfc = app.add_subcommand("omf-catalog", "Operator monotone function catalog checks");
    common(omfc);

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitPass : kExitInput;
    }

    json report;
    int code = kExitPass;
    try {
        if (*gns) code = cmd_gns(o, report);
        else if (*chk) code = cmd_check_channel(o, report);
        else if (*mono) code = cmd_monotonicity(o, report);
        else if (*pull) code = cmd_pullback(o, report);
        else if (*gauss) code = cmd_gaussian_demo(o, report);
        else if (*trac) code = cmd_tracial(o, report);
        else if (*cong) code = cmd_congruence(o, report);
        else code = cmd_omf_catalog(o, report);
    } catch (const json::parse_error& e) {
        report = error_report("malformed_json", e.what());
        report["error"]["byte"] = e.byte;
        err << "ncp-lab: malformed JSON at byte " << e.byte << ": " << e.what() << "\n";
        code = kExitInput;
    } catch (const json::exception& e) {
        report = error_report("bad_json_value", e.what());
        err << "ncp-lab: " << e.what() << "\n";
        code = kExitInput;
    } catch (const WellDefinednessError& e) {
        report = error_report("well_definedness", e.what());
        report["error"]["deviation"] = e.deviation();
        err << "ncp-lab: " << e.what() << "\n";
        code = kExitFailure;
    } catch (const ScoreNotRepresentable& e) {
        report = error_report("score_not_representable", e.what());
        report["error"]["parameter"] = e.parameter();
        report["error"]["residual"] = e.residual();
        err << "ncp-lab: " << e.what() << "\n";
        code = kExitFailure;
    } catch (const Error& e) {
        report = error_report("input", e.what());
        err << "ncp-lab: " << e.what() << "\n";
        code = kExitInput;
    }
    try {
        emit(report, o.out, out);
    } catch (const Error& e) {
        err << "ncp-lab: " << e.what() << "\n";
        return kExitInput;
    }
    return code;
}

}  // namespace ncp::lab
