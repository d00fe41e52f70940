#pragma once

// JSON encodings of shapes, elements, states, channels and morphisms.
//
//   shape    {"blocks":[n1,...]}
//   complex  {"re":x,"im":y}  (a bare number is accepted on input)
//   matrix   [[complex,...],...]  row-major
//   element  {"blocks":[matrix,...]}
//   state    {"shape":shape,"densities":[matrix,...]}  or  {"prob":[p1,...]}
//   channel  {"source":shape,"target":shape,"kraus":[matrix,...]}
//            {"source":shape,"target":shape,"linear":matrix}
//            {"stochastic":[[...],...]}  (real, column-stochastic)

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "covariance.hpp"

namespace ncp::io {

using json = nlohmann::json;

class FormatError : public Error {
public:
    using Error::Error;
};

inline json to_json(cplx z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

inline cplx complex_from_json(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_object() && j.contains("re")) return {j.at("re").get<double>(), j.value("im", 0.0)};
    throw FormatError("expected a complex number ({\"re\":..,\"im\":..} or a number), got " + j.dump());
}

inline json to_json(const CMatrix& m) {
    json rows = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline json to_json(const RMatrix& m) {
    json rows = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline json to_json(const RVector& v) {
    json a = json::array();
    for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

inline CMatrix cmatrix_from_json(const json& j) {
    if (!j.is_array()) throw FormatError("expected a matrix (array of rows)");
    const Index rows = static_cast<Index>(j.size());
    const Index cols = rows ? static_cast<Index>(j.at(0).size()) : 0;
    CMatrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        const json& row = j.at(static_cast<std::size_t>(i));
        if (!row.is_array() || static_cast<Index>(row.size()) != cols) throw FormatError("ragged matrix row " + std::to_string(i));
        for (Index c = 0; c < cols; ++c) m(i, c) = complex_from_json(row.at(static_cast<std::size_t>(c)));
    }
    return m;
}

inline RMatrix rmatrix_from_json(const json& j) {
    if (!j.is_array()) throw FormatError("expected a real matrix (array of rows)");
    const Index rows = static_cast<Index>(j.size());
    const Index cols = rows ? static_cast<Index>(j.at(0).size()) : 0;
    RMatrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        const json& row = j.at(static_cast<std::size_t>(i));
        if (!row.is_array() || static_cast<Index>(row.size()) != cols) throw FormatError("ragged matrix row " + std::to_string(i));
        for (Index c = 0; c < cols; ++c) m(i, c) = row.at(static_cast<std::size_t>(c)).get<double>();
    }
    return m;
}

inline json to_json(const AlgebraShape& s) { return json{{"blocks", s.blocks()}}; }

inline AlgebraShape shape_from_json(const json& j) {
    if (!j.is_object() || !j.contains("blocks")) throw FormatError("shape must be {\"blocks\":[...]}");
    return AlgebraShape(j.at("blocks").get<std::vector<Index>>());
}

inline json to_json(const AlgebraElement& a) {
    json blocks = json::array();
    for (const auto& b : a.blocks()) blocks.push_back(to_json(b));
    return json{{"blocks", blocks}};
}

/// The shape is read off the block sizes.
inline AlgebraElement element_from_json(const json& j) {
    if (!j.is_object() || !j.contains("blocks")) throw FormatError("element must be {\"blocks\":[...]}");
    std::vector<CMatrix> blocks;
    std::vector<Index> dims;
    for (const auto& b : j.at("blocks")) {
        blocks.push_back(cmatrix_from_json(b));
        dims.push_back(blocks.back().rows());
    }
    return {AlgebraShape(dims), std::move(blocks)};
}

inline json to_json(const NormalState& s) {
    json d = json::array();
    for (const auto& m : s.densities()) d.push_back(to_json(m));
    return json{{"shape", to_json(s.shape())}, {"densities", d}};
}

inline NormalState state_from_json(const json& j) {
    if (j.is_object() && j.contains("prob")) return from_probabilities(j.at("prob").get<std::vector<double>>());
    if (!j.is_object() || !j.contains("shape") || !j.contains("densities")) {
        throw FormatError("state must be {\"shape\":..,\"densities\":[..]} or {\"prob\":[..]}");
    }
    std::vector<CMatrix> d;
    for (const auto& m : j.at("densities")) d.push_back(cmatrix_from_json(m));
    return mk_state(shape_from_json(j.at("shape")), std::move(d));
}

/// A channel as an unverified linear map; callers decide what to check.
inline LinearMap channel_from_json(const json& j) {
    if (!j.is_object()) throw FormatError("channel must be a JSON object");
    if (j.contains("stochastic")) {
        const RMatrix s = rmatrix_from_json(j.at("stochastic"));
        return {AlgebraShape::abelian(s.rows()), AlgebraShape::abelian(s.cols()),
                SparseC(s.transpose().cast<cplx>().sparseView())};
    }
    if (!j.contains("source") || !j.contains("target")) throw FormatError("channel needs \"source\" and \"target\" shapes");
    const AlgebraShape src = shape_from_json(j.at("source"));
    const AlgebraShape dst = shape_from_json(j.at("target"));
    if (j.contains("kraus")) {
        std::vector<CMatrix> k;
        for (const auto& m : j.at("kraus")) k.push_back(cmatrix_from_json(m));
        return kraus_linear(src, dst, k);
    }
    if (j.contains("linear")) {
        const CMatrix a = cmatrix_from_json(j.at("linear"));
        return {src, dst, SparseC(a.sparseView())};
    }
    throw FormatError("channel needs one of \"kraus\", \"linear\", \"stochastic\"");
}

inline json channel_to_json(const LinearMap& m) {
    return json{{"source", to_json(m.source_shape())},
                {"target", to_json(m.target_shape())},
                {"linear", to_json(CMatrix(m.action()))}};
}

/// Morphism file: {"source_state": state on A, "target_state": state on B
/// (optional; defaults to the predual), "channel": channel B -> A,
/// "gram_overrides": {"rho": matrix, "sigma": matrix} (optional, testing)}.
struct MorphismSpec {
    NcpMorphism morphism;
    std::optional<CMatrix> gram_rho;
    std::optional<CMatrix> gram_sigma;
};

inline MorphismSpec morphism_from_json(const json& j, double tol = 1e-9) {
    if (!j.is_object() || !j.contains("source_state") || !j.contains("channel")) {
        throw FormatError("morphism needs \"source_state\" and \"channel\"");
    }
    const NormalState rho = state_from_json(j.at("source_state"));
    const CpuMap phi = CpuMap::verify(channel_from_json(j.at("channel")));
    const NormalState sigma = j.contains("target_state") ? state_from_json(j.at("target_state")) : predual(phi, rho);
    MorphismSpec spec{mk_morphism(rho, sigma, phi, tol), std::nullopt, std::nullopt};
    if (j.contains("gram_overrides")) {
        const json& g = j.at("gram_overrides");
        if (g.contains("rho")) spec.gram_rho = cmatrix_from_json(g.at("rho"));
        if (g.contains("sigma")) spec.gram_sigma = cmatrix_from_json(g.at("sigma"));
    }
    return spec;
}

inline json morphism_to_json(const NcpMorphism& m) {
    return json{{"source_state", to_json(m.source())},
                {"target_state", to_json(m.target())},
                {"channel", channel_to_json(m.cpu().linear())}};
}

}  // namespace ncp::io
