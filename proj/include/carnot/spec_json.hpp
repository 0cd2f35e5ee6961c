#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "carnot/annihilator.hpp"
#include "carnot/symbol.hpp"
#include "carnot/version.hpp"

namespace carnot {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// Group and operator blocks. Rationals travel as "p/q" strings and word
// letters are 1-based on the wire.
// ---------------------------------------------------------------------------

inline AlgebraPtr parse_group_json(const Json& j) {
    if (!j.is_object()) throw SpecError("group block must be an object");
    if (j.contains("custom")) {
        const Json& c = j.at("custom");
        if (!c.contains("layer_dims") || !c.at("layer_dims").is_array())
            throw SpecError("custom group needs a layer_dims array");
        std::vector<int> dims;
        for (const auto& d : c.at("layer_dims")) dims.push_back(d.get<int>());
        std::vector<std::tuple<int, int, std::vector<Rat>>> raw;
        if (c.contains("brackets")) {
            for (const auto& b : c.at("brackets")) {
                if (!b.is_array() || b.size() != 3)
                    throw SpecError("custom bracket entries are [a, b, [coeff strings]]");
                std::vector<Rat> coeffs;
                for (const auto& s : b.at(2)) coeffs.push_back(parse_rat(s.get<std::string>()));
                raw.emplace_back(b.at(0).get<int>(), b.at(1).get<int>(), std::move(coeffs));
            }
        }
        return make_custom(dims, raw);
    }
    if (!j.contains("preset")) throw SpecError("group block needs 'preset' or 'custom'");
    const std::string preset = j.at("preset").get<std::string>();
    if (preset == "heisenberg") return make_heisenberg(j.value("n", 1));
    if (preset == "abelian") return make_abelian(j.value("n", 1));
    if (preset == "free") {
        if (!j.contains("m") || !j.contains("r")) throw SpecError("free preset needs m and r");
        return make_free_nilpotent(j.at("m").get<int>(), j.at("r").get<int>());
    }
    throw SpecError("unknown group preset '" + preset + "'");
}

// "heisenberg:1", "abelian:3", "free:2,3"
inline AlgebraPtr parse_group_string(const std::string& s) {
    const auto colon = s.find(':');
    const std::string name = s.substr(0, colon);
    std::vector<int> params;
    if (colon != std::string::npos) {
        std::string rest = s.substr(colon + 1);
        size_t pos = 0;
        while (pos < rest.size()) {
            size_t comma = rest.find(',', pos);
            if (comma == std::string::npos) comma = rest.size();
            try {
                params.push_back(std::stoi(rest.substr(pos, comma - pos)));
            } catch (...) {
                throw SpecError("bad group parameter in '" + s + "'");
            }
            pos = comma + 1;
        }
    }
    if (name == "heisenberg") return make_heisenberg(params.empty() ? 1 : params[0]);
    if (name == "abelian") return make_abelian(params.empty() ? 1 : params[0]);
    if (name == "free") {
        if (params.size() != 2) throw SpecError("free group descriptor is free:m,r");
        return make_free_nilpotent(params[0], params[1]);
    }
    throw SpecError("unknown group descriptor '" + s + "' (heisenberg:n, abelian:n, free:m,r)");
}

inline OperatorMatrix parse_operator_json(const Json& j, const AlgebraPtr& alg) {
    if (!j.is_object()) throw SpecError("operator block must be an object");
    for (const char* field : {"order", "dimV", "dimE", "terms"})
        if (!j.contains(field)) throw SpecError(std::string("operator block needs '") + field + "'");
    const int order = j.at("order").get<int>();
    const int dim_v = j.at("dimV").get<int>();
    const int dim_e = j.at("dimE").get<int>();
    if (order < 0 || dim_v < 1 || dim_e < 1) throw SpecError("operator dimensions out of range");
    OperatorMatrix a(alg, dim_v, dim_e, order);
    for (const auto& t : j.at("terms")) {
        if (!t.contains("word") || !t.contains("matrix"))
            throw SpecError("operator term needs 'word' and 'matrix'");
        Word w;
        for (const auto& l : t.at("word")) {
            const int letter = l.get<int>();
            if (letter < 1 || letter > alg->m)
                throw SpecError("word letter " + std::to_string(letter) + " outside 1.." +
                                std::to_string(alg->m));
            w.letters.push_back(static_cast<uint8_t>(letter - 1));
        }
        const Json& rows = t.at("matrix");
        if (static_cast<int>(rows.size()) != dim_e)
            throw SpecError("term matrix must have dimE rows");
        RatMatrix mat(dim_e, dim_v);
        for (int r = 0; r < dim_e; ++r) {
            if (static_cast<int>(rows.at(r).size()) != dim_v)
                throw SpecError("term matrix must have dimV columns");
            for (int c = 0; c < dim_v; ++c)
                mat.at(r, c) = parse_rat(rows.at(r).at(c).get<std::string>());
        }
        a.add_term(w, mat);
    }
    return a;
}

struct SpecDocument {
    AlgebraPtr alg;
    std::optional<OperatorMatrix> op;          // "operator"
    std::optional<OperatorMatrix> annihilator; // "annihilator" (for compose-zero)
};

inline SpecDocument parse_spec_document(const Json& j) {
    if (!j.is_object()) throw SpecError("spec document must be a JSON object");
    if (!j.contains("group")) throw SpecError("spec document needs a 'group' block");
    SpecDocument doc;
    doc.alg = parse_group_json(j.at("group"));
    if (j.contains("operator")) doc.op = parse_operator_json(j.at("operator"), doc.alg);
    if (j.contains("annihilator")) doc.annihilator = parse_operator_json(j.at("annihilator"), doc.alg);
    return doc;
}

// ---------------------------------------------------------------------------
// Serialization (reports). nlohmann::json keeps keys sorted, so identical
// data serializes to identical bytes.
// ---------------------------------------------------------------------------

inline Json matrix_to_json(const RatMatrix& m) {
    Json rows = Json::array();
    for (int r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (int c = 0; c < m.cols(); ++c) row.push_back(rat_str(m.at(r, c)));
        rows.push_back(row);
    }
    return rows;
}

inline Json operator_to_json(const OperatorMatrix& a) {
    Json terms = Json::array();
    for (const auto& [w, mat] : a.terms) {
        Json word = Json::array();
        for (uint8_t l : w.letters) word.push_back(static_cast<int>(l) + 1);
        terms.push_back(Json{{"word", word}, {"matrix", matrix_to_json(mat)}});
    }
    return Json{{"order", a.order}, {"dimV", a.dim_in}, {"dimE", a.dim_out}, {"terms", terms}};
}

inline Json group_info_json(const GradedLieAlgebra& g) {
    Json brackets = Json::array();
    for (int a = 0; a < g.dim; ++a)
        for (int b = a + 1; b < g.dim; ++b) {
            if (g.brackets[static_cast<size_t>(a)][static_cast<size_t>(b)].empty()) continue;
            Json coeffs = Json::array();
            for (const auto& [k, c] : g.brackets[static_cast<size_t>(a)][static_cast<size_t>(b)])
                coeffs.push_back(Json{{"basis", k + 1}, {"coeff", rat_str(c)}});
            brackets.push_back(Json{{"a", a + 1}, {"b", b + 1}, {"value", coeffs}});
        }
    return Json{{"preset", g.preset},
                {"layer_dims", g.layer_dims},
                {"m", g.m},
                {"step", g.step},
                {"Q", g.Q},
                {"dim", g.dim},
                {"basis_convention", g.basis_convention},
                {"basis_names", g.basis_names},
                {"brackets", brackets}};
}

inline Json cocanceling_to_json(const CocancelingVerdict& v) {
    Json j{{"cocanceling", v.cocanceling}};
    if (!v.cocanceling) j["common_kernel_basis"] = matrix_to_json(v.common_kernel);
    return j;
}

inline Json certificate_to_json(const AnnihilatorCertificate& c) {
    return Json{{"provenance", c.provenance},
                {"annihilator", operator_to_json(c.L)},
                {"operator", operator_to_json(c.A)},
                {"composition_residual_zero", c.residual_zero()},
                {"cocanceling", cocanceling_to_json(c.cocancel)},
                {"valid", c.valid()}};
}

// Common envelope: every run report carries the tool version, the seed and
// the basis convention the certificate words refer to.
inline Json report_envelope(const std::string& task, const GradedLieAlgebra& g, uint64_t seed) {
    return Json{{"task", task},
                {"tool", kToolName},
                {"tool_version", kToolVersion},
                {"seed", seed},
                {"group", group_info_json(g)}};
}

} // namespace carnot
