#include "reslab/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "reslab/error.hpp"

namespace reslab {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw Error(ErrorCode::ParseError, path + ": " + what);
}

const Json& field(const Json& j, const char* key, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) fail(path, std::string("missing field '") + key + "'");
    return *it;
}

double number(const Json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

std::string text(const Json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
}

const Json& array(const Json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array");
    return j;
}

std::vector<std::string> labels(const Json& j, const std::string& path) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < array(j, path).size(); ++i) out.push_back(text(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

std::vector<double> numbers(const Json& j, const std::string& path) {
    std::vector<double> out;
    for (std::size_t i = 0; i < array(j, path).size(); ++i) out.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

Json parse_text(const std::string& text_in) {
    try {
        return Json::parse(text_in);
    } catch (const nlohmann::json::parse_error& e) {
        // byte offset to line and column
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text_in.size(); ++i) {
            if (text_in[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        fail("line " + std::to_string(line) + ", column " + std::to_string(col), "malformed JSON");
    }
}

// Construction errors inside a field become parse errors carrying the path.
template <class F>
auto at_path(const std::string& path, F&& make) {
    try {
        return make();
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ParseError) throw;
        fail(path, e.what());
    }
}

}  // namespace

Json to_json(const ScalarConvex& w) {
    return std::visit(
        [](const auto& v) -> Json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, ScaledPower>)
                return {{"kind", "power"}, {"c", v.c}, {"p", v.p}};
            else if constexpr (std::is_same_v<T, CoshMinusOne>)
                return {{"kind", "cosh"}, {"c", v.c}};
            else
                return {{"kind", "capped"}, {"inner", to_json(*v.inner)}, {"cap", v.cap}};
        },
        w.variant());
}

ScalarConvex scalar_from_json(const Json& j, const std::string& path) {
    const std::string kind = text(field(j, "kind", path), path + ".kind");
    if (kind == "power") {
        const double c = number(field(j, "c", path), path + ".c");
        const double p = number(field(j, "p", path), path + ".p");
        return at_path(path, [&] { return ScalarConvex::power(c, p); });
    }
    if (kind == "cosh") {
        const double c = number(field(j, "c", path), path + ".c");
        return at_path(path, [&] { return ScalarConvex::cosh_minus_one(c); });
    }
    if (kind == "capped") {
        ScalarConvex inner = scalar_from_json(field(j, "inner", path), path + ".inner");
        const double cap = number(field(j, "cap", path), path + ".cap");
        return at_path(path, [&] { return ScalarConvex::capped(inner, cap); });
    }
    fail(path + ".kind", "unknown kind '" + kind + "'");
}

Json to_json(const NormalContraction& c) {
    return std::visit(
        [](const auto& v) -> Json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Identity>)
                return {{"kind", "identity"}};
            else if constexpr (std::is_same_v<T, Negate>)
                return {{"kind", "negate"}};
            else if constexpr (std::is_same_v<T, MinWith>)
                return {{"kind", "min"}, {"alpha", v.alpha}};
            else if constexpr (std::is_same_v<T, FoldAt>)
                return {{"kind", "fold"}, {"beta", v.beta}};
            else
                return {{"kind", "piecewise"}, {"breakpoints", v.breakpoints}, {"slopes", v.slopes}};
        },
        c.variant());
}

NormalContraction contraction_from_json(const Json& j, const std::string& path) {
    const std::string kind = text(field(j, "kind", path), path + ".kind");
    if (kind == "identity") return NormalContraction::identity();
    if (kind == "negate") return NormalContraction::negate();
    if (kind == "min") {
        const double a = number(field(j, "alpha", path), path + ".alpha");
        return at_path(path, [&] { return NormalContraction::min_with(a); });
    }
    if (kind == "fold") return NormalContraction::fold_at(number(field(j, "beta", path), path + ".beta"));
    if (kind == "piecewise") {
        auto bp = numbers(field(j, "breakpoints", path), path + ".breakpoints");
        auto sl = numbers(field(j, "slopes", path), path + ".slopes");
        return at_path(path, [&] { return NormalContraction::piecewise(bp, sl); });
    }
    fail(path + ".kind", "unknown kind '" + kind + "'");
}

Json to_json(const NetworkForm& form) {
    const FormSpec& s = form.spec();
    Json j;
    j["vertices"] = s.vertices;
    j["edges"] = Json::array();
    for (const auto& e : s.edges) j["edges"].push_back({{"u", e.u}, {"v", e.v}, {"w", to_json(e.w)}});
    j["hyperedges"] = Json::array();
    for (const auto& h : s.hyperedges) j["hyperedges"].push_back({{"vertices", h.vertices}, {"mu", h.mu}});
    j["linear_terms"] = Json::array();
    for (const auto& t : s.linear_terms) {
        Json coeffs = Json::array();
        for (const auto& [label, c] : t.coeffs) coeffs.push_back({label, c});
        j["linear_terms"].push_back({{"coeffs", coeffs}, {"w", to_json(t.w)}});
    }
    j["dirichlet"] = s.dirichlet;
    j["identify"] = Json::array();
    for (const auto& [a, b] : s.identify) j["identify"].push_back({a, b});
    if (s.boundary) {
        j["boundary"] = *s.boundary;
        j["dirichlet_after_boundary"] = s.dirichlet_after_boundary;
    }
    return j;
}

NetworkForm network_from_json(const Json& j) {
    if (!j.is_object()) fail("network", "expected an object");
    FormSpec spec;
    spec.vertices = labels(field(j, "vertices", "network"), "vertices");
    if (j.contains("edges")) {
        const Json& edges = array(j["edges"], "edges");
        for (std::size_t i = 0; i < edges.size(); ++i) {
            const std::string p = "edges[" + std::to_string(i) + "]";
            spec.edges.push_back({text(field(edges[i], "u", p), p + ".u"), text(field(edges[i], "v", p), p + ".v"),
                                  scalar_from_json(field(edges[i], "w", p), p + ".w")});
        }
    }
    if (j.contains("hyperedges")) {
        const Json& hs = array(j["hyperedges"], "hyperedges");
        for (std::size_t i = 0; i < hs.size(); ++i) {
            const std::string p = "hyperedges[" + std::to_string(i) + "]";
            spec.hyperedges.push_back(
                {labels(field(hs[i], "vertices", p), p + ".vertices"), number(field(hs[i], "mu", p), p + ".mu")});
        }
    }
    if (j.contains("linear_terms")) {
        const Json& ts = array(j["linear_terms"], "linear_terms");
        for (std::size_t i = 0; i < ts.size(); ++i) {
            const std::string p = "linear_terms[" + std::to_string(i) + "]";
            LinearTermSpec term{{}, scalar_from_json(field(ts[i], "w", p), p + ".w")};
            const Json& coeffs = field(ts[i], "coeffs", p);
            if (coeffs.is_object()) {
                for (const auto& [label, c] : coeffs.items()) term.coeffs.emplace_back(label, number(c, p + ".coeffs." + label));
            } else {
                const Json& list = array(coeffs, p + ".coeffs");
                for (std::size_t k = 0; k < list.size(); ++k) {
                    const std::string q = p + ".coeffs[" + std::to_string(k) + "]";
                    if (!list[k].is_array() || list[k].size() != 2) fail(q, "expected [label, coefficient]");
                    term.coeffs.emplace_back(text(list[k][0], q + "[0]"), number(list[k][1], q + "[1]"));
                }
            }
            spec.linear_terms.push_back(std::move(term));
        }
    }
    if (j.contains("dirichlet")) spec.dirichlet = labels(j["dirichlet"], "dirichlet");
    if (j.contains("identify")) {
        const Json& ids = array(j["identify"], "identify");
        for (std::size_t i = 0; i < ids.size(); ++i) {
            const std::string p = "identify[" + std::to_string(i) + "]";
            const auto pair = labels(ids[i], p);
            if (pair.size() != 2) fail(p, "expected two labels");
            spec.identify.emplace_back(pair[0], pair[1]);
        }
    }
    if (j.contains("boundary")) {
        const Json& b = j["boundary"];
        if (b.is_boolean()) {
            if (b.get<bool>()) {
                std::string label = "Delta";
                while (std::find(spec.vertices.begin(), spec.vertices.end(), label) != spec.vertices.end()) label += "'";
                spec.boundary = label;
            }
        } else {
            spec.boundary = text(b, "boundary");
        }
    }
    if (j.contains("dirichlet_after_boundary")) {
        spec.dirichlet_after_boundary = labels(j["dirichlet_after_boundary"], "dirichlet_after_boundary");
        if (!spec.dirichlet_after_boundary.empty() && !spec.boundary)
            fail("dirichlet_after_boundary", "requires a boundary point");
    }
    return NetworkForm(std::move(spec));
}

NetworkForm parse_network(const std::string& text_in) { return network_from_json(parse_text(text_in)); }

NetworkForm load_network(const std::string& path) { return parse_network(read_file(path)); }

VertexVector parse_vector(const NetworkForm& form, const std::string& text_in) {
    const Json j = parse_text(text_in);
    if (!j.is_object()) fail("vector", "expected an object of label: value");
    std::map<std::string, double> values;
    for (const auto& [label, v] : j.items()) values[label] = number(v, "vector." + label);
    for (const auto& [label, v] : values) form.vertex_index(label);
    return form.vector_from_labels(values);
}

VertexVector load_vector(const NetworkForm& form, const std::string& path) {
    return parse_vector(form, read_file(path));
}

std::string format_real(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    if (v == 0.0) v = 0.0;  // no "-0"
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    std::string s(buf);
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

std::string format_value(ExtNonNeg v) { return format_real(v.to_double()); }

Json value_to_json(ExtNonNeg v) {
    if (v.is_infinite()) return Json{{"inf", true}};
    return v.to_double();
}

Json value_to_json(double v) {
    if (std::isinf(v)) return v > 0 ? Json{{"inf", true}} : Json{{"inf", true}, {"negative", true}};
    return v;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace reslab
