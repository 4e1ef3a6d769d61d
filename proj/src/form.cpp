#include "reslab/form.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "reslab/error.hpp"
#include "union_find.hpp"

namespace reslab {

namespace {

std::vector<int> unique_sorted(std::vector<int> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

}  // namespace

NetworkForm::NetworkForm(FormSpec spec) : spec_(std::move(spec)) {
    labels_ = spec_.vertices;
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (!index_.emplace(labels_[i], static_cast<int>(i)).second)
            throw Error(ErrorCode::ConstructionError, "duplicate vertex label '" + labels_[i] + "'");
    }
    const std::size_t n_base = labels_.size();
    auto base_index = [&](const std::string& label) {
        auto it = index_.find(label);
        if (it == index_.end()) throw Error(ErrorCode::UnknownVertex, "'" + label + "'");
        return it->second;
    };

    if (spec_.boundary) {
        if (index_.count(*spec_.boundary))
            throw Error(ErrorCode::ConstructionError, "boundary label collides with a vertex");
        index_.emplace(*spec_.boundary, static_cast<int>(n_base));
        labels_.push_back(*spec_.boundary);
    }

    detail::UnionFind uf(labels_.size());
    for (const auto& [a, b] : spec_.identify) uf.unite(base_index(a), base_index(b));

    class_of_vertex_.assign(labels_.size(), -1);
    std::vector<int> class_of_root(labels_.size(), -1);
    for (std::size_t v = 0; v < labels_.size(); ++v) {
        const int root = uf.find(static_cast<int>(v));
        if (class_of_root[root] < 0) {
            class_of_root[root] = static_cast<int>(num_classes_++);
            class_labels_.push_back(labels_[v]);
        }
        class_of_vertex_[v] = class_of_root[root];
    }
    if (spec_.boundary) boundary_class_ = class_of_vertex_[n_base];

    for (const auto& e : spec_.edges) {
        const int u = base_index(e.u), v = base_index(e.v);
        if (u == v) throw Error(ErrorCode::SelfLoop, "edge at '" + e.u + "'");
        edges_.push_back({class_of_vertex_[u], class_of_vertex_[v], e.w});
    }
    for (const auto& h : spec_.hyperedges) {
        if (!(h.mu >= 0.0) || !std::isfinite(h.mu))
            throw Error(ErrorCode::ConstructionError, "hyperedge weight must be finite and >= 0");
        std::set<std::string> distinct(h.vertices.begin(), h.vertices.end());
        if (distinct.size() < 2) throw Error(ErrorCode::SingletonHyperedge, "hyperedge needs two vertices");
        std::vector<int> classes;
        for (const auto& label : h.vertices) classes.push_back(class_of_vertex_[base_index(label)]);
        hyperedges_.push_back({unique_sorted(std::move(classes)), h.mu});
    }
    for (const auto& t : spec_.linear_terms) {
        std::map<int, double> merged;
        for (const auto& [label, coeff] : t.coeffs) merged[class_of_vertex_[base_index(label)]] += coeff;
        LinearTerm term{{}, t.w};
        for (const auto& [c, coeff] : merged)
            if (coeff != 0.0) term.coeffs.emplace_back(c, coeff);
        linear_terms_.push_back(std::move(term));
    }
    std::vector<int> dir;
    for (const auto& label : spec_.dirichlet) dir.push_back(class_of_vertex_[base_index(label)]);
    dirichlet_classes_ = unique_sorted(std::move(dir));
    dir.clear();
    for (const auto& label : spec_.dirichlet_after_boundary) dir.push_back(class_of(label));
    post_dirichlet_classes_ = unique_sorted(std::move(dir));
}

bool NetworkForm::has_vertex(std::string_view label) const { return index_.count(std::string(label)) > 0; }

int NetworkForm::vertex_index(std::string_view label) const {
    auto it = index_.find(std::string(label));
    if (it == index_.end()) throw Error(ErrorCode::UnknownVertex, "'" + std::string(label) + "'");
    return it->second;
}

int NetworkForm::class_of(std::string_view label) const { return class_of_vertex_[vertex_index(label)]; }

bool NetworkForm::kernel_contains_constants() const {
    if (!dirichlet_classes_.empty() || !post_dirichlet_classes_.empty()) return false;
    for (const auto& t : linear_terms_) {
        double sum = 0.0;
        for (const auto& [c, coeff] : t.coeffs) sum += coeff;
        if (sum != 0.0 && !t.w.is_identically_zero()) return false;
    }
    return true;
}

void NetworkForm::check_dimension(const VertexVector& f) const {
    if (static_cast<std::size_t>(f.size()) != num_classes_)
        throw Error(ErrorCode::DimensionMismatch, "vector has " + std::to_string(f.size()) + " entries, form has " +
                                                      std::to_string(num_classes_) + " coordinate classes");
}

VertexVector NetworkForm::shifted(const VertexVector& f) const {
    if (!boundary_class_) return f;
    VertexVector g = f.array() - f[*boundary_class_];
    g[*boundary_class_] = 0.0;
    return g;
}

ExtNonNeg NetworkForm::evaluate(const VertexVector& f) const {
    check_dimension(f);
    for (int c : post_dirichlet_classes_)
        if (f[c] != 0.0) return ExtNonNeg::infinity();
    const VertexVector g = shifted(f);
    for (int c : dirichlet_classes_)
        if (g[c] != 0.0) return ExtNonNeg::infinity();

    ExtNonNeg total = ExtNonNeg::zero();
    for (const auto& e : edges_) total += e.w(g[e.cu] - g[e.cv]);
    for (const auto& h : hyperedges_) {
        double hi = g[h.classes.front()], lo = hi;
        for (int c : h.classes) {
            hi = std::max(hi, g[c]);
            lo = std::min(lo, g[c]);
        }
        total += ExtNonNeg::finite(h.mu * (hi - lo) * (hi - lo));
    }
    for (const auto& t : linear_terms_) {
        double arg = 0.0;
        for (const auto& [c, coeff] : t.coeffs) arg += coeff * g[c];
        total += t.w(arg);
    }
    return total;
}

namespace {

// 0 when it is a valid selection, otherwise the nearest endpoint
double select(const Interval& iv) {
    if (iv.lo <= 0.0 && 0.0 <= iv.hi) return 0.0;
    return iv.lo > 0.0 ? iv.lo : iv.hi;
}

}  // namespace

VertexVector NetworkForm::subgradient(const VertexVector& f) const {
    check_dimension(f);
    if (evaluate(f).is_infinite()) throw Error(ErrorCode::InfiniteEnergy, "subgradient of an infinite value");
    const VertexVector g = shifted(f);
    VertexVector grad = VertexVector::Zero(g.size());
    for (const auto& e : edges_) {
        const double s = select(e.w.subdifferential(g[e.cu] - g[e.cv]));
        grad[e.cu] += s;
        grad[e.cv] -= s;
    }
    for (const auto& h : hyperedges_) {
        int arg_hi = h.classes.front(), arg_lo = arg_hi;
        for (int c : h.classes) {
            if (g[c] > g[arg_hi]) arg_hi = c;
            if (g[c] < g[arg_lo]) arg_lo = c;
        }
        const double s = 2.0 * h.mu * (g[arg_hi] - g[arg_lo]);
        grad[arg_hi] += s;
        grad[arg_lo] -= s;
    }
    for (const auto& t : linear_terms_) {
        double arg = 0.0;
        for (const auto& [c, coeff] : t.coeffs) arg += coeff * g[c];
        const double s = select(t.w.subdifferential(arg));
        for (const auto& [c, coeff] : t.coeffs) grad[c] += s * coeff;
    }
    if (boundary_class_) {
        const int b = *boundary_class_;
        grad[b] = 0.0;
        grad[b] = -grad.sum();
    }
    return grad;
}

VertexVector NetworkForm::vector_from_labels(const std::map<std::string, double>& values) const {
    VertexVector f = zero_vector();
    std::vector<bool> seen(num_classes_, false);
    for (const auto& [label, value] : values) {
        const int c = class_of(label);
        if (seen[c] && f[c] != value)
            throw Error(ErrorCode::DimensionMismatch, "identified vertices given different values at '" + label + "'");
        f[c] = value;
        seen[c] = true;
    }
    for (std::size_t c = 0; c < num_classes_; ++c)
        if (!seen[c]) throw Error(ErrorCode::DimensionMismatch, "no value for class of '" + class_labels_[c] + "'");
    return f;
}

VertexVector NetworkForm::delta(std::string_view label) const {
    VertexVector d = zero_vector();
    d[class_of(label)] = 1.0;
    return d;
}

NetworkForm build_graph_form(std::vector<std::string> vertices, std::vector<EdgeSpec> edges) {
    FormSpec spec;
    spec.vertices = std::move(vertices);
    spec.edges = std::move(edges);
    return NetworkForm(std::move(spec));
}

NetworkForm build_hypergraph_form(std::vector<std::string> vertices, std::vector<HyperedgeSpec> hyperedges) {
    FormSpec spec;
    spec.vertices = std::move(vertices);
    spec.hyperedges = std::move(hyperedges);
    return NetworkForm(std::move(spec));
}

NetworkForm restrict_dirichlet(const NetworkForm& form, const std::vector<std::string>& F) {
    FormSpec spec = form.spec();
    for (const auto& label : F) {
        form.vertex_index(label);
        if (form.boundary_class())
            spec.dirichlet_after_boundary.push_back(label);
        else
            spec.dirichlet.push_back(label);
    }
    return NetworkForm(std::move(spec));
}

NetworkForm adjoin_boundary_point(const NetworkForm& form, const std::string& label) {
    if (form.boundary_class()) throw Error(ErrorCode::BoundaryAlreadyPresent, "form already has a boundary point");
    FormSpec spec = form.spec();
    std::string b = label;
    while (form.has_vertex(b)) b += "'";
    spec.boundary = b;
    return NetworkForm(std::move(spec));
}

std::string union_label(const NetworkForm& first, const NetworkForm& second, std::string_view label) {
    std::string out(label);
    if (!first.has_vertex(out)) return out;
    do {
        out += "'";
    } while (first.has_vertex(out) || second.has_vertex(out));
    return out;
}

namespace {

void require_series_operand(const NetworkForm& form) {
    if (!form.dirichlet_classes().empty() || !form.post_dirichlet_classes().empty())
        throw Error(ErrorCode::DirichletOperand, "series composition of a form with Dirichlet conditions");
    if (form.boundary_class())
        throw Error(ErrorCode::DirichletOperand, "series composition of a form with a boundary point");
}

FormSpec disjoint_union(const NetworkForm& first, const NetworkForm& second) {
    require_series_operand(first);
    require_series_operand(second);
    auto rl = [&](const std::string& l) { return union_label(first, second, l); };
    FormSpec spec = first.spec();
    const FormSpec& s2 = second.spec();
    for (const auto& v : s2.vertices) spec.vertices.push_back(rl(v));
    for (const auto& e : s2.edges) spec.edges.push_back({rl(e.u), rl(e.v), e.w});
    for (const auto& h : s2.hyperedges) {
        HyperedgeSpec copy{{}, h.mu};
        for (const auto& v : h.vertices) copy.vertices.push_back(rl(v));
        spec.hyperedges.push_back(std::move(copy));
    }
    for (const auto& t : s2.linear_terms) {
        LinearTermSpec copy{{}, t.w};
        for (const auto& [v, c] : t.coeffs) copy.coeffs.emplace_back(rl(v), c);
        spec.linear_terms.push_back(std::move(copy));
    }
    for (const auto& [a, b] : s2.identify) spec.identify.emplace_back(rl(a), rl(b));
    return spec;
}

}  // namespace

NetworkForm series_identify(const NetworkForm& first, std::string_view xi1, const NetworkForm& second,
                            std::string_view xi2) {
    first.vertex_index(xi1);
    second.vertex_index(xi2);
    FormSpec spec = disjoint_union(first, second);
    spec.identify.emplace_back(std::string(xi1), union_label(first, second, xi2));
    return NetworkForm(std::move(spec));
}

NetworkForm series_resistor(const NetworkForm& first, std::string_view xi1, const NetworkForm& second,
                            std::string_view xi2, double eps) {
    if (!(eps > 0.0)) throw Error(ErrorCode::NonPositiveEpsilon, "connector needs eps > 0");
    first.vertex_index(xi1);
    second.vertex_index(xi2);
    FormSpec spec = disjoint_union(first, second);
    // t^2 / (4 eps) = (c/2) t^2 with c = 1 / (2 eps)
    spec.edges.push_back({std::string(xi1), union_label(first, second, xi2), ScalarConvex::power(0.5 / eps, 2.0)});
    return NetworkForm(std::move(spec));
}

std::vector<std::vector<std::string>> connectivity_report(const NetworkForm& form) {
    const auto& spec = form.spec();
    detail::UnionFind uf(form.num_vertices());
    for (const auto& [a, b] : spec.identify) uf.unite(form.vertex_index(a), form.vertex_index(b));
    for (const auto& e : spec.edges)
        if (!e.w.is_identically_zero()) uf.unite(form.vertex_index(e.u), form.vertex_index(e.v));
    for (const auto& h : spec.hyperedges) {
        if (h.mu <= 0.0) continue;
        for (const auto& v : h.vertices) uf.unite(form.vertex_index(h.vertices.front()), form.vertex_index(v));
    }
    for (const auto& t : spec.linear_terms) {
        if (t.w.is_identically_zero()) continue;
        int anchor = -1;
        for (const auto& [v, c] : t.coeffs) {
            if (c == 0.0) continue;
            if (anchor < 0)
                anchor = form.vertex_index(v);
            else
                uf.unite(anchor, form.vertex_index(v));
        }
    }

    std::vector<std::vector<std::string>> out;
    std::map<int, std::size_t> slot;
    for (std::size_t v = 0; v < form.num_vertices(); ++v) {
        const int root = uf.find(static_cast<int>(v));
        auto [it, fresh] = slot.emplace(root, out.size());
        if (fresh) out.emplace_back();
        out[it->second].push_back(form.labels()[v]);
    }
    return out;
}

}  // namespace reslab
