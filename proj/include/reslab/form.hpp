#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "reslab/convex.hpp"
#include "reslab/ext_real.hpp"

namespace reslab {

/// A function on the coordinate classes of a form (identified vertices share
/// one coordinate). Also used for dual vectors phi in the pairing (phi, f).
using VertexVector = Eigen::VectorXd;
using DualVector = Eigen::VectorXd;

struct EdgeSpec {
    std::string u;
    std::string v;
    ScalarConvex w;
};

/// Contributes mu * (max_K f - min_K f)^2.
struct HyperedgeSpec {
    std::vector<std::string> vertices;
    double mu = 0.0;
};

/// Contributes w(sum_i coeff_i f(x_i)). Terms whose coefficients do not sum to
/// zero break shift invariance; they exist for negative controls.
struct LinearTermSpec {
    std::vector<std::pair<std::string, double>> coeffs;
    ScalarConvex w;
};

/// Plain description of a form. NetworkForm validates and indexes it.
struct FormSpec {
    std::vector<std::string> vertices;
    std::vector<EdgeSpec> edges;
    std::vector<HyperedgeSpec> hyperedges;
    std::vector<LinearTermSpec> linear_terms;
    /// f == 0 required here (evaluated after the boundary shift, if any).
    std::vector<std::string> dirichlet;
    std::vector<std::pair<std::string, std::string>> identify;
    /// Label of the adjoined boundary point, if any. Not part of `vertices`.
    std::optional<std::string> boundary;
    /// f == 0 required here on the raw vector (restriction applied after the
    /// boundary point was adjoined). May contain the boundary label.
    std::vector<std::string> dirichlet_after_boundary;
};

/// Convex functional E on functions over a finite vertex set, assembled from
/// edge, hyperedge and linear terms, with optional Dirichlet conditions,
/// vertex identifications and a boundary point. Immutable.
class NetworkForm {
public:
    struct Edge {
        int cu;
        int cv;
        ScalarConvex w;
    };
    struct Hyperedge {
        std::vector<int> classes;
        double mu;
    };
    struct LinearTerm {
        std::vector<std::pair<int, double>> coeffs;
        ScalarConvex w;
    };

    explicit NetworkForm(FormSpec spec);

    const FormSpec& spec() const { return spec_; }

    /// All vertex labels, the boundary label last when present.
    const std::vector<std::string>& labels() const { return labels_; }
    std::size_t num_vertices() const { return labels_.size(); }
    std::size_t num_classes() const { return num_classes_; }

    bool has_vertex(std::string_view label) const;
    int vertex_index(std::string_view label) const;
    int class_of(std::string_view label) const;
    int class_of_vertex(int vertex) const { return class_of_vertex_[vertex]; }
    /// First-listed vertex of each class.
    const std::vector<std::string>& class_labels() const { return class_labels_; }

    std::optional<int> boundary_class() const { return boundary_class_; }
    const std::vector<int>& dirichlet_classes() const { return dirichlet_classes_; }
    const std::vector<int>& post_dirichlet_classes() const { return post_dirichlet_classes_; }

    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<Hyperedge>& hyperedges() const { return hyperedges_; }
    const std::vector<LinearTerm>& linear_terms() const { return linear_terms_; }

    /// True when E(f + K) = E(f) for every constant K: no Dirichlet conditions
    /// and only difference-type terms.
    bool kernel_contains_constants() const;

    ExtNonNeg evaluate(const VertexVector& f) const;

    /// One element of the subdifferential. Throws InfiniteEnergy when E(f) is
    /// infinite and DomainBoundary when a capped edge sits on its cap.
    VertexVector subgradient(const VertexVector& f) const;

    /// Class vector from label values. Every class must be covered and
    /// identified labels must agree.
    VertexVector vector_from_labels(const std::map<std::string, double>& values) const;

    /// One-hot class vector delta_x.
    VertexVector delta(std::string_view label) const;

    VertexVector zero_vector() const { return VertexVector::Zero(static_cast<Eigen::Index>(num_classes_)); }

private:
    void check_dimension(const VertexVector& f) const;
    // the argument seen by the terms: raw vector shifted by the boundary value
    VertexVector shifted(const VertexVector& f) const;

    FormSpec spec_;
    std::vector<std::string> labels_;
    std::unordered_map<std::string, int> index_;
    std::vector<int> class_of_vertex_;
    std::vector<std::string> class_labels_;
    std::size_t num_classes_ = 0;
    std::optional<int> boundary_class_;
    std::vector<int> dirichlet_classes_;
    std::vector<int> post_dirichlet_classes_;
    std::vector<Edge> edges_;
    std::vector<Hyperedge> hyperedges_;
    std::vector<LinearTerm> linear_terms_;
};

/// E(f) = sum over edges of w_e(f(u) - f(v)). Each unordered edge is stored
/// once; a weight b in the ordered double-sum convention corresponds to c = 2b.
NetworkForm build_graph_form(std::vector<std::string> vertices, std::vector<EdgeSpec> edges);

NetworkForm build_hypergraph_form(std::vector<std::string> vertices, std::vector<HyperedgeSpec> hyperedges);

/// E_F(f) = E(f) if f vanishes on F, +inf otherwise.
NetworkForm restrict_dirichlet(const NetworkForm& form, const std::vector<std::string>& F);

/// E_Delta(f) = E(f|_X - f(Delta)) on X plus one new vertex.
NetworkForm adjoin_boundary_point(const NetworkForm& form, const std::string& label = "Delta");

/// Label a vertex of `second` receives in the disjoint union with `first`.
std::string union_label(const NetworkForm& first, const NetworkForm& second, std::string_view label);

/// Disjoint union with xi1 and xi2 merged into one coordinate.
NetworkForm series_identify(const NetworkForm& first, std::string_view xi1, const NetworkForm& second,
                            std::string_view xi2);

/// Disjoint union plus a connector edge w(t) = t^2 / (4 eps) between xi1 and xi2.
NetworkForm series_resistor(const NetworkForm& first, std::string_view xi1, const NetworkForm& second,
                            std::string_view xi2, double eps);

/// Connected components (vertex labels) of the graph linking vertices that
/// share a nonzero edge, a hyperedge with mu > 0, a linear term or a class.
std::vector<std::vector<std::string>> connectivity_report(const NetworkForm& form);

}  // namespace reslab
