#include <doctest.h>

#include <cmath>
#include <random>

#include "corpus.hpp"
#include "reslab/error.hpp"
#include "reslab/form.hpp"

using namespace reslab;

namespace {

VertexVector vec(std::initializer_list<double> v) {
    VertexVector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

VertexVector random_vector(std::mt19937_64& rng, const NetworkForm& form, double scale) {
    std::normal_distribution<double> n(0.0, scale);
    VertexVector f = form.zero_vector();
    for (Eigen::Index i = 0; i < f.size(); ++i) f[i] = n(rng);
    return f;
}

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error thrown");
    return ErrorCode::ConstructionError;
}

}  // namespace

TEST_CASE("energies of the basic terms") {
    CHECK(corpus::single_edge().evaluate(vec({3.0, 1.0})).to_double() == doctest::Approx(4.0));
    const auto hyper = build_hypergraph_form({"a", "b", "c"}, {HyperedgeSpec{{"a", "b", "c"}, 2.0}});
    CHECK(hyper.evaluate(vec({1.0, -2.0, 0.5})).to_double() == doctest::Approx(18.0));
    const auto capped = corpus::forms()[8].form;
    CHECK(capped.evaluate(vec({2.0, 0.0, 0.0})).is_infinite());
    CHECK(corpus::negative_control().evaluate(vec({1.0, 1.0})).to_double() == doctest::Approx(4.0));
}

TEST_CASE("ordered-pair weights map to c = 2b") {
    // a pair of weight b contributes b d^2, which is w(d) = (c/2) d^2 with c = 2b
    const double b = 1.5;
    const auto form = build_graph_form({"x", "y"}, {{"x", "y", ScalarConvex::power(2.0 * b, 2.0)}});
    const double d = 0.7;
    CHECK(form.evaluate(vec({d, 0.0})).to_double() == doctest::Approx(b * d * d));
}

TEST_CASE("corpus forms are convex, symmetric and shift invariant") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> lam(0.0, 1.0);
    for (const auto& e : corpus::forms()) {
        CAPTURE(e.name);
        CHECK(e.form.evaluate(e.form.zero_vector()) == ExtNonNeg::zero());
        CHECK(e.form.kernel_contains_constants());
        for (int i = 0; i < 100; ++i) {
            const double scale = i % 2 ? 0.3 : 2.0;
            const VertexVector f = random_vector(rng, e.form, scale), g = random_vector(rng, e.form, scale);
            const double l = lam(rng);
            const double ef = e.form.evaluate(f).to_double(), eg = e.form.evaluate(g).to_double();
            const double mid = e.form.evaluate(l * f + (1 - l) * g).to_double();
            if (std::isfinite(ef) && std::isfinite(eg)) CHECK(mid <= l * ef + (1 - l) * eg + 1e-9 * (1 + ef + eg));
            CHECK(e.form.evaluate(-f) == e.form.evaluate(f));
            const double shifted = e.form.evaluate(f + VertexVector::Constant(f.size(), 1.7)).to_double();
            if (std::isfinite(ef))
                CHECK(shifted == doctest::Approx(ef).epsilon(1e-9));
            else
                CHECK(std::isinf(shifted));
        }
    }
}

TEST_CASE("subgradients support the energy") {
    std::mt19937_64 rng(10);
    for (const auto& e : corpus::forms()) {
        CAPTURE(e.name);
        for (int i = 0; i < 50; ++i) {
            const VertexVector f = random_vector(rng, e.form, 0.3), g = random_vector(rng, e.form, 0.3);
            if (e.form.evaluate(f).is_infinite()) continue;
            VertexVector phi;
            try {
                phi = e.form.subgradient(f);
            } catch (const Error&) {
                continue;
            }
            const double lhs = e.form.evaluate(g).to_double();
            const double rhs = e.form.evaluate(f).to_double() + phi.dot(g - f);
            CHECK(lhs >= rhs - 1e-9 * (1 + std::abs(rhs)));
        }
    }
    CHECK(code_of([] { corpus::forms()[8].form.subgradient(vec({5.0, 0.0, 0.0})); }) == ErrorCode::InfiniteEnergy);
}

TEST_CASE("dirichlet restriction, boundary point and identification") {
    const auto e = corpus::single_edge();
    const auto dir = restrict_dirichlet(e, {"x"});
    CHECK(dir.evaluate(vec({0.0, 2.0})).to_double() == doctest::Approx(4.0));
    CHECK(dir.evaluate(vec({1.0, 2.0})).is_infinite());
    CHECK_FALSE(dir.kernel_contains_constants());

    const auto bd = adjoin_boundary_point(e);
    CHECK(bd.num_vertices() == 3);
    CHECK(bd.labels().back() == "Delta");
    CHECK(bd.evaluate(vec({3.0, 1.0, 5.0})).to_double() == doctest::Approx(4.0));
    CHECK(code_of([&] { adjoin_boundary_point(bd); }) == ErrorCode::BoundaryAlreadyPresent);

    // Dirichlet condition applied after the boundary point: E(f) with f(Delta) = 0
    const auto pinned = restrict_dirichlet(bd, {"Delta"});
    CHECK(pinned.evaluate(vec({3.0, 1.0, 0.0})).to_double() == doctest::Approx(4.0));
    CHECK(pinned.evaluate(vec({3.0, 1.0, 1.0})).is_infinite());

    FormSpec spec;
    spec.vertices = {"a", "b", "c"};
    spec.edges = {{"a", "b", corpus::pw(2.0, 2.0)}, {"b", "c", corpus::pw(2.0, 2.0)}};
    spec.identify = {{"a", "c"}};
    const NetworkForm loop(spec);
    CHECK(loop.num_classes() == 2);
    CHECK(loop.class_of("a") == loop.class_of("c"));
    CHECK(loop.evaluate(vec({1.0, 0.0})).to_double() == doctest::Approx(2.0));
    CHECK(loop.vector_from_labels({{"a", 1.0}, {"b", 0.0}, {"c", 1.0}}) == vec({1.0, 0.0}));
    CHECK(code_of([&] { loop.vector_from_labels({{"a", 1.0}, {"b", 0.0}, {"c", 2.0}}); }) ==
          ErrorCode::DimensionMismatch);
    CHECK(code_of([&] { loop.vector_from_labels({{"a", 1.0}}); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("series compositions") {
    const auto e = corpus::single_edge();
    const auto glued = series_identify(e, "y", e, "x");
    CHECK(glued.num_vertices() == 4);
    CHECK(glued.num_classes() == 3);
    const std::string y2 = union_label(e, e, "y");
    CHECK(y2 != "y");
    CHECK(glued.has_vertex(y2));

    const auto res = series_resistor(e, "y", e, "x", 0.25);
    CHECK(res.num_classes() == 4);
    CHECK(res.edges().size() == 3);
    // connector t^2 / (4 eps) at t = 1, eps = 0.25: 1
    VertexVector f = res.zero_vector();
    f[res.class_of("y")] = 1.0;
    f[res.class_of("x")] = 1.0;
    CHECK(res.evaluate(f).to_double() == doctest::Approx(1.0));

    CHECK(code_of([&] { series_identify(restrict_dirichlet(e, {"x"}), "y", e, "x"); }) ==
          ErrorCode::DirichletOperand);
    CHECK(code_of([&] { series_resistor(e, "y", e, "x", 0.0); }) == ErrorCode::NonPositiveEpsilon);
    CHECK(code_of([&] { series_identify(e, "q", e, "x"); }) == ErrorCode::UnknownVertex);
}

TEST_CASE("construction errors") {
    CHECK(code_of([] { build_graph_form({"x"}, {{"x", "x", corpus::pw(1.0, 2.0)}}); }) == ErrorCode::SelfLoop);
    CHECK(code_of([] { build_graph_form({"x"}, {{"x", "z", corpus::pw(1.0, 2.0)}}); }) == ErrorCode::UnknownVertex);
    CHECK(code_of([] { build_hypergraph_form({"x", "y"}, {HyperedgeSpec{{"x"}, 1.0}}); }) ==
          ErrorCode::SingletonHyperedge);
    CHECK(code_of([] { build_graph_form({"x", "x"}, {}); }) == ErrorCode::ConstructionError);
    CHECK(code_of([] { corpus::single_edge().evaluate(vec({1.0})); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("connectivity report") {
    const auto parts = connectivity_report(
        build_graph_form({"a", "b", "c", "d"}, {{"a", "b", corpus::pw(1.0, 2.0)}, {"c", "d", corpus::pw(0.0, 2.0)}}));
    CHECK(parts.size() == 3);
    CHECK(connectivity_report(corpus::forms()[7].form).size() == 1);
}
