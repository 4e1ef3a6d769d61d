#include <doctest.h>

#include <cmath>

#include "corpus.hpp"
#include "reslab/error.hpp"
#include "reslab/verify.hpp"

using namespace reslab;

namespace {

const SolveConfig cfg{};

VertexVector vec(std::initializer_list<double> v) {
    VertexVector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

NetworkForm capped_edge() {
    return build_graph_form({"x", "y"}, {{"x", "y", ScalarConvex::capped(corpus::pw(2.0, 2.0), 1.0)}});
}

}  // namespace

TEST_CASE("contraction compatibility holds on the corpus") {
    for (const auto& e : corpus::forms()) {
        CAPTURE(e.name);
        const auto r = check_contraction_compatibility(e.form, {}, 300, 7, 1e-9);
        CHECK(r.passed);
        CHECK(r.samples == 300);
    }
}

TEST_CASE("contraction negative control fails with a reproducible witness") {
    const NetworkForm form = corpus::negative_control();
    const auto a = check_contraction_compatibility(form, {}, 300, 7, 1e-9);
    const auto b = check_contraction_compatibility(form, {}, 300, 7, 1e-9);
    CHECK_FALSE(a.passed);
    CHECK(a.worst_violation > 0.1);
    CHECK(to_json(a).dump() == to_json(b).dump());

    // replay the witness by hand
    const Json& w = a.witness;
    const VertexVector f = vec({w["f"][0].get<double>(), w["f"][1].get<double>()});
    const VertexVector g = vec({w["g"][0].get<double>(), w["g"][1].get<double>()});
    const NormalContraction C = contraction_from_json(w["contraction"]);
    const VertexVector Cg = apply_contraction(C, g);
    const double lhs = (form.evaluate(f + Cg) + form.evaluate(f - Cg)).to_double();
    const double rhs = (form.evaluate(f + g) + form.evaluate(f - g)).to_double();
    CHECK(lhs > rhs);

    // a fold at zero sends g = (1, -1) to (1, 1)
    const VertexVector g2 = vec({1.0, -1.0});
    const VertexVector Cg2 = apply_contraction(NormalContraction::fold_at(0.0), g2);
    CHECK(2.0 * form.evaluate(Cg2).to_double() == doctest::Approx(8.0));
    CHECK(2.0 * form.evaluate(g2).to_double() == 0.0);
}

TEST_CASE("identity contraction gives zero violation") {
    const NetworkForm form = corpus::single_edge();
    const auto r = check_contraction_compatibility(form, {false, false, false}, 30, 1, 0.0);
    CHECK(r.passed);
    CHECK(r.worst_violation == 0.0);
}

TEST_CASE("triangle inequality on small forms") {
    const auto forms = corpus::forms();
    const auto r = check_triangle(forms[2].form, 1.0, {}, cfg, 1e-5);
    CHECK(r.passed);
    CHECK(r.samples == 27);

    // path: R_t(x, z) = t^2 / 2 = t^2 / 4 + t^2 / 4
    const auto p = check_triangle(corpus::path3(2.0, 2.0, 2.0), 2.0, {{"x", "y", "z"}}, cfg, 1e-5);
    CHECK(p.passed);
    CHECK(p.witness["lhs"].get<double>() == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(p.witness["rhs"].get<double>() == doctest::Approx(2.0).epsilon(1e-6));

    const auto d = check_triangle(forms[2].form, 1.0, {{"a", "a", "c"}}, cfg, 1e-5);
    CHECK(d.worst_violation == 0.0);
}

TEST_CASE("serial additivity") {
    const NetworkForm e = corpus::single_edge();
    const auto id = check_additivity_identify(e, "y", e, "x", "x", "y", 2.0, cfg, 1e-4);
    CHECK(id.passed);
    CHECK(id.witness["glued"].get<double>() == doctest::Approx(2.0).epsilon(1e-6));

    const auto res = check_additivity_resistor(e, "y", e, "x", "x", "y", 2.0, 1.0, cfg, 1e-4);
    CHECK(res.passed);
    CHECK(res.witness["glued"].get<double>() == doctest::Approx(6.0).epsilon(1e-6));

    const auto small = check_additivity_resistor(e, "y", e, "x", "x", "y", 2.0, 1e-4, cfg, 1e-4);
    CHECK(std::abs(small.witness["glued"].get<double>() - id.witness["glued"].get<double>()) <= 4e-4 + 1e-4);

    const auto forms = corpus::forms();
    const auto mixed = check_additivity_identify(forms[6].form, "d", e, "x", "a", "y", 1.0, cfg, 1e-4);
    CHECK(mixed.passed);

    // x1 = xi1 leaves only the second operand
    const auto trivial = check_additivity_identify(e, "y", e, "x", "y", "y", 2.0, cfg, 1e-4);
    CHECK(trivial.passed);
    CHECK(trivial.witness["first"].get<double>() == 0.0);

    const NetworkForm dir = restrict_dirichlet(e, {"x"});
    CHECK_THROWS_AS(check_additivity_identify(dir, "y", e, "x", "x", "y", 1.0, cfg, 1e-4), Error);
    CHECK_THROWS_AS(check_additivity_resistor(e, "y", e, "x", "x", "y", 1.0, 0.0, cfg, 1e-4), Error);
}

TEST_CASE("homogeneous identity") {
    const auto forms = corpus::forms();
    CHECK(check_homogeneous_identity(forms[0].form, 2.0, {2.0}, {}, cfg, 1e-3).passed);
    CHECK(check_homogeneous_identity(forms[2].form, 2.0, {0.25, 1.0, 4.0}, {}, cfg, 1e-3).passed);
    CHECK(check_homogeneous_identity(forms[3].form, 1.5, {0.25, 1.0, 4.0}, {}, cfg, 1e-3).passed);
    CHECK(check_homogeneous_identity(forms[4].form, 3.0, {0.25, 1.0, 4.0}, {}, cfg, 1e-3).passed);
    CHECK(check_homogeneous_identity(forms[6].form, 2.0, {1.0}, {}, cfg, 1e-3).passed);

    const auto p1 = check_homogeneous_identity(corpus::single_edge(1.0, 1.0), 1.0, {0.5, 2.0}, {}, cfg, 1e-3);
    CHECK(p1.passed);
    CHECK(p1.samples == 2);

    try {
        check_homogeneous_identity(forms[7].form, 2.0, {1.0}, {}, cfg, 1e-3);
        FAIL("expected MixedExponents");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MixedExponents);
    }
    CHECK_THROWS_AS(check_homogeneous_identity(forms[0].form, 3.0, {1.0}, {}, cfg, 1e-3), Error);
    CHECK_THROWS_AS(check_homogeneous_identity(forms[5].form, 2.0, {1.0}, {}, cfg, 1e-3), Error);
}

TEST_CASE("homogeneous identity detects a wrong exponent claim through values") {
    // p = 2 form checked against the p = 2 identity but with a perturbed form:
    // a capped edge is not homogeneous and is rejected up front
    CHECK_THROWS_AS(check_homogeneous_identity(capped_edge(), 2.0, {1.0}, {}, cfg, 1e-3), Error);
}

TEST_CASE("fundamental inequalities") {
    const NetworkForm e = corpus::single_edge();
    const auto r = check_fundamental_inequalities(e, {vec({0.0, 0.0}), vec({3.0, 0.0}), vec({-1.0, 2.0})}, cfg, 1e-4);
    CHECK(r.passed);

    const auto forms = corpus::forms();
    for (std::size_t i : {2u, 5u, 8u}) {
        CAPTURE(forms[i].name);
        const auto samples = sample_vectors(forms[i].form, 9, 3);
        CHECK(check_fundamental_inequalities(forms[i].form, samples, cfg, 1e-4).passed);
    }

    SolveConfig tight = cfg;
    tight.orlicz_class_cap = 1;
    CHECK_THROWS_AS(check_fundamental_inequalities(e, {vec({1.0, 0.0})}, tight, 1e-4), Error);
}

TEST_CASE("doubling estimates") {
    const auto samples = sample_vectors(corpus::single_edge(), 12, 5);
    const auto quad = estimate_delta2_nabla2(corpus::single_edge(), samples);
    CHECK(quad.C_hat == doctest::Approx(4.0));
    CHECK(quad.K_hat == doctest::Approx(4.0));
    CHECK(quad.delta2_plausible);
    CHECK(quad.nabla2_plausible);
    CHECK(quad.report.passed);

    const auto lin = estimate_delta2_nabla2(corpus::single_edge(1.0, 1.0), samples);
    CHECK(lin.K_hat == doctest::Approx(2.0));
    CHECK_FALSE(lin.nabla2_plausible);

    // samples crossing the cap: E(f) finite, E(2f) infinite
    const auto capped = estimate_delta2_nabla2(capped_edge(), {vec({0.1, 0.0}), vec({0.8, 0.0})});
    CHECK(std::isinf(capped.C_hat));
    CHECK_FALSE(capped.delta2_plausible);
    CHECK_FALSE(capped.report.passed);
    CHECK(capped.report.witness["f"][0].get<double>() == 0.8);
}

TEST_CASE("p-contraction map") {
    const auto forms = corpus::forms();
    CHECK(check_p_contraction_map(forms[1].form, 2.0, 200, 11, 1e-9).passed);
    CHECK(check_p_contraction_map(forms[3].form, 1.5, 200, 11, 1e-9).passed);
    CHECK(check_p_contraction_map(forms[4].form, 3.0, 200, 11, 1e-9).passed);
    CHECK_THROWS_AS(check_p_contraction_map(forms[5].form, 2.0, 10, 11, 1e-9), Error);
}

TEST_CASE("sup approximation") {
    const NetworkForm e = corpus::single_edge();
    const std::vector<double> alphas{1.0, 10.0, 100.0, 1000.0};
    const auto r = check_sup_approximation(e, {vec({0.0, 0.0}), vec({1.0, 0.0})}, alphas, cfg, 1e-2);
    CHECK(r.passed);
    // the closed form for f = (1, 0) is alpha / (alpha + 2)
    const auto& approx = r.witness["approximants"];
    if (approx[0].get<double>() > 0.0) CHECK(approx[0].get<double>() == doctest::Approx(1.0 / 3.0).epsilon(1e-5));

    const auto capped = check_sup_approximation(capped_edge(), {vec({2.0, 0.0})}, alphas, cfg, 1e-2, 1.0);
    CHECK(capped.passed);
}

TEST_CASE("verify reports serialize") {
    const auto r = estimate_delta2_nabla2(capped_edge(), {vec({0.8, 0.0})}).report;
    const Json j = to_json(std::vector<VerifyReport>{r});
    CHECK(j[0]["property"] == "delta2_nabla2");
    CHECK(j[0]["worst_violation"] == Json{{"inf", true}});
    CHECK(j[0]["passed"] == false);
}
