// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "corpus.hpp"
#include "oracles.hpp"
#include "reslab/io.hpp"
#include "reslab/resistance.hpp"
#include "reslab/verify.hpp"

using namespace reslab;

namespace {

constexpr std::uint64_t kSeed = 20240611;
const SolveConfig cfg{};

struct Outcome {
    bool pass = true;
    std::string detail;
};

void fail(Outcome& o, const std::string& why) {
    if (o.pass) o.detail = why;
    o.pass = false;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

VertexVector vec2(double a, double b) {
    VertexVector v(2);
    v << a, b;
    return v;
}

// reports of every sampled checker, in a fixed order; the determinism
// criterion recomputes this and compares bytes
Json report_log = Json::array();

void log_report(const std::string& form, const VerifyReport& r) {
    Json j = to_json(r);
    j["form"] = form;
    report_log.push_back(j);
}

Outcome closed_forms() {
    Outcome o;
    const NetworkForm e = corpus::single_edge();
    int n = 0;
    double worst = 0.0;
    auto near = [&](double got, double want, const std::string& what) {
        ++n;
        worst = std::max(worst, std::abs(got - want));
        if (!(std::abs(got - want) <= 1e-6)) fail(o, what + fmt(": got %.12g, want %.12g", got, want));
    };
    near(elementary_resistance(e, "x", "y", cfg).to_double(), 1.0, "R(x,y)");
    for (double t : {0.5, 1.0, 2.0, 4.0}) near(t_resistance(e, "x", "y", t, cfg).to_double(), t * t / 4, "R_t");
    for (double d : {-2.0, 0.5, 3.0}) {
        near(luxemburg(e, vec2(d, 0), cfg).to_double(), std::abs(d), "Luxemburg");
        near(orlicz(e, vec2(d, 0), cfg).to_double(), 2 * std::abs(d), "Orlicz");
    }
    for (double s : {-1.5, 0.5, 1.0, 2.0}) near(conjugate(e, vec2(s, -s), cfg).to_double(), s * s / 4, "conjugate");
    o.detail = (o.pass ? "" : o.detail + "; ") + fmt("%.0f values, worst %.2e", n, worst);
    return o;
}

NetworkForm random_power_graph(std::mt19937_64& rng, int n, double p) {
    std::uniform_real_distribution<double> coef(0.5, 4.0), coin(0.0, 1.0);
    std::vector<std::string> v;
    for (int i = 0; i < n; ++i) v.push_back("v" + std::to_string(i));
    std::vector<EdgeSpec> edges;
    // random tree keeps the graph connected, extra edges close cycles
    for (int i = 1; i < n; ++i) {
        std::uniform_int_distribution<int> parent(0, i - 1);
        edges.push_back({v[parent(rng)], v[i], ScalarConvex::power(coef(rng), p)});
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 2; j < n; ++j)
            if (coin(rng) < 0.3) edges.push_back({v[i], v[j], ScalarConvex::power(coef(rng), p)});
    return build_graph_form(v, edges);
}

Outcome homogeneous_identity() {
    Outcome o;
    std::mt19937_64 rng(kSeed);
    const double ps[] = {1.5, 2.0, 3.0};
    int graphs = 0;
    long checks = 0;
    double worst = 0.0;
    for (int k = 0; k < 24; ++k) {
        std::uniform_int_distribution<int> size(2, 6);
        const double p = ps[k % 3];
        const NetworkForm form = random_power_graph(rng, size(rng), p);
        const auto r = check_homogeneous_identity(form, p, {0.25, 1.0, 4.0}, {}, cfg, 1e-3);
        log_report("random_" + std::to_string(k), r);
        ++graphs;
        checks += r.samples;
        worst = std::max(worst, r.worst_violation);
        if (!r.passed) fail(o, "graph " + std::to_string(k) + ": " + to_json(r).dump());
    }
    o.detail = (o.pass ? "" : o.detail + "; ") +
               fmt("%.0f graphs, %.0f identities, worst %.2e", graphs, static_cast<double>(checks), worst);
    return o;
}

Outcome p1_dichotomy() {
    Outcome o;
    const std::vector<std::pair<std::string, NetworkForm>> forms = {
        {"edge c=1", corpus::single_edge(1.0, 1.0)},
        {"edge c=3", corpus::single_edge(3.0, 1.0)},
        {"path c=1,2", corpus::path3(1.0, 2.0, 1.0)},
        {"path c=0.5,4", corpus::path3(0.5, 4.0, 1.0)}};
    int agree = 0, total = 0;
    for (const auto& [name, form] : forms) {
        const auto& labels = form.labels();
        for (std::size_t i = 0; i < labels.size(); ++i)
            for (std::size_t j = 0; j < labels.size(); ++j) {
                if (i == j) continue;
                const double R = elementary_resistance(form, labels[i], labels[j], cfg).to_double();
                for (double ratio : {0.25, 0.5, 0.9, 0.99, 0.998, 1.002, 1.01, 1.1, 2.0, 4.0}) {
                    const double t = ratio / R;
                    const double tr = t * R;
                    const ExtNonNeg Rt = t_resistance(form, labels[i], labels[j], t, cfg);
                    bool ok;
                    if (tr <= 1.0 - 1e-3)
                        ok = Rt == ExtNonNeg::zero();
                    else if (tr >= 1.0 + 1e-3)
                        ok = Rt.is_infinite();
                    else
                        continue;
                    ++total;
                    if (ok)
                        ++agree;
                    else
                        fail(o, name + " " + labels[i] + "," + labels[j] + fmt(": t R = %.6g gave %.6g", tr, Rt.to_double()));
                }
            }
    }
    o.detail = (o.pass ? "" : o.detail + "; ") + fmt("%.0f/%.0f agree", agree, total);
    return o;
}

Outcome triangle() {
    Outcome o;
    long triples = 0;
    double worst = 0.0;
    for (const auto& e : corpus::forms()) {
        for (double t : {0.25, 1.0, 4.0}) {
            const auto r = check_triangle(e.form, t, {}, cfg, 1e-5);
            log_report(e.name, r);
            triples += r.samples;
            worst = std::max(worst, r.worst_violation);
            if (!r.passed) fail(o, e.name + ": " + to_json(r).dump());
        }
    }
    o.detail = (o.pass ? "" : o.detail + "; ") + fmt("%.0f triples, worst %.2e", static_cast<double>(triples), worst);
    return o;
}

Outcome additivity() {
    Outcome o;
    const auto forms = corpus::forms();
    // (first, second) by corpus index; x1 and xi1 are the first and last labels
    // of the first form, xi2 and x2 of the second
    const std::pair<int, int> pairs[] = {{0, 0}, {0, 1}, {1, 2}, {2, 6}, {6, 0}, {3, 4},
                                         {5, 1}, {7, 6}, {8, 2}, {9, 0}, {4, 7}, {6, 6}};
    int glued = 0;
    double worst = 0.0;
    bool hyper = false;
    for (const auto& [i, j] : pairs) {
        const NetworkForm& a = forms[i].form;
        const NetworkForm& b = forms[j].form;
        const std::string& x1 = a.labels().front();
        const std::string& xi1 = a.labels().back();
        const std::string& xi2 = b.labels().front();
        const std::string& x2 = b.labels().back();
        hyper = hyper || !a.hyperedges().empty() || !b.hyperedges().empty();
        const std::string name = forms[i].name + "+" + forms[j].name;
        for (double t : {0.5, 2.0}) {
            auto r = check_additivity_identify(a, xi1, b, xi2, x1, x2, t, cfg, 1e-4);
            log_report(name, r);
            worst = std::max(worst, r.worst_violation);
            if (!r.passed) fail(o, name + ": " + to_json(r).dump());
            for (double eps : {1e-4, 0.1, 1.0}) {
                r = check_additivity_resistor(a, xi1, b, xi2, x1, x2, t, eps, cfg, 1e-4);
                log_report(name, r);
                worst = std::max(worst, r.worst_violation);
                if (!r.passed) fail(o, name + fmt(" eps %g: ", eps) + to_json(r).dump());
            }
        }
        ++glued;
    }
    if (!hyper) fail(o, "no hypergraph operand");
    o.detail = (o.pass ? "" : o.detail + "; ") + fmt("%.0f glued pairs, worst %.2e", glued, worst);
    return o;
}

Outcome fundamental() {
    Outcome o;
    int forms = 0;
    bool cosh = false;
    double worst = 0.0;
    for (const auto& e : corpus::forms()) {
        if (e.form.num_classes() > 4) continue;
        const auto r = check_fundamental_inequalities(e.form, sample_vectors(e.form, 50, kSeed), cfg, 1e-4);
        log_report(e.name, r);
        ++forms;
        cosh = cosh || e.name == "cosh_triangle";
        worst = std::max(worst, r.worst_violation);
        if (!r.passed) fail(o, e.name + ": " + to_json(r).dump());
    }
    if (!cosh) fail(o, "cosh form missing");
    o.detail = (o.pass ? "" : o.detail + "; ") + fmt("%.0f forms x 50 vectors, worst %.2e", forms, worst);
    return o;
}

Outcome contraction() {
    Outcome o;
    double worst = 0.0;
    for (const auto& e : corpus::forms()) {
        const auto r = check_contraction_compatibility(e.form, {}, 1000, kSeed, 1e-9);
        log_report(e.name, r);
        worst = std::max(worst, r.worst_violation);
        if (!r.passed) fail(o, e.name + ": " + to_json(r).dump());
    }
    const NetworkForm neg = corpus::negative_control();
    const auto a = check_contraction_compatibility(neg, {}, 1000, kSeed, 1e-9);
    const auto b = check_contraction_compatibility(neg, {}, 1000, kSeed, 1e-9);
    log_report("negative_control", a);
    if (a.passed) fail(o, "negative control passed");
    if (to_json(a).dump() != to_json(b).dump()) fail(o, "negative control witness not reproducible");
    // the witness must fail when replayed by hand
    const Json& w = a.witness;
    if (!a.passed) {
        const VertexVector f = vec2(w["f"][0].get<double>(), w["f"][1].get<double>());
        const VertexVector g = vec2(w["g"][0].get<double>(), w["g"][1].get<double>());
        const VertexVector Cg = apply_contraction(contraction_from_json(w["contraction"]), g);
        const double lhs = (neg.evaluate(f + Cg) + neg.evaluate(f - Cg)).to_double();
        const double rhs = (neg.evaluate(f + g) + neg.evaluate(f - g)).to_double();
        if (!(lhs > rhs)) fail(o, "witness does not replay");
    }
    o.detail = (o.pass ? "" : o.detail + "; ") +
               fmt("10 forms x 1000 samples, worst %.2e; control violation %.3g", worst, a.worst_violation);
    return o;
}

// Gaussian vectors at scales 0.1 and 1, pulled into the unit energy ball
// {E <= 1} by the Luxemburg gauge. The gap E - E^(alpha) is of order E / alpha,
// so a fixed absolute tolerance needs bounded energy. Vectors beyond a cap
// stay as drawn and exercise the divergent branch.
std::vector<VertexVector> approximation_samples(const NetworkForm& form, bool normalize) {
    std::mt19937_64 rng(kSeed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<VertexVector> out;
    for (int k = 0; k < 30; ++k) {
        VertexVector f = form.zero_vector();
        for (Eigen::Index c = 0; c < f.size(); ++c) f[c] = (k % 2 == 0 ? 0.1 : 1.0) * normal(rng);
        const ExtNonNeg e = form.evaluate(f);
        if (normalize && e.is_finite() && e.to_double() > 1.0) f /= luxemburg(form, f, cfg).to_double();
        out.push_back(f);
    }
    return out;
}

Outcome sup_approximation() {
    Outcome o;
    double worst = 0.0, relative = 0.0;
    long samples = 0;
    for (const auto& e : corpus::forms()) {
        const auto r = check_sup_approximation(e.form, approximation_samples(e.form, true), {1.0, 10.0, 100.0, 1000.0},
                                               cfg, 1e-2);
        log_report(e.name, r);
        worst = std::max(worst, r.worst_violation);
        samples += r.samples;
        if (!r.passed) fail(o, e.name + ": " + to_json(r).dump());
        // nested K: E^(alpha,K1) <= E^(alpha,K2) <= E for K1 in K2, including
        // vectors with E = +inf; slack covers solver accuracy only
        const auto& labels = e.form.labels();
        const std::vector<std::string> half(labels.begin(), labels.begin() + (labels.size() + 1) / 2);
        for (const auto& f : approximation_samples(e.form, false)) {
            const ExtNonNeg E = e.form.evaluate(f);
            for (double alpha : {1.0, 1000.0}) {
                double previous = 0.0;
                for (const auto& K : {std::vector<std::string>{labels.front()}, half, labels}) {
                    const double a = approximating_form(e.form, alpha, K, 2.0, f, cfg);
                    const double slack = 1e-6 * (1.0 + a);
                    ++samples;
                    if (a < previous - slack) fail(o, e.name + fmt(": not monotone in K at alpha %g", alpha));
                    if (E.is_finite() && a > E.to_double() + slack) fail(o, e.name + fmt(": above E at alpha %g", alpha));
                    previous = a;
                }
            }
        }
        // for the record: relative gap on the raw draws
        for (const auto& f : approximation_samples(e.form, false)) {
            const ExtNonNeg E = e.form.evaluate(f);
            if (!E.is_finite() || E == ExtNonNeg::zero()) continue;
            const double a = approximating_form(e.form, 1000.0, e.form.labels(), 2.0, f, cfg);
            relative = std::max(relative, (E.to_double() - a) / E.to_double());
        }
    }
    o.detail = (o.pass ? "" : o.detail + "; ") +
               fmt("%.0f comparisons, worst %.2e; raw draws at alpha 1e3 within %.2e relative",
                   static_cast<double>(samples), worst, relative);
    return o;
}

Outcome brute_force() {
    Outcome o;
    int forms = 0, compared = 0;
    double worst = 0.0;
    std::mt19937_64 rng(kSeed);
    std::normal_distribution<double> normal(0.0, 1.0);
    auto check = [&](double got, double want, const std::string& what) {
        ++compared;
        worst = std::max(worst, std::abs(got - want));
        if (!(std::abs(got - want) <= 1e-3)) fail(o, what + fmt(": solver %.9g, grid %.9g", got, want));
    };
    for (const auto& e : corpus::forms()) {
        if (!oracle::applicable(e.form)) continue;
        ++forms;
        const auto& labels = e.form.class_labels();
        const int n = static_cast<int>(labels.size());
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const std::string tag = e.name + " " + labels[i] + "," + labels[j];
                check(elementary_resistance(e.form, labels[i], labels[j], cfg).to_double(), oracle::elementary(e.form, i, j),
                      tag + " R");
                for (double t : {0.5, 1.0, 2.0}) {
                    const auto grid = oracle::t_resistance(e.form, i, j, t);
                    const ExtNonNeg got = t_resistance(e.form, labels[i], labels[j], t, cfg);
                    if (grid.on_box && got.is_infinite()) {
                        ++compared;  // both unbounded
                        continue;
                    }
                    check(got.to_double(), grid.value, tag + fmt(" R_t t=%g", t));
                }
            }
        for (int k = 0; k < 4; ++k) {
            VertexVector f = e.form.zero_vector();
            for (Eigen::Index c = 0; c < f.size(); ++c) f[c] = normal(rng);
            const auto grid = oracle::luxemburg(e.form, f);
            const double got = luxemburg(e.form, f, cfg).to_double();
            if (grid)
                check(got, *grid, e.name + " Luxemburg");
            else if (!(got > 8.0))
                fail(o, e.name + " Luxemburg beyond the grid but solver gave " + fmt("%.6g", got));
        }
    }
    o.detail = (o.pass ? "" : o.detail + "; ") + fmt("%.0f forms, %.0f values, worst %.2e", forms, compared, worst);
    return o;
}

Json sampled_suite() {
    report_log = Json::array();
    homogeneous_identity();
    triangle();
    additivity();
    fundamental();
    contraction();
    sup_approximation();
    return report_log;
}

}  // namespace

int main() {
    using clock = std::chrono::steady_clock;
    struct Criterion {
        const char* name;
        double budget;  // seconds, 0 = none
        std::function<Outcome()> run;
    };
    std::string first_run;
    const std::vector<Criterion> criteria = {
        {"closed-form oracle suite", 1.0, closed_forms},
        {"homogeneous identity on random graphs", 60.0, homogeneous_identity},
        {"p = 1 dichotomy", 0.0, p1_dichotomy},
        {"triangle inequality over the corpus", 120.0, triangle},
        {"serial additivity", 0.0, additivity},
        {"fundamental inequalities", 0.0, fundamental},
        {"contraction compatibility", 0.0, contraction},
        {"sup-approximation", 0.0, sup_approximation},
        {"solver against brute force", 0.0, brute_force},
        {"determinism of the report", 0.0,
         [&] {
             Outcome o;
             const std::string a = sampled_suite().dump();
             const std::string b = sampled_suite().dump();
             if (a != b) fail(o, "two runs differ");
             o.detail = fmt("%.0f reports, %.0f bytes identical", static_cast<double>(report_log.size()),
                            static_cast<double>(a.size()));
             return o;
         }},
    };

    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const auto start = clock::now();
        Outcome o;
        try {
            o = criteria[k].run();
        } catch (const std::exception& e) {
            fail(o, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(clock::now() - start).count();
        if (criteria[k].budget > 0.0 && secs >= criteria[k].budget)
            fail(o, fmt("took %.2f s, budget %.0f s", secs, criteria[k].budget));
        if (!o.pass) ++failed;
        std::printf("%s %2zu %s (%.2f s): %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].name, secs,
                    o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
