#include "reslab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "reslab/error.hpp"
#include "reslab/resistance.hpp"

namespace reslab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kScales[] = {0.1, 1.0, 10.0};

Json vec_json(const VertexVector& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

// (lhs - rhs) / (1 + |rhs|) for lhs <= rhs; +inf on the right absorbs
double excess(double lhs, double rhs) {
    if (std::isinf(rhs)) return 0.0;
    if (std::isinf(lhs)) return kInf;
    return (lhs - rhs) / (1.0 + std::abs(rhs));
}

// |lhs - rhs| / (1 + |rhs|), zero when both are +inf
double mismatch(double lhs, double rhs) {
    if (std::isinf(lhs) && std::isinf(rhs)) return 0.0;
    if (std::isinf(lhs) || std::isinf(rhs)) return kInf;
    return std::abs(lhs - rhs) / (1.0 + std::abs(rhs));
}

double energy(const NetworkForm& form, const VertexVector& f) { return form.evaluate(f).to_double(); }

VertexVector gaussian(std::mt19937_64& rng, Eigen::Index n, double scale) {
    std::normal_distribution<double> normal(0.0, 1.0);
    VertexVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = scale * normal(rng);
    return v;
}

// zero the Dirichlet conditions of a raw vector
void conform(const NetworkForm& form, VertexVector& f) {
    const auto boundary = form.boundary_class();
    for (int c : form.dirichlet_classes()) f[c] = boundary ? f[*boundary] : 0.0;
    for (int c : form.post_dirichlet_classes()) f[c] = 0.0;
}

NormalContraction random_piecewise(std::mt19937_64& rng, double scale) {
    std::uniform_int_distribution<int> count(1, 4);
    std::uniform_real_distribution<double> where(-3.0 * scale, 3.0 * scale);
    std::uniform_real_distribution<double> slope(-1.0, 1.0);
    std::vector<double> bp(count(rng));
    for (auto& b : bp) b = where(rng);
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
    std::vector<double> sl(bp.size() + 1);
    for (auto& s : sl) s = slope(rng);
    return NormalContraction::piecewise(bp, sl);
}

// cycles through the enabled families
NormalContraction random_contraction(std::mt19937_64& rng, const ContractionFamilies& fam, long i, double scale) {
    std::vector<int> kinds;
    if (fam.min_with) kinds.push_back(0);
    if (fam.fold_at) kinds.push_back(1);
    if (fam.piecewise) kinds.push_back(2);
    if (kinds.empty()) return NormalContraction::identity();
    switch (kinds[static_cast<std::size_t>(i) % kinds.size()]) {
        case 0: {
            std::uniform_real_distribution<double> alpha(0.0, 3.0);
            double a = alpha(rng);
            if (a <= 0.0) a = 3.0;
            return NormalContraction::min_with(a);
        }
        case 1: {
            std::uniform_real_distribution<double> beta(-3.0, 3.0);
            return NormalContraction::fold_at(beta(rng));
        }
        default: return random_piecewise(rng, scale);
    }
}

VerifyReport start(const std::string& property, double tol) {
    VerifyReport r;
    r.property = property;
    r.tolerance = tol;
    return r;
}

void require_exponent(const NetworkForm& form, double p) {
    const auto q = homogeneity_exponent(form);
    if (!q || std::abs(*q - p) > 1e-12)
        throw Error(ErrorCode::MixedExponents,
                    q ? "form is " + format_real(*q) + "-homogeneous, not " + format_real(p) + "-homogeneous"
                      : "form is not positively homogeneous with a single exponent");
}

}  // namespace

void VerifyReport::observe(double violation, const Json& inputs) {
    if (samples == 0 || violation > worst_violation || std::isnan(violation)) {
        worst_violation = std::isnan(violation) ? kInf : violation;
        witness = inputs;
    }
    ++samples;
}

void VerifyReport::finish() {
    worst_violation = std::max(0.0, worst_violation);
    passed = worst_violation <= tolerance;
}

Json to_json(const VerifyReport& r) {
    return {{"property", r.property},        {"passed", r.passed},
            {"samples", r.samples},          {"worst_violation", value_to_json(r.worst_violation)},
            {"witness", r.witness},          {"tolerance", r.tolerance}};
}

Json to_json(const std::vector<VerifyReport>& reports) {
    Json out = Json::array();
    for (const auto& r : reports) out.push_back(to_json(r));
    return out;
}

std::vector<VertexVector> sample_vectors(const NetworkForm& form, int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<VertexVector> out;
    for (int i = 0; i < n; ++i) {
        VertexVector f = gaussian(rng, static_cast<Eigen::Index>(form.num_classes()), kScales[i % 3]);
        conform(form, f);
        out.push_back(std::move(f));
    }
    return out;
}

std::optional<double> homogeneity_exponent(const NetworkForm& form) {
    std::optional<double> p;
    bool ok = true;
    auto meet = [&](std::optional<double> q) {
        if (!q) {
            ok = false;
        } else if (!p) {
            p = q;
        } else if (*p != *q) {
            ok = false;
        }
    };
    for (const auto& e : form.edges())
        if (!e.w.is_identically_zero()) meet(e.w.homogeneity());
    for (const auto& t : form.linear_terms())
        if (!t.w.is_identically_zero()) meet(t.w.homogeneity());
    for (const auto& h : form.hyperedges())
        if (h.mu > 0.0) meet(2.0);
    if (!ok) return std::nullopt;
    return p;
}

VerifyReport check_contraction_compatibility(const NetworkForm& form, ContractionFamilies families, int n_samples,
                                             std::uint64_t seed, double tol) {
    VerifyReport report = start("contraction_compatibility", tol);
    std::mt19937_64 rng(seed);
    const auto n = static_cast<Eigen::Index>(form.num_classes());
    for (long i = 0; i < n_samples; ++i) {
        const double scale = kScales[i % 3];
        VertexVector f = gaussian(rng, n, scale), g = gaussian(rng, n, scale);
        conform(form, f);
        conform(form, g);
        const NormalContraction C = random_contraction(rng, families, i / 3, scale);
        const VertexVector Cg = apply_contraction(C, g);
        const double lhs = energy(form, f + Cg) + energy(form, f - Cg);
        const double rhs = energy(form, f + g) + energy(form, f - g);
        report.observe(excess(lhs, rhs), {{"f", vec_json(f)},
                                          {"g", vec_json(g)},
                                          {"contraction", to_json(C)},
                                          {"lhs", value_to_json(lhs)},
                                          {"rhs", value_to_json(rhs)}});
    }
    report.finish();
    return report;
}

VerifyReport check_triangle(const NetworkForm& form, double t, const std::vector<Triple>& triples,
                            const SolveConfig& cfg, double tol) {
    VerifyReport report = start("triangle", tol);
    std::vector<Triple> work = triples;
    if (work.empty()) {
        for (const auto& x : form.labels())
            for (const auto& y : form.labels())
                for (const auto& z : form.labels()) work.push_back({x, y, z});
    }
    std::map<std::pair<std::string, std::string>, double> cache;
    auto R = [&](const std::string& a, const std::string& b) {
        auto key = std::make_pair(a, b);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        const double v = t_resistance(form, a, b, t, cfg).to_double();
        cache.emplace(key, v);
        return v;
    };
    for (const auto& [x, y, z] : work) {
        const double lhs = R(x, z);
        const double rhs = R(x, y) + R(y, z);
        report.observe(excess(lhs, rhs), {{"t", t},
                                          {"x", x},
                                          {"y", y},
                                          {"z", z},
                                          {"lhs", value_to_json(lhs)},
                                          {"rhs", value_to_json(rhs)}});
    }
    report.finish();
    return report;
}

namespace {

VerifyReport additivity(const char* name, const NetworkForm& glued, const NetworkForm& first, const std::string& xi1,
                        const NetworkForm& second, const std::string& xi2, const std::string& x1,
                        const std::string& x2, double t, double offset, const SolveConfig& cfg, double tol) {
    if (!first.kernel_contains_constants() || !second.kernel_contains_constants())
        throw Error(ErrorCode::DirichletOperand, "operands must contain the constants in their kernel");
    VerifyReport report = start(name, tol);
    const std::string x2g = union_label(first, second, x2);
    const double lhs = t_resistance(glued, x1, x2g, t, cfg).to_double();
    const double r1 = t_resistance(first, x1, xi1, t, cfg).to_double();
    const double r2 = t_resistance(second, xi2, x2, t, cfg).to_double();
    const double rhs = r1 + r2 + offset;
    report.observe(mismatch(lhs, rhs), {{"t", t},
                                        {"x1", x1},
                                        {"x2", x2},
                                        {"xi1", xi1},
                                        {"xi2", xi2},
                                        {"glued", value_to_json(lhs)},
                                        {"first", value_to_json(r1)},
                                        {"second", value_to_json(r2)},
                                        {"offset", offset}});
    report.finish();
    return report;
}

}  // namespace

VerifyReport check_additivity_identify(const NetworkForm& first, const std::string& xi1, const NetworkForm& second,
                                       const std::string& xi2, const std::string& x1, const std::string& x2,
                                       double t, const SolveConfig& cfg, double tol) {
    first.vertex_index(x1);
    second.vertex_index(x2);
    const NetworkForm glued = series_identify(first, xi1, second, xi2);
    return additivity("additivity_identify", glued, first, xi1, second, xi2, x1, x2, t, 0.0, cfg, tol);
}

VerifyReport check_additivity_resistor(const NetworkForm& first, const std::string& xi1, const NetworkForm& second,
                                       const std::string& xi2, const std::string& x1, const std::string& x2,
                                       double t, double eps, const SolveConfig& cfg, double tol) {
    first.vertex_index(x1);
    second.vertex_index(x2);
    const NetworkForm glued = series_resistor(first, xi1, second, xi2, eps);
    return additivity("additivity_resistor", glued, first, xi1, second, xi2, x1, x2, t, eps * t * t, cfg, tol);
}

VerifyReport check_homogeneous_identity(const NetworkForm& form, double p, const std::vector<double>& t_list,
                                        const std::vector<std::pair<std::string, std::string>>& pairs,
                                        const SolveConfig& cfg, double tol) {
    require_exponent(form, p);
    VerifyReport report = start("homogeneous_identity", tol);
    std::vector<std::pair<std::string, std::string>> work = pairs;
    if (work.empty()) {
        const auto& labels = form.labels();
        for (std::size_t i = 0; i < labels.size(); ++i)
            for (std::size_t j = i + 1; j < labels.size(); ++j) work.emplace_back(labels[i], labels[j]);
    }
    for (const auto& [x, y] : work) {
        const double R = elementary_resistance(form, x, y, cfg).to_double();
        for (double t : t_list) {
            const double Rt = t_resistance(form, x, y, t, cfg).to_double();
            Json inputs{{"x", x}, {"y", y}, {"t", t}, {"R", value_to_json(R)}, {"R_t", value_to_json(Rt)}};
            if (p > 1.0) {
                const double q = p / (p - 1.0);
                const double predicted = std::isinf(R) ? kInf : (p - 1.0) * std::pow(t / p, q) * std::pow(R, q);
                inputs["predicted"] = value_to_json(predicted);
                report.observe(mismatch(predicted, Rt), inputs);
            } else {
                const double tr = t * R;
                if (tr < 1.0 - tol) {
                    inputs["expected"] = 0.0;
                    report.observe(std::isinf(Rt) ? kInf : 0.0, inputs);
                    if (!std::isinf(Rt) && Rt > tol) report.observe(Rt, inputs);
                } else if (tr > 1.0 + tol) {
                    inputs["expected"] = value_to_json(kInf);
                    report.observe(std::isinf(Rt) ? 0.0 : kInf, inputs);
                }
            }
        }
    }
    report.finish();
    return report;
}

VerifyReport check_fundamental_inequalities(const NetworkForm& form, const std::vector<VertexVector>& f_samples,
                                            const SolveConfig& cfg, double tol) {
    if (form.num_classes() > cfg.orlicz_class_cap)
        throw Error(ErrorCode::TooLarge, "form exceeds the Orlicz class cap");
    VerifyReport report = start("fundamental_inequalities", tol);
    for (const auto& f : f_samples) {
        const double L = luxemburg(form, f, cfg).to_double();
        const double O = orlicz(form, f, cfg).to_double();
        const Json base{{"f", vec_json(f)}, {"luxemburg", value_to_json(L)}, {"orlicz", value_to_json(O)}};
        Json lower = base, upper = base;
        lower["inequality"] = "luxemburg <= orlicz";
        upper["inequality"] = "orlicz <= 2 luxemburg";
        report.observe(excess(L, O), lower);
        report.observe(excess(O, 2.0 * L), upper);

        const double E = energy(form, f);
        if (std::isinf(E)) continue;
        VertexVector phi;
        try {
            phi = form.subgradient(f);
        } catch (const Error&) {
            continue;
        }
        // equality case of Fenchel-Young at a subgradient
        const double conj = conjugate(form, phi, cfg).to_double();
        const double pairing = phi.dot(f);
        Json fy = base;
        fy["inequality"] = "fenchel_young";
        fy["phi"] = vec_json(phi);
        fy["pairing"] = pairing;
        fy["energy"] = E;
        fy["conjugate"] = value_to_json(conj);
        report.observe(mismatch(pairing, E + conj), fy);
    }
    report.finish();
    return report;
}

Delta2Estimate estimate_delta2_nabla2(const NetworkForm& form, const std::vector<VertexVector>& f_samples) {
    Delta2Estimate out;
    out.report.property = "delta2_nabla2";
    out.report.tolerance = 0.0;
    double C = 0.0, K = kInf;
    long used = 0;
    for (const auto& f : f_samples) {
        const double e1 = energy(form, f);
        if (!(e1 > 0.0) || std::isinf(e1)) continue;
        const double e2 = energy(form, 2.0 * f);
        const double ratio = e2 / e1;
        ++used;
        C = std::max(C, ratio);
        K = std::min(K, ratio);
        out.report.observe(std::isinf(ratio) ? kInf : 0.0,
                           {{"f", vec_json(f)}, {"energy", e1}, {"energy_doubled", value_to_json(e2)}});
    }
    if (used == 0) {
        out.report.finish();
        return out;
    }
    out.C_hat = C;
    out.K_hat = K;
    out.delta2_plausible = std::isfinite(C);
    out.nabla2_plausible = K > 2.0;
    out.report.finish();
    return out;
}

VerifyReport check_p_contraction_map(const NetworkForm& form, double p, int n_samples, std::uint64_t seed,
                                     double tol) {
    require_exponent(form, p);
    VerifyReport report = start("p_contraction_map", tol);
    std::mt19937_64 rng(seed);
    const auto n = static_cast<Eigen::Index>(form.num_classes());
    auto lp = [p](double a, double b) {
        if (std::isinf(a) || std::isinf(b)) return kInf;
        return std::pow(a + b, 1.0 / p);  // ||(a^(1/p), b^(1/p))||_p
    };
    for (long i = 0; i < n_samples; ++i) {
        const double scale = kScales[i % 3];
        VertexVector f = gaussian(rng, n, scale), g = gaussian(rng, n, scale);
        conform(form, f);
        conform(form, g);
        const NormalContraction C =
            i == 0 ? NormalContraction::identity() : random_contraction(rng, ContractionFamilies{}, i / 3, scale);
        const VertexVector w = f + g, z = f - g;
        const VertexVector mid = 0.5 * (w + z);
        const VertexVector half = apply_contraction(C, 0.5 * (w - z));
        const double lhs = lp(energy(form, mid + half), energy(form, mid - half));
        const double rhs = lp(energy(form, w), energy(form, z));
        report.observe(excess(lhs, rhs), {{"f", vec_json(f)},
                                          {"g", vec_json(g)},
                                          {"contraction", to_json(C)},
                                          {"lhs", value_to_json(lhs)},
                                          {"rhs", value_to_json(rhs)}});
    }
    report.finish();
    return report;
}

VerifyReport check_sup_approximation(const NetworkForm& form, const std::vector<VertexVector>& f_samples,
                                     const std::vector<double>& alpha_schedule, const SolveConfig& cfg, double tol,
                                     double divergence_threshold) {
    VerifyReport report = start("sup_approximation", tol);
    const std::vector<std::string>& K = form.labels();
    for (const auto& f : f_samples) {
        const double E = energy(form, f);
        std::vector<double> values;
        for (double alpha : alpha_schedule) values.push_back(approximating_form(form, alpha, K, 2.0, f, cfg));
        Json inputs{{"f", vec_json(f)}, {"energy", value_to_json(E)}, {"alphas", alpha_schedule}, {"approximants", values}};
        for (std::size_t k = 0; k < values.size(); ++k) {
            report.observe(excess(values[k], E), inputs);  // below E
            if (k + 1 < values.size()) report.observe(excess(values[k], values[k + 1]), inputs);  // monotone
        }
        if (values.empty()) continue;
        if (std::isfinite(E))
            report.observe(std::abs(values.back() - E), inputs);
        else
            report.observe(values.back() >= divergence_threshold ? 0.0 : kInf, inputs);
    }
    report.finish();
    return report;
}

}  // namespace reslab
