#include "reslab/resistance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "reslab/error.hpp"

namespace reslab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_t(double t) {
    if (!(t > 0.0) || !std::isfinite(t)) throw Error(ErrorCode::NonPositiveT, "t must be a positive real");
}

void check_vector(const NetworkForm& form, const VertexVector& v) {
    if (static_cast<std::size_t>(v.size()) != form.num_classes())
        throw Error(ErrorCode::DimensionMismatch, "vector has " + std::to_string(v.size()) + " entries, form has " +
                                                      std::to_string(form.num_classes()));
}

// sup (linear, f) - E(f) = -min (E(f) - (linear, f))
ExtNonNeg negated_minimum(const NetworkForm& form, const VertexVector& linear, const SolveConfig& cfg,
                          SolveTrace* trace) {
    const SolveOutcome out = minimize_composite(form, linear, {}, cfg);
    if (trace) trace->record(out);
    if (out.status == SolveStatus::Unbounded || out.value == -kInf) return ExtNonNeg::infinity();
    return ExtNonNeg::finite(-out.value);
}

double energy_at_scale(const NetworkForm& form, const VertexVector& f, double lambda) {
    return form.evaluate(f / lambda).to_double();
}

}  // namespace

ExtNonNeg elementary_resistance(const NetworkForm& form, std::string_view x, std::string_view y,
                                const SolveConfig& cfg, SolveTrace* trace) {
    const int cx = form.class_of(x), cy = form.class_of(y);
    if (cx == cy) return ExtNonNeg::zero();
    return sup_linear_over_sublevel(form, form.delta(x) - form.delta(y), cfg, trace);
}

ExtNonNeg resistance_to_infinity(const NetworkForm& form, std::string_view x, const SolveConfig& cfg,
                                 SolveTrace* trace) {
    return sup_linear_over_sublevel(form, form.delta(x), cfg, trace);
}

ExtNonNeg t_resistance(const NetworkForm& form, std::string_view x, std::string_view y, double t,
                       const SolveConfig& cfg, SolveTrace* trace) {
    check_t(t);
    if (form.class_of(x) == form.class_of(y)) return ExtNonNeg::zero();
    return negated_minimum(form, t * (form.delta(x) - form.delta(y)), cfg, trace);
}

ExtNonNeg t_resistance_to_infinity(const NetworkForm& form, std::string_view x, double t, const SolveConfig& cfg,
                                   SolveTrace* trace) {
    check_t(t);
    return negated_minimum(form, t * form.delta(x), cfg, trace);
}

ExtNonNeg conjugate(const NetworkForm& form, const DualVector& phi, const SolveConfig& cfg, SolveTrace* trace) {
    check_vector(form, phi);
    if (phi.lpNorm<Eigen::Infinity>() == 0.0) return ExtNonNeg::zero();
    return negated_minimum(form, phi, cfg, trace);
}

ExtNonNeg luxemburg(const NetworkForm& form, const VertexVector& f, const SolveConfig& cfg) {
    cfg.validate();
    check_vector(form, f);
    if (f.lpNorm<Eigen::Infinity>() == 0.0) return ExtNonNeg::zero();

    // E(f / lambda) is nonincreasing in lambda
    double lo = 0.0, hi = 1.0;
    if (energy_at_scale(form, f, hi) <= 1.0) {
        for (;;) {
            const double next = hi / 2.0;
            if (next < cfg.tol_abs) return ExtNonNeg::zero();
            if (energy_at_scale(form, f, next) > 1.0) {
                lo = next;
                break;
            }
            hi = next;
        }
    } else {
        for (;;) {
            lo = hi;
            hi *= 2.0;
            if (hi > cfg.divergence_norm_bound) return ExtNonNeg::infinity();
            if (energy_at_scale(form, f, hi) <= 1.0) break;
        }
    }
    while (hi - lo > 1e-3 * cfg.tol_rel * hi) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (energy_at_scale(form, f, mid) <= 1.0)
            hi = mid;
        else
            lo = mid;
    }
    return ExtNonNeg::finite(hi);
}

ExtNonNeg orlicz(const NetworkForm& form, const VertexVector& f, const SolveConfig& cfg) {
    cfg.validate();
    check_vector(form, f);
    if (form.num_classes() > cfg.orlicz_class_cap)
        throw Error(ErrorCode::TooLarge, std::to_string(form.num_classes()) + " coordinate classes exceed the cap of " +
                                             std::to_string(cfg.orlicz_class_cap));
    const ExtNonNeg lux = luxemburg(form, f, cfg);
    if (lux.is_infinite() || lux == ExtNonNeg::zero()) return lux;

    // h(mu) = mu (1 + E(f / mu)) is convex in mu, hence unimodal in log mu.
    // Its minimizer lies below 2 * lux since h(mu) >= mu and h(lux) <= 2 lux.
    const double L = lux.to_double();
    auto h = [&](double log_mu) {
        const double mu = std::exp(log_mu);
        return mu * (1.0 + energy_at_scale(form, f, mu));
    };
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = std::log(L) - 40.0, b = std::log(2.0 * L);
    double c = b - phi * (b - a), d = a + phi * (b - a);
    double hc = h(c), hd = h(d);
    for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
        // h overflows to +inf for small mu on fast-growing terms; the
        // minimizer is then to the right
        if (hc <= hd && std::isfinite(hc)) {
            b = d;
            d = c;
            hd = hc;
            c = b - phi * (b - a);
            hc = h(c);
        } else {
            a = c;
            c = d;
            hc = hd;
            d = a + phi * (b - a);
            hd = h(d);
        }
    }
    const double best = std::min({hc, hd, h(std::log(2.0 * L)), h(std::log(L))});
    return ExtNonNeg::finite(best);
}

double approximating_form(const NetworkForm& form, double alpha, const std::vector<std::string>& K, double p,
                          const VertexVector& f, const SolveConfig& cfg, SolveTrace* trace) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw Error(ErrorCode::NonPositiveAlpha, "alpha must be positive");
    if (!(p >= 1.0) || !std::isfinite(p)) throw Error(ErrorCode::ConstructionError, "penalty exponent must be >= 1");
    if (K.empty()) throw Error(ErrorCode::ConstructionError, "penalty set K is empty");
    check_vector(form, f);

    // alpha |s|^p is ScaledPower with c = alpha p
    const ScalarConvex w = ScalarConvex::power(alpha * p, p);
    std::vector<SeparablePenalty> penalties;
    for (const auto& label : K) {
        const int c = form.class_of(label);
        penalties.push_back({c, f[c], w});
    }
    const SolveOutcome out = minimize_composite(form, form.zero_vector(), {}, cfg, penalties);
    if (trace) trace->record(out);
    return std::max(0.0, out.value);
}

ResistanceMatrix resistance_matrix(const NetworkForm& form, ResistanceKind kind, const SolveConfig& cfg,
                                   SolveTrace* trace) {
    if (kind.type == ResistanceKind::Type::TResistance) check_t(kind.t);
    ResistanceMatrix out;
    out.labels = form.labels();
    out.kind = kind;
    const std::size_t n = out.labels.size();
    out.entries.assign(n, std::vector<ExtNonNeg>(n, ExtNonNeg::zero()));

    std::vector<int> component(n, 0);
    const bool shortcut = form.kernel_contains_constants() && !form.boundary_class();
    if (shortcut) {
        const auto parts = connectivity_report(form);
        for (std::size_t k = 0; k < parts.size(); ++k)
            for (const auto& label : parts[k]) component[form.vertex_index(label)] = static_cast<int>(k);
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const std::string& x = out.labels[i];
            const std::string& y = out.labels[j];
            if (shortcut && component[i] != component[j]) {
                out.entries[i][j] = ExtNonNeg::infinity();
                continue;
            }
            out.entries[i][j] = kind.type == ResistanceKind::Type::Elementary
                                    ? elementary_resistance(form, x, y, cfg, trace)
                                    : t_resistance(form, x, y, kind.t, cfg, trace);
        }
    }
    return out;
}

}  // namespace reslab
