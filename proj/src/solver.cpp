#include "reslab/solver.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "program.hpp"
#include "reslab/error.hpp"

namespace reslab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_linear(const NetworkForm& form, const VertexVector& linear) {
    if (static_cast<std::size_t>(linear.size()) != form.num_classes())
        throw Error(ErrorCode::DimensionMismatch, "linear functional has " + std::to_string(linear.size()) +
                                                      " entries, form has " + std::to_string(form.num_classes()));
}

void check_nonzero(const VertexVector& linear) {
    if (linear.lpNorm<Eigen::Infinity>() == 0.0) throw Error(ErrorCode::ZeroLinear, "linear functional is zero");
}

SolveStatus status_of(detail::EngineStatus s) {
    switch (s) {
        case detail::EngineStatus::Unbounded: return SolveStatus::Unbounded;
        case detail::EngineStatus::MaxIters: return SolveStatus::MaxIters;
        default: return SolveStatus::Converged;
    }
}

SolveOutcome infinite(double value) {
    SolveOutcome out;
    out.value = value;
    out.status = value < 0.0 ? SolveStatus::Unbounded : SolveStatus::Converged;
    return out;
}

}  // namespace

void SolveConfig::validate() const {
    if (!(tol_rel > 0.0) || !(tol_abs > 0.0) || max_iters <= 0 || !(divergence_norm_bound > 0.0) ||
        !(divergence_value_bound > 0.0) || orlicz_class_cap == 0)
        throw Error(ErrorCode::ConstructionError, "solver settings must be positive");
    if (!(bisection_bracket_growth > 1.0))
        throw Error(ErrorCode::ConstructionError, "bracket growth must exceed 1");
}

const char* to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::Converged: return "Converged";
        case SolveStatus::Unbounded: return "Unbounded";
        case SolveStatus::MaxIters: return "MaxIters";
    }
    return "Unknown";
}

void SolveTrace::record(const SolveOutcome& outcome) {
    ++solves;
    iterations += outcome.iterations;
    if (outcome.status == SolveStatus::MaxIters) hit_max_iters = true;
}

SolveOutcome minimize_composite(const NetworkForm& form, const VertexVector& linear, std::span<const Pin> pins,
                                const SolveConfig& cfg, std::span<const SeparablePenalty> penalties) {
    cfg.validate();
    check_linear(form, linear);
    const int nc = static_cast<int>(form.num_classes());
    for (const auto& pin : pins)
        if (pin.coordinate < 0 || pin.coordinate >= nc)
            throw Error(ErrorCode::DimensionMismatch, "pin on class " + std::to_string(pin.coordinate));
    for (const auto& pen : penalties)
        if (pen.coordinate < 0 || pen.coordinate >= nc)
            throw Error(ErrorCode::DimensionMismatch, "penalty on class " + std::to_string(pen.coordinate));

    detail::Request req;
    req.mode = detail::Mode::Minimize;
    req.linear = linear;
    req.pins.assign(pins.begin(), pins.end());
    req.penalties.assign(penalties.begin(), penalties.end());
    const detail::Assembly as = detail::assemble(form, req);
    if (as.flat_direction_hit) return infinite(-kInf);
    if (as.infeasible) return infinite(kInf);

    const detail::EngineResult r = detail::solve(as.prog, as.y0, detail::engine_config(cfg));
    SolveOutcome out;
    out.iterations = r.iterations;
    if (r.status == detail::EngineStatus::Infeasible) {
        out.value = kInf;
        return out;
    }
    out.status = status_of(r.status);
    if (out.status == SolveStatus::Unbounded) {
        out.value = -kInf;
        return out;
    }
    out.gap = r.gap;
    VertexVector f = as.classes(r.y);
    // exact objective at a point, and that value plus its rounding error
    auto objective = [&](const VertexVector& g, double& bound) {
        ExtNonNeg energy = form.evaluate(g);
        for (const auto& pen : penalties) energy += pen.w(g[pen.coordinate] - pen.target);
        if (!energy.is_finite()) return bound = kInf;
        const double e = energy.to_double(), pairing = linear.dot(g);
        bound = e - pairing + 8.0 * std::numeric_limits<double>::epsilon() *
                                  (e + linear.cwiseProduct(g).cwiseAbs().sum());
        return e - pairing;
    };
    double bound;
    double value = objective(f, bound);
    // On a flat recession ray the iterate sits near the safety box, where the
    // objective cancels to about eps |f|. Points scaled toward the origin stay
    // feasible when every pin is at zero; keep the one with the best bound.
    bool scalable = f.lpNorm<Eigen::Infinity>() > cfg.divergence_norm_bound;
    for (const auto& pin : pins) scalable = scalable && pin.value == 0.0;
    if (scalable) {
        VertexVector best = f;
        for (double s = 0.5; s * f.lpNorm<Eigen::Infinity>() > 1e-12; s *= 0.5) {
            double b;
            const double v = objective(s * f, b);
            if (b < bound) {
                bound = b;
                value = v;
                best = s * f;
            }
        }
        f = std::move(best);
    }
    out.value = std::isfinite(value) ? value : r.value;
    out.argopt = std::move(f);
    return out;
}

SolveOutcome maximize_over_sublevel(const NetworkForm& form, const VertexVector& linear, const SolveConfig& cfg) {
    cfg.validate();
    check_linear(form, linear);
    detail::Request req;
    req.mode = detail::Mode::Sublevel;
    req.linear = linear;
    const detail::Assembly as = detail::assemble(form, req);
    if (as.flat_direction_hit) return infinite(kInf);

    SolveOutcome out;
    if (as.infeasible) return out;  // only f = 0 remains
    const detail::EngineResult r = detail::solve(as.prog, as.y0, detail::engine_config(cfg));
    out.iterations = r.iterations;
    out.status = status_of(r.status);
    if (r.status == detail::EngineStatus::Infeasible) return out;
    if (out.status == SolveStatus::Unbounded) {
        out.status = SolveStatus::Converged;
        out.value = kInf;
        return out;
    }
    out.gap = r.gap;
    VertexVector f = as.classes(r.y);
    // The barrier point is strictly inside {E <= 1}. Scaling out to the level
    // set stays feasible (the constraints are linear and homogeneous) and can
    // only raise a positive pairing.
    if (linear.dot(f) > 0.0 && form.evaluate(f) < 1.0) {
        double lo = 1.0, hi = 2.0;
        while (form.evaluate(hi * f) <= 1.0 && hi < 1e6) {
            lo = hi;
            hi *= 2.0;
        }
        for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            (form.evaluate(mid * f) <= 1.0 ? lo : hi) = mid;
        }
        f *= lo;
    }
    out.value = std::max(0.0, linear.dot(f));
    out.argopt = std::move(f);
    return out;
}

ExtNonNeg sup_linear_over_sublevel(const NetworkForm& form, const VertexVector& linear, const SolveConfig& cfg,
                                   SolveTrace* trace) {
    check_linear(form, linear);
    check_nonzero(linear);
    const SolveOutcome out = maximize_over_sublevel(form, linear, cfg);
    if (trace) trace->record(out);
    return std::isfinite(out.value) ? ExtNonNeg::finite(out.value) : ExtNonNeg::infinity();
}

SolveOutcome min_energy_on_hyperplane(const NetworkForm& form, const VertexVector& linear, double s,
                                      const SolveConfig& cfg) {
    cfg.validate();
    check_linear(form, linear);
    detail::Request req;
    req.mode = detail::Mode::Hyperplane;
    req.linear = linear;
    req.s = s;
    const detail::Assembly as = detail::assemble(form, req);
    if (as.flat_direction_hit) return SolveOutcome{};
    if (as.infeasible) return infinite(kInf);

    const detail::EngineResult r = detail::solve(as.prog, as.y0, detail::engine_config(cfg));
    SolveOutcome out;
    out.iterations = r.iterations;
    if (r.status == detail::EngineStatus::Infeasible) {
        out.value = kInf;
        return out;
    }
    out.status = r.status == detail::EngineStatus::MaxIters ? SolveStatus::MaxIters : SolveStatus::Converged;
    out.gap = r.gap;
    VertexVector f = as.classes(r.y);
    const ExtNonNeg e = form.evaluate(f);
    out.value = e.is_finite() ? e.to_double() : std::max(0.0, r.value);
    out.argopt = std::move(f);
    return out;
}

ExtNonNeg sup_linear_by_bisection(const NetworkForm& form, const VertexVector& linear, const SolveConfig& cfg,
                                  SolveTrace* trace) {
    cfg.validate();
    check_linear(form, linear);
    check_nonzero(linear);
    auto m = [&](double s) {
        const SolveOutcome out = min_energy_on_hyperplane(form, linear, s, cfg);
        if (trace) trace->record(out);
        return out.value;
    };
    double lo = 0.0, hi = 1.0;
    while (m(hi) <= 1.0) {
        lo = hi;
        hi *= cfg.bisection_bracket_growth;
        if (hi > cfg.divergence_norm_bound) return ExtNonNeg::infinity();
    }
    while (hi - lo > cfg.tol_rel * (1.0 + hi)) {
        const double mid = 0.5 * (lo + hi);
        if (m(mid) <= 1.0)
            lo = mid;
        else
            hi = mid;
    }
    return ExtNonNeg::finite(0.5 * (lo + hi));
}

}  // namespace reslab
