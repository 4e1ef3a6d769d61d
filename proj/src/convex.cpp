#include "reslab/convex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "reslab/error.hpp"

namespace reslab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Indicator of {0}: conjugate of the zero function.
ExtNonNeg zero_conjugate(double s) { return s == 0.0 ? ExtNonNeg::zero() : ExtNonNeg::infinity(); }

}  // namespace

ScalarConvex ScalarConvex::power(double c, double p) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw Error(ErrorCode::ConstructionError, "power coefficient must be >= 0");
    if (!(p >= 1.0) || !std::isfinite(p)) throw Error(ErrorCode::ConstructionError, "power exponent must be >= 1");
    return ScalarConvex(ScaledPower{c, p});
}

ScalarConvex ScalarConvex::cosh_minus_one(double c) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw Error(ErrorCode::ConstructionError, "cosh coefficient must be >= 0");
    return ScalarConvex(CoshMinusOne{c});
}

ScalarConvex ScalarConvex::capped(ScalarConvex inner, double cap) {
    if (!(cap > 0.0) || !std::isfinite(cap)) throw Error(ErrorCode::ConstructionError, "cap must be > 0");
    return ScalarConvex(Capped{std::make_shared<const ScalarConvex>(std::move(inner)), cap});
}

ExtNonNeg ScalarConvex::operator()(double t) const {
    return std::visit(
        Overloaded{
            [t](const ScaledPower& w) { return ExtNonNeg::finite(w.c / w.p * std::pow(std::abs(t), w.p)); },
            [t](const CoshMinusOne& w) { return ExtNonNeg::finite(w.c * (std::cosh(t) - 1.0)); },
            [t](const Capped& w) { return std::abs(t) <= w.cap ? (*w.inner)(t) : ExtNonNeg::infinity(); },
        },
        v_);
}

Interval ScalarConvex::subdifferential(double t) const {
    return std::visit(
        Overloaded{
            [t](const ScaledPower& w) -> Interval {
                if (w.p == 1.0) {
                    if (t == 0.0) return {-w.c, w.c};
                    const double g = t > 0.0 ? w.c : -w.c;
                    return {g, g};
                }
                const double g = std::copysign(w.c * std::pow(std::abs(t), w.p - 1.0), t);
                return {g, g};
            },
            [t](const CoshMinusOne& w) -> Interval {
                const double g = w.c * std::sinh(t);
                return {g, g};
            },
            [t](const Capped& w) -> Interval {
                if (std::abs(t) >= w.cap) throw Error(ErrorCode::DomainBoundary, "point on or outside the cap");
                return w.inner->subdifferential(t);
            },
        },
        v_);
}

ExtNonNeg ScalarConvex::conjugate(double s) const {
    return std::visit(
        Overloaded{
            [s](const ScaledPower& w) {
                if (w.c == 0.0) return zero_conjugate(s);
                if (w.p == 1.0) return std::abs(s) <= w.c ? ExtNonNeg::zero() : ExtNonNeg::infinity();
                const double q = w.p / (w.p - 1.0);
                return ExtNonNeg::finite(std::pow(w.c, 1.0 - q) / q * std::pow(std::abs(s), q));
            },
            [s](const CoshMinusOne& w) {
                if (w.c == 0.0) return zero_conjugate(s);
                const double u = std::abs(s) / w.c;
                return ExtNonNeg::finite(w.c * (u * std::asinh(u) - std::sqrt(1.0 + u * u) + 1.0));
            },
            [this, s](const Capped&) { return numeric_conjugate(*this, s); },
        },
        v_);
}

bool ScalarConvex::is_identically_zero() const {
    return std::visit(Overloaded{
                          [](const ScaledPower& w) { return w.c == 0.0; },
                          [](const CoshMinusOne& w) { return w.c == 0.0; },
                          [](const Capped&) { return false; },
                      },
                      v_);
}

double ScalarConvex::cap() const {
    if (const auto* c = std::get_if<Capped>(&v_)) return std::min(c->cap, c->inner->cap());
    return kInf;
}

const ScalarConvex& ScalarConvex::uncapped() const {
    if (const auto* c = std::get_if<Capped>(&v_)) return c->inner->uncapped();
    return *this;
}

std::optional<double> ScalarConvex::homogeneity() const {
    if (const auto* w = std::get_if<ScaledPower>(&v_)) return w->p;
    return std::nullopt;
}

std::optional<ScalarConvex> ScalarConvex::conjugate_function() const {
    const auto* w = std::get_if<ScaledPower>(&v_);
    if (w == nullptr || w->p == 1.0 || w->c == 0.0) return std::nullopt;
    const double q = w->p / (w->p - 1.0);
    return ScalarConvex::power(std::pow(w->c, 1.0 - q), q);
}

ExtNonNeg numeric_conjugate(const ScalarConvex& w, double s) {
    s = std::abs(s);  // w is symmetric
    if (s == 0.0) return ExtNonNeg::zero();
    auto h = [&](double t) {
        const ExtNonNeg v = w(t);
        return v.is_finite() ? s * t - v.to_double() : -kInf;
    };

    double hi = w.cap();
    if (!std::isfinite(hi)) {
        double t = 1.0;
        while (h(2.0 * t) > h(t)) {
            t *= 2.0;
            if (t > 1e15) return ExtNonNeg::infinity();
        }
        hi = 2.0 * t;
    }

    // h is concave on [0, hi]
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = 0.0, b = hi;
    double x1 = b - ratio * (b - a), x2 = a + ratio * (b - a);
    double h1 = h(x1), h2 = h(x2);
    for (int it = 0; it < 300 && b - a > 1e-15 * (1.0 + hi); ++it) {
        if (h1 < h2) {
            a = x1;
            x1 = x2;
            h1 = h2;
            x2 = a + ratio * (b - a);
            h2 = h(x2);
        } else {
            b = x2;
            x2 = x1;
            h2 = h1;
            x1 = b - ratio * (b - a);
            h1 = h(x1);
        }
    }
    const double best = std::max({0.0, h1, h2, h(hi)});
    return ExtNonNeg::finite(best);
}

NormalContraction NormalContraction::min_with(double alpha) {
    if (!(alpha > 0.0)) throw Error(ErrorCode::ConstructionError, "MinWith needs alpha > 0");
    return NormalContraction(MinWith{alpha});
}

NormalContraction NormalContraction::fold_at(double beta) {
    if (!std::isfinite(beta)) throw Error(ErrorCode::ConstructionError, "FoldAt needs finite beta");
    return NormalContraction(FoldAt{beta});
}

NormalContraction NormalContraction::piecewise(std::vector<double> breakpoints, std::vector<double> slopes,
                                               double value_at_zero) {
    if (slopes.size() != breakpoints.size() + 1)
        throw Error(ErrorCode::ConstructionError, "piecewise contraction needs one more slope than breakpoints");
    for (std::size_t i = 1; i < breakpoints.size(); ++i)
        if (!(breakpoints[i] > breakpoints[i - 1]))
            throw Error(ErrorCode::ConstructionError, "breakpoints must be strictly increasing");
    for (double s : slopes)
        if (!(std::abs(s) <= 1.0)) throw Error(ErrorCode::ConstructionError, "slope magnitude exceeds 1");
    if (value_at_zero != 0.0) throw Error(ErrorCode::ConstructionError, "contraction must vanish at 0");
    return NormalContraction(PiecewiseLinear{std::move(breakpoints), std::move(slopes), value_at_zero});
}

namespace {

// integral of the slope function over [a, b], a <= b
double integrate_slopes(const PiecewiseLinear& pl, double a, double b) {
    double total = 0.0;
    const std::size_t n = pl.breakpoints.size();
    for (std::size_t i = 0; i <= n; ++i) {
        const double lo = i == 0 ? -kInf : pl.breakpoints[i - 1];
        const double hi = i == n ? kInf : pl.breakpoints[i];
        const double l = std::max(a, lo), r = std::min(b, hi);
        if (r > l) total += pl.slopes[i] * (r - l);
    }
    return total;
}

}  // namespace

double NormalContraction::operator()(double t) const {
    return std::visit(Overloaded{
                          [t](const Identity&) { return t; },
                          [t](const Negate&) { return -t; },
                          [t](const MinWith& c) { return std::min(t, c.alpha); },
                          [t](const FoldAt& c) { return std::abs(t - c.beta) - std::abs(c.beta); },
                          [t](const PiecewiseLinear& c) {
                              return t >= 0.0 ? c.value_at_zero + integrate_slopes(c, 0.0, t)
                                              : c.value_at_zero - integrate_slopes(c, t, 0.0);
                          },
                      },
                      v_);
}

Eigen::VectorXd apply_contraction(const NormalContraction& c, const Eigen::VectorXd& f) {
    return f.unaryExpr([&c](double t) { return c(t); });
}

}  // namespace reslab
