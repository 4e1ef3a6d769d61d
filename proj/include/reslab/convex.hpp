#pragma once

#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "reslab/ext_real.hpp"

namespace reslab {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

class ScalarConvex;

/// w(t) = (c/p)|t|^p
struct ScaledPower {
    double c = 1.0;
    double p = 2.0;
};

/// w(t) = c (cosh t - 1)
struct CoshMinusOne {
    double c = 1.0;
};

/// w(t) = inner(t) for |t| <= cap, +inf otherwise
struct Capped {
    std::shared_ptr<const ScalarConvex> inner;
    double cap = 1.0;
};

/// Symmetric convex scalar function w: R -> [0, inf] with w(0) = 0.
///
/// The three variants cover the homogeneous power case, a smooth
/// non-homogeneous case and a bounded effective domain. Values are immutable.
class ScalarConvex {
public:
    using Variant = std::variant<ScaledPower, CoshMinusOne, Capped>;

    static ScalarConvex power(double c, double p);
    static ScalarConvex cosh_minus_one(double c);
    static ScalarConvex capped(ScalarConvex inner, double cap);

    const Variant& variant() const { return v_; }

    ExtNonNeg operator()(double t) const;

    /// Subdifferential at an interior point of the effective domain.
    /// Throws DomainBoundary when |t| >= cap for a capped function.
    Interval subdifferential(double t) const;

    /// w*(s) = sup_t (s t - w(t)).
    ExtNonNeg conjugate(double s) const;

    /// True when w vanishes identically (zero coefficient, no cap).
    bool is_identically_zero() const;

    /// Effective cap (min over nested caps), or +inf.
    double cap() const;

    /// The uncapped function underneath any number of caps.
    const ScalarConvex& uncapped() const;

    /// Exponent p if w is an uncapped ScaledPower.
    std::optional<double> homogeneity() const;

    /// Closed-form conjugate as a ScalarConvex when it belongs to the family
    /// (ScaledPower with p > 1 maps to a ScaledPower with the dual exponent).
    std::optional<ScalarConvex> conjugate_function() const;

private:
    explicit ScalarConvex(Variant v) : v_(std::move(v)) {}
    Variant v_;
};

/// sup_t (s t - w(t)) by bracketed golden-section search, independent of the
/// closed forms. Used for capped functions and as a cross-check.
ExtNonNeg numeric_conjugate(const ScalarConvex& w, double s);

struct Identity {};
struct Negate {};
/// C(t) = min(t, alpha)
struct MinWith {
    double alpha = 1.0;
};
/// C(t) = |t - beta| - |beta|
struct FoldAt {
    double beta = 0.0;
};
/// C(t) = value_at_zero + integral_0^t slope(s) ds with slope piecewise constant
/// between strictly increasing breakpoints.
struct PiecewiseLinear {
    std::vector<double> breakpoints;
    std::vector<double> slopes;  // breakpoints.size() + 1 entries
    double value_at_zero = 0.0;
};

/// 1-Lipschitz map C: R -> R with C(0) = 0.
class NormalContraction {
public:
    using Variant = std::variant<Identity, Negate, MinWith, FoldAt, PiecewiseLinear>;

    static NormalContraction identity() { return NormalContraction(Identity{}); }
    static NormalContraction negate() { return NormalContraction(Negate{}); }
    static NormalContraction min_with(double alpha);
    static NormalContraction fold_at(double beta);
    /// Throws ConstructionError if a slope exceeds 1 in magnitude, the value at
    /// zero is nonzero, or breakpoints are not strictly increasing.
    static NormalContraction piecewise(std::vector<double> breakpoints, std::vector<double> slopes,
                                       double value_at_zero = 0.0);

    const Variant& variant() const { return v_; }

    double operator()(double t) const;

private:
    explicit NormalContraction(Variant v) : v_(std::move(v)) {}
    Variant v_;
};

Eigen::VectorXd apply_contraction(const NormalContraction& c, const Eigen::VectorXd& f);

}  // namespace reslab
