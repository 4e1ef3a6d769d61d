#pragma once

#include <optional>
#include <span>

#include "reslab/convex.hpp"
#include "reslab/ext_real.hpp"
#include "reslab/form.hpp"

namespace reslab {

struct SolveConfig {
    double tol_rel = 1e-8;
    double tol_abs = 1e-10;
    long max_iters = 100000;
    double divergence_norm_bound = 1e9;
    double divergence_value_bound = 1e12;
    double bisection_bracket_growth = 2.0;
    /// Largest coordinate-class count accepted by the Orlicz functional.
    std::size_t orlicz_class_cap = 6;

    /// Throws ConstructionError unless every field is positive and the
    /// bracket growth exceeds 1.
    void validate() const;
};

enum class SolveStatus { Converged, Unbounded, MaxIters };

const char* to_string(SolveStatus status);

/// Result of one optimization call.
///
/// `value` is the optimal objective (signed; -inf when Unbounded, +inf when
/// the constraints leave no point of finite energy). `gap` bounds the
/// suboptimality of `value` on Converged.
struct SolveOutcome {
    double value = 0.0;
    std::optional<VertexVector> argopt;
    SolveStatus status = SolveStatus::Converged;
    long iterations = 0;
    double gap = 0.0;
};

/// Accumulates the statuses of the solves behind one derived quantity so that
/// callers can tell whether any of them stopped at the iteration limit.
struct SolveTrace {
    bool hit_max_iters = false;
    long solves = 0;
    long iterations = 0;

    void record(const SolveOutcome& outcome);
};

/// Fixes coordinate class `coordinate` to `value`.
struct Pin {
    int coordinate = 0;
    double value = 0.0;
};

/// Adds w(f(coordinate) - target) to the energy.
struct SeparablePenalty {
    int coordinate = 0;
    double target = 0.0;
    ScalarConvex w;
};

/// min over f of E(f) - (linear, f) (+ penalties) subject to the pins.
///
/// Constant directions that leave every term unchanged are gauge-fixed; when
/// `linear` is not orthogonal to such a direction the problem is reported
/// Unbounded without solving.
SolveOutcome minimize_composite(const NetworkForm& form, const VertexVector& linear, std::span<const Pin> pins,
                                const SolveConfig& cfg, std::span<const SeparablePenalty> penalties = {});

/// max (linear, f) subject to E(f) <= 1, solved directly. value is +inf when
/// the supremum is infinite.
SolveOutcome maximize_over_sublevel(const NetworkForm& form, const VertexVector& linear, const SolveConfig& cfg);

/// sup { (linear, f) : E(f) <= 1 }. Throws ZeroLinear when linear == 0.
ExtNonNeg sup_linear_over_sublevel(const NetworkForm& form, const VertexVector& linear, const SolveConfig& cfg,
                                   SolveTrace* trace = nullptr);

/// m(s) = min { E(f) : (linear, f) = s }, one variable eliminated.
SolveOutcome min_energy_on_hyperplane(const NetworkForm& form, const VertexVector& linear, double s,
                                      const SolveConfig& cfg);

/// The same supremum as sup_linear_over_sublevel, computed as
/// sup { s : m(s) <= 1 } by geometric bracketing and bisection.
ExtNonNeg sup_linear_by_bisection(const NetworkForm& form, const VertexVector& linear, const SolveConfig& cfg,
                                  SolveTrace* trace = nullptr);

}  // namespace reslab
