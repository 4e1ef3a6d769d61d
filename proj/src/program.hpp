#pragma once

#include <vector>

#include "barrier.hpp"
#include "reslab/form.hpp"
#include "reslab/solver.hpp"

namespace reslab::detail {

enum class Mode {
    Minimize,    // E(f) - (linear, f)
    Sublevel,    // max (linear, f) s.t. E(f) <= level
    Hyperplane,  // min E(f) s.t. (linear, f) = s
};

struct Request {
    Mode mode = Mode::Minimize;
    VertexVector linear;
    std::vector<Pin> pins;
    std::vector<SeparablePenalty> penalties;
    double level = 1.0;
    double s = 0.0;
};

/// Convex program for one request plus the affine map from its variables back
/// to coordinate classes.
struct Assembly {
    ConvexProgram prog;
    Eigen::VectorXd y0;
    std::vector<Sparse> coord_a;
    std::vector<double> coord_b;
    // linear is not orthogonal to a zero-energy direction
    bool flat_direction_hit = false;
    // pins or constant terms already force infinite energy
    bool infeasible = false;

    VertexVector classes(const Eigen::VectorXd& y) const;
};

Assembly assemble(const NetworkForm& form, const Request& req);

EngineConfig engine_config(const SolveConfig& cfg);

}  // namespace reslab::detail
