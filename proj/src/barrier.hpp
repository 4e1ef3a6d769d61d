#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace reslab::detail {

using Sparse = std::vector<std::pair<int, double>>;

inline double dot(const Sparse& a, const Eigen::VectorXd& y) {
    double s = 0.0;
    for (const auto& [i, v] : a) s += v * y[i];
    return s;
}

/// h(a.y + b) with h(t) = k t^2 or k (cosh t - 1).
struct SmoothTerm {
    enum class Kind { Quadratic, Cosh };
    Sparse a;
    double b = 0.0;
    Kind kind = Kind::Quadratic;
    double k = 0.0;
};

/// a.y + b - rho(y_r) <= 0, where rho(r) = (p r / c)^(1/p) when r >= 0 and
/// rho = 0 otherwise. rho is the inverse of the power law (c/p) t^p, so
/// |d| <= rho(r) is the epigraph r >= (c/p)|d|^p.
struct Constraint {
    Sparse a;
    double b = 0.0;
    int r = -1;
    double p = 1.0;
    double c = 1.0;
};

/// Energy G(y) = sum of smooth terms + energy_lin . y + energy_const.
/// Objective F(y) = obj_lin . y + obj_const (+ G(y) when include_energy).
/// Optional energy constraint G(y) - level - y_sigma <= 0 (sigma only in phase I).
struct ConvexProgram {
    int n = 0;
    std::vector<SmoothTerm> smooth;
    Eigen::VectorXd energy_lin;
    double energy_const = 0.0;
    Eigen::VectorXd obj_lin;
    double obj_const = 0.0;
    bool include_energy = true;
    std::vector<Constraint> cons;
    std::optional<double> level;
    int sigma = -1;

    explicit ConvexProgram(int nvars = 0)
        : n(nvars), energy_lin(Eigen::VectorXd::Zero(nvars)), obj_lin(Eigen::VectorXd::Zero(nvars)) {}

    int add_variable();
    double energy(const Eigen::VectorXd& y) const;
    double objective(const Eigen::VectorXd& y) const;
    /// Largest constraint value (including the energy constraint); +inf when
    /// an epigraph variable leaves its domain.
    double max_violation(const Eigen::VectorXd& y) const;
};

struct EngineConfig {
    double tol_rel = 1e-8;
    double tol_abs = 1e-10;
    long max_iters = 100000;
    double norm_bound = 1e9;
    double value_bound = 1e12;
    // variables are confined to |y_i| <= box_factor * norm_bound
    double box_factor = 1e3;
};

enum class EngineStatus { Converged, Unbounded, MaxIters, Infeasible };

struct EngineResult {
    EngineStatus status = EngineStatus::Converged;
    Eigen::VectorXd y;
    double value = 0.0;
    double gap = 0.0;
    long iterations = 0;
};

/// Log-barrier interior-point method with damped Newton centering. Runs a
/// phase I when y0 is not strictly feasible. Unbounded when the minimizer
/// inside the safety box lies beyond norm_bound.
EngineResult solve(const ConvexProgram& prog, Eigen::VectorXd y0, const EngineConfig& cfg);

}  // namespace reslab::detail
