#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "reslab/ext_real.hpp"
#include "reslab/form.hpp"
#include "reslab/solver.hpp"

namespace reslab {

/// R(x, y) = sup { f(x) - f(y) : E(f) <= 1 }. Zero when x and y share a class.
ExtNonNeg elementary_resistance(const NetworkForm& form, std::string_view x, std::string_view y,
                                const SolveConfig& cfg, SolveTrace* trace = nullptr);

/// R_inf(x) = sup { f(x) : E(f) <= 1 }.
ExtNonNeg resistance_to_infinity(const NetworkForm& form, std::string_view x, const SolveConfig& cfg,
                                 SolveTrace* trace = nullptr);

/// R_t(x, y) = sup { t (f(x) - f(y)) - E(f) }. Throws NonPositiveT unless t > 0.
ExtNonNeg t_resistance(const NetworkForm& form, std::string_view x, std::string_view y, double t,
                       const SolveConfig& cfg, SolveTrace* trace = nullptr);

/// R_t,inf(x) = sup { t f(x) - E(f) }.
ExtNonNeg t_resistance_to_infinity(const NetworkForm& form, std::string_view x, double t, const SolveConfig& cfg,
                                   SolveTrace* trace = nullptr);

/// E*(phi) = sup { (phi, f) - E(f) }.
ExtNonNeg conjugate(const NetworkForm& form, const DualVector& phi, const SolveConfig& cfg,
                    SolveTrace* trace = nullptr);

/// Luxemburg functional inf { lambda > 0 : E(f / lambda) <= 1 }, by bisection
/// on lambda.
ExtNonNeg luxemburg(const NetworkForm& form, const VertexVector& f, const SolveConfig& cfg);

/// Orlicz functional sup { (phi, f) : E*(phi) <= 1 }, evaluated through the
/// equivalent primal formula inf_{mu > 0} mu (1 + E(f / mu)). Throws TooLarge
/// above cfg.orlicz_class_cap coordinate classes.
ExtNonNeg orlicz(const NetworkForm& form, const VertexVector& f, const SolveConfig& cfg);

/// E^(alpha,K)(f) = inf_g { E(g) + alpha * sum_{x in K} |f(x) - g(x)|^p }.
double approximating_form(const NetworkForm& form, double alpha, const std::vector<std::string>& K, double p,
                          const VertexVector& f, const SolveConfig& cfg, SolveTrace* trace = nullptr);

struct ResistanceKind {
    enum class Type { Elementary, TResistance };
    Type type = Type::Elementary;
    double t = 0.0;

    static ResistanceKind elementary() { return {}; }
    static ResistanceKind t_resistance(double t) { return {Type::TResistance, t}; }
};

struct ResistanceMatrix {
    std::vector<std::string> labels;
    std::vector<std::vector<ExtNonNeg>> entries;  // entries[i][j] for (labels[i], labels[j])
    ResistanceKind kind;
};

/// All ordered pairs over form.labels(). Pairs in different connected
/// components of a form without Dirichlet conditions, boundary point or
/// non-difference terms are +inf without solving.
ResistanceMatrix resistance_matrix(const NetworkForm& form, ResistanceKind kind, const SolveConfig& cfg,
                                   SolveTrace* trace = nullptr);

}  // namespace reslab
