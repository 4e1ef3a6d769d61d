#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "reslab/form.hpp"
#include "reslab/io.hpp"
#include "reslab/solver.hpp"

namespace reslab {

/// Outcome of one property check. Violations are measured relative to
/// (1 + |rhs|) unless a checker says otherwise; passed iff
/// worst_violation <= tolerance. Sampled checks are evidence, not proofs.
struct VerifyReport {
    std::string property;
    bool passed = true;
    long samples = 0;
    double worst_violation = 0.0;
    Json witness;  // inputs of the worst sample
    double tolerance = 0.0;

    /// Keeps the larger violation and its witness.
    void observe(double violation, const Json& inputs);
    void finish();
};

Json to_json(const VerifyReport& report);
Json to_json(const std::vector<VerifyReport>& reports);

/// n vectors with i.i.d. standard Gaussian coordinates scaled by 0.1, 1, 10 in
/// rotation. Dirichlet classes are set to satisfy their condition.
std::vector<VertexVector> sample_vectors(const NetworkForm& form, int n, std::uint64_t seed);

/// Exponent p if every term is positively p-homogeneous with the same p
/// (hyperedges count as p = 2).
std::optional<double> homogeneity_exponent(const NetworkForm& form);

struct ContractionFamilies {
    bool min_with = true;
    bool fold_at = true;
    bool piecewise = true;
};

/// E(f + Cg) + E(f - Cg) <= E(f + g) + E(f - g) on sampled f, g, C.
VerifyReport check_contraction_compatibility(const NetworkForm& form, ContractionFamilies families, int n_samples,
                                             std::uint64_t seed, double tol);

using Triple = std::array<std::string, 3>;

/// R_t(x, z) <= R_t(x, y) + R_t(y, z). An empty list means all triples of
/// vertex labels.
VerifyReport check_triangle(const NetworkForm& form, double t, const std::vector<Triple>& triples,
                            const SolveConfig& cfg, double tol);

/// R_t(x1, x2) on the glued form equals R_t,1(x1, xi1) + R_t,2(xi2, x2). The
/// labels x2 and xi2 refer to the second form before relabeling.
VerifyReport check_additivity_identify(const NetworkForm& first, const std::string& xi1, const NetworkForm& second,
                                       const std::string& xi2, const std::string& x1, const std::string& x2,
                                       double t, const SolveConfig& cfg, double tol);

/// As above through a connector t^2 / (4 eps), with offset eps t^2.
VerifyReport check_additivity_resistor(const NetworkForm& first, const std::string& xi1, const NetworkForm& second,
                                       const std::string& xi2, const std::string& x1, const std::string& x2,
                                       double t, double eps, const SolveConfig& cfg, double tol);

/// R_t = (p-1)(t/p)^q R^q for p > 1; for p = 1, R_t = 0 when t R < 1 - margin
/// and +inf when t R > 1 + margin (margin = tol). Throws MixedExponents unless
/// the form is positively p-homogeneous. Empty pairs means all pairs.
VerifyReport check_homogeneous_identity(const NetworkForm& form, double p, const std::vector<double>& t_list,
                                        const std::vector<std::pair<std::string, std::string>>& pairs,
                                        const SolveConfig& cfg, double tol);

/// ||f||_L <= ||f||_O <= 2 ||f||_L and Fenchel-Young at a subgradient pair.
/// Throws TooLarge above the Orlicz class cap.
VerifyReport check_fundamental_inequalities(const NetworkForm& form, const std::vector<VertexVector>& f_samples,
                                            const SolveConfig& cfg, double tol);

struct Delta2Estimate {
    double C_hat = 0.0;  // max E(2f)/E(f), +inf when E(2f) is infinite
    double K_hat = 0.0;  // min E(2f)/E(f)
    bool delta2_plausible = false;
    bool nabla2_plausible = false;
    VerifyReport report;  // passes iff delta2_plausible
};

/// Sampled doubling ratios over f with 0 < E(f) < inf.
Delta2Estimate estimate_delta2_nabla2(const NetworkForm& form, const std::vector<VertexVector>& f_samples);

/// Two-coordinate p-contraction property for the map
/// T(w, z) = ((w+z)/2 + C((w-z)/2), (w+z)/2 - C((w-z)/2)) with w = f + g,
/// z = f - g. Throws MixedExponents.
VerifyReport check_p_contraction_map(const NetworkForm& form, double p, int n_samples, std::uint64_t seed,
                                     double tol);

/// With K = all vertices: E^(alpha,K)(f) nondecreasing in alpha, never above
/// E(f), and within tol of E(f) at the last alpha when E(f) is finite. For
/// E(f) = +inf the last approximant must exceed divergence_threshold.
VerifyReport check_sup_approximation(const NetworkForm& form, const std::vector<VertexVector>& f_samples,
                                     const std::vector<double>& alpha_schedule, const SolveConfig& cfg, double tol,
                                     double divergence_threshold = 1.0);

}  // namespace reslab
