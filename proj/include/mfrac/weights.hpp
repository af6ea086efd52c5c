#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mfrac/exponents.hpp"
#include "mfrac/grid.hpp"

namespace mfrac {

/// The weights of a two-weight scenario. u is the left-hand side weight,
/// w the m right-hand weights; v is the Fefferman-Stein target and rho the
/// Carleson weight when present. All must be strictly positive. For the
/// strong suites, product-type weights keep their factor decompositions
/// w_i = w_i^(1) (x) w_i^(2) explicitly.
struct WeightSystem {
    std::optional<GridFunction> u;
    std::vector<GridFunction> w;
    std::optional<GridFunction> v;
    std::optional<GridFunction> rho;
    std::vector<std::vector<GridFunction>> w_factors;  // [i][s], factors on torus^n

    /// Strict positivity everywhere; factor products reconstruct w_i to 1e-12.
    void validate() const;
};

/// Result of a condition-constant computation: the supremum, the cube(s)
/// realizing it, the family searched and the exponents used.
struct ConditionReport {
    double constant = 0.0;
    std::vector<AlignedCube> argmax;
    std::string family;
    nlohmann::json exponents;

    nlohmann::json to_json() const;
};

// --- Muckenhoupt-type constants ----------------------------------------------

/// Vector Muckenhoupt constant:
/// sup_Q (avg_Q prod w_i^{p/p_i})^{1/p} prod_i (avg_Q w_i^{1-p_i'})^{1/p_i'};
/// the i-th factor is (inf_Q w_i)^{-1} when p_i = 1.
ConditionReport ap_vector_constant(std::span<const GridFunction> w, std::span<const double> p,
                                   const CubeFamily& fam);

/// Muckenhoupt-Wheeden constant:
/// sup_Q (avg_Q (prod w_i)^q)^{1/q} prod_i (avg_Q w_i^{-p_i'})^{1/p_i'}.
ConditionReport apq_vector_constant(std::span<const GridFunction> w, std::span<const double> p,
                                    double q, const CubeFamily& fam);

/// m = 1 specialization of the vector constant (classical A_p, in the
/// (avg w)^{1/p} (avg w^{1-p'})^{1/p'} normalization).
ConditionReport ap_constant(const GridFunction& w, double p, const CubeFamily& fam);

/// Exponential A_infinity surrogate: sup_Q (avg_Q w) exp(avg_Q log(1/w)).
/// Membership verdict is constant <= threshold; stored in the exponents block.
ConditionReport ainf_surrogate(const GridFunction& w, const CubeFamily& fam,
                               double threshold = 1e3);

/// Reverse doubling: the best d with d*rho(Q') <= rho(Q) over all
/// (parent, child) pairs, child a 2^n-subdivision piece. Dyadic mode checks
/// dyadic parents; general mode checks every grid-aligned parent with even
/// side. argmax holds {parent, child}.
ConditionReport rd_constant(const GridFunction& w, bool dyadic);

/// Power-bump constant. Variant 1 bumps both sides:
///   sup |Q|^{alpha/n+1/q-1/p} (avg u^{qr})^{1/(qr)} prod (avg w_i^{-p_i' r})^{1/(p_i' r)};
/// variant 2 keeps the left side unbumped, with exponent 1/(qr) exactly as
/// printed; set unbumped_exponent_1q for the 1/q reading.
ConditionReport power_bump_constant(const GridFunction& u, std::span<const GridFunction> w,
                                    const ExponentConfig& cfg, double r, int variant,
                                    const CubeFamily& fam, bool unbumped_exponent_1q = false);

/// Two-weight condition:
/// sup_Q |Q|^{alpha/n+1/q-1/p} (avg_Q u^q)^{1/q} prod_i (avg_Q w_i^{-p_i'})^{1/p_i'}.
ConditionReport twc_constant(const GridFunction& u, std::span<const GridFunction> w,
                             const ExponentConfig& cfg, const CubeFamily& fam);

/// Strong two-weight condition over pairs of factor cubes:
/// sup prod_s |Q_s|^{alpha_s/n-m} (int_{Q1 x Q2} u^q)^{1/q}
///     prod_i (int_{Q1 x Q2} w_i^{-p_i'})^{1/p_i'}.
ConditionReport strong_twc_constant(const GridFunction& u, std::span<const GridFunction> w,
                                    const ExponentConfig& cfg, const CubeFamily& fam1,
                                    const CubeFamily& fam2);

/// Trace (Adams-type) condition:
/// sup (int_{Q1 x ... x Qk} u^q) prod_s |Q_s|^{q(alpha_s/n - 1/p)}.
/// k = 1 uses a single family and covers the plain-operator trace condition.
ConditionReport trace_constant(const GridFunction& u, const ExponentConfig& cfg,
                               std::span<const CubeFamily> fams);

/// Strong one-weight condition over pairs of factor cubes (averages over the
/// product cube): sup (avg (prod w_i)^q)^{1/q} prod_i (avg w_i^{-p_i'})^{1/p_i'}.
ConditionReport strong_one_weight_constant(std::span<const GridFunction> w,
                                           std::span<const double> p, double q,
                                           const CubeFamily& fam1, const CubeFamily& fam2);

/// Constituents of the vector-class inclusion properties: the individual
/// A_{p_i} constants against the joint constant, and the derived classes of
/// (prod w_i)^q and w_i^{-p_i'}. The orderings are measured and reported;
/// only finiteness is asserted.
struct Lemma22Report {
    ConditionReport vector_constant;
    std::vector<ConditionReport> individual;
    double individual_product = 0.0;
    bool product_bound_holds = false;  // vector <= prod individual (measured)
    ConditionReport apq;
    ConditionReport product_power_class;             // (prod w_i)^q in A_{mq}
    std::vector<ConditionReport> dual_power_classes;  // w_i^{-p_i'} in A_{mp_i'}
    bool pass = false;

    nlohmann::json to_json() const;
};

Lemma22Report inclusion_check_lemma22(std::span<const GridFunction> w,
                                      std::span<const double> p, double q, double alpha,
                                      int n, const CubeFamily& fam);

} // namespace mfrac
