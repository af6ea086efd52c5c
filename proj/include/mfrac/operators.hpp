#pragma once

#include <span>
#include <string>

#include "mfrac/exponents.hpp"
#include "mfrac/grid.hpp"

namespace mfrac {

enum class DistanceMode { Torus, Euclidean };

/// Quadrature and cost controls for the potential operators.
struct MfiOptions {
    /// Recursion depth of the singular self-cell refinement. The dropped
    /// all-diagonal micro-cell carries O(2^{-depth*alpha}) of the self-cell
    /// kernel mass, so closed-form comparisons want a larger depth than the
    /// default.
    int refine_depth = 4;
    DistanceMode metric = DistanceMode::Torus;
    /// Refuse evaluations above this many kernel terms.
    double cost_cap = 1e9;
};

// --- multilinear fractional maximal operators -------------------------------

/// M_alpha(f)(x) = sup_{Q in fam, Q ∋ x} |Q|^{alpha/n - m} prod_i int_Q |f_i|.
/// Inputs are cell-constant, so the per-cell value is the exact supremum.
GridFunction mfm(std::span<const GridFunction> fs, const ExponentConfig& cfg,
                 const CubeFamily& fam);

GridFunction mfm_dyadic(std::span<const GridFunction> fs, const ExponentConfig& cfg);

/// Supremum restricted to cubes of side at most 2^k_max (k_max <= 0 is the
/// meaningful range on the unit torus; k_max must not cut below cell scale).
GridFunction mfm_truncated(std::span<const GridFunction> fs, const ExponentConfig& cfg,
                           int k_max);

// --- multilinear fractional integral ----------------------------------------

/// I_alpha(f)(x) = int prod f_i(y_i) / (sum_i |x - y_i|)^{mn - alpha} dy.
/// Midpoint tensor sum over cell centers; the fully diagonal singular term
/// is integrated by recursive corner refinement (see MfiOptions).
GridFunction mfi(std::span<const GridFunction> fs, const ExponentConfig& cfg,
                 const MfiOptions& opt = {});

// --- strong (product-cube) variants, k = 2 -----------------------------------

GridFunction strong_mfm(std::span<const GridFunction> fs, const ExponentConfig& cfg,
                        const CubeFamily& fam1, const CubeFamily& fam2);

GridFunction strong_mfm_dyadic(std::span<const GridFunction> fs, const ExponentConfig& cfg);

GridFunction strong_mfm_truncated(std::span<const GridFunction> fs, const ExponentConfig& cfg,
                                  int k_max);

/// Potential with product kernel prod_s (sum_i |x^(s) - y_i^(s)|)^{-(mn - alpha_s)}.
GridFunction strong_mfi(std::span<const GridFunction> fs, const ExponentConfig& cfg,
                        const MfiOptions& opt = {});

/// Sublinear majorant of the Fefferman-Stein inequality:
/// sup over product cubes of prod_s |Q_s|^{q(alpha_s/n - 1/p)} int_{Q_1 x ... x Q_k} v.
GridFunction fs_majorant(const GridFunction& v, const ExponentConfig& cfg,
                         const CubeFamily& fam1, const CubeFamily& fam2);

// --- shift conjugation --------------------------------------------------------

/// tau_{-t} ∘ M^(d) ∘ tau_t, the dyadic operator seen from a translated grid.
/// t is given in cells of the functions' grid and spans the full domain
/// dimension (both factor blocks for the strong variant).
GridFunction shift_conjugated_dyadic(std::span<const GridFunction> fs,
                                     const ExponentConfig& cfg,
                                     std::span<const std::int64_t> t_cells);

// --- operator specification ----------------------------------------------------

enum class OperatorKind {
    MFM,
    MFM_DYADIC,
    MFM_TRUNCATED,
    MFI,
    STRONG_MFM,
    STRONG_MFM_DYADIC,
    STRONG_MFM_TRUNCATED,
    STRONG_MFI,
    FS_MAJORANT,
};

OperatorKind parse_operator_kind(const std::string& name);
std::string operator_kind_name(OperatorKind k);

/// A fully pinned-down operator: kind, exponents, cube family and quadrature.
struct OperatorSpec {
    OperatorKind kind = OperatorKind::MFM;
    ExponentConfig cfg;
    CubeFamily::Kind family = CubeFamily::Kind::GridAligned;
    int k_max = 0;
    MfiOptions quad{};

    GridFunction apply(std::span<const GridFunction> fs) const;
    bool is_maximal() const;
    bool is_strong() const;
    std::string name() const { return operator_kind_name(kind); }

    /// The family actually used at the given grid level (per factor for the
    /// strong kinds). ShiftedDyadic resolves to the one-third-shift union.
    CubeFamily factor_family(int level) const;
};

} // namespace mfrac
