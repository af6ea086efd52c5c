#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mfrac/operators.hpp"
#include "mfrac/rng.hpp"
#include "mfrac/weights.hpp"

namespace mfrac {

// --- test function generation --------------------------------------------------

/// Trial budget of a norm estimate: every family cube as an indicator tuple,
/// extremal duals at the leading argmax cubes, a seeded batch of log-uniform
/// random step functions, and a few mixed tuples pairing generators per slot.
struct TrialConfig {
    int random_count = 256;
    double range_lo = 0.25;
    double range_hi = 4.0;
    int dual_cube_count = 16;
    bool include_indicators = true;
    std::uint64_t seed = 0;
};

/// Deterministic weight/test-function generator. Spec forms:
///   {"generator":"constant","value":c}
///   {"generator":"step","values":[...]}            block data at a coarser level
///   {"generator":"log-uniform","lo":a,"hi":b}      seeded random cells
///   {"generator":"power","gamma":g,"x0":x}         cell averages of |x-x0|^gamma
///   {"generator":"tensor","factors":[s1,s2]}       product of two half-dim factors
///   {"generator":"file","path":p}
GridFunction generate_weight(const nlohmann::json& spec, int dim, int level,
                             RandomSource& rng);

/// Random log-uniform step function (every cell drawn independently).
GridFunction random_log_uniform(int dim, int level, double lo, double hi, RandomSource& rng);

// --- norm estimation -------------------------------------------------------------

/// One estimation problem in multiplier convention:
///   ratio(f) = || u * Op(f) ||_q / prod_i || w_i f_i ||_{p_i}.
struct EstimateInput {
    OperatorSpec op;
    GridFunction u = GridFunction::constant(1, 0, 1.0);
    std::vector<GridFunction> w;
    TrialConfig trials;
    bool weak = false;                    // weak L^{q,oo} norm on the left
    std::vector<AlignedCube> dual_cubes;  // supports for the extremal duals
};

struct NormEstimate {
    double value = 0.0;
    nlohmann::json witness;
    int trials = 0;
    int skipped = 0;
};

NormEstimate op_norm_estimate(const EstimateInput& in);
NormEstimate weak_norm_estimate(EstimateInput in);

/// Extremal lower bound: f_i = w_i^{-p_i'} chi_Q over every Q of the
/// operator's family (pairs of factor cubes for the strong kinds).
/// kappa = max_ratio / condition_value; the strong-norm suprema make
/// kappa >= 1 whenever condition_value is the matching condition constant.
struct NecessityRecord {
    double max_ratio = 0.0;
    double condition = 0.0;
    double kappa = 0.0;
    nlohmann::json witness;
};

/// max_trials > 0 subsamples the family deterministically (every ceil(N/max)-th
/// cube); used where a full sweep of product cubes is too expensive.
NecessityRecord necessity_lower_bound(const OperatorSpec& op, const GridFunction& u,
                                      std::span<const GridFunction> w, double condition_value,
                                      int max_trials = 0);

// --- individual checks -------------------------------------------------------------

struct CarlesonRule {
    enum class Kind { Power, Threshold } kind = Kind::Power;
    double beta = 1.5;   // c_Q = scale * |Q|^beta for the power rule
    double scale = 1.0;  // scale = 0 gives the degenerate all-zero map

    static CarlesonRule power(double beta, double scale = 1.0) {
        return {Kind::Power, beta, scale};
    }
    static CarlesonRule threshold() { return {Kind::Threshold, 0.0, 1.0}; }
};

struct CarlesonResult {
    double c1 = 0.0;     // testing-condition constant
    double c_hat = 0.0;  // best embedding ratio over the trials
    double rd = 0.0;     // reverse-doubling d of rho^{1-r'}
    std::string verdict = "pass";
    nlohmann::json details;
};

/// Dyadic Carleson embedding: C1 = max_Q c_Q |Q|^{-q} (int_Q rho^{1-r'})^{q/r'};
/// C_hat = max over trials g >= 0 of sum_Q c_Q (avg_Q g)^q / (int g^r rho)^{q/r}.
/// A reverse-doubling failure of rho^{1-r'} gives a hypotheses-unmet verdict.
CarlesonResult carleson_check(const GridFunction& rho, double r, double q,
                              const CarlesonRule& rule,
                              std::span<const GridFunction> trial_gs);

struct DominationResult {
    double max_ratio = 0.0;
    int trials = 0;
    int skipped = 0;
    std::string verdict = "pass";
};

/// Lemma-style A_infinity domination: max over trials of
/// int |I_alpha(f)|^q v / int (M_alpha(f))^q v. v must pass the surrogate.
DominationResult ainfty_domination_check(
    const std::vector<std::vector<GridFunction>>& trial_tuples, const GridFunction& v,
    const ExponentConfig& cfg, const MfiOptions& opt = {}, double ainf_threshold = 1e3);

/// Numerically verify sum_k prod_j a_k^(j) <= prod_j (sum_k (a_k^(j))^{p_j/p})^{p/p_j}.
bool holder_sequence_check(std::span<const std::vector<double>> seqs,
                           std::span<const double> p, double rel_tol = 1e-12,
                           double* lhs_out = nullptr, double* rhs_out = nullptr);

/// Measured constant of the truncated-vs-averaged-shift bound:
/// max_x (M^trunc f)(x)^q / mean_t [(tau_{-t} M^(d) tau_t f)(x)]^q,
/// the mean running over every grid shift (pairs of shifts when k = 2).
double shift_average_constant(std::span<const GridFunction> fs, const ExponentConfig& cfg,
                              int k_max);

// --- suites ---------------------------------------------------------------------------

/// A named weight scenario: grid, exponents, weights by generator, family,
/// trial budget and seed. Loaded from JSON config files.
struct Scenario {
    std::string name;
    std::string theorem;
    int n = 1;
    int level = 4;
    ExponentConfig cfg;
    nlohmann::json weights;  // generator specs: {"u":..., "w":[...], "v":..., "rho":...}
    std::string family = "grid-aligned";
    std::string operator_kind;  // optional: pin M- or I-type where a suite allows both
    TrialConfig trials;
    std::uint64_t seed = 7;
    int mfi_depth = 4;
    DistanceMode metric = DistanceMode::Torus;
    nlohmann::json extra;  // suite-specific knobs (Carleson rule, k_max, ...)

    static Scenario from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    WeightSystem build_weights() const;
    CubeFamily::Kind family_kind() const { return CubeFamily::parse_kind(family); }
};

struct SuiteResult {
    std::string theorem;
    std::string scenario;
    double condition = std::numeric_limits<double>::quiet_NaN();
    double estimated_norm = std::numeric_limits<double>::quiet_NaN();
    double kappa = std::numeric_limits<double>::quiet_NaN();
    std::string verdict = "pass";  // pass | fail | hypotheses-unmet | cost-cap
    nlohmann::json witness;
    std::uint64_t seed = 0;
    int level = 0;
    std::int64_t runtime_ms = 0;
    nlohmann::json details;

    /// Canonical form zeroes runtime_ms so outputs are byte-reproducible;
    /// wall time goes to the sidecar log instead.
    nlohmann::json to_json(bool canonical = true) const;
};

/// Theorem suites: A, B (alias 3.3), C, D, E, F, 3.1, 3.2, 3.4, 3.5, 3.6,
/// 3.7, 3.8, plus G (Carleson), L2.2, L4.1, L4.2, L4.4.
std::vector<std::string> suite_ids();
SuiteResult run_suite(const Scenario& sc);

// --- baselines --------------------------------------------------------------------------

/// Measured constants persisted across runs; a missing key records the
/// current value, a present key enforces the regression tolerance.
class BaselineStore {
public:
    explicit BaselineStore(std::filesystem::path file);

    /// Two-sided comparison |value - base| <= tol*base. Records when absent.
    bool check_within(const std::string& key, double value, double tol, std::string* msg);
    /// One-sided: value >= base * (1 - tol).
    bool check_at_least(const std::string& key, double value, double tol, std::string* msg);
    /// One-sided: value <= base * (1 + tol).
    bool check_at_most(const std::string& key, double value, double tol, std::string* msg);

    bool dirty() const { return dirty_; }
    void save();

private:
    double* find(const std::string& key, double value);

    std::filesystem::path file_;
    nlohmann::json data_;
    bool dirty_ = false;
};

} // namespace mfrac
