#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "mfrac/errors.hpp"

namespace mfrac {

/// The exponent tuple (n, m, k, p_1..p_m, q, alpha_1..alpha_k) with the
/// derived joint exponent 1/p = sum 1/p_i and the conjugates p_i'.
/// k = 1 for the plain operators; k = 2 for the strong (product-cube) ones,
/// in which case functions live on the torus of dimension k*n.
struct ExponentConfig {
    int n = 1;
    int m = 1;
    int k = 1;
    std::vector<double> p;      // size m, each >= 1
    double q = 1.0;
    std::vector<double> alpha;  // size k

    static ExponentConfig plain(int n, int m, std::vector<double> p, double q, double alpha);
    static ExponentConfig strong(int n, int m, std::vector<double> p, double q,
                                 std::vector<double> alpha);

    /// 1/p = sum_i 1/p_i, exactly as defined.
    double p_total() const;

    /// Conjugate exponent p_i' = p_i / (p_i - 1); +infinity when p_i = 1.
    double p_conj(int i) const;

    int domain_dim() const { return n * k; }

    /// Shared well-formedness: sizes, p_i >= 1, q > 0, 0 <= alpha_s < m*n.
    void validate_basic() const;

    /// Hypotheses of the strong-type two-weight theorems:
    /// 1 < p_i < infinity, p < q < infinity, 0 < alpha_s < m*n.
    void validate_strict() const;

    /// True when 1/q = 1/p - alpha/n holds to 1e-12 (one-weight regime).
    bool one_weight_relation(double tol = 1e-12) const;
};

inline double ExponentConfig::p_total() const {
    double inv = 0.0;
    for (double pi : p) inv += 1.0 / pi;
    return 1.0 / inv;
}

inline double ExponentConfig::p_conj(int i) const {
    const double pi = p.at(static_cast<std::size_t>(i));
    if (pi == 1.0) return std::numeric_limits<double>::infinity();
    return pi / (pi - 1.0);
}

inline ExponentConfig ExponentConfig::plain(int n, int m, std::vector<double> p, double q,
                                            double alpha) {
    ExponentConfig c{n, m, 1, std::move(p), q, {alpha}};
    c.validate_basic();
    return c;
}

inline ExponentConfig ExponentConfig::strong(int n, int m, std::vector<double> p, double q,
                                             std::vector<double> alpha) {
    ExponentConfig c{n, m, static_cast<int>(alpha.size()), std::move(p), q, std::move(alpha)};
    c.validate_basic();
    return c;
}

inline void ExponentConfig::validate_basic() const {
    if (n < 1 || n > 2) throw ParameterError("n must be 1 or 2");
    if (m < 1) throw ParameterError("m must be positive");
    if (k < 1 || k > 2) throw ParameterError("k must be 1 or 2");
    if (static_cast<int>(p.size()) != m) throw ParameterError("p vector must have m entries");
    if (static_cast<int>(alpha.size()) != k)
        throw ParameterError("alpha vector must have k entries");
    for (double pi : p)
        if (!(pi >= 1.0)) throw ParameterError("every p_i must satisfy p_i >= 1");
    if (!(q > 0.0)) throw ParameterError("q must be positive");
    for (double a : alpha)
        if (!(a >= 0.0) || !(a < m * n))
            throw ParameterError("alpha must satisfy 0 <= alpha < m*n");
}

inline void ExponentConfig::validate_strict() const {
    validate_basic();
    for (double pi : p)
        if (!(pi > 1.0)) throw ParameterError("theorem requires p_i > 1");
    if (!(p_total() < q)) throw ParameterError("theorem requires p < q");
    for (double a : alpha)
        if (!(a > 0.0)) throw ParameterError("theorem requires alpha > 0");
}

inline bool ExponentConfig::one_weight_relation(double tol) const {
    const double lhs = 1.0 / q;
    const double rhs = 1.0 / p_total() - alpha[0] / n;
    return std::abs(lhs - rhs) <= tol;
}

} // namespace mfrac
