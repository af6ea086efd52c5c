#include "mfrac/weights.hpp"

#include <algorithm>
#include <cmath>

namespace mfrac {

namespace {

void require_positive(const GridFunction& f, const char* what) {
    if (!f.strictly_positive())
        throw ParameterError(std::string(what) + " must be strictly positive");
}

nlohmann::json cube_json(const AlignedCube& q) {
    nlohmann::json j;
    j["grid_level"] = q.grid_level;
    j["start"] = std::vector<std::int64_t>(q.start.begin(), q.start.begin() + q.dim);
    j["count"] = std::vector<std::int64_t>(q.count.begin(), q.count.begin() + q.dim);
    return j;
}

template <class Fn>
ConditionReport sup_over(const CubeFamily& fam, Fn&& value) {
    ConditionReport rep;
    rep.family = fam.describe();
    rep.constant = -1.0;
    for (const AlignedCube& q : fam.enumerate()) {
        const double v = value(q);
        if (v > rep.constant) {
            rep.constant = v;
            rep.argmax = {q};
        }
    }
    return rep;
}

template <class Fn>
ConditionReport sup_over_pairs(const CubeFamily& fam1, const CubeFamily& fam2, Fn&& value) {
    ConditionReport rep;
    rep.family = fam1.describe() + " x " + fam2.describe();
    rep.constant = -1.0;
    const auto cubes1 = fam1.enumerate();
    const auto cubes2 = fam2.enumerate();
    for (const AlignedCube& q1 : cubes1)
        for (const AlignedCube& q2 : cubes2) {
            const double v = value(q1, q2);
            if (v > rep.constant) {
                rep.constant = v;
                rep.argmax = {q1, q2};
            }
        }
    return rep;
}

AlignedCube product_box(const AlignedCube& q1, const AlignedCube& q2) {
    AlignedCube box;
    box.dim = q1.dim + q2.dim;
    box.grid_level = q1.grid_level;
    for (int a = 0; a < q1.dim; ++a) {
        box.start[a] = q1.start[a];
        box.count[a] = q1.count[a];
    }
    for (int a = 0; a < q2.dim; ++a) {
        box.start[q1.dim + a] = q2.start[a];
        box.count[q1.dim + a] = q2.count[a];
    }
    return box;
}

} // namespace

void WeightSystem::validate() const {
    if (u) require_positive(*u, "u");
    for (const auto& wi : w) require_positive(wi, "w_i");
    if (v) require_positive(*v, "v");
    if (rho) require_positive(*rho, "rho");
    if (!w_factors.empty()) {
        if (w_factors.size() != w.size())
            throw ShapeError("factor list does not match weight count");
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (w_factors[i].size() != 2) throw ShapeError("factor decompositions need k = 2");
            const GridFunction prod = tensor_product(w_factors[i][0], w_factors[i][1]);
            require_same_grid(prod, w[i]);
            for (std::size_t c = 0; c < prod.size(); ++c) {
                const double ref = w[i][c];
                if (std::abs(prod[c] - ref) > 1e-12 * std::max(1.0, std::abs(ref)))
                    throw ParameterError("product-type weight does not reconstruct its tensor");
            }
        }
    }
}

nlohmann::json ConditionReport::to_json() const {
    nlohmann::json j;
    j["constant"] = std::isfinite(constant) ? nlohmann::json(constant) : nlohmann::json("infinity");
    nlohmann::json am = nlohmann::json::array();
    for (const auto& q : argmax) am.push_back(cube_json(q));
    j["argmax"] = am;
    j["family"] = family;
    j["exponents"] = exponents;
    return j;
}

// --- vector Muckenhoupt -------------------------------------------------------

ConditionReport ap_vector_constant(std::span<const GridFunction> w, std::span<const double> p,
                                   const CubeFamily& fam) {
    if (w.empty() || w.size() != p.size()) throw ShapeError("weights and exponents mismatch");
    for (double pi : p)
        if (!(pi >= 1.0)) throw ParameterError("A_p requires p_i >= 1");
    for (const auto& wi : w) {
        require_positive(wi, "w_i");
        require_same_grid(w.front(), wi);
    }
    const int m = static_cast<int>(w.size());
    double inv_p = 0.0;
    for (double pi : p) inv_p += 1.0 / pi;
    const double pj = 1.0 / inv_p;

    // joint density prod w_i^{p/p_i}
    GridFunction joint = pointwise_pow(w[0], pj / p[0]);
    for (int i = 1; i < m; ++i)
        joint = pointwise_product(joint, pointwise_pow(w[i], pj / p[i]));
    std::vector<std::optional<GridFunction>> sigma(m);
    std::vector<double> pc(m);
    for (int i = 0; i < m; ++i) {
        if (p[i] > 1.0) {
            pc[i] = p[i] / (p[i] - 1.0);
            sigma[i] = pointwise_pow(w[i], 1.0 - pc[i]);
        }
    }

    ConditionReport rep = sup_over(fam, [&](const AlignedCube& q) {
        double v = std::pow(average(joint, q), 1.0 / pj);
        for (int i = 0; i < m; ++i) {
            if (sigma[i])
                v *= std::pow(average(*sigma[i], q), 1.0 / pc[i]);
            else
                v /= min_over(w[i], q);
        }
        return v;
    });
    rep.exponents = {{"p", std::vector<double>(p.begin(), p.end())}, {"m", m}};
    return rep;
}

ConditionReport apq_vector_constant(std::span<const GridFunction> w, std::span<const double> p,
                                    double q, const CubeFamily& fam) {
    if (w.empty() || w.size() != p.size()) throw ShapeError("weights and exponents mismatch");
    for (double pi : p)
        if (!(pi >= 1.0)) throw ParameterError("A_{p,q} requires p_i >= 1");
    double inv_p = 0.0;
    for (double pi : p) inv_p += 1.0 / pi;
    if (!(1.0 / inv_p < q)) throw ParameterError("A_{p,q} requires p < q");
    for (const auto& wi : w) {
        require_positive(wi, "w_i");
        require_same_grid(w.front(), wi);
    }
    const int m = static_cast<int>(w.size());

    GridFunction prod = w[0];
    for (int i = 1; i < m; ++i) prod = pointwise_product(prod, w[i]);
    const GridFunction prod_q = pointwise_pow(prod, q);
    std::vector<std::optional<GridFunction>> sigma(m);
    std::vector<double> pc(m);
    for (int i = 0; i < m; ++i) {
        if (p[i] > 1.0) {
            pc[i] = p[i] / (p[i] - 1.0);
            sigma[i] = pointwise_pow(w[i], -pc[i]);
        }
    }

    ConditionReport rep = sup_over(fam, [&](const AlignedCube& qb) {
        double v = std::pow(average(prod_q, qb), 1.0 / q);
        for (int i = 0; i < m; ++i) {
            if (sigma[i])
                v *= std::pow(average(*sigma[i], qb), 1.0 / pc[i]);
            else
                v /= min_over(w[i], qb);
        }
        return v;
    });
    rep.exponents = {{"p", std::vector<double>(p.begin(), p.end())}, {"q", q}, {"m", m}};
    return rep;
}

ConditionReport ap_constant(const GridFunction& w, double p, const CubeFamily& fam) {
    const GridFunction ws[] = {w};
    const double ps[] = {p};
    return ap_vector_constant(ws, ps, fam);
}

ConditionReport ainf_surrogate(const GridFunction& w, const CubeFamily& fam, double threshold) {
    require_positive(w, "w");
    const GridFunction lw = pointwise_log(w);
    ConditionReport rep = sup_over(fam, [&](const AlignedCube& q) {
        return average(w, q) * std::exp(-average(lw, q));
    });
    rep.exponents = {{"threshold", threshold}, {"passes", rep.constant <= threshold}};
    return rep;
}

ConditionReport rd_constant(const GridFunction& w, bool dyadic) {
    require_positive(w, "rho");
    if (w.level() < 1) throw ParameterError("reverse doubling needs level >= 1");
    const int L = w.level();
    const int dim = w.dimension();
    const std::int64_t n = w.cells_per_axis();

    double max_ratio = -1.0;
    AlignedCube best_parent, best_child;
    auto consider = [&](const AlignedCube& parent) {
        const double pmass = integrate(w, parent);
        // the 2^dim half-subdivision pieces
        for (int mask = 0; mask < (1 << dim); ++mask) {
            AlignedCube child = parent;
            for (int a = 0; a < dim; ++a) {
                const std::int64_t half = parent.count[a] / 2;
                child.count[a] = half;
                if ((mask >> a) & 1) child.start[a] = (parent.start[a] + half) % n;
            }
            const double ratio = integrate(w, child) / pmass;
            if (ratio > max_ratio) {
                max_ratio = ratio;
                best_parent = parent;
                best_child = child;
            }
        }
    };

    if (dyadic) {
        for (const AlignedCube& q : CubeFamily::dyadic(dim, L).enumerate())
            if (q.count[0] >= 2) consider(q);
    } else if (dim == 1) {
        for (std::int64_t len = 2; len <= n; len += 2)
            for (std::int64_t a = 0; a + len <= n; ++a) {
                AlignedCube q;
                q.dim = 1;
                q.grid_level = L;
                q.start[0] = a;
                q.count[0] = len;
                consider(q);
            }
    } else {
        // all grid-aligned squares with even side, no wrap
        for (std::int64_t len = 2; len <= n; len += 2) {
            Index idx{};
            bool done = false;
            while (!done) {
                AlignedCube q;
                q.dim = dim;
                q.grid_level = L;
                bool ok = true;
                for (int a = 0; a < dim; ++a) {
                    q.start[a] = idx[a];
                    q.count[a] = len;
                    if (idx[a] + len > n) ok = false;
                }
                if (ok) consider(q);
                int a = dim - 1;
                while (a >= 0) {
                    if (++idx[a] + len <= n) break;
                    idx[a] = 0;
                    --a;
                }
                if (a < 0) done = true;
            }
        }
    }

    ConditionReport rep;
    rep.constant = 1.0 / max_ratio;  // best d
    rep.argmax = {best_parent, best_child};
    rep.family = dyadic ? "dyadic parents" : "grid-aligned parents";
    rep.exponents = {{"mode", dyadic ? "dyadic" : "general"}};
    return rep;
}

ConditionReport power_bump_constant(const GridFunction& u, std::span<const GridFunction> w,
                                    const ExponentConfig& cfg, double r, int variant,
                                    const CubeFamily& fam, bool unbumped_exponent_1q) {
    if (!(r > 1.0)) throw ParameterError("power bump requires r > 1");
    if (variant != 1 && variant != 2) throw ParameterError("variant must be 1 or 2");
    cfg.validate_basic();
    require_positive(u, "u");
    const int m = cfg.m;
    if (static_cast<int>(w.size()) != m) throw ShapeError("weight count mismatch");
    const double p = cfg.p_total();
    const double q = cfg.q;
    const double vol_expo = cfg.alpha[0] / cfg.n + 1.0 / q - 1.0 / p;

    const GridFunction left =
        variant == 1 ? pointwise_pow(u, q * r) : pointwise_pow(u, q);
    const double left_expo = variant == 1 ? 1.0 / (q * r)
                             : unbumped_exponent_1q ? 1.0 / q
                                                    : 1.0 / (q * r);
    std::vector<GridFunction> sig;
    std::vector<double> sig_expo;
    for (int i = 0; i < m; ++i) {
        require_positive(w[i], "w_i");
        const double pc = cfg.p_conj(i);
        if (!std::isfinite(pc)) throw ParameterError("power bump requires p_i > 1");
        sig.push_back(pointwise_pow(w[i], -pc * r));
        sig_expo.push_back(1.0 / (pc * r));
    }

    ConditionReport rep = sup_over(fam, [&](const AlignedCube& qb) {
        double v = std::pow(qb.volume(), vol_expo) * std::pow(average(left, qb), left_expo);
        for (int i = 0; i < m; ++i) v *= std::pow(average(sig[i], qb), sig_expo[i]);
        return v;
    });
    rep.exponents = {{"r", r},
                     {"variant", variant},
                     {"q", q},
                     {"p", cfg.p},
                     {"alpha", cfg.alpha[0]},
                     {"unbumped_exponent_1q", unbumped_exponent_1q}};
    return rep;
}

ConditionReport twc_constant(const GridFunction& u, std::span<const GridFunction> w,
                             const ExponentConfig& cfg, const CubeFamily& fam) {
    cfg.validate_basic();
    for (double pi : cfg.p)
        if (!(pi > 1.0)) throw ParameterError("two-weight condition requires p_i > 1");
    if (!(cfg.p_total() < cfg.q)) throw ParameterError("two-weight condition requires p < q");
    require_positive(u, "u");
    const int m = cfg.m;
    if (static_cast<int>(w.size()) != m) throw ShapeError("weight count mismatch");
    const double p = cfg.p_total();
    const double q = cfg.q;
    const double vol_expo = cfg.alpha[0] / cfg.n + 1.0 / q - 1.0 / p;

    const GridFunction uq = pointwise_pow(u, q);
    std::vector<GridFunction> sig;
    std::vector<double> pc(m);
    for (int i = 0; i < m; ++i) {
        require_positive(w[i], "w_i");
        pc[i] = cfg.p_conj(i);
        sig.push_back(pointwise_pow(w[i], -pc[i]));
    }

    ConditionReport rep = sup_over(fam, [&](const AlignedCube& qb) {
        double v = std::pow(qb.volume(), vol_expo) * std::pow(average(uq, qb), 1.0 / q);
        for (int i = 0; i < m; ++i) v *= std::pow(average(sig[i], qb), 1.0 / pc[i]);
        return v;
    });
    rep.exponents = {{"q", q}, {"p", cfg.p}, {"alpha", cfg.alpha[0]}, {"vol_exponent", vol_expo}};
    return rep;
}

ConditionReport strong_twc_constant(const GridFunction& u, std::span<const GridFunction> w,
                                    const ExponentConfig& cfg, const CubeFamily& fam1,
                                    const CubeFamily& fam2) {
    cfg.validate_basic();
    if (cfg.k != 2) throw ParameterError("strong condition needs k = 2");
    require_positive(u, "u");
    const int m = cfg.m;
    if (static_cast<int>(w.size()) != m) throw ShapeError("weight count mismatch");
    const double q = cfg.q;

    const GridFunction uq = pointwise_pow(u, q);
    std::vector<GridFunction> sig;
    std::vector<double> pc(m);
    for (int i = 0; i < m; ++i) {
        require_positive(w[i], "w_i");
        pc[i] = cfg.p_conj(i);
        if (!std::isfinite(pc[i])) throw ParameterError("strong condition requires p_i > 1");
        sig.push_back(pointwise_pow(w[i], -pc[i]));
    }
    const double e1 = cfg.alpha[0] / cfg.n - m;
    const double e2 = cfg.alpha[1] / cfg.n - m;

    ConditionReport rep = sup_over_pairs(fam1, fam2, [&](const AlignedCube& q1,
                                                         const AlignedCube& q2) {
        const AlignedCube box = product_box(q1, q2);
        double v = std::pow(q1.volume(), e1) * std::pow(q2.volume(), e2) *
                   std::pow(integrate(uq, box), 1.0 / q);
        for (int i = 0; i < m; ++i) v *= std::pow(integrate(sig[i], box), 1.0 / pc[i]);
        return v;
    });
    rep.exponents = {{"q", q}, {"p", cfg.p}, {"alpha", cfg.alpha}};
    return rep;
}

ConditionReport trace_constant(const GridFunction& u, const ExponentConfig& cfg,
                               std::span<const CubeFamily> fams) {
    cfg.validate_basic();
    require_positive(u, "u");
    if (static_cast<int>(fams.size()) != cfg.k)
        throw ShapeError("trace condition needs one family per factor");
    const double q = cfg.q;
    const double p = cfg.p_total();
    const GridFunction uq = pointwise_pow(u, q);

    ConditionReport rep;
    if (cfg.k == 1) {
        const double e = q * (cfg.alpha[0] / cfg.n - 1.0 / p);
        rep = sup_over(fams[0], [&](const AlignedCube& qb) {
            return integrate(uq, qb) * std::pow(qb.volume(), e);
        });
    } else {
        const double e1 = q * (cfg.alpha[0] / cfg.n - 1.0 / p);
        const double e2 = q * (cfg.alpha[1] / cfg.n - 1.0 / p);
        rep = sup_over_pairs(fams[0], fams[1], [&](const AlignedCube& q1, const AlignedCube& q2) {
            return integrate(uq, product_box(q1, q2)) * std::pow(q1.volume(), e1) *
                   std::pow(q2.volume(), e2);
        });
    }
    rep.exponents = {{"q", q}, {"p", cfg.p}, {"alpha", cfg.alpha}};
    return rep;
}

ConditionReport strong_one_weight_constant(std::span<const GridFunction> w,
                                           std::span<const double> p, double q,
                                           const CubeFamily& fam1, const CubeFamily& fam2) {
    if (w.empty() || w.size() != p.size()) throw ShapeError("weights and exponents mismatch");
    const int m = static_cast<int>(w.size());
    GridFunction prod = w[0];
    for (int i = 1; i < m; ++i) prod = pointwise_product(prod, w[i]);
    const GridFunction prod_q = pointwise_pow(prod, q);
    std::vector<GridFunction> sig;
    std::vector<double> pc(m);
    for (int i = 0; i < m; ++i) {
        require_positive(w[i], "w_i");
        if (!(p[i] > 1.0)) throw ParameterError("strong one-weight condition requires p_i > 1");
        pc[i] = p[i] / (p[i] - 1.0);
        sig.push_back(pointwise_pow(w[i], -pc[i]));
    }

    ConditionReport rep = sup_over_pairs(fam1, fam2, [&](const AlignedCube& q1,
                                                         const AlignedCube& q2) {
        const AlignedCube box = product_box(q1, q2);
        const double volp = q1.volume() * q2.volume();
        double v = std::pow(integrate(prod_q, box) / volp, 1.0 / q);
        for (int i = 0; i < m; ++i) v *= std::pow(integrate(sig[i], box) / volp, 1.0 / pc[i]);
        return v;
    });
    rep.exponents = {{"q", q}, {"p", std::vector<double>(p.begin(), p.end())}};
    return rep;
}

Lemma22Report inclusion_check_lemma22(std::span<const GridFunction> w,
                                      std::span<const double> p, double q, double alpha,
                                      int n, const CubeFamily& fam) {
    Lemma22Report out;
    const int m = static_cast<int>(w.size());
    out.vector_constant = ap_vector_constant(w, p, fam);
    out.individual_product = 1.0;
    for (int i = 0; i < m; ++i) {
        out.individual.push_back(ap_constant(w[i], p[i], fam));
        out.individual_product *= out.individual.back().constant;
    }
    out.product_bound_holds =
        out.vector_constant.constant <= out.individual_product * (1.0 + 1e-12);

    out.apq = apq_vector_constant(w, p, q, fam);
    GridFunction prod = w[0];
    for (int i = 1; i < m; ++i) prod = pointwise_product(prod, w[i]);
    out.product_power_class = ap_constant(pointwise_pow(prod, q), m * q, fam);
    for (int i = 0; i < m; ++i) {
        const double pc = p[i] / (p[i] - 1.0);
        out.dual_power_classes.push_back(
            ap_constant(pointwise_pow(w[i], -pc), m * pc, fam));
    }
    bool finite = std::isfinite(out.vector_constant.constant) &&
                  std::isfinite(out.apq.constant) &&
                  std::isfinite(out.product_power_class.constant);
    for (const auto& r : out.individual) finite = finite && std::isfinite(r.constant);
    for (const auto& r : out.dual_power_classes) finite = finite && std::isfinite(r.constant);
    out.pass = finite;
    (void)alpha;
    (void)n;
    return out;
}

nlohmann::json Lemma22Report::to_json() const {
    nlohmann::json j;
    j["vector_constant"] = vector_constant.to_json();
    nlohmann::json ind = nlohmann::json::array();
    for (const auto& r : individual) ind.push_back(r.to_json());
    j["individual"] = ind;
    j["individual_product"] = individual_product;
    j["product_bound_holds"] = product_bound_holds;
    j["apq"] = apq.to_json();
    j["product_power_class"] = product_power_class.to_json();
    nlohmann::json dual = nlohmann::json::array();
    for (const auto& r : dual_power_classes) dual.push_back(r.to_json());
    j["dual_power_classes"] = dual;
    j["pass"] = pass;
    return j;
}

} // namespace mfrac
