#include "mfrac/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

#include "mfrac/io.hpp"

namespace mfrac {

namespace {

constexpr double kDenFloor = 1e-300;

nlohmann::json cube_json(const AlignedCube& q) {
    nlohmann::json j;
    j["grid_level"] = q.grid_level;
    j["start"] = std::vector<std::int64_t>(q.start.begin(), q.start.begin() + q.dim);
    j["count"] = std::vector<std::int64_t>(q.count.begin(), q.count.begin() + q.dim);
    return j;
}

void reject_unknown_keys(const nlohmann::json& j, const std::set<std::string>& allowed,
                         const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& [key, value] : j.items())
        if (!allowed.count(key)) throw ConfigError("unknown key \"" + key + "\" in " + where);
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

/// Product boxes of the operator's supremum family (the family itself for
/// the plain kinds).
std::vector<AlignedCube> family_boxes(const OperatorSpec& op, int level) {
    const CubeFamily fam = op.factor_family(level);
    std::vector<AlignedCube> out;
    if (!op.is_strong()) {
        out = fam.enumerate();
    } else {
        const auto cubes = fam.enumerate();
        out.reserve(cubes.size() * cubes.size());
        for (const auto& q1 : cubes)
            for (const auto& q2 : cubes) out.push_back(product_box(q1, q2));
    }
    return out;
}

} // namespace

// --- generators -----------------------------------------------------------------

GridFunction random_log_uniform(int dim, int level, double lo, double hi, RandomSource& rng) {
    if (!(lo > 0.0) || !(hi >= lo)) throw ParameterError("log-uniform range needs 0 < lo <= hi");
    std::vector<double> vals(std::size_t{1} << (dim * level));
    for (auto& v : vals) v = rng.log_uniform(lo, hi);
    return GridFunction(dim, level, std::move(vals), true);
}

namespace {

// Exact cell averages of |x - x0|^gamma in 1-D; gamma > -1 keeps every
// average finite and positive.
GridFunction power_weight_1d(int level, double gamma, double x0) {
    if (!(gamma > -1.0)) throw ParameterError("power weight needs gamma > -1");
    const std::int64_t n = std::int64_t{1} << level;
    const double w = std::ldexp(1.0, -level);
    auto anti = [&](double t) {
        const double d = t - x0;
        return std::copysign(std::pow(std::abs(d), gamma + 1.0), d) / (gamma + 1.0);
    };
    std::vector<double> vals(static_cast<std::size_t>(n));
    for (std::int64_t c = 0; c < n; ++c) {
        const double a = c * w, b = (c + 1) * w;
        const double avg = (anti(b) - anti(a)) / w;
        if (!(avg > 0.0)) throw ParameterError("power weight produced a nonpositive average");
        vals[static_cast<std::size_t>(c)] = avg;
    }
    return GridFunction(1, level, std::move(vals), true);
}

GridFunction block_refine(const GridFunction& coarse, int level) {
    if (coarse.level() > level) throw ShapeError("step data finer than target level");
    const int up = level - coarse.level();
    std::vector<double> vals(std::size_t{1} << (coarse.dimension() * level));
    GridFunction model(coarse.dimension(), level, vals, false);
    for (std::size_t i = 0; i < vals.size(); ++i) {
        Index cell = model.cell_of(i);
        Index cc{};
        for (int a = 0; a < coarse.dimension(); ++a) cc[a] = cell[a] >> up;
        vals[i] = coarse.at(cc);
    }
    return GridFunction(coarse.dimension(), level, std::move(vals), coarse.nonneg());
}

} // namespace

GridFunction generate_weight(const nlohmann::json& spec, int dim, int level,
                             RandomSource& rng) {
    if (spec.is_number()) return GridFunction::constant(dim, level, spec.get<double>());
    if (!spec.is_object() || !spec.contains("generator"))
        throw ConfigError("weight spec needs a \"generator\" key");
    const std::string gen = spec.at("generator").get<std::string>();
    if (gen == "constant") {
        const double c = spec.value("value", 1.0);
        if (!(c > 0.0) && spec.value("positive", true))
            throw ParameterError("constant weight must be positive");
        return GridFunction::constant(dim, level, c);
    }
    if (gen == "step") {
        auto vals = spec.at("values").get<std::vector<double>>();
        int l0 = 0;
        while ((std::size_t{1} << (dim * l0)) < vals.size()) ++l0;
        if ((std::size_t{1} << (dim * l0)) != vals.size())
            throw ConfigError("step values must have length 2^(dim*l)");
        return block_refine(GridFunction(dim, l0, std::move(vals)), level);
    }
    if (gen == "log-uniform") {
        return random_log_uniform(dim, level, spec.value("lo", 0.25), spec.value("hi", 4.0),
                                  rng);
    }
    if (gen == "power") {
        if (dim != 1) throw ConfigError("power generator is 1-D; tensor it for higher dims");
        return power_weight_1d(level, spec.at("gamma").get<double>(), spec.value("x0", 0.5));
    }
    if (gen == "tensor") {
        const auto& factors = spec.at("factors");
        if (!factors.is_array() || factors.size() != 2 || dim % 2 != 0)
            throw ConfigError("tensor generator needs two factors and even dimension");
        GridFunction a = generate_weight(factors[0], dim / 2, level, rng);
        GridFunction b = generate_weight(factors[1], dim / 2, level, rng);
        return tensor_product(a, b);
    }
    if (gen == "file") {
        return read_grid_function(spec.at("path").get<std::string>());
    }
    throw ConfigError("unknown weight generator: " + gen);
}

// --- norm estimation ---------------------------------------------------------------

namespace {

struct TrialSet {
    std::vector<std::vector<GridFunction>> tuples;
    std::vector<nlohmann::json> descs;
};

std::vector<GridFunction> dual_sigmas(const ExponentConfig& cfg,
                                      std::span<const GridFunction> w_mult) {
    std::vector<GridFunction> sig;
    for (int i = 0; i < cfg.m; ++i) {
        const double pc = cfg.p_conj(i);
        if (std::isfinite(pc))
            sig.push_back(pointwise_pow(w_mult[i], -pc));
        else
            sig.push_back(GridFunction::constant(w_mult[i].dimension(), w_mult[i].level(), 1.0));
    }
    return sig;
}

TrialSet build_trials(const EstimateInput& in, int domain_dim, int level) {
    TrialSet ts;
    const int m = in.op.cfg.m;
    RandomSource rng(in.trials.seed);

    if (in.trials.include_indicators) {
        for (const AlignedCube& box : family_boxes(in.op, level)) {
            const GridFunction chi = GridFunction::indicator(box);
            ts.tuples.emplace_back(m, chi);
            ts.descs.push_back({{"kind", "indicator"}, {"cube", cube_json(box)}});
        }
    }

    const auto sig = dual_sigmas(in.op.cfg, in.w);
    int dual_idx = 0;
    for (const AlignedCube& box : in.dual_cubes) {
        const GridFunction chi = GridFunction::indicator(box);
        std::vector<GridFunction> tup;
        for (int i = 0; i < m; ++i) tup.push_back(pointwise_product(sig[i], chi));
        ts.tuples.push_back(std::move(tup));
        ts.descs.push_back({{"kind", "dual"}, {"cube", cube_json(box)}});
        // mixed tuples: one dual slot among indicator slots
        if (dual_idx < 4 && m > 1) {
            for (int j = 0; j < m; ++j) {
                std::vector<GridFunction> mixed;
                for (int i = 0; i < m; ++i)
                    mixed.push_back(i == j ? pointwise_product(sig[i], chi) : chi);
                ts.tuples.push_back(std::move(mixed));
                ts.descs.push_back(
                    {{"kind", "mixed"}, {"dual_slot", j}, {"cube", cube_json(box)}});
            }
        }
        ++dual_idx;
    }

    for (int t = 0; t < in.trials.random_count; ++t) {
        std::vector<GridFunction> tup;
        for (int i = 0; i < m; ++i)
            tup.push_back(random_log_uniform(domain_dim, level, in.trials.range_lo,
                                             in.trials.range_hi, rng));
        ts.tuples.push_back(std::move(tup));
        ts.descs.push_back({{"kind", "random"}, {"index", t}});
    }
    return ts;
}

double trial_ratio(const EstimateInput& in, std::span<const GridFunction> fs, bool* skipped) {
    *skipped = false;
    double den = 1.0;
    for (int i = 0; i < in.op.cfg.m; ++i)
        den *= lp_norm(pointwise_product(in.w[i], fs[i]), in.op.cfg.p[i]);
    if (!(den > kDenFloor)) {
        *skipped = true;
        return -1.0;
    }
    const GridFunction lhs = pointwise_product(in.u, in.op.apply(fs));
    const double num =
        in.weak ? weak_lq_norm(lhs, in.op.cfg.q) : lp_norm(lhs, in.op.cfg.q);
    return num / den;
}

} // namespace

NormEstimate op_norm_estimate(const EstimateInput& in) {
    const GridFunction& model = in.u;
    const int level = model.level();
    const int domain_dim = in.op.cfg.domain_dim();
    if (model.dimension() != domain_dim) throw ShapeError("u dimension must match n*k");
    if (static_cast<int>(in.w.size()) != in.op.cfg.m)
        throw ShapeError("w multiplier count must be m");

    TrialSet ts = build_trials(in, domain_dim, level);
    NormEstimate est;
    est.trials = static_cast<int>(ts.tuples.size());
    int best = -1;
    for (std::size_t t = 0; t < ts.tuples.size(); ++t) {
        bool skip = false;
        const double r = trial_ratio(in, ts.tuples[t], &skip);
        if (skip) {
            ++est.skipped;
            continue;
        }
        if (r > est.value) {
            est.value = r;
            best = static_cast<int>(t);
        }
    }
    if (best >= 0) {
        est.witness = ts.descs[static_cast<std::size_t>(best)];
        est.witness["ratio"] = est.value;
    }
    return est;
}

NormEstimate weak_norm_estimate(EstimateInput in) {
    in.weak = true;
    return op_norm_estimate(in);
}

NecessityRecord necessity_lower_bound(const OperatorSpec& op, const GridFunction& u,
                                      std::span<const GridFunction> w, double condition_value,
                                      int max_trials) {
    NecessityRecord rec;
    rec.condition = condition_value;
    const auto sig = dual_sigmas(op.cfg, w);
    EstimateInput in{op, u, {w.begin(), w.end()}, {}, false, {}};
    auto boxes = family_boxes(op, u.level());
    if (max_trials > 0 && boxes.size() > static_cast<std::size_t>(max_trials)) {
        const std::size_t stride =
            (boxes.size() + static_cast<std::size_t>(max_trials) - 1) /
            static_cast<std::size_t>(max_trials);
        std::vector<AlignedCube> sampled;
        for (std::size_t i = 0; i < boxes.size(); i += stride) sampled.push_back(boxes[i]);
        boxes = std::move(sampled);
    }
    for (const AlignedCube& box : boxes) {
        const GridFunction chi = GridFunction::indicator(box);
        std::vector<GridFunction> tup;
        for (int i = 0; i < op.cfg.m; ++i) tup.push_back(pointwise_product(sig[i], chi));
        bool skip = false;
        const double r = trial_ratio(in, tup, &skip);
        if (skip) continue;
        if (r > rec.max_ratio) {
            rec.max_ratio = r;
            rec.witness = {{"cube", cube_json(box)}, {"ratio", r}};
        }
    }
    rec.kappa = condition_value > 0.0 ? rec.max_ratio / condition_value : 0.0;
    return rec;
}

// --- individual checks ----------------------------------------------------------------

CarlesonResult carleson_check(const GridFunction& rho, double r, double q,
                              const CarlesonRule& rule,
                              std::span<const GridFunction> trial_gs) {
    if (!(1.0 < r && r < q)) throw ParameterError("Carleson check needs 1 < r < q");
    if (!rho.strictly_positive()) throw ParameterError("rho must be strictly positive");
    CarlesonResult res;
    const double rc = r / (r - 1.0);
    const GridFunction dual = pointwise_pow(rho, 1.0 - rc);

    const ConditionReport rd = rd_constant(dual, /*dyadic=*/true);
    res.rd = rd.constant;
    if (!(rd.constant > 1.0)) {
        res.verdict = "hypotheses-unmet";
        res.details = {{"reason", "rho^{1-r'} fails dyadic reverse doubling"},
                       {"rd", rd.constant}};
        return res;
    }

    const CubeFamily dy = CubeFamily::dyadic(rho.dimension(), rho.level());
    const auto cubes = dy.enumerate();
    std::vector<double> cq(cubes.size());
    for (std::size_t i = 0; i < cubes.size(); ++i) {
        const double vol = cubes[i].volume();
        const double s = integrate(dual, cubes[i]);
        cq[i] = rule.kind == CarlesonRule::Kind::Power
                    ? rule.scale * std::pow(vol, rule.beta)
                    : rule.scale * std::pow(vol, q) * std::pow(s, -q / rc);
    }
    double c1 = 0.0;
    for (std::size_t i = 0; i < cubes.size(); ++i) {
        const double v = cq[i] * std::pow(cubes[i].volume(), -q) *
                         std::pow(integrate(dual, cubes[i]), q / rc);
        c1 = std::max(c1, v);
    }
    res.c1 = c1;

    int skipped = 0;
    for (const GridFunction& g : trial_gs) {
        double num = 0.0;
        for (std::size_t i = 0; i < cubes.size(); ++i)
            num += cq[i] * std::pow(average(g, cubes[i]), q);
        const double den = std::pow(lp_norm(g, r, &rho), q);
        if (!(den > kDenFloor)) {
            ++skipped;
            continue;
        }
        res.c_hat = std::max(res.c_hat, num / den);
    }
    res.details = {{"trials", static_cast<int>(trial_gs.size())},
                   {"skipped", skipped},
                   {"ratio_c_hat_over_c1", c1 > 0.0 ? res.c_hat / c1 : 0.0}};
    res.verdict = std::isfinite(res.c_hat) ? "pass" : "fail";
    return res;
}

DominationResult ainfty_domination_check(
    const std::vector<std::vector<GridFunction>>& trial_tuples, const GridFunction& v,
    const ExponentConfig& cfg, const MfiOptions& opt, double ainf_threshold) {
    DominationResult res;
    const CubeFamily fam = CubeFamily::all_cubes(v.dimension(), v.level());
    const ConditionReport ainf = ainf_surrogate(v, fam, ainf_threshold);
    if (ainf.constant > ainf_threshold) {
        res.verdict = "hypotheses-unmet";
        return res;
    }
    for (const auto& tup : trial_tuples) {
        ++res.trials;
        const GridFunction i_val = mfi(tup, cfg, opt);
        const GridFunction m_val = mfm(tup, cfg, fam);
        const double num = std::pow(lp_norm(i_val, cfg.q, &v), cfg.q);
        const double den = std::pow(lp_norm(m_val, cfg.q, &v), cfg.q);
        if (!(den > kDenFloor) || !(num > kDenFloor)) {
            ++res.skipped;
            continue;
        }
        res.max_ratio = std::max(res.max_ratio, num / den);
    }
    res.verdict = std::isfinite(res.max_ratio) ? "pass" : "fail";
    return res;
}

bool holder_sequence_check(std::span<const std::vector<double>> seqs,
                           std::span<const double> p, double rel_tol, double* lhs_out,
                           double* rhs_out) {
    if (seqs.empty() || seqs.size() != p.size())
        throw ShapeError("need one exponent per sequence");
    const std::size_t len = seqs[0].size();
    for (const auto& s : seqs)
        if (s.size() != len) throw ShapeError("sequences must share a length");
    double inv_p = 0.0;
    for (double pj : p) inv_p += 1.0 / pj;
    const double pt = 1.0 / inv_p;

    double lhs = 0.0;
    for (std::size_t k = 0; k < len; ++k) {
        double prod = 1.0;
        for (const auto& s : seqs) prod *= s[k];
        lhs += prod;
    }
    double rhs = 1.0;
    for (std::size_t j = 0; j < seqs.size(); ++j) {
        double sum = 0.0;
        for (double a : seqs[j]) sum += std::pow(a, p[j] / pt);
        rhs *= std::pow(sum, pt / p[j]);
    }
    if (lhs_out) *lhs_out = lhs;
    if (rhs_out) *rhs_out = rhs;
    return lhs <= rhs * (1.0 + rel_tol);
}

double shift_average_constant(std::span<const GridFunction> fs, const ExponentConfig& cfg,
                              int k_max) {
    const GridFunction& f0 = fs.front();
    const std::int64_t n = f0.cells_per_axis();
    const double q = cfg.q;

    const GridFunction trunc =
        cfg.k == 1 ? mfm_truncated(fs, cfg, k_max) : strong_mfm_truncated(fs, cfg, k_max);

    // mean over all grid shifts of the conjugated dyadic operator, per cell
    std::vector<double> mean(f0.size(), 0.0);
    std::vector<std::int64_t> t(static_cast<std::size_t>(f0.dimension()), 0);
    std::size_t shifts = 0;
    while (true) {
        const GridFunction conj = shift_conjugated_dyadic(fs, cfg, t);
        for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += std::pow(conj[i], q);
        ++shifts;
        int a = f0.dimension() - 1;
        while (a >= 0) {
            if (++t[static_cast<std::size_t>(a)] < n) break;
            t[static_cast<std::size_t>(a)] = 0;
            --a;
        }
        if (a < 0) break;
    }
    double c = 0.0;
    for (std::size_t i = 0; i < mean.size(); ++i) {
        const double avg = mean[i] / static_cast<double>(shifts);
        if (avg > kDenFloor) c = std::max(c, std::pow(trunc[i], q) / avg);
    }
    return c;
}

// --- scenarios ----------------------------------------------------------------------

Scenario Scenario::from_json(const nlohmann::json& j) {
    reject_unknown_keys(j, {"name", "theorem", "grid", "exponents", "weights", "family",
                            "operator", "trials", "seed", "quadrature", "extra"},
                        "scenario");
    Scenario sc;
    sc.name = j.value("name", "unnamed");
    sc.theorem = j.at("theorem").get<std::string>();
    const auto& grid = j.at("grid");
    reject_unknown_keys(grid, {"n", "level"}, "scenario.grid");
    sc.n = grid.at("n").get<int>();
    sc.level = grid.at("level").get<int>();

    const auto& ex = j.at("exponents");
    reject_unknown_keys(ex, {"m", "k", "p", "q", "alpha"}, "scenario.exponents");
    ExponentConfig cfg;
    cfg.n = sc.n;
    cfg.m = ex.at("m").get<int>();
    cfg.p = ex.at("p").get<std::vector<double>>();
    cfg.q = ex.at("q").get<double>();
    if (ex.at("alpha").is_array())
        cfg.alpha = ex.at("alpha").get<std::vector<double>>();
    else
        cfg.alpha = {ex.at("alpha").get<double>()};
    cfg.k = ex.value("k", static_cast<int>(cfg.alpha.size()));
    if (cfg.k != static_cast<int>(cfg.alpha.size()))
        throw ConfigError("alpha list length must equal k");
    cfg.validate_basic();
    sc.cfg = cfg;

    sc.weights = j.value("weights", nlohmann::json::object());
    reject_unknown_keys(sc.weights, {"u", "w", "v", "rho"}, "scenario.weights");
    sc.family = j.value("family", sc.n == 1 && sc.cfg.k == 1 ? "grid-aligned" : "dyadic");
    sc.operator_kind = j.value("operator", std::string{});
    if (j.contains("trials")) {
        const auto& tr = j.at("trials");
        reject_unknown_keys(tr, {"random", "lo", "hi", "duals", "indicators"},
                            "scenario.trials");
        sc.trials.random_count = tr.value("random", 256);
        sc.trials.range_lo = tr.value("lo", 0.25);
        sc.trials.range_hi = tr.value("hi", 4.0);
        sc.trials.dual_cube_count = tr.value("duals", 16);
        sc.trials.include_indicators = tr.value("indicators", true);
    }
    sc.seed = j.value("seed", 7ULL);
    sc.trials.seed = sc.seed;
    if (j.contains("quadrature")) {
        const auto& qd = j.at("quadrature");
        reject_unknown_keys(qd, {"depth", "metric"}, "scenario.quadrature");
        sc.mfi_depth = qd.value("depth", 4);
        const std::string metric = qd.value("metric", "torus");
        if (metric == "torus")
            sc.metric = DistanceMode::Torus;
        else if (metric == "euclidean")
            sc.metric = DistanceMode::Euclidean;
        else
            throw ConfigError("metric must be torus or euclidean");
    }
    sc.extra = j.value("extra", nlohmann::json::object());
    return sc;
}

nlohmann::json Scenario::to_json() const {
    nlohmann::json j;
    j["name"] = name;
    j["theorem"] = theorem;
    j["grid"] = {{"n", n}, {"level", level}};
    j["exponents"] = {{"m", cfg.m}, {"k", cfg.k}, {"p", cfg.p}, {"q", cfg.q},
                      {"alpha", cfg.alpha}};
    j["weights"] = weights;
    j["family"] = family;
    if (!operator_kind.empty()) j["operator"] = operator_kind;
    j["trials"] = {{"random", trials.random_count},
                   {"lo", trials.range_lo},
                   {"hi", trials.range_hi},
                   {"duals", trials.dual_cube_count},
                   {"indicators", trials.include_indicators}};
    j["seed"] = seed;
    j["quadrature"] = {{"depth", mfi_depth},
                       {"metric", metric == DistanceMode::Torus ? "torus" : "euclidean"}};
    if (!extra.empty()) j["extra"] = extra;
    return j;
}

WeightSystem Scenario::build_weights() const {
    WeightSystem ws;
    RandomSource rng(seed ^ 0x9e3779b97f4a7c15ULL);
    const int dim = cfg.domain_dim();
    // fixed build order keeps the generator stream reproducible
    if (weights.contains("u")) ws.u = generate_weight(weights.at("u"), dim, level, rng);
    if (weights.contains("w")) {
        const auto& arr = weights.at("w");
        if (!arr.is_array()) throw ConfigError("weights.w must be an array");
        for (const auto& spec : arr) ws.w.push_back(generate_weight(spec, dim, level, rng));
    }
    while (static_cast<int>(ws.w.size()) < cfg.m)
        ws.w.push_back(GridFunction::constant(dim, level, 1.0));
    if (weights.contains("v")) ws.v = generate_weight(weights.at("v"), dim, level, rng);
    if (weights.contains("rho")) ws.rho = generate_weight(weights.at("rho"), dim, level, rng);

    // product-type decompositions: rebuild tensor factors with a second pass
    if (cfg.k == 2 && weights.contains("w")) {
        bool all_tensor = true;
        for (const auto& spec : weights.at("w"))
            if (!(spec.is_object() && spec.value("generator", "") == "tensor" &&
                  !spec.at("factors").empty()))
                all_tensor = false;
        if (all_tensor) {
            RandomSource rng2(seed ^ 0x9e3779b97f4a7c15ULL);
            if (weights.contains("u")) (void)generate_weight(weights.at("u"), dim, level, rng2);
            for (const auto& spec : weights.at("w")) {
                std::vector<GridFunction> factors;
                factors.push_back(
                    generate_weight(spec.at("factors")[0], dim / 2, level, rng2));
                factors.push_back(
                    generate_weight(spec.at("factors")[1], dim / 2, level, rng2));
                ws.w_factors.push_back(std::move(factors));
            }
        }
    }
    ws.validate();
    return ws;
}

// --- suite machinery ---------------------------------------------------------------------

nlohmann::json SuiteResult::to_json(bool canonical) const {
    nlohmann::json j;
    j["theorem"] = theorem;
    j["scenario"] = scenario;
    nlohmann::json constants;
    constants["condition"] =
        std::isfinite(condition) ? nlohmann::json(condition) : nlohmann::json();
    constants["estimated_norm"] =
        std::isfinite(estimated_norm) ? nlohmann::json(estimated_norm) : nlohmann::json();
    constants["kappa"] = std::isfinite(kappa) ? nlohmann::json(kappa) : nlohmann::json();
    j["constants"] = constants;
    j["verdict"] = verdict;
    j["witness"] = witness;
    j["seed"] = seed;
    j["level"] = level;
    j["runtime_ms"] = canonical ? 0 : runtime_ms;
    j["details"] = details;
    return j;
}

namespace {

struct SuitePlan {
    OperatorSpec op;
    std::optional<GridFunction> u_mult;
    std::vector<GridFunction> w_mult;
    double condition = std::numeric_limits<double>::quiet_NaN();
    nlohmann::json cond_json;
    bool weak = false;
    bool run_necessity = true;
    bool kappa_ge_one = false;  // provable for the strong-norm maximal suites
    double necessity_scale = 1.0;
    int necessity_max_trials = 0;
};

GridFunction multiplier_product(std::span<const GridFunction> w,
                                std::span<const double> powers) {
    GridFunction acc = pointwise_pow(w[0], powers[0]);
    for (std::size_t i = 1; i < w.size(); ++i)
        acc = pointwise_product(acc, pointwise_pow(w[i], powers[i]));
    return acc;
}

std::vector<AlignedCube> pick_dual_cubes(const SuitePlan& plan, const Scenario& sc,
                                         const std::vector<AlignedCube>& argmax) {
    // argmax cubes first (as product boxes when strong), then seeded random picks
    std::vector<AlignedCube> duals;
    const auto boxes = family_boxes(plan.op, sc.level);
    if (!argmax.empty()) {
        if (plan.op.is_strong() && argmax.size() == 2)
            duals.push_back(product_box(argmax[0], argmax[1]));
        else if (!plan.op.is_strong())
            duals.push_back(argmax[0]);
    }
    RandomSource rng(sc.seed ^ 0xa5a5a5a5ULL);
    const int want = std::max(0, sc.trials.dual_cube_count - static_cast<int>(duals.size()));
    for (int i = 0; i < want && !boxes.empty(); ++i)
        duals.push_back(boxes[static_cast<std::size_t>(rng.below(boxes.size()))]);
    return duals;
}

SuiteResult finish_suite(const Scenario& sc, SuitePlan& plan, SuiteResult res) {
    res.theorem = sc.theorem;
    res.scenario = sc.name;
    res.seed = sc.seed;
    res.level = sc.level;
    res.condition = plan.condition;
    if (!plan.cond_json.empty()) res.details["condition_report"] = plan.cond_json;

    EstimateInput in{plan.op, *plan.u_mult, plan.w_mult, sc.trials, plan.weak, {}};
    std::vector<AlignedCube> argmax;
    if (plan.cond_json.contains("argmax"))
        for (const auto& cj : plan.cond_json.at("argmax")) {
            AlignedCube q;
            q.grid_level = cj.at("grid_level").get<int>();
            const auto starts = cj.at("start").get<std::vector<std::int64_t>>();
            const auto counts = cj.at("count").get<std::vector<std::int64_t>>();
            q.dim = static_cast<int>(starts.size());
            for (std::size_t a = 0; a < starts.size(); ++a) {
                q.start[a] = starts[a];
                q.count[a] = counts[a];
            }
            argmax.push_back(q);
        }
    in.dual_cubes = pick_dual_cubes(plan, sc, argmax);

    const NormEstimate est = op_norm_estimate(in);
    res.estimated_norm = est.value;
    res.witness = est.witness;
    res.details["trials"] = est.trials;
    res.details["skipped"] = est.skipped;

    bool ok = std::isfinite(est.value) && est.value > 0.0;
    if (plan.run_necessity && std::isfinite(plan.condition)) {
        const NecessityRecord nec =
            necessity_lower_bound(plan.op, *plan.u_mult, plan.w_mult,
                                  plan.condition * plan.necessity_scale,
                                  plan.necessity_max_trials);
        res.kappa = nec.kappa;
        res.details["necessity"] = {{"max_ratio", nec.max_ratio},
                                    {"condition", nec.condition},
                                    {"kappa", nec.kappa},
                                    {"witness", nec.witness}};
        ok = ok && nec.kappa > 0.0;
        if (plan.kappa_ge_one) ok = ok && nec.kappa >= 1.0 - 1e-9;
        // the estimate is at least the necessity bound by construction
        res.estimated_norm = std::max(res.estimated_norm, nec.max_ratio);
    }
    res.verdict = ok ? "pass" : "fail";
    return res;
}

CubeFamily scenario_family(const Scenario& sc) {
    return CubeFamily::of_kind(sc.family_kind(), sc.n, sc.level);
}

SuiteResult meta_only(const Scenario& sc, SuiteResult res) {
    res.theorem = sc.theorem;
    res.scenario = sc.name;
    res.seed = sc.seed;
    res.level = sc.level;
    return res;
}

SuiteResult hypotheses_unmet(const Scenario& sc, const std::string& reason) {
    SuiteResult res;
    res.verdict = "hypotheses-unmet";
    res.details["reason"] = reason;
    return meta_only(sc, res);
}

MfiOptions scenario_quad(const Scenario& sc) {
    MfiOptions opt;
    opt.refine_depth = sc.mfi_depth;
    opt.metric = sc.metric;
    return opt;
}

bool rd_passes(const GridFunction& w, nlohmann::json& hyp, const std::string& label) {
    const ConditionReport rd = rd_constant(w, /*dyadic=*/false);
    hyp[label] = rd.constant;
    return rd.constant > 1.0;
}

GridFunction all_ones(const Scenario& sc) {
    return GridFunction::constant(sc.cfg.domain_dim(), sc.level, 1.0);
}

// Theorem A: m-linear maximal operator, alpha = 0, measure-weighted norms;
// bounded iff the vector Muckenhoupt constant is finite.
SuiteResult suite_A(const Scenario& sc) {
    WeightSystem ws = sc.build_weights();
    ExponentConfig cfg = sc.cfg;
    if (cfg.alpha[0] != 0.0 || cfg.k != 1)
        return hypotheses_unmet(sc, "theorem A needs alpha = 0, k = 1");
    for (double pi : cfg.p)
        if (!(pi > 1.0)) return hypotheses_unmet(sc, "theorem A needs p_i > 1");
    cfg.q = cfg.p_total();  // output space is L^p with the product density

    SuitePlan plan;
    plan.op = OperatorSpec{OperatorKind::MFM, cfg, sc.family_kind(), 0, {}};
    std::vector<double> inv_p(cfg.p.size());
    for (std::size_t i = 0; i < cfg.p.size(); ++i) inv_p[i] = 1.0 / cfg.p[i];
    plan.u_mult = multiplier_product(ws.w, inv_p);
    for (std::size_t i = 0; i < ws.w.size(); ++i)
        plan.w_mult.push_back(pointwise_pow(ws.w[i], inv_p[i]));
    const ConditionReport cond = ap_vector_constant(ws.w, cfg.p, scenario_family(sc));
    plan.condition = cond.constant;
    plan.cond_json = cond.to_json();
    plan.kappa_ge_one = true;
    return finish_suite(sc, plan, {});
}

// Theorem B / Corollary 3.3: one-weight inequality under 1/q = 1/p - alpha/n,
// governed by the Muckenhoupt-Wheeden constant.
SuiteResult suite_B(const Scenario& sc) {
    WeightSystem ws = sc.build_weights();
    const ExponentConfig& cfg = sc.cfg;
    if (cfg.k != 1) return hypotheses_unmet(sc, "one-weight suite needs k = 1");
    for (double pi : cfg.p)
        if (!(pi > 1.0)) return hypotheses_unmet(sc, "needs p_i > 1");
    if (!(cfg.alpha[0] > 0.0)) return hypotheses_unmet(sc, "needs alpha > 0");
    if (!cfg.one_weight_relation(1e-9))
        return hypotheses_unmet(sc, "needs 1/q = 1/p - alpha/n");

    SuitePlan plan;
    const bool use_mfi = sc.operator_kind == "mfi";
    plan.op = OperatorSpec{use_mfi ? OperatorKind::MFI : OperatorKind::MFM, cfg,
                           sc.family_kind(), 0, scenario_quad(sc)};
    std::vector<double> ones(cfg.p.size(), 1.0);
    plan.u_mult = multiplier_product(ws.w, ones);
    plan.w_mult = ws.w;
    const ConditionReport cond = apq_vector_constant(ws.w, cfg.p, cfg.q, scenario_family(sc));
    plan.condition = cond.constant;
    plan.cond_json = cond.to_json();
    plan.kappa_ge_one = !use_mfi;
    return finish_suite(sc, plan, {});
}

// Theorems C and E: power-bump sufficiency (C for the potential, E for the
// maximal operator). r is existentially quantified; scan a fixed ladder.
SuiteResult suite_power_bump(const Scenario& sc, bool potential) {
    WeightSystem ws = sc.build_weights();
    const ExponentConfig& cfg = sc.cfg;
    if (cfg.k != 1) return hypotheses_unmet(sc, "power-bump suite needs k = 1");
    for (double pi : cfg.p)
        if (!(pi > 1.0)) return hypotheses_unmet(sc, "needs p_i > 1");
    if (potential && !(cfg.alpha[0] > 0.0)) return hypotheses_unmet(sc, "needs alpha > 0");
    if (!(cfg.p_total() <= cfg.q)) return hypotheses_unmet(sc, "needs p <= q");
    if (!ws.u) return hypotheses_unmet(sc, "scenario must supply u");

    const int variant = potential ? (cfg.q > 1.0 ? 1 : 2) : 2;
    const CubeFamily fam = scenario_family(sc);
    nlohmann::json per_r = nlohmann::json::array();
    double best = std::numeric_limits<double>::infinity();
    nlohmann::json best_json;
    for (double r : {1.01, 1.1, 1.5, 2.0}) {
        const ConditionReport c = power_bump_constant(*ws.u, ws.w, cfg, r, variant, fam);
        per_r.push_back({{"r", r}, {"constant", c.constant}});
        if (c.constant < best) {
            best = c.constant;
            best_json = c.to_json();
        }
    }

    SuitePlan plan;
    plan.op = OperatorSpec{potential ? OperatorKind::MFI : OperatorKind::MFM, cfg,
                           sc.family_kind(), 0, scenario_quad(sc)};
    plan.u_mult = *ws.u;
    plan.w_mult = ws.w;
    plan.condition = best;
    plan.cond_json = best_json;
    plan.run_necessity = false;  // sufficiency-only statement
    SuiteResult res = finish_suite(sc, plan, {});
    res.details["power_bump_scan"] = per_r;
    res.details["variant"] = variant;
    return res;
}

// Theorem D: weak-type inequality, equivalent to the two-weight condition.
SuiteResult suite_D(const Scenario& sc) {
    WeightSystem ws = sc.build_weights();
    const ExponentConfig& cfg = sc.cfg;
    if (cfg.k != 1) return hypotheses_unmet(sc, "weak-type suite needs k = 1");
    for (double pi : cfg.p)
        if (!(pi > 1.0)) return hypotheses_unmet(sc, "desk-scale condition needs p_i > 1");
    if (!(cfg.p_total() < cfg.q)) return hypotheses_unmet(sc, "needs p < q");
    if (!ws.u) return hypotheses_unmet(sc, "scenario must supply u");

    SuitePlan plan;
    plan.op = OperatorSpec{OperatorKind::MFM, cfg, sc.family_kind(), 0, {}};
    plan.u_mult = *ws.u;
    plan.w_mult = ws.w;
    plan.weak = true;
    const ConditionReport cond = twc_constant(*ws.u, ws.w, cfg, scenario_family(sc));
    plan.condition = cond.constant;
    plan.cond_json = cond.to_json();
    plan.kappa_ge_one = false;  // the weak norm of the dual trial may undershoot
    return finish_suite(sc, plan, {});
}

// Theorem F: the Adams-type triangle with constant right-hand weights:
// (i) strong I_alpha bound, (ii) weak M_alpha bound, (iii) trace condition.
SuiteResult suite_F(const Scenario& sc) {
    WeightSystem ws = sc.build_weights();
    const ExponentConfig& cfg = sc.cfg;
    if (cfg.k != 1) return hypotheses_unmet(sc, "theorem F needs k = 1");
    for (double pi : cfg.p)
        if (!(pi > 1.0)) return hypotheses_unmet(sc, "needs p_i > 1");
    const double p = cfg.p_total();
    if (!(cfg.alpha[0] < static_cast<double>(cfg.n) / p))
        return hypotheses_unmet(sc, "needs alpha < n/p");
    if (!(p < cfg.q)) return hypotheses_unmet(sc, "needs p < q");
    if (!(cfg.alpha[0] > 0.0)) return hypotheses_unmet(sc, "needs alpha > 0");
    if (!ws.u) return hypotheses_unmet(sc, "scenario must supply u");
    for (const auto& wi : ws.w)
        for (double v : wi.values())
            if (v != wi[0]) return hypotheses_unmet(sc, "theorem F needs constant w_i");

    const std::vector<GridFunction> ones(
        static_cast<std::size_t>(cfg.m), GridFunction::constant(cfg.n, sc.level, 1.0));

    // (iii) trace condition
    const std::vector<CubeFamily> fams = {scenario_family(sc)};
    const ConditionReport trace = trace_constant(*ws.u, cfg, fams);
    const double trace_q = std::pow(trace.constant, 1.0 / cfg.q);

    // (i) strong-type potential estimate
    OperatorSpec op_i{OperatorKind::MFI, cfg, sc.family_kind(), 0, scenario_quad(sc)};
    EstimateInput in_i{op_i, *ws.u, ones, sc.trials, false, trace.argmax};
    const NormEstimate ni = op_norm_estimate(in_i);

    // (ii) weak maximal estimate
    OperatorSpec op_m{OperatorKind::MFM, cfg, sc.family_kind(), 0, {}};
    EstimateInput in_m{op_m, *ws.u, ones, sc.trials, true, trace.argmax};
    const NormEstimate nm = op_norm_estimate(in_m);

    // necessity ties (ii) and the maximal strong norm to the trace constant
    const NecessityRecord nec = necessity_lower_bound(op_m, *ws.u, ones, trace_q);

    SuiteResult res;
    res.condition = trace_q;
    res.estimated_norm = ni.value;
    res.kappa = nec.kappa;
    res.witness = ni.witness;
    res.details["condition_report"] = trace.to_json();
    res.details["strong_potential_norm"] = ni.value;
    res.details["weak_maximal_norm"] = nm.value;
    res.details["trace_constant_q_root"] = trace_q;
    res.details["ratio_i_over_iii"] = trace_q > 0 ? ni.value / trace_q : 0.0;
    res.details["ratio_ii_over_iii"] = trace_q > 0 ? nm.value / trace_q : 0.0;
    res.details["necessity"] = {{"max_ratio", nec.max_ratio}, {"kappa", nec.kappa}};
    const bool ok = std::isfinite(ni.value) && ni.value > 0.0 && std::isfinite(nm.value) &&
                    nm.value > 0.0 && std::isfinite(trace_q) && trace_q > 0.0 &&
                    nec.kappa > 0.0;
    res.verdict = ok ? "pass" : "fail";
    return meta_only(sc, res);
}

// Theorem 3.1: two-weight maximal inequality under reverse doubling of the
// dual weights, equivalent to the two-weight condition.
SuiteResult suite_31(const Scenario& sc, bool potential) {
    WeightSystem ws = sc.build_weights();
    const ExponentConfig& cfg = sc.cfg;
    if (cfg.k != 1) return hypotheses_unmet(sc, "suite needs k = 1");
    try {
        cfg.validate_strict();
    } catch (const ParameterError& e) {
        return hypotheses_unmet(sc, e.what());
    }
    if (!(cfg.p_total() < cfg.q)) return hypotheses_unmet(sc, "needs p < q");
    if (!ws.u) return hypotheses_unmet(sc, "scenario must supply u");

    nlohmann::json hyp;
    for (int i = 0; i < cfg.m; ++i) {
        const GridFunction dual = pointwise_pow(ws.w[static_cast<std::size_t>(i)],
                                                -cfg.p_conj(i));
        if (!rd_passes(dual, hyp, "rd_w" + std::to_string(i)))
            return hypotheses_unmet(sc, "w_i^{-p_i'} fails reverse doubling");
    }
    if (potential) {
        const GridFunction uq = pointwise_pow(*ws.u, cfg.q);
        const ConditionReport ainf =
            ainf_surrogate(uq, CubeFamily::all_cubes(cfg.n, sc.level));
        hyp["ainf_uq"] = ainf.constant;
        if (!(ainf.constant <= 1e3))
            return hypotheses_unmet(sc, "u^q fails the A_infinity surrogate");
    }

    SuitePlan plan;
    plan.op = OperatorSpec{potential ? OperatorKind::MFI : OperatorKind::MFM, cfg,
                           sc.family_kind(), 0, scenario_quad(sc)};
    plan.u_mult = *ws.u;
    plan.w_mult = ws.w;
    const ConditionReport cond = twc_constant(*ws.u, ws.w, cfg, scenario_family(sc));
    plan.condition = cond.constant;
    plan.cond_json = cond.to_json();
    plan.kappa_ge_one = !potential;
    SuiteResult res = finish_suite(sc, plan, {});
    res.details["hypotheses"] = hyp;
    return res;
}

// Theorem 3.4: strong maximal operator with product-type weights.
SuiteResult suite_34(const Scenario& sc) {
    WeightSystem ws = sc.build_weights();
    const ExponentConfig& cfg = sc.cfg;
    if (cfg.k != 2) return hypotheses_unmet(sc, "strong suite needs k = 2");
    try {
        cfg.validate_strict();
    } catch (const ParameterError& e) {
        return hypotheses_unmet(sc, e.what());
    }
    if (!ws.u) return hypotheses_unmet(sc, "scenario must supply u");
    if (ws.w_factors.size() != ws.w.size())
        return hypotheses_unmet(sc, "w_i must be of product type");

    nlohmann::json hyp;
    for (std::size_t i = 0; i < ws.w_factors.size(); ++i)
        for (int s = 0; s < 2; ++s) {
            const GridFunction dual = pointwise_pow(
                ws.w_factors[i][static_cast<std::size_t>(s)], -cfg.p_conj(static_cast<int>(i)));
            if (!rd_passes(dual, hyp,
                           "rd_w" + std::to_string(i) + "_f" + std::to_string(s)))
                return hypotheses_unmet(sc, "a factor dual weight fails reverse doubling");
        }

    SuitePlan plan;
    plan.op = OperatorSpec{OperatorKind::STRONG_MFM, cfg, sc.family_kind(), 0, {}};
    plan.u_mult = *ws.u;
    plan.w_mult = ws.w;
    const CubeFamily fac = scenario_family(sc);
    const ConditionReport cond = strong_twc_constant(*ws.u, ws.w, cfg, fac, fac);
    plan.condition = cond.constant;
    plan.cond_json = cond.to_json();
    plan.kappa_ge_one = true;
    SuiteResult res = finish_suite(sc, plan, {});
    res.details["hypotheses"] = hyp;
    return res;
}

// Corollary 3.5: trace inequality (unweighted right-hand sides); k = 1 runs
// the plain operator, k = 2 the strong one.
SuiteResult suite_35(const Scenario& sc) {
    WeightSystem ws = sc.build_weights();
    const ExponentConfig& cfg = sc.cfg;
    for (double pi : cfg.p)
        if (!(pi > 1.0)) return hypotheses_unmet(sc, "needs p_i > 1");
    if (!(cfg.p_total() < cfg.q)) return hypotheses_unmet(sc, "needs p < q");
    if (!ws.u) return hypotheses_unmet(sc, "scenario must supply u");

    SuitePlan plan;
    plan.op = OperatorSpec{cfg.k == 1 ? OperatorKind::MFM : OperatorKind::STRONG_MFM, cfg,
                           sc.family_kind(), 0, {}};
    plan.u_mult = *ws.u;
    plan.w_mult.assign(static_cast<std::size_t>(cfg.m), all_ones(sc));
    std::vector<CubeFamily> fams(static_cast<std::size_t>(cfg.k), scenario_family(sc));
    const ConditionReport cond = trace_constant(*ws.u, cfg, fams);
    plan.condition = std::pow(cond.constant, 1.0 / cfg.q);
    plan.cond_json = cond.to_json();
    plan.cond_json["q_root"] = plan.condition;
    plan.kappa_ge_one = true;
    return finish_suite(sc, plan, {});
}

// Theorem 3.6: potential with product kernels; u^q must satisfy the
// A_infinity surrogate in each variable separately, uniformly in the other.
SuiteResult suite_36(const Scenario& sc) {
    WeightSystem ws = sc.build_weights();
    const ExponentConfig& cfg = sc.cfg;
    if (cfg.k != 2) return hypotheses_unmet(sc, "suite needs k = 2");
    try {
        cfg.validate_strict();
    } catch (const ParameterError& e) {
        return hypotheses_unmet(sc, e.what());
    }
    if (!ws.u) return hypotheses_unmet(sc, "scenario must supply u");

    const GridFunction uq = pointwise_pow(*ws.u, cfg.q);
    const CubeFamily slice_fam = CubeFamily::dyadic(cfg.n, sc.level);
    double worst = 0.0;
    const std::size_t fcells = std::size_t{1} << (cfg.n * sc.level);
    for (int s = 0; s < 2; ++s) {
        for (std::size_t frozen = 0; frozen < fcells; ++frozen) {
            Index fr{};
            const GridFunction factor_model = GridFunction::constant(cfg.n, sc.level, 0.0);
            const Index fcell = factor_model.cell_of(frozen);
            for (int a = 0; a < cfg.n; ++a) fr[(1 - s) * cfg.n + a] = fcell[a];
            const GridFunction sl = slice(uq, s * cfg.n, cfg.n, fr);
            worst = std::max(worst, ainf_surrogate(sl, slice_fam).constant);
        }
    }
    if (!(worst <= 1e3))
        return hypotheses_unmet(sc, "u^q fails the per-variable A_infinity surrogate");

    SuitePlan plan;
    plan.op = OperatorSpec{OperatorKind::STRONG_MFI, cfg, sc.family_kind(), 0,
                           scenario_quad(sc)};
    plan.u_mult = *ws.u;
    plan.w_mult = ws.w;
    const CubeFamily fac = scenario_family(sc);
    const ConditionReport cond = strong_twc_constant(*ws.u, ws.w, cfg, fac, fac);
    plan.condition = cond.constant;
    plan.cond_json = cond.to_json();
    plan.kappa_ge_one = false;
    plan.necessity_max_trials = 64;
    SuiteResult res = finish_suite(sc, plan, {});
    res.details["per_variable_ainf"] = worst;
    return res;
}

// Corollary 3.7: one-weight inequality for the strong operators with
// product-type weights under 1/q = 1/p - alpha/n.
SuiteResult suite_37(const Scenario& sc) {
    WeightSystem ws = sc.build_weights();
    const ExponentConfig& cfg = sc.cfg;
    if (cfg.k != 2) return hypotheses_unmet(sc, "suite needs k = 2");
    for (double pi : cfg.p)
        if (!(pi > 1.0)) return hypotheses_unmet(sc, "needs p_i > 1");
    if (std::abs(cfg.alpha[0] - cfg.alpha[1]) > 1e-12)
        return hypotheses_unmet(sc, "one-weight strong suite needs equal alpha_s");
    if (!cfg.one_weight_relation(1e-9))
        return hypotheses_unmet(sc, "needs 1/q = 1/p - alpha/n");
    if (ws.w_factors.size() != ws.w.size())
        return hypotheses_unmet(sc, "w_i must be of product type");

    SuitePlan plan;
    const bool use_mfi = sc.operator_kind == "strong-mfi";
    plan.op = OperatorSpec{use_mfi ? OperatorKind::STRONG_MFI : OperatorKind::STRONG_MFM, cfg,
                           sc.family_kind(), 0, scenario_quad(sc)};
    std::vector<double> ones(cfg.p.size(), 1.0);
    plan.u_mult = multiplier_product(ws.w, ones);
    plan.w_mult = ws.w;
    const CubeFamily fac = scenario_family(sc);
    const ConditionReport cond =
        strong_one_weight_constant(ws.w, cfg.p, cfg.q, fac, fac);
    plan.condition = cond.constant;
    plan.cond_json = cond.to_json();
    plan.kappa_ge_one = !use_mfi;
    return finish_suite(sc, plan, {});
}

// Theorem 3.8: Fefferman-Stein inequality; no condition constant, the suite
// measures the best C over the trial family.
SuiteResult suite_38(const Scenario& sc) {
    WeightSystem ws = sc.build_weights();
    const ExponentConfig& cfg = sc.cfg;
    if (cfg.k != 2) return hypotheses_unmet(sc, "suite needs k = 2");
    if (!ws.v) return hypotheses_unmet(sc, "scenario must supply v");
    for (double pi : cfg.p)
        if (!(pi > 1.0)) return hypotheses_unmet(sc, "needs p_i > 1");
    if (!(cfg.p_total() < cfg.q)) return hypotheses_unmet(sc, "needs p < q");

    const CubeFamily fac = scenario_family(sc);
    const GridFunction majorant = fs_majorant(*ws.v, cfg, fac, fac);
    if (!majorant.strictly_positive())
        return hypotheses_unmet(sc, "majorant vanished; v must be positive");

    SuitePlan plan;
    plan.op = OperatorSpec{OperatorKind::STRONG_MFM, cfg, sc.family_kind(), 0, {}};
    plan.u_mult = pointwise_pow(*ws.v, 1.0 / cfg.q);
    const double p = cfg.p_total();
    for (int i = 0; i < cfg.m; ++i)
        plan.w_mult.push_back(
            pointwise_pow(majorant, p / (cfg.p[static_cast<std::size_t>(i)] * cfg.q * cfg.m)));
    plan.run_necessity = false;
    SuiteResult res = finish_suite(sc, plan, {});
    res.details["majorant_min"] =
        *std::min_element(majorant.values().begin(), majorant.values().end());
    res.details["majorant_max"] =
        *std::max_element(majorant.values().begin(), majorant.values().end());
    return res;
}

// Theorem G / Corollary C: dyadic Carleson-Hormander embedding.
SuiteResult suite_G(const Scenario& sc) {
    WeightSystem ws = sc.build_weights();
    if (!ws.rho) return hypotheses_unmet(sc, "scenario must supply rho");
    const auto& ex = sc.extra;
    const double r = ex.value("r", 2.0);
    const double q = ex.value("q", 3.0);
    const std::string rule_name = ex.value("rule", "power");
    const CarlesonRule rule =
        rule_name == "threshold"
            ? CarlesonRule::threshold()
            : CarlesonRule::power(ex.value("beta", 1.5), ex.value("scale", 1.0));

    std::vector<GridFunction> gs;
    gs.push_back(GridFunction::constant(sc.cfg.domain_dim(), sc.level, 1.0));
    RandomSource rng(sc.seed ^ 0x5bd1e995ULL);
    for (int t = 0; t < sc.trials.random_count; ++t)
        gs.push_back(random_log_uniform(sc.cfg.domain_dim(), sc.level, sc.trials.range_lo,
                                        sc.trials.range_hi, rng));
    const CarlesonResult cr = carleson_check(*ws.rho, r, q, rule, gs);

    SuiteResult res;
    res.condition = cr.c1;
    res.estimated_norm = cr.c_hat;
    res.kappa = cr.c1 > 0.0 ? cr.c_hat / cr.c1 : 0.0;
    res.verdict = cr.verdict;
    res.details = cr.details;
    res.details["rd"] = cr.rd;
    res.details["rule"] = rule_name;
    return meta_only(sc, res);
}

// Lemma 2.2: vector-class inclusion constants.
SuiteResult suite_L22(const Scenario& sc) {
    WeightSystem ws = sc.build_weights();
    const ExponentConfig& cfg = sc.cfg;
    for (double pi : cfg.p)
        if (!(pi > 1.0)) return hypotheses_unmet(sc, "lemma 2.2 needs p_i > 1");
    const Lemma22Report rep = inclusion_check_lemma22(ws.w, cfg.p, cfg.q, cfg.alpha[0],
                                                      cfg.n, scenario_family(sc));
    SuiteResult res;
    res.condition = rep.vector_constant.constant;
    res.estimated_norm = rep.individual_product;
    res.verdict = rep.pass ? "pass" : "fail";
    res.details = rep.to_json();
    return meta_only(sc, res);
}

// Lemmas 4.1 / 4.4: truncated suprema against shift-averaged dyadic ones.
SuiteResult suite_shift_average(const Scenario& sc) {
    const ExponentConfig& cfg = sc.cfg;
    const int k_max = sc.extra.value("k_max", -1);
    RandomSource rng(sc.seed ^ 0x2545f491ULL);
    double worst = 0.0;
    const int tuples = std::max(1, sc.trials.random_count);
    for (int t = 0; t < tuples; ++t) {
        std::vector<GridFunction> fs;
        for (int i = 0; i < cfg.m; ++i)
            fs.push_back(random_log_uniform(cfg.domain_dim(), sc.level, sc.trials.range_lo,
                                            sc.trials.range_hi, rng));
        worst = std::max(worst, shift_average_constant(fs, cfg, k_max));
    }
    SuiteResult res;
    res.estimated_norm = worst;
    res.details["k_max"] = k_max;
    res.details["tuples"] = tuples;
    res.verdict = std::isfinite(worst) && worst > 0.0 ? "pass" : "fail";
    return meta_only(sc, res);
}

// Lemma 4.2: A_infinity domination of the potential by the maximal operator.
SuiteResult suite_L42(const Scenario& sc) {
    WeightSystem ws = sc.build_weights();
    const ExponentConfig& cfg = sc.cfg;
    if (!ws.v) return hypotheses_unmet(sc, "scenario must supply v");
    if (!(cfg.alpha[0] > 0.0)) return hypotheses_unmet(sc, "needs alpha > 0");

    RandomSource rng(sc.seed ^ 0x85ebca6bULL);
    std::vector<std::vector<GridFunction>> tuples;
    tuples.push_back(std::vector<GridFunction>(
        static_cast<std::size_t>(cfg.m), GridFunction::constant(cfg.n, sc.level, 1.0)));
    for (int t = 0; t < sc.trials.random_count; ++t) {
        std::vector<GridFunction> fs;
        for (int i = 0; i < cfg.m; ++i)
            fs.push_back(random_log_uniform(cfg.n, sc.level, sc.trials.range_lo,
                                            sc.trials.range_hi, rng));
        tuples.push_back(std::move(fs));
    }
    const DominationResult dr =
        ainfty_domination_check(tuples, *ws.v, cfg, scenario_quad(sc));
    SuiteResult res;
    res.estimated_norm = dr.max_ratio;
    res.verdict = dr.verdict;
    res.details["trials"] = dr.trials;
    res.details["skipped"] = dr.skipped;
    return meta_only(sc, res);
}

} // namespace

std::vector<std::string> suite_ids() {
    return {"A", "B", "3.3", "C", "D", "E", "F", "3.1", "3.2", "3.4", "3.5", "3.6",
            "3.7", "3.8", "G", "L2.2", "L4.1", "L4.2", "L4.4"};
}

SuiteResult run_suite(const Scenario& sc) {
    const auto start = std::chrono::steady_clock::now();
    SuiteResult res = [&] {
        const std::string& id = sc.theorem;
        if (id == "A") return suite_A(sc);
        if (id == "B" || id == "3.3") return suite_B(sc);
        if (id == "C") return suite_power_bump(sc, /*potential=*/true);
        if (id == "D") return suite_D(sc);
        if (id == "E") return suite_power_bump(sc, /*potential=*/false);
        if (id == "F") return suite_F(sc);
        if (id == "3.1") return suite_31(sc, /*potential=*/false);
        if (id == "3.2") return suite_31(sc, /*potential=*/true);
        if (id == "3.4") return suite_34(sc);
        if (id == "3.5") return suite_35(sc);
        if (id == "3.6") return suite_36(sc);
        if (id == "3.7") return suite_37(sc);
        if (id == "3.8") return suite_38(sc);
        if (id == "G") return suite_G(sc);
        if (id == "L2.2") return suite_L22(sc);
        if (id == "L4.1" || id == "L4.4") return suite_shift_average(sc);
        if (id == "L4.2") return suite_L42(sc);
        throw ConfigError("unknown theorem suite: " + id);
    }();
    res.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - start)
                         .count();
    return res;
}

// --- baselines -------------------------------------------------------------------------------

BaselineStore::BaselineStore(std::filesystem::path file) : file_(std::move(file)) {
    if (std::filesystem::exists(file_)) data_ = load_json(file_);
    if (!data_.is_object()) data_ = nlohmann::json::object();
}

double* BaselineStore::find(const std::string& key, double value) {
    if (!data_.contains(key)) {
        data_[key] = value;
        dirty_ = true;
        return nullptr;
    }
    static double slot;
    slot = data_.at(key).get<double>();
    return &slot;
}

bool BaselineStore::check_within(const std::string& key, double value, double tol,
                                 std::string* msg) {
    const double* base = find(key, value);
    if (!base) {
        if (msg) *msg = key + ": recorded " + std::to_string(value);
        return true;
    }
    const bool ok = std::abs(value - *base) <= tol * std::abs(*base);
    if (msg)
        *msg = key + ": value " + std::to_string(value) + " vs baseline " +
               std::to_string(*base) + (ok ? " (ok)" : " (out of tolerance)");
    return ok;
}

bool BaselineStore::check_at_least(const std::string& key, double value, double tol,
                                   std::string* msg) {
    const double* base = find(key, value);
    if (!base) {
        if (msg) *msg = key + ": recorded " + std::to_string(value);
        return true;
    }
    const bool ok = value >= *base * (1.0 - tol);
    if (msg)
        *msg = key + ": value " + std::to_string(value) + " vs baseline " +
               std::to_string(*base) + (ok ? " (ok)" : " (below tolerance)");
    return ok;
}

bool BaselineStore::check_at_most(const std::string& key, double value, double tol,
                                  std::string* msg) {
    const double* base = find(key, value);
    if (!base) {
        if (msg) *msg = key + ": recorded " + std::to_string(value);
        return true;
    }
    const bool ok = value <= *base * (1.0 + tol);
    if (msg)
        *msg = key + ": value " + std::to_string(value) + " vs baseline " +
               std::to_string(*base) + (ok ? " (ok)" : " (above tolerance)");
    return ok;
}

void BaselineStore::save() {
    if (!dirty_) return;
    save_text(file_, canonical_dump(data_));
    dirty_ = false;
}

} // namespace mfrac
