// mfrac: batch front end for the fractional-operator laboratory.
// Subcommands: gen-weight, eval, check-class, verify, report.
// Every output is a pure function of (config file, input files); wall time
// goes to a sidecar .log next to --out, never into the artifact itself.

#include <chrono>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "mfrac/io.hpp"
#include "mfrac/operators.hpp"
#include "mfrac/parallel.hpp"
#include "mfrac/verify.hpp"
#include "mfrac/weights.hpp"

namespace {

using nlohmann::json;

struct CommonFlags {
    std::string config;
    std::optional<std::int64_t> seed;
    std::optional<int> level;
    int threads = 1;
    std::string out;
    bool csv = false;
};

void reject_unknown(const json& j, const std::set<std::string>& allowed,
                    const std::string& where) {
    if (!j.is_object()) throw mfrac::ConfigError(where + " must be a JSON object");
    for (const auto& [key, value] : j.items())
        if (!allowed.count(key)) throw mfrac::ConfigError("unknown key \"" + key + "\" in " + where);
}

json provenance(const CommonFlags& flags) {
    // only overrides that affect the computation; output paths stay out so
    // identical (config, seed) runs stay byte-identical
    json p;
    p["config"] = flags.config;
    json overrides = json::object();
    if (flags.seed) overrides["seed"] = *flags.seed;
    if (flags.level) overrides["level"] = *flags.level;
    p["overrides"] = overrides;
    return p;
}

void write_output(const CommonFlags& flags, const std::string& fallback_key, const json& cfg,
                  const std::string& text, std::int64_t runtime_ms) {
    std::string out = flags.out;
    if (out.empty() && cfg.contains(fallback_key)) out = cfg.at(fallback_key).get<std::string>();
    if (out.empty()) {
        std::cout << text;
        return;
    }
    mfrac::save_text(out, text);
    // sidecar log: the one place wall time and clock data may appear
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    std::ostringstream log;
    log << "runtime_ms=" << runtime_ms << "\nunix_ms="
        << std::chrono::duration_cast<std::chrono::milliseconds>(now).count() << "\n";
    mfrac::save_text(out + ".log", log.str());
}

mfrac::ExponentConfig parse_exponents(const json& j, int n) {
    reject_unknown(j, {"m", "k", "p", "q", "alpha"}, "exponents");
    mfrac::ExponentConfig cfg;
    cfg.n = n;
    cfg.m = j.at("m").get<int>();
    cfg.p = j.at("p").get<std::vector<double>>();
    cfg.q = j.at("q").get<double>();
    if (j.at("alpha").is_array())
        cfg.alpha = j.at("alpha").get<std::vector<double>>();
    else
        cfg.alpha = {j.at("alpha").get<double>()};
    cfg.k = j.value("k", static_cast<int>(cfg.alpha.size()));
    cfg.validate_basic();
    return cfg;
}

mfrac::MfiOptions parse_quadrature(const json& j) {
    mfrac::MfiOptions opt;
    if (j.is_null()) return opt;
    reject_unknown(j, {"depth", "metric", "cost_cap"}, "quadrature");
    opt.refine_depth = j.value("depth", 4);
    const std::string metric = j.value("metric", "torus");
    if (metric == "euclidean")
        opt.metric = mfrac::DistanceMode::Euclidean;
    else if (metric != "torus")
        throw mfrac::ConfigError("metric must be torus or euclidean");
    opt.cost_cap = j.value("cost_cap", 1e9);
    return opt;
}

// --- gen-weight -------------------------------------------------------------

int cmd_gen_weight(const CommonFlags& flags) {
    const auto t0 = std::chrono::steady_clock::now();
    json cfg = mfrac::load_json(flags.config);
    reject_unknown(cfg, {"dimension", "level", "spec", "seed", "out", "format"}, "gen-weight config");
    const int dim = cfg.at("dimension").get<int>();
    const int level = flags.level.value_or(cfg.at("level").get<int>());
    const std::uint64_t seed =
        static_cast<std::uint64_t>(flags.seed.value_or(cfg.value("seed", 0)));
    mfrac::RandomSource rng(seed);
    const mfrac::GridFunction f = mfrac::generate_weight(cfg.at("spec"), dim, level, rng);

    std::string out = flags.out;
    if (out.empty()) out = cfg.value("out", "");
    const std::string format = cfg.value("format", "json");
    const std::string text = format == "csv" ? mfrac::grid_function_to_csv(f)
                                             : mfrac::canonical_dump(mfrac::grid_function_to_json(f));
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
    write_output(flags, "out", cfg, text, ms);
    return 0;
}

// --- eval --------------------------------------------------------------------

int cmd_eval(const CommonFlags& flags) {
    const auto t0 = std::chrono::steady_clock::now();
    json cfg = mfrac::load_json(flags.config);
    reject_unknown(cfg, {"grid", "operator", "inputs", "seed", "out", "summary_out"},
                   "eval config");
    const auto& grid = cfg.at("grid");
    reject_unknown(grid, {"n", "level"}, "eval.grid");
    const int n = grid.at("n").get<int>();
    const int level = flags.level.value_or(grid.at("level").get<int>());

    const auto& opj = cfg.at("operator");
    reject_unknown(opj, {"kind", "exponents", "family", "k_max", "quadrature"}, "eval.operator");
    mfrac::OperatorSpec op;
    op.kind = mfrac::parse_operator_kind(opj.at("kind").get<std::string>());
    op.cfg = parse_exponents(opj.at("exponents"), n);
    op.family = mfrac::CubeFamily::parse_kind(
        opj.value("family", n == 1 && op.cfg.k == 1 ? "grid-aligned" : "dyadic"));
    op.k_max = opj.value("k_max", 0);
    op.quad = parse_quadrature(opj.value("quadrature", json()));

    const std::uint64_t seed =
        static_cast<std::uint64_t>(flags.seed.value_or(cfg.value("seed", 0)));
    mfrac::RandomSource rng(seed);
    std::vector<mfrac::GridFunction> inputs;
    for (const auto& spec : cfg.at("inputs")) {
        if (spec.is_string())
            inputs.push_back(mfrac::read_grid_function(spec.get<std::string>()));
        else
            inputs.push_back(mfrac::generate_weight(spec, op.cfg.domain_dim(), level, rng));
    }

    const mfrac::GridFunction result = op.apply(inputs);

    json summary;
    summary["operator"] = op.name();
    summary["min"] = *std::min_element(result.values().begin(), result.values().end());
    summary["max"] = *std::max_element(result.values().begin(), result.values().end());
    summary["l1"] = mfrac::lp_norm(result, 1.0);
    summary["l2"] = mfrac::lp_norm(result, 2.0);
    summary["weak_lq"] = mfrac::weak_lq_norm(result, op.cfg.q);
    if (op.kind == mfrac::OperatorKind::MFM_DYADIC && n == 1 && op.cfg.k == 1) {
        const mfrac::GridFunction wide =
            mfrac::mfm(inputs, op.cfg, mfrac::CubeFamily::grid_aligned(1, level));
        bool le = true;
        for (std::size_t i = 0; i < result.size(); ++i)
            if (result[i] > wide[i] * (1.0 + 1e-12)) le = false;
        summary["pointwise_le_grid_aligned"] = le;
    }
    summary["provenance"] = provenance(flags);

    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
    write_output(flags, "out", cfg,
                 mfrac::canonical_dump(mfrac::grid_function_to_json(result)), ms);
    if (cfg.contains("summary_out"))
        mfrac::save_text(cfg.at("summary_out").get<std::string>(),
                         mfrac::canonical_dump(summary));
    else
        std::cout << mfrac::canonical_dump(summary);
    return 0;
}

// --- check-class ----------------------------------------------------------------

int cmd_check_class(const CommonFlags& flags) {
    const auto t0 = std::chrono::steady_clock::now();
    json cfg = mfrac::load_json(flags.config);
    reject_unknown(cfg,
                   {"constant", "grid", "exponents", "weights", "family", "params", "seed",
                    "out"},
                   "check-class config");
    const auto& grid = cfg.at("grid");
    const int n = grid.at("n").get<int>();
    const int level = flags.level.value_or(grid.at("level").get<int>());
    const std::string kind = cfg.at("constant").get<std::string>();
    const json params = cfg.value("params", json::object());

    const std::uint64_t seed =
        static_cast<std::uint64_t>(flags.seed.value_or(cfg.value("seed", 0)));
    mfrac::RandomSource rng(seed);
    const json& wj = cfg.value("weights", json::object());
    std::optional<mfrac::ExponentConfig> cfg_exp;
    if (cfg.contains("exponents")) cfg_exp = parse_exponents(cfg.at("exponents"), n);
    const int dim = cfg_exp ? cfg_exp->domain_dim() : n;

    std::optional<mfrac::GridFunction> u;
    std::vector<mfrac::GridFunction> w;
    if (wj.contains("u")) u = mfrac::generate_weight(wj.at("u"), dim, level, rng);
    if (wj.contains("w"))
        for (const auto& spec : wj.at("w"))
            w.push_back(mfrac::generate_weight(spec, dim, level, rng));

    const auto family = [&](int d) {
        return mfrac::CubeFamily::of_kind(
            mfrac::CubeFamily::parse_kind(
                cfg.value("family", d == 1 ? "grid-aligned" : "dyadic")),
            d, level);
    };

    mfrac::ConditionReport rep;
    json extra_out;
    if (kind == "ap-vector") {
        rep = mfrac::ap_vector_constant(w, cfg_exp->p, family(n));
    } else if (kind == "apq-vector") {
        rep = mfrac::apq_vector_constant(w, cfg_exp->p, cfg_exp->q, family(n));
    } else if (kind == "ap") {
        rep = mfrac::ap_constant(w.at(0), params.at("p").get<double>(), family(n));
    } else if (kind == "ainf") {
        rep = mfrac::ainf_surrogate(w.at(0), family(n), params.value("threshold", 1e3));
    } else if (kind == "rd") {
        rep = mfrac::rd_constant(w.at(0), params.value("dyadic", true));
    } else if (kind == "power-bump") {
        rep = mfrac::power_bump_constant(*u, w, *cfg_exp, params.value("r", 1.5),
                                         params.value("variant", 1), family(n),
                                         params.value("unbumped_exponent_1q", false));
    } else if (kind == "twc") {
        rep = mfrac::twc_constant(*u, w, *cfg_exp, family(n));
    } else if (kind == "strong-twc") {
        rep = mfrac::strong_twc_constant(*u, w, *cfg_exp, family(n), family(n));
    } else if (kind == "trace") {
        std::vector<mfrac::CubeFamily> fams(static_cast<std::size_t>(cfg_exp->k), family(n));
        rep = mfrac::trace_constant(*u, *cfg_exp, fams);
    } else if (kind == "strong-one-weight") {
        rep = mfrac::strong_one_weight_constant(w, cfg_exp->p, cfg_exp->q, family(n),
                                                family(n));
    } else if (kind == "lemma22") {
        const mfrac::Lemma22Report rep22 = mfrac::inclusion_check_lemma22(
            w, cfg_exp->p, cfg_exp->q, cfg_exp->alpha[0], n, family(n));
        json out = rep22.to_json();
        out["provenance"] = provenance(flags);
        const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
        write_output(flags, "out", cfg, mfrac::canonical_dump(out), ms);
        return rep22.pass ? 0 : 1;
    } else {
        throw mfrac::ConfigError("unknown constant kind: " + kind);
    }

    json out = rep.to_json();
    out["provenance"] = provenance(flags);
    if (!extra_out.empty()) out["extra"] = extra_out;
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
    write_output(flags, "out", cfg, mfrac::canonical_dump(out), ms);
    return 0;
}

// --- verify -----------------------------------------------------------------------

int cmd_verify(const CommonFlags& flags) {
    const auto t0 = std::chrono::steady_clock::now();
    json cfg = mfrac::load_json(flags.config);
    mfrac::Scenario sc = mfrac::Scenario::from_json(cfg);
    if (flags.seed) {
        sc.seed = static_cast<std::uint64_t>(*flags.seed);
        sc.trials.seed = sc.seed;
    }
    if (flags.level) sc.level = *flags.level;

    mfrac::SuiteResult res;
    try {
        res = mfrac::run_suite(sc);
    } catch (const mfrac::CostCapError& e) {
        res = mfrac::SuiteResult{};
        res.theorem = sc.theorem;
        res.scenario = sc.name;
        res.seed = sc.seed;
        res.level = sc.level;
        res.verdict = "cost-cap";
        res.details["reason"] = e.what();
    }

    json out = res.to_json(/*canonical=*/true);
    out["provenance"] = provenance(flags);
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
    write_output(flags, "out", cfg, mfrac::canonical_dump(out), ms);

    if (res.verdict == "pass") return 0;
    if (res.verdict == "hypotheses-unmet") return 2;
    if (res.verdict == "cost-cap") return 3;
    return 1;
}

// --- report -----------------------------------------------------------------------

int cmd_report(const CommonFlags& flags) {
    const auto t0 = std::chrono::steady_clock::now();
    json cfg = mfrac::load_json(flags.config);
    reject_unknown(cfg, {"inputs", "out"}, "report config");
    std::vector<json> results;
    for (const auto& path : cfg.at("inputs"))
        results.push_back(mfrac::load_json(path.get<std::string>()));

    std::string text;
    if (flags.csv) {
        std::ostringstream os;
        os << "theorem,scenario,condition,estimated_norm,kappa,verdict,seed,level\n";
        char buf[64];
        auto num = [&](const json& v) -> std::string {
            if (v.is_null()) return "";
            std::snprintf(buf, sizeof(buf), "%.17g", v.get<double>());
            return buf;
        };
        for (const auto& r : results) {
            const json c = r.value("constants", json::object());
            os << r.value("theorem", "") << "," << r.value("scenario", "") << ","
               << num(c.value("condition", json())) << ","
               << num(c.value("estimated_norm", json())) << ","
               << num(c.value("kappa", json())) << "," << r.value("verdict", "") << ","
               << r.value("seed", 0ULL) << "," << r.value("level", 0) << "\n";
        }
        text = os.str();
    } else {
        text = mfrac::canonical_dump(json(results));
    }
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
    write_output(flags, "out", cfg, text, ms);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"mfrac: multilinear fractional operator laboratory"};
    app.require_subcommand(1);

    CommonFlags flags;
    const auto add_common = [&](CLI::App* sub, bool with_csv = false) {
        sub->add_option("--config", flags.config, "JSON config file")->required();
        sub->add_option("--seed", flags.seed, "override the config seed");
        sub->add_option("--level", flags.level, "override the grid level");
        sub->add_option("--threads", flags.threads, "parallelism degree (outputs unchanged)");
        sub->add_option("--out", flags.out, "override the output path");
        if (with_csv) sub->add_flag("--csv", flags.csv, "emit a flat CSV");
    };

    auto* gen = app.add_subcommand("gen-weight", "generate a weight file");
    add_common(gen);
    auto* ev = app.add_subcommand("eval", "evaluate an operator");
    add_common(ev);
    auto* chk = app.add_subcommand("check-class", "compute a weight-class constant");
    add_common(chk);
    auto* ver = app.add_subcommand("verify", "run a theorem suite");
    add_common(ver);
    auto* rep = app.add_subcommand("report", "flatten suite results");
    add_common(rep, /*with_csv=*/true);

    CLI11_PARSE(app, argc, argv);
    mfrac::set_parallel_threads(flags.threads);

    try {
        if (gen->parsed()) return cmd_gen_weight(flags);
        if (ev->parsed()) return cmd_eval(flags);
        if (chk->parsed()) return cmd_check_class(flags);
        if (ver->parsed()) return cmd_verify(flags);
        if (rep->parsed()) return cmd_report(flags);
    } catch (const mfrac::CostCapError& e) {
        std::cerr << "cost-cap: " << e.what() << "\n";
        return 3;
    } catch (const mfrac::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 4;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
