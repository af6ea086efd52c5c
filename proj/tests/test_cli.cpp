#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "mfrac/io.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const char* kCli = MFRAC_CLI_PATH;
const fs::path kSource = MFRAC_SOURCE_DIR;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("mfrac_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

int run(const std::string& args) {
    const std::string cmd = std::string(kCli) + " " + args + " >/dev/null 2>/dev/null";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void put(const fs::path& p, const json& j) {
    std::ofstream out(p);
    out << j.dump(2) << "\n";
}

} // namespace

TEST_CASE("gen-weight: deterministic bytes, JSON and CSV formats") {
    TempDir tmp;
    const fs::path cfg = tmp.path / "gen.json";
    put(cfg, {{"dimension", 1},
              {"level", 4},
              {"spec", {{"generator", "log-uniform"}, {"lo", 0.5}, {"hi", 2.0}}},
              {"seed", 7}});
    const fs::path out1 = tmp.path / "w1.json";
    const fs::path out2 = tmp.path / "w2.json";
    CHECK(run("gen-weight --config " + cfg.string() + " --out " + out1.string()) == 0);
    CHECK(run("gen-weight --config " + cfg.string() + " --out " + out2.string()) == 0);
    CHECK(slurp(out1) == slurp(out2));

    const auto f = mfrac::read_grid_function(out1);
    CHECK(f.dimension() == 1);
    CHECK(f.level() == 4);

    // constant generator, CSV round trip
    const fs::path ccfg = tmp.path / "genc.json";
    put(ccfg, {{"dimension", 1},
               {"level", 4},
               {"spec", {{"generator", "constant"}, {"value", 1.0}}},
               {"format", "csv"}});
    const fs::path outc = tmp.path / "ones.csv";
    CHECK(run("gen-weight --config " + ccfg.string() + " --out " + outc.string()) == 0);
    const auto ones = mfrac::read_grid_function(outc);
    for (std::size_t i = 0; i < ones.size(); ++i) CHECK(ones[i] == 1.0);
}

TEST_CASE("eval: maximal operator of ones is one, dyadic flag present") {
    TempDir tmp;
    const fs::path cfg = tmp.path / "eval.json";
    const fs::path out = tmp.path / "out.json";
    const fs::path summary = tmp.path / "summary.json";
    put(cfg,
        {{"grid", {{"n", 1}, {"level", 4}}},
         {"operator",
          {{"kind", "mfm-dyadic"},
           {"exponents", {{"m", 2}, {"p", {2.0, 2.0}}, {"q", 2.0}, {"alpha", {0.0}}}}}},
         {"inputs",
          {{{"generator", "constant"}, {"value", 1.0}},
           {{"generator", "constant"}, {"value", 1.0}}}},
         {"out", out.string()},
         {"summary_out", summary.string()}});
    CHECK(run("eval --config " + cfg.string()) == 0);
    const auto f = mfrac::read_grid_function(out);
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(f[i] == doctest::Approx(1.0));
    const json s = mfrac::load_json(summary);
    CHECK(s.at("max").get<double>() == doctest::Approx(1.0));
    CHECK(s.at("pointwise_le_grid_aligned").get<bool>());
}

TEST_CASE("eval: cost cap exits with code 3") {
    TempDir tmp;
    const fs::path cfg = tmp.path / "eval.json";
    put(cfg,
        {{"grid", {{"n", 1}, {"level", 6}}},
         {"operator",
          {{"kind", "mfi"},
           {"exponents", {{"m", 2}, {"p", {2.0, 2.0}}, {"q", 2.0}, {"alpha", {0.5}}}},
           {"quadrature", {{"cost_cap", 100.0}}}}},
         {"inputs",
          {{{"generator", "constant"}, {"value", 1.0}},
           {{"generator", "constant"}, {"value", 1.0}}}},
         {"out", (tmp.path / "x.json").string()}});
    CHECK(run("eval --config " + cfg.string()) == 3);
}

TEST_CASE("eval: closed-form potential case through the CLI") {
    TempDir tmp;
    const fs::path cfg = tmp.path / "eval.json";
    const fs::path out = tmp.path / "riesz.json";
    put(cfg,
        {{"grid", {{"n", 1}, {"level", 8}}},
         {"operator",
          {{"kind", "mfi"},
           {"exponents", {{"m", 1}, {"p", {2.0}}, {"q", 2.0}, {"alpha", {0.5}}}},
           {"quadrature", {{"depth", 12}, {"metric", "euclidean"}}}}},
         {"inputs", {{{"generator", "constant"}, {"value", 1.0}}}},
         {"out", out.string()}});
    CHECK(run("eval --config " + cfg.string()) == 0);
    const auto f = mfrac::read_grid_function(out);
    for (std::size_t i = 0; i < f.size(); i += 32) {
        const double x = (static_cast<double>(i) + 0.5) / 256.0;
        const double want = 2.0 * (std::sqrt(x) + std::sqrt(1.0 - x));
        CHECK(std::abs(f[i] - want) / want < 0.02);
    }
}

TEST_CASE("check-class: trivial constants and the blowup formula") {
    TempDir tmp;
    {
        const fs::path cfg = tmp.path / "ap.json";
        const fs::path out = tmp.path / "ap_out.json";
        put(cfg, {{"constant", "ap-vector"},
                  {"grid", {{"n", 1}, {"level", 4}}},
                  {"exponents", {{"m", 2}, {"p", {2.0, 2.0}}, {"q", 2.0}, {"alpha", {0.5}}}},
                  {"weights",
                   {{"w",
                     {{{"generator", "constant"}, {"value", 1.0}},
                      {{"generator", "constant"}, {"value", 1.0}}}}}},
                  {"out", out.string()}});
        CHECK(run("check-class --config " + cfg.string()) == 0);
        const json r = mfrac::load_json(out);
        CHECK(std::abs(r.at("constant").get<double>() - 1.0) < 1e-12);
    }
    {
        // e = alpha + 1/q - 1/p = 0.25 + 0.5 - 1 = -0.25: constant 2^{L/4}
        const fs::path cfg = tmp.path / "twc.json";
        const fs::path out = tmp.path / "twc_out.json";
        put(cfg, {{"constant", "twc"},
                  {"grid", {{"n", 1}, {"level", 4}}},
                  {"exponents", {{"m", 2}, {"p", {2.0, 2.0}}, {"q", 2.0}, {"alpha", {0.25}}}},
                  {"weights",
                   {{"u", {{"generator", "constant"}, {"value", 1.0}}},
                    {"w",
                     {{{"generator", "constant"}, {"value", 1.0}},
                      {{"generator", "constant"}, {"value", 1.0}}}}}},
                  {"family", "dyadic"},
                  {"out", out.string()}});
        CHECK(run("check-class --config " + cfg.string()) == 0);
        const json r = mfrac::load_json(out);
        CHECK(r.at("constant").get<double>() == doctest::Approx(std::pow(2.0, 1.0)).epsilon(1e-12));
    }
    {
        const fs::path cfg = tmp.path / "rd.json";
        const fs::path out = tmp.path / "rd_out.json";
        put(cfg, {{"constant", "rd"},
                  {"grid", {{"n", 1}, {"level", 4}}},
                  {"weights", {{"w", {{{"generator", "constant"}, {"value", 1.0}}}}}},
                  {"params", {{"dyadic", true}}},
                  {"out", out.string()}});
        CHECK(run("check-class --config " + cfg.string()) == 0);
        const json r = mfrac::load_json(out);
        CHECK(std::abs(r.at("constant").get<double>() - 2.0) < 1e-12);
    }
}

TEST_CASE("verify: exit codes and byte-reproducible output") {
    TempDir tmp;
    const fs::path scenario = kSource / "scenarios" / "thm31-step.json";
    REQUIRE(fs::exists(scenario));
    const fs::path out1 = tmp.path / "r1.json";
    const fs::path out2 = tmp.path / "r2.json";
    CHECK(run("verify --config " + scenario.string() + " --out " + out1.string()) == 0);
    CHECK(run("verify --config " + scenario.string() + " --threads 4 --out " +
              out2.string()) == 0);
    CHECK(slurp(out1) == slurp(out2));

    // hypotheses violation: q < p
    json bad = mfrac::load_json(scenario);
    bad["exponents"]["q"] = 0.4;
    const fs::path badcfg = tmp.path / "bad.json";
    put(badcfg, bad);
    CHECK(run("verify --config " + badcfg.string() + " --out " +
              (tmp.path / "bad_out.json").string()) == 2);
}

TEST_CASE("verify: seed override changes the output, rerun does not") {
    TempDir tmp;
    const fs::path scenario = kSource / "scenarios" / "thm31-logu.json";
    const fs::path a = tmp.path / "a.json";
    const fs::path b = tmp.path / "b.json";
    const fs::path c = tmp.path / "c.json";
    CHECK(run("verify --config " + scenario.string() + " --out " + a.string()) == 0);
    CHECK(run("verify --config " + scenario.string() + " --out " + b.string()) == 0);
    CHECK(run("verify --config " + scenario.string() + " --seed 999 --out " + c.string()) == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a) != slurp(c));
}

TEST_CASE("report: flattens suite results to CSV") {
    TempDir tmp;
    const fs::path scenario = kSource / "scenarios" / "thm35-k1-logu.json";
    const fs::path res = tmp.path / "res.json";
    REQUIRE(run("verify --config " + scenario.string() + " --out " + res.string()) == 0);

    const fs::path cfg = tmp.path / "report.json";
    put(cfg, {{"inputs", {res.string()}}});
    const fs::path csv = tmp.path / "out.csv";
    CHECK(run("report --config " + cfg.string() + " --csv --out " + csv.string()) == 0);
    const std::string text = slurp(csv);
    CHECK(text.find("theorem,scenario,condition") == 0);
    CHECK(text.find("3.5") != std::string::npos);
}

TEST_CASE("malformed configs are rejected with exit 4 before any computation") {
    TempDir tmp;
    {
        const fs::path cfg = tmp.path / "unknown.json";
        put(cfg, {{"dimension", 1},
                  {"level", 3},
                  {"spec", {{"generator", "constant"}, {"value", 1.0}}},
                  {"zzz", 1}});
        CHECK(run("gen-weight --config " + cfg.string()) == 4);
    }
    {
        const fs::path cfg = tmp.path / "notjson.json";
        std::ofstream(cfg) << "this is not json\n";
        CHECK(run("gen-weight --config " + cfg.string()) == 4);
    }
    {
        const fs::path cfg = tmp.path / "badgen.json";
        put(cfg, {{"dimension", 1},
                  {"level", 3},
                  {"spec", {{"generator", "warp-drive"}}}});
        CHECK(run("gen-weight --config " + cfg.string()) == 4);
    }
}
