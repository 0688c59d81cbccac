#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "bindcert/cli.hpp"
#include "bindcert/errors.hpp"

using namespace bindcert;
using namespace bindcert::cli;
using config::parse_config;

namespace {

int error_line(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.line;
    }
    return -1;
}

std::string config_path(const char* name) { return std::string(BINDCERT_SOURCE_DIR) + "/configs/" + name; }

const char* kSmallHydrogen = R"(kinetic: {type: nonrelativistic, mass: 1.0}
potential: {type: coulomb, charge: 1.0, sampling: spectral}
grid: {dim: 3, L: 16.0, N: 16}
solver: {binding_tol: 0.05}
)";

const char* kTinySweep = R"(kinetic: {type: semirelativistic, mass: 1.0}
potential: {type: coulomb, charge: 0.5}
grid: {dim: 3, L: 16.0, N: 12}
sweep:
  parameter: potential.charge
  values: [0.4, 0.8, 1.2]
)";

const char* kDecoupled = R"(bernstein: {preset: one_minus_exp, t: 1.0, w: 2.0}
potential: {type: square, depth: 1.5, radius: 2.0}
nelson:
  L: 8.0
  N: 8
  n_max: 2
  modes:
    - {k_index: 1, g: 0.0, omega: 1.0}
  P: [0.5, 0.0, 0.1]
)";

}  // namespace

TEST_CASE("config errors carry the offending line") {
    CHECK(error_line("kinetic:\n  type: nonrelativistic\n  mas: 1.0\n") == 3);
    CHECK(error_line("grid: {dim: 3, L: 10.0, N: 16}\nkinetics:\n  type: bernstein\n") == 2);
    CHECK(error_line("grid:\n  dim: 3\n  L: ten\n  N: 16\n") == 3);
    CHECK(error_line("grid:\n  dim: 3\n  L: 10.0\n  N: 0\n") == 4);
    CHECK(error_line("potential:\n  type: coulomb\n  charge: [1, 2\n") > 0);
    CHECK(error_line("potential:\n  type: marsupial\n") == 2);
    CHECK(error_line("lemma1:\n  comparator: upside_down\n") == 2);
    CHECK(error_line(kSmallHydrogen) == -1);
    CHECK_THROWS_AS(config::load_config("/nonexistent/job.yaml"), ConfigError);
}

TEST_CASE("resolved sections echo defaults") {
    const auto cfg = parse_config("grid: {dim: 1, L: 10.0, N: 32}\npotential: {type: harmonic, omega: 1.0}\n");
    CHECK(cfg.solver.tol == 1e-9);
    CHECK(cfg.output.format == "json");
    const auto echo = cfg.echo({"kinetic", "potential", "grid", "solver"});
    CHECK(echo.contains("solver"));
    CHECK(echo["solver"]["tol"].get<double>() == 1e-9);
    CHECK(echo["solver"]["max_iter"].get<int>() == 5000);
    CHECK(echo["potential"]["sampling"].get<std::string>() == "point");
    CHECK_FALSE(echo.contains("kinetic"));
}

TEST_CASE("binding verdicts") {
    SUBCASE("no potential does not bind") {
        const auto res = solve_onebody(config::load_config(config_path("free_particle.yaml")));
        REQUIRE(res.records.size() == 1);
        const auto& r = res.records[0];
        CHECK(r.kind == "binding");
        CHECK(std::abs(r.number("e0")) <= 1e-9);
        CHECK(std::get<bool>(*r.find("binding_positive")) == false);
        CHECK(res.exit_code == kOk);
    }
    SUBCASE("coarse hydrogen binds") {
        const auto res = solve_onebody(parse_config(kSmallHydrogen));
        const auto& r = res.records[0];
        CHECK(r.number("e0") < -0.4);
        CHECK(std::get<bool>(*r.find("binding_positive")));
        CHECK(r.pass);
    }
}

TEST_CASE("run maps failures to exit codes") {
    const auto dir = std::filesystem::temp_directory_path() / "bindcert_test_cli";
    std::filesystem::create_directories(dir);
    RunOptions opt;
    opt.out_dir = dir.string();
    std::ostringstream log;
    CHECK(run("solve-onebody", std::string(BINDCERT_SOURCE_DIR) + "/tests/data/malformed.yaml", opt, log) ==
          kConfigError);
    CHECK(log.str().find("line") != std::string::npos);
    CHECK(run("solve-onebody", "/nonexistent.yaml", opt, log) == kConfigError);
    CHECK(run("verify-theorem", config_path("theorem_off_lattice.yaml"), opt, log) == kCheckFailed);
    CHECK(run("solve-onebody", config_path("free_particle.yaml"), opt, log) == kOk);
    CHECK(std::filesystem::exists(dir / "free_particle.json"));
    opt.format = "csv";
    CHECK(run("solve-onebody", config_path("free_particle.yaml"), opt, log) == kOk);
    std::ifstream csv(dir / "free_particle.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header == "L,N,eigenvalue,residual,iterations");
}

TEST_CASE("lemma verification") {
    config::Lemma1Section s;
    s.samples = 2000;
    s.exp_samples = 5000;
    const auto batch = lemma1_batch(s, 3);
    CHECK(batch.max_margin <= 1e-12);
    CHECK(batch.exp_max <= 1e-12);
    CHECK(batch.scaling_defect <= 1e-12);

    // B(u) = u gives equality for every p, k.
    const auto linear = lemma1_batch(s, 4, BernsteinFunction(0.0, 1.0, {}));
    CHECK(std::abs(linear.max_margin) <= 1e-9);

    auto flipped = s;
    flipped.sign_flipped = true;
    CHECK(lemma1_batch(flipped, 3).max_margin > 1e-3);

    auto cfg = parse_config("lemma1: {samples: 500, exp_samples: 500, comparator: sign_flipped}\n");
    CHECK(verify_lemma1(cfg).exit_code == kCheckFailed);
    cfg = parse_config("lemma1: {samples: 500, exp_samples: 500}\nbernstein: {preset: sqrt_shifted, mass: 1.0}\n");
    const auto res = verify_lemma1(cfg);
    CHECK(res.exit_code == kOk);
    CHECK(res.records.size() == 3);
    for (const auto& r : res.records) CHECK(r.pass);
}

TEST_CASE("theorem verification") {
    const auto res = verify_theorem(parse_config(kDecoupled));
    CHECK(res.exit_code == kOk);
    REQUIRE(res.records.size() == 2);
    CHECK(res.records[0].kind == "hypothesis");
    const auto& t = res.records[1];
    CHECK(t.kind == "theorem");
    CHECK(std::get<bool>(*t.find("decoupled")));
    CHECK(std::abs(t.number("slack")) <= 1e-10);
    CHECK(t.pass);

    const auto off = verify_theorem(config::load_config(config_path("theorem_off_lattice.yaml")));
    CHECK(off.exit_code == kCheckFailed);
    CHECK(off.records[0].kind == "hypothesis");
    CHECK_FALSE(off.records[0].pass);
    CHECK(off.records[0].number("h2") > 1e-6);
}

TEST_CASE("seeded random batches") {
    const char* text = "nelson:\n  random: {count: 6, decoupled_every: 3, max_dim: 512}\nsolver: {seed: 11}\n";
    auto cfg = parse_config(text);
    const auto a = theorem_instances(cfg);
    const auto b = theorem_instances(parse_config(text));
    REQUIRE(a.size() == 6);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(describe(a[i]) == describe(b[i]));
    CHECK(a[2].decoupled());
    CHECK(a[5].decoupled());
    RunOptions opt;
    opt.seed = 12;
    apply_overrides(cfg, opt);
    const auto c = theorem_instances(cfg);
    CHECK(describe(c[0]) != describe(a[0]));

    const auto r1 = verify_theorem(parse_config(text));
    const auto r2 = verify_theorem(parse_config(text));
    CHECK(r1.exit_code == kOk);
    CHECK(render(r1, "json") == render(r2, "json"));
}

TEST_CASE("sweeps") {
    const auto cfg = parse_config(kTinySweep);
    const auto serial = sweep(cfg, 1);
    const auto parallel = sweep(cfg, 3);
    CHECK(render(serial, "json") == render(parallel, "json"));
    REQUIRE(serial.records.size() == 3);
    CHECK(serial.records[0].name == "potential.charge=0.40000000000000002");
    double prev = 1.0;
    for (const auto& r : serial.records) {
        CHECK(r.number("e0") <= prev);
        prev = r.number("e0");
    }

    const auto single = config::with_override(cfg, "potential.charge", 0.8);
    const auto direct = solve_onebody(single);
    CHECK(direct.records[0].digest == serial.records[1].digest);
    CHECK(direct.records[0].number("e0") == serial.records[1].number("e0"));
    CHECK_THROWS_AS(config::with_override(cfg, "potential.nothing", 1.0), ConfigError);
}
