#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

#include "test_helpers.hpp"
#include "torusns/io.hpp"

using namespace torusns;
using namespace torusns::testing;
namespace fs = std::filesystem;

namespace {

fs::path tmp_dir() {
    const fs::path dir = TEST_TMP_DIR;
    fs::create_directories(dir);
    return dir;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(CLI_BINARY_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace

TEST_CASE("form field JSON and binary round trips") {
    const Grid g({8, 4, 8});
    auto r = rng(211);
    for (Repr repr : {Repr::spectral, Repr::physical}) {
        const FormField u = random_band_limited(g, 2, r).to(repr);
        const FormField back = field_from_json(field_to_json(u));
        CHECK(back.degree() == 2);
        CHECK(back.repr() == repr);
        CHECK((back - u).l2_norm() == 0.0); // doubles survive the json tree untouched

        const fs::path path = tmp_dir() / "field_roundtrip.tnsf";
        write_field_binary(u, path.string());
        const FormField bin = read_field_binary(path.string());
        CHECK(bin.repr() == repr);
        CHECK((bin - u).l2_norm() == 0.0);
    }

    json j = field_to_json(random_band_limited(g, 1, r));
    j["format"] = "something-else";
    CHECK_THROWS_AS(field_from_json(j), std::invalid_argument);
    CHECK_THROWS_AS(read_field_binary((tmp_dir() / "missing.tnsf").string()),
                    std::runtime_error);
}

TEST_CASE("space-time field round trip") {
    const Grid g(3, 4);
    auto r = rng(223);
    const FormField base = random_band_limited(g, 1, r);
    const SpaceTimeField u = SpaceTimeField::sample(
        0.25, 5, [&](double t) { return std::exp(-t) * base; });
    const SpaceTimeField back = spacetime_from_json(spacetime_to_json(u));
    CHECK(back.steps() == u.steps());
    CHECK(back.horizon() == u.horizon());
    CHECK((back - u).sup_l2_norm() == 0.0);
}

TEST_CASE("bilinear table and solver config round trips") {
    BilinearSpec spec;
    spec.m1_table = std::vector<BilinearEntry>{{0, 1, 2, -1.5}, {2, 0, 0, 0.25}};
    spec.c1 = 2.0;
    const BilinearSpec back = bilinear_from_json(bilinear_to_json(spec));
    REQUIRE(back.m1_table.has_value());
    CHECK_FALSE(back.m2_table.has_value());
    CHECK(back.m1_table->size() == 2u);
    CHECK((*back.m1_table)[0].coeff == -1.5);
    CHECK(back.c1 == 2.0);

    SolverConfig cfg;
    cfg.mu = 0.3;
    cfg.steps = 24;
    cfg.method = SolveMethod::newton;
    cfg.relaxation = 0.5;
    const SolverConfig cback = solver_config_from_json(solver_config_to_json(cfg));
    CHECK(cback.mu == 0.3);
    CHECK(cback.steps == 24);
    CHECK(cback.method == SolveMethod::newton);
    CHECK(cback.relaxation == 0.5);

    json bad = solver_config_to_json(cfg);
    bad["method"] = "chebyshev";
    CHECK_THROWS_AS(solver_config_from_json(bad), std::invalid_argument);
    bad = solver_config_to_json(cfg);
    bad["steps"] = 0;
    CHECK_THROWS_AS(solver_config_from_json(bad), std::invalid_argument);
}

TEST_CASE("problem bundles from descriptors") {
    const json doc = {{"res", {8, 8, 8}},
                      {"degree", 1},
                      {"solver", {{"horizon", 0.1}, {"steps", 4}}},
                      {"u0", {{"type", "random_solenoidal"}, {"kmax", 1}, {"amplitude", 0.2}}},
                      {"f", {{"type", "zero"}}}};
    const ProblemBundle b = problem_from_json(doc, 5);
    CHECK(b.grid.res(0) == 8);
    CHECK(b.f.steps() == 4);
    CHECK(b.f.sup_l2_norm() == 0.0);
    CHECK(codifferential(b.u0).l2_norm() < 1e-11);
    // same seed, same bundle
    const ProblemBundle b2 = problem_from_json(doc, 5);
    CHECK((b2.u0 - b.u0).l2_norm() == 0.0);

    // field files referenced relative to a base directory
    const fs::path dir = tmp_dir();
    auto r = rng(227);
    const FormField stored = random_solenoidal(Grid(3, 8), r, 1);
    write_field_binary(stored, (dir / "u0.tnsf").string());
    json doc2 = doc;
    doc2["u0"] = {{"type", "file"}, {"path", "u0.tnsf"}};
    const ProblemBundle b3 = problem_from_json(doc2, 5, dir.string());
    CHECK((b3.u0 - stored).l2_norm() == 0.0);

    json doc3 = doc;
    doc3["u0"] = {{"type", "taylor_green"}};
    doc3["degree"] = 0;
    CHECK_THROWS_AS(problem_from_json(doc3, 5), std::invalid_argument);
}

TEST_CASE("CSV emission is deterministic and fixed-format") {
    const std::vector<std::string> header{"a", "b"};
    const std::vector<std::vector<double>> rows{{1.0, -0.5}, {3.25e-7, 2e10}};
    const std::string csv = make_csv(header, rows);
    CHECK(csv == make_csv(header, rows));
    CHECK(csv.substr(0, 4) == "a,b\n");
    CHECK(csv.find("1.000000000000e+00") != std::string::npos);
    CHECK(csv.find("3.250000000000e-07") != std::string::npos);
    CHECK(format_double(0.0) == "0.000000000000e+00");
}

TEST_CASE("cli: configuration errors exit with code 2") {
    const fs::path dir = tmp_dir();
    const fs::path bad = dir / "bad.json";
    write_text(bad.string(), "{ not json");
    CHECK(run_cli("validate-hodge --config " + bad.string() + " --out " +
                  (dir / "cli_bad").string()) == 2);

    const fs::path badres = dir / "badres.json";
    write_text(badres.string(), "{\"res\": [7, 7, 7]}");
    CHECK(run_cli("validate-hodge --config " + badres.string() + " --out " +
                  (dir / "cli_bad2").string()) == 2);
}

TEST_CASE("cli: small identity suites pass") {
    const fs::path dir = tmp_dir();
    const fs::path cfg = dir / "small_hodge.json";
    write_text(cfg.string(), "{\"res\": [8, 8, 8], \"fields\": 2}");
    const fs::path out = dir / "cli_hodge";
    CHECK(run_cli("validate-hodge --config " + cfg.string() + " --out " + out.string()) == 0);
    CHECK(fs::exists(out / "hodge_identities.csv"));
    CHECK(fs::exists(out / "validate-hodge_report.json"));

    CHECK(run_cli("validate-complex --config " + cfg.string() + " --out " +
                  (dir / "cli_complex").string()) == 0);
}

TEST_CASE("cli: repeated seeded solves are byte-identical") {
    const fs::path dir = tmp_dir();
    const fs::path cfg = dir / "small_solve.json";
    const json doc = {{"res", {8, 8, 8}},
                      {"degree", 1},
                      {"solver", {{"mu", 1.0}, {"horizon", 0.05}, {"steps", 16}}},
                      {"u0", {{"type", "random_solenoidal"}, {"amplitude", 0.1}, {"kmax", 1}}},
                      {"f", {{"type", "random_solenoidal"}, {"amplitude", 0.1}, {"kmax", 1}}}};
    write_text(cfg.string(), doc.dump());
    const fs::path out1 = dir / "cli_solve1";
    const fs::path out2 = dir / "cli_solve2";
    REQUIRE(run_cli("solve --seed 9 --config " + cfg.string() + " --out " + out1.string()) == 0);
    REQUIRE(run_cli("solve --seed 9 --config " + cfg.string() + " --out " + out2.string()) == 0);
    CHECK(slurp(out1 / "residuals.csv") == slurp(out2 / "residuals.csv"));
    CHECK(slurp(out1 / "energy.csv") == slurp(out2 / "energy.csv"));
    CHECK(slurp(out1 / "velocity_final.tnsf") == slurp(out2 / "velocity_final.tnsf"));

    // a different seed changes the data
    const fs::path out3 = dir / "cli_solve3";
    REQUIRE(run_cli("solve --seed 10 --config " + cfg.string() + " --out " + out3.string()) == 0);
    CHECK(slurp(out1 / "residuals.csv") != slurp(out3 / "residuals.csv"));
}
