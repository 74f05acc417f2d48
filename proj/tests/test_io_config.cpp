#include "heatframe/config.hpp"
#include "heatframe/io.hpp"
#include "heatframe/report.hpp"
#include "heatframe/rng.hpp"
#include "heatframe/suites.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace heatframe;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("heatframe-test-" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("grid function files round trip bit-exactly") {
    TempDir tmp;
    GridDomain dom(2, 12);
    Rng rng(3);
    Vec v(dom.total_points());
    for (int i = 0; i < v.size(); ++i) v[i] = Complex(rng.normal(), rng.normal());
    GridFunction f(dom, v);
    write_grid_function(tmp.file("f.hfgf"), f);
    GridFunction g = read_grid_function(tmp.file("f.hfgf"));
    REQUIRE(g.domain == dom);
    CHECK((g.values - f.values).cwiseAbs().maxCoeff() == 0.0);

    std::ofstream bad(tmp.file("bad.hfgf"), std::ios::binary);
    bad << "NOPE";
    bad.close();
    CHECK_THROWS_AS(read_grid_function(tmp.file("bad.hfgf")), std::runtime_error);
}

TEST_CASE("coefficient CSV round trip and key checking") {
    TempDir tmp;
    GridDomain dom(1, 64);
    OperatorModel op = build_laplacian(dom);
    FrameContext ctx = build_frame_context(op, builtin_zeta_exp(1), auto_params(1.25, 2, dom));
    Rng rng(5);
    GridFunction f = band_limited_function(op, rng, 0.3);
    FrameCoefficients coeffs = raw_coefficients(ctx, f);

    write_coefficients_csv(tmp.file("c.csv"), coeffs);
    FrameCoefficients back = read_coefficients_csv(tmp.file("c.csv"), ctx.net);
    for (size_t s = 0; s < coeffs.entries.size(); ++s)
        CHECK((coeffs.entries[s] - back.entries[s]).cwiseAbs().maxCoeff() == 0.0);

    // dropping a row leaves the net uncovered
    std::string text = slurp(tmp.file("c.csv"));
    text = text.substr(0, text.rfind("\n", text.size() - 2) + 1);
    std::ofstream trunc(tmp.file("missing.csv"), std::ios::binary);
    trunc << text;
    trunc.close();
    CHECK_THROWS_AS(read_coefficients_csv(tmp.file("missing.csv"), ctx.net), std::runtime_error);
}

TEST_CASE("spectral cache round trip") {
    TempDir tmp;
    GridDomain dom(1, 32);
    OperatorModel op = build_laplacian(dom);
    const SpectralData& sd = spectral_decompose(op);
    std::string path = spectral_cache_path(tmp.file("cache"), op);
    save_spectral_cache(path, op);

    OperatorModel fresh = build_laplacian(dom);
    REQUIRE(load_spectral_cache(path, fresh));
    CHECK((fresh.spectral->eigenvalues - sd.eigenvalues).cwiseAbs().maxCoeff() == 0.0);
    CHECK((fresh.spectral->eigenvectors - sd.eigenvectors).cwiseAbs().maxCoeff() == 0.0);

    // a different operator refuses the file
    Vec pot = Vec::Constant(dom.total_points(), 3.0);
    OperatorModel sch = build_schrodinger(dom, GridFunction(dom, pot));
    CHECK_FALSE(load_spectral_cache(path, sch));

    // config-driven warm/cold flags
    RunConfig cfg;
    cfg.cache_dir = tmp.file("cache2");
    OperatorModel a = build_laplacian(dom);
    CHECK_FALSE(spectral_with_cache(cfg, a)); // cold
    OperatorModel b = build_laplacian(dom);
    CHECK(spectral_with_cache(cfg, b)); // warm
    CHECK((a.spectral->eigenvalues - b.spectral->eigenvalues).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("config parsing: minimal, defaults, full validation") {
    RunConfig cfg = parse_config_text("domain.dim = 1\ndomain.n = 64\nsymbol.k = 1\n");
    CHECK(cfg.n == 64);
    CHECK(cfg.delta == 1.05);
    CHECK(cfg.auto_range);
    CHECK(cfg.seed == 42);
    CHECK(cfg.hash != 0);

    // comments and explicit ranges
    RunConfig cfg2 = parse_config_text(
        "# comment\ndomain.n = 32\nframe.j_min = -2\nframe.j_max = 10\nframe.delta = 1.2\n");
    CHECK_FALSE(cfg2.auto_range);
    CHECK(cfg2.j_min == -2);
    CHECK(cfg2.j_max == 10);

    SECTION("delta range error names the constraint") {
        try {
            parse_config_text("frame.delta = 2.5\n");
            FAIL("expected throw");
        } catch (const std::invalid_argument& e) {
            CHECK(std::string(e.what()).find("(1, 2]") != std::string::npos);
        }
    }
    SECTION("unknown operator kind lists the valid ones") {
        try {
            parse_config_text("operator.kind = biharmonic\n");
            FAIL("expected throw");
        } catch (const std::invalid_argument& e) {
            std::string msg = e.what();
            CHECK(msg.find("laplacian") != std::string::npos);
            CHECK(msg.find("schrodinger") != std::string::npos);
            CHECK(msg.find("divergence_form") != std::string::npos);
        }
    }
    SECTION("all errors are reported, not just the first") {
        try {
            parse_config_text("frame.delta = 9\ndomain.dim = 7\nbogus.key = 1\n");
            FAIL("expected throw");
        } catch (const std::invalid_argument& e) {
            std::string msg = e.what();
            CHECK(msg.find("frame.delta") != std::string::npos);
            CHECK(msg.find("domain.dim") != std::string::npos);
            CHECK(msg.find("bogus.key") != std::string::npos);
        }
    }
    SECTION("missing referenced files are validation errors") {
        CHECK_THROWS_AS(parse_config_text("operator.kind = schrodinger\n"
                                          "operator.potential_file = /no/such/file\n"),
                        std::invalid_argument);
    }
}

TEST_CASE("report json and csv emission") {
    TempDir tmp;
    Report rep;
    rep.meta["config_hash"] = 123u;
    Section sec{"numbers"};
    sec.pass = true;
    sec.add({{"name", "pi"}, {"value", M_PI}, {"ok", true}});
    sec.add({{"name", "third"}, {"value", 1.0 / 3.0}, {"ok", false}});
    rep.sections.push_back(sec);
    Section empty{"empty"};
    empty.pass = true;
    rep.sections.push_back(empty);

    rep.write(tmp.file("report.json"));
    std::ifstream in(tmp.file("report.json"));
    Report back = Report::from_json(Json::parse(in));
    REQUIRE(back.sections.size() == 2);
    CHECK(back.sections[0].records.size() == 2);
    CHECK(back.meta["config_hash"] == 123u);

    emit_csv(rep, "numbers", tmp.file("numbers.csv"));
    std::string text = slurp(tmp.file("numbers.csv"));
    CHECK(text.find("name,ok,value") == 0); // sorted deterministic columns
    CHECK(text.find('\r') == std::string::npos);

    // 17 significant digits reparse losslessly
    auto pos = text.find("pi,");
    REQUIRE(pos != std::string::npos);
    double reparsed = std::strtod(text.c_str() + pos + 8, nullptr);
    // locate the value column robustly instead: parse all rows
    {
        std::istringstream rows(text);
        std::string line;
        std::getline(rows, line); // header
        bool saw_pi = false, saw_third = false;
        while (std::getline(rows, line)) {
            auto c1 = line.find(',');
            auto c2 = line.find(',', c1 + 1);
            std::string name = line.substr(0, c1);
            double value = std::strtod(line.c_str() + c2 + 1, nullptr);
            if (name == "pi") {
                CHECK(value == M_PI);
                saw_pi = true;
            }
            if (name == "third") {
                CHECK(value == 1.0 / 3.0);
                saw_third = true;
            }
        }
        CHECK(saw_pi);
        CHECK(saw_third);
    }
    (void)reparsed;

    emit_csv(rep, "empty", tmp.file("empty.csv"));
    CHECK(slurp(tmp.file("empty.csv")) == "\n"); // header-only (no columns)
    CHECK_THROWS_AS(emit_csv(rep, "nope", tmp.file("x.csv")), std::invalid_argument);
}

TEST_CASE("deterministic outputs for identical config and seed") {
    TempDir tmp;
    RunConfig cfg = parse_config_text("domain.n = 48\ndomain.dim = 1\n");
    Report a, b;
    a.sections.push_back(suites::check_calderon());
    b.sections.push_back(suites::check_calderon());
    a.sections.push_back(suites::check_semigroup(cfg));
    b.sections.push_back(suites::check_semigroup(cfg));
    for (const auto* pair : {&a, &b}) (void)pair;
    emit_csv(a, "semigroup", tmp.file("a.csv"));
    emit_csv(b, "semigroup", tmp.file("b.csv"));
    CHECK(slurp(tmp.file("a.csv")) == slurp(tmp.file("b.csv")));
}

TEST_CASE("fnv hash is stable") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
    CHECK(fnv1a64("a") != fnv1a64("b"));
}
