#include "heatframe/hardy.hpp"
#include "heatframe/rng.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace heatframe;

TEST_CASE("tent atom construction") {
    GridDomain dom(1, 128);
    TentAtom atom = make_tent_atom({0.5, 0.0}, 0.125, dom);

    // |B| = 1/4, spatial support 1/8, c0 = (1/4 * 1/8 * ln 2)^{-1/2}
    CHECK(atom.ball_measure == Catch::Approx(0.25));
    CHECK(atom.support_measure == Catch::Approx(0.125));
    CHECK(atom.c0 == Catch::Approx(1.0 / std::sqrt(0.25 * 0.125 * std::log(2.0))).epsilon(1e-12));
    CHECK(atom.c0 == Catch::Approx(6.7945).epsilon(1e-4));

    CHECK(atom.tent_reach() <= atom.radius + 1e-12);

    double normalization = atom.normalization_integral() * atom.ball_measure;
    CHECK(normalization >= 0.99);
    CHECK(normalization <= 1.0 + 1e-12);

    CHECK_THROWS_AS(make_tent_atom({0.5, 0.0}, 0.01, dom), std::invalid_argument);  // < 8h
    CHECK_THROWS_AS(make_tent_atom({0.5, 0.0}, 0.3, dom), std::invalid_argument);   // > side/4
}

TEST_CASE("molecule synthesis") {
    GridDomain dom(1, 128);
    OperatorModel lap = build_laplacian(dom);
    TentAtom atom = make_tent_atom({0.5, 0.0}, 0.125, dom);
    Molecule mol = synthesize_molecule(lap, atom);
    const double h = dom.spacing();

    // zero atom gives the zero molecule
    TentAtom silent = atom;
    silent.c0 = 0.0;
    CHECK(synthesize_molecule(lap, silent).values.values.cwiseAbs().maxCoeff() == 0.0);

    // conservation + self-adjointness kill the mean
    double mean = std::abs(mol.values.values.sum()) * h;
    CHECK(mean <= 1e-9 * lp_norm(mol.values, 1.0));

    // ||m||_2 |B|^{1/2} stable across radii
    std::vector<double> vals;
    for (double rb : {1.0 / 16.0, 1.0 / 8.0, 1.0 / 4.0}) {
        TentAtom a = make_tent_atom({0.5, 0.0}, rb, dom);
        Molecule m = synthesize_molecule(lap, a);
        vals.push_back(lp_norm(m.values, 2.0) * std::sqrt(a.ball_measure));
    }
    CHECK(*std::max_element(vals.begin(), vals.end()) /
              *std::min_element(vals.begin(), vals.end()) <=
          3.0);

    // mean-zero is NOT asserted for a positive potential (e^{-tL}1 != 1)
    Vec pot(dom.total_points());
    for (int i = 0; i < pot.size(); ++i) pot[i] = 30.0 * (1.0 + std::sin(2.0 * M_PI * i * h));
    OperatorModel sch = build_schrodinger(dom, GridFunction(dom, pot));
    Molecule mol_v = synthesize_molecule(sch, atom);
    CHECK(std::isfinite(lp_norm(mol_v.values, 1.0)));
}

TEST_CASE("g1 scan over delta is uniform per molecule") {
    GridDomain dom(1, 128);
    OperatorModel lap = build_laplacian(dom);
    AnalyticSymbol zeta = builtin_zeta_exp(1);
    TentAtom atom = make_tent_atom({0.5, 0.0}, 0.125, dom);
    Molecule mol = synthesize_molecule(lap, atom);

    G1ScanReport rep = molecule_g1_scan(lap, zeta, mol.values, {1.05, 1.2, 1.5, 2.0}, 2);
    REQUIRE(rep.entries.size() == 4);
    for (const auto& e : rep.entries) {
        CHECK(std::isfinite(e.g1_l1));
        CHECK(e.g1_l1 > 0.0);
    }
    CHECK(rep.max_over_min <= 5.0);

    // homogeneity: 3x the molecule scales every norm by 3
    GridFunction tripled(dom, 3.0 * mol.values.values);
    G1ScanReport rep3 = molecule_g1_scan(lap, zeta, tripled, {1.2, 1.5}, 2);
    G1ScanReport rep1 = molecule_g1_scan(lap, zeta, mol.values, {1.2, 1.5}, 2);
    for (size_t i = 0; i < rep3.entries.size(); ++i)
        CHECK(rep3.entries[i].g1_l1 ==
              Catch::Approx(3.0 * rep1.entries[i].g1_l1).epsilon(1e-12));

    // zero molecule: all norms vanish
    G1ScanReport rep0 =
        molecule_g1_scan(lap, zeta, GridFunction::zero(dom), {1.2, 1.5}, 2);
    for (const auto& e : rep0.entries) CHECK(e.g1_l1 == 0.0);
}

TEST_CASE("good-lambda containment") {
    GridDomain dom(1, 64);
    OperatorModel lap = build_laplacian(dom);
    ConeParams cone = ConeParams::make(dom, 24);

    GoodLambdaResult trivial = good_lambda_check(lap, GridFunction::zero(dom), 1.0, 0.5, cone);
    CHECK(trivial.holds);

    TentAtom atom = make_tent_atom({0.5, 0.0}, 0.125, dom);
    Molecule mol = synthesize_molecule(lap, atom);
    GridFunction nh = nontangential_maximal(lap, mol.values, cone);
    double peak = nh.values.cwiseAbs().maxCoeff();

    // s above the maximum empties the left set
    GoodLambdaResult above = good_lambda_check(lap, mol.values, 2.0 * peak, 0.5, cone);
    CHECK(above.holds);

    for (double frac : {0.3, 0.6}) {
        for (double r : {0.25, 0.5, 1.0}) {
            GoodLambdaResult res = good_lambda_check(lap, mol.values, frac * peak, r, cone);
            INFO("s=" << frac * peak << " r=" << r);
            CHECK(res.holds);
        }
    }
    CHECK_THROWS_AS(good_lambda_check(lap, mol.values, -1.0, 0.5, cone), std::invalid_argument);
    CHECK_THROWS_AS(good_lambda_check(lap, mol.values, 1.0, 1.5, cone), std::invalid_argument);
}

TEST_CASE("maximal equivalence report") {
    GridDomain dom(1, 64);
    OperatorModel lap = build_laplacian(dom);
    ConeParams cone = ConeParams::make(dom, 24);

    std::vector<GridFunction> suite;
    suite.push_back(GridFunction::constant(dom, 1.0));
    TentAtom atom = make_tent_atom({0.3, 0.0}, 0.125, dom);
    suite.push_back(synthesize_molecule(lap, atom).values);
    Rng rng(103);
    suite.push_back(band_limited_function(lap, rng, 0.25));

    MaximalEquivalenceReport rep = maximal_equivalence_report(lap, suite, cone);
    REQUIRE(rep.records.size() == 3);
    // constant function: conservation makes both norms the domain volume
    CHECK(rep.records[0].radial_l1 == Catch::Approx(1.0).margin(1e-9));
    CHECK(rep.records[0].nt_l1 == Catch::Approx(1.0).margin(1e-9));
    for (const auto& r : rep.records) {
        CHECK(r.radial_l1 <= r.nt_l1 * (1.0 + 1e-12));
        CHECK(std::isfinite(r.grad_l1));
    }
    CHECK(rep.max_nt_over_radial >= 1.0);
}

TEST_CASE("gradient maximal is controlled by the g1 proxy across the suite") {
    GridDomain dom(1, 64);
    OperatorModel lap = build_laplacian(dom);
    AnalyticSymbol zeta = builtin_zeta_exp(1);
    FrameContext ctx = build_frame_context(lap, zeta, auto_params(1.2, 2, dom));
    ConeParams cone2 = ConeParams::make(dom, 24, 2.0);

    std::vector<double> fits;
    for (double rb : {1.0 / 16.0, 1.0 / 8.0, 1.0 / 4.0}) {
        TentAtom atom = make_tent_atom({0.5, 0.0}, rb, dom);
        Molecule mol = synthesize_molecule(lap, atom);
        double grad = lp_norm(gradient_nt_maximal(lap, mol.values, cone2), 1.0);
        double proxy = lp_norm(g_function(1, ctx, mol.values), 1.0);
        REQUIRE(proxy > 0.0);
        fits.push_back(grad / proxy);
    }
    double lo = *std::min_element(fits.begin(), fits.end());
    double hi = *std::max_element(fits.begin(), fits.end());
    CHECK(hi / lo <= 3.0);
}

TEST_CASE("peetre-type sampled bound against the maximal function") {
    // sum_tau |Q| |q_j f(y_Q)| d^{-(j^k)} / (d^{-(j^k)} + |x - y_Q|)^{n+1}
    //   <= C d^{Mn(1/r-1)} d^{[j-(j^k)]n(1/r-1)} { M(sum_tau |q_j f(y_Q)|^r chi_Q) }^{1/r}(x)
    GridDomain dom(1, 64);
    OperatorModel lap = build_laplacian(dom);
    FrameContext ctx = build_frame_context(lap, builtin_zeta_exp(1), auto_params(1.2, 2, dom));
    Rng rng(107);
    GridFunction f = band_limited_function(lap, rng, 0.25);
    const double r = 0.75;
    const double delta = ctx.params.delta;
    const double hdim = ctx.hdim();

    double fitted = 0.0;
    for (int j : {ctx.params.j_min + 3, ctx.params.j_min + 6}) {
        Vec qf = hdim * (ctx.kernel(j) * f.values);
        const ScaleNet& sn = ctx.net.scale(j);
        for (int k : {j - 2, j, j + 2}) {
            const double djk = std::pow(delta, -std::min(j, k));
            // chi-weighted |q_j f(y_Q)|^r as a grid function, then its HL maximal
            Vec chi_pow(dom.total_points());
            for (int x = 0; x < dom.total_points(); ++x) {
                int tau = cube_of_grid_index(ctx.net, j, x);
                chi_pow[x] = std::pow(std::abs(qf[sn.cubes[tau].center_index]), r);
            }
            GridFunction mx = hl_maximal(GridFunction(dom, chi_pow));
            const double prefactor = std::pow(delta, ctx.params.M * (1.0 / r - 1.0)) *
                                     std::pow(delta, (j - std::min(j, k)) * (1.0 / r - 1.0));
            for (int x = 0; x < dom.total_points(); ++x) {
                double lhs = 0.0;
                for (const auto& cube : sn.cubes) {
                    double d = dom.distance(x, cube.center_index);
                    lhs += cube.measure * std::abs(qf[cube.center_index]) * djk /
                           std::pow(djk + d, dom.dim + 1.0);
                }
                double rhs = prefactor * std::pow(std::abs(mx.values[x]), 1.0 / r);
                if (rhs > 0.0) fitted = std::max(fitted, lhs / rhs);
            }
        }
    }
    CHECK(std::isfinite(fitted));
    CHECK(fitted > 0.0);
    CHECK(fitted < 100.0); // bounded sampled constant
}
