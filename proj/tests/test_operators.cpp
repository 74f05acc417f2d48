#include "heatframe/operators.hpp"
#include "heatframe/rng.hpp"
#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace heatframe;

namespace {

GridFunction real_field(const GridDomain& dom, const std::function<double(double, double)>& fn) {
    Vec v(dom.total_points());
    const double h = dom.spacing();
    for (int i = 0; i < v.size(); ++i) {
        auto c = dom.coords(i);
        v[i] = fn(c[0] * h, c[1] * h);
    }
    return GridFunction(dom, std::move(v));
}

} // namespace

TEST_CASE("laplacian stencil, N=4") {
    GridDomain dom(1, 4);
    OperatorModel op = build_laplacian(dom);
    const double inv_h2 = 16.0;
    for (int i = 0; i < 4; ++i) {
        CHECK(op.matrix(i, i) == Catch::Approx(2.0 * inv_h2));
        CHECK(op.matrix(i, (i + 1) % 4) == Catch::Approx(-inv_h2));
        CHECK(op.matrix(i, (i + 3) % 4) == Catch::Approx(-inv_h2));
        CHECK(op.matrix.row(i).sum() == Catch::Approx(0.0).margin(1e-12));
    }
    CHECK(op.is_symmetric());
}

TEST_CASE("schrodinger with zero potential equals the laplacian") {
    GridDomain dom(1, 16);
    OperatorModel lap = build_laplacian(dom);
    OperatorModel sch = build_schrodinger(dom, GridFunction::zero(dom));
    CHECK((lap.matrix - sch.matrix).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("divergence form with unit coefficient equals the laplacian") {
    GridDomain dom(2, 8);
    OperatorModel lap = build_laplacian(dom);
    OperatorModel div = build_divergence_form(dom, GridFunction::constant(dom, 1.0));
    CHECK((lap.matrix - div.matrix).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("operator construction errors") {
    GridDomain dom(1, 16);
    GridFunction neg = GridFunction::constant(dom, -1.0);
    CHECK_THROWS_AS(build_schrodinger(dom, neg), std::invalid_argument);
    CHECK_THROWS_AS(build_divergence_form(dom, GridFunction::zero(dom)), std::invalid_argument);
    GridFunction other = GridFunction::zero(GridDomain(1, 32));
    CHECK_THROWS_AS(build_schrodinger(dom, other), std::invalid_argument);
}

TEST_CASE("spectral decomposition against circulant closed form, N=8") {
    GridDomain dom(1, 8);
    OperatorModel op = build_laplacian(dom);
    const SpectralData& sd = spectral_decompose(op);

    std::vector<double> expected;
    const double inv_h2 = 64.0;
    for (int k = 0; k < 8; ++k)
        expected.push_back(4.0 * inv_h2 * std::pow(std::sin(M_PI * k / 8.0), 2));
    std::sort(expected.begin(), expected.end());
    for (int i = 0; i < 8; ++i)
        CHECK(sd.eigenvalues[i] == Catch::Approx(expected[i]).margin(1e-8));

    CHECK(sd.eigenvalues[0] == 0.0); // snapped exactly
    RealVec v0 = sd.eigenvectors.col(0);
    CHECK((v0.array() - v0[0]).abs().maxCoeff() <= 1e-10); // constant eigenvector

    CHECK(sd.reconstruction_error(op.matrix) <= 1e-9 * op.matrix.cwiseAbs().maxCoeff());
    CHECK(sd.orthogonality_error() <= 1e-10);
}

TEST_CASE("constant potential shifts the spectrum") {
    GridDomain dom(1, 8);
    OperatorModel lap = build_laplacian(dom);
    OperatorModel sch = build_schrodinger(dom, GridFunction::constant(dom, 7.5));
    const SpectralData& a = spectral_decompose(lap);
    const SpectralData& b = spectral_decompose(sch);
    for (int i = 0; i < 8; ++i)
        CHECK(b.eigenvalues[i] == Catch::Approx(a.eigenvalues[i] + 7.5).margin(1e-8));
}

TEST_CASE("non-symmetric matrices are rejected by the spectral path") {
    GridDomain dom(1, 8);
    RealMat m = RealMat::Zero(8, 8);
    m(0, 1) = 1.0;
    OperatorModel op = operator_from_matrix(dom, m);
    CHECK_THROWS_AS(spectral_decompose(op), std::invalid_argument);
}

TEST_CASE("heat semigroup basics") {
    GridDomain dom(1, 16);
    OperatorModel op = build_laplacian(dom);
    Rng rng(11);
    GridFunction f = band_limited_function(op, rng, 1.0);

    GridFunction same = heat_semigroup_apply(op, 0.0, f);
    CHECK((same.values - f.values).norm() == 0.0);

    GridFunction ones = GridFunction::constant(dom, 1.0);
    for (double t : {1e-3, 1e-1, 2.0})
        CHECK((heat_semigroup_apply(op, t, ones).values.array() - 1.0).abs().maxCoeff() <= 1e-10);

    CHECK_THROWS_AS(heat_semigroup_apply(op, -1.0, f), std::invalid_argument);
}

TEST_CASE("heat semigroup agrees with a scaling-and-squaring oracle") {
    GridDomain dom(1, 16);
    OperatorModel op = build_laplacian(dom);
    Rng rng(3);
    GridFunction f = band_limited_function(op, rng, 1.0);
    const double t = 0.05;
    RealMat e = oracle::expm_pade(RealMat(-t * op.matrix));
    Vec expect = e.cast<Complex>() * f.values;
    Vec got = heat_semigroup_apply(op, t, f).values;
    CHECK((expect - got).norm() / expect.norm() <= 1e-10);
}

TEST_CASE("semigroup law, self-adjointness, positivity, monotone decay") {
    GridDomain dom(1, 32);
    OperatorModel op = build_schrodinger(
        dom, real_field(dom, [](double x, double) { return 20.0 * (1.0 + std::sin(2 * M_PI * x)); }));
    Rng rng(5);
    for (int trial = 0; trial < 3; ++trial) {
        GridFunction f = band_limited_function(op, rng, 1.0);
        GridFunction g = band_limited_function(op, rng, 1.0);
        Vec a = heat_semigroup_apply(op, 0.05, heat_semigroup_apply(op, 0.02, f)).values;
        Vec b = heat_semigroup_apply(op, 0.07, f).values;
        CHECK((a - b).norm() <= 1e-9 * f.values.norm());

        Complex lhs = heat_semigroup_apply(op, 0.03, f).values.conjugate().dot(g.values);
        Complex rhs = f.values.conjugate().dot(heat_semigroup_apply(op, 0.03, g).values);
        CHECK(std::abs(lhs - rhs) <= 1e-10 * std::abs(lhs));

        double prev = f.values.norm();
        for (double t : {1e-3, 1e-2, 1e-1, 1.0}) {
            double cur = heat_semigroup_apply(op, t, f).values.norm();
            CHECK(cur <= prev * (1.0 + 1e-12));
            prev = cur;
        }
    }
    Vec bump = Vec::Zero(dom.total_points());
    bump[5] = 3.0;
    for (double t : {1e-3, 1e-2, 1e-1})
        CHECK(heat_semigroup_apply(op, t, GridFunction(dom, bump)).values.real().minCoeff() >=
              -1e-12);
}

TEST_CASE("heat kernel matrix: symmetry, conservation, quadrature consistency") {
    GridDomain dom(1, 64);
    OperatorModel op = build_laplacian(dom);
    KernelMatrix k = heat_kernel_matrix(op, 1e-2);
    CHECK((k.values - k.values.transpose()).cwiseAbs().maxCoeff() <= 1e-12 *
              k.values.cwiseAbs().maxCoeff());
    for (int i = 0; i < 64; ++i)
        CHECK((k.values.row(i).sum() * k.measure_weight).real() == Catch::Approx(1.0).margin(1e-10));

    Rng rng(9);
    GridFunction f = band_limited_function(op, rng, 1.0);
    Vec via_kernel = k.apply(f).values;
    Vec direct = heat_semigroup_apply(op, 1e-2, f).values;
    CHECK((via_kernel - direct).norm() <= 1e-10 * direct.norm());

    CHECK_THROWS_AS(heat_kernel_matrix(op, 0.0), std::invalid_argument);
}

TEST_CASE("heat kernel matches the wrapped Gaussian") {
    GridDomain dom(1, 256);
    OperatorModel op = build_laplacian(dom);

    // pointwise near the diagonal at moderate t; limited by the second-order
    // stencil's dispersion error of order h^2/t
    {
        const double t = 1e-2;
        KernelMatrix k = heat_kernel_matrix(op, t);
        double worst = 0.0;
        for (int i = 0; i < dom.n; ++i) {
            double d = dom.distance(i, 0);
            if (d > 0.2) continue;
            double pw = oracle::wrapped_gaussian_1d(d, t, 1.0);
            worst = std::max(worst, std::abs(std::abs(k.values(i, 0)) - pw) / pw);
        }
        CHECK(worst <= 5e-4); // measured 1.6e-4
    }
    // at t = 1e-3 the tail relative error grows, but the profile holds at the
    // peak scale
    {
        const double t = 1e-3;
        KernelMatrix k = heat_kernel_matrix(op, t);
        double peak = oracle::wrapped_gaussian_1d(0.0, t, 1.0);
        double worst = 0.0;
        for (int i = 0; i < dom.n; ++i) {
            double d = dom.distance(i, 0);
            if (d > 0.2) continue;
            double pw = oracle::wrapped_gaussian_1d(d, t, 1.0);
            worst = std::max(worst, std::abs(std::abs(k.values(i, 0)) - pw) / peak);
        }
        CHECK(worst <= 2e-3); // measured 9.6e-4
    }
}

TEST_CASE("gradient kernel symmetries and small-t scaling") {
    GridDomain dom(1, 128);
    OperatorModel op = build_laplacian(dom);
    for (double t : {1e-3, 1e-2}) {
        auto grads = gradient_heat_kernel(op, t);
        REQUIRE(grads.size() == 1);
        const Mat& g = grads[0].values;
        for (int y = 0; y < dom.n; y += 17) {
            CHECK(std::abs(g(y, y)) <= 1e-8);
            int mirror = dom.wrap(2 * y - (y + 5));
            CHECK(std::abs(g(y + 5 < dom.n ? y + 5 : y + 5 - dom.n, y) + g(mirror, y)) <= 1e-8);
        }
    }
    // sup |G| t^{(n+1)/2} stable within factor 3 inside the small-t regime
    std::vector<double> vals;
    for (double t : {1e-3, 2e-3, 4e-3, 8e-3, 1.5e-2}) {
        auto grads = gradient_heat_kernel(op, t);
        vals.push_back(grads[0].values.cwiseAbs().maxCoeff() * std::pow(t, 1.0));
    }
    double lo = *std::min_element(vals.begin(), vals.end());
    double hi = *std::max_element(vals.begin(), vals.end());
    CHECK(hi / lo <= 3.0);
}

TEST_CASE("gaussian bound fit") {
    GridDomain dom(1, 128);
    OperatorModel lap = build_laplacian(dom);
    BoundReport rep = verify_gaussian_bound(lap, {1e-3, 1e-2});
    CHECK(rep.overall_c <= 2.0 / std::sqrt(4.0 * M_PI));
    CHECK(rep.overall_c > 0.1);

    OperatorModel sch = build_schrodinger(
        dom, real_field(dom, [](double x, double) { return 50.0 * (1.0 + std::cos(2 * M_PI * x)); }));
    BoundReport rep2 = verify_gaussian_bound(sch, {1e-3, 1e-2});
    CHECK(rep2.overall_c <= 1.05 * rep.overall_c);

    CHECK_THROWS_AS(verify_gaussian_bound(lap, {10.0}), std::invalid_argument);
    CHECK_THROWS_AS(verify_gaussian_bound(lap, {}), std::invalid_argument);
}
