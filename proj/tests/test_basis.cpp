#include <doctest.h>

#include <cmath>

#include "kanpnp/basis.hpp"
#include "kanpnp/rng.hpp"
#include "oracles.hpp"

using namespace kanpnp;

TEST_CASE("bspline partition of unity, including the boundary") {
    for (int G : {3, 5, 8}) {
        for (int k : {1, 2, 3}) {
            BasisSpec b{BasisKind::BSpline, G, k, -1.0, 1.0};
            Rng rng(42);
            for (int trial = 0; trial < 200; ++trial) {
                const double x = trial == 0 ? -1.0 : (trial == 1 ? 1.0 : rng.uniform(-1.0, 1.0));
                const auto vals = basis_eval(b, x);
                double sum = 0.0;
                for (double v : vals) {
                    CHECK(v >= -1e-15);
                    sum += v;
                }
                CHECK(std::abs(sum - 1.0) < 1e-9);
            }
        }
    }
}

TEST_CASE("two linear hat functions split the midpoint evenly") {
    BasisSpec b{BasisKind::BSpline, 1, 1, 0.0, 1.0};
    const auto vals = basis_eval(b, 0.5);
    REQUIRE(vals.size() == 2);
    CHECK(vals[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(vals[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("bspline values match the recursive Cox-de Boor oracle") {
    Rng rng(7);
    for (int G : {3, 5, 8}) {
        for (int k : {1, 2, 3}) {
            BasisSpec b{BasisKind::BSpline, G, k, -1.0, 1.0};
            for (int trial = 0; trial < 50; ++trial) {
                const double x = rng.uniform(-1.2, 1.2);  // clamping included
                const auto got = basis_eval(b, x);
                const auto want = oracle::basis_values(b, x);
                for (int m = 0; m < b.basis_count(); ++m)
                    CHECK(got[m] == doctest::Approx(want[m]).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("fourier basis at the domain midpoint") {
    BasisSpec b{BasisKind::Fourier, 1, 1, -1.0, 1.0};
    const auto vals = basis_eval(b, 0.0);
    REQUIRE(vals.size() == 3);
    CHECK(vals[0] == 1.0);
    CHECK(vals[1] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(vals[2] == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("invalid basis specs are rejected") {
    CHECK_THROWS_AS(basis_eval(BasisSpec{BasisKind::BSpline, 0, 3, -1.0, 1.0}, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(basis_eval(BasisSpec{BasisKind::Fourier, 5, 0, -1.0, 1.0}, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(basis_eval(BasisSpec{BasisKind::BSpline, 5, 3, 1.0, -1.0}, 0.0),
                    std::invalid_argument);
}

TEST_CASE("bspline derivative entries sum to zero in the interior") {
    Rng rng(3);
    for (int k : {1, 2, 3}) {
        BasisSpec b{BasisKind::BSpline, 5, k, -1.0, 1.0};
        for (int trial = 0; trial < 50; ++trial) {
            const auto d = basis_deriv(b, rng.uniform(-0.99, 0.99));
            double sum = 0.0;
            for (double v : d) sum += v;
            CHECK(std::abs(sum) < 1e-10);
        }
    }
}

TEST_CASE("basis derivative matches central finite differences") {
    const double h = 1e-5;
    for (BasisKind kind : {BasisKind::BSpline, BasisKind::Fourier}) {
        BasisSpec b{kind, 5, 3, -1.0, 1.0};
        for (double x : {0.3, -0.77, 0.123}) {
            const auto d = basis_deriv(b, x);
            const auto up = basis_eval(b, x + h);
            const auto dn = basis_eval(b, x - h);
            for (int m = 0; m < b.basis_count(); ++m)
                CHECK(d[m] == doctest::Approx((up[m] - dn[m]) / (2 * h)).epsilon(1e-6).scale(1.0));
        }
    }
}

TEST_CASE("fourier derivative at the midpoint") {
    BasisSpec b{BasisKind::Fourier, 1, 1, -1.0, 1.0};
    const double w1 = 2.0 * M_PI / 2.0;
    const auto d = basis_deriv(b, 0.0);
    REQUIRE(d.size() == 3);
    CHECK(d[0] == 0.0);
    CHECK(d[1] == doctest::Approx(-std::sin(M_PI) * w1).scale(1.0).epsilon(1e-12));
    CHECK(d[2] == doctest::Approx(std::cos(M_PI) * w1).epsilon(1e-12));
}
