#include "doctest.h"

#include <cmath>

#include "sdcalc/scalars.hpp"
#include "sdcalc/vec.hpp"

using namespace sdcalc;

TEST_CASE("nested duals give higher derivatives") {
    // f(x) = exp(x) sin(2x); f'' = exp(x)(4cos(2x) - 3 sin(2x))
    auto f = [](auto x) {
        using std::exp; using std::sin;
        return exp(x) * sin(2.0 * x);
    };
    double x0 = 0.4;
    D2 x{D1{x0, 1.0}, D1{1.0, 0.0}};
    D2 y = f(x);
    double fxx = y.dot.dot;
    double expect = std::exp(x0) * (4.0 * std::cos(2 * x0) - 3.0 * std::sin(2 * x0));
    CHECK(fxx == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("series arithmetic: geometric series from division") {
    Series one(1.0);
    Series d = 1.0 - Series::eps() * 0.5;
    Series inv = one / d;  // sum (eps/2)^k
    for (int k = 0; k <= 6; ++k) CHECK(inv.coeff(k) == doctest::Approx(std::pow(0.5, k)));
}

TEST_CASE("series: singular orders and evaluation") {
    Series sigma = Series::eps() * 0.7;  // eps * xi with xi = 0.7
    Series c = 1.0 / sigma;
    CHECK(c.min_order() == -1);
    CHECK(c.coeff(-1) == doctest::Approx(1.0 / 0.7));
    CHECK((c * sigma).coeff(0) == doctest::Approx(1.0));
    CHECK(c.eval(1e-3) == doctest::Approx(1.0 / 0.7e-3));
}

TEST_CASE("series analytic functions match Taylor expansions") {
    Series x = Series(0.5) + Series::monomial(2.0, 1) + Series::monomial(-1.0, 2);
    Series e = exp(x);
    // d/deps exp(x(eps)) at 0 = exp(0.5)*2 ; second: exp(0.5)*(2^2/2 - 1) ... do numerically
    auto num = [&](double ee) { return std::exp(0.5 + 2.0 * ee - ee * ee); };
    double h = 1e-4;
    CHECK(e.coeff(0) == doctest::Approx(num(0.0)).epsilon(1e-12));
    CHECK(e.coeff(1) == doctest::Approx((num(h) - num(-h)) / (2 * h)).epsilon(1e-7));
    CHECK(e.coeff(2) == doctest::Approx((num(h) - 2 * num(0) + num(-h)) / (h * h) / 2.0).epsilon(1e-6));

    Series sq = sqrt(x);
    CHECK((sq * sq).coeff(1) == doctest::Approx(2.0).epsilon(1e-12));
    Series lg = log(x);
    CHECK(exp(lg).coeff(2) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("dual over series composes") {
    // d/dsigma of 1/(1 - sigma) at sigma = eps*xi equals the series 1/(1-s)^2.
    Series sigma = Series::eps() * 0.3;
    SD1 s{sigma, Series(1.0)};
    SD1 v = 1.0 / (1.0 - s);
    for (int k = 0; k <= 4; ++k) {
        // 1/(1-s)^2 = sum (k+1) s^k with s = 0.3 eps
        CHECK(v.dot.coeff(k) == doctest::Approx((k + 1) * std::pow(0.3, k)).epsilon(1e-12));
    }
}

TEST_CASE("vector and matrix algebra over generic scalars") {
    Vec3d a{1, 2, 3}, b{-2, 0.5, 1};
    CHECK(dot(cross(a, b), a) == doctest::Approx(0.0));
    CHECK(dot(cross(a, b), b) == doctest::Approx(0.0));
    Mat3d M = outer(a, b);
    CHECK(trace(M) == doctest::Approx(dot(a, b)));
    Vec3d c = matvec(M, b);
    CHECK(c.x == doctest::Approx(a.x * dot(b, b)));

    auto [u, v] = solve2(2.0, 1.0, 1.0, 3.0, 5.0, 10.0);
    CHECK(2 * u + v == doctest::Approx(5.0));
    CHECK(u + 3 * v == doctest::Approx(10.0));
}
