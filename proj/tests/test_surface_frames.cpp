#include "doctest.h"

#include <cmath>

#include "sdcalc/chart.hpp"
#include "sdcalc/rng.hpp"
#include "sdcalc/surface_frames.hpp"

using namespace sdcalc;

namespace {

const double kSqrt2 = std::sqrt(2.0);

void check_frame_orthonormal(const DarbouxFrame& F) {
    CHECK(std::abs(norm(F.nhat) - 1.0) < 1e-10);
    CHECK(std::abs(norm(F.that1) - 1.0) < 1e-10);
    CHECK(std::abs(norm(F.that2) - 1.0) < 1e-10);
    CHECK(std::abs(dot(F.nhat, F.that1)) < 1e-10);
    CHECK(std::abs(dot(F.nhat, F.that2)) < 1e-10);
    CHECK(std::abs(dot(F.that1, F.that2)) < 1e-10);
    CHECK(norm(cross(F.that1, F.that2) - F.nhat) < 1e-10);
}

}  // namespace

TEST_CASE("plane frame and curvature") {
    SurfaceGeometry pl = make_plane();
    DarbouxFrame F = tangent_basis(pl, 0.4, -1.2);
    CHECK(norm(F.nhat - Vec3d{0, 0, 1}) < 1e-14);
    CHECK(F.g11 == doctest::Approx(1.0));
    CHECK(F.g22 == doctest::Approx(1.0));
    CHECK(F.g12 == doctest::Approx(0.0));
    CurvatureData c = shape_operator(pl, 0.4, -1.2);
    CHECK(c.kappa1 == doctest::Approx(0.0));
    CHECK(c.kappa2 == doctest::Approx(0.0));
    CHECK(max_abs(c.K) < 1e-14);
    CHECK(c.umbilic);
}

TEST_CASE("sphere: radial normal, umbilic curvature -1/R") {
    double R = 1.7;
    SurfaceGeometry sph = make_sphere(R);
    Rng rng(3);
    for (int i = 0; i < 24; ++i) {
        double s1 = rng.uniform(0.4, M_PI - 0.4), s2 = rng.uniform(0.0, 2 * M_PI);
        DarbouxFrame F = tangent_basis(sph, s1, s2);
        check_frame_orthonormal(F);
        CHECK(norm(F.nhat - F.p / R) < 1e-10);
        CurvatureData c = shape_operator(sph, s1, s2);
        CHECK(c.umbilic);
        CHECK(c.kappa1 == doctest::Approx(-1.0 / R).epsilon(1e-9));
        CHECK(c.kappa2 == doctest::Approx(-1.0 / R).epsilon(1e-9));
        CHECK(std::isnan(c.omega1));
    }
}

TEST_CASE("cylinder: curvatures {0, -1/R}, zero rotation coefficients") {
    double R = 0.8;
    SurfaceGeometry cyl = make_cylinder(R);
    Rng rng(5);
    for (int i = 0; i < 16; ++i) {
        double s1 = rng.uniform(0.0, 2 * M_PI), s2 = rng.uniform(-2.0, 2.0);
        CurvatureData c = shape_operator(cyl, s1, s2);
        CHECK(!c.umbilic);
        CHECK(c.kappa1 == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(c.kappa2 == doctest::Approx(-1.0 / R).epsilon(1e-9));
        CHECK(std::abs(c.omega1) < 1e-9);
        CHECK(std::abs(c.omega2) < 1e-9);
        auto r = codazzi_egregium_residuals(cyl, s1, s2);
        CHECK(std::abs(r[0]) < 1e-8);
        CHECK(std::abs(r[1]) < 1e-8);
        CHECK(std::abs(r[2]) < 1e-8);
    }
}

TEST_CASE("ellipsoid: normal parallel to the implicit gradient") {
    SurfaceGeometry ell = make_ellipsoid(1.0, kSqrt2, 2.0);
    Rng rng(11);
    for (int i = 0; i < 24; ++i) {
        double s1 = rng.uniform(0.5, M_PI - 0.5), s2 = rng.uniform(0.0, 2 * M_PI);
        DarbouxFrame F = tangent_basis(ell, s1, s2);
        check_frame_orthonormal(F);
        // x^2 + y^2/2 + z^2/4 = 1; gradient (2x, y, z/2)
        Vec3d g{2.0 * F.p.x, F.p.y, F.p.z / 2.0};
        CHECK(norm(cross(normalized(g), F.nhat)) < 1e-10);
    }
}

TEST_CASE("shape tensor properties on the test fleet") {
    SurfaceGeometry geoms[] = {make_sphere(1.0), make_cylinder(1.2), make_torus(2.0, 0.5),
                               make_ellipsoid(1.0, kSqrt2, 2.0)};
    Rng rng(17);
    for (const auto& g : geoms) {
        for (int i = 0; i < 24; ++i) {
            double s1 = rng.uniform(g.range1().lo + 0.05 * g.range1().length(),
                                    g.range1().hi - 0.05 * g.range1().length());
            double s2 = rng.uniform(g.range2().lo, g.range2().hi);
            SurfaceFrame<double> F = surface_frame<double>(g, s1, s2, 0.0);
            CurvatureData c = shape_operator(g, s1, s2);
            CAPTURE(g.name());

            // K symmetric, K nhat = 0, eigen-directions orthogonal
            CHECK(c.K_symmetric);
            CHECK(norm(matvec(c.K, F.nhat)) < 1e-9);
            CHECK(std::abs(c.gauss - c.kappa1 * c.kappa2) == 0.0);
            if (!c.umbilic) CHECK(std::abs(dot(F.that1, F.that2)) < 1e-9);
            CHECK(norm(matvec(c.K, F.that1) - F.that1 * c.kappa1) < 1e-8);
            CHECK(norm(matvec(c.K, F.that2) - F.that2 * c.kappa2) < 1e-8);

            // grad_perp nhat + K = 0 with K reconstructed from (kappa_i, that_i)
            auto nfield = [&](auto a, auto b) {
                using TT = std::decay_t<decltype(a)>;
                SurfaceFrame<TT> G = surface_frame<TT>(g, a, b, TT(0.0));
                return G.nhat;
            };
            Mat3d gradn = surface_vector_gradient_T<double>(F, s1, s2, nfield);
            CHECK(max_abs(gradn + c.K) < 1e-8);
            // zero-eigenvector property (grad nhat) . nhat = 0
            CHECK(norm(matvec(gradn, F.nhat)) < 1e-9);
        }
    }
}

TEST_CASE("surface gradient: trivial cases") {
    SurfaceGeometry pl = make_plane();
    auto fconst = [](auto, auto) { using TT = double; return TT(3.5); };
    CHECK(norm(surface_gradient(pl, 0.2, 0.7, fconst)) < 1e-14);
    auto fs1 = [](auto a, auto) { return a; };
    CHECK(norm(surface_gradient(pl, 0.2, 0.7, fs1) - Vec3d{1, 0, 0}) < 1e-12);

    // sphere: f = z-coordinate pullback; gradient is the projected ambient
    // gradient Pi . zhat
    double R = 2.0;
    SurfaceGeometry sph = make_sphere(R);
    auto fz = [&](auto a, auto b) {
        using TT = std::decay_t<decltype(a)>;
        return sph.chart().deriv(0, 0, 0, a, b, TT(0.0)).z;
    };
    double s1 = 1.1, s2 = 0.8;
    SurfaceFrame<double> F = surface_frame<double>(sph, s1, s2, 0.0);
    Vec3d grad = surface_gradient(sph, s1, s2, fz);
    Vec3d expect = matvec(F.projector(), Vec3d{0, 0, 1});
    CHECK(norm(grad - expect) < 1e-10);
    CHECK(std::abs(dot(grad, F.nhat)) < 1e-10 * std::max(1.0, norm(grad)));
}

TEST_CASE("surface divergence: spec values and rotation-coefficient form") {
    // sphere R, u = Pi zhat has divergence -2z/R^2
    double R = 1.3;
    SurfaceGeometry sph = make_sphere(R);
    double s1 = 1.2, s2 = 2.1;
    auto u = [&](auto a, auto b) {
        using TT = std::decay_t<decltype(a)>;
        SurfaceFrame<TT> G = surface_frame<TT>(sph, a, b, TT(0.0));
        Vec3<TT> zhat{TT(0.0), TT(0.0), TT(1.0)};
        return zhat - G.nhat * dot(zhat, G.nhat);
    };
    SurfaceFrame<double> F = surface_frame<double>(sph, s1, s2, 0.0);
    double div = surface_divergence(sph, s1, s2, u);
    CHECK(div == doctest::Approx(-2.0 * F.p.z / (R * R)).epsilon(1e-9));

    // constant tangent field on the plane
    SurfaceGeometry pl = make_plane();
    auto uc = [](auto a, auto) {
        using TT = std::decay_t<decltype(a)>;
        return Vec3<TT>{TT(0.3), TT(-1.1), TT(0.0)};
    };
    CHECK(std::abs(surface_divergence(pl, 0.1, 0.2, uc)) < 1e-13);

    // non-umbilic chart: covariant divergence equals the rotation-coefficient
    // formula grad_1 u1 + grad_2 u2 + omega2 u1 - omega1 u2
    SurfaceGeometry tor = make_torus(2.0, 0.5);
    Rng rng(23);
    for (int i = 0; i < 10; ++i) {
        double a = rng.uniform(0.0, 2 * M_PI), b = rng.uniform(0.0, 2 * M_PI);
        SurfaceFrame<double> T0 = surface_frame<double>(tor, a, b, 0.0);
        FrameGauge gauge{primal(T0.that1)};
        auto ut = [&](auto p, auto q) {
            using TT = std::decay_t<decltype(p)>;
            SurfaceFrame<TT> G = surface_frame<TT>(tor, p, q, TT(0.0), &gauge);
            TT u1 = sin(p) * cos(q);
            TT u2 = cos(p + q);
            return G.that1 * u1 + G.that2 * u2;
        };
        double dv = surface_divergence(tor, a, b, ut);

        auto comp = [&](int which) {
            return [&, which](auto p, auto q) {
                using TT = std::decay_t<decltype(p)>;
                TT u1 = sin(p) * cos(q);
                TT u2 = cos(p + q);
                return which == 1 ? u1 : u2;
            };
        };
        auto om = rotation_coeffs_T<double>(tor, T0, a, b, 0.0, gauge);
        auto w1 = param_velocity(T0, T0.that1);
        auto w2 = param_velocity(T0, T0.that2);
        double g1u1 = dir_deriv_scalar(a, b, w1, comp(1));
        double g2u2 = dir_deriv_scalar(a, b, w2, comp(2));
        double u1v = std::sin(a) * std::cos(b), u2v = std::cos(a + b);
        double expect = g1u1 + g2u2 + om[1] * u1v - om[0] * u2v;
        CHECK(dv == doctest::Approx(expect).epsilon(1e-8));
    }
}

TEST_CASE("rotation coefficients on the ellipsoid satisfy Codazzi") {
    SurfaceGeometry ell = make_ellipsoid(1.0, kSqrt2, 2.0);
    Rng rng(31);
    int checked = 0;
    for (int i = 0; i < 40 && checked < 12; ++i) {
        double s1 = rng.uniform(0.6, M_PI - 0.6), s2 = rng.uniform(0.0, 2 * M_PI);
        CurvatureData c = shape_operator(ell, s1, s2);
        if (c.umbilic || std::abs(c.kappa1 - c.kappa2) < 1e-3) continue;
        ++checked;
        auto r = codazzi_egregium_residuals(ell, s1, s2);
        CAPTURE(s1);
        CAPTURE(s2);
        CHECK(std::abs(r[0]) < 1e-7);
        CHECK(std::abs(r[1]) < 1e-7);
        CHECK(std::abs(r[2]) < 1e-7);
        // omega1 = grad_2 kappa1 / (kappa1 - kappa2), the Codazzi relation
        FrameGauge gauge;
        SurfaceFrame<double> F = surface_frame<double>(ell, s1, s2, 0.0);
        gauge.ref = primal(F.that1);
        auto w2 = param_velocity(F, F.that2);
        double d2k1 = dir_deriv_scalar(s1, s2, w2, [&](auto p, auto q) {
            using TT = std::decay_t<decltype(p)>;
            return surface_frame<TT>(ell, p, q, TT(0.0), &gauge).kappa1;
        });
        CHECK(c.omega1 == doctest::Approx(d2k1 / (c.kappa1 - c.kappa2)).epsilon(1e-6));
    }
    CHECK(checked >= 12);
}

TEST_CASE("torus adjointness of surface gradient and divergence") {
    // integral over the (periodic) torus of u . grad f + f div u vanishes
    SurfaceGeometry tor = make_torus(2.0, 0.5);
    auto f = [](auto a, auto b) { return sin(a) * cos(2.0 * b); };
    auto u = [&](auto a, auto b) {
        using TT = std::decay_t<decltype(a)>;
        SurfaceFrame<TT> G = surface_frame<TT>(tor, a, b, TT(0.0));
        return G.e1 * (cos(a) * cos(b)) + G.e2 * sin(a + b);
    };
    int n = 48;
    double h = 2 * M_PI / n, acc = 0.0, scale = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double a = i * h, b = j * h;
            SurfaceFrame<double> F = surface_frame<double>(tor, a, b, 0.0);
            double dA = norm(cross(F.t1, F.t2)) * h * h;
            double term = dot(primal(u(a, b)), surface_gradient(tor, a, b, f)) +
                          primal(f(a, b)) * surface_divergence(tor, a, b, u);
            acc += term * dA;
            scale += std::abs(term) * dA;
        }
    CHECK(std::abs(acc) < 1e-6 * std::max(1.0, scale));
}
