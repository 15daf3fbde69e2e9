#include "doctest.h"

#include <cmath>

#include "sdcalc/closest_point.hpp"
#include "sdcalc/jet.hpp"
#include "sdcalc/rng.hpp"

using namespace sdcalc;

TEST_CASE("to_cartesian basics") {
    SurfaceGeometry sph = make_sphere(1.0);
    // sigma = 0 reproduces the chart point
    Vec3d p0 = chart_jet(sph, 1.0, 2.0, 0.0, 0).get(0, 0);
    CHECK(norm(to_cartesian(sph, 1.0, 2.0, 0.0) - p0) == 0.0);
    // unit sphere: normal offset 1 from (0,0,1) lands at (0,0,2)
    Vec3d north = to_cartesian(sph, M_PI / 2, M_PI / 2, 1.0);
    CHECK(norm(north - Vec3d{0, 0, 2}) < 1e-12);
}

TEST_CASE("signed distance on the sphere and the plane") {
    SurfaceGeometry sph = make_sphere(1.0);
    ClosestPointProjector proj(sph);
    SdfCoordinates c = proj.project({0, 0, 2});
    CHECK(c.sigma == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(norm(c.foot - Vec3d{0, 0, 1}) < 1e-9);
    CHECK(norm(c.nhat - Vec3d{0, 0, 1}) < 1e-9);

    SurfaceGeometry pl = make_plane();
    ClosestPointProjector pproj(pl);
    SdfCoordinates d = pproj.project({3, 4, -0.5});
    CHECK(d.sigma == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(d.s1 == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(d.s2 == doctest::Approx(4.0).epsilon(1e-10));

    // center of the sphere: every grid candidate ties
    CHECK_THROWS_AS(proj.project({0, 0, 0}), MultiplicityError);
}

TEST_CASE("ellipsoid projection matches brute-force minimization") {
    SurfaceGeometry ell = make_ellipsoid(1.0, std::sqrt(2.0), 2.0);
    ClosestPointProjector proj(ell);
    Vec3d x{2.0, 0.0, 0.0};
    SdfCoordinates c = proj.project(x);

    // Brute force oracle: dense sampling over both parameters followed by
    // alternating golden-section refinement.
    double best = 1e300;
    double bs1 = 0, bs2 = 0;
    int N = 400;
    for (int i = 0; i <= N; ++i)
        for (int j = 0; j <= N; ++j) {
            double a = 0.35 + (M_PI - 0.7) * i / N;
            double b = 2 * M_PI * j / N;
            Vec3d p = chart_jet(ell, a, b, 0.0, 0).get(0, 0);
            double d2 = norm2(x - p);
            if (d2 < best) {
                best = d2;
                bs1 = a;
                bs2 = b;
            }
        }
    // golden-section refinement along each axis in turn
    auto dist = [&](double a, double b) {
        return norm(x - chart_jet(ell, a, b, 0.0, 0).get(0, 0));
    };
    double ha = (M_PI - 0.7) / N, hb = 2 * M_PI / N;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int round = 0; round < 60; ++round) {
        // axis a
        double lo = bs1 - ha, hi = bs1 + ha;
        for (int it = 0; it < 40; ++it) {
            double m1 = hi - gr * (hi - lo), m2 = lo + gr * (hi - lo);
            if (dist(m1, bs2) < dist(m2, bs2)) hi = m2;
            else lo = m1;
        }
        bs1 = 0.5 * (lo + hi);
        lo = bs2 - hb;
        hi = bs2 + hb;
        for (int it = 0; it < 40; ++it) {
            double m1 = hi - gr * (hi - lo), m2 = lo + gr * (hi - lo);
            if (dist(bs1, m1) < dist(bs1, m2)) hi = m2;
            else lo = m1;
        }
        bs2 = 0.5 * (lo + hi);
        ha *= 0.3;
        hb *= 0.3;
    }
    double sigma_bf = dist(bs1, bs2);
    CHECK(c.sigma == doctest::Approx(sigma_bf).epsilon(1e-8));
    CHECK(c.sigma > 0.0);
}

TEST_CASE("round trip and eikonal property on the test fleet") {
    SurfaceGeometry geoms[] = {make_sphere(1.0), make_cylinder(1.0), make_torus(2.0, 0.5),
                               make_ellipsoid(1.0, std::sqrt(2.0), 2.0)};
    Rng rng(41);
    for (const auto& g : geoms) {
        ClosestPointProjector proj(g);
        const CollarBounds& cb = proj.bounds();
        for (int i = 0; i < 60; ++i) {
            double m1 = 0.06 * g.range1().length();
            double s1 = rng.uniform(g.range1().lo + (g.range1().periodic ? 0.0 : m1),
                                    g.range1().hi - (g.range1().periodic ? 0.0 : m1));
            double s2 = rng.uniform(g.range2().lo, g.range2().hi);
            double cap_out = std::min(cb.outward, 0.8);
            double cap_in = std::min(cb.inward, 0.8);
            double sigma = rng.uniform(-0.8 * cap_in, 0.8 * cap_out);
            Vec3d x = to_cartesian(g, s1, s2, sigma);
            SdfCoordinates c = proj.project(x);
            CAPTURE(g.name());
            CHECK(std::abs(c.sigma - sigma) < 1e-8);
            CHECK(norm(to_cartesian(g, c.s1, c.s2, c.sigma) - x) < 1e-8);
            CHECK(norm(x - c.foot - c.nhat * c.sigma) < 1e-10);
            CHECK(!c.outside_collar);

            // eikonal: |grad sigma| = 1 via central differences of the
            // signed distance, reusing the projected seed
            Vec3d grad;
            double h = 1e-5 * std::max(1.0, norm(x));
            for (int axis = 0; axis < 3; ++axis) {
                Vec3d dx{0, 0, 0};
                dx[axis] = h;
                double sp = proj.project_from(x + dx, c.s1, c.s2).sigma;
                double sm = proj.project_from(x - dx, c.s1, c.s2).sigma;
                grad[axis] = (sp - sm) / (2 * h);
            }
            CHECK(std::abs(norm(grad) - 1.0) < 1e-7);
            CHECK(norm(grad - c.nhat) < 1e-7);

            // nhat is constant along the normal ray
            SdfCoordinates c2 = proj.project_from(x + c.nhat * (0.05 * cap_out), c.s1, c.s2);
            CHECK(norm(c2.nhat - c.nhat) < 1e-8);
        }
    }
}

TEST_CASE("collar bounds") {
    CollarBounds pb = collar_bounds(make_plane());
    CHECK(std::isinf(pb.outward));
    CHECK(std::isinf(pb.inward));

    double R = 1.4;
    CollarBounds sb = collar_bounds(make_sphere(R));
    CHECK(std::isinf(sb.outward));
    CHECK(sb.inward == doctest::Approx(0.9 * R).epsilon(1e-9));

    CollarBounds tb = collar_bounds(make_torus(2.0, 0.5));
    CHECK(tb.inward == doctest::Approx(0.45).epsilon(1e-6));
    CHECK(tb.outward == doctest::Approx(0.9 * 1.5).epsilon(1e-6));
}

TEST_CASE("grad_sigma convenience wrapper") {
    SurfaceGeometry sph = make_sphere(1.0);
    CHECK(norm(grad_sigma(sph, {0, 0, 2}) - Vec3d{0, 0, 1}) < 1e-9);
    SurfaceGeometry pl = make_plane();
    CHECK(norm(grad_sigma(pl, {1.0, -2.0, 0.3}) - Vec3d{0, 0, 1}) < 1e-10);
}
