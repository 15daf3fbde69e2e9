#include "doctest.h"

#include <cmath>

#include "sdcalc/rng.hpp"
#include "sdcalc/jet.hpp"
#include "sdcalc/surface_evolution.hpp"

using namespace sdcalc;

namespace {

// inflating sphere R(tau) = R0 (1 + rate tau), poles on +-x
SurfaceGeometry inflating_sphere(double R0 = 1.0, double rate = 0.3) {
    char b[3][96];
    std::snprintf(b[0], sizeof b[0], "(%.17g)*(1+(%.17g)*tau)*cos(s1)", R0, rate);
    std::snprintf(b[1], sizeof b[1], "(%.17g)*(1+(%.17g)*tau)*sin(s1)*cos(s2)", R0, rate);
    std::snprintf(b[2], sizeof b[2], "(%.17g)*(1+(%.17g)*tau)*sin(s1)*sin(s2)", R0, rate);
    return make_surface_from_exprs({b[0], b[1], b[2]}, {0.35, M_PI - 0.35, false},
                                   {0.0, 2.0 * M_PI, true}, "inflating_sphere");
}

// rigid translation of a torus with constant ambient velocity
SurfaceGeometry translating_torus(Vec3d v) {
    char b[3][128];
    std::snprintf(b[0], sizeof b[0], "(2+0.5*cos(s2))*cos(s1) + (%.17g)*tau", v.x);
    std::snprintf(b[1], sizeof b[1], "(2+0.5*cos(s2))*sin(s1) + (%.17g)*tau", v.y);
    std::snprintf(b[2], sizeof b[2], "0.5*sin(s2) + (%.17g)*tau", v.z);
    return make_surface_from_exprs({b[0], b[1], b[2]}, {0.0, 2 * M_PI, true},
                                   {0.0, 2 * M_PI, true}, "translating_torus");
}

// torus whose tube radius breathes in time
SurfaceGeometry deforming_torus() {
    return make_surface_from_exprs({"(2+(0.5+0.1*tau)*cos(s2))*cos(s1)",
                                    "(2+(0.5+0.1*tau)*cos(s2))*sin(s1)",
                                    "(0.5+0.1*tau)*sin(s2)"},
                                   {0.0, 2 * M_PI, true}, {0.0, 2 * M_PI, true},
                                   "deforming_torus");
}

// ellipsoid with a time-dependent first semiaxis
SurfaceGeometry deforming_ellipsoid() {
    return make_surface_from_exprs(
        {"(1+0.2*tau)*sin(s1)*cos(s2)", "1.4142135623730951*sin(s1)*sin(s2)", "2*cos(s1)"},
        {0.35, M_PI - 0.35, false}, {0.0, 2 * M_PI, true}, "deforming_ellipsoid");
}

}  // namespace

TEST_CASE("dtau of tangents and normal: rigid translation and inflation") {
    ChartMotion motion;

    SurfaceGeometry tr = translating_torus({0.3, -0.2, 0.5});
    auto dt_tr = dtau_tangents(tr, motion, 1.1, 2.2, 0.25);
    CHECK(norm(dt_tr[0]) < 1e-10);
    CHECK(norm(dt_tr[1]) < 1e-10);
    CHECK(norm(dtau_normal(tr, motion, 1.1, 2.2, 0.25)) < 1e-10);

    // inflating sphere: d tau t_i = (R'/R) t_i, d tau nhat = 0
    double R0 = 1.0, rate = 0.3, tau = 0.4;
    SurfaceGeometry sph = inflating_sphere(R0, rate);
    double s1 = 1.2, s2 = 0.7;
    auto dts = dtau_tangents(sph, motion, s1, s2, tau);
    double factor = R0 * rate / (R0 * (1 + rate * tau));
    Jet j = chart_jet(sph, s1, s2, tau, 1);
    CHECK(norm(dts[0] - j.get(1, 0) * factor) < 1e-9);
    CHECK(norm(dts[1] - j.get(0, 1) * factor) < 1e-9);
    CHECK(norm(dtau_normal(sph, motion, s1, s2, tau)) < 1e-10);
}

TEST_CASE("dtau of tangents matches tau finite differences on a deforming ellipsoid") {
    ChartMotion motion;
    SurfaceGeometry ell = deforming_ellipsoid();
    double tau = 0.3, dt = 1e-5;
    Rng rng(5);
    for (int i = 0; i < 10; ++i) {
        double s1 = rng.uniform(0.6, M_PI - 0.6), s2 = rng.uniform(0.0, 2 * M_PI);
        auto dts = dtau_tangents(ell, motion, s1, s2, tau);
        Vec3d dtn = dtau_normal(ell, motion, s1, s2, tau);
        Jet jp = chart_jet(ell, s1, s2, tau + dt, 1);
        Jet jm = chart_jet(ell, s1, s2, tau - dt, 1);
        Vec3d fd1 = (jp.get(1, 0) - jm.get(1, 0)) / (2 * dt);
        Vec3d fd2 = (jp.get(0, 1) - jm.get(0, 1)) / (2 * dt);
        CHECK(norm(dts[0] - fd1) < 1e-6);
        CHECK(norm(dts[1] - fd2) < 1e-6);

        // and the normal via frames at shifted times
        SurfaceFrame<double> Fp = surface_frame<double>(ell, s1, s2, tau + dt);
        SurfaceFrame<double> Fm = surface_frame<double>(ell, s1, s2, tau - dt);
        CHECK(norm(dtn - (Fp.nhat - Fm.nhat) / (2 * dt)) < 1e-6);

        // mixed partials: d tau (ds_i p) = ds_i (d tau p)
        Vec3d mixed1 = chart_jet(ell, s1, s2, tau, 1).has_tau
                           ? ell.chart().deriv(1, 0, 1, s1, s2, tau)
                           : Vec3d{};
        CHECK(norm(dts[0] - mixed1) < 1e-8);

        // orthogonality is preserved: d tau (nhat . nhat) = 0, d tau (nhat . t_i) = 0
        SurfaceFrame<double> F = surface_frame<double>(ell, s1, s2, tau);
        CHECK(std::abs(dot(dtn, F.nhat)) < 1e-8);
        CHECK(std::abs(dot(dtn, F.t1) + dot(F.nhat, dts[0])) < 1e-8);
        CHECK(std::abs(dot(dtn, F.t2) + dot(F.nhat, dts[1])) < 1e-8);
    }
}

TEST_CASE("dt of coordinates: inflating sphere, translation, re-projection FD") {
    ChartMotion motion;

    // inflating sphere: dt sigma = -R'
    double R0 = 1.0, rate = 0.3, tau = 0.2;
    SurfaceGeometry sph = inflating_sphere(R0, rate);
    CoordinateRates cr = dt_coordinates(sph, motion, {1.0, 1.4, 0.2, tau});
    CHECK(cr.dt_sigma == doctest::Approx(-R0 * rate).epsilon(1e-10));

    // rigid translation: dt sigma = -e . nhat
    Vec3d vel{0.3, -0.2, 0.5};
    SurfaceGeometry tr = translating_torus(vel);
    SurfacePoint tp{0.9, 2.4, 0.15, 0.1};
    SurfaceFrame<double> F = surface_frame<double>(tr, tp.s1, tp.s2, tp.tau);
    CoordinateRates cr2 = dt_coordinates(tr, motion, tp);
    CHECK(cr2.dt_sigma == doctest::Approx(-dot(vel, F.nhat)).epsilon(1e-10));

    // deforming torus: re-project a fixed ambient point at tau +- dt
    SurfaceGeometry dtor = deforming_torus();
    double t0 = 0.3, dt = 1e-5;
    SurfacePoint dp{1.2, 0.8, 0.1, t0};
    Vec3d x = to_cartesian(dtor, dp.s1, dp.s2, dp.sigma, t0);
    ClosestPointProjector pp(dtor, t0 + dt), pm(dtor, t0 - dt);
    double fd_sigma = (pp.project(x).sigma - pm.project(x).sigma) / (2 * dt);
    CoordinateRates cr3 = dt_coordinates(dtor, motion, dp);
    CHECK(std::abs(cr3.dt_sigma - fd_sigma) < 1e-5);

    // and the tangential rates against re-projected foot motion
    SdfCoordinates cp = pp.project(x), cm = pm.project(x);
    SurfaceFrame<double> Fd = surface_frame<double>(dtor, dp.s1, dp.s2, t0);
    Vec3d fd_svec = Fd.t1 * ((cp.s1 - cm.s1) / (2 * dt)) + Fd.t2 * ((cp.s2 - cm.s2) / (2 * dt));
    CHECK(norm(cr3.dt_s_vec - fd_svec) < 1e-5);
}

TEST_CASE("dt_scalar: radial distance, static surfaces, steady pullbacks") {
    ChartMotion motion;

    // f = sigma on the inflating sphere: dt f = -R' everywhere
    double R0 = 1.0, rate = 0.3;
    SurfaceGeometry sph = inflating_sphere(R0, rate);
    auto fsig = std::make_shared<SurfaceExprScalarField>(parse_expr("sigma"));
    CHECK(dt_scalar(sph, *fsig, motion, {1.1, 0.5, 0.2, 0.3}) ==
          doctest::Approx(-R0 * rate).epsilon(1e-10));

    // static surface: dt f = d tau f
    SurfaceGeometry tor = make_torus(2.0, 0.5);
    auto ftau = std::make_shared<SurfaceExprScalarField>(parse_expr("sigma*tau + sin(tau)"));
    SurfacePoint pt{1.0, 2.0, 0.12, 0.7};
    CHECK(dt_scalar(tor, *ftau, motion, pt) ==
          doctest::Approx(pt.sigma + std::cos(pt.tau)).epsilon(1e-12));

    // ambient-steady pullback on a moving torus: dt f = 0
    SurfaceGeometry dtor = deforming_torus();
    auto steady =
        std::make_shared<AmbientExprSurfaceScalarField>(parse_expr("x*y + sin(z) + x*x"));
    Rng rng(9);
    for (int i = 0; i < 10; ++i) {
        SurfacePoint p{rng.uniform(0.0, 2 * M_PI), rng.uniform(0.0, 2 * M_PI),
                       rng.uniform(-0.2, 0.2), 0.3};
        CHECK(std::abs(dt_scalar(dtor, *steady, motion, p)) < 1e-5);
    }

    // chain-rule closure: ambient coordinates are steady
    for (const char* coord : {"x", "y", "z"}) {
        auto fc = std::make_shared<AmbientExprSurfaceScalarField>(parse_expr(coord));
        SurfacePoint p{1.3, 0.9, 0.1, 0.3};
        CHECK(std::abs(dt_scalar(dtor, *fc, motion, p)) < 1e-7);
    }
}

TEST_CASE("dt_vector: steady fields and FD cross-check") {
    ChartMotion motion;

    // ambient-constant u on a static surface
    SurfaceGeometry tor = make_torus(2.0, 0.5);
    auto uc = std::make_shared<AmbientExprSurfaceVectorField>(
        std::array<ExprPtr, 3>{parse_expr("0.4"), parse_expr("-0.1"), parse_expr("0.9")});
    CHECK(norm(dt_vector(tor, *uc, motion, {1.0, 0.5, 0.1, 0.0})) < 1e-10);

    // ambient-constant u on a translating surface
    SurfaceGeometry tr = translating_torus({0.3, -0.2, 0.5});
    CHECK(norm(dt_vector(tr, *uc, motion, {1.0, 0.5, 0.1, 0.2})) < 1e-6);

    // inflating sphere, u = nhat: ambient-steady along rays
    SurfaceGeometry sph = inflating_sphere();
    auto un = std::make_shared<SurfaceExprVectorField>(
        std::array<ExprPtr, 3>{parse_expr("1"), parse_expr("0"), parse_expr("0")});
    CHECK(norm(dt_vector(sph, *un, motion, {1.2, 0.8, 0.15, 0.3})) < 1e-8);

    // ambient-steady smooth vector field on genuinely deforming surfaces: the
    // complete formula (including the u_sigma d tau nhat frame correction)
    // must return zero
    auto usteady = std::make_shared<AmbientExprSurfaceVectorField>(std::array<ExprPtr, 3>{
        parse_expr("x*y + z"), parse_expr("sin(x) - y*z"), parse_expr("x + cos(y)")});
    SurfaceGeometry dell = deforming_ellipsoid();
    Rng rng(17);
    for (int i = 0; i < 8; ++i) {
        SurfacePoint p{rng.uniform(0.7, M_PI - 0.7), rng.uniform(0.0, 2 * M_PI),
                       rng.uniform(-0.15, 0.15), 0.25};
        CAPTURE(p.s1);
        CAPTURE(p.s2);
        CHECK(norm(dt_vector(dell, *usteady, motion, p)) < 1e-6);
    }
}
