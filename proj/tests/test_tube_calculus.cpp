#include "doctest.h"

#include <cmath>

#include "sdcalc/oracle.hpp"
#include "sdcalc/rng.hpp"
#include "sdcalc/tube_calculus.hpp"

using namespace sdcalc;

namespace {

std::shared_ptr<const TubeScalarField> ambient_scalar(const std::string& e) {
    return std::make_shared<AmbientExprTubeScalarField>(parse_expr(e));
}
std::shared_ptr<const TubeVectorField> ambient_vector(const std::string& ex, const std::string& ey,
                                                      const std::string& ez) {
    return std::make_shared<AmbientExprTubeVectorField>(
        std::array<ExprPtr, 3>{parse_expr(ex), parse_expr(ey), parse_expr(ez)});
}
std::shared_ptr<const TubeScalarField> coord_scalar(const std::string& e) {
    return std::make_shared<TubeExprScalarField>(parse_expr(e));
}

CurveGeometry evolving_paper_curve() {
    return make_curve_from_exprs({"cos(2*pi*s)", "sin(2*pi*s)", "tau*s^2"}, {0.0, 1.0, false},
                                 "evolving_paper_curve");
}

CurveGeometry translating_helix(Vec3d v) {
    char b[3][96];
    std::snprintf(b[0], sizeof b[0], "cos(s) + (%.17g)*tau", v.x);
    std::snprintf(b[1], sizeof b[1], "sin(s) + (%.17g)*tau", v.y);
    std::snprintf(b[2], sizeof b[2], "0.5*s + (%.17g)*tau", v.z);
    return make_curve_from_exprs({b[0], b[1], b[2]}, {-2 * M_PI, 2 * M_PI, false},
                                 "translating_helix");
}

CurveGeometry inflating_circle(double R0, double rate) {
    char b[2][96];
    std::snprintf(b[0], sizeof b[0], "(%.17g)*(1+(%.17g)*tau)*cos(s)", R0, rate);
    std::snprintf(b[1], sizeof b[1], "(%.17g)*(1+(%.17g)*tau)*sin(s)", R0, rate);
    return make_curve_from_exprs({b[0], b[1], "0"}, {0.0, 2 * M_PI, true}, "inflating_circle");
}

// gradient of a scalar field as a tube vector field (for identity stacking)
std::shared_ptr<const TubeVectorField> grad_field(std::shared_ptr<const TubeScalarField> f) {
    auto fn = [f](const TubeContext& ctx, const auto& s, const auto& th, const auto& sg,
                  const auto& tau) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (liftable_v<T, 2>) {
            Vec3<T> g = tubeops::tube_gradient_T<T>(ctx, *f, s, th, sg, tau);
            TubeFrameT<T> tf = tube_frame_T<T>(ctx, s, th, sg);
            return TubVec<T>{dot(g, tf.t_s), dot(g, tf.t_sigma), dot(g, tf.t_theta)};
        } else {
            throw Error("gradient field not liftable this deep");
            return TubVec<T>{};
        }
    };
    return std::make_shared<CallableTubeVectorField<decltype(fn)>>(fn);
}

std::shared_ptr<const TubeVectorField> curl_field(std::shared_ptr<const TubeVectorField> u) {
    auto fn = [u](const TubeContext& ctx, const auto& s, const auto& th, const auto& sg,
                  const auto& tau) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (liftable_v<T, 2>) {
            Vec3<T> g = tubeops::tube_curl_T<T>(ctx, *u, s, th, sg, tau);
            TubeFrameT<T> tf = tube_frame_T<T>(ctx, s, th, sg);
            return TubVec<T>{dot(g, tf.t_s), dot(g, tf.t_sigma), dot(g, tf.t_theta)};
        } else {
            throw Error("curl field not liftable this deep");
            return TubVec<T>{};
        }
    };
    return std::make_shared<CallableTubeVectorField<decltype(fn)>>(fn);
}

std::shared_ptr<const TubeScalarField> div_field(std::shared_ptr<const TubeVectorField> u) {
    auto fn = [u](const TubeContext& ctx, const auto& s, const auto& th, const auto& sg,
                  const auto& tau) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (liftable_v<T, 2>) {
            return tubeops::tube_divergence_T<T>(ctx, *u, s, th, sg, tau);
        } else {
            throw Error("divergence field not liftable this deep");
            return T{};
        }
    };
    return std::make_shared<CallableTubeScalarField<decltype(fn)>>(fn);
}

}  // namespace

TEST_CASE("tube gradient basics") {
    CurveGeometry line = make_line();
    TubeContext lctx = make_tube_context(&line, nullptr);
    TubePoint lp{0.4, 1.0, 0.3, 0.0};
    TubeFrameT<double> lf = tube_frame(lctx, lp.s, lp.theta, lp.sigma);

    auto fsig = coord_scalar("sigma");
    CHECK(norm(tube_gradient(lctx, *fsig, lp) - lf.t_sigma) < 1e-12);

    // pullback of ambient z on the z-axis line: gradient = zhat = t_s
    auto fz = ambient_scalar("z");
    Vec3d g = tube_gradient(lctx, *fz, lp);
    CHECK(dot(g, lf.t_s) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(norm(g - Vec3d{0, 0, 1}) < 1e-12);

    // helix tube: pullback of ambient x has gradient xhat
    CurveGeometry hel = make_helix(1.0, 0.5);
    BishopAngle ba(hel, 0.0, 0.0);
    TubeContext hctx = make_tube_context(&hel, &ba);
    auto fx = ambient_scalar("x");
    CHECK(norm(tube_gradient(hctx, *fx, {0.8, 2.0, 0.25, 0.0}) - Vec3d{1, 0, 0}) < 1e-7);

    CHECK_THROWS_AS(tube_gradient(lctx, *fsig, {0.4, 1.0, 0.0, 0.0}), OnAxisError);
}

TEST_CASE("tube vector gradient") {
    CurveGeometry line = make_line();
    TubeContext lctx = make_tube_context(&line, nullptr);
    TubePoint lp{-0.2, 0.7, 0.35, 0.0};

    // constant ambient field
    auto uc = ambient_vector("0.3", "-0.8", "0.5");
    CHECK(max_abs(tube_vector_gradient(lctx, *uc, lp)) < 1e-10);

    // radial unit field on the line: cylindrical polars give (1/sigma) tth (x) tth
    auto urad = std::make_shared<TubeExprVectorField>(
        std::array<ExprPtr, 3>{parse_expr("0"), parse_expr("1"), parse_expr("0")});
    TubeFrameT<double> lf = tube_frame(lctx, lp.s, lp.theta, lp.sigma);
    Mat3d expect = outer(lf.t_theta, lf.t_theta) / lp.sigma;
    CHECK(max_abs(tube_vector_gradient(lctx, *urad, lp) - expect) < 1e-12);

    // linear ambient field on the helix tube vs its exact gradient
    CurveGeometry hel = make_helix(1.0, 0.5);
    BishopAngle ba(hel, 0.0, 0.0);
    TubeContext hctx = make_tube_context(&hel, &ba);
    auto ulin = ambient_vector("2*x + 0.5*y", "x - z", "y - 3*z");
    TubePoint hp{1.1, 0.4, 0.2, 0.0};
    Mat3d g = tube_vector_gradient(hctx, *ulin, hp);
    // (grad u)[i][j] = d_i u_j
    Mat3d expect2;
    expect2[0] = {2, 1, 0};
    expect2[1] = {0.5, 0, 1};
    expect2[2] = {0, -1, -3};
    CHECK(max_abs(g - expect2) < 1e-6);
}

TEST_CASE("tube divergence") {
    CurveGeometry line = make_line();
    TubeContext lctx = make_tube_context(&line, nullptr);
    TubePoint lp{0.1, 2.1, 0.4, 0.0};

    auto upos = ambient_vector("x", "y", "z");
    CHECK(tube_divergence(lctx, *upos, lp) == doctest::Approx(3.0).epsilon(1e-10));

    auto urad = std::make_shared<TubeExprVectorField>(
        std::array<ExprPtr, 3>{parse_expr("0"), parse_expr("1"), parse_expr("0")});
    CHECK(tube_divergence(lctx, *urad, lp) == doctest::Approx(1.0 / lp.sigma).epsilon(1e-12));

    // random field on the helix tube vs the ambient oracle
    CurveGeometry hel = make_helix(1.0, 0.5);
    BishopAngle ba(hel, 0.0, 0.0);
    TubeContext hctx = make_tube_context(&hel, &ba);
    TubeProjector proj(hctx);
    Rng rng(7);
    auto u = make_random_tube_vector(rng);
    TubePullbackVector amb(proj, u);
    for (int i = 0; i < 12; ++i) {
        TubePoint p{rng.uniform(-4.0, 4.0), rng.uniform(0.0, 2 * M_PI), rng.uniform(0.1, 0.4),
                    0.0};
        Vec3d x = tube_to_cartesian(hctx, p.s, p.theta, p.sigma);
        double mine = tube_divergence(hctx, *u, p);
        double oracle = fd_div(amb, x);
        CHECK(std::abs(mine - oracle) < 1e-5 * std::max(1.0, std::abs(oracle)));
    }
}

TEST_CASE("tube scalar laplacian") {
    CurveGeometry line = make_line();
    TubeContext lctx = make_tube_context(&line, nullptr);
    TubePoint lp{0.3, 0.9, 0.5, 0.0};

    auto fq = ambient_scalar("x*x + y*y + z*z");
    CHECK(tube_scalar_laplacian(lctx, *fq, lp) == doctest::Approx(6.0).epsilon(1e-9));

    // log(sigma) is harmonic in the plane transverse to a straight line
    auto flog = coord_scalar("log(sigma)");
    CHECK(std::abs(tube_scalar_laplacian(lctx, *flog, lp)) < 1e-10);

    // random field on the paper curve tube vs the ambient oracle
    CurveGeometry pc = make_paper_curve();
    BishopAngle ba(pc, 0.0, 0.0);
    TubeContext pctx = make_tube_context(&pc, &ba);
    TubeProjector proj(pctx);
    Rng rng(11);
    auto f = make_random_tube_scalar(rng);
    TubePullbackScalar amb(proj, f);
    for (int i = 0; i < 12; ++i) {
        TubePoint p{rng.uniform(0.1, 0.9), rng.uniform(0.0, 2 * M_PI), rng.uniform(0.05, 0.12),
                    0.0};
        Vec3d x = tube_to_cartesian(pctx, p.s, p.theta, p.sigma);
        double mine = tube_scalar_laplacian(pctx, *f, p);
        double oracle = fd_scalar_lap(amb, x);
        CAPTURE(p.s);
        CHECK(std::abs(mine - oracle) < 1e-5 * std::max(1.0, std::abs(oracle)));
    }
}

TEST_CASE("tube curl") {
    CurveGeometry line = make_line();
    TubeContext lctx = make_tube_context(&line, nullptr);
    TubePoint lp{0.6, 1.8, 0.3, 0.0};

    // curl of a gradient vanishes
    auto f = ambient_scalar("x*y + z*z*x");
    CHECK(norm(tube_curl(lctx, *grad_field(f), lp)) < 1e-9);

    // rotation about the line axis: pullback of (-y, x, 0) has curl (0,0,2)
    auto rot = ambient_vector("0-y", "x", "0");
    CHECK(norm(tube_curl(lctx, *rot, lp) - Vec3d{0, 0, 2}) < 1e-10);

    // random field on the helix tube vs the ambient oracle
    CurveGeometry hel = make_helix(1.0, 0.5);
    BishopAngle ba(hel, 0.0, 0.0);
    TubeContext hctx = make_tube_context(&hel, &ba);
    TubeProjector proj(hctx);
    Rng rng(13);
    auto u = make_random_tube_vector(rng);
    TubePullbackVector amb(proj, u);
    for (int i = 0; i < 10; ++i) {
        TubePoint p{rng.uniform(-4.0, 4.0), rng.uniform(0.0, 2 * M_PI), rng.uniform(0.1, 0.35),
                    0.0};
        Vec3d x = tube_to_cartesian(hctx, p.s, p.theta, p.sigma);
        Vec3d mine = tube_curl(hctx, *u, p);
        Vec3d oracle = fd_curl(amb, x);
        CHECK(norm(mine - oracle) < 1e-5 * std::max(1.0, norm(oracle)));
    }
}

TEST_CASE("tube vector laplacian") {
    CurveGeometry hel = make_helix(1.0, 0.5);
    BishopAngle ba(hel, 0.0, 0.0);
    TubeContext ctx = make_tube_context(&hel, &ba);
    TubePoint p{0.7, 1.2, 0.25, 0.0};

    auto uc = ambient_vector("1.0", "-0.4", "0.2");
    CHECK(norm(tube_vector_laplacian(ctx, *uc, p)) < 1e-8);

    auto upos = ambient_vector("x", "y", "z");
    CHECK(norm(tube_vector_laplacian(ctx, *upos, p)) < 1e-8);

    auto uxx = ambient_vector("x*x", "0", "0");
    CHECK(norm(tube_vector_laplacian(ctx, *uxx, p) - Vec3d{2, 0, 0}) < 1e-7);

    // vector identity grad(div u) - curl(curl u) = lap u inside tube evaluation
    Rng rng(17);
    auto u = make_random_tube_vector(rng);
    auto gd = grad_field(div_field(u));
    auto cc = curl_field(u);
    for (int i = 0; i < 6; ++i) {
        TubePoint q{rng.uniform(-4.0, 4.0), rng.uniform(0.0, 2 * M_PI), rng.uniform(0.15, 0.3),
                    0.0};
        Vec3d lap = tube_vector_laplacian(ctx, *u, q);
        TubeFrameT<double> tf = tube_frame(ctx, q.s, q.theta, q.sigma);
        TubVec<double> gdv = gd->eval(ctx, q.s, q.theta, q.sigma, q.tau);
        Vec3d grad_div = tf.t_s * gdv.s + tf.t_sigma * gdv.sg + tf.t_theta * gdv.th;
        Vec3d curl_curl = tube_curl(ctx, *cc, q);
        CHECK(norm(lap - (grad_div - curl_curl)) < 1e-6 * std::max(1.0, norm(lap)));
    }
}

TEST_CASE("frenet evolution rates") {
    ChartCurveMotion motion;

    // rigid translation of a helix: the frame is steady
    CurveGeometry tr = translating_helix({0.3, -0.1, 0.4});
    FrenetEvolution fe = dt_frenet(tr, motion, 0.8, 0.2);
    CHECK(std::abs(fe.alpha) < 1e-12);
    CHECK(std::abs(fe.beta) < 1e-12);
    CHECK(std::abs(fe.gamma) < 1e-12);

    // inflating circle: alpha = beta = gamma = 0 (frame stays put)
    CurveGeometry circ = inflating_circle(1.0, 0.3);
    FrenetEvolution ce = dt_frenet(circ, motion, 1.0, 0.2);
    CHECK(std::abs(ce.alpha) < 1e-12);
    CHECK(std::abs(ce.beta) < 1e-12);
    CHECK(std::abs(ce.gamma) < 1e-12);

    // deforming paper curve: FD in tau of the Frenet frame
    CurveGeometry pc = evolving_paper_curve();
    double tau = 0.5, dt = 1e-5;
    for (double s : {0.15, 0.33, 0.61, 0.82}) {
        FrenetEvolution e = dt_frenet(pc, motion, s, tau);
        FrenetFrameT<double> Fp = frenet_frame<double>(pc, s, tau + dt);
        FrenetFrameT<double> Fm = frenet_frame<double>(pc, s, tau - dt);
        CHECK(norm(e.dtau_that - (Fp.that - Fm.that) / (2 * dt)) < 1e-6);
        CHECK(norm(e.dtau_nhat - (Fp.nhat - Fm.nhat) / (2 * dt)) < 1e-6);
        CHECK(norm(e.dtau_bhat - (Fp.bhat - Fm.bhat) / (2 * dt)) < 1e-6);
    }
}

TEST_CASE("frenet constraint residuals") {
    ChartCurveMotion motion;
    CurveGeometry tr = translating_helix({0.2, 0.4, -0.3});
    auto r = frenet_constraint_residuals(tr, motion, 1.1, 0.3);
    CHECK(std::abs(r[0]) < 1e-8);
    CHECK(std::abs(r[1]) < 1e-8);

    CurveGeometry circ = inflating_circle(1.2, 0.4);
    auto rc = frenet_constraint_residuals(circ, motion, 2.0, 0.1);
    CHECK(std::abs(rc[0]) < 1e-8);
    CHECK(std::abs(rc[1]) < 1e-8);

    CurveGeometry pc = evolving_paper_curve();
    for (double s : {0.2, 0.45, 0.7}) {
        auto rp = frenet_constraint_residuals(pc, motion, s, 0.5);
        CHECK(std::abs(rp[0]) < 1e-6);
        CHECK(std::abs(rp[1]) < 1e-6);
    }
}

TEST_CASE("tube frame rates: static, translation, FD contract") {
    ChartCurveMotion motion;

    // static curve: all rates vanish
    CurveGeometry hel = make_helix(1.0, 0.5);
    BishopAngle hba(hel, 0.0, 0.0);
    TubeContext hctx = make_tube_context(&hel, &hba);
    TubeFrameRates hr = dt_tube_frame(hctx, motion, {0.5, 1.0, 0.2, 0.0});
    CHECK(std::abs(hr.a) < 1e-12);
    CHECK(std::abs(hr.b) < 1e-12);
    CHECK(std::abs(hr.c) < 1e-12);

    // rigid translation: alpha' = beta' = 0, so a and b reduce to the pure
    // advection terms -v_t kappa cs/h_s and v_t kappa sn/h_s, and
    // c = -v_theta/sigma
    CurveGeometry tr = translating_helix({0.3, -0.1, 0.4});
    TubeBundle bundle(tr, 0.2, 0.0);
    const TubeContext& tctx = bundle.ctx();
    TubePoint tp{0.9, 0.7, 0.25, 0.2};
    TubeFrameRates rr = dt_tube_frame(tctx, motion, tp);
    TubeFrameT<double> tf = tube_frame_T<double>(tctx, tp.s, tp.theta, tp.sigma);
    CurveMotionSample<double> v = motion.eval(tr, tp.s, tp.tau);
    double v_theta = -tf.sn * v.vn + tf.cs * v.vb;
    double kappa = tf.frenet.kappa;
    CHECK(std::abs(rr.alpha_p) < 1e-10);
    CHECK(std::abs(rr.beta_p) < 1e-10);
    CHECK(rr.a == doctest::Approx(-v.vt * kappa * tf.cs / tf.h_s).epsilon(1e-9));
    CHECK(rr.b == doctest::Approx(v.vt * kappa * tf.sn / tf.h_s).epsilon(1e-9));
    CHECK(rr.c == doctest::Approx(-v_theta / tp.sigma).epsilon(1e-9));

    // and the translation case also satisfies the fixed-x FD contract
    {
        double dt = 1e-5;
        TubeBundle trp(tr, 0.2 + dt, 0.0), trm(tr, 0.2 - dt, 0.0);
        TubeProjector prp(trp.ctx()), prm(trm.ctx());
        Vec3d x = tube_to_cartesian(tctx, tp.s, tp.theta, tp.sigma);
        TubeCoordinates cp = prp.project(x), cm = prm.project(x);
        TubeFrameT<double> Fp = tube_frame_T<double>(trp.ctx(), cp.s, cp.theta, cp.sigma);
        TubeFrameT<double> Fm = tube_frame_T<double>(trm.ctx(), cm.s, cm.theta, cm.sigma);
        Vec3d fd_ts = (Fp.t_s - Fm.t_s) / (2 * dt);
        CHECK(norm(fd_ts - (tf.t_sigma * rr.a + tf.t_theta * rr.b)) < 1e-5);
    }

    // deforming paper curve: FD of the tube frame at fixed x
    CurveGeometry pc = evolving_paper_curve();
    double tau = 0.5, dt = 1e-5;
    TubeBundle b0(pc, tau, 0.0);
    TubeBundle bp(pc, tau + dt, 0.0), bm(pc, tau - dt, 0.0);
    TubeProjector pp(bp.ctx()), pm(bm.ctx());
    for (double s : {0.25, 0.55, 0.8}) {
        TubePoint p{s, 1.3, 0.1, tau};
        TubeFrameRates r = dt_tube_frame(b0.ctx(), motion, p);
        Vec3d x = tube_to_cartesian(b0.ctx(), p.s, p.theta, p.sigma);
        TubeCoordinates cp = pp.project(x), cm = pm.project(x);
        TubeFrameT<double> Fp = tube_frame_T<double>(bp.ctx(), cp.s, cp.theta, cp.sigma);
        TubeFrameT<double> Fm = tube_frame_T<double>(bm.ctx(), cm.s, cm.theta, cm.sigma);
        Vec3d fd_ts = (Fp.t_s - Fm.t_s) / (2 * dt);
        Vec3d fd_tsg = (Fp.t_sigma - Fm.t_sigma) / (2 * dt);
        Vec3d fd_tth = (Fp.t_theta - Fm.t_theta) / (2 * dt);
        TubeFrameT<double> F0 = tube_frame_T<double>(b0.ctx(), p.s, p.theta, p.sigma);
        CAPTURE(s);
        CHECK(norm(fd_ts - (F0.t_sigma * r.a + F0.t_theta * r.b)) < 1e-5);
        CHECK(norm(fd_tsg - (-(F0.t_s * r.a) + F0.t_theta * r.c)) < 1e-5);
        CHECK(norm(fd_tth - (-(F0.t_s * r.b) - F0.t_sigma * r.c)) < 1e-5);
    }
}

TEST_CASE("tube coordinate rates") {
    ChartCurveMotion motion;

    // static curve
    CurveGeometry hel = make_helix(1.0, 0.5);
    BishopAngle hba(hel, 0.0, 0.0);
    TubeContext hctx = make_tube_context(&hel, &hba);
    TubeCoordinateRates r0 = dt_tube_coordinates(hctx, motion, {0.4, 0.9, 0.2, 0.0});
    CHECK(r0.dt_s == doctest::Approx(0.0));
    CHECK(r0.dt_sigma == doctest::Approx(0.0));
    CHECK(r0.dt_theta == doctest::Approx(0.0));

    // translation along the tangent of a straight line
    CurveGeometry line = make_curve_from_exprs({"0", "0", "s + 0.7*tau"}, {-6.0, 6.0, false},
                                               "moving_line");
    TubeContext lctx = make_tube_context(&line, nullptr, 0.1);
    TubeCoordinateRates lr = dt_tube_coordinates(lctx, motion, {0.2, 0.5, 0.3, 0.1});
    CHECK(lr.dt_s == doctest::Approx(-0.7).epsilon(1e-10));
    CHECK(lr.dt_sigma == doctest::Approx(0.0));
    CHECK(lr.dt_theta == doctest::Approx(0.0));

    // deforming paper curve: re-projection FD
    CurveGeometry pc = evolving_paper_curve();
    double tau = 0.5, dt = 1e-5;
    TubeBundle b0(pc, tau, 0.0), bp(pc, tau + dt, 0.0), bm(pc, tau - dt, 0.0);
    TubeProjector pp(bp.ctx()), pm(bm.ctx());
    for (double s : {0.3, 0.6}) {
        TubePoint p{s, 0.8, 0.09, tau};
        TubeCoordinateRates r = dt_tube_coordinates(b0.ctx(), motion, p);
        Vec3d x = tube_to_cartesian(b0.ctx(), p.s, p.theta, p.sigma);
        TubeCoordinates cp = pp.project(x), cm = pm.project(x);
        CHECK(std::abs(r.dt_s - (cp.s - cm.s) / (2 * dt)) < 1e-5);
        CHECK(std::abs(r.dt_sigma - (cp.sigma - cm.sigma) / (2 * dt)) < 1e-5);
        double dth = std::remainder(cp.theta - cm.theta, 2 * M_PI) / (2 * dt);
        CHECK(std::abs(r.dt_theta - dth) < 1e-5);
    }
}

TEST_CASE("tube time derivatives of fields") {
    ChartCurveMotion motion;

    // static curve: dt f = d tau f
    CurveGeometry hel = make_helix(1.0, 0.5);
    BishopAngle hba(hel, 0.0, 0.0);
    TubeContext hctx = make_tube_context(&hel, &hba);
    auto ftau = coord_scalar("sigma*tau + cos(tau)");
    TubePoint hp{0.3, 1.1, 0.22, 0.6};
    CHECK(dt_scalar_tube(hctx, *ftau, motion, hp) ==
          doctest::Approx(hp.sigma - std::sin(hp.tau)).epsilon(1e-12));

    // ambient-steady pullbacks on a moving helix: dt f = 0, dt u = 0
    CurveGeometry tr = translating_helix({0.25, -0.15, 0.3});
    TubeBundle bundle(tr, 0.2, 0.0);
    auto fsteady = ambient_scalar("x*y + sin(z)");
    auto usteady = ambient_vector("y + z*z", "x*z", "cos(x)");
    Rng rng(23);
    for (int i = 0; i < 8; ++i) {
        TubePoint p{rng.uniform(-4.0, 4.0), rng.uniform(0.0, 2 * M_PI), rng.uniform(0.1, 0.3),
                    0.2};
        CHECK(std::abs(dt_scalar_tube(bundle.ctx(), *fsteady, motion, p)) < 1e-5);
        CHECK(norm(dt_vector_tube(bundle.ctx(), *usteady, motion, p)) < 1e-5);
    }

    // chain-rule closure on the deforming paper curve
    CurveGeometry pc = evolving_paper_curve();
    TubeBundle pb(pc, 0.5, 0.0);
    for (const char* coord : {"x", "y", "z"}) {
        auto fc = ambient_scalar(coord);
        TubePoint p{0.4, 1.9, 0.08, 0.5};
        CHECK(std::abs(dt_scalar_tube(pb.ctx(), *fc, motion, p)) < 1e-6);
    }

    // ambient-constant vector on a translating line
    CurveGeometry line = make_curve_from_exprs({"0.3*tau", "0", "s"}, {-6.0, 6.0, false},
                                               "sliding_line");
    TubeContext lctx = make_tube_context(&line, nullptr, 0.1);
    auto uc = ambient_vector("0.7", "-0.2", "0.4");
    CHECK(norm(dt_vector_tube(lctx, *uc, motion, {0.5, 0.8, 0.25, 0.1})) < 1e-6);
}

TEST_CASE("torsion evolution") {
    ChartCurveMotion motion;

    // rigid translation: torsion is invariant
    CurveGeometry tr = translating_helix({0.3, -0.1, 0.4});
    CHECK(std::abs(torsion_evolution(tr, motion, 0.7, 0.2)) < 1e-10);

    // planar inflation of a circle: no torsion ever
    CurveGeometry circ = inflating_circle(1.0, 0.3);
    CHECK(std::abs(torsion_evolution(circ, motion, 1.2, 0.1)) < 1e-10);

    // evolving paper curve: FD of omega over tau
    CurveGeometry pc = evolving_paper_curve();
    double tau = 0.5, dt = 1e-4;
    for (double s : {0.2, 0.45, 0.75}) {
        double mine = torsion_evolution(pc, motion, s, tau);
        double op = frenet_frame<double>(pc, s, tau + dt).omega;
        double om = frenet_frame<double>(pc, s, tau - dt).omega;
        double fd = (op - om) / (2 * dt);
        CAPTURE(s);
        CHECK(std::abs(mine - fd) < 1e-3 * std::max(1.0, std::abs(fd)));
    }
}

TEST_CASE("rate matrices are antisymmetric") {
    ChartCurveMotion motion;
    CurveGeometry pc = evolving_paper_curve();
    TubeBundle b(pc, 0.5, 0.0);
    TubePoint p{0.35, 0.9, 0.1, 0.5};
    // by construction the dt_frenet / dt_tube_frame representations are the
    // antisymmetric matrices themselves; reconstruct them from the returned
    // frame derivatives and check numerically
    FrenetEvolution fe = dt_frenet(pc, motion, p.s, p.tau);
    FrenetFrameT<double> F = frenet_frame<double>(pc, p.s, p.tau);
    Vec3d rows[3] = {fe.dtau_that, fe.dtau_nhat, fe.dtau_bhat};
    Vec3d base[3] = {F.that, F.nhat, F.bhat};
    double m[3][3];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m[i][j] = dot(rows[i], base[j]);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(std::abs(m[i][j] + m[j][i]) < 1e-12);
}
