#pragma once

// Time derivatives for evolving surfaces: frame evolution, Cartesian time
// derivatives of the coordinates, and material/partial time derivatives of
// fields carried in signed-distance coordinates.

#include "sdcalc/surface_calculus.hpp"

namespace sdcalc {

template <class T>
struct MotionSample {
    T vsigma{};        // normal speed
    Vec3<T> vperp{};   // tangential velocity (ambient components)
};

class SurfaceMotion {
public:
    virtual ~SurfaceMotion() = default;
#define SDCALC_SM_EVAL(T)                                                                 \
    virtual MotionSample<T> eval(const SurfaceGeometry& geom, const FrameGauge* gauge,    \
                                 const T& s1, const T& s2, const T& tau) const = 0;
    SDCALC_FOR_EACH_SCALAR(SDCALC_SM_EVAL)
#undef SDCALC_SM_EVAL
};

// Motion extracted from a time-dependent chart: v = d p/d tau, split into
// normal speed and tangential part. The default when the chart moves.
class ChartMotion final : public SurfaceMotion {
public:
#define SDCALC_SM_EVAL(T)                                                                 \
    MotionSample<T> eval(const SurfaceGeometry& geom, const FrameGauge*, const T& s1,     \
                         const T& s2, const T& tau) const override {                      \
        if (!geom.time_dependent())                                                       \
            return {T(0.0), Vec3<T>{T(0.0), T(0.0), T(0.0)}};                             \
        Vec3<T> v = geom.chart().deriv(0, 0, 1, s1, s2, tau);                             \
        Vec3<T> p, n;                                                                     \
        chart_point_normal(geom, s1, s2, tau, p, n);                                      \
        T vs = dot(v, n);                                                                 \
        return {vs, v - n * vs};                                                          \
    }
    SDCALC_FOR_EACH_SCALAR(SDCALC_SM_EVAL)
#undef SDCALC_SM_EVAL
};

// Motion from expressions: v_sigma and tangential components (v1, v2) in the
// principal frame, all functions of (s1, s2, tau).
class ExprSurfaceMotion final : public SurfaceMotion {
public:
    ExprSurfaceMotion(ExprPtr vsigma, ExprPtr v1, ExprPtr v2)
        : vs_(std::move(vsigma)), v1_(std::move(v1)), v2_(std::move(v2)) {}
#define SDCALC_SM_EVAL(T)                                                                 \
    MotionSample<T> eval(const SurfaceGeometry& geom, const FrameGauge* gauge,            \
                         const T& s1, const T& s2, const T& tau) const override {         \
        ExprEnv<T> env;                                                                   \
        env.bind(Var::s1, s1);                                                            \
        env.bind(Var::s2, s2);                                                            \
        env.bind(Var::tau, tau);                                                          \
        SurfaceFrame<T> F = surface_frame<T>(geom, s1, s2, tau, gauge);                   \
        return {eval_expr(*vs_, env),                                                     \
                F.that1 * eval_expr(*v1_, env) + F.that2 * eval_expr(*v2_, env)};         \
    }
    SDCALC_FOR_EACH_SCALAR(SDCALC_SM_EVAL)
#undef SDCALC_SM_EVAL
private:
    ExprPtr vs_, v1_, v2_;
};

namespace evol {

// covariant surface gradient of the normal speed at (s, tau)
template <class T>
Vec3<T> grad_vsigma(const SurfaceGeometry& g, const SurfaceMotion& m, const FrameGauge& gg,
                    const SurfaceFrame<T>& F, const T& a, const T& b, const T& tau) {
    return surface_gradient_T<T>(F, a, b, [&](auto p, auto q) {
        using DT = std::decay_t<decltype(p)>;
        return m.eval(g, &gg, p, q, DT(tau)).vsigma;
    });
}

// d tau of the raw tangents via the frame-evolution formula
template <class T>
std::array<Vec3<T>, 2> dtau_tangents_T(const SurfaceGeometry& g, const SurfaceMotion& m,
                                       const FrameGauge& gg, const T& a, const T& b,
                                       const T& tau) {
    SurfaceFrame<T> F = surface_frame<T>(g, a, b, tau, &gg);
    Mat3<T> K = F.shape_tensor();
    Mat3<T> Pi = F.projector();
    MotionSample<T> v = m.eval(g, &gg, a, b, tau);
    Vec3<T> wn = grad_vsigma(g, m, gg, F, a, b, tau) + matvec(K, v.vperp);

    std::array<Vec3<T>, 2> out;
    for (int i = 0; i < 2; ++i) {
        const Vec3<T>& ti = i == 0 ? F.t1 : F.t2;
        // coordinate partial of vperp along s_i
        std::array<T, 2> w{T(i == 0 ? 1.0 : 0.0), T(i == 0 ? 0.0 : 1.0)};
        Vec3<T> divp = dir_deriv_vec(a, b, w, [&](auto p, auto q) {
            using DT = std::decay_t<decltype(p)>;
            return m.eval(g, &gg, p, q, DT(tau)).vperp;
        });
        out[i] = F.nhat * dot(ti, wn) - matvec(K, ti) * v.vsigma + matvec(Pi, divp);
    }
    return out;
}

template <class T>
Vec3<T> dtau_normal_T(const SurfaceGeometry& g, const SurfaceMotion& m, const FrameGauge& gg,
                      const T& a, const T& b, const T& tau) {
    SurfaceFrame<T> F = surface_frame<T>(g, a, b, tau, &gg);
    MotionSample<T> v = m.eval(g, &gg, a, b, tau);
    return -(grad_vsigma(g, m, gg, F, a, b, tau) + matvec(F.shape_tensor(), v.vperp));
}

// Cartesian time derivative of a scalar field at fixed x.
template <class T>
T dt_scalar_T(const SurfaceGeometry& g, const SurfaceScalarField& f, const SurfaceMotion& m,
              const FrameGauge& gg, const T& sg, const T& a, const T& b, const T& tau) {
    SurfaceFrame<T> F = surface_frame<T>(g, a, b, tau, &gg);
    surfops::JFactors<T> J = surfops::j_factors(F, sg);
    MotionSample<T> v = m.eval(g, &gg, a, b, tau);
    Vec3<T> gvs = grad_vsigma(g, m, gg, F, a, b, tau);

    T dtauf = derivative(
        [&](auto t) {
            using DT = std::decay_t<decltype(t)>;
            return f.eval(g, &gg, DT(sg), DT(a), DT(b), t);
        },
        tau);
    T dsf = surfops::dsigma(sg, [&](auto s) {
        using DT = std::decay_t<decltype(s)>;
        return f.eval(g, &gg, s, DT(a), DT(b), DT(tau));
    });
    Vec3<T> gpf = surfops::grad_perp<T>(g, f, gg, F, sg, a, b, tau);
    Vec3<T> Jinv_gvs =
        F.that1 * (dot(gvs, F.that1) / J.f1) + F.that2 * (dot(gvs, F.that2) / J.f2);
    return dtauf - v.vsigma * dsf - dot(v.vperp, gpf) + sg * dot(Jinv_gvs, gpf);
}

// Cartesian time derivative of a vector field at fixed x (ambient value).
template <class T>
Vec3<T> dt_vector_T(const SurfaceGeometry& g, const SurfaceVectorField& u, const SurfaceMotion& m,
                    const FrameGauge& gg, const T& sg, const T& a, const T& b, const T& tau) {
    SurfaceFrame<T> F = surface_frame<T>(g, a, b, tau, &gg);
    surfops::JFactors<T> J = surfops::j_factors(F, sg);
    Mat3<T> K = F.shape_tensor();
    Mat3<T> Pi = F.projector();
    MotionSample<T> v = m.eval(g, &gg, a, b, tau);
    Vec3<T> gvs = grad_vsigma(g, m, gg, F, a, b, tau);
    Vec3<T> dtau_n = -(gvs + matvec(K, v.vperp));

    SurfVec<T> uu = u.eval(g, &gg, sg, a, b, tau);
    Vec3<T> u_perp = F.that1 * uu.u1 + F.that2 * uu.u2;

    // w = sigma J^{-1} grad_perp v_sigma - v_perp
    Vec3<T> w = F.that1 * (sg * dot(gvs, F.that1) / J.f1) +
                F.that2 * (sg * dot(gvs, F.that2) / J.f2) - v.vperp;

    T ds_un = surfops::dsigma(sg, [&](auto s) {
        using DT = std::decay_t<decltype(s)>;
        return u.eval(g, &gg, s, DT(a), DT(b), DT(tau)).n;
    });
    Vec3<T> ds_uperp = surfops::dsigma(sg, [&](auto s) {
        using DT = std::decay_t<decltype(s)>;
        SurfVec<DT> vv = u.eval(g, &gg, s, DT(a), DT(b), DT(tau));
        return promote_vec<DT>(F.that1) * vv.u1 + promote_vec<DT>(F.that2) * vv.u2;
    });

    T dtau_un = derivative(
        [&](auto t) {
            using DT = std::decay_t<decltype(t)>;
            return u.eval(g, &gg, DT(sg), DT(a), DT(b), t).n;
        },
        tau);

    // d tau of the contravariant raw-tangent components of u_perp, times the
    // base tangents
    using DTau = Dual<T>;
    DTau t_dual{tau, T(1.0)};
    SurfaceFrame<DTau> Ft = surface_frame<DTau>(g, DTau(a), DTau(b), t_dual, &gg);
    SurfVec<DTau> ut = u.eval(g, &gg, DTau(sg), DTau(a), DTau(b), t_dual);
    Vec3<DTau> up_t = Ft.that1 * ut.u1 + Ft.that2 * ut.u2;
    std::array<DTau, 2> comps = param_velocity(Ft, up_t);
    Vec3<T> dtau_ui_ti = F.t1 * comps[0].dot + F.t2 * comps[1].dot;

    Vec3<T> grad_un = surface_gradient_T<T>(F, a, b, [&](auto p, auto q) {
        using DT = std::decay_t<decltype(p)>;
        return u.eval(g, &gg, DT(sg), p, q, DT(tau)).n;
    });
    Mat3<T> gp_uperp = surface_vector_gradient_T<T>(F, a, b, [&](auto p, auto q) {
        using DT = std::decay_t<decltype(p)>;
        SurfaceFrame<DT> G = surface_frame<DT>(g, p, q, DT(tau), &gg);
        SurfVec<DT> vv = u.eval(g, &gg, DT(sg), p, q, DT(tau));
        return G.that1 * vv.u1 + G.that2 * vv.u2;
    });
    Mat3<T> gp_vperp = surface_vector_gradient_T<T>(F, a, b, [&](auto p, auto q) {
        using DT = std::decay_t<decltype(p)>;
        return m.eval(g, &gg, p, q, DT(tau)).vperp;
    });

    T n_coeff = dtau_un - v.vsigma * ds_un + dot(w, grad_un + matvec(K, u_perp));
    Vec3<T> dtau_uperp = dtau_ui_ti + F.nhat * dot(u_perp, gvs + matvec(K, v.vperp)) +
                         vecmat(u_perp, matmul(gp_vperp, Pi)) - matvec(K, u_perp) * v.vsigma;
    Vec3<T> tang = dtau_uperp + dtau_n * uu.n - ds_uperp * v.vsigma +
                   vecmat(w, matmul(gp_uperp, Pi)) - matvec(K, w) * uu.n;
    return F.nhat * n_coeff + tang;
}

}  // namespace evol

// ---- public wrappers ---------------------------------------------------------

// d tau of the raw chart tangents (t1, t2) under the surface motion.
inline std::array<Vec3d, 2> dtau_tangents(const SurfaceGeometry& geom, const SurfaceMotion& m,
                                          double s1, double s2, double tau) {
    FrameGauge gg = detail::base_gauge(geom, {s1, s2, 0.0, tau});
    return evol::dtau_tangents_T<double>(geom, m, gg, s1, s2, tau);
}

inline Vec3d dtau_normal(const SurfaceGeometry& geom, const SurfaceMotion& m, double s1,
                         double s2, double tau) {
    FrameGauge gg = detail::base_gauge(geom, {s1, s2, 0.0, tau});
    return evol::dtau_normal_T<double>(geom, m, gg, s1, s2, tau);
}

struct CoordinateRates {
    double dt_sigma;   // = -v_sigma
    Vec3d dt_s_vec;    // sum_i (dt s_i) t_i = -v_perp + sigma J^{-1} grad_perp v_sigma
};

inline CoordinateRates dt_coordinates(const SurfaceGeometry& geom, const SurfaceMotion& m,
                                      const SurfacePoint& pt) {
    FrameGauge gg = detail::base_gauge(geom, pt);
    SurfaceFrame<double> F = surface_frame<double>(geom, pt.s1, pt.s2, pt.tau, &gg);
    surfops::JFactors<double> J = surfops::j_factors(F, pt.sigma);
    MotionSample<double> v = m.eval(geom, &gg, pt.s1, pt.s2, pt.tau);
    Vec3d gvs = evol::grad_vsigma(geom, m, gg, F, pt.s1, pt.s2, pt.tau);
    Vec3d Jinv_gvs = F.that1 * (dot(gvs, F.that1) / J.f1) + F.that2 * (dot(gvs, F.that2) / J.f2);
    return {-v.vsigma, -v.vperp + Jinv_gvs * pt.sigma};
}

inline double dt_scalar(const SurfaceGeometry& geom, const SurfaceScalarField& f,
                        const SurfaceMotion& m, const SurfacePoint& pt) {
    FrameGauge gg = detail::base_gauge(geom, pt);
    return evol::dt_scalar_T<double>(geom, f, m, gg, pt.sigma, pt.s1, pt.s2, pt.tau);
}

inline Vec3d dt_vector(const SurfaceGeometry& geom, const SurfaceVectorField& u,
                       const SurfaceMotion& m, const SurfacePoint& pt) {
    FrameGauge gg = detail::base_gauge(geom, pt);
    return evol::dt_vector_T<double>(geom, u, m, gg, pt.sigma, pt.s1, pt.s2, pt.tau);
}

}  // namespace sdcalc
