#pragma once

// Differential operators in orthogonal tube coordinates around a space
// curve, plus the full evolving-curve machinery (Frenet / tube frame rates,
// Cartesian coordinate rates, scalar/vector time derivatives, torsion
// evolution).

#include "sdcalc/curve_frames.hpp"
#include "sdcalc/fields.hpp"

namespace sdcalc {

struct TubePoint {
    double s = 0.0, theta = 0.0, sigma = 0.0;
    double tau = 0.0;
};

template <class T>
struct CurveMotionSample {
    T vt{}, vn{}, vb{};  // Frenet components of d p / d tau
};

class CurveMotion {
public:
    virtual ~CurveMotion() = default;
#define SDCALC_CM_EVAL(T) \
    virtual CurveMotionSample<T> eval(const CurveGeometry& c, const T& s, const T& tau) const = 0;
    SDCALC_FOR_EACH_SCALAR(SDCALC_CM_EVAL)
#undef SDCALC_CM_EVAL
};

// Default: velocity extracted from the tau-dependent chart, v = d p/d tau
// projected onto the Frenet frame.
class ChartCurveMotion final : public CurveMotion {
public:
#define SDCALC_CM_EVAL(T)                                                                   \
    CurveMotionSample<T> eval(const CurveGeometry& c, const T& s, const T& tau) const       \
        override {                                                                          \
        if (!c.time_dependent()) return {T(0.0), T(0.0), T(0.0)};                           \
        Vec3<T> v = c.chart().deriv(0, 1, s, tau);                                          \
        FrenetFrameT<T> F = frenet_frame<T>(c, s, tau);                                     \
        return {dot(v, F.that), dot(v, F.nhat), dot(v, F.bhat)};                            \
    }
    SDCALC_FOR_EACH_SCALAR(SDCALC_CM_EVAL)
#undef SDCALC_CM_EVAL
};

// Frenet velocity components given as expressions in (s, tau).
class ExprCurveMotion final : public CurveMotion {
public:
    ExprCurveMotion(ExprPtr vt, ExprPtr vn, ExprPtr vb)
        : vt_(std::move(vt)), vn_(std::move(vn)), vb_(std::move(vb)) {}
#define SDCALC_CM_EVAL(T)                                                                    \
    CurveMotionSample<T> eval(const CurveGeometry&, const T& s, const T& tau) const          \
        override {                                                                           \
        ExprEnv<T> env;                                                                      \
        env.bind(Var::s, s);                                                                 \
        env.bind(Var::tau, tau);                                                             \
        return {eval_expr(*vt_, env), eval_expr(*vn_, env), eval_expr(*vb_, env)};           \
    }
    SDCALC_FOR_EACH_SCALAR(SDCALC_CM_EVAL)
#undef SDCALC_CM_EVAL
private:
    ExprPtr vt_, vn_, vb_;
};

namespace tubeops {

// Arclength derivative grad_s = (1/|t|) d/ds of a scalar-valued callable of
// the curve parameter at fixed (theta, sigma).
template <class T, class G>
T nabla_s(const CurveGeometry& c, const T& s, const T& tau, G&& g) {
    using DT = Dual<T>;
    DT r = g(DT{s, T(1.0)});
    return r.dot / norm(c.chart().deriv(1, 0, s, tau));
}

template <class T, class G>
auto dtheta(const T& theta, G&& g) {
    using DT = Dual<T>;
    return g(DT{theta, T(1.0)}).dot;
}

template <class T, class G>
auto dsig(const T& sigma, G&& g) {
    using DT = Dual<T>;
    return g(DT{sigma, T(1.0)}).dot;
}

template <class T>
void require_off_axis(const T& sigma) {
    if (!(primal(sigma) > 1e-12)) throw OnAxisError("tube operator evaluated on the axis");
}

// Component bundle of a vector field at a point.
template <class T>
TubVec<T> comps(const TubeContext& ctx, const TubeVectorField& u, const T& s, const T& th,
                const T& sg, const T& tau) {
    return u.eval(ctx, s, th, sg, tau);
}

// ---- gradient ----------------------------------------------------------------

template <class T>
Vec3<T> tube_gradient_T(const TubeContext& ctx, const TubeScalarField& f, const T& s,
                        const T& th, const T& sg, const T& tau) {
    require_off_axis(sg);
    TubeFrameT<T> tf = tube_frame_T<T>(ctx, s, th, sg);
    T dfs = nabla_s(*ctx.curve, s, tau, [&](auto p) {
        using DT = std::decay_t<decltype(p)>;
        return f.eval(ctx, p, DT(th), DT(sg), DT(tau));
    });
    T dft = dtheta(th, [&](auto q) {
        using DT = std::decay_t<decltype(q)>;
        return f.eval(ctx, DT(s), q, DT(sg), DT(tau));
    });
    T dfg = dsig(sg, [&](auto r) {
        using DT = std::decay_t<decltype(r)>;
        return f.eval(ctx, DT(s), DT(th), r, DT(tau));
    });
    return tf.t_sigma * dfg + tf.t_s * (dfs / tf.h_s) + tf.t_theta * (dft / sg);
}

// ---- vector gradient -----------------------------------------------------------

template <class T>
Mat3<T> tube_vector_gradient_T(const TubeContext& ctx, const TubeVectorField& u, const T& s,
                               const T& th, const T& sg, const T& tau) {
    require_off_axis(sg);
    TubeFrameT<T> tf = tube_frame_T<T>(ctx, s, th, sg);
    TubVec<T> uu = comps(ctx, u, s, th, sg, tau);

    auto ds_comp = [&](auto pick) {
        return nabla_s(*ctx.curve, s, tau, [&](auto p) {
            using DT = std::decay_t<decltype(p)>;
            return pick(u.eval(ctx, p, DT(th), DT(sg), DT(tau)));
        });
    };
    auto dth_comp = [&](auto pick) {
        return dtheta(th, [&](auto q) {
            using DT = std::decay_t<decltype(q)>;
            return pick(u.eval(ctx, DT(s), q, DT(sg), DT(tau)));
        });
    };
    auto dsg_comp = [&](auto pick) {
        return dsig(sg, [&](auto r) {
            using DT = std::decay_t<decltype(r)>;
            return pick(u.eval(ctx, DT(s), DT(th), r, DT(tau)));
        });
    };
    auto cs_ = [](const auto& v) { return v.s; };
    auto csg = [](const auto& v) { return v.sg; };
    auto cth = [](const auto& v) { return v.th; };

    T ds_us = ds_comp(cs_), ds_usg = ds_comp(csg), ds_uth = ds_comp(cth);
    T dt_us = dth_comp(cs_), dt_usg = dth_comp(csg), dt_uth = dth_comp(cth);
    T dg_us = dsg_comp(cs_), dg_usg = dsg_comp(csg), dg_uth = dsg_comp(cth);

    Mat3<T> out = Mat3<T>::zero();
    out += outer(tf.t_s, tf.t_s) * (ds_us / tf.h_s - tf.A * uu.sg - tf.B * uu.th);
    out += outer(tf.t_s, tf.t_sigma) * (ds_usg / tf.h_s + tf.A * uu.s);
    out += outer(tf.t_s, tf.t_theta) * (ds_uth / tf.h_s + tf.B * uu.s);
    out += outer(tf.t_sigma, tf.t_s) * dg_us;
    out += outer(tf.t_sigma, tf.t_sigma) * dg_usg;
    out += outer(tf.t_sigma, tf.t_theta) * dg_uth;
    out += outer(tf.t_theta, tf.t_s) * (dt_us / sg);
    out += outer(tf.t_theta, tf.t_sigma) * (dt_usg / sg - tf.C * uu.th);
    out += outer(tf.t_theta, tf.t_theta) * (dt_uth / sg + tf.C * uu.sg);
    return out;
}

// ---- divergence ------------------------------------------------------------------

template <class T>
T tube_divergence_T(const TubeContext& ctx, const TubeVectorField& u, const T& s, const T& th,
                    const T& sg, const T& tau) {
    require_off_axis(sg);
    TubeFrameT<T> tf = tube_frame_T<T>(ctx, s, th, sg);
    TubVec<T> uu = comps(ctx, u, s, th, sg, tau);
    T ds_us = nabla_s(*ctx.curve, s, tau, [&](auto p) {
        using DT = std::decay_t<decltype(p)>;
        return u.eval(ctx, p, DT(th), DT(sg), DT(tau)).s;
    });
    T dg_usg = dsig(sg, [&](auto r) {
        using DT = std::decay_t<decltype(r)>;
        return u.eval(ctx, DT(s), DT(th), r, DT(tau)).sg;
    });
    T dt_uth = dtheta(th, [&](auto q) {
        using DT = std::decay_t<decltype(q)>;
        return u.eval(ctx, DT(s), q, DT(sg), DT(tau)).th;
    });
    return ds_us / tf.h_s + dg_usg + dt_uth / sg + (tf.C - tf.A) * uu.sg - tf.B * uu.th;
}

// ---- scalar Laplacian ---------------------------------------------------------------

template <class T>
T tube_scalar_laplacian_T(const TubeContext& ctx, const TubeScalarField& f, const T& s,
                          const T& th, const T& sg, const T& tau) {
    require_off_axis(sg);
    TubeFrameT<T> tf = tube_frame_T<T>(ctx, s, th, sg);

    T ds_f = nabla_s(*ctx.curve, s, tau, [&](auto p) {
        using DT = std::decay_t<decltype(p)>;
        return f.eval(ctx, p, DT(th), DT(sg), DT(tau));
    });
    T ds2_f = nabla_s(*ctx.curve, s, tau, [&](auto p) {
        using DT = std::decay_t<decltype(p)>;
        return nabla_s(*ctx.curve, p, DT(tau), [&](auto p2) {
            using DT2 = std::decay_t<decltype(p2)>;
            return f.eval(ctx, p2, DT2(th), DT2(sg), DT2(tau));
        });
    });
    T dg_f = dsig(sg, [&](auto r) {
        using DT = std::decay_t<decltype(r)>;
        return f.eval(ctx, DT(s), DT(th), r, DT(tau));
    });
    T dg2_f = dsig(sg, [&](auto r) {
        using DT = std::decay_t<decltype(r)>;
        return dsig(r, [&](auto r2) {
            using DT2 = std::decay_t<decltype(r2)>;
            return f.eval(ctx, DT2(s), DT2(th), r2, DT2(tau));
        });
    });
    T dt_f = dtheta(th, [&](auto q) {
        using DT = std::decay_t<decltype(q)>;
        return f.eval(ctx, DT(s), q, DT(sg), DT(tau));
    });
    T dt2_f = dtheta(th, [&](auto q) {
        using DT = std::decay_t<decltype(q)>;
        return dtheta(q, [&](auto q2) {
            using DT2 = std::decay_t<decltype(q2)>;
            return f.eval(ctx, DT2(s), q2, DT2(sg), DT2(tau));
        });
    });
    // grad_s h_s at fixed (theta, sigma)
    T ds_hs = nabla_s(*ctx.curve, s, tau, [&](auto p) {
        using DT = std::decay_t<decltype(p)>;
        TubeFrameT<DT> g = tube_frame_T<DT>(ctx, p, DT(th), DT(sg));
        return g.h_s;
    });

    return ds2_f / (tf.h_s * tf.h_s) + dg2_f + dt2_f / (sg * sg) -
           ds_hs / (tf.h_s * tf.h_s * tf.h_s) * ds_f + (tf.C - tf.A) * dg_f -
           (tf.B / sg) * dt_f;
}

// ---- curl -------------------------------------------------------------------------

template <class T>
Vec3<T> tube_curl_T(const TubeContext& ctx, const TubeVectorField& u, const T& s, const T& th,
                    const T& sg, const T& tau) {
    require_off_axis(sg);
    TubeFrameT<T> tf = tube_frame_T<T>(ctx, s, th, sg);

    auto ds_comp = [&](auto pick) {
        return nabla_s(*ctx.curve, s, tau, [&](auto p) {
            using DT = std::decay_t<decltype(p)>;
            return pick(u.eval(ctx, p, DT(th), DT(sg), DT(tau)));
        });
    };
    auto dth_comp = [&](auto pick) {
        return dtheta(th, [&](auto q) {
            using DT = std::decay_t<decltype(q)>;
            return pick(u.eval(ctx, DT(s), q, DT(sg), DT(tau)));
        });
    };
    auto dsg_comp = [&](auto pick) {
        return dsig(sg, [&](auto r) {
            using DT = std::decay_t<decltype(r)>;
            return pick(u.eval(ctx, DT(s), DT(th), r, DT(tau)));
        });
    };
    auto cs_ = [](const auto& v) { return v.s; };
    auto csg = [](const auto& v) { return v.sg; };
    auto cth = [](const auto& v) { return v.th; };
    TubVec<T> uu = comps(ctx, u, s, th, sg, tau);

    T comp_s = dsg_comp(cth) - dth_comp(csg) / sg + tf.C * uu.th;
    T comp_sg = dth_comp(cs_) / sg - ds_comp(cth) / tf.h_s - tf.B * uu.s;
    T comp_th = ds_comp(csg) / tf.h_s - dsg_comp(cs_) + tf.A * uu.s;
    return tf.t_s * comp_s + tf.t_sigma * comp_sg + tf.t_theta * comp_th;
}

// ---- vector Laplacian --------------------------------------------------------------

template <class T>
Vec3<T> tube_vector_laplacian_T(const TubeContext& ctx, const TubeVectorField& u, const T& s,
                                const T& th, const T& sg, const T& tau) {
    require_off_axis(sg);
    TubeFrameT<T> tf = tube_frame_T<T>(ctx, s, th, sg);
    TubVec<T> uu = comps(ctx, u, s, th, sg, tau);

    // scalar Laplacian applied to one component
    auto lap_comp = [&](auto pick) {
        auto wrap = [&, pick](const TubeContext& c2, const auto& a, const auto& b, const auto& c,
                              const auto& t2) {
            using DT = std::decay_t<decltype(a)>;
            (void)c2;
            return pick(u.eval(ctx, a, b, c, DT(t2)));
        };
        CallableTubeScalarField<decltype(wrap)> cf(wrap);
        return tube_scalar_laplacian_T<T>(ctx, cf, s, th, sg, tau);
    };
    auto ds_comp = [&](auto pick) {
        return nabla_s(*ctx.curve, s, tau, [&](auto p) {
            using DT = std::decay_t<decltype(p)>;
            return pick(u.eval(ctx, p, DT(th), DT(sg), DT(tau)));
        });
    };
    auto dth_comp = [&](auto pick) {
        return dtheta(th, [&](auto q) {
            using DT = std::decay_t<decltype(q)>;
            return pick(u.eval(ctx, DT(s), q, DT(sg), DT(tau)));
        });
    };
    auto cs_ = [](const auto& v) { return v.s; };
    auto csg = [](const auto& v) { return v.sg; };
    auto cth = [](const auto& v) { return v.th; };

    // grad_s of the connection coefficients
    T ds_A = nabla_s(*ctx.curve, s, tau, [&](auto p) {
        using DT = std::decay_t<decltype(p)>;
        return tube_frame_T<DT>(ctx, p, DT(th), DT(sg)).A;
    });
    T ds_B = nabla_s(*ctx.curve, s, tau, [&](auto p) {
        using DT = std::decay_t<decltype(p)>;
        return tube_frame_T<DT>(ctx, p, DT(th), DT(sg)).B;
    });

    T A = tf.A, B = tf.B, C = tf.C, hs = tf.h_s;
    T comp_s = lap_comp(cs_) - (2.0 * A / hs) * ds_comp(csg) - (2.0 * B / hs) * ds_comp(cth) +
               (-(A * A) - B * B) * uu.s - (ds_A / hs) * uu.sg - (ds_B / hs) * uu.th;
    T comp_sg = lap_comp(csg) + (2.0 * A / hs) * ds_comp(cs_) - (2.0 * C / sg) * dth_comp(cth) +
                (ds_A / hs) * uu.s + (-(A * A) - C * C) * uu.sg + (-(A * B) + B * C) * uu.th;
    T comp_th = lap_comp(cth) + (2.0 * B / hs) * ds_comp(cs_) + (2.0 * C / sg) * dth_comp(csg) +
                (ds_B / hs) * uu.s + (-(A * B) - B * C) * uu.sg + (-(B * B) - C * C) * uu.th;
    return tf.t_s * comp_s + tf.t_sigma * comp_sg + tf.t_theta * comp_th;
}

// ---- evolving curves -----------------------------------------------------------------

template <class T>
struct FrenetRates {
    T alpha, beta, gamma;
};

// alpha = kappa v_t - omega v_b + grad_s v_n ; beta = omega v_n + grad_s v_b ;
// gamma = (omega alpha + grad_s beta)/kappa (0 on straight segments when the
// numerator vanishes).
template <class T>
FrenetRates<T> dt_frenet_T(const CurveGeometry& c, const CurveMotion& m, const T& s,
                           const T& tau) {
    FrenetFrameT<T> F = frenet_frame<T>(c, s, tau);
    CurveMotionSample<T> v = m.eval(c, s, tau);
    T ds_vn = nabla_s(c, s, tau, [&](auto p) {
        using DT = std::decay_t<decltype(p)>;
        return m.eval(c, p, DT(tau)).vn;
    });
    T ds_vb = nabla_s(c, s, tau, [&](auto p) {
        using DT = std::decay_t<decltype(p)>;
        return m.eval(c, p, DT(tau)).vb;
    });
    FrenetRates<T> r;
    r.alpha = F.kappa * v.vt - F.omega * v.vb + ds_vn;
    r.beta = F.omega * v.vn + ds_vb;
    T numer = F.omega * r.alpha + nabla_s(c, s, tau, [&](auto p) {
                  using DT = std::decay_t<decltype(p)>;
                  FrenetFrameT<DT> G = frenet_frame<DT>(c, p, DT(tau));
                  CurveMotionSample<DT> vv = m.eval(c, p, DT(tau));
                  DT dvb = nabla_s(c, p, DT(tau), [&](auto p2) {
                      using DT2 = std::decay_t<decltype(p2)>;
                      return m.eval(c, p2, DT2(tau)).vb;
                  });
                  return G.omega * vv.vn + dvb;  // beta as a field of s
              });
    if (primal(F.kappa) < 1e-12) {
        if (std::abs(primal(numer)) > 1e-10)
            throw DomainError("gamma singular: kappa -> 0 with rotating frame");
        r.gamma = T(0.0);
    } else {
        r.gamma = numer / F.kappa;
    }
    return r;
}

template <class T>
struct TubeRates {
    T alpha_p, beta_p, gamma_p;  // rotated frame rates; gamma' = gamma + d tau phi
    T a, b, c;                   // Cartesian (fixed-x) rates of the tube frame
    T v_sigma, v_theta;          // rotated velocity components
};

template <class T>
TubeRates<T> tube_frame_rates_T(const TubeContext& ctx, const CurveMotion& m, const T& s,
                                const T& th, const T& sg, const T& tau) {
    require_off_axis(sg);
    TubeFrameT<T> tf = tube_frame_T<T>(ctx, s, th, sg);
    FrenetRates<T> r = dt_frenet_T<T>(*ctx.curve, m, s, tau);
    CurveMotionSample<T> v = m.eval(*ctx.curve, s, tau);

    TubeRates<T> out;
    out.alpha_p = tf.cs * r.alpha + tf.sn * r.beta;
    out.beta_p = -(tf.sn * r.alpha) + tf.cs * r.beta;
    out.gamma_p = r.gamma + ctx.template dphi_dtau<T>(s);
    out.v_sigma = tf.cs * v.vn + tf.sn * v.vb;
    out.v_theta = -(tf.sn * v.vn) + tf.cs * v.vb;
    T kappa = tf.frenet.kappa;
    out.a = (out.alpha_p - v.vt * kappa * tf.cs) / tf.h_s;
    out.b = out.beta_p - kappa * tf.sn * (sg * out.alpha_p - v.vt) / tf.h_s;
    out.c = -(out.v_theta / sg);
    return out;
}

// Cartesian time derivative of a generic scalar component function
// g(s, theta, sigma, tau).
template <class T, class G>
T dt_component_T(const TubeContext& ctx, const CurveMotion& m, const T& s, const T& th,
                 const T& sg, const T& tau, G&& g) {
    TubeFrameT<T> tf = tube_frame_T<T>(ctx, s, th, sg);
    TubeRates<T> r = tube_frame_rates_T<T>(ctx, m, s, th, sg, tau);
    CurveMotionSample<T> v = m.eval(*ctx.curve, s, tau);

    T dtau_f = derivative(
        [&](auto t) {
            using DT = std::decay_t<decltype(t)>;
            return g(DT(s), DT(th), DT(sg), t);
        },
        tau);
    T ds_f = nabla_s(*ctx.curve, s, tau, [&](auto a) {
        using DT = std::decay_t<decltype(a)>;
        return g(a, DT(th), DT(sg), DT(tau));
    });
    T dg_f = dsig(sg, [&](auto rr) {
        using DT = std::decay_t<decltype(rr)>;
        return g(DT(s), DT(th), rr, DT(tau));
    });
    T dt_f = dtheta(th, [&](auto q) {
        using DT = std::decay_t<decltype(q)>;
        return g(DT(s), q, DT(sg), DT(tau));
    });
    return dtau_f - (v.vt - sg * r.alpha_p) * ds_f / tf.h_s - r.v_sigma * dg_f -
           (r.v_theta + sg * r.gamma_p) * dt_f / sg;
}

template <class T>
T dt_scalar_tube_T(const TubeContext& ctx, const TubeScalarField& f, const CurveMotion& m,
                   const T& s, const T& th, const T& sg, const T& tau) {
    require_off_axis(sg);
    return dt_component_T<T>(ctx, m, s, th, sg, tau,
                             [&](const auto& a, const auto& b, const auto& c, const auto& t) {
                                 return f.eval(ctx, a, b, c, t);
                             });
}

template <class T>
Vec3<T> dt_vector_tube_T(const TubeContext& ctx, const TubeVectorField& u, const CurveMotion& m,
                         const T& s, const T& th, const T& sg, const T& tau) {
    require_off_axis(sg);
    TubeFrameT<T> tf = tube_frame_T<T>(ctx, s, th, sg);
    TubeRates<T> r = tube_frame_rates_T<T>(ctx, m, s, th, sg, tau);
    TubVec<T> uu = u.eval(ctx, s, th, sg, tau);

    auto comp = [&](auto pick) {
        return dt_component_T<T>(ctx, m, s, th, sg, tau,
                                 [&, pick](const auto& a, const auto& b, const auto& c,
                                           const auto& t) { return pick(u.eval(ctx, a, b, c, t)); });
    };
    T dt_us = comp([](const auto& v) { return v.s; });
    T dt_usg = comp([](const auto& v) { return v.sg; });
    T dt_uth = comp([](const auto& v) { return v.th; });

    T comp_s = dt_us - r.a * uu.sg - r.b * uu.th;
    T comp_sg = dt_usg + r.a * uu.s - r.c * uu.th;
    T comp_th = dt_uth + r.b * uu.s + r.c * uu.sg;
    return tf.t_s * comp_s + tf.t_sigma * comp_sg + tf.t_theta * comp_th;
}

}  // namespace tubeops

// ---- public wrappers ---------------------------------------------------------

inline Vec3d tube_gradient(const TubeContext& ctx, const TubeScalarField& f, const TubePoint& p) {
    return tubeops::tube_gradient_T<double>(ctx, f, p.s, p.theta, p.sigma, p.tau);
}
inline Mat3d tube_vector_gradient(const TubeContext& ctx, const TubeVectorField& u,
                                  const TubePoint& p) {
    return tubeops::tube_vector_gradient_T<double>(ctx, u, p.s, p.theta, p.sigma, p.tau);
}
inline double tube_divergence(const TubeContext& ctx, const TubeVectorField& u,
                              const TubePoint& p) {
    return tubeops::tube_divergence_T<double>(ctx, u, p.s, p.theta, p.sigma, p.tau);
}
inline double tube_scalar_laplacian(const TubeContext& ctx, const TubeScalarField& f,
                                    const TubePoint& p) {
    return tubeops::tube_scalar_laplacian_T<double>(ctx, f, p.s, p.theta, p.sigma, p.tau);
}
inline Vec3d tube_curl(const TubeContext& ctx, const TubeVectorField& u, const TubePoint& p) {
    return tubeops::tube_curl_T<double>(ctx, u, p.s, p.theta, p.sigma, p.tau);
}
inline Vec3d tube_vector_laplacian(const TubeContext& ctx, const TubeVectorField& u,
                                   const TubePoint& p) {
    return tubeops::tube_vector_laplacian_T<double>(ctx, u, p.s, p.theta, p.sigma, p.tau);
}

struct FrenetEvolution {
    double alpha, beta, gamma;
    Vec3d dtau_that, dtau_nhat, dtau_bhat;
};

FrenetEvolution dt_frenet(const CurveGeometry& c, const CurveMotion& m, double s, double tau);

// c1 = grad_s v_t - kappa v_n ; c2 = the second constraint including
// d tau kappa; both vanish for motion extracted from a genuine chart family.
std::array<double, 2> frenet_constraint_residuals(const CurveGeometry& c, const CurveMotion& m,
                                                  double s, double tau);

struct TubeFrameRates {
    double alpha_p, beta_p, gamma_p;  // rotated rates; gamma_p = gamma + d tau phi
    double a, b, c;                   // Cartesian rates of the tube frame
};

TubeFrameRates dt_tube_frame(const TubeContext& ctx, const CurveMotion& m, const TubePoint& p);

struct TubeCoordinateRates {
    double dt_s, dt_sigma, dt_theta;
};

TubeCoordinateRates dt_tube_coordinates(const TubeContext& ctx, const CurveMotion& m,
                                        const TubePoint& p);

double dt_scalar_tube(const TubeContext& ctx, const TubeScalarField& f, const CurveMotion& m,
                      const TubePoint& p);
Vec3d dt_vector_tube(const TubeContext& ctx, const TubeVectorField& u, const CurveMotion& m,
                     const TubePoint& p);

// d tau of the torsion from the closed-form expression (third s-derivatives
// of the velocity components).
double torsion_evolution(const CurveGeometry& c, const CurveMotion& m, double s, double tau);

}  // namespace sdcalc
