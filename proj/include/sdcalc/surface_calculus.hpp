#pragma once

// Exact differential operators in surface signed-distance coordinates,
// evaluated pointwise in the principal (Darboux) frame. Every operator is the
// literal frame expression; sub-derivatives come from dual lifting, so the
// only approximation anywhere is floating-point roundoff.

#include "sdcalc/closest_point.hpp"
#include "sdcalc/fields.hpp"
#include "sdcalc/surface_frames.hpp"

namespace sdcalc {

struct SurfacePoint {
    double s1 = 0.0, s2 = 0.0;
    double sigma = 0.0;
    double tau = 0.0;
};

// J = I - sigma K and friends, restricted to the tangent block with identity
// on nhat.
struct BoundaryJacobian {
    double sigma;
    Mat3d J, Jinv, Jhat, Jhat_inv;
    double detJ;   // (1 - sigma kappa1)(1 - sigma kappa2)
    Mat3d Pi;      // I - nhat (x) nhat
    Mat3d Khat;    // kappa2 t1(x)t1 + kappa1 t2(x)t2 (adjugate shape tensor)
};

namespace surfops {

template <class T>
struct JFactors {
    T f1, f2;  // 1 - sigma kappa_i
    T detJ;
};

template <class T>
JFactors<T> j_factors(const SurfaceFrame<T>& F, const T& sigma) {
    JFactors<T> j;
    j.f1 = 1.0 - sigma * F.kappa1;
    j.f2 = 1.0 - sigma * F.kappa2;
    if (!(primal(j.f1) > 0.0) || !(primal(j.f2) > 0.0))
        throw SingularJacobianError("sigma at or beyond a focal distance");
    j.detJ = j.f1 * j.f2;
    return j;
}

template <class T>
Vec3<T> tangential(const SurfaceFrame<T>& F, const SurfVec<T>& u) {
    return F.that1 * u.u1 + F.that2 * u.u2;
}
template <class T>
Vec3<T> ambient(const SurfaceFrame<T>& F, const SurfVec<T>& u) {
    return F.nhat * u.n + F.that1 * u.u1 + F.that2 * u.u2;
}

// d/dsigma of a callable g(sigma) at fixed (s, tau).
template <class T, class G>
auto dsigma(const T& sigma, G&& g) {
    using DT = Dual<T>;
    auto r = g(DT{sigma, T(1.0)});
    if constexpr (std::is_same_v<std::decay_t<decltype(r)>, DT>) {
        return r.dot;
    } else {
        return Vec3<T>{r.x.dot, r.y.dot, r.z.dot};
    }
}

// Scalar field helpers -----------------------------------------------------

template <class T>
T fval(const SurfaceGeometry& g, const SurfaceScalarField& f, const FrameGauge& gg, const T& sg,
       const T& a, const T& b, const T& tau) {
    return f.eval(g, &gg, sg, a, b, tau);
}

// Covariant surface gradient of the scalar field at (sigma, s).
template <class T>
Vec3<T> grad_perp(const SurfaceGeometry& g, const SurfaceScalarField& f, const FrameGauge& gg,
                  const SurfaceFrame<T>& F, const T& sg, const T& a, const T& b, const T& tau) {
    return surface_gradient_T<T>(F, a, b, [&](auto p, auto q) {
        using DT = std::decay_t<decltype(p)>;
        return fval<DT>(g, f, gg, DT(sg), p, q, DT(tau));
    });
}

// Arclength-normalized derivative along principal direction i at the frame's
// own point.
template <class T>
T grad_i(const SurfaceGeometry& g, const SurfaceScalarField& f, const FrameGauge& gg,
         const SurfaceFrame<T>& F, int i, const T& sg, const T& a, const T& b, const T& tau) {
    std::array<T, 2> w = param_velocity(F, i == 1 ? F.that1 : F.that2);
    return dir_deriv_scalar(a, b, w, [&](auto p, auto q) {
        using DT = std::decay_t<decltype(p)>;
        return fval<DT>(g, f, gg, DT(sg), p, q, DT(tau));
    });
}

// ---- gradient -------------------------------------------------------------

template <class T>
Vec3<T> gradient_T(const SurfaceGeometry& g, const SurfaceScalarField& f, const FrameGauge& gg,
                   const T& sg, const T& a, const T& b, const T& tau) {
    SurfaceFrame<T> F = surface_frame<T>(g, a, b, tau, &gg);
    JFactors<T> J = j_factors(F, sg);
    T dfd = dsigma(sg, [&](auto s) {
        using DT = std::decay_t<decltype(s)>;
        return fval<DT>(g, f, gg, s, DT(a), DT(b), DT(tau));
    });
    Vec3<T> gp = grad_perp(g, f, gg, F, sg, a, b, tau);
    // J^{-1} grad_perp: scale the principal components
    Vec3<T> t = F.that1 * (dot(gp, F.that1) / J.f1) + F.that2 * (dot(gp, F.that2) / J.f2);
    return F.nhat * dfd + t;
}

// ---- divergence -----------------------------------------------------------

template <class T>
T divergence_T(const SurfaceGeometry& g, const SurfaceVectorField& u, const FrameGauge& gg,
               const T& sg, const T& a, const T& b, const T& tau) {
    SurfaceFrame<T> F = surface_frame<T>(g, a, b, tau, &gg);
    JFactors<T> J = j_factors(F, sg);

    // d/dsigma (|J| u_sigma) at fixed s
    T term_n = dsigma(sg, [&](auto s) {
        using DT = std::decay_t<decltype(s)>;
        DT f1 = 1.0 - s * F.kappa1, f2 = 1.0 - s * F.kappa2;
        return f1 * f2 * u.eval(g, &gg, s, DT(a), DT(b), DT(tau)).n;
    });

    // grad_perp . (Jhat u_perp) at fixed sigma
    T term_t = surface_divergence_T<T>(F, a, b, [&](auto p, auto q) {
        using DT = std::decay_t<decltype(p)>;
        SurfaceFrame<DT> G = surface_frame<DT>(g, p, q, DT(tau), &gg);
        SurfVec<DT> uu = u.eval(g, &gg, DT(sg), p, q, DT(tau));
        DT f1 = 1.0 - sg * G.kappa1, f2 = 1.0 - sg * G.kappa2;
        return G.that1 * (f2 * uu.u1) + G.that2 * (f1 * uu.u2);
    });
    return (term_n + term_t) / J.detJ;
}

// ---- scalar Laplacian -------------------------------------------------------

template <class T>
T scalar_laplacian_T(const SurfaceGeometry& g, const SurfaceScalarField& f, const FrameGauge& gg,
                     const T& sg, const T& a, const T& b, const T& tau) {
    SurfaceFrame<T> F = surface_frame<T>(g, a, b, tau, &gg);
    JFactors<T> J = j_factors(F, sg);

    // d/dsigma (|J| d f/dsigma)
    T term_n = dsigma(sg, [&](auto s) {
        using DT = std::decay_t<decltype(s)>;
        DT f1 = 1.0 - s * F.kappa1, f2 = 1.0 - s * F.kappa2;
        DT df = dsigma(s, [&](auto s2) {
            using DT2 = std::decay_t<decltype(s2)>;
            return fval<DT2>(g, f, gg, s2, DT2(a), DT2(b), DT2(tau));
        });
        return f1 * f2 * df;
    });

    // grad_perp . (Jhat J^{-1} grad_perp f)
    T term_t = surface_divergence_T<T>(F, a, b, [&](auto p, auto q) {
        using DT = std::decay_t<decltype(p)>;
        SurfaceFrame<DT> G = surface_frame<DT>(g, p, q, DT(tau), &gg);
        DT f1 = 1.0 - sg * G.kappa1, f2 = 1.0 - sg * G.kappa2;
        Vec3<DT> gp = grad_perp<DT>(g, f, gg, G, DT(sg), p, q, DT(tau));
        return G.that1 * (dot(gp, G.that1) * f2 / f1) + G.that2 * (dot(gp, G.that2) * f1 / f2);
    });
    return (term_n + term_t) / J.detJ;
}

// ---- curl -------------------------------------------------------------------

// Jhat u^perp as an ambient vector at arbitrary (sigma', s'); u^perp is the
// rotated tangential part nhat x u_perp = -u2 that1 + u1 that2.
template <class T>
Vec3<T> jhat_urot(const SurfaceGeometry& g, const SurfaceVectorField& u, const FrameGauge& gg,
                  const SurfaceFrame<T>& G, const T& sg, const T& a, const T& b, const T& tau) {
    SurfVec<T> uu = u.eval(g, &gg, sg, a, b, tau);
    T f1 = 1.0 - sg * G.kappa1, f2 = 1.0 - sg * G.kappa2;
    return G.that1 * (-(f2 * uu.u2)) + G.that2 * (f1 * uu.u1);
}

template <class T>
Vec3<T> curl_T(const SurfaceGeometry& g, const SurfaceVectorField& u, const FrameGauge& gg,
               const T& sg, const T& a, const T& b, const T& tau) {
    SurfaceFrame<T> F = surface_frame<T>(g, a, b, tau, &gg);
    JFactors<T> J = j_factors(F, sg);

    // n-part: -grad_perp.(Jhat u^perp)/|J|
    T div_rot = surface_divergence_T<T>(F, a, b, [&](auto p, auto q) {
        using DT = std::decay_t<decltype(p)>;
        SurfaceFrame<DT> G = surface_frame<DT>(g, p, q, DT(tau), &gg);
        return jhat_urot<DT>(g, u, gg, G, DT(sg), p, q, DT(tau));
    });

    // d/dsigma (Jhat u^perp) - grad^perp u_sigma
    Vec3<T> dsig_rot = dsigma(sg, [&](auto s) {
        using DT = std::decay_t<decltype(s)>;
        SurfaceFrame<DT> FF = surface_frame<DT>(g, DT(a), DT(b), DT(tau), &gg);
        return jhat_urot<DT>(g, u, gg, FF, s, DT(a), DT(b), DT(tau));
    });
    auto u_sigma_field = [&](auto p, auto q) {
        using DT = std::decay_t<decltype(p)>;
        return u.eval(g, &gg, DT(sg), p, q, DT(tau)).n;
    };
    Vec3<T> gp_us = surface_gradient_T<T>(F, a, b, u_sigma_field);
    Vec3<T> rot_gp_us = cross(F.nhat, gp_us);
    Vec3<T> w = dsig_rot - rot_gp_us;
    // Jhat^{-1} applied to the tangential vector
    Vec3<T> t = F.that1 * (dot(w, F.that1) / J.f2) + F.that2 * (dot(w, F.that2) / J.f1);
    return F.nhat * (-(div_rot / J.detJ)) + t;
}

// ---- negative curl-curl (the divergence-free vector Laplacian) --------------

// G = Jhat J^{-1} (d/dsigma (J u_perp) - grad_perp u_sigma) at any (sigma', s').
template <class T>
Vec3<T> curlcurl_kernel(const SurfaceGeometry& g, const SurfaceVectorField& u,
                        const FrameGauge& gg, const T& sg, const T& a, const T& b, const T& tau) {
    SurfaceFrame<T> G = surface_frame<T>(g, a, b, tau, &gg);
    Vec3<T> ds_Ju = dsigma(sg, [&](auto s) {
        using DT = std::decay_t<decltype(s)>;
        SurfaceFrame<DT> GG = surface_frame<DT>(g, DT(a), DT(b), DT(tau), &gg);
        SurfVec<DT> uu = u.eval(g, &gg, s, DT(a), DT(b), DT(tau));
        DT f1 = 1.0 - s * GG.kappa1, f2 = 1.0 - s * GG.kappa2;
        return GG.that1 * (f1 * uu.u1) + GG.that2 * (f2 * uu.u2);
    });
    Vec3<T> gp_us = surface_gradient_T<T>(G, a, b, [&](auto p, auto q) {
        using DT = std::decay_t<decltype(p)>;
        return u.eval(g, &gg, DT(sg), p, q, DT(tau)).n;
    });
    Vec3<T> inner = ds_Ju - gp_us;
    T f1 = 1.0 - sg * G.kappa1, f2 = 1.0 - sg * G.kappa2;
    return G.that1 * (dot(inner, G.that1) * f2 / f1) + G.that2 * (dot(inner, G.that2) * f1 / f2);
}

template <class T>
Vec3<T> curl_curl_T(const SurfaceGeometry& g, const SurfaceVectorField& u, const FrameGauge& gg,
                    const T& sg, const T& a, const T& b, const T& tau) {
    SurfaceFrame<T> F = surface_frame<T>(g, a, b, tau, &gg);
    JFactors<T> J = j_factors(F, sg);

    T div_G = surface_divergence_T<T>(F, a, b, [&](auto p, auto q) {
        using DT = std::decay_t<decltype(p)>;
        return curlcurl_kernel<DT>(g, u, gg, DT(sg), p, q, DT(tau));
    });
    Vec3<T> ds_G = dsigma(sg, [&](auto s) {
        using DT = std::decay_t<decltype(s)>;
        return curlcurl_kernel<DT>(g, u, gg, s, DT(a), DT(b), DT(tau));
    });
    // rotated divergence of (J u_perp) over |J|, then its rotated gradient
    auto rotdiv_over_detJ = [&](auto p, auto q) {
        using DT = std::decay_t<decltype(p)>;
        SurfaceFrame<DT> G = surface_frame<DT>(g, p, q, DT(tau), &gg);
        DT f1 = 1.0 - sg * G.kappa1, f2 = 1.0 - sg * G.kappa2;
        // grad^perp . V = that2 . grad_1 V - that1 . grad_2 V
        auto Ju = [&](auto pp, auto qq) {
            using DT2 = std::decay_t<decltype(pp)>;
            SurfaceFrame<DT2> GG = surface_frame<DT2>(g, pp, qq, DT2(tau), &gg);
            SurfVec<DT2> uu = u.eval(g, &gg, DT2(sg), pp, qq, DT2(tau));
            DT2 ff1 = 1.0 - DT2(sg) * GG.kappa1, ff2 = 1.0 - DT2(sg) * GG.kappa2;
            return GG.that1 * (ff1 * uu.u1) + GG.that2 * (ff2 * uu.u2);
        };
        std::array<DT, 2> w1 = param_velocity(G, G.that1);
        std::array<DT, 2> w2 = param_velocity(G, G.that2);
        Vec3<DT> d1 = dir_deriv_vec(p, q, w1, Ju);
        Vec3<DT> d2 = dir_deriv_vec(p, q, w2, Ju);
        return (dot(G.that2, d1) - dot(G.that1, d2)) / (f1 * f2);
    };
    std::array<T, 2> w1 = param_velocity(F, F.that1);
    std::array<T, 2> w2 = param_velocity(F, F.that2);
    T h1 = dir_deriv_scalar(a, b, w1, rotdiv_over_detJ);
    T h2 = dir_deriv_scalar(a, b, w2, rotdiv_over_detJ);
    // grad^perp h = -that1 grad_2 h + that2 grad_1 h, then Jhat^{-1}
    Vec3<T> rot_grad_h = F.that1 * (-(h2 / J.f2)) + F.that2 * (h1 / J.f1);

    Vec3<T> t1 = F.that1 * (dot(ds_G, F.that1) / J.f2) + F.that2 * (dot(ds_G, F.that2) / J.f1);
    return F.nhat * (-(div_G / J.detJ)) + t1 + rot_grad_h;
}

// ---- vector Laplacian --------------------------------------------------------

template <class T>
Vec3<T> vector_laplacian_T(const SurfaceGeometry& g, const SurfaceVectorField& u,
                           const FrameGauge& gg, const T& sg, const T& a, const T& b,
                           const T& tau) {
    SurfaceFrame<T> F = surface_frame<T>(g, a, b, tau, &gg);
    JFactors<T> J = j_factors(F, sg);

    // divergence as a function of sigma at fixed s (for the n-part) and as a
    // function of s at fixed sigma (for the tangential gradients)
    auto div_at = [&](auto s, auto p, auto q) {
        using DT = std::decay_t<decltype(s)>;
        SurfaceFrame<DT> G = surface_frame<DT>(g, p, q, DT(tau), &gg);
        DT tn = dsigma(s, [&](auto s2) {
            using DT2 = std::decay_t<decltype(s2)>;
            SurfaceFrame<DT2> GG = surface_frame<DT2>(g, DT2(p), DT2(q), DT2(tau), &gg);
            DT2 f1 = 1.0 - s2 * GG.kappa1, f2 = 1.0 - s2 * GG.kappa2;
            return f1 * f2 * u.eval(g, &gg, s2, DT2(p), DT2(q), DT2(tau)).n;
        });
        DT tt = surface_divergence_T<DT>(G, p, q, [&](auto pp, auto qq) {
            using DT2 = std::decay_t<decltype(pp)>;
            SurfaceFrame<DT2> GG = surface_frame<DT2>(g, pp, qq, DT2(tau), &gg);
            SurfVec<DT2> uu = u.eval(g, &gg, DT2(s), pp, qq, DT2(tau));
            DT2 f1 = 1.0 - s * GG.kappa1, f2 = 1.0 - s * GG.kappa2;
            return GG.that1 * (f2 * uu.u1) + GG.that2 * (f1 * uu.u2);
        });
        DT f1 = 1.0 - s * G.kappa1, f2 = 1.0 - s * G.kappa2;
        return (tn + tt) / (f1 * f2);
    };

    // n-part: d/dsigma(div) - grad_perp.(G)/|J| with the same kernel as the
    // curl-curl operator
    T ds_div = dsigma(sg, [&](auto s) {
        using DT = std::decay_t<decltype(s)>;
        return div_at(s, DT(a), DT(b));
    });
    T div_G = surface_divergence_T<T>(F, a, b, [&](auto p, auto q) {
        using DT = std::decay_t<decltype(p)>;
        return curlcurl_kernel<DT>(g, u, gg, DT(sg), p, q, DT(tau));
    });

    // tangential pieces
    Vec3<T> ds_G = dsigma(sg, [&](auto s) {
        using DT = std::decay_t<decltype(s)>;
        return curlcurl_kernel<DT>(g, u, gg, s, DT(a), DT(b), DT(tau));
    });
    Vec3<T> t_dsG =
        F.that1 * (dot(ds_G, F.that1) / J.f2) + F.that2 * (dot(ds_G, F.that2) / J.f1);

    // J^{-1} grad_perp (d/dsigma(|J| u_sigma)/|J|)
    Vec3<T> gp_np = surface_gradient_T<T>(F, a, b, [&](auto p, auto q) {
        using DT = std::decay_t<decltype(p)>;
        SurfaceFrame<DT> G = surface_frame<DT>(g, p, q, DT(tau), &gg);
        DT tn = dsigma(DT(sg), [&](auto s2) {
            using DT2 = std::decay_t<decltype(s2)>;
            SurfaceFrame<DT2> GG = surface_frame<DT2>(g, DT2(p), DT2(q), DT2(tau), &gg);
            DT2 f1 = 1.0 - s2 * GG.kappa1, f2 = 1.0 - s2 * GG.kappa2;
            return f1 * f2 * u.eval(g, &gg, s2, DT2(p), DT2(q), DT2(tau)).n;
        });
        DT f1 = 1.0 - sg * G.kappa1, f2 = 1.0 - sg * G.kappa2;
        return tn / (f1 * f2);
    });
    Vec3<T> t_np = F.that1 * (dot(gp_np, F.that1) / J.f1) + F.that2 * (dot(gp_np, F.that2) / J.f2);

    // vector surface Laplacian: J^{-1} grad_perp (grad_perp.(Jhat u_perp)/|J|)
    //                        + Jhat^{-1} grad^perp (grad^perp.(J u_perp)/|J|)
    Vec3<T> gp_sdiv = surface_gradient_T<T>(F, a, b, [&](auto p, auto q) {
        using DT = std::decay_t<decltype(p)>;
        SurfaceFrame<DT> G = surface_frame<DT>(g, p, q, DT(tau), &gg);
        DT f1 = 1.0 - sg * G.kappa1, f2 = 1.0 - sg * G.kappa2;
        DT sdiv = surface_divergence_T<DT>(G, p, q, [&](auto pp, auto qq) {
            using DT2 = std::decay_t<decltype(pp)>;
            SurfaceFrame<DT2> GG = surface_frame<DT2>(g, pp, qq, DT2(tau), &gg);
            SurfVec<DT2> uu = u.eval(g, &gg, DT2(sg), pp, qq, DT2(tau));
            DT2 ff1 = 1.0 - DT2(sg) * GG.kappa1, ff2 = 1.0 - DT2(sg) * GG.kappa2;
            return GG.that1 * (ff2 * uu.u1) + GG.that2 * (ff1 * uu.u2);
        });
        return sdiv / (f1 * f2);
    });
    Vec3<T> slap1 =
        F.that1 * (dot(gp_sdiv, F.that1) / J.f1) + F.that2 * (dot(gp_sdiv, F.that2) / J.f2);

    auto rotdiv_Ju = [&](auto p, auto q) {
        using DT = std::decay_t<decltype(p)>;
        SurfaceFrame<DT> G = surface_frame<DT>(g, p, q, DT(tau), &gg);
        DT f1 = 1.0 - sg * G.kappa1, f2 = 1.0 - sg * G.kappa2;
        auto Ju = [&](auto pp, auto qq) {
            using DT2 = std::decay_t<decltype(pp)>;
            SurfaceFrame<DT2> GG = surface_frame<DT2>(g, pp, qq, DT2(tau), &gg);
            SurfVec<DT2> uu = u.eval(g, &gg, DT2(sg), pp, qq, DT2(tau));
            DT2 ff1 = 1.0 - DT2(sg) * GG.kappa1, ff2 = 1.0 - DT2(sg) * GG.kappa2;
            return GG.that1 * (ff1 * uu.u1) + GG.that2 * (ff2 * uu.u2);
        };
        std::array<DT, 2> w1 = param_velocity(G, G.that1);
        std::array<DT, 2> w2 = param_velocity(G, G.that2);
        Vec3<DT> d1 = dir_deriv_vec(p, q, w1, Ju);
        Vec3<DT> d2 = dir_deriv_vec(p, q, w2, Ju);
        return (dot(G.that2, d1) - dot(G.that1, d2)) / (f1 * f2);
    };
    std::array<T, 2> w1 = param_velocity(F, F.that1);
    std::array<T, 2> w2 = param_velocity(F, F.that2);
    T h1 = dir_deriv_scalar(a, b, w1, rotdiv_Ju);
    T h2 = dir_deriv_scalar(a, b, w2, rotdiv_Ju);
    Vec3<T> slap2 = F.that1 * (-(h2 / J.f2)) + F.that2 * (h1 / J.f1);

    return F.nhat * (ds_div - div_G / J.detJ) + t_dsG + t_np + slap1 + slap2;
}

// ---- vector gradient ----------------------------------------------------------

template <class T>
Mat3<T> vector_gradient_T(const SurfaceGeometry& g, const SurfaceVectorField& u,
                          const FrameGauge& gg, const T& sg, const T& a, const T& b,
                          const T& tau) {
    SurfaceFrame<T> F = surface_frame<T>(g, a, b, tau, &gg);
    JFactors<T> J = j_factors(F, sg);
    Mat3<T> K = F.shape_tensor();
    Mat3<T> Pi = F.projector();
    Mat3<T> Jinv = outer(F.nhat, F.nhat) + outer(F.that1, F.that1) / J.f1 +
                   outer(F.that2, F.that2) / J.f2;

    SurfVec<T> uu = u.eval(g, &gg, sg, a, b, tau);
    Vec3<T> u_perp = tangential(F, uu);

    T ds_un = dsigma(sg, [&](auto s) {
        using DT = std::decay_t<decltype(s)>;
        return u.eval(g, &gg, s, DT(a), DT(b), DT(tau)).n;
    });
    Vec3<T> ds_uperp = dsigma(sg, [&](auto s) {
        using DT = std::decay_t<decltype(s)>;
        SurfVec<DT> v = u.eval(g, &gg, s, DT(a), DT(b), DT(tau));
        // the frame is sigma-independent
        return promote_vec<DT>(F.that1) * v.u1 + promote_vec<DT>(F.that2) * v.u2;
    });

    Vec3<T> gp_un = surface_gradient_T<T>(F, a, b, [&](auto p, auto q) {
        using DT = std::decay_t<decltype(p)>;
        return u.eval(g, &gg, DT(sg), p, q, DT(tau)).n;
    });
    Mat3<T> gp_uperp = surface_vector_gradient_T<T>(F, a, b, [&](auto p, auto q) {
        using DT = std::decay_t<decltype(p)>;
        SurfaceFrame<DT> G = surface_frame<DT>(g, p, q, DT(tau), &gg);
        SurfVec<DT> v = u.eval(g, &gg, DT(sg), p, q, DT(tau));
        return G.that1 * v.u1 + G.that2 * v.u2;
    });

    Mat3<T> first = outer(F.nhat, F.nhat * ds_un + ds_uperp);
    Mat3<T> second = outer(gp_un + matvec(K, u_perp), F.nhat) + matmul(gp_uperp, Pi) - K * uu.n;
    return first + matmul(Jinv, second);
}

// ---- convective derivative -----------------------------------------------------

template <class T>
Vec3<T> convective_T(const SurfaceGeometry& g, const SurfaceVectorField& u, const FrameGauge& gg,
                     const T& sg, const T& a, const T& b, const T& tau) {
    SurfaceFrame<T> F = surface_frame<T>(g, a, b, tau, &gg);
    JFactors<T> J = j_factors(F, sg);
    Mat3<T> K = F.shape_tensor();
    Mat3<T> Pi = F.projector();
    Mat3<T> Jinv = outer(F.nhat, F.nhat) + outer(F.that1, F.that1) / J.f1 +
                   outer(F.that2, F.that2) / J.f2;

    SurfVec<T> uu = u.eval(g, &gg, sg, a, b, tau);
    Vec3<T> u_perp = tangential(F, uu);

    T ds_un = dsigma(sg, [&](auto s) {
        using DT = std::decay_t<decltype(s)>;
        return u.eval(g, &gg, s, DT(a), DT(b), DT(tau)).n;
    });
    Vec3<T> ds_uperp = dsigma(sg, [&](auto s) {
        using DT = std::decay_t<decltype(s)>;
        SurfVec<DT> v = u.eval(g, &gg, s, DT(a), DT(b), DT(tau));
        return promote_vec<DT>(F.that1) * v.u1 + promote_vec<DT>(F.that2) * v.u2;
    });

    Vec3<T> gp_un = surface_gradient_T<T>(F, a, b, [&](auto p, auto q) {
        using DT = std::decay_t<decltype(p)>;
        return u.eval(g, &gg, DT(sg), p, q, DT(tau)).n;
    });
    Mat3<T> gp_uperp = surface_vector_gradient_T<T>(F, a, b, [&](auto p, auto q) {
        using DT = std::decay_t<decltype(p)>;
        SurfaceFrame<DT> G = surface_frame<DT>(g, p, q, DT(tau), &gg);
        SurfVec<DT> v = u.eval(g, &gg, DT(sg), p, q, DT(tau));
        return G.that1 * v.u1 + G.that2 * v.u2;
    });

    Vec3<T> uJ = matvec(Jinv, u_perp);  // J^{-1} symmetric: u_perp . J^{-1} = J^{-1} u_perp
    T n_coeff = uu.n * ds_un + dot(uJ, gp_un + matvec(K, u_perp));
    Vec3<T> tang = ds_uperp * uu.n + vecmat(uJ, matmul(gp_uperp, Pi) - K * uu.n);
    return F.nhat * n_coeff + tang;
}

}  // namespace surfops

// ---- public double-precision operators -----------------------------------

inline BoundaryJacobian jacobian(const SurfaceGeometry& geom, const SurfacePoint& pt) {
    SurfaceFrame<double> F = surface_frame<double>(geom, pt.s1, pt.s2, pt.tau);
    surfops::JFactors<double> J = surfops::j_factors(F, pt.sigma);
    BoundaryJacobian out;
    out.sigma = pt.sigma;
    Mat3d nn = outer(F.nhat, F.nhat);
    Mat3d t11 = outer(F.that1, F.that1), t22 = outer(F.that2, F.that2);
    out.J = nn + t11 * J.f1 + t22 * J.f2;
    out.Jinv = nn + t11 * (1.0 / J.f1) + t22 * (1.0 / J.f2);
    out.Jhat = nn + t11 * J.f2 + t22 * J.f1;
    out.Jhat_inv = nn + t11 * (1.0 / J.f2) + t22 * (1.0 / J.f1);
    out.detJ = J.detJ;
    out.Pi = F.projector();
    out.Khat = t11 * F.kappa2 + t22 * F.kappa1;
    return out;
}

// dV factor |J| |t1 x t2|; equals the triple product of the transform
// tangents for any chart (orthogonal or not).
inline double volume_measure(const SurfaceGeometry& geom, const SurfacePoint& pt) {
    SurfaceFrame<double> F = surface_frame<double>(geom, pt.s1, pt.s2, pt.tau);
    surfops::JFactors<double> J = surfops::j_factors(F, pt.sigma);
    return J.detJ * norm(cross(F.t1, F.t2));
}

namespace detail {
inline FrameGauge base_gauge(const SurfaceGeometry& geom, const SurfacePoint& pt) {
    SurfaceFrame<double> F = surface_frame<double>(geom, pt.s1, pt.s2, pt.tau);
    return FrameGauge{F.that1};
}
}  // namespace detail

inline Vec3d gradient(const SurfaceGeometry& geom, const SurfaceScalarField& f,
                      const SurfacePoint& pt) {
    FrameGauge gg = detail::base_gauge(geom, pt);
    return surfops::gradient_T<double>(geom, f, gg, pt.sigma, pt.s1, pt.s2, pt.tau);
}

inline double divergence(const SurfaceGeometry& geom, const SurfaceVectorField& u,
                         const SurfacePoint& pt) {
    FrameGauge gg = detail::base_gauge(geom, pt);
    return surfops::divergence_T<double>(geom, u, gg, pt.sigma, pt.s1, pt.s2, pt.tau);
}

inline double scalar_laplacian(const SurfaceGeometry& geom, const SurfaceScalarField& f,
                               const SurfacePoint& pt) {
    FrameGauge gg = detail::base_gauge(geom, pt);
    return surfops::scalar_laplacian_T<double>(geom, f, gg, pt.sigma, pt.s1, pt.s2, pt.tau);
}

inline Vec3d curl(const SurfaceGeometry& geom, const SurfaceVectorField& u,
                  const SurfacePoint& pt) {
    FrameGauge gg = detail::base_gauge(geom, pt);
    return surfops::curl_T<double>(geom, u, gg, pt.sigma, pt.s1, pt.s2, pt.tau);
}

// The boxed -curl curl u (equals vector_laplacian - gradient(divergence)).
inline Vec3d curl_curl(const SurfaceGeometry& geom, const SurfaceVectorField& u,
                       const SurfacePoint& pt) {
    FrameGauge gg = detail::base_gauge(geom, pt);
    return surfops::curl_curl_T<double>(geom, u, gg, pt.sigma, pt.s1, pt.s2, pt.tau);
}

inline Vec3d vector_laplacian(const SurfaceGeometry& geom, const SurfaceVectorField& u,
                              const SurfacePoint& pt) {
    FrameGauge gg = detail::base_gauge(geom, pt);
    return surfops::vector_laplacian_T<double>(geom, u, gg, pt.sigma, pt.s1, pt.s2, pt.tau);
}

inline Mat3d vector_gradient(const SurfaceGeometry& geom, const SurfaceVectorField& u,
                             const SurfacePoint& pt) {
    FrameGauge gg = detail::base_gauge(geom, pt);
    return surfops::vector_gradient_T<double>(geom, u, gg, pt.sigma, pt.s1, pt.s2, pt.tau);
}

inline Vec3d convective_derivative(const SurfaceGeometry& geom, const SurfaceVectorField& u,
                                   const SurfacePoint& pt) {
    FrameGauge gg = detail::base_gauge(geom, pt);
    return surfops::convective_T<double>(geom, u, gg, pt.sigma, pt.s1, pt.s2, pt.tau);
}

// Hessian: the full nine-term frame expansion. Requires rotation
// coefficients; at umbilic points the chart pair with its own rotation
// coefficients is used (the curvature factors coincide there, so the
// expansion remains exact on all-umbilic geometries).
Mat3d hessian(const SurfaceGeometry& geom, const SurfaceScalarField& f, const SurfacePoint& pt);

// Residuals of [d_sigma, grad_1], [d_sigma, grad_2], [grad_1, grad_2] applied
// to a probe field, minus the closed-form right-hand sides; all approach 0.
std::array<double, 3> commutator_residuals(const SurfaceGeometry& geom,
                                           const SurfaceScalarField& probe,
                                           const SurfacePoint& pt);

}  // namespace sdcalc
