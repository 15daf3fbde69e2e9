#pragma once

// Intrinsic surface geometry at sigma = 0: tangent basis, metric, Gauss map,
// shape operator, principal curvatures/directions, rotation coefficients and
// the classical compatibility identities. Everything is templated on the
// scalar type so directional derivatives of any derived quantity come from
// dual-number lifting; charts are never assumed orthogonal or aligned with
// curvature lines.

#include <array>
#include <limits>

#include "sdcalc/chart.hpp"
#include "sdcalc/vec.hpp"

namespace sdcalc {

// Sign reference for the principal-direction field. Eigenvectors are defined
// up to sign; derivatives of the direction field need one smooth branch, so
// nested evaluations around a base point share the base point's choice.
struct FrameGauge {
    Vec3d ref{1.0, 0.0, 0.0};
};

template <class T>
struct SurfaceFrame {
    Vec3<T> p, t1, t2;          // position and raw chart tangents
    T g11, g12, g22;            // first fundamental form
    T gi11, gi12, gi22;         // inverse metric
    Vec3<T> nhat;               // t1 x t2 normalized
    Vec3<T> e1, e2;             // Gram-Schmidt orthonormal tangent pair
    Vec3<T> that1, that2;       // principal unit directions (e-pair at umbilics)
    T kappa1, kappa2;           // principal curvatures, kappa1 >= kappa2
    bool umbilic = false;

    Mat3<T> shape_tensor() const {
        return outer(that1, that1) * kappa1 + outer(that2, that2) * kappa2;
    }
    Mat3<T> projector() const { return Mat3<T>::identity() - outer(nhat, nhat); }
};

namespace detail {

// Default gauge reference: a fixed generic combination of the chart pair, so
// the sign branch does not flip on the symmetry loci of common charts.
inline Vec3d default_gauge_ref(const Vec3d& e1, const Vec3d& e2) {
    return e1 + 0.6180339887498949 * e2;
}

}  // namespace detail

template <class T>
SurfaceFrame<T> surface_frame(const SurfaceGeometry& geom, const T& s1, const T& s2, const T& tau,
                              const FrameGauge* gauge = nullptr) {
    const SurfaceChart& chart = geom.chart();
    SurfaceFrame<T> F;
    F.p = chart.deriv(0, 0, 0, s1, s2, tau);
    F.t1 = chart.deriv(1, 0, 0, s1, s2, tau);
    F.t2 = chart.deriv(0, 1, 0, s1, s2, tau);
    Vec3<T> p11 = chart.deriv(2, 0, 0, s1, s2, tau);
    Vec3<T> p12 = chart.deriv(1, 1, 0, s1, s2, tau);
    Vec3<T> p22 = chart.deriv(0, 2, 0, s1, s2, tau);

    Vec3<T> w = cross(F.t1, F.t2);
    T wn = norm(w);
    {
        using std::sqrt;
        double scale = std::sqrt(primal(norm2(F.t1)) * primal(norm2(F.t2)));
        if (!(primal(wn) > 1e-12 * scale))
            throw DomainError("degenerate tangents: chart is not an immersion here");
    }
    F.nhat = w / wn;

    F.g11 = dot(F.t1, F.t1);
    F.g12 = dot(F.t1, F.t2);
    F.g22 = dot(F.t2, F.t2);
    T gdet = F.g11 * F.g22 - F.g12 * F.g12;
    F.gi11 = F.g22 / gdet;
    F.gi12 = -F.g12 / gdet;
    F.gi22 = F.g11 / gdet;

    // Gauss map derivatives from the chart jets.
    Vec3<T> dw1 = cross(p11, F.t2) + cross(F.t1, p12);
    Vec3<T> dw2 = cross(p12, F.t2) + cross(F.t1, p22);
    Vec3<T> dn1 = dw1 / wn - w * (dot(w, dw1) / (wn * wn * wn));
    Vec3<T> dn2 = dw2 / wn - w * (dot(w, dw2) / (wn * wn * wn));

    // grad_perp nhat = g^{ij} t_i (x) dn_j, symmetrized and projected; the
    // shape tensor is its negative.
    Mat3<T> M = outer(F.t1 * F.gi11 + F.t2 * F.gi12, dn1) +
                outer(F.t1 * F.gi12 + F.t2 * F.gi22, dn2);
    Mat3<T> Ksym = (M + transpose(M)) * (-0.5);
    Mat3<T> P = Mat3<T>::identity() - outer(F.nhat, F.nhat);
    Mat3<T> K = matmul(P, matmul(Ksym, P));

    F.e1 = normalized(F.t1);
    Vec3<T> e2raw = F.t2 - F.e1 * dot(F.t2, F.e1);
    F.e2 = normalized(e2raw);

    T k11 = dot(F.e1, matvec(K, F.e1));
    T k12 = dot(F.e1, matvec(K, F.e2));
    T k22 = dot(F.e2, matvec(K, F.e2));
    T mean = (k11 + k22) * 0.5;
    T hh = (k11 - k22) * 0.5;
    T disc2 = hh * hh + k12 * k12;

    double discp = std::sqrt(std::max(0.0, primal(disc2)));
    double k1p = primal(mean) + discp, k2p = primal(mean) - discp;
    double umb_tol = 1e-8 * std::max({1.0, std::abs(k1p), std::abs(k2p)});

    if (discp <= umb_tol) {
        // Umbilic: direction pair is arbitrary; keep the chart pair. The gap
        // is treated as exactly zero so curvature derivatives stay smooth on
        // all-umbilic geometries (sphere, plane).
        F.umbilic = true;
        F.kappa1 = mean;
        F.kappa2 = mean;
        F.that1 = F.e1;
        F.that2 = cross(F.nhat, F.that1);
    } else {
        using std::sqrt;
        T disc = sqrt(disc2);
        F.kappa1 = mean + disc;
        F.kappa2 = mean - disc;
        // eigenvector of the larger eigenvalue in the (e1, e2) basis
        T c1, c2;
        if (std::abs(primal(k12)) + std::abs(k1p - primal(k11)) >
            std::abs(primal(k12)) + std::abs(k1p - primal(k22))) {
            c1 = k12;
            c2 = F.kappa1 - k11;
        } else {
            c1 = F.kappa1 - k22;
            c2 = k12;
        }
        T cn = sqrt(c1 * c1 + c2 * c2);
        c1 = c1 / cn;
        c2 = c2 / cn;
        F.that1 = F.e1 * c1 + F.e2 * c2;
        Vec3d ref = gauge ? gauge->ref : detail::default_gauge_ref(primal(F.e1), primal(F.e2));
        if (primal(dot(F.that1, constant_vec<T>(ref))) < 0.0) F.that1 = -F.that1;
        F.that2 = cross(F.nhat, F.that1);
    }
    F.kappa1 = F.kappa1 + geom.kappa1_fault;
    return F;
}

// ---- directional derivative helpers -----------------------------------

// Chart-parameter velocity of a unit tangent direction: w with
// w1 t1 + w2 t2 = dir.
template <class T>
std::array<T, 2> param_velocity(const SurfaceFrame<T>& F, const Vec3<T>& dir) {
    T b1 = dot(dir, F.t1), b2 = dot(dir, F.t2);
    return {F.gi11 * b1 + F.gi12 * b2, F.gi12 * b1 + F.gi22 * b2};
}

// g: (s1, s2) -> scalar; derivative along the parameter velocity w.
template <class T, class G>
T dir_deriv_scalar(const T& s1, const T& s2, const std::array<T, 2>& w, G&& g) {
    using DT = Dual<T>;
    DT r = g(DT{s1, w[0]}, DT{s2, w[1]});
    return r.dot;
}

template <class T, class G>
Vec3<T> dir_deriv_vec(const T& s1, const T& s2, const std::array<T, 2>& w, G&& g) {
    using DT = Dual<T>;
    Vec3<DT> r = g(DT{s1, w[0]}, DT{s2, w[1]});
    return {r.x.dot, r.y.dot, r.z.dot};
}

// Surface gradient of a scalar function of the chart parameters,
// grad_perp f = g^{ij} (df/ds_j) t_i. Valid for non-orthogonal charts.
template <class T, class G>
Vec3<T> surface_gradient_T(const SurfaceFrame<T>& F, const T& s1, const T& s2, G&& g) {
    T d1 = dir_deriv_scalar(s1, s2, {T(1.0), T(0.0)}, g);
    T d2 = dir_deriv_scalar(s1, s2, {T(0.0), T(1.0)}, g);
    return (F.t1 * F.gi11 + F.t2 * F.gi12) * d1 + (F.t1 * F.gi12 + F.t2 * F.gi22) * d2;
}

// Surface divergence of an ambient-vector-valued function of the chart
// parameters, grad_perp . W = g^{ij} t_i . dW/ds_j.
template <class T, class G>
T surface_divergence_T(const SurfaceFrame<T>& F, const T& s1, const T& s2, G&& g) {
    Vec3<T> d1 = dir_deriv_vec(s1, s2, {T(1.0), T(0.0)}, g);
    Vec3<T> d2 = dir_deriv_vec(s1, s2, {T(0.0), T(1.0)}, g);
    return F.gi11 * dot(F.t1, d1) + F.gi12 * (dot(F.t1, d2) + dot(F.t2, d1)) +
           F.gi22 * dot(F.t2, d2);
}

// Full surface gradient tensor grad_perp (x) W = g^{ij} t_i (x) dW/ds_j.
template <class T, class G>
Mat3<T> surface_vector_gradient_T(const SurfaceFrame<T>& F, const T& s1, const T& s2, G&& g) {
    Vec3<T> d1 = dir_deriv_vec(s1, s2, {T(1.0), T(0.0)}, g);
    Vec3<T> d2 = dir_deriv_vec(s1, s2, {T(0.0), T(1.0)}, g);
    return outer(F.t1 * F.gi11 + F.t2 * F.gi12, d1) + outer(F.t1 * F.gi12 + F.t2 * F.gi22, d2);
}

// Rotation coefficients of the principal frame, omega1 = (grad_1 that1).that2
// and omega2 = -(grad_2 that2).that1, by differentiating the direction field.
template <class T>
std::array<T, 2> rotation_coeffs_T(const SurfaceGeometry& geom, const SurfaceFrame<T>& F,
                                   const T& s1, const T& s2, const T& tau,
                                   const FrameGauge& gauge) {
    using DT = Dual<T>;
    auto that_field = [&](int which) {
        return [&geom, &gauge, which, &tau](DT a, DT b) {
            SurfaceFrame<DT> G = surface_frame<DT>(geom, a, b, DT(tau), &gauge);
            return which == 1 ? G.that1 : G.that2;
        };
    };
    std::array<T, 2> w1 = param_velocity(F, F.that1);
    std::array<T, 2> w2 = param_velocity(F, F.that2);
    Vec3<T> d1t1 = dir_deriv_vec(s1, s2, w1, that_field(1));
    Vec3<T> d2t2 = dir_deriv_vec(s1, s2, w2, that_field(2));
    return {dot(d1t1, F.that2), -dot(d2t2, F.that1)};
}

// ---- double-precision public surface API ------------------------------

struct DarbouxFrame {
    Vec3d p;
    Vec3d nhat, that1, that2;
    Vec3d t1, t2;
    double g11, g12, g22;
    bool umbilic;
};

struct CurvatureData {
    double kappa1, kappa2;        // kappa1 >= kappa2
    Mat3d K;                      // shape tensor, symmetric, K nhat = 0
    bool K_symmetric;             // construction check of the symmetric flag
    double mean;                  // (kappa1 + kappa2)/2
    double sum;                   // kappa1 + kappa2
    double gauss;                 // kappa1 * kappa2, exact by construction
    double sum_sq;                // kappa1^2 + kappa2^2
    double omega1, omega2;        // rotation coefficients; NaN when umbilic
    bool umbilic;
};

inline DarbouxFrame tangent_basis(const SurfaceGeometry& geom, double s1, double s2,
                                  double tau = 0.0, const FrameGauge* gauge = nullptr) {
    SurfaceFrame<double> F = surface_frame<double>(geom, s1, s2, tau, gauge);
    return {F.p, F.nhat, F.that1, F.that2, F.t1, F.t2, F.g11, F.g12, F.g22, F.umbilic};
}

inline CurvatureData shape_operator(const SurfaceGeometry& geom, double s1, double s2,
                                    double tau = 0.0, const FrameGauge* gauge = nullptr) {
    SurfaceFrame<double> F = surface_frame<double>(geom, s1, s2, tau, gauge);
    CurvatureData c;
    c.kappa1 = F.kappa1;
    c.kappa2 = F.kappa2;
    c.K = F.shape_tensor();
    c.K_symmetric = max_abs(c.K - transpose(c.K)) < 1e-12;
    c.mean = 0.5 * (F.kappa1 + F.kappa2);
    c.sum = F.kappa1 + F.kappa2;
    c.gauss = F.kappa1 * F.kappa2;
    c.sum_sq = F.kappa1 * F.kappa1 + F.kappa2 * F.kappa2;
    c.umbilic = F.umbilic;
    if (F.umbilic) {
        c.omega1 = std::numeric_limits<double>::quiet_NaN();
        c.omega2 = std::numeric_limits<double>::quiet_NaN();
    } else {
        FrameGauge g{gauge ? gauge->ref : primal(F.that1)};
        auto om = rotation_coeffs_T<double>(geom, F, s1, s2, tau, g);
        c.omega1 = om[0];
        c.omega2 = om[1];
    }
    return c;
}

// Rotation coefficients as a standalone operation; umbilic points are
// reported through the flag with NaN values.
inline std::array<double, 2> rotation_coefficients(const SurfaceGeometry& geom, double s1,
                                                   double s2, double tau, bool& umbilic,
                                                   const FrameGauge* gauge = nullptr) {
    CurvatureData c = shape_operator(geom, s1, s2, tau, gauge);
    umbilic = c.umbilic;
    return {c.omega1, c.omega2};
}

// grad_perp of a scalar field given as a generic callable f(s1, s2).
template <class G>
Vec3d surface_gradient(const SurfaceGeometry& geom, double s1, double s2, G&& f,
                       double tau = 0.0) {
    SurfaceFrame<double> F = surface_frame<double>(geom, s1, s2, tau);
    return surface_gradient_T<double>(F, s1, s2, [&](auto a, auto b) { return f(a, b); });
}

// grad_perp . u of a tangent field given as a generic ambient-valued
// callable u(s1, s2). Works at umbilics (no rotation coefficients involved);
// at non-umbilic points it equals grad_1 u1 + grad_2 u2 + omega2 u1 -
// omega1 u2, which the tests assert.
template <class G>
double surface_divergence(const SurfaceGeometry& geom, double s1, double s2, G&& u,
                          double tau = 0.0) {
    SurfaceFrame<double> F = surface_frame<double>(geom, s1, s2, tau);
    double tol = 1e-8 * std::max(1.0, norm(primal(u(s1, s2))));
    if (std::abs(dot(primal(u(s1, s2)), F.nhat)) > tol)
        throw DomainError("surface_divergence: field is not tangent");
    return surface_divergence_T<double>(F, s1, s2, [&](auto a, auto b) { return u(a, b); });
}

// Codazzi-Mainardi and Theorema Egregium residuals (all approach zero).
inline std::array<double, 3> codazzi_egregium_residuals(const SurfaceGeometry& geom, double s1,
                                                        double s2, double tau = 0.0) {
    SurfaceFrame<double> F = surface_frame<double>(geom, s1, s2, tau);
    if (F.umbilic) throw UmbilicError("codazzi residuals undefined at an umbilic point");
    FrameGauge gauge{primal(F.that1)};

    auto kappa_field = [&](int which) {
        return [&geom, &gauge, which, tau](auto a, auto b) {
            using TT = std::decay_t<decltype(a)>;
            SurfaceFrame<TT> G = surface_frame<TT>(geom, a, b, TT(tau), &gauge);
            return which == 1 ? G.kappa1 : G.kappa2;
        };
    };
    auto omega_field = [&](int which) {
        return [&geom, &gauge, which, tau](auto a, auto b) {
            using TT = std::decay_t<decltype(a)>;
            SurfaceFrame<TT> G = surface_frame<TT>(geom, a, b, TT(tau), &gauge);
            auto om = rotation_coeffs_T<TT>(geom, G, a, b, TT(tau), gauge);
            return which == 1 ? om[0] : om[1];
        };
    };

    std::array<double, 2> w1 = param_velocity(F, F.that1);
    std::array<double, 2> w2 = param_velocity(F, F.that2);
    auto om = rotation_coeffs_T<double>(geom, F, s1, s2, tau, gauge);

    double d2k1 = dir_deriv_scalar(s1, s2, w2, kappa_field(1));
    double d1k2 = dir_deriv_scalar(s1, s2, w1, kappa_field(2));
    double d1om2 = dir_deriv_scalar(s1, s2, w1, omega_field(2));
    double d2om1 = dir_deriv_scalar(s1, s2, w2, omega_field(1));

    double r1 = d2k1 - om[0] * (F.kappa1 - F.kappa2);
    double r2 = d1k2 - om[1] * (F.kappa1 - F.kappa2);
    double r3 = d1om2 - d2om1 + om[0] * om[0] + om[1] * om[1] + F.kappa1 * F.kappa2;
    return {r1, r2, r3};
}

}  // namespace sdcalc
