#pragma once

// Frenet-Serret frame, torsion-compensated Bishop rotation, and the
// orthogonal tube coordinate system around a space curve.

#include <memory>
#include <vector>

#include "sdcalc/chart.hpp"
#include "sdcalc/vec.hpp"

namespace sdcalc {

template <class T>
struct FrenetFrameT {
    Vec3<T> p;
    Vec3<T> that, nhat, bhat;  // right-handed orthonormal triple
    T speed;                   // |dp/ds|, the arclength factor
    T kappa;                   // curvature >= 0
    T omega;                   // torsion
    bool straight = false;     // curvature below tolerance; normal chosen freely
};

// Frenet frame with the straight-segment fallback: below the curvature
// tolerance the normal is carried over from `prev_normal` (or a fixed axis)
// and kappa, omega are reported as zero.
template <class T>
FrenetFrameT<T> frenet_frame(const CurveGeometry& geom, const T& s, const T& tau,
                             const Vec3d* prev_normal = nullptr) {
    using std::sqrt;
    const CurveChart& chart = geom.chart();
    FrenetFrameT<T> F;
    F.p = chart.deriv(0, 0, s, tau);
    Vec3<T> d1 = chart.deriv(1, 0, s, tau);
    Vec3<T> d2 = chart.deriv(2, 0, s, tau);
    Vec3<T> d3 = chart.deriv(3, 0, s, tau);

    F.speed = norm(d1);
    if (!(primal(F.speed) > 0.0)) throw DomainError("curve chart has vanishing tangent");
    F.that = d1 / F.speed;

    // grad_s that = (1/|t|) d(that)/ds
    Vec3<T> dthat = d2 / F.speed - d1 * (dot(d1, d2) / (F.speed * F.speed * F.speed));
    Vec3<T> grads_that = dthat / F.speed;
    T kappa2 = norm2(grads_that);

    if (primal(kappa2) < 1e-24) {
        F.straight = true;
        F.kappa = T(0.0);
        F.omega = T(0.0);
        Vec3d tp = primal(F.that);
        Vec3d ref = prev_normal ? *prev_normal
                                : (std::abs(tp.z) < 0.9 ? Vec3d{0, 0, 1} : Vec3d{0, 1, 0});
        Vec3<T> r = constant_vec<T>(ref);
        Vec3<T> n = r - F.that * dot(r, F.that);
        F.nhat = normalized(n);
        F.bhat = cross(F.that, F.nhat);
        return F;
    }

    F.kappa = sqrt(kappa2);
    F.nhat = grads_that / F.kappa;
    F.bhat = cross(F.that, F.nhat);
    // torsion from the standard closed form (p' x p'') . p''' / |p' x p''|^2
    Vec3<T> c = cross(d1, d2);
    F.omega = dot(c, d3) / norm2(c);
    F.kappa = F.kappa + geom.kappa_fault;
    return F;
}

// Bishop angle phi(s): the counter-rotation with grad_s phi = -omega that
// makes tube coordinates orthogonal. The table comes from RK4 integration of
// dphi/ds = -omega(s) |t(s)| with Richardson step-doubling; pointwise values
// interpolate with cubic Hermite segments, while derivatives of any order
// come from the exact ODE right-hand side, so downstream AD sees the true
// dphi/ds.
class BishopAngle {
public:
    BishopAngle(const CurveGeometry& geom, double tau, double phi0, int min_samples = 512);

    double tau() const { return tau_; }
    double phi0() const { return phi0_; }
    int samples() const { return static_cast<int>(phi_.size()) - 1; }
    double integration_error() const { return err_; }
    // phi(hi) - phi(lo): the angle by which the Bishop frame fails to close
    // on a loop (reported, not resolved).
    double loop_mismatch() const { return phi_.back() - phi_.front(); }

    double phi_at(double s) const;
    double dphi_ds(double s) const;

    template <class T>
    T phi(const T& s) const {
        if constexpr (is_dual<T>::value) {
            return T{phi(s.val), rhs_T(s.val) * s.dot};
        } else if constexpr (std::is_same_v<T, Series>) {
            if (s.has_singular_part()) throw DomainError("bishop angle of singular series");
            Series h = s.high_part();
            if (h.is_zero()) return Series(phi_at(s.const_part()));
            // Taylor around the constant part using nested-dual derivatives
            double s0 = s.const_part();
            double c0 = phi_at(s0);
            double c1 = rhs_T(s0);
            double c2 = derivative([&](auto u) { return rhs_T(u); }, s0);
            D1 sd{s0, 1.0};
            double c3 = derivative([&](auto u) { return rhs_T(u); }, sd).dot;
            Series acc = Series(c0) + c1 * h + (c2 / 2.0) * h * h + (c3 / 6.0) * h * h * h;
            return acc;
        } else {
            return T(phi_at(s));
        }
    }

private:
    template <class U>
    U rhs_T(const U& s) const {
        FrenetFrameT<U> F = frenet_frame<U>(geom_, s, U(tau_));
        return -(F.omega * F.speed);
    }

    CurveGeometry geom_;
    double tau_, phi0_;
    double err_ = 0.0;
    double lo_ = 0.0, h_ = 0.0;
    std::vector<double> phi_, dphi_;
};

// Curve geometry + Bishop table + evaluation time: everything tube operators
// need. `bishop == nullptr` means the rotation is disabled (phi = 0), the
// non-orthogonal negative control. For evolving curves the tau variation of
// phi has no closed form; it is carried as a central-difference pair of
// re-integrated tables at tau +- dtau_fd.
struct TubeContext {
    const CurveGeometry* curve = nullptr;
    const BishopAngle* bishop = nullptr;
    const BishopAngle* bishop_plus = nullptr;   // integrated at tau + dtau_fd
    const BishopAngle* bishop_minus = nullptr;  // integrated at tau - dtau_fd
    double tau = 0.0;
    double dtau_fd = 1e-5;

    template <class T>
    T phi(const T& s) const {
        return bishop ? bishop->template phi<T>(s) : T(0.0);
    }

    // d(phi)/dtau at fixed s from the finite-difference family (0 when the
    // family is absent, i.e. a static curve).
    template <class T>
    T dphi_dtau(const T& s) const {
        if (!bishop_plus || !bishop_minus) return T(0.0);
        return (bishop_plus->template phi<T>(s) - bishop_minus->template phi<T>(s)) /
               (2.0 * dtau_fd);
    }

    // phi(s, tau) linearized around the context time; exact in s, first order
    // in (tau - tau0), which covers every single-tau-derivative operator.
    template <class T>
    T phi_tau(const T& s, const T& tau_val) const {
        if (!bishop) return T(0.0);
        T base = bishop->template phi<T>(s);
        if (!bishop_plus || !bishop_minus) return base;
        return base + (tau_val - tau) * dphi_dtau(s);
    }
};

inline TubeContext make_tube_context(const CurveGeometry* curve, const BishopAngle* bishop,
                                     double tau = 0.0) {
    TubeContext c;
    c.curve = curve;
    c.bishop = bishop;
    c.tau = tau;
    return c;
}

// Owns the Bishop tables (including the tau finite-difference family for
// evolving curves) behind a TubeContext view.
class TubeBundle {
public:
    explicit TubeBundle(CurveGeometry curve, double tau = 0.0, double phi0 = 0.0,
                        bool rotate = true, int samples = 512, double dtau_fd = 1e-5);
    const TubeContext& ctx() const { return ctx_; }
    const CurveGeometry& curve() const { return curve_; }

private:
    CurveGeometry curve_;
    std::unique_ptr<BishopAngle> b0_, bp_, bm_;
    TubeContext ctx_;
};

template <class T>
struct TubeFrameT {
    FrenetFrameT<T> frenet;
    T phi, cs, sn;              // phi(s), cos(theta+phi), sin(theta+phi)
    Vec3<T> t_s, t_sigma, t_theta;
    T h_s;                      // 1 - sigma kappa cos(theta+phi)
    T A, B, C;                  // connection coefficients; C = 1/sigma
    bool on_axis = false;
};

template <class T>
Vec3<T> tube_to_cartesian_T(const TubeContext& ctx, const T& s, const T& theta, const T& sigma) {
    using std::sin; using std::cos;
    FrenetFrameT<T> F = frenet_frame<T>(*ctx.curve, s, T(ctx.tau));
    T ang = theta + ctx.phi(s);
    return F.p + sigma * (cos(ang) * F.nhat + sin(ang) * F.bhat);
}

inline Vec3d tube_to_cartesian(const TubeContext& ctx, double s, double theta, double sigma) {
    return tube_to_cartesian_T<double>(ctx, s, theta, sigma);
}

template <class T>
TubeFrameT<T> tube_frame_T(const TubeContext& ctx, const T& s, const T& theta, const T& sigma) {
    using std::sin; using std::cos;
    TubeFrameT<T> tf;
    tf.frenet = frenet_frame<T>(*ctx.curve, s, T(ctx.tau));
    tf.phi = ctx.phi(s);
    T ang = theta + tf.phi;
    tf.cs = cos(ang);
    tf.sn = sin(ang);
    tf.t_s = tf.frenet.that;
    tf.t_sigma = tf.cs * tf.frenet.nhat + tf.sn * tf.frenet.bhat;
    tf.t_theta = -tf.sn * tf.frenet.nhat + tf.cs * tf.frenet.bhat;
    tf.h_s = 1.0 - sigma * tf.frenet.kappa * tf.cs;
    if (!(primal(tf.h_s) > 0.0))
        throw SingularJacobianError("tube point beyond the collar: h_s <= 0");
    tf.on_axis = !(primal(sigma) > 1e-12);
    tf.A = tf.frenet.kappa * tf.cs / tf.h_s;
    tf.B = -(tf.frenet.kappa * tf.sn) / tf.h_s;
    tf.C = tf.on_axis ? T(0.0) : 1.0 / sigma;
    return tf;
}

// Double-precision tube frame; throws on the axis where C (and theta itself)
// is undefined.
inline TubeFrameT<double> tube_frame(const TubeContext& ctx, double s, double theta,
                                     double sigma) {
    TubeFrameT<double> tf = tube_frame_T<double>(ctx, s, theta, sigma);
    if (tf.on_axis) throw OnAxisError("tube frame undefined at sigma = 0");
    return tf;
}

struct TubeCoordinates {
    double s = 0.0, theta = 0.0, sigma = 0.0;
    Vec3d foot;
    bool on_axis = false;
};

struct TubeProjectionOptions {
    int grid_n = 1024;
    int max_iterations = 50;
    double residual_tol = 1e-14;  // scaled first-order condition
    double tie_tol = 1e-9;
};

// Inverse of the tube map: 1-D grid-seeded Newton for the closest curve
// point, then sigma and theta from the frame.
class TubeProjector {
public:
    TubeProjector(const TubeContext& ctx, TubeProjectionOptions opts = {});

    TubeCoordinates project(const Vec3d& x) const;
    TubeCoordinates project_from(const Vec3d& x, double s_seed) const;
    const TubeContext& context() const { return ctx_; }

private:
    TubeContext ctx_;
    TubeProjectionOptions opts_;
    double h_;
    std::vector<double> grid_s_;
    std::vector<Vec3d> grid_p_;
};

// Rows of the coordinate Jacobian [grad_s x; d_theta x; d_sigma x] (the first
// row arclength-normalized); mutual orthogonality is the tube theorem.
std::array<Vec3d, 3> tube_jacobian_rows(const TubeContext& ctx, double s, double theta,
                                        double sigma);

}  // namespace sdcalc
