#include "sdcalc/curve_frames.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace sdcalc {

namespace {

// One RK4 sweep of dphi/ds = rhs(s) over n steps; returns nodes (n+1 values).
std::vector<double> rk4_sweep(const std::function<double(double)>& rhs, double lo, double hi,
                              double phi0, int n) {
    std::vector<double> out(static_cast<std::size_t>(n) + 1);
    double h = (hi - lo) / n;
    double phi = phi0;
    out[0] = phi;
    for (int i = 0; i < n; ++i) {
        double s = lo + i * h;
        double k1 = rhs(s);
        double k2 = rhs(s + 0.5 * h);
        double k3 = k2;  // autonomous in phi: k2 == k3
        double k4 = rhs(s + h);
        phi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        out[static_cast<std::size_t>(i) + 1] = phi;
    }
    return out;
}

}  // namespace

BishopAngle::BishopAngle(const CurveGeometry& geom, double tau, double phi0, int min_samples)
    : geom_(geom), tau_(tau), phi0_(phi0) {
    lo_ = geom.range().lo;
    double hi = geom.range().hi;
    auto rhs = [&](double s) {
        FrenetFrameT<double> F = frenet_frame<double>(geom_, s, tau_);
        return -(F.omega * F.speed);
    };

    int n = std::max(min_samples, 512);
    std::vector<double> coarse = rk4_sweep(rhs, lo_, hi, phi0, n);
    for (;;) {
        std::vector<double> fine = rk4_sweep(rhs, lo_, hi, phi0, 2 * n);
        double err = 0.0;
        for (int i = 0; i <= n; ++i)
            err = std::max(err, std::abs(coarse[i] - fine[static_cast<std::size_t>(2) * i]));
        if (err < 1e-10 || 2 * n >= (1 << 17)) {
            if (err >= 1e-8)
                throw ConvergenceError("bishop angle integration did not reach tolerance");
            err_ = err;
            n *= 2;
            phi_ = std::move(fine);
            break;
        }
        n *= 2;
        coarse = std::move(fine);
    }
    h_ = (hi - lo_) / n;
    dphi_.resize(phi_.size());
    for (std::size_t i = 0; i < phi_.size(); ++i) dphi_[i] = rhs(lo_ + static_cast<double>(i) * h_);
}

double BishopAngle::phi_at(double s) const {
    int n = static_cast<int>(phi_.size()) - 1;
    double t = (s - lo_) / h_;
    int i = static_cast<int>(std::floor(t));
    i = std::clamp(i, 0, n - 1);
    double u = t - i;
    // cubic Hermite with exact derivative values at the nodes
    double p0 = phi_[i], p1 = phi_[i + 1];
    double m0 = dphi_[i] * h_, m1 = dphi_[i + 1] * h_;
    double u2 = u * u, u3 = u2 * u;
    return (2 * u3 - 3 * u2 + 1) * p0 + (u3 - 2 * u2 + u) * m0 + (-2 * u3 + 3 * u2) * p1 +
           (u3 - u2) * m1;
}

double BishopAngle::dphi_ds(double s) const { return rhs_T<double>(s); }

TubeBundle::TubeBundle(CurveGeometry curve, double tau, double phi0, bool rotate, int samples,
                       double dtau_fd)
    : curve_(std::move(curve)) {
    ctx_.curve = &curve_;
    ctx_.tau = tau;
    ctx_.dtau_fd = dtau_fd;
    if (rotate) {
        b0_ = std::make_unique<BishopAngle>(curve_, tau, phi0, samples);
        ctx_.bishop = b0_.get();
        if (curve_.time_dependent()) {
            bp_ = std::make_unique<BishopAngle>(curve_, tau + dtau_fd, phi0, samples);
            bm_ = std::make_unique<BishopAngle>(curve_, tau - dtau_fd, phi0, samples);
            ctx_.bishop_plus = bp_.get();
            ctx_.bishop_minus = bm_.get();
        }
    }
}

TubeProjector::TubeProjector(const TubeContext& ctx, TubeProjectionOptions opts)
    : ctx_(ctx), opts_(opts) {
    const AxisRange& r = ctx_.curve->range();
    int n = std::max(opts_.grid_n, 64);
    h_ = r.length() / n;
    int count = r.periodic ? n : n + 1;
    grid_s_.reserve(count);
    grid_p_.reserve(count);
    for (int i = 0; i < count; ++i) {
        double s = r.lo + i * h_;
        grid_s_.push_back(s);
        grid_p_.push_back(ctx_.curve->chart().deriv(0, 0, s, ctx_.tau));
    }
}

TubeCoordinates TubeProjector::project_from(const Vec3d& x, double s) const {
    const CurveChart& chart = ctx_.curve->chart();
    const AxisRange& r = ctx_.curve->range();
    double tau = ctx_.tau;

    auto F = [&](double u) {
        Vec3d p = chart.deriv(0, 0, u, tau);
        Vec3d t = chart.deriv(1, 0, u, tau);
        return dot(x - p, t);
    };

    Vec3d p = chart.deriv(0, 0, s, tau);
    Vec3d t = chart.deriv(1, 0, s, tau);
    double f = dot(x - p, t);
    bool converged = false;
    for (int iter = 0; iter < opts_.max_iterations; ++iter) {
        double dist = norm(x - p);
        double scale = norm(t) * (1.0 + dist);
        if (std::abs(f) / scale < opts_.residual_tol) {
            converged = true;
            break;
        }
        Vec3d t2 = chart.deriv(2, 0, s, tau);
        double df = -norm2(t) + dot(x - p, t2);
        double step = -f / df;
        if (!std::isfinite(step)) throw ConvergenceError("tube Newton produced a non-finite step");
        double alpha = 1.0;
        bool improved = false;
        for (int halvings = 0; halvings < 12; ++halvings, alpha *= 0.5) {
            double c = r.wrap(s + alpha * step);
            if (!r.periodic) c = r.clamp(c);
            double fc = F(c);
            if (std::abs(fc) < std::abs(f)) {
                s = c;
                f = fc;
                p = chart.deriv(0, 0, s, tau);
                t = chart.deriv(1, 0, s, tau);
                improved = true;
                break;
            }
        }
        if (!improved) break;
    }
    {
        double dist = norm(x - p);
        double scale = norm(t) * (1.0 + dist);
        if (!converged && std::abs(f) / scale >= opts_.residual_tol)
            throw ConvergenceError("tube closest-point Newton did not converge");
    }

    TubeCoordinates out;
    out.s = s;
    out.foot = p;
    Vec3d d = x - p;
    out.sigma = norm(d);
    if (out.sigma < 1e-12) {
        out.on_axis = true;
        out.theta = 0.0;
        return out;
    }
    FrenetFrameT<double> fr = frenet_frame<double>(*ctx_.curve, s, tau);
    double phi = ctx_.bishop ? ctx_.bishop->phi_at(s) : 0.0;
    double ang = std::atan2(dot(d, fr.bhat), dot(d, fr.nhat));
    double theta = ang - phi;
    theta = std::remainder(theta, 2.0 * M_PI);
    out.theta = theta;
    return out;
}

TubeCoordinates TubeProjector::project(const Vec3d& x) const {
    std::size_t best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid_p_.size(); ++i) {
        double d2 = norm2(x - grid_p_[i]);
        if (d2 < best_d2) {
            best_d2 = d2;
            best = i;
        }
    }
    double dmin = std::sqrt(best_d2);
    double tie = opts_.tie_tol * std::max(1.0, dmin);
    Vec3d t_best = ctx_.curve->chart().deriv(1, 0, grid_s_[best], ctx_.tau);
    double cell = h_ * norm(t_best);
    for (std::size_t i = 0; i < grid_p_.size(); ++i) {
        if (i == best) continue;
        if (std::abs(norm(x - grid_p_[i]) - dmin) < tie &&
            norm(grid_p_[i] - grid_p_[best]) > 5.0 * cell)
            throw MultiplicityError("ambiguous closest curve point");
    }
    return project_from(x, grid_s_[best]);
}

std::array<Vec3d, 3> tube_jacobian_rows(const TubeContext& ctx, double s, double theta,
                                        double sigma) {
    auto xmap = [&](auto a, auto b, auto c) {
        return tube_to_cartesian_T<std::decay_t<decltype(a)>>(ctx, a, b, c);
    };
    auto dx_ds = xmap(D1{s, 1.0}, D1{theta, 0.0}, D1{sigma, 0.0});
    auto dx_dth = xmap(D1{s, 0.0}, D1{theta, 1.0}, D1{sigma, 0.0});
    auto dx_dsg = xmap(D1{s, 0.0}, D1{theta, 0.0}, D1{sigma, 1.0});
    double speed = primal(frenet_frame<double>(*ctx.curve, s, ctx.tau).speed);
    Vec3d r0{dx_ds.x.dot / speed, dx_ds.y.dot / speed, dx_ds.z.dot / speed};
    Vec3d r1{dx_dth.x.dot, dx_dth.y.dot, dx_dth.z.dot};
    Vec3d r2{dx_dsg.x.dot, dx_dsg.y.dot, dx_dsg.z.dot};
    return {r0, r1, r2};
}

}  // namespace sdcalc
