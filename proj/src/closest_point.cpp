#include "sdcalc/closest_point.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sdcalc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Grid nodes along one axis. Periodic axes cover [lo, hi) uniformly;
// non-periodic axes include both endpoints.
std::vector<double> axis_nodes(const AxisRange& r, int n) {
    std::vector<double> v(n);
    if (r.periodic) {
        double h = r.length() / n;
        for (int i = 0; i < n; ++i) v[i] = r.lo + i * h;
    } else {
        double h = r.length() / (n - 1);
        for (int i = 0; i < n; ++i) v[i] = r.lo + i * h;
    }
    return v;
}

}  // namespace

CollarBounds collar_bounds(const SurfaceGeometry& geom, int grid_n, double tau) {
    if (grid_n < 2) throw DomainError("collar_bounds: empty region");
    double min_pos = kInf, min_neg = kInf;
    auto n1 = axis_nodes(geom.range1(), grid_n);
    auto n2 = axis_nodes(geom.range2(), grid_n);
    for (double a : n1)
        for (double b : n2) {
            SurfaceFrame<double> F = surface_frame<double>(geom, a, b, tau);
            for (double k : {F.kappa1, F.kappa2}) {
                if (k > 1e-12) min_pos = std::min(min_pos, 1.0 / k);
                if (k < -1e-12) min_neg = std::min(min_neg, -1.0 / k);
            }
        }
    CollarBounds cb;
    cb.outward = min_pos == kInf ? kInf : 0.9 * min_pos;
    cb.inward = min_neg == kInf ? kInf : 0.9 * min_neg;
    return cb;
}

ClosestPointProjector::ClosestPointProjector(const SurfaceGeometry& geom, double tau,
                                             ProjectionOptions opts)
    : geom_(geom), tau_(tau), opts_(opts) {
    if (opts_.grid_n < 8) opts_.grid_n = 8;
    n1_ = opts_.grid_n;
    n2_ = opts_.grid_n;
    auto a1 = axis_nodes(geom.range1(), n1_);
    auto a2 = axis_nodes(geom.range2(), n2_);
    h1_ = geom.range1().length() / n1_;
    h2_ = geom.range2().length() / n2_;
    grid_points_.reserve(static_cast<std::size_t>(n1_) * n2_);
    grid_params_.reserve(grid_points_.capacity());
    for (double a : a1)
        for (double b : a2) {
            grid_params_.emplace_back(a, b);
            grid_points_.push_back(
                geom.chart().deriv(0, 0, 0, a, b, tau));
        }
    bounds_ = collar_bounds(geom, opts_.grid_n, tau);
}

SdfCoordinates ClosestPointProjector::project_from(const Vec3d& x, double s1, double s2) const {
    const SurfaceChart& chart = geom_.chart();
    const AxisRange& r1 = geom_.range1();
    const AxisRange& r2 = geom_.range2();

    auto eval_residual = [&](double a, double b, Vec3d& p, Vec3d& t1, Vec3d& t2, double& f1,
                             double& f2) {
        p = chart.deriv(0, 0, 0, a, b, tau_);
        t1 = chart.deriv(1, 0, 0, a, b, tau_);
        t2 = chart.deriv(0, 1, 0, a, b, tau_);
        Vec3d d = x - p;
        f1 = dot(d, t1);
        f2 = dot(d, t2);
    };

    Vec3d p, t1, t2;
    double f1, f2;
    eval_residual(s1, s2, p, t1, t2, f1, f2);

    auto scaled_res = [&](double g1, double g2, const Vec3d& pp, const Vec3d& u1, const Vec3d& u2) {
        double dist = norm(x - pp);
        double sc1 = norm(u1) * (1.0 + dist);
        double sc2 = norm(u2) * (1.0 + dist);
        return std::max(std::abs(g1) / sc1, std::abs(g2) / sc2);
    };

    bool converged = false;
    for (int iter = 0; iter < opts_.max_iterations; ++iter) {
        if (scaled_res(f1, f2, p, t1, t2) < opts_.residual_tol) {
            converged = true;
            break;
        }
        Vec3d p11 = chart.deriv(2, 0, 0, s1, s2, tau_);
        Vec3d p12 = chart.deriv(1, 1, 0, s1, s2, tau_);
        Vec3d p22 = chart.deriv(0, 2, 0, s1, s2, tau_);
        Vec3d d = x - p;
        double j11 = -dot(t1, t1) + dot(d, p11);
        double j12 = -dot(t2, t1) + dot(d, p12);
        double j21 = -dot(t1, t2) + dot(d, p12);
        double j22 = -dot(t2, t2) + dot(d, p22);
        auto [d1, d2] = solve2(j11, j12, j21, j22, -f1, -f2);
        if (!std::isfinite(d1) || !std::isfinite(d2))
            throw ConvergenceError("projection Newton produced a non-finite step");

        // Damping: halve until the residual norm decreases.
        double base = std::hypot(f1, f2);
        double alpha = 1.0;
        bool improved = false;
        for (int halvings = 0; halvings < 12; ++halvings, alpha *= 0.5) {
            double c1 = r1.wrap(s1 + alpha * d1);
            double c2 = r2.wrap(s2 + alpha * d2);
            if (!r1.periodic) c1 = r1.clamp(c1);
            if (!r2.periodic) c2 = r2.clamp(c2);
            Vec3d np, nt1, nt2;
            double nf1, nf2;
            eval_residual(c1, c2, np, nt1, nt2, nf1, nf2);
            if (std::hypot(nf1, nf2) < base) {
                s1 = c1;
                s2 = c2;
                p = np;
                t1 = nt1;
                t2 = nt2;
                f1 = nf1;
                f2 = nf2;
                improved = true;
                break;
            }
        }
        if (!improved) break;  // stalled; final residual check decides
    }
    if (!converged && scaled_res(f1, f2, p, t1, t2) >= opts_.residual_tol) {
        double b1 = std::min(s1 - r1.lo, r1.hi - s1);
        double b2 = std::min(s2 - r2.lo, r2.hi - s2);
        if ((!r1.periodic && b1 < 1e-9 * r1.length()) || (!r2.periodic && b2 < 1e-9 * r2.length()))
            throw DomainError("closest point lies outside the chart's parameter domain");
        throw ConvergenceError("closest-point Newton did not converge");
    }

    SdfCoordinates out;
    out.s1 = s1;
    out.s2 = s2;
    out.foot = p;
    out.nhat = normalized(cross(t1, t2));
    out.sigma = dot(x - p, out.nhat);
    out.outside_collar = !bounds_.contains(out.sigma);
    return out;
}

SdfCoordinates ClosestPointProjector::project(const Vec3d& x) const {
    // Coarse-grid argmin seed.
    std::size_t best = 0;
    double best_d2 = kInf;
    for (std::size_t i = 0; i < grid_points_.size(); ++i) {
        double d2 = norm2(x - grid_points_[i]);
        if (d2 < best_d2) {
            best_d2 = d2;
            best = i;
        }
    }
    double dmin = std::sqrt(best_d2);

    // Candidate-multiplicity guard: a distant grid cell at (numerically) the
    // same distance means x is near the cut locus. "Distant" is measured in
    // ambient space against the local cell diameter.
    double cell_diam;
    {
        const SurfaceChart& chart = geom_.chart();
        auto [a, b] = grid_params_[best];
        Vec3d t1 = chart.deriv(1, 0, 0, a, b, tau_);
        Vec3d t2 = chart.deriv(0, 1, 0, a, b, tau_);
        cell_diam = std::hypot(h1_ * norm(t1), h2_ * norm(t2));
    }
    double tie = opts_.tie_tol * std::max(1.0, dmin);
    for (std::size_t i = 0; i < grid_points_.size(); ++i) {
        if (i == best) continue;
        double d = norm(x - grid_points_[i]);
        if (std::abs(d - dmin) < tie &&
            norm(grid_points_[i] - grid_points_[best]) > 5.0 * cell_diam)
            throw MultiplicityError("ambiguous closest point: equal-distance candidates");
    }

    auto [a, b] = grid_params_[best];
    return project_from(x, a, b);
}

SdfCoordinates signed_distance(const SurfaceGeometry& geom, const Vec3d& x, double tau) {
    ClosestPointProjector proj(geom, tau);
    return proj.project(x);
}

Vec3d grad_sigma(const SurfaceGeometry& geom, const Vec3d& x, double tau) {
    return signed_distance(geom, x, tau).nhat;
}

}  // namespace sdcalc
