#pragma once

// The signed-distance map: closest-point projection of ambient points, the
// coordinate transform x = p(s) + sigma nhat and its inverse, and collar
// validity radii.

#include <vector>

#include "sdcalc/surface_frames.hpp"

namespace sdcalc {

struct SdfCoordinates {
    double s1 = 0.0, s2 = 0.0;
    double sigma = 0.0;  // negative inside (against the chart normal)
    Vec3d foot;          // p(s)
    Vec3d nhat;          // unit normal at the foot point
    bool outside_collar = false;
};

// Largest |sigma| with J invertible over the sampled region, by sign of
// sigma; magnitudes, +inf when curvature never obstructs that side. Shrunk by
// the 0.9 safety factor relative to the sampled focal distances.
struct CollarBounds {
    double outward = 0.0;  // sigma > 0 side
    double inward = 0.0;   // sigma < 0 side

    double cap(double sigma) const { return sigma >= 0.0 ? outward : inward; }
    bool contains(double sigma) const { return std::abs(sigma) < cap(sigma); }
};

// Position and unit normal only (first-order jets); the cheap core of the
// coordinate transform.
template <class T>
void chart_point_normal(const SurfaceGeometry& geom, const T& s1, const T& s2, const T& tau,
                        Vec3<T>& p, Vec3<T>& nhat) {
    const SurfaceChart& chart = geom.chart();
    p = chart.deriv(0, 0, 0, s1, s2, tau);
    Vec3<T> t1 = chart.deriv(1, 0, 0, s1, s2, tau);
    Vec3<T> t2 = chart.deriv(0, 1, 0, s1, s2, tau);
    nhat = normalized(cross(t1, t2));
}

template <class T>
Vec3<T> to_cartesian_T(const SurfaceGeometry& geom, const T& s1, const T& s2, const T& sigma,
                       const T& tau) {
    Vec3<T> p, n;
    chart_point_normal(geom, s1, s2, tau, p, n);
    return p + n * sigma;
}

inline Vec3d to_cartesian(const SurfaceGeometry& geom, double s1, double s2, double sigma,
                          double tau = 0.0) {
    return to_cartesian_T<double>(geom, s1, s2, sigma, tau);
}

struct ProjectionOptions {
    int grid_n = 32;            // coarse seeding grid per axis (>= 32)
    int max_iterations = 50;
    double residual_tol = 1e-14;  // scaled first-order condition
    double tie_tol = 1e-9;      // grid-distance tie threshold for multiplicity
};

// Newton projection with a precomputed seeding grid; immutable and safe for
// concurrent projection of point batches.
class ClosestPointProjector {
public:
    ClosestPointProjector(const SurfaceGeometry& geom, double tau = 0.0,
                          ProjectionOptions opts = {});

    // Grid-seeded projection (detects candidate multiplicity).
    SdfCoordinates project(const Vec3d& x) const;
    // Newton from a caller-supplied seed; used where locality is known
    // (finite-difference stencils around an already projected point).
    SdfCoordinates project_from(const Vec3d& x, double s1, double s2) const;

    const CollarBounds& bounds() const { return bounds_; }
    const SurfaceGeometry& geometry() const { return geom_; }
    double tau() const { return tau_; }

private:
    SurfaceGeometry geom_;
    double tau_;
    ProjectionOptions opts_;
    CollarBounds bounds_;
    int n1_, n2_;
    double h1_, h2_;
    std::vector<Vec3d> grid_points_;
    std::vector<std::pair<double, double>> grid_params_;
};

// Convenience one-shot wrappers (they rebuild the seeding grid each call;
// use a ClosestPointProjector in loops).
SdfCoordinates signed_distance(const SurfaceGeometry& geom, const Vec3d& x, double tau = 0.0);
Vec3d grad_sigma(const SurfaceGeometry& geom, const Vec3d& x, double tau = 0.0);

// Focal-distance collar bounds from a curvature sweep over the chart domain.
CollarBounds collar_bounds(const SurfaceGeometry& geom, int grid_n = 32, double tau = 0.0);

}  // namespace sdcalc
