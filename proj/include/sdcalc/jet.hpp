#pragma once

#include <cmath>
#include <functional>
#include <map>

#include "sdcalc/chart.hpp"

namespace sdcalc {

// Derivative jet of a chart at a point: values tagged by multi-index
// (a = d/ds1 count, b = d/ds2 count, dtau = d/dtau count). Curve jets use
// a for d/ds and b = 0. Multi-indices are stored as counts, so permutation
// symmetry of mixed partials is structural.
struct Jet {
    int order = 0;
    bool has_tau = false;
    std::map<std::array<int, 3>, Vec3d> values;

    const Vec3d& get(int a, int b = 0, int dtau = 0) const {
        auto it = values.find({a, b, dtau});
        if (it == values.end()) throw DomainError("jet does not hold the requested multi-index");
        return it->second;
    }
};

Jet chart_jet(const SurfaceGeometry& geom, double s1, double s2, double tau, int max_order);
Jet chart_jet(const CurveGeometry& geom, double s, double tau, int max_order);

// Central-difference derivative of a 1-D callable, order 1 or 2, with the
// usual optimal step scalings h ~ eps^(1/3) resp. eps^(1/4).
double fd_derivative(const std::function<double(double)>& f, double x, int order);

}  // namespace sdcalc
