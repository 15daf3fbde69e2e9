#include "sdcalc/jet.hpp"

#include <limits>

namespace sdcalc {

Jet chart_jet(const SurfaceGeometry& geom, double s1, double s2, double tau, int max_order) {
    if (max_order < 0 || max_order > geom.chart().max_s_order())
        throw DomainError("requested jet order not supported by chart");
    if (!geom.range1().contains(s1, 1e-12) || !geom.range2().contains(s2, 1e-12))
        throw DomainError("jet parameters outside chart domain");
    Jet jet;
    jet.order = max_order;
    jet.has_tau = geom.time_dependent();
    for (int a = 0; a <= max_order; ++a)
        for (int b = 0; a + b <= max_order; ++b)
            for (int dt = 0; dt <= (jet.has_tau ? 1 : 0); ++dt)
                jet.values[{a, b, dt}] = geom.chart().deriv(a, b, dt, s1, s2, tau);
    for (const auto& [idx, v] : jet.values)
        if (!finite(v)) throw DomainError("non-finite chart derivative");
    return jet;
}

Jet chart_jet(const CurveGeometry& geom, double s, double tau, int max_order) {
    if (max_order < 0 || max_order > geom.chart().max_s_order())
        throw DomainError("requested jet order not supported by chart");
    if (!geom.range().contains(s, 1e-12)) throw DomainError("jet parameter outside chart domain");
    Jet jet;
    jet.order = max_order;
    jet.has_tau = geom.time_dependent();
    for (int ds = 0; ds <= max_order; ++ds)
        for (int dt = 0; dt <= (jet.has_tau ? 1 : 0); ++dt)
            jet.values[{ds, 0, dt}] = geom.chart().deriv(ds, dt, s, tau);
    for (const auto& [idx, v] : jet.values)
        if (!finite(v)) throw DomainError("non-finite chart derivative");
    return jet;
}

double fd_derivative(const std::function<double(double)>& f, double x, int order) {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    double scale = std::max(1.0, std::abs(x));
    if (order == 1) {
        double h = std::cbrt(eps) * scale;
        double fp = f(x + h), fm = f(x - h);
        if (!std::isfinite(fp) || !std::isfinite(fm))
            throw DomainError("fd_derivative: non-finite sample");
        return (fp - fm) / (2.0 * h);
    }
    if (order == 2) {
        double h = std::pow(eps, 0.25) * scale;
        double fp = f(x + h), f0 = f(x), fm = f(x - h);
        if (!std::isfinite(fp) || !std::isfinite(f0) || !std::isfinite(fm))
            throw DomainError("fd_derivative: non-finite sample");
        return (fp - 2.0 * f0 + fm) / (h * h);
    }
    throw DomainError("fd_derivative: order must be 1 or 2");
}

}  // namespace sdcalc
