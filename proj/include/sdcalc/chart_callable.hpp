#pragma once

// Closure-backed charts: geometry supplied as a generic C++ callable instead
// of expression strings. Derivatives come from nested dual numbers, so the
// callable must be evaluable at any scalar type (generic lambda).

#include "sdcalc/chart.hpp"

namespace sdcalc {

namespace detail {

template <int Budget, class T, class F>
Vec3<T> surface_nested_deriv(const F& f, int a, int b, int dtau, const T& s1, const T& s2,
                             const T& tau) {
    if (a == 0 && b == 0 && dtau == 0) return f(s1, s2, tau);
    if constexpr (Budget == 0) {
        throw DomainError("closure chart derivative order not supported");
    } else {
        using DT = Dual<T>;
        DT ds1{s1, T(0.0)}, ds2{s2, T(0.0)}, dt{tau, T(0.0)};
        int na = a, nb = b, ndt = dtau;
        if (a > 0) { ds1.dot = T(1.0); --na; }
        else if (b > 0) { ds2.dot = T(1.0); --nb; }
        else { dt.dot = T(1.0); --ndt; }
        Vec3<DT> r = surface_nested_deriv<Budget - 1, DT>(f, na, nb, ndt, ds1, ds2, dt);
        return {r.x.dot, r.y.dot, r.z.dot};
    }
}

template <int Budget, class T, class F>
Vec3<T> curve_nested_deriv(const F& f, int ds, int dtau, const T& s, const T& tau) {
    if (ds == 0 && dtau == 0) return f(s, tau);
    if constexpr (Budget == 0) {
        throw DomainError("closure chart derivative order not supported");
    } else {
        using DT = Dual<T>;
        DT dsv{s, T(0.0)}, dt{tau, T(0.0)};
        int nds = ds, ndt = dtau;
        if (ds > 0) { dsv.dot = T(1.0); --nds; }
        else { dt.dot = T(1.0); --ndt; }
        Vec3<DT> r = curve_nested_deriv<Budget - 1, DT>(f, nds, ndt, dsv, dt);
        return {r.x.dot, r.y.dot, r.z.dot};
    }
}

}  // namespace detail

template <class F>
class CallableSurfaceChart final : public SurfaceChart {
public:
    CallableSurfaceChart(F f, bool time_dependent) : f_(std::move(f)), has_tau_(time_dependent) {}

    int max_s_order() const override { return 3; }
    bool time_dependent() const override { return has_tau_; }

#define SDCALC_SURFACE_DERIV(T)                                                                    \
    Vec3<T> deriv(int a, int b, int dtau, const T& s1, const T& s2, const T& tau) const override { \
        if (a < 0 || b < 0 || a + b > 3 || dtau < 0 || dtau > 1)                                   \
            throw DomainError("closure chart derivative order not supported");                     \
        return detail::surface_nested_deriv<4, T>(f_, a, b, dtau, s1, s2, tau);                    \
    }
    SDCALC_FOR_EACH_SCALAR(SDCALC_SURFACE_DERIV)
#undef SDCALC_SURFACE_DERIV

private:
    F f_;
    bool has_tau_;
};

template <class F>
class CallableCurveChart final : public CurveChart {
public:
    CallableCurveChart(F f, bool time_dependent) : f_(std::move(f)), has_tau_(time_dependent) {}

    int max_s_order() const override { return 4; }
    bool time_dependent() const override { return has_tau_; }

#define SDCALC_CURVE_DERIV(T)                                                  \
    Vec3<T> deriv(int ds, int dtau, const T& s, const T& tau) const override { \
        if (ds < 0 || ds > 4 || dtau < 0 || dtau > 1)                          \
            throw DomainError("closure chart derivative order not supported"); \
        return detail::curve_nested_deriv<5, T>(f_, ds, dtau, s, tau);         \
    }
    SDCALC_FOR_EACH_SCALAR(SDCALC_CURVE_DERIV)
#undef SDCALC_CURVE_DERIV

private:
    F f_;
    bool has_tau_;
};

template <class F>
SurfaceGeometry make_surface_from_callable(F f, AxisRange r1, AxisRange r2,
                                           bool time_dependent = false,
                                           std::string name = "surface") {
    auto chart = std::make_shared<CallableSurfaceChart<F>>(std::move(f), time_dependent);
    return {chart, r1, r2, std::move(name)};
}

template <class F>
CurveGeometry make_curve_from_callable(F f, AxisRange r, bool time_dependent = false,
                                       std::string name = "curve") {
    auto chart = std::make_shared<CallableCurveChart<F>>(std::move(f), time_dependent);
    return {chart, r, std::move(name)};
}

}  // namespace sdcalc
