#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "sdcalc/error.hpp"
#include "sdcalc/expr.hpp"
#include "sdcalc/scalars.hpp"
#include "sdcalc/vec.hpp"

namespace sdcalc {

struct AxisRange {
    double lo = 0.0;
    double hi = 1.0;
    bool periodic = false;

    double length() const { return hi - lo; }
    double clamp(double v) const { return v < lo ? lo : (v > hi ? hi : v); }
    double wrap(double v) const {
        if (!periodic) return v;
        double L = length();
        double t = std::fmod(v - lo, L);
        if (t < 0.0) t += L;
        return lo + t;
    }
    bool contains(double v, double slack = 0.0) const {
        return periodic || (v >= lo - slack && v <= hi + slack);
    }
};

// Smooth parametric surface p(s1, s2[, tau]) with derivative jets. Charts are
// immutable after construction and safe for concurrent evaluation. `deriv`
// returns d^a/ds1^a d^b/ds2^b (d/dtau)^dtau p at the given scalar type.
class SurfaceChart {
public:
    virtual ~SurfaceChart() = default;
    virtual int max_s_order() const = 0;
    virtual bool time_dependent() const = 0;
#define SDCALC_SURFACE_DERIV(T) \
    virtual Vec3<T> deriv(int a, int b, int dtau, const T& s1, const T& s2, const T& tau) const = 0;
    SDCALC_FOR_EACH_SCALAR(SDCALC_SURFACE_DERIV)
#undef SDCALC_SURFACE_DERIV
};

// Smooth parametric curve p(s[, tau]).
class CurveChart {
public:
    virtual ~CurveChart() = default;
    virtual int max_s_order() const = 0;
    virtual bool time_dependent() const = 0;
#define SDCALC_CURVE_DERIV(T) \
    virtual Vec3<T> deriv(int ds, int dtau, const T& s, const T& tau) const = 0;
    SDCALC_FOR_EACH_SCALAR(SDCALC_CURVE_DERIV)
#undef SDCALC_CURVE_DERIV
};

// Expression-backed surface chart: three component expressions in
// (s1, s2[, tau]); all derivative trees are built symbolically up front so
// jets are exact and evaluation is lock-free.
class ExprSurfaceChart final : public SurfaceChart {
public:
    static constexpr int kOrder = 3;
    ExprSurfaceChart(std::array<ExprPtr, 3> components);

    int max_s_order() const override { return kOrder; }
    bool time_dependent() const override { return has_tau_; }
#define SDCALC_SURFACE_DERIV(T) \
    Vec3<T> deriv(int a, int b, int dtau, const T& s1, const T& s2, const T& tau) const override { \
        return eval_at<T>(a, b, dtau, s1, s2, tau);                                               \
    }
    SDCALC_FOR_EACH_SCALAR(SDCALC_SURFACE_DERIV)
#undef SDCALC_SURFACE_DERIV

    const std::array<ExprPtr, 3>& components() const { return table_[0][0][0]; }

private:
    template <class T>
    Vec3<T> eval_at(int a, int b, int dtau, const T& s1, const T& s2, const T& tau) const {
        if (a < 0 || b < 0 || a + b > kOrder || dtau < 0 || dtau > 1)
            throw DomainError("surface chart derivative order not supported");
        if (dtau == 1 && !has_tau_) return Vec3<T>{T(0.0), T(0.0), T(0.0)};
        ExprEnv<T> env;
        env.bind(Var::s1, s1);
        env.bind(Var::s2, s2);
        env.bind(Var::tau, tau);
        const auto& c = table_[a][b][dtau];
        return {eval_expr(*c[0], env), eval_expr(*c[1], env), eval_expr(*c[2], env)};
    }

    bool has_tau_ = false;
    // table_[a][b][dtau]
    std::array<ExprPtr, 3> table_[kOrder + 1][kOrder + 1][2];
};

class ExprCurveChart final : public CurveChart {
public:
    static constexpr int kOrder = 4;
    ExprCurveChart(std::array<ExprPtr, 3> components);

    int max_s_order() const override { return kOrder; }
    bool time_dependent() const override { return has_tau_; }
#define SDCALC_CURVE_DERIV(T) \
    Vec3<T> deriv(int ds, int dtau, const T& s, const T& tau) const override { \
        return eval_at<T>(ds, dtau, s, tau);                                   \
    }
    SDCALC_FOR_EACH_SCALAR(SDCALC_CURVE_DERIV)
#undef SDCALC_CURVE_DERIV

private:
    template <class T>
    Vec3<T> eval_at(int ds, int dtau, const T& s, const T& tau) const {
        if (ds < 0 || ds > kOrder || dtau < 0 || dtau > 1)
            throw DomainError("curve chart derivative order not supported");
        if (dtau == 1 && !has_tau_) return Vec3<T>{T(0.0), T(0.0), T(0.0)};
        ExprEnv<T> env;
        env.bind(Var::s, s);
        env.bind(Var::tau, tau);
        const auto& c = table_[ds][dtau];
        return {eval_expr(*c[0], env), eval_expr(*c[1], env), eval_expr(*c[2], env)};
    }

    bool has_tau_ = false;
    std::array<ExprPtr, 3> table_[kOrder + 1][2];
};

// A chart plus its parameter domain; the unit geometry handle the rest of the
// library works with. `kappa1_fault` biases the leading principal curvature
// and exists solely for oracle sensitivity (negative-control) runs.
class SurfaceGeometry {
public:
    SurfaceGeometry() = default;
    SurfaceGeometry(std::shared_ptr<const SurfaceChart> chart, AxisRange r1, AxisRange r2,
                    std::string name = "surface")
        : chart_(std::move(chart)), r1_(r1), r2_(r2), name_(std::move(name)) {}

    const SurfaceChart& chart() const { return *chart_; }
    const AxisRange& range1() const { return r1_; }
    const AxisRange& range2() const { return r2_; }
    const std::string& name() const { return name_; }
    bool time_dependent() const { return chart_->time_dependent(); }

    SurfaceGeometry with_kappa1_fault(double dk) const {
        SurfaceGeometry g = *this;
        g.kappa1_fault = dk;
        return g;
    }

    double kappa1_fault = 0.0;

private:
    std::shared_ptr<const SurfaceChart> chart_;
    AxisRange r1_, r2_;
    std::string name_;
};

class CurveGeometry {
public:
    CurveGeometry() = default;
    CurveGeometry(std::shared_ptr<const CurveChart> chart, AxisRange r, std::string name = "curve")
        : chart_(std::move(chart)), r_(r), name_(std::move(name)) {}

    const CurveChart& chart() const { return *chart_; }
    const AxisRange& range() const { return r_; }
    const std::string& name() const { return name_; }
    bool time_dependent() const { return chart_->time_dependent(); }

    CurveGeometry with_kappa_fault(double dk) const {
        CurveGeometry g = *this;
        g.kappa_fault = dk;
        return g;
    }

    double kappa_fault = 0.0;

private:
    std::shared_ptr<const CurveChart> chart_;
    AxisRange r_;
    std::string name_;
};

// Built-in chart library. All builtins are expression-backed, so every jet is
// exact. Surface orientations put the normal t1 x t2 outward.
SurfaceGeometry make_plane(double half_extent = 8.0);
SurfaceGeometry make_sphere(double R);           // poles on the +-x axis
SurfaceGeometry make_cylinder(double R, double half_height = 4.0);  // axis z
SurfaceGeometry make_torus(double R, double r);
SurfaceGeometry make_ellipsoid(double a, double b, double c);  // poles on the +-z axis
SurfaceGeometry make_graph(const std::string& f_of_xy, double half_extent = 2.0);
SurfaceGeometry make_surface_from_exprs(const std::array<std::string, 3>& exprs, AxisRange r1,
                                        AxisRange r2, std::string name = "surface");

CurveGeometry make_line(double half_extent = 6.0);  // along z
CurveGeometry make_circle(double R);
CurveGeometry make_helix(double a, double b);
CurveGeometry make_paper_curve();  // (cos 2 pi s, sin 2 pi s, s^2)
CurveGeometry make_curve_from_exprs(const std::array<std::string, 3>& exprs, AxisRange r,
                                    std::string name = "curve");

// Geometry spec JSON (see README for the schema).
struct GeometrySpec {
    bool is_surface = true;
    SurfaceGeometry surface;
    CurveGeometry curve;
};
GeometrySpec load_geometry_json(const std::string& json_text);
GeometrySpec load_geometry_file(const std::string& path);

}  // namespace sdcalc
