#pragma once

// Independent ambient-space verification. Curvilinear fields are pulled back
// to Cartesian callables through the closest-point maps, and every operator
// is re-evaluated by central finite differences with one level of Richardson
// extrapolation. This path never touches the curvilinear operator code; it
// shares only chart evaluation and projection.

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "sdcalc/closest_point.hpp"
#include "sdcalc/curve_frames.hpp"
#include "sdcalc/fields.hpp"

namespace sdcalc {

// Projection seed threaded through a finite-difference stencil: stencil
// points sit within h of an already projected point, so Newton converges in
// a couple of steps without grid seeding.
struct AmbientEvalHint {
    bool seeded = false;
    double a = 0.0, b = 0.0;  // surface (s1, s2) or curve (s, unused)
};

class AmbientScalar {
public:
    virtual ~AmbientScalar() = default;
    virtual double eval(const Vec3d& x, AmbientEvalHint& hint) const = 0;
    double operator()(const Vec3d& x) const {
        AmbientEvalHint h;
        return eval(x, h);
    }
};

class AmbientVector {
public:
    virtual ~AmbientVector() = default;
    virtual Vec3d eval(const Vec3d& x, AmbientEvalHint& hint) const = 0;
    Vec3d operator()(const Vec3d& x) const {
        AmbientEvalHint h;
        return eval(x, h);
    }
};

// ---- pullbacks -------------------------------------------------------------

class SurfacePullbackScalar final : public AmbientScalar {
public:
    SurfacePullbackScalar(const ClosestPointProjector& proj,
                          std::shared_ptr<const SurfaceScalarField> f)
        : proj_(proj), f_(std::move(f)) {}
    double eval(const Vec3d& x, AmbientEvalHint& hint) const override {
        SdfCoordinates c =
            hint.seeded ? proj_.project_from(x, hint.a, hint.b) : proj_.project(x);
        hint = {true, c.s1, c.s2};
        return f_->eval(proj_.geometry(), nullptr, c.sigma, c.s1, c.s2, proj_.tau());
    }

private:
    const ClosestPointProjector& proj_;
    std::shared_ptr<const SurfaceScalarField> f_;
};

class SurfacePullbackVector final : public AmbientVector {
public:
    SurfacePullbackVector(const ClosestPointProjector& proj,
                          std::shared_ptr<const SurfaceVectorField> u)
        : proj_(proj), u_(std::move(u)) {}
    Vec3d eval(const Vec3d& x, AmbientEvalHint& hint) const override {
        SdfCoordinates c =
            hint.seeded ? proj_.project_from(x, hint.a, hint.b) : proj_.project(x);
        hint = {true, c.s1, c.s2};
        const SurfaceGeometry& g = proj_.geometry();
        SurfaceFrame<double> F = surface_frame<double>(g, c.s1, c.s2, proj_.tau());
        SurfVec<double> v = u_->eval(g, nullptr, c.sigma, c.s1, c.s2, proj_.tau());
        // the reconstruction is gauge-invariant: a sign flip of that1 flips
        // that2 as well and cancels
        return F.nhat * v.n + F.that1 * v.u1 + F.that2 * v.u2;
    }

private:
    const ClosestPointProjector& proj_;
    std::shared_ptr<const SurfaceVectorField> u_;
};

class TubePullbackScalar final : public AmbientScalar {
public:
    TubePullbackScalar(const TubeProjector& proj, std::shared_ptr<const TubeScalarField> f)
        : proj_(proj), f_(std::move(f)) {}
    double eval(const Vec3d& x, AmbientEvalHint& hint) const override {
        TubeCoordinates c = hint.seeded ? proj_.project_from(x, hint.a) : proj_.project(x);
        hint = {true, c.s, 0.0};
        if (c.on_axis) throw OnAxisError("pullback evaluated on the tube axis");
        const TubeContext& ctx = proj_.context();
        return f_->eval(ctx, c.s, c.theta, c.sigma, ctx.tau);
    }

private:
    const TubeProjector& proj_;
    std::shared_ptr<const TubeScalarField> f_;
};

class TubePullbackVector final : public AmbientVector {
public:
    TubePullbackVector(const TubeProjector& proj, std::shared_ptr<const TubeVectorField> u)
        : proj_(proj), u_(std::move(u)) {}
    Vec3d eval(const Vec3d& x, AmbientEvalHint& hint) const override {
        TubeCoordinates c = hint.seeded ? proj_.project_from(x, hint.a) : proj_.project(x);
        hint = {true, c.s, 0.0};
        if (c.on_axis) throw OnAxisError("pullback evaluated on the tube axis");
        const TubeContext& ctx = proj_.context();
        TubeFrameT<double> tf = tube_frame_T<double>(ctx, c.s, c.theta, c.sigma);
        TubVec<double> v = u_->eval(ctx, c.s, c.theta, c.sigma, ctx.tau);
        return tf.t_s * v.s + tf.t_sigma * v.sg + tf.t_theta * v.th;
    }

private:
    const TubeProjector& proj_;
    std::shared_ptr<const TubeVectorField> u_;
};

// Ambient expression fields (exact callables, used for oracle self-tests).
class ExprAmbientScalar final : public AmbientScalar {
public:
    explicit ExprAmbientScalar(ExprPtr e) : e_(std::move(e)) {}
    double eval(const Vec3d& x, AmbientEvalHint&) const override {
        ExprEnv<double> env;
        double tau = 0.0;
        env.bind(Var::x, x.x);
        env.bind(Var::y, x.y);
        env.bind(Var::z, x.z);
        env.bind(Var::tau, tau);
        return eval_expr(*e_, env);
    }

private:
    ExprPtr e_;
};

class ExprAmbientVector final : public AmbientVector {
public:
    explicit ExprAmbientVector(std::array<ExprPtr, 3> e) : e_(std::move(e)) {}
    Vec3d eval(const Vec3d& x, AmbientEvalHint&) const override {
        ExprEnv<double> env;
        double tau = 0.0;
        env.bind(Var::x, x.x);
        env.bind(Var::y, x.y);
        env.bind(Var::z, x.z);
        env.bind(Var::tau, tau);
        return {eval_expr(*e_[0], env), eval_expr(*e_[1], env), eval_expr(*e_[2], env)};
    }

private:
    std::array<ExprPtr, 3> e_;
};

// ---- finite-difference stencils ---------------------------------------------

struct FdOptions {
    double h1 = 1e-4;  // first-order step factor (times max(1, |x|))
    double h2 = 1e-3;  // second-order step factor
    int max_shrinks = 4;
};

Vec3d fd_grad(const AmbientScalar& f, const Vec3d& x, const FdOptions& opt = {});
double fd_div(const AmbientVector& u, const Vec3d& x, const FdOptions& opt = {});
Vec3d fd_curl(const AmbientVector& u, const Vec3d& x, const FdOptions& opt = {});
double fd_scalar_lap(const AmbientScalar& f, const Vec3d& x, const FdOptions& opt = {});
Vec3d fd_vector_lap(const AmbientVector& u, const Vec3d& x, const FdOptions& opt = {});
Mat3d fd_hessian(const AmbientScalar& f, const Vec3d& x, const FdOptions& opt = {});
// (grad u)[i][j] = d u_j / d x_i
Mat3d fd_vector_gradient(const AmbientVector& u, const Vec3d& x, const FdOptions& opt = {});
Vec3d fd_convective(const AmbientVector& u, const Vec3d& x, const FdOptions& opt = {});
// -curl curl u assembled from component Hessians as lap u - grad(div u);
// stays single-level central differences.
Vec3d fd_curl_curl(const AmbientVector& u, const Vec3d& x, const FdOptions& opt = {});

// ---- comparison -------------------------------------------------------------

struct OpReport {
    std::string op;
    double max_abs = 0.0;
    double max_rel = 0.0;
    int n_points = 0;
    Vec3d worst_point{};
    std::vector<std::string> failures;

    void record(const Vec3d& x, double abs_err, double ref_scale) {
        double rel = abs_err / std::max(ref_scale, 1e-8);
        if (rel > max_rel) {
            max_rel = rel;
            worst_point = x;
        }
        max_abs = std::max(max_abs, abs_err);
        ++n_points;
    }
};

inline double err_norm(double a, double b) { return std::abs(a - b); }
inline double err_norm(const Vec3d& a, const Vec3d& b) { return norm(a - b); }
inline double err_norm(const Mat3d& a, const Mat3d& b) { return max_abs(a - b); }
inline double ref_scale(double b) { return std::abs(b); }
inline double ref_scale(const Vec3d& b) { return norm(b); }
inline double ref_scale(const Mat3d& b) { return max_abs(b); }

// Evaluate `curvilinear(point)` against `oracle(x)` over a set of sample
// points; evaluation failures are recorded per point rather than thrown.
template <class Value, class CurvFn, class OracleFn, class Points>
OpReport compare_op(const std::string& name, const Points& pts, CurvFn&& curv, OracleFn&& oracle) {
    OpReport rep;
    rep.op = name;
    for (const auto& p : pts) {
        try {
            Value a = curv(p);
            Value b = oracle(p);
            rep.record(p.x, err_norm(a, b), ref_scale(b));
        } catch (const Error& e) {
            rep.failures.push_back(e.what());
        }
    }
    return rep;
}

}  // namespace sdcalc
