#pragma once

// Scalar and vector fields on the collar of a surface (components in the
// sigma-independent principal frame) and on the tube around a curve
// (components in the rotated tube frame). Fields are evaluable at every
// scalar type in the closed set so operators can lift them through duals and
// eps-series.

#include "sdcalc/closest_point.hpp"
#include "sdcalc/curve_frames.hpp"
#include "sdcalc/rng.hpp"
#include "sdcalc/surface_frames.hpp"

namespace sdcalc {

template <class T>
struct SurfVec {
    T n{}, u1{}, u2{};  // u = n nhat + u1 that1 + u2 that2
};

template <class T>
struct TubVec {
    T s{}, sg{}, th{};  // u = s t_s + sg t_sigma + th t_theta
};

// Nesting depth of a scalar type (number of Dual layers).
template <class T> struct scalar_rank : std::integral_constant<int, 0> {};
template <class T> struct scalar_rank<Dual<T>> : std::integral_constant<int, scalar_rank<T>::value + 1> {};

// Whether the base of the nesting is the eps-series scalar.
template <class T> struct is_series_based : std::false_type {};
template <> struct is_series_based<Series> : std::true_type {};
template <class T> struct is_series_based<Dual<T>> : is_series_based<T> {};

// Callable fields that wrap whole operators can only be lifted a bounded
// number of dual levels before chart evaluations leave the closed scalar
// set; they gate on this predicate and throw beyond it.
template <class T, int MaxRank>
inline constexpr bool liftable_v = !is_series_based<T>::value && scalar_rank<T>::value <= MaxRank;

class SurfaceScalarField {
public:
    virtual ~SurfaceScalarField() = default;
#define SDCALC_SF_EVAL(T)                                                                   \
    virtual T eval(const SurfaceGeometry& geom, const FrameGauge* gauge, const T& sigma,    \
                   const T& s1, const T& s2, const T& tau) const = 0;
    SDCALC_FOR_EACH_SCALAR(SDCALC_SF_EVAL)
#undef SDCALC_SF_EVAL
};

class SurfaceVectorField {
public:
    virtual ~SurfaceVectorField() = default;
#define SDCALC_SF_EVAL(T)                                                                       \
    virtual SurfVec<T> eval(const SurfaceGeometry& geom, const FrameGauge* gauge, const T& sigma, \
                            const T& s1, const T& s2, const T& tau) const = 0;
    SDCALC_FOR_EACH_SCALAR(SDCALC_SF_EVAL)
#undef SDCALC_SF_EVAL
};

class TubeScalarField {
public:
    virtual ~TubeScalarField() = default;
#define SDCALC_TF_EVAL(T)                                                              \
    virtual T eval(const TubeContext& ctx, const T& s, const T& theta, const T& sigma, \
                   const T& tau) const = 0;
    SDCALC_FOR_EACH_SCALAR(SDCALC_TF_EVAL)
#undef SDCALC_TF_EVAL
};

class TubeVectorField {
public:
    virtual ~TubeVectorField() = default;
#define SDCALC_TF_EVAL(T)                                                                      \
    virtual TubVec<T> eval(const TubeContext& ctx, const T& s, const T& theta, const T& sigma, \
                           const T& tau) const = 0;
    SDCALC_FOR_EACH_SCALAR(SDCALC_TF_EVAL)
#undef SDCALC_TF_EVAL
};

// ---- expression-backed fields ------------------------------------------

// Scalar field from an expression in (sigma, s1, s2, tau).
class SurfaceExprScalarField final : public SurfaceScalarField {
public:
    explicit SurfaceExprScalarField(ExprPtr e);
#define SDCALC_SF_EVAL(T)                                                                \
    T eval(const SurfaceGeometry&, const FrameGauge*, const T& sigma, const T& s1,       \
           const T& s2, const T& tau) const override {                                   \
        ExprEnv<T> env;                                                                  \
        env.bind(Var::sigma, sigma);                                                     \
        env.bind(Var::s1, s1);                                                           \
        env.bind(Var::s2, s2);                                                           \
        env.bind(Var::tau, tau);                                                         \
        return eval_expr(*expr_, env);                                                   \
    }
    SDCALC_FOR_EACH_SCALAR(SDCALC_SF_EVAL)
#undef SDCALC_SF_EVAL
private:
    ExprPtr expr_;
};

// Scalar field from an ambient expression in (x, y, z, tau), pulled back
// through the coordinate map x = p(s) + sigma nhat(s).
class AmbientExprSurfaceScalarField final : public SurfaceScalarField {
public:
    explicit AmbientExprSurfaceScalarField(ExprPtr e);
#define SDCALC_SF_EVAL(T)                                                                \
    T eval(const SurfaceGeometry& geom, const FrameGauge*, const T& sigma, const T& s1,  \
           const T& s2, const T& tau) const override {                                   \
        Vec3<T> x = to_cartesian_T<T>(geom, s1, s2, sigma, tau);                         \
        ExprEnv<T> env;                                                                  \
        env.bind(Var::x, x.x);                                                           \
        env.bind(Var::y, x.y);                                                           \
        env.bind(Var::z, x.z);                                                           \
        env.bind(Var::tau, tau);                                                         \
        return eval_expr(*expr_, env);                                                   \
    }
    SDCALC_FOR_EACH_SCALAR(SDCALC_SF_EVAL)
#undef SDCALC_SF_EVAL
private:
    ExprPtr expr_;
};

// Vector field with frame components given as expressions in
// (sigma, s1, s2, tau).
class SurfaceExprVectorField final : public SurfaceVectorField {
public:
    explicit SurfaceExprVectorField(std::array<ExprPtr, 3> comps);
#define SDCALC_SF_EVAL(T)                                                                  \
    SurfVec<T> eval(const SurfaceGeometry&, const FrameGauge*, const T& sigma, const T& s1, \
                    const T& s2, const T& tau) const override {                            \
        ExprEnv<T> env;                                                                    \
        env.bind(Var::sigma, sigma);                                                       \
        env.bind(Var::s1, s1);                                                             \
        env.bind(Var::s2, s2);                                                             \
        env.bind(Var::tau, tau);                                                           \
        return {eval_expr(*c_[0], env), eval_expr(*c_[1], env), eval_expr(*c_[2], env)};   \
    }
    SDCALC_FOR_EACH_SCALAR(SDCALC_SF_EVAL)
#undef SDCALC_SF_EVAL
private:
    std::array<ExprPtr, 3> c_;  // (u_sigma, u_1, u_2)
};

// Ambient Cartesian vector expression pulled back and projected onto the
// principal frame at the foot point.
class AmbientExprSurfaceVectorField final : public SurfaceVectorField {
public:
    explicit AmbientExprSurfaceVectorField(std::array<ExprPtr, 3> comps);
#define SDCALC_SF_EVAL(T)                                                                      \
    SurfVec<T> eval(const SurfaceGeometry& geom, const FrameGauge* gauge, const T& sigma,      \
                    const T& s1, const T& s2, const T& tau) const override {                   \
        SurfaceFrame<T> F = surface_frame<T>(geom, s1, s2, tau, gauge);                        \
        Vec3<T> x = F.p + F.nhat * sigma;                                                      \
        ExprEnv<T> env;                                                                        \
        env.bind(Var::x, x.x);                                                                 \
        env.bind(Var::y, x.y);                                                                 \
        env.bind(Var::z, x.z);                                                                 \
        env.bind(Var::tau, tau);                                                              \
        Vec3<T> u{eval_expr(*c_[0], env), eval_expr(*c_[1], env), eval_expr(*c_[2], env)};     \
        return {dot(u, F.nhat), dot(u, F.that1), dot(u, F.that2)};                             \
    }
    SDCALC_FOR_EACH_SCALAR(SDCALC_SF_EVAL)
#undef SDCALC_SF_EVAL
private:
    std::array<ExprPtr, 3> c_;  // ambient (x, y, z) components
};

// ---- tube expression fields --------------------------------------------

// Coordinate map including the tau dependence of the Bishop angle (linearized
// through the finite-difference family in the context).
template <class T>
Vec3<T> tube_to_cartesian_tau(const TubeContext& ctx, const T& s, const T& theta, const T& sigma,
                              const T& tau) {
    using std::sin; using std::cos;
    FrenetFrameT<T> F = frenet_frame<T>(*ctx.curve, s, tau);
    T ang = theta + ctx.phi_tau(s, tau);
    return F.p + sigma * (cos(ang) * F.nhat + sin(ang) * F.bhat);
}

class TubeExprScalarField final : public TubeScalarField {
public:
    explicit TubeExprScalarField(ExprPtr e);
#define SDCALC_TF_EVAL(T)                                                                 \
    T eval(const TubeContext&, const T& s, const T& theta, const T& sigma, const T& tau)  \
        const override {                                                                  \
        ExprEnv<T> env;                                                                   \
        env.bind(Var::s, s);                                                              \
        env.bind(Var::theta, theta);                                                      \
        env.bind(Var::sigma, sigma);                                                      \
        env.bind(Var::tau, tau);                                                          \
        return eval_expr(*expr_, env);                                                    \
    }
    SDCALC_FOR_EACH_SCALAR(SDCALC_TF_EVAL)
#undef SDCALC_TF_EVAL
private:
    ExprPtr expr_;
};

class AmbientExprTubeScalarField final : public TubeScalarField {
public:
    explicit AmbientExprTubeScalarField(ExprPtr e);
#define SDCALC_TF_EVAL(T)                                                                      \
    T eval(const TubeContext& ctx, const T& s, const T& theta, const T& sigma, const T& tau)   \
        const override {                                                                       \
        Vec3<T> x = tube_to_cartesian_tau<T>(ctx, s, theta, sigma, tau);                       \
        ExprEnv<T> env;                                                                        \
        env.bind(Var::x, x.x);                                                                 \
        env.bind(Var::y, x.y);                                                                 \
        env.bind(Var::z, x.z);                                                                 \
        env.bind(Var::tau, tau);                                                               \
        return eval_expr(*expr_, env);                                                         \
    }
    SDCALC_FOR_EACH_SCALAR(SDCALC_TF_EVAL)
#undef SDCALC_TF_EVAL
private:
    ExprPtr expr_;
};

class TubeExprVectorField final : public TubeVectorField {
public:
    explicit TubeExprVectorField(std::array<ExprPtr, 3> comps);
#define SDCALC_TF_EVAL(T)                                                                      \
    TubVec<T> eval(const TubeContext&, const T& s, const T& theta, const T& sigma,             \
                   const T& tau) const override {                                              \
        ExprEnv<T> env;                                                                        \
        env.bind(Var::s, s);                                                                   \
        env.bind(Var::theta, theta);                                                           \
        env.bind(Var::sigma, sigma);                                                           \
        env.bind(Var::tau, tau);                                                               \
        return {eval_expr(*c_[0], env), eval_expr(*c_[1], env), eval_expr(*c_[2], env)};       \
    }
    SDCALC_FOR_EACH_SCALAR(SDCALC_TF_EVAL)
#undef SDCALC_TF_EVAL
private:
    std::array<ExprPtr, 3> c_;  // (u_s, u_sigma, u_theta)
};

class AmbientExprTubeVectorField final : public TubeVectorField {
public:
    explicit AmbientExprTubeVectorField(std::array<ExprPtr, 3> comps);
#define SDCALC_TF_EVAL(T)                                                                      \
    TubVec<T> eval(const TubeContext& ctx, const T& s, const T& theta, const T& sigma,         \
                   const T& tau) const override {                                              \
        using std::sin; using std::cos;                                                        \
        FrenetFrameT<T> F = frenet_frame<T>(*ctx.curve, s, tau);                               \
        T ang = theta + ctx.phi_tau(s, tau);                                                   \
        Vec3<T> tsg = cos(ang) * F.nhat + sin(ang) * F.bhat;                                   \
        Vec3<T> tth = -(sin(ang) * F.nhat) + cos(ang) * F.bhat;                                \
        Vec3<T> x = F.p + sigma * tsg;                                                         \
        ExprEnv<T> env;                                                                        \
        env.bind(Var::x, x.x);                                                                 \
        env.bind(Var::y, x.y);                                                                 \
        env.bind(Var::z, x.z);                                                                 \
        env.bind(Var::tau, tau);                                                               \
        Vec3<T> u{eval_expr(*c_[0], env), eval_expr(*c_[1], env), eval_expr(*c_[2], env)};     \
        return {dot(u, F.that), dot(u, tsg), dot(u, tth)};                                     \
    }
    SDCALC_FOR_EACH_SCALAR(SDCALC_TF_EVAL)
#undef SDCALC_TF_EVAL
private:
    std::array<ExprPtr, 3> c_;
};

// ---- callable fields (tests, operator stacking) ---------------------------

template <class F>
class CallableSurfaceScalarField final : public SurfaceScalarField {
public:
    explicit CallableSurfaceScalarField(F f) : f_(std::move(f)) {}
#define SDCALC_SF_EVAL(T)                                                               \
    T eval(const SurfaceGeometry& geom, const FrameGauge* gauge, const T& sigma,        \
           const T& s1, const T& s2, const T& tau) const override {                     \
        return f_(geom, gauge, sigma, s1, s2, tau);                                     \
    }
    SDCALC_FOR_EACH_SCALAR(SDCALC_SF_EVAL)
#undef SDCALC_SF_EVAL
private:
    F f_;
};

template <class F>
class CallableSurfaceVectorField final : public SurfaceVectorField {
public:
    explicit CallableSurfaceVectorField(F f) : f_(std::move(f)) {}
#define SDCALC_SF_EVAL(T)                                                                 \
    SurfVec<T> eval(const SurfaceGeometry& geom, const FrameGauge* gauge, const T& sigma, \
                    const T& s1, const T& s2, const T& tau) const override {              \
        return f_(geom, gauge, sigma, s1, s2, tau);                                       \
    }
    SDCALC_FOR_EACH_SCALAR(SDCALC_SF_EVAL)
#undef SDCALC_SF_EVAL
private:
    F f_;
};

template <class F>
class CallableTubeScalarField final : public TubeScalarField {
public:
    explicit CallableTubeScalarField(F f) : f_(std::move(f)) {}
#define SDCALC_TF_EVAL(T)                                                                    \
    T eval(const TubeContext& ctx, const T& s, const T& theta, const T& sigma, const T& tau) \
        const override {                                                                     \
        return f_(ctx, s, theta, sigma, tau);                                                \
    }
    SDCALC_FOR_EACH_SCALAR(SDCALC_TF_EVAL)
#undef SDCALC_TF_EVAL
private:
    F f_;
};

template <class F>
class CallableTubeVectorField final : public TubeVectorField {
public:
    explicit CallableTubeVectorField(F f) : f_(std::move(f)) {}
#define SDCALC_TF_EVAL(T)                                                                    \
    TubVec<T> eval(const TubeContext& ctx, const T& s, const T& theta, const T& sigma,       \
                   const T& tau) const override {                                            \
        return f_(ctx, s, theta, sigma, tau);                                                \
    }
    SDCALC_FOR_EACH_SCALAR(SDCALC_TF_EVAL)
#undef SDCALC_TF_EVAL
private:
    F f_;
};

// ---- field spec JSON ------------------------------------------------------

struct SurfaceFieldSpec {
    bool is_vector = false;
    std::shared_ptr<const SurfaceScalarField> scalar;
    std::shared_ptr<const SurfaceVectorField> vector;
};
SurfaceFieldSpec load_surface_field_json(const std::string& text);
SurfaceFieldSpec load_surface_field_file(const std::string& path);

struct TubeFieldSpec {
    bool is_vector = false;
    std::shared_ptr<const TubeScalarField> scalar;
    std::shared_ptr<const TubeVectorField> vector;
};
TubeFieldSpec load_tube_field_json(const std::string& text);
TubeFieldSpec load_tube_field_file(const std::string& path);

// ---- random ambient test fields -------------------------------------------

// Low-order polynomial + trigonometric ambient scalar with coefficients drawn
// from the seeded stream; smooth everywhere and moderate through fourth
// derivatives, which keeps finite-difference oracles accurate.
ExprPtr make_random_ambient_expr(Rng& rng);

std::shared_ptr<const SurfaceScalarField> make_random_surface_scalar(Rng& rng);
std::shared_ptr<const SurfaceVectorField> make_random_surface_vector(Rng& rng);
std::shared_ptr<const TubeScalarField> make_random_tube_scalar(Rng& rng);
std::shared_ptr<const TubeVectorField> make_random_tube_vector(Rng& rng);

}  // namespace sdcalc
