#include "sdcalc/asymptotics.hpp"

#include <cmath>

namespace sdcalc {

namespace {

// Drop roundoff residue when locating the leading order of a computed series.
int detect_min_order(const Series& s, double floor_rel) {
    double biggest = 0.0;
    for (int k = Series::kMinOrd; k <= Series::kMaxOrd; ++k)
        biggest = std::max(biggest, std::abs(s.coeff(k)));
    double floor = biggest * floor_rel;
    for (int k = Series::kMinOrd; k <= Series::kMaxOrd; ++k)
        if (std::abs(s.coeff(k)) > floor && s.coeff(k) != 0.0) return k;
    return 0;
}

constexpr double kMinOrderFloor = 1e-11;

// Field adapters: rescale the sigma argument so the wrapped field reads its
// first coordinate as xi = sigma/eps. In formal (series) mode the scale is
// the eps^{-1} monomial; in numeric mode it is 1/eps.
template <class T>
T xi_scale(double inv_eps) {
    if constexpr (is_series_based<T>::value) {
        return promote<T>(Series::monomial(1.0, -1));
    } else {
        return T(inv_eps);
    }
}

class LayerSurfaceScalar final : public SurfaceScalarField {
public:
    LayerSurfaceScalar(std::shared_ptr<const SurfaceScalarField> inner, double inv_eps)
        : inner_(std::move(inner)), inv_eps_(inv_eps) {}
#define SDCALC_EVAL(T)                                                                       \
    T eval(const SurfaceGeometry& g, const FrameGauge* gg, const T& sigma, const T& s1,      \
           const T& s2, const T& tau) const override {                                       \
        return inner_->eval(g, gg, sigma * xi_scale<T>(inv_eps_), s1, s2, tau);              \
    }
    SDCALC_FOR_EACH_SCALAR(SDCALC_EVAL)
#undef SDCALC_EVAL
private:
    std::shared_ptr<const SurfaceScalarField> inner_;
    double inv_eps_;
};

class LayerSurfaceVector final : public SurfaceVectorField {
public:
    LayerSurfaceVector(std::shared_ptr<const SurfaceVectorField> inner, double inv_eps)
        : inner_(std::move(inner)), inv_eps_(inv_eps) {}
#define SDCALC_EVAL(T)                                                                          \
    SurfVec<T> eval(const SurfaceGeometry& g, const FrameGauge* gg, const T& sigma, const T& s1, \
                    const T& s2, const T& tau) const override {                                 \
        return inner_->eval(g, gg, sigma * xi_scale<T>(inv_eps_), s1, s2, tau);                 \
    }
    SDCALC_FOR_EACH_SCALAR(SDCALC_EVAL)
#undef SDCALC_EVAL
private:
    std::shared_ptr<const SurfaceVectorField> inner_;
    double inv_eps_;
};

class LayerTubeScalar final : public TubeScalarField {
public:
    LayerTubeScalar(std::shared_ptr<const TubeScalarField> inner, double inv_eps)
        : inner_(std::move(inner)), inv_eps_(inv_eps) {}
#define SDCALC_EVAL(T)                                                                        \
    T eval(const TubeContext& c, const T& s, const T& th, const T& sigma, const T& tau) const \
        override {                                                                            \
        return inner_->eval(c, s, th, sigma * xi_scale<T>(inv_eps_), tau);                    \
    }
    SDCALC_FOR_EACH_SCALAR(SDCALC_EVAL)
#undef SDCALC_EVAL
private:
    std::shared_ptr<const TubeScalarField> inner_;
    double inv_eps_;
};

class LayerTubeVector final : public TubeVectorField {
public:
    LayerTubeVector(std::shared_ptr<const TubeVectorField> inner, double inv_eps)
        : inner_(std::move(inner)), inv_eps_(inv_eps) {}
#define SDCALC_EVAL(T)                                                                        \
    TubVec<T> eval(const TubeContext& c, const T& s, const T& th, const T& sigma,             \
                   const T& tau) const override {                                             \
        return inner_->eval(c, s, th, sigma * xi_scale<T>(inv_eps_), tau);                    \
    }
    SDCALC_FOR_EACH_SCALAR(SDCALC_EVAL)
#undef SDCALC_EVAL
private:
    std::shared_ptr<const TubeVectorField> inner_;
    double inv_eps_;
};

struct ValueBundle {
    EpsSeries::Kind kind;
    Series s;
    Vec3<Series> v;
    Mat3<Series> m;
    double sd = 0.0;
    Vec3d vd;
    Mat3d md;
};

template <class T>
struct OpValue {
    EpsSeries::Kind kind = EpsSeries::Kind::Scalar;
    T s{};
    Vec3<T> v{};
    Mat3<T> m{};
};

template <class T>
OpValue<T> eval_surface_op(const SurfaceGeometry& g, SurfaceExpandOp op,
                           const SurfaceScalarField* f, const SurfaceVectorField* u,
                           const SurfaceMotion* motion, const FrameGauge& gg, const T& sg,
                           const T& a, const T& b, const T& tau) {
    OpValue<T> out;
    switch (op) {
        case SurfaceExpandOp::GradScalar:
            out.kind = EpsSeries::Kind::Vector;
            out.v = surfops::gradient_T<T>(g, *f, gg, sg, a, b, tau);
            return out;
        case SurfaceExpandOp::GradVector:
            out.kind = EpsSeries::Kind::Tensor;
            out.m = surfops::vector_gradient_T<T>(g, *u, gg, sg, a, b, tau);
            return out;
        case SurfaceExpandOp::Div:
            out.s = surfops::divergence_T<T>(g, *u, gg, sg, a, b, tau);
            return out;
        case SurfaceExpandOp::ScalarLap:
            out.s = surfops::scalar_laplacian_T<T>(g, *f, gg, sg, a, b, tau);
            return out;
        case SurfaceExpandOp::CurlCurl:
            out.kind = EpsSeries::Kind::Vector;
            out.v = surfops::curl_curl_T<T>(g, *u, gg, sg, a, b, tau);
            return out;
        case SurfaceExpandOp::AdvectScalar: {
            SurfaceFrame<T> F = surface_frame<T>(g, a, b, tau, &gg);
            SurfVec<T> uu = u->eval(g, &gg, sg, a, b, tau);
            Vec3<T> uvec = F.nhat * uu.n + F.that1 * uu.u1 + F.that2 * uu.u2;
            out.s = dot(uvec, surfops::gradient_T<T>(g, *f, gg, sg, a, b, tau));
            return out;
        }
        case SurfaceExpandOp::AdvectVector:
            out.kind = EpsSeries::Kind::Vector;
            out.v = surfops::convective_T<T>(g, *u, gg, sg, a, b, tau);
            return out;
        case SurfaceExpandOp::Dt:
            out.s = evol::dt_scalar_T<T>(g, *f, *motion, gg, sg, a, b, tau);
            return out;
    }
    throw Error("unknown surface expand op");
}

template <class T>
OpValue<T> eval_tube_op(const TubeContext& ctx, TubeExpandOp op, const TubeScalarField* f,
                        const TubeVectorField* u, const CurveMotion* motion, const T& s,
                        const T& th, const T& sg, const T& tau) {
    OpValue<T> out;
    switch (op) {
        case TubeExpandOp::GradScalar:
            out.kind = EpsSeries::Kind::Vector;
            out.v = tubeops::tube_gradient_T<T>(ctx, *f, s, th, sg, tau);
            return out;
        case TubeExpandOp::GradVector:
            out.kind = EpsSeries::Kind::Tensor;
            out.m = tubeops::tube_vector_gradient_T<T>(ctx, *u, s, th, sg, tau);
            return out;
        case TubeExpandOp::Div:
            out.s = tubeops::tube_divergence_T<T>(ctx, *u, s, th, sg, tau);
            return out;
        case TubeExpandOp::ScalarLap:
            out.s = tubeops::tube_scalar_laplacian_T<T>(ctx, *f, s, th, sg, tau);
            return out;
        case TubeExpandOp::VectorLap:
            out.kind = EpsSeries::Kind::Vector;
            out.v = tubeops::tube_vector_laplacian_T<T>(ctx, *u, s, th, sg, tau);
            return out;
        case TubeExpandOp::Curl:
            out.kind = EpsSeries::Kind::Vector;
            out.v = tubeops::tube_curl_T<T>(ctx, *u, s, th, sg, tau);
            return out;
        case TubeExpandOp::DtScalar:
            out.s = tubeops::dt_scalar_tube_T<T>(ctx, *f, *motion, s, th, sg, tau);
            return out;
        case TubeExpandOp::DtVector:
            out.kind = EpsSeries::Kind::Vector;
            out.v = tubeops::dt_vector_tube_T<T>(ctx, *u, *motion, s, th, sg, tau);
            return out;
        case TubeExpandOp::AdvectScalar: {
            TubeFrameT<T> tf = tube_frame_T<T>(ctx, s, th, sg);
            TubVec<T> uu = u->eval(ctx, s, th, sg, tau);
            Vec3<T> uvec = tf.t_s * uu.s + tf.t_sigma * uu.sg + tf.t_theta * uu.th;
            out.s = dot(uvec, tubeops::tube_gradient_T<T>(ctx, *f, s, th, sg, tau));
            return out;
        }
    }
    throw Error("unknown tube expand op");
}

}  // namespace

EpsSeries EpsSeries::from_series(const Series& s, int K) {
    EpsSeries out;
    out.kind_ = Kind::Scalar;
    out.m_ = std::min(detect_min_order(s, kMinOrderFloor), 0);
    out.K_ = K;
    for (int k = out.m_; k <= K; ++k) out.sc_.push_back(s.coeff(k));
    return out;
}

EpsSeries EpsSeries::from_series(const Vec3<Series>& s, int K) {
    EpsSeries out;
    out.kind_ = Kind::Vector;
    int m = 0;
    for (int i = 0; i < 3; ++i) m = std::min(m, detect_min_order(s[i], kMinOrderFloor));
    out.m_ = m;
    out.K_ = K;
    for (int k = m; k <= K; ++k) out.vc_.push_back({s.x.coeff(k), s.y.coeff(k), s.z.coeff(k)});
    return out;
}

EpsSeries EpsSeries::from_series(const Mat3<Series>& s, int K) {
    EpsSeries out;
    out.kind_ = Kind::Tensor;
    int m = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m = std::min(m, detect_min_order(s[i][j], kMinOrderFloor));
    out.m_ = m;
    out.K_ = K;
    for (int k = m; k <= K; ++k) {
        Mat3d c;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) c[i][j] = s[i][j].coeff(k);
        out.mc_.push_back(c);
    }
    return out;
}

double EpsSeries::eval(double eps) const {
    double acc = 0.0;
    for (int k = K_; k >= m_; --k) acc = acc * eps + coeff(k);
    return acc * std::pow(eps, m_);
}
Vec3d EpsSeries::eval_vec(double eps) const {
    Vec3d acc{};
    for (int k = K_; k >= m_; --k) acc = acc * eps + coeff_vec(k);
    return acc * std::pow(eps, m_);
}
Mat3d EpsSeries::eval_mat(double eps) const {
    Mat3d acc{};
    for (int k = K_; k >= m_; --k) acc = acc * eps + coeff_mat(k);
    return acc * std::pow(eps, m_);
}

EpsSeries operator+(const EpsSeries& a, const EpsSeries& b) {
    int m = std::min(a.m_, b.m_), K = std::min(a.K_, b.K_);
    EpsSeries out(m, K);
    for (int k = m; k <= K; ++k) out.set(k, a.coeff(k) + b.coeff(k));
    return out;
}

EpsSeries operator*(const EpsSeries& a, const EpsSeries& b) {
    int m = a.m_ + b.m_, K = std::min(a.K_, b.K_);
    EpsSeries out(m, K);
    for (int i = a.m_; i <= a.K_; ++i)
        for (int j = b.m_; j <= b.K_; ++j) {
            int k = i + j;
            if (k >= m && k <= K) out.set(k, out.coeff(k) + a.coeff(i) * b.coeff(j));
        }
    return out;
}

EpsSeries EpsSeries::truncated(int K) const {
    EpsSeries out(m_, std::min(K, K_));
    for (int k = m_; k <= out.K_; ++k) out.set(k, coeff(k));
    return out;
}

EpsSeries expand_surface(const SurfaceGeometry& geom, SurfaceExpandOp op,
                         const SurfaceExpandArgs& args, const LayerPoint& at, int K) {
    if (K < 0 || K > 6) throw DomainError("expansion order must be in [0, 6]");
    FrameGauge gg = detail::base_gauge(geom, {at.s1, at.s2, 0.0, at.tau});
    std::shared_ptr<const SurfaceScalarField> f =
        args.f ? std::make_shared<LayerSurfaceScalar>(args.f, 1.0) : nullptr;
    std::shared_ptr<const SurfaceVectorField> u =
        args.u ? std::make_shared<LayerSurfaceVector>(args.u, 1.0) : nullptr;
    std::shared_ptr<const SurfaceMotion> motion =
        args.motion ? args.motion : std::make_shared<ChartMotion>();

    Series sg = Series::monomial(at.xi, 1);
    Series a(at.s1), b(at.s2), tau(at.tau);
    OpValue<Series> val =
        eval_surface_op<Series>(geom, op, f.get(), u.get(), motion.get(), gg, sg, a, b, tau);
    switch (val.kind) {
        case EpsSeries::Kind::Scalar: return EpsSeries::from_series(val.s, K);
        case EpsSeries::Kind::Vector: return EpsSeries::from_series(val.v, K);
        case EpsSeries::Kind::Tensor: return EpsSeries::from_series(val.m, K);
    }
    throw Error("corrupt expansion value");
}

EpsSeries exact_surface_value(const SurfaceGeometry& geom, SurfaceExpandOp op,
                              const SurfaceExpandArgs& args, const LayerPoint& at, double eps) {
    SurfaceFrame<double> F = surface_frame<double>(geom, at.s1, at.s2, at.tau);
    double kmax = std::max(std::abs(F.kappa1), std::abs(F.kappa2));
    if (std::abs(eps * at.xi) * kmax >= 1.0)
        throw DomainError("series validity violated: |eps xi kappa| >= 1");
    FrameGauge gg{F.that1};
    std::shared_ptr<const SurfaceScalarField> f =
        args.f ? std::make_shared<LayerSurfaceScalar>(args.f, 1.0 / eps) : nullptr;
    std::shared_ptr<const SurfaceVectorField> u =
        args.u ? std::make_shared<LayerSurfaceVector>(args.u, 1.0 / eps) : nullptr;
    std::shared_ptr<const SurfaceMotion> motion =
        args.motion ? args.motion : std::make_shared<ChartMotion>();
    OpValue<double> val = eval_surface_op<double>(geom, op, f.get(), u.get(), motion.get(), gg,
                                                  eps * at.xi, at.s1, at.s2, at.tau);
    EpsSeries out(0, 0);
    switch (val.kind) {
        case EpsSeries::Kind::Scalar: out.set(0, val.s); return out;
        case EpsSeries::Kind::Vector: {
            EpsSeries v = EpsSeries::from_series(Vec3<Series>{Series(val.v.x), Series(val.v.y),
                                                              Series(val.v.z)}, 0);
            return v;
        }
        case EpsSeries::Kind::Tensor: {
            Mat3<Series> ms;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) ms[i][j] = Series(val.m[i][j]);
            return EpsSeries::from_series(ms, 0);
        }
    }
    throw Error("corrupt exact value");
}

EpsSeries expand_tube(const TubeContext& ctx, TubeExpandOp op, const TubeExpandArgs& args,
                      const TubeLayerPoint& at, int K) {
    if (K < 0 || K > 6) throw DomainError("expansion order must be in [0, 6]");
    std::shared_ptr<const TubeScalarField> f =
        args.f ? std::make_shared<LayerTubeScalar>(args.f, 1.0) : nullptr;
    std::shared_ptr<const TubeVectorField> u =
        args.u ? std::make_shared<LayerTubeVector>(args.u, 1.0) : nullptr;
    std::shared_ptr<const CurveMotion> motion =
        args.motion ? args.motion : std::make_shared<ChartCurveMotion>();

    Series sg = Series::monomial(at.xi, 1);
    Series s(at.s), th(at.theta), tau(at.tau);
    OpValue<Series> val =
        eval_tube_op<Series>(ctx, op, f.get(), u.get(), motion.get(), s, th, sg, tau);
    switch (val.kind) {
        case EpsSeries::Kind::Scalar: return EpsSeries::from_series(val.s, K);
        case EpsSeries::Kind::Vector: return EpsSeries::from_series(val.v, K);
        case EpsSeries::Kind::Tensor: return EpsSeries::from_series(val.m, K);
    }
    throw Error("corrupt expansion value");
}

EpsSeries exact_tube_value(const TubeContext& ctx, TubeExpandOp op, const TubeExpandArgs& args,
                           const TubeLayerPoint& at, double eps) {
    FrenetFrameT<double> F = frenet_frame<double>(*ctx.curve, at.s, ctx.tau);
    if (std::abs(eps * at.xi * F.kappa) >= 1.0)
        throw DomainError("series validity violated: |eps xi kappa| >= 1");
    std::shared_ptr<const TubeScalarField> f =
        args.f ? std::make_shared<LayerTubeScalar>(args.f, 1.0 / eps) : nullptr;
    std::shared_ptr<const TubeVectorField> u =
        args.u ? std::make_shared<LayerTubeVector>(args.u, 1.0 / eps) : nullptr;
    std::shared_ptr<const CurveMotion> motion =
        args.motion ? args.motion : std::make_shared<ChartCurveMotion>();
    OpValue<double> val = eval_tube_op<double>(ctx, op, f.get(), u.get(), motion.get(), at.s,
                                               at.theta, eps * at.xi, at.tau);
    switch (val.kind) {
        case EpsSeries::Kind::Scalar: {
            EpsSeries out(0, 0);
            out.set(0, val.s);
            return out;
        }
        case EpsSeries::Kind::Vector:
            return EpsSeries::from_series(
                Vec3<Series>{Series(val.v.x), Series(val.v.y), Series(val.v.z)}, 0);
        case EpsSeries::Kind::Tensor: {
            Mat3<Series> ms;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) ms[i][j] = Series(val.m[i][j]);
            return EpsSeries::from_series(ms, 0);
        }
    }
    throw Error("corrupt exact value");
}

namespace {

struct ErrSample {
    double err, scale;
};

ErrSample series_error(const EpsSeries& series, const EpsSeries& exact, double eps) {
    switch (series.kind()) {
        case EpsSeries::Kind::Scalar:
            return {std::abs(exact.eval(1.0) - series.eval(eps)), std::abs(exact.eval(1.0))};
        case EpsSeries::Kind::Vector:
            return {norm(exact.eval_vec(1.0) - series.eval_vec(eps)), norm(exact.eval_vec(1.0))};
        case EpsSeries::Kind::Tensor:
            return {max_abs(exact.eval_mat(1.0) - series.eval_mat(eps)),
                    max_abs(exact.eval_mat(1.0))};
    }
    return {0.0, 0.0};
}

SlopeResult fit_slope(const std::vector<double>& eps_list, const std::vector<ErrSample>& errs) {
    SlopeResult out;
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        // underflow drop, relative to the operator magnitude (which grows
        // like eps^m for singular operators)
        if (!std::isfinite(errs[i].err) || errs[i].err < 1e-13 * std::max(1.0, errs[i].scale))
            continue;
        out.eps_used.push_back(eps_list[i]);
        out.errors.push_back(errs[i].err);
    }
    out.n_used = static_cast<int>(out.eps_used.size());
    if (out.n_used < 2) {
        out.exact = true;
        return out;
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < out.n_used; ++i) {
        double lx = std::log(out.eps_used[i]), ly = std::log(out.errors[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    double n = out.n_used;
    out.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return out;
}

}  // namespace

SlopeResult convergence_slope(const SurfaceGeometry& geom, SurfaceExpandOp op,
                              const SurfaceExpandArgs& args, const LayerPoint& at, int K,
                              const std::vector<double>& eps_list) {
    EpsSeries series = expand_surface(geom, op, args, at, K);
    std::vector<ErrSample> errs;
    for (double eps : eps_list)
        errs.push_back(series_error(series, exact_surface_value(geom, op, args, at, eps), eps));
    return fit_slope(eps_list, errs);
}

SlopeResult convergence_slope(const TubeContext& ctx, TubeExpandOp op, const TubeExpandArgs& args,
                              const TubeLayerPoint& at, int K,
                              const std::vector<double>& eps_list) {
    EpsSeries series = expand_tube(ctx, op, args, at, K);
    std::vector<ErrSample> errs;
    for (double eps : eps_list)
        errs.push_back(series_error(series, exact_tube_value(ctx, op, args, at, eps), eps));
    return fit_slope(eps_list, errs);
}

}  // namespace sdcalc
