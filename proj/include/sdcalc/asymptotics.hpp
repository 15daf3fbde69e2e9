#pragma once

// Boundary-layer expansions: the exact operator evaluators run on the
// truncated eps-series scalar with sigma = eps xi, so every geometric factor
// (1/|J|, 1/h_s, 1/sigma, ...) expands into its geometric series
// automatically and the coefficients of the result are the expansion of the
// operator applied to a layer field f(xi, ...). Fields are interpreted in
// the stretched coordinate: their sigma argument receives xi.

#include <optional>
#include <vector>

#include "sdcalc/surface_evolution.hpp"
#include "sdcalc/tube_calculus.hpp"

namespace sdcalc {

// Truncated power series in eps with numeric coefficients (scalar, vector or
// tensor valued), from min_order to truncation order K.
class EpsSeries {
public:
    enum class Kind { Scalar, Vector, Tensor };

    EpsSeries() = default;
    EpsSeries(int min_order, int K) : m_(min_order), K_(K), kind_(Kind::Scalar) {
        sc_.assign(static_cast<std::size_t>(K_ - m_ + 1), 0.0);
    }

    static EpsSeries from_series(const Series& s, int K);
    static EpsSeries from_series(const Vec3<Series>& s, int K);
    static EpsSeries from_series(const Mat3<Series>& s, int K);

    Kind kind() const { return kind_; }
    int min_order() const { return m_; }
    int order() const { return K_; }

    double coeff(int k) const { return in_range(k) ? sc_[static_cast<std::size_t>(k - m_)] : 0.0; }
    Vec3d coeff_vec(int k) const {
        return in_range(k) ? vc_[static_cast<std::size_t>(k - m_)] : Vec3d{};
    }
    Mat3d coeff_mat(int k) const {
        return in_range(k) ? mc_[static_cast<std::size_t>(k - m_)] : Mat3d{};
    }
    void set(int k, double v) { sc_.at(static_cast<std::size_t>(k - m_)) = v; }

    double eval(double eps) const;
    Vec3d eval_vec(double eps) const;
    Mat3d eval_mat(double eps) const;

    // scalar-series arithmetic, closed at the common truncation order
    friend EpsSeries operator+(const EpsSeries& a, const EpsSeries& b);
    friend EpsSeries operator*(const EpsSeries& a, const EpsSeries& b);
    EpsSeries truncated(int K) const;

private:
    bool in_range(int k) const { return k >= m_ && k <= K_; }
    int m_ = 0, K_ = 0;
    Kind kind_ = Kind::Scalar;
    std::vector<double> sc_;
    std::vector<Vec3d> vc_;
    std::vector<Mat3d> mc_;
};

enum class SurfaceExpandOp {
    GradScalar, GradVector, Div, ScalarLap, CurlCurl, AdvectScalar, AdvectVector, Dt
};
enum class TubeExpandOp {
    GradScalar, GradVector, Div, ScalarLap, VectorLap, Curl, DtScalar, DtVector, AdvectScalar
};

struct LayerPoint {
    double s1 = 0.0, s2 = 0.0;
    double xi = 0.0;  // rescaled normal coordinate sigma/eps
    double tau = 0.0;
};
struct TubeLayerPoint {
    double s = 0.0, theta = 0.0;
    double xi = 0.0;
    double tau = 0.0;
};

struct SurfaceExpandArgs {
    std::shared_ptr<const SurfaceScalarField> f;      // scalar operand
    std::shared_ptr<const SurfaceVectorField> u;      // vector operand / advecting velocity
    std::shared_ptr<const SurfaceMotion> motion;      // Dt (defaults to chart motion)
};
struct TubeExpandArgs {
    std::shared_ptr<const TubeScalarField> f;
    std::shared_ptr<const TubeVectorField> u;
    std::shared_ptr<const CurveMotion> motion;
};

// Truncated expansion of the operator at the layer point; fields are read as
// functions of (xi, surface coordinates).
EpsSeries expand_surface(const SurfaceGeometry& geom, SurfaceExpandOp op,
                         const SurfaceExpandArgs& args, const LayerPoint& at, int K);
EpsSeries expand_tube(const TubeContext& ctx, TubeExpandOp op, const TubeExpandArgs& args,
                      const TubeLayerPoint& at, int K);

// Exact operator value at sigma = eps xi with the same stretched-field
// interpretation (the independent side of the convergence contract).
EpsSeries exact_surface_value(const SurfaceGeometry& geom, SurfaceExpandOp op,
                              const SurfaceExpandArgs& args, const LayerPoint& at, double eps);
EpsSeries exact_tube_value(const TubeContext& ctx, TubeExpandOp op, const TubeExpandArgs& args,
                           const TubeLayerPoint& at, double eps);

struct SlopeResult {
    double slope = 0.0;    // least-squares slope of log error vs log eps
    bool exact = false;    // all errors below the underflow floor
    int n_used = 0;
    std::vector<double> eps_used, errors;
};

SlopeResult convergence_slope(const SurfaceGeometry& geom, SurfaceExpandOp op,
                              const SurfaceExpandArgs& args, const LayerPoint& at, int K,
                              const std::vector<double>& eps_list);
SlopeResult convergence_slope(const TubeContext& ctx, TubeExpandOp op,
                              const TubeExpandArgs& args, const TubeLayerPoint& at, int K,
                              const std::vector<double>& eps_list);

}  // namespace sdcalc
