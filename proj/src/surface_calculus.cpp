#include "sdcalc/surface_calculus.hpp"

namespace sdcalc {

namespace {

struct HessianParts {
    SurfaceFrame<double> F;
    double f1 = 0, f2 = 0, detJ = 0;
    double om1 = 0, om2 = 0;
    double dsf = 0, ds2f = 0;
    double g1 = 0, g2 = 0;                          // grad_i f
    double g11 = 0, g12 = 0, g21 = 0, g22 = 0;      // grad_i grad_j f
    double ds_g1 = 0, ds_g2 = 0;                    // d_sigma (grad_i f)
    double g1_ds = 0, g2_ds = 0;                    // grad_i (d_sigma f)
    double dk11 = 0, dk12 = 0, dk21 = 0, dk22 = 0;  // grad_i kappa_j
};

HessianParts hessian_parts(const SurfaceGeometry& geom, const SurfaceScalarField& f,
                           const SurfacePoint& pt) {
    HessianParts H;
    H.F = surface_frame<double>(geom, pt.s1, pt.s2, pt.tau);
    const SurfaceFrame<double>& F = H.F;
    FrameGauge gauge{F.that1};
    surfops::JFactors<double> J = surfops::j_factors(F, pt.sigma);
    H.f1 = J.f1;
    H.f2 = J.f2;
    H.detJ = J.detJ;
    auto om = rotation_coeffs_T<double>(geom, F, pt.s1, pt.s2, pt.tau, gauge);
    H.om1 = om[0];
    H.om2 = om[1];

    double sg = pt.sigma, a = pt.s1, b = pt.s2, tau = pt.tau;

    H.dsf = surfops::dsigma(sg, [&](auto s) {
        using DT = std::decay_t<decltype(s)>;
        return f.eval(geom, &gauge, s, DT(a), DT(b), DT(tau));
    });
    H.ds2f = surfops::dsigma(sg, [&](auto s) {
        using DT = std::decay_t<decltype(s)>;
        return surfops::dsigma(s, [&](auto s2) {
            using DT2 = std::decay_t<decltype(s2)>;
            return f.eval(geom, &gauge, s2, DT2(a), DT2(b), DT2(tau));
        });
    });

    // grad_i f as a field of s, evaluated through moving principal frames
    auto gradi_field = [&](int i, auto sg_val) {
        return [&, i, sg_val](auto p, auto q) {
            using DT = std::decay_t<decltype(p)>;
            SurfaceFrame<DT> G = surface_frame<DT>(geom, p, q, DT(tau), &gauge);
            std::array<DT, 2> w = param_velocity(G, i == 1 ? G.that1 : G.that2);
            return dir_deriv_scalar(p, q, w, [&](auto pp, auto qq) {
                using DT2 = std::decay_t<decltype(pp)>;
                return f.eval(geom, &gauge, DT2(sg_val), pp, qq, DT2(tau));
            });
        };
    };
    H.g1 = gradi_field(1, sg)(a, b);
    H.g2 = gradi_field(2, sg)(a, b);

    std::array<double, 2> w1 = param_velocity(F, F.that1);
    std::array<double, 2> w2 = param_velocity(F, F.that2);
    H.g11 = dir_deriv_scalar(a, b, w1, gradi_field(1, sg));
    H.g12 = dir_deriv_scalar(a, b, w1, gradi_field(2, sg));
    H.g21 = dir_deriv_scalar(a, b, w2, gradi_field(1, sg));
    H.g22 = dir_deriv_scalar(a, b, w2, gradi_field(2, sg));

    // d_sigma grad_i f: the direction that_i is held at the base point
    auto dsig_grad = [&](int i) {
        return surfops::dsigma(sg, [&](auto s) {
            using DT = std::decay_t<decltype(s)>;
            std::array<DT, 2> w{DT(i == 1 ? w1[0] : w2[0]), DT(i == 1 ? w1[1] : w2[1])};
            return dir_deriv_scalar(DT(a), DT(b), w, [&](auto pp, auto qq) {
                using DT2 = std::decay_t<decltype(pp)>;
                return f.eval(geom, &gauge, DT2(s), pp, qq, DT2(tau));
            });
        });
    };
    H.ds_g1 = dsig_grad(1);
    H.ds_g2 = dsig_grad(2);

    // grad_i (d_sigma f)
    auto dsf_field = [&](auto p, auto q) {
        using DT = std::decay_t<decltype(p)>;
        return surfops::dsigma(DT(sg), [&](auto s2) {
            using DT2 = std::decay_t<decltype(s2)>;
            return f.eval(geom, &gauge, s2, DT2(p), DT2(q), DT2(tau));
        });
    };
    H.g1_ds = dir_deriv_scalar(a, b, w1, dsf_field);
    H.g2_ds = dir_deriv_scalar(a, b, w2, dsf_field);

    // grad_i kappa_j
    auto kappa_field = [&](int j) {
        return [&, j](auto p, auto q) {
            using DT = std::decay_t<decltype(p)>;
            SurfaceFrame<DT> G = surface_frame<DT>(geom, p, q, DT(tau), &gauge);
            return j == 1 ? G.kappa1 : G.kappa2;
        };
    };
    H.dk11 = dir_deriv_scalar(a, b, w1, kappa_field(1));
    H.dk12 = dir_deriv_scalar(a, b, w1, kappa_field(2));
    H.dk21 = dir_deriv_scalar(a, b, w2, kappa_field(1));
    H.dk22 = dir_deriv_scalar(a, b, w2, kappa_field(2));
    return H;
}

}  // namespace

Mat3d hessian(const SurfaceGeometry& geom, const SurfaceScalarField& f, const SurfacePoint& pt) {
    HessianParts H = hessian_parts(geom, f, pt);
    const SurfaceFrame<double>& F = H.F;
    double sg = pt.sigma;
    double k1 = F.kappa1, k2 = F.kappa2;
    double f1 = H.f1, f2 = H.f2, dJ = H.detJ;

    Mat3d out = Mat3d::zero();
    out += outer(F.nhat, F.nhat) * H.ds2f;
    out += outer(F.nhat, F.that1) * (k1 * H.g1 / (f1 * f1) + H.ds_g1 / f1);
    out += outer(F.nhat, F.that2) * (k2 * H.g2 / (f2 * f2) + H.ds_g2 / f2);
    out += outer(F.that1, F.that1) *
           (-k1 * H.dsf / f1 + H.g11 / (f1 * f1) - H.om1 * H.g2 / dJ +
            sg * H.dk11 * H.g1 / (f1 * f1 * f1));
    out += outer(F.that1, F.that2) *
           (H.g12 / dJ + H.om1 * H.g1 / (f1 * f1) + sg * H.dk12 * H.g2 / (dJ * f2));
    out += outer(F.that1, F.nhat) * (H.g1_ds / f1 + k1 * H.g1 / (f1 * f1));
    out += outer(F.that2, F.that2) *
           (-k2 * H.dsf / f2 + H.g22 / (f2 * f2) + H.om2 * H.g1 / dJ +
            sg * H.dk22 * H.g2 / (f2 * f2 * f2));
    out += outer(F.that2, F.that1) *
           (H.g21 / dJ - H.om2 * H.g2 / (f2 * f2) + sg * H.dk21 * H.g1 / (dJ * f1));
    out += outer(F.that2, F.nhat) * (H.g2_ds / f2 + k2 * H.g2 / (f2 * f2));
    return out;
}

std::array<double, 3> commutator_residuals(const SurfaceGeometry& geom,
                                           const SurfaceScalarField& probe,
                                           const SurfacePoint& pt) {
    HessianParts H = hessian_parts(geom, probe, pt);
    double f1 = H.f1, f2 = H.f2, dJ = H.detJ;
    double r_s1 = H.ds_g1 - H.g1_ds;
    double r_s2 = H.ds_g2 - H.g2_ds;
    double rhs = -(dJ / (f1 * f1)) * H.om1 * H.g1 - (dJ / (f2 * f2)) * H.om2 * H.g2 +
                 pt.sigma * (H.dk21 * H.g1 / f1 - H.dk12 * H.g2 / f2);
    double r_12 = (H.g12 - H.g21) - rhs;
    return {r_s1, r_s2, r_12};
}

}  // namespace sdcalc
