#include "sdcalc/verify.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "sdcalc/parallel.hpp"
#include "sdcalc/surface_calculus.hpp"
#include "sdcalc/surface_evolution.hpp"
#include "sdcalc/tube_calculus.hpp"

namespace sdcalc {

namespace {

constexpr double kFault = 1e-3;  // injected curvature perturbation

// Per-point comparison record. Fields are O(1)-normalized by construction,
// so the per-point relative-error denominator is floored at 5% of the unit
// scale (or of the batch peak if larger): without a floor, finite-difference
// noise at incidental zeros of the operator value would read as relative
// error of the operator itself.
struct ErrAcc {
    std::vector<double> err, mag;
    std::vector<std::string> failures;

    void finish(CheckResult& out) const {
        double M = 0.0;
        for (double m : mag) M = std::max(M, m);
        for (std::size_t i = 0; i < err.size(); ++i) {
            double rel = err[i] / std::max({mag[i], 0.05 * std::max(1.0, M), 1e-8});
            out.measured = std::max(out.measured, rel);
            out.max_abs = std::max(out.max_abs, err[i]);
        }
        out.n_points = static_cast<int>(err.size());
        out.failures = failures;
    }
};

template <class Value, class Samples, class CurvFn, class OracleFn>
CheckResult compare_batch(const std::string& name, double tol, const Samples& samples,
                          CurvFn&& curv, OracleFn&& oracle) {
    CheckResult out;
    out.name = name;
    out.threshold = tol;
    int n = static_cast<int>(samples.size());
    std::vector<double> err(n, -1.0), mag(n, 0.0);
    std::vector<std::string> fail(n);
    parallel_for(n, [&](int i) {
        try {
            Value a = curv(samples[i]);
            Value b = oracle(samples[i]);
            err[i] = err_norm(a, b);
            mag[i] = ref_scale(b);
        } catch (const Error& e) {
            fail[i] = e.what();
        }
    });
    ErrAcc acc;
    for (int i = 0; i < n; ++i) {
        if (err[i] >= 0.0) {
            acc.err.push_back(err[i]);
            acc.mag.push_back(mag[i]);
        } else if (!fail[i].empty()) {
            acc.failures.push_back(fail[i]);
        }
    }
    acc.finish(out);
    return out;
}

double margin(const AxisRange& r, double frac) { return r.periodic ? 0.0 : frac * r.length(); }

}  // namespace

std::vector<SurfaceSample> sample_surface_collar(const SurfaceGeometry& geom,
                                                 const ClosestPointProjector& proj, int n,
                                                 Rng& rng, double sigma_frac, double sigma_cap) {
    std::vector<SurfaceSample> out;
    out.reserve(n);
    double m1 = margin(geom.range1(), 0.08), m2 = margin(geom.range2(), 0.08);
    double cap_out = sigma_frac * std::min(proj.bounds().outward, sigma_cap);
    double cap_in = sigma_frac * std::min(proj.bounds().inward, sigma_cap);
    for (int i = 0; i < n; ++i) {
        SurfaceSample s;
        s.pt.s1 = rng.uniform(geom.range1().lo + m1, geom.range1().hi - m1);
        s.pt.s2 = rng.uniform(geom.range2().lo + m2, geom.range2().hi - m2);
        s.pt.sigma = rng.uniform(-cap_in, cap_out);
        s.x = to_cartesian(geom, s.pt.s1, s.pt.s2, s.pt.sigma);
        out.push_back(s);
    }
    return out;
}

std::vector<TubeSample> sample_tube_collar(const TubeContext& ctx, int n, Rng& rng,
                                           double sigma_cap) {
    const CurveGeometry& c = *ctx.curve;
    // curvature sweep for the focal bound
    double kmax = 0.0;
    for (int i = 0; i <= 64; ++i) {
        double s = c.range().lo + c.range().length() * i / 64.0;
        kmax = std::max(kmax, primal(frenet_frame<double>(c, s, ctx.tau).kappa));
    }
    double cap = kmax > 1e-12 ? std::min(sigma_cap, 0.8 / kmax) : sigma_cap;
    double m = margin(c.range(), 0.06);
    std::vector<TubeSample> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
        TubeSample s;
        s.pt.s = rng.uniform(c.range().lo + m, c.range().hi - m);
        s.pt.theta = rng.uniform(0.0, 2.0 * M_PI);
        s.pt.sigma = rng.uniform(0.12 * cap, cap);
        s.pt.tau = ctx.tau;
        s.x = tube_to_cartesian(ctx, s.pt.s, s.pt.theta, s.pt.sigma);
        out.push_back(s);
    }
    return out;
}

namespace {

// ---- surface suite pieces -------------------------------------------------

void run_eikonal_checks(const SurfaceGeometry& geom, const ClosestPointProjector& proj,
                        const VerifyConfig& cfg, SuiteReport& rep) {
    Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);
    auto samples = sample_surface_collar(geom, proj, cfg.n_eikonal, rng);
    int n = static_cast<int>(samples.size());
    std::vector<double> eik(n, 0), ang(n, 0), rt(n, 0);
    parallel_for(n, [&](int i) {
        const auto& s = samples[i];
        SdfCoordinates c = proj.project(s.x);
        rt[i] = std::max({std::abs(c.sigma - s.pt.sigma),
                          norm(to_cartesian(geom, c.s1, c.s2, c.sigma) - s.x)});
        double h = 1e-5 * std::max(1.0, norm(s.x));
        Vec3d grad;
        for (int axis = 0; axis < 3; ++axis) {
            Vec3d dx{};
            dx[axis] = h;
            grad[axis] = (proj.project_from(s.x + dx, c.s1, c.s2).sigma -
                          proj.project_from(s.x - dx, c.s1, c.s2).sigma) /
                         (2 * h);
        }
        eik[i] = std::abs(norm(grad) - 1.0);
        ang[i] = std::asin(std::min(1.0, norm(cross(normalized(grad), c.nhat))));
    });
    CheckResult e{"eikonal.grad_dev", 0, 1e-7, 0, n, false, {}};
    CheckResult a{"eikonal.angle", 0, 1e-7, 0, n, false, {}};
    CheckResult r{"eikonal.roundtrip", 0, 1e-8, 0, n, false, {}};
    for (int i = 0; i < n; ++i) {
        e.measured = std::max(e.measured, eik[i]);
        a.measured = std::max(a.measured, ang[i]);
        r.measured = std::max(r.measured, rt[i]);
    }
    e.max_abs = e.measured;
    a.max_abs = a.measured;
    r.max_abs = r.measured;
    rep.checks.push_back(e);
    rep.checks.push_back(a);
    rep.checks.push_back(r);
}

void run_codazzi_checks(const SurfaceGeometry& geom, const VerifyConfig& cfg, SuiteReport& rep) {
    CheckResult c{"curvature.codazzi_egregium", 0, 1e-6, 0, 0, false, {}};
    int n = cfg.grid_n;
    std::vector<double> vals(static_cast<std::size_t>(n) * n, 0.0);
    parallel_for(n * n, [&](int idx) {
        int i = idx / n, j = idx % n;
        double a = geom.range1().lo + (i + 0.5) * geom.range1().length() / n;
        double b = geom.range2().lo + (j + 0.5) * geom.range2().length() / n;
        CurvatureData cd = shape_operator(geom, a, b);
        if (cd.umbilic || std::abs(cd.kappa1 - cd.kappa2) <
                              1e-3 * std::max({1.0, std::abs(cd.kappa1), std::abs(cd.kappa2)}))
            return;  // umbilics excluded
        auto r = codazzi_egregium_residuals(geom, a, b);
        vals[idx] = std::max({std::abs(r[0]), std::abs(r[1]), std::abs(r[2])});
    });
    for (double v : vals) c.measured = std::max(c.measured, v);
    c.max_abs = c.measured;
    c.n_points = n * n;
    rep.checks.push_back(c);
}

void run_surface_oracle_checks(const SurfaceGeometry& geom, const ClosestPointProjector& proj,
                               const VerifyConfig& cfg, SuiteReport& rep) {
    Rng rng(cfg.seed);
    auto samples = sample_surface_collar(geom, proj, cfg.n_points, rng);
    SurfaceGeometry faulted = geom.with_kappa1_fault(kFault);
    // control samples favor large |sigma| where the curvature fault has the
    // most leverage
    Rng frng(cfg.seed ^ 0xabcdef12345678ull);
    auto fault_samples = sample_surface_collar(geom, proj, std::min(cfg.n_points, 50), frng,
                                               0.85, 0.8);
    for (auto& s : fault_samples) {
        double cap = 0.8 * std::min(proj.bounds().cap(s.pt.sigma), 0.8);
        double mag = std::max(std::abs(s.pt.sigma), 0.5 * cap);
        s.pt.sigma = s.pt.sigma >= 0 ? mag : -mag;
        s.x = to_cartesian(geom, s.pt.s1, s.pt.s2, s.pt.sigma);
    }

    struct OpDef {
        const char* name;
        bool needs_scalar;
    };
    const OpDef ops[] = {
        {"grad", true},     {"div", false},     {"curl", false},
        {"lap", true},      {"veclap", false},  {"curlcurl", false},
        {"hessian", true},  {"vecgrad", false}, {"convective", false},
    };

    for (const auto& op : ops) {
        CheckResult total{std::string("oracle.") + op.name, 0, cfg.oracle_tol, 0, 0, false, {}};
        for (int k = 0; k < cfg.n_fields; ++k) {
            Rng fieldrng(cfg.seed + 1000 * (k + 1));
            auto f = make_random_surface_scalar(fieldrng);
            auto u = make_random_surface_vector(fieldrng);
            SurfacePullbackScalar ambf(proj, f);
            SurfacePullbackVector ambu(proj, u);
            std::string nm = total.name + ".f" + std::to_string(k);
            CheckResult part;
            std::string name(op.name);
            if (name == "grad")
                part = compare_batch<Vec3d>(nm, cfg.oracle_tol, samples,
                                            [&](const SurfaceSample& s) { return gradient(geom, *f, s.pt); },
                                            [&](const SurfaceSample& s) { return fd_grad(ambf, s.x); });
            else if (name == "div")
                part = compare_batch<double>(nm, cfg.oracle_tol, samples,
                                             [&](const SurfaceSample& s) { return divergence(geom, *u, s.pt); },
                                             [&](const SurfaceSample& s) { return fd_div(ambu, s.x); });
            else if (name == "curl")
                part = compare_batch<Vec3d>(nm, cfg.oracle_tol, samples,
                                            [&](const SurfaceSample& s) { return curl(geom, *u, s.pt); },
                                            [&](const SurfaceSample& s) { return fd_curl(ambu, s.x); });
            else if (name == "lap")
                part = compare_batch<double>(nm, cfg.oracle_tol, samples,
                                             [&](const SurfaceSample& s) { return scalar_laplacian(geom, *f, s.pt); },
                                             [&](const SurfaceSample& s) { return fd_scalar_lap(ambf, s.x); });
            else if (name == "veclap")
                part = compare_batch<Vec3d>(nm, cfg.oracle_tol, samples,
                                            [&](const SurfaceSample& s) { return vector_laplacian(geom, *u, s.pt); },
                                            [&](const SurfaceSample& s) { return fd_vector_lap(ambu, s.x); });
            else if (name == "curlcurl")
                part = compare_batch<Vec3d>(nm, cfg.oracle_tol, samples,
                                            [&](const SurfaceSample& s) { return curl_curl(geom, *u, s.pt); },
                                            [&](const SurfaceSample& s) { return fd_curl_curl(ambu, s.x); });
            else if (name == "hessian")
                part = compare_batch<Mat3d>(nm, cfg.oracle_tol, samples,
                                            [&](const SurfaceSample& s) { return hessian(geom, *f, s.pt); },
                                            [&](const SurfaceSample& s) { return fd_hessian(ambf, s.x); });
            else if (name == "vecgrad")
                part = compare_batch<Mat3d>(nm, cfg.oracle_tol, samples,
                                            [&](const SurfaceSample& s) { return vector_gradient(geom, *u, s.pt); },
                                            [&](const SurfaceSample& s) { return fd_vector_gradient(ambu, s.x); });
            else
                part = compare_batch<Vec3d>(nm, cfg.oracle_tol, samples,
                                            [&](const SurfaceSample& s) { return convective_derivative(geom, *u, s.pt); },
                                            [&](const SurfaceSample& s) { return fd_convective(ambu, s.x); });
            total.measured = std::max(total.measured, part.measured);
            total.max_abs = std::max(total.max_abs, part.max_abs);
            total.n_points += part.n_points;
            for (auto& msg : part.failures) total.failures.push_back(msg);
        }
        rep.checks.push_back(total);

        // negative control: biasing kappa1 by 1e-3 must push the comparison
        // above the tolerance (sensitivity of the whole pipeline)
        Rng fieldrng(cfg.seed + 1000);
        auto f = make_random_surface_scalar(fieldrng);
        auto u = make_random_surface_vector(fieldrng);
        SurfacePullbackScalar ambf(proj, f);
        SurfacePullbackVector ambu(proj, u);
        CheckResult control;
        std::string nm = std::string("control.") + op.name;
        std::string name(op.name);
        if (name == "grad")
            control = compare_batch<Vec3d>(nm, cfg.oracle_tol, fault_samples,
                                           [&](const SurfaceSample& s) { return gradient(faulted, *f, s.pt); },
                                           [&](const SurfaceSample& s) { return fd_grad(ambf, s.x); });
        else if (name == "div")
            control = compare_batch<double>(nm, cfg.oracle_tol, fault_samples,
                                            [&](const SurfaceSample& s) { return divergence(faulted, *u, s.pt); },
                                            [&](const SurfaceSample& s) { return fd_div(ambu, s.x); });
        else if (name == "curl")
            control = compare_batch<Vec3d>(nm, cfg.oracle_tol, fault_samples,
                                           [&](const SurfaceSample& s) { return curl(faulted, *u, s.pt); },
                                           [&](const SurfaceSample& s) { return fd_curl(ambu, s.x); });
        else if (name == "lap")
            control = compare_batch<double>(nm, cfg.oracle_tol, fault_samples,
                                            [&](const SurfaceSample& s) { return scalar_laplacian(faulted, *f, s.pt); },
                                            [&](const SurfaceSample& s) { return fd_scalar_lap(ambf, s.x); });
        else if (name == "veclap")
            control = compare_batch<Vec3d>(nm, cfg.oracle_tol, fault_samples,
                                           [&](const SurfaceSample& s) { return vector_laplacian(faulted, *u, s.pt); },
                                           [&](const SurfaceSample& s) { return fd_vector_lap(ambu, s.x); });
        else if (name == "curlcurl")
            control = compare_batch<Vec3d>(nm, cfg.oracle_tol, fault_samples,
                                           [&](const SurfaceSample& s) { return curl_curl(faulted, *u, s.pt); },
                                           [&](const SurfaceSample& s) { return fd_curl_curl(ambu, s.x); });
        else if (name == "hessian")
            control = compare_batch<Mat3d>(nm, cfg.oracle_tol, fault_samples,
                                           [&](const SurfaceSample& s) { return hessian(faulted, *f, s.pt); },
                                           [&](const SurfaceSample& s) { return fd_hessian(ambf, s.x); });
        else if (name == "vecgrad")
            control = compare_batch<Mat3d>(nm, cfg.oracle_tol, fault_samples,
                                           [&](const SurfaceSample& s) { return vector_gradient(faulted, *u, s.pt); },
                                           [&](const SurfaceSample& s) { return fd_vector_gradient(ambu, s.x); });
        else
            control = compare_batch<Vec3d>(nm, cfg.oracle_tol, fault_samples,
                                           [&](const SurfaceSample& s) { return convective_derivative(faulted, *u, s.pt); },
                                           [&](const SurfaceSample& s) { return fd_convective(ambu, s.x); });
        control.invert = true;
        rep.checks.push_back(control);
    }
}

void run_surface_identity_checks(const SurfaceGeometry& geom, const ClosestPointProjector& proj,
                                 const VerifyConfig& cfg, SuiteReport& rep) {
    Rng rng(cfg.seed ^ 0x5555aaaa5555aaaaull);
    auto samples = sample_surface_collar(geom, proj, cfg.n_identity, rng, 0.6, 0.4);
    Rng fieldrng(cfg.seed + 77);
    auto f = make_random_surface_scalar(fieldrng);
    auto u = make_random_surface_vector(fieldrng);

    // operator-as-field wrappers bounded to the lift depth identities need
    auto curl_as_field = [&]() {
        auto fn = [u](const SurfaceGeometry& g, const FrameGauge* gauge, const auto& sg,
                      const auto& a, const auto& b, const auto& tau) {
            using T = std::decay_t<decltype(sg)>;
            if constexpr (liftable_v<T, 2>) {
                FrameGauge local = gauge ? *gauge : FrameGauge{};
                Vec3<T> c = surfops::curl_T<T>(g, *u, local, sg, a, b, tau);
                SurfaceFrame<T> F = surface_frame<T>(g, a, b, tau, &local);
                return SurfVec<T>{dot(c, F.nhat), dot(c, F.that1), dot(c, F.that2)};
            } else {
                throw Error("not liftable");
                return SurfVec<T>{};
            }
        };
        return std::make_shared<CallableSurfaceVectorField<decltype(fn)>>(fn);
    }();
    auto grad_as_field = [&]() {
        auto fn = [f](const SurfaceGeometry& g, const FrameGauge* gauge, const auto& sg,
                      const auto& a, const auto& b, const auto& tau) {
            using T = std::decay_t<decltype(sg)>;
            if constexpr (liftable_v<T, 2>) {
                FrameGauge local = gauge ? *gauge : FrameGauge{};
                Vec3<T> c = surfops::gradient_T<T>(g, *f, local, sg, a, b, tau);
                SurfaceFrame<T> F = surface_frame<T>(g, a, b, tau, &local);
                return SurfVec<T>{dot(c, F.nhat), dot(c, F.that1), dot(c, F.that2)};
            } else {
                throw Error("not liftable");
                return SurfVec<T>{};
            }
        };
        return std::make_shared<CallableSurfaceVectorField<decltype(fn)>>(fn);
    }();
    auto div_as_field = [&]() {
        auto fn = [u](const SurfaceGeometry& g, const FrameGauge* gauge, const auto& sg,
                      const auto& a, const auto& b, const auto& tau) {
            using T = std::decay_t<decltype(sg)>;
            if constexpr (liftable_v<T, 2>) {
                FrameGauge local = gauge ? *gauge : FrameGauge{};
                return surfops::divergence_T<T>(g, *u, local, sg, a, b, tau);
            } else {
                throw Error("not liftable");
                return T{};
            }
        };
        return std::make_shared<CallableSurfaceScalarField<decltype(fn)>>(fn);
    }();

    int n = static_cast<int>(samples.size());
    std::vector<double> cg(n, 0), dc(n, 0), vl(n, 0), hs(n, 0), cm(n, 0);
    std::vector<char> cm_used(n, 0);
    parallel_for(n, [&](int i) {
        const auto& s = samples[i];
        cg[i] = norm(curl(geom, *grad_as_field, s.pt));
        dc[i] = std::abs(divergence(geom, *curl_as_field, s.pt));
        Vec3d lap = vector_laplacian(geom, *u, s.pt);
        Vec3d gd = gradient(geom, *div_as_field, s.pt);
        Vec3d cc = curl_curl(geom, *u, s.pt);  // -curl curl u
        vl[i] = norm(lap - gd - cc) / std::max(1.0, norm(lap));
        Mat3d H = hessian(geom, *f, s.pt);
        hs[i] = max_abs(H - transpose(H));
        CurvatureData cd = shape_operator(geom, s.pt.s1, s.pt.s2, s.pt.tau);
        bool near_umbilic = !cd.umbilic && std::abs(cd.kappa1 - cd.kappa2) <
                                               1e-3 * std::max(1.0, std::abs(cd.kappa1));
        if (!near_umbilic) {
            auto r = commutator_residuals(geom, *f, s.pt);
            cm[i] = std::max({std::abs(r[0]), std::abs(r[1]), std::abs(r[2])});
            cm_used[i] = 1;
        }
    });
    auto push = [&](const char* name, const std::vector<double>& v, double tol) {
        CheckResult c{name, 0, tol, 0, n, false, {}};
        for (double x : v) c.measured = std::max(c.measured, x);
        c.max_abs = c.measured;
        rep.checks.push_back(c);
    };
    push("identity.curl_grad", cg, 1e-6);
    push("identity.div_curl", dc, 1e-6);
    push("identity.veclap_decomposition", vl, 1e-6);
    push("identity.hessian_symmetry", hs, 1e-6);
    push("identity.commutators", cm, 1e-6);
}

}  // namespace

SuiteReport verify_surface_suite(const SurfaceGeometry& geom, const VerifyConfig& cfg) {
    SuiteReport rep;
    rep.suite = "surface";
    rep.geometry = geom.name();
    ClosestPointProjector proj(geom);
    run_eikonal_checks(geom, proj, cfg, rep);
    run_codazzi_checks(geom, cfg, rep);
    run_surface_oracle_checks(geom, proj, cfg, rep);
    run_surface_identity_checks(geom, proj, cfg, rep);
    return rep;
}

// ---- tube suite ------------------------------------------------------------

namespace {

void run_tube_orthogonality(const CurveGeometry& curve, const VerifyConfig& cfg,
                            SuiteReport& rep) {
    BishopAngle bishop(curve, 0.0, 0.0);
    TubeContext rotated = make_tube_context(&curve, &bishop);
    TubeContext bare = make_tube_context(&curve, nullptr);

    // max torsion decides whether the negative control is meaningful
    double omega_max = 0.0;
    for (int i = 0; i <= 64; ++i) {
        double s = curve.range().lo + curve.range().length() * i / 64.0;
        omega_max = std::max(omega_max, std::abs(frenet_frame<double>(curve, s, 0.0).omega));
    }

    Rng rng(cfg.seed ^ 0x1234abcdull);
    double m = margin(curve.range(), 0.06);
    int n = cfg.n_ortho;
    std::vector<double> rot(n, 0), ctrl(n, 0);
    std::vector<std::array<double, 3>> pts(n);
    for (int i = 0; i < n; ++i)
        pts[i] = {rng.uniform(curve.range().lo + m, curve.range().hi - m),
                  rng.uniform(0.0, 2 * M_PI), rng.uniform(0.05, 0.5)};
    parallel_for(n, [&](int i) {
        auto [s, th, sg] = pts[i];
        auto rows = tube_jacobian_rows(rotated, s, th, sg);
        double r01 = std::abs(dot(rows[0], rows[1])) / (norm(rows[0]) * norm(rows[1]));
        double r02 = std::abs(dot(rows[0], rows[2])) / (norm(rows[0]) * norm(rows[2]));
        double r12 = std::abs(dot(rows[1], rows[2])) / (norm(rows[1]) * norm(rows[2]));
        rot[i] = std::max({r01, r02, r12});
        if (sg > 0.4) {
            auto braw = tube_jacobian_rows(bare, s, th, sg);
            ctrl[i] = std::abs(dot(braw[0], braw[1])) / (norm(braw[0]) * norm(braw[1]));
        }
    });
    CheckResult c{"ortho.rotated", 0, 1e-8, 0, n, false, {}};
    for (double v : rot) c.measured = std::max(c.measured, v);
    c.max_abs = c.measured;
    rep.checks.push_back(c);
    if (omega_max > 1e-6) {
        CheckResult b{"ortho.control_unrotated", 0, 1e-3, 0, n, true, {}};
        for (double v : ctrl) b.measured = std::max(b.measured, v);
        b.max_abs = b.measured;
        rep.checks.push_back(b);
    }
}

void run_tube_oracle_checks(const CurveGeometry& curve, const VerifyConfig& cfg,
                            SuiteReport& rep) {
    BishopAngle bishop(curve, 0.0, 0.0);
    TubeContext ctx = make_tube_context(&curve, &bishop);
    TubeProjector proj(ctx);

    CurveGeometry faulted = curve.with_kappa_fault(kFault);
    BishopAngle fbishop(faulted, 0.0, 0.0);
    TubeContext fctx = make_tube_context(&faulted, &fbishop);

    Rng rng(cfg.seed);
    auto samples = sample_tube_collar(ctx, cfg.n_points, rng);
    Rng frng(cfg.seed ^ 0x777777ull);
    auto fault_samples = sample_tube_collar(ctx, std::min(cfg.n_points, 50), frng, 0.4);

    const char* ops[] = {"grad", "vecgrad", "div", "lap", "curl", "veclap"};
    for (const char* opname : ops) {
        std::string name(opname);
        CheckResult total{std::string("oracle.") + name, 0, cfg.oracle_tol, 0, 0, false, {}};
        for (int k = 0; k < cfg.n_fields; ++k) {
            Rng fieldrng(cfg.seed + 1000 * (k + 1));
            auto f = make_random_tube_scalar(fieldrng);
            auto u = make_random_tube_vector(fieldrng);
            TubePullbackScalar ambf(proj, f);
            TubePullbackVector ambu(proj, u);
            std::string nm = total.name + ".f" + std::to_string(k);
            CheckResult part;
            if (name == "grad")
                part = compare_batch<Vec3d>(nm, cfg.oracle_tol, samples,
                                            [&](const TubeSample& s) { return tube_gradient(ctx, *f, s.pt); },
                                            [&](const TubeSample& s) { return fd_grad(ambf, s.x); });
            else if (name == "vecgrad")
                part = compare_batch<Mat3d>(nm, cfg.oracle_tol, samples,
                                            [&](const TubeSample& s) { return tube_vector_gradient(ctx, *u, s.pt); },
                                            [&](const TubeSample& s) { return fd_vector_gradient(ambu, s.x); });
            else if (name == "div")
                part = compare_batch<double>(nm, cfg.oracle_tol, samples,
                                             [&](const TubeSample& s) { return tube_divergence(ctx, *u, s.pt); },
                                             [&](const TubeSample& s) { return fd_div(ambu, s.x); });
            else if (name == "lap")
                part = compare_batch<double>(nm, cfg.oracle_tol, samples,
                                             [&](const TubeSample& s) { return tube_scalar_laplacian(ctx, *f, s.pt); },
                                             [&](const TubeSample& s) { return fd_scalar_lap(ambf, s.x); });
            else if (name == "curl")
                part = compare_batch<Vec3d>(nm, cfg.oracle_tol, samples,
                                            [&](const TubeSample& s) { return tube_curl(ctx, *u, s.pt); },
                                            [&](const TubeSample& s) { return fd_curl(ambu, s.x); });
            else
                part = compare_batch<Vec3d>(nm, cfg.oracle_tol, samples,
                                            [&](const TubeSample& s) { return tube_vector_laplacian(ctx, *u, s.pt); },
                                            [&](const TubeSample& s) { return fd_vector_lap(ambu, s.x); });
            total.measured = std::max(total.measured, part.measured);
            total.max_abs = std::max(total.max_abs, part.max_abs);
            total.n_points += part.n_points;
            for (auto& msg : part.failures) total.failures.push_back(msg);
        }
        rep.checks.push_back(total);

        // curvature-fault negative control (skipped for straight lines where
        // no operator depends on kappa)
        bool has_curvature = false;
        for (int i = 0; i <= 16; ++i) {
            double s = curve.range().lo + curve.range().length() * i / 16.0;
            if (primal(frenet_frame<double>(curve, s, 0.0).kappa) > 1e-10) has_curvature = true;
        }
        if (!has_curvature) continue;
        Rng fieldrng(cfg.seed + 1000);
        auto f = make_random_tube_scalar(fieldrng);
        auto u = make_random_tube_vector(fieldrng);
        TubePullbackScalar ambf(proj, f);
        TubePullbackVector ambu(proj, u);
        std::string nm = std::string("control.") + name;
        CheckResult control;
        if (name == "vecgrad")
            control = compare_batch<Mat3d>(nm, cfg.oracle_tol, fault_samples,
                                           [&](const TubeSample& s) { return tube_vector_gradient(fctx, *u, s.pt); },
                                           [&](const TubeSample& s) { return fd_vector_gradient(ambu, s.x); });
        else if (name == "div")
            control = compare_batch<double>(nm, cfg.oracle_tol, fault_samples,
                                            [&](const TubeSample& s) { return tube_divergence(fctx, *u, s.pt); },
                                            [&](const TubeSample& s) { return fd_div(ambu, s.x); });
        else if (name == "lap")
            control = compare_batch<double>(nm, cfg.oracle_tol, fault_samples,
                                            [&](const TubeSample& s) { return tube_scalar_laplacian(fctx, *f, s.pt); },
                                            [&](const TubeSample& s) { return fd_scalar_lap(ambf, s.x); });
        else if (name == "curl")
            control = compare_batch<Vec3d>(nm, cfg.oracle_tol, fault_samples,
                                           [&](const TubeSample& s) { return tube_curl(fctx, *u, s.pt); },
                                           [&](const TubeSample& s) { return fd_curl(ambu, s.x); });
        else
            control = compare_batch<Vec3d>(nm, cfg.oracle_tol, fault_samples,
                                           [&](const TubeSample& s) { return tube_vector_laplacian(fctx, *u, s.pt); },
                                           [&](const TubeSample& s) { return fd_vector_lap(ambu, s.x); });
        control.invert = true;
        rep.checks.push_back(control);
    }
}

}  // namespace

SuiteReport verify_tube_suite(const CurveGeometry& curve, const VerifyConfig& cfg) {
    SuiteReport rep;
    rep.suite = "tube";
    rep.geometry = curve.name();
    run_tube_orthogonality(curve, cfg, rep);
    run_tube_oracle_checks(curve, cfg, rep);

    // vector identity within tube evaluation
    BishopAngle bishop(curve, 0.0, 0.0);
    TubeContext ctx = make_tube_context(&curve, &bishop);
    Rng rng(cfg.seed + 5);
    auto samples = sample_tube_collar(ctx, cfg.n_identity, rng, 0.35);
    Rng fieldrng(cfg.seed + 77);
    auto u = make_random_tube_vector(fieldrng);
    auto divf = [&]() {
        auto fn = [u](const TubeContext& c, const auto& s, const auto& th, const auto& sg,
                      const auto& tau) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (liftable_v<T, 2>) {
                return tubeops::tube_divergence_T<T>(c, *u, s, th, sg, tau);
            } else {
                throw Error("not liftable");
                return T{};
            }
        };
        return std::make_shared<CallableTubeScalarField<decltype(fn)>>(fn);
    }();
    auto curlf = [&]() {
        auto fn = [u](const TubeContext& c, const auto& s, const auto& th, const auto& sg,
                      const auto& tau) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (liftable_v<T, 2>) {
                Vec3<T> cv = tubeops::tube_curl_T<T>(c, *u, s, th, sg, tau);
                TubeFrameT<T> tf = tube_frame_T<T>(c, s, th, sg);
                return TubVec<T>{dot(cv, tf.t_s), dot(cv, tf.t_sigma), dot(cv, tf.t_theta)};
            } else {
                throw Error("not liftable");
                return TubVec<T>{};
            }
        };
        return std::make_shared<CallableTubeVectorField<decltype(fn)>>(fn);
    }();
    int n = static_cast<int>(samples.size());
    std::vector<double> res(n, 0);
    parallel_for(n, [&](int i) {
        const auto& s = samples[i];
        Vec3d lap = tube_vector_laplacian(ctx, *u, s.pt);
        Vec3d gd = tube_gradient(ctx, *divf, s.pt);
        Vec3d cc = tube_curl(ctx, *curlf, s.pt);
        res[i] = norm(lap - (gd - cc)) / std::max(1.0, norm(lap));
    });
    CheckResult c{"identity.veclap_decomposition", 0, 1e-6, 0, n, false, {}};
    for (double v : res) c.measured = std::max(c.measured, v);
    c.max_abs = c.measured;
    rep.checks.push_back(c);
    return rep;
}

// ---- evolution suites --------------------------------------------------------

SuiteReport verify_evolution_suite(const SurfaceGeometry& geom, const VerifyConfig& cfg) {
    SuiteReport rep;
    rep.suite = "evolution";
    rep.geometry = geom.name();
    ChartMotion motion;
    double tau = 0.0, dt = 1e-5;

    ClosestPointProjector proj0(geom, tau);
    Rng rng(cfg.seed);
    auto samples = sample_surface_collar(geom, proj0, 20, rng, 0.5, 0.3);

    CheckResult dts{"evolution.dtsigma_fd", 0, 1e-5, 0, 0, false, {}};
    CheckResult dsv{"evolution.dtsvec_fd", 0, 1e-5, 0, 0, false, {}};
    if (geom.time_dependent()) {
        ClosestPointProjector pp(geom, tau + dt), pm(geom, tau - dt);
        for (const auto& s : samples) {
            CoordinateRates cr = dt_coordinates(geom, motion, s.pt);
            SdfCoordinates cp = pp.project(s.x), cm = pm.project(s.x);
            dts.measured =
                std::max(dts.measured, std::abs(cr.dt_sigma - (cp.sigma - cm.sigma) / (2 * dt)));
            SurfaceFrame<double> F = surface_frame<double>(geom, s.pt.s1, s.pt.s2, tau);
            Vec3d fd_vec = F.t1 * ((cp.s1 - cm.s1) / (2 * dt)) + F.t2 * ((cp.s2 - cm.s2) / (2 * dt));
            dsv.measured = std::max(dsv.measured, norm(cr.dt_s_vec - fd_vec));
            dts.n_points++;
        }
    }
    dts.max_abs = dts.measured;
    dsv.max_abs = dsv.measured;
    rep.checks.push_back(dts);
    rep.checks.push_back(dsv);

    CheckResult chain{"evolution.chain_rule", 0, 1e-6, 0, 0, false, {}};
    for (const char* coord : {"x", "y", "z"}) {
        auto fc = std::make_shared<AmbientExprSurfaceScalarField>(parse_expr(coord));
        for (int i = 0; i < 8 && i < static_cast<int>(samples.size()); ++i) {
            chain.measured =
                std::max(chain.measured, std::abs(dt_scalar(geom, *fc, motion, samples[i].pt)));
            chain.n_points++;
        }
    }
    chain.max_abs = chain.measured;
    rep.checks.push_back(chain);

    // ambient-steady vector field: complete dt_vector must return zero
    CheckResult steady{"evolution.steady_vector", 0, 1e-5, 0, 0, false, {}};
    auto usteady = std::make_shared<AmbientExprSurfaceVectorField>(std::array<ExprPtr, 3>{
        parse_expr("x*y + z"), parse_expr("sin(x) - y*z"), parse_expr("x + cos(y)")});
    for (int i = 0; i < 8 && i < static_cast<int>(samples.size()); ++i) {
        steady.measured =
            std::max(steady.measured, norm(dt_vector(geom, *usteady, motion, samples[i].pt)));
        steady.n_points++;
    }
    steady.max_abs = steady.measured;
    rep.checks.push_back(steady);
    return rep;
}

SuiteReport verify_evolution_suite(const CurveGeometry& curve, const VerifyConfig& cfg) {
    SuiteReport rep;
    rep.suite = "evolution";
    rep.geometry = curve.name();
    ChartCurveMotion motion;
    double tau = curve.time_dependent() ? 0.5 : 0.0;

    CheckResult constr{"evolution.frenet_constraints", 0, 1e-6, 0, 0, false, {}};
    CheckResult torsion{"evolution.torsion_fd_rel", 0, 1e-3, 0, 0, false, {}};
    CheckResult frame{"evolution.frenet_frame_fd", 0, 1e-6, 0, 0, false, {}};
    double m = margin(curve.range(), 0.1);
    double dt = 1e-4;
    Rng rng(cfg.seed);
    for (int i = 0; i < 12; ++i) {
        double s = rng.uniform(curve.range().lo + m, curve.range().hi - m);
        try {
            auto r = frenet_constraint_residuals(curve, motion, s, tau);
            constr.measured = std::max(constr.measured, std::max(std::abs(r[0]), std::abs(r[1])));
            constr.n_points++;

            FrenetFrameT<double> F = frenet_frame<double>(curve, s, tau);
            if (primal(F.kappa) > 1e-6) {
                double mine = torsion_evolution(curve, motion, s, tau);
                double fd = (frenet_frame<double>(curve, s, tau + dt).omega -
                             frenet_frame<double>(curve, s, tau - dt).omega) /
                            (2 * dt);
                torsion.measured = std::max(
                    torsion.measured, std::abs(mine - fd) / std::max(1.0, std::abs(fd)));
                torsion.n_points++;

                FrenetEvolution fe = dt_frenet(curve, motion, s, tau);
                double dtf = 1e-5;
                FrenetFrameT<double> Fp = frenet_frame<double>(curve, s, tau + dtf);
                FrenetFrameT<double> Fm = frenet_frame<double>(curve, s, tau - dtf);
                double err = std::max({norm(fe.dtau_that - (Fp.that - Fm.that) / (2 * dtf)),
                                       norm(fe.dtau_nhat - (Fp.nhat - Fm.nhat) / (2 * dtf)),
                                       norm(fe.dtau_bhat - (Fp.bhat - Fm.bhat) / (2 * dtf))});
                frame.measured = std::max(frame.measured, err);
                frame.n_points++;
            }
        } catch (const Error& e) {
            constr.failures.push_back(e.what());
        }
    }
    constr.max_abs = constr.measured;
    torsion.max_abs = torsion.measured;
    frame.max_abs = frame.measured;
    rep.checks.push_back(constr);
    rep.checks.push_back(torsion);
    rep.checks.push_back(frame);

    // coordinate-rate and chain-rule checks need the full tube machinery
    if (curve.time_dependent()) {
        TubeBundle b0(curve, tau, 0.0), bp(curve, tau + 1e-5, 0.0), bm(curve, tau - 1e-5, 0.0);
        TubeProjector pp(bp.ctx()), pm(bm.ctx());
        CheckResult rates{"evolution.tube_coordinate_fd", 0, 1e-5, 0, 0, false, {}};
        CheckResult chain{"evolution.chain_rule", 0, 1e-6, 0, 0, false, {}};
        for (int i = 0; i < 6; ++i) {
            double s = rng.uniform(curve.range().lo + m, curve.range().hi - m);
            TubePoint p{s, rng.uniform(0.0, 2 * M_PI), 0.09, tau};
            try {
                TubeCoordinateRates r = dt_tube_coordinates(b0.ctx(), motion, p);
                Vec3d x = tube_to_cartesian(b0.ctx(), p.s, p.theta, p.sigma);
                TubeCoordinates cp = pp.project(x), cm = pm.project(x);
                double derr = std::max(
                    {std::abs(r.dt_s - (cp.s - cm.s) / 2e-5),
                     std::abs(r.dt_sigma - (cp.sigma - cm.sigma) / 2e-5),
                     std::abs(r.dt_theta - std::remainder(cp.theta - cm.theta, 2 * M_PI) / 2e-5)});
                rates.measured = std::max(rates.measured, derr);
                rates.n_points++;
                for (const char* coord : {"x", "y", "z"}) {
                    auto fc = std::make_shared<AmbientExprTubeScalarField>(parse_expr(coord));
                    chain.measured = std::max(
                        chain.measured, std::abs(dt_scalar_tube(b0.ctx(), *fc, motion, p)));
                    chain.n_points++;
                }
            } catch (const Error& e) {
                rates.failures.push_back(e.what());
            }
        }
        rates.max_abs = rates.measured;
        chain.max_abs = chain.measured;
        rep.checks.push_back(rates);
        rep.checks.push_back(chain);
    }
    return rep;
}

// ---- asymptotics suites ----------------------------------------------------

namespace {

std::vector<double> default_eps_grid() {
    return {1e-1, std::pow(10.0, -1.5), 1e-2, std::pow(10.0, -2.5)};
}

void slope_check(SuiteReport& rep, const std::string& name, const SlopeResult& sr, int K) {
    CheckResult c{name, 0, 0.2, 0, sr.n_used, false, {}};
    if (sr.exact) {
        c.measured = 0.0;  // error at the roundoff floor counts as exact
    } else {
        c.measured = std::abs(sr.slope - (K + 1));
    }
    c.max_abs = c.measured;
    rep.checks.push_back(c);
}

}  // namespace

SuiteReport verify_asymptotics_suite(const SurfaceGeometry& geom, const VerifyConfig& cfg) {
    SuiteReport rep;
    rep.suite = "asymptotics";
    rep.geometry = geom.name();
    (void)cfg;

    auto f = std::make_shared<SurfaceExprScalarField>(
        parse_expr("exp(0.5*sigma)*(1+0.2*sin(s1))*cos(s2)"));
    auto u = std::make_shared<SurfaceExprVectorField>(std::array<ExprPtr, 3>{
        parse_expr("sigma*cos(s1)"), parse_expr("exp(0.3*sigma)*sin(s2)"),
        parse_expr("sigma^2+0.5*cos(s1)")});
    LayerPoint at{geom.range1().lo + 0.45 * geom.range1().length(),
                  geom.range2().lo + 0.3 * geom.range2().length(), 0.8, 0.0};
    auto eps = default_eps_grid();

    for (int K : {0, 1, 2}) {
        slope_check(rep, "slope.lap.K" + std::to_string(K),
                    convergence_slope(geom, SurfaceExpandOp::ScalarLap, {f, nullptr, nullptr},
                                      at, K, eps),
                    K);
        slope_check(rep, "slope.div.K" + std::to_string(K),
                    convergence_slope(geom, SurfaceExpandOp::Div, {nullptr, u, nullptr}, at, K,
                                      eps),
                    K);
        slope_check(rep, "slope.advect.K" + std::to_string(K),
                    convergence_slope(geom, SurfaceExpandOp::AdvectScalar, {f, u, nullptr}, at,
                                      K, eps),
                    K);
    }

    // leading-coefficient cross-check where the curvature is constant
    SurfaceFrame<double> F0 = surface_frame<double>(geom, at.s1, at.s2, 0.0);
    bool constant_curv = true;
    for (int i = 0; i < 5 && constant_curv; ++i) {
        double a = geom.range1().lo + (0.2 + 0.15 * i) * geom.range1().length();
        double b = geom.range2().lo + (0.1 + 0.17 * i) * geom.range2().length();
        SurfaceFrame<double> F = surface_frame<double>(geom, a, b, 0.0);
        if (std::abs(F.kappa1 - F0.kappa1) > 1e-10 || std::abs(F.kappa2 - F0.kappa2) > 1e-10)
            constant_curv = false;
    }
    if (constant_curv) {
        EpsSeries ser = expand_surface(geom, SurfaceExpandOp::ScalarLap, {f, nullptr, nullptr},
                                       at, 2);
        // dxi and dxi^2 of the layer profile at the point
        auto fxi = [&](double xi) {
            ExprEnv<double> env;
            double s1 = at.s1, s2 = at.s2, tv = 0.0;
            env.bind(Var::sigma, xi);
            env.bind(Var::s1, s1);
            env.bind(Var::s2, s2);
            env.bind(Var::tau, tv);
            return std::exp(0.5 * xi) * (1 + 0.2 * std::sin(s1)) * std::cos(s2);
        };
        double d1 = 0.5 * fxi(at.xi);
        double d2 = 0.25 * fxi(at.xi);
        double sum = F0.kappa1 + F0.kappa2;
        CheckResult c{"coeff.lap_leading", 0, 1e-10, 0, 2, false, {}};
        c.measured = std::max(std::abs(ser.coeff(-2) - d2),
                              std::abs(ser.coeff(-1) - (-(sum)*d1)));
        c.max_abs = c.measured;
        rep.checks.push_back(c);
    }
    return rep;
}

SuiteReport verify_asymptotics_suite(const CurveGeometry& curve, const VerifyConfig& cfg) {
    SuiteReport rep;
    rep.suite = "asymptotics";
    rep.geometry = curve.name();
    (void)cfg;

    BishopAngle bishop(curve, 0.0, 0.0);
    TubeContext ctx = make_tube_context(&curve, &bishop);
    auto f = std::make_shared<TubeExprScalarField>(
        parse_expr("exp(0.4*sigma)*(1+0.3*cos(theta))*(1+0.1*sin(s))"));
    auto u = std::make_shared<TubeExprVectorField>(std::array<ExprPtr, 3>{
        parse_expr("sigma*cos(theta)+0.2*s"), parse_expr("exp(0.2*sigma)"),
        parse_expr("sin(theta)+sigma^2")});
    TubeLayerPoint at{curve.range().lo + 0.4 * curve.range().length(), 0.9, 0.75, 0.0};
    auto eps = default_eps_grid();

    for (int K : {0, 1, 2}) {
        slope_check(rep, "slope.lap.K" + std::to_string(K),
                    convergence_slope(ctx, TubeExpandOp::ScalarLap, {f, nullptr, nullptr}, at, K,
                                      eps),
                    K);
        slope_check(rep, "slope.div.K" + std::to_string(K),
                    convergence_slope(ctx, TubeExpandOp::Div, {nullptr, u, nullptr}, at, K, eps),
                    K);
        slope_check(rep, "slope.advect.K" + std::to_string(K),
                    convergence_slope(ctx, TubeExpandOp::AdvectScalar, {f, u, nullptr}, at, K,
                                      eps),
                    K);
    }

    // constant-curvature leading coefficients (line, circle)
    double k0 = primal(frenet_frame<double>(curve, at.s, 0.0).kappa);
    bool constant_curv = true;
    for (int i = 0; i < 5; ++i) {
        double s = curve.range().lo + (0.15 + 0.16 * i) * curve.range().length();
        if (std::abs(primal(frenet_frame<double>(curve, s, 0.0).kappa) - k0) > 1e-10)
            constant_curv = false;
    }
    if (constant_curv) {
        EpsSeries ser = expand_tube(ctx, TubeExpandOp::ScalarLap, {f, nullptr, nullptr}, at, 2);
        double xi = at.xi, th = at.theta, s = at.s;
        auto fval = [&](double x, double t) {
            return std::exp(0.4 * x) * (1 + 0.3 * std::cos(t)) * (1 + 0.1 * std::sin(s));
        };
        double d1 = 0.4 * fval(xi, th);
        double d2 = 0.16 * fval(xi, th);
        double dth = std::exp(0.4 * xi) * (-0.3 * std::sin(th)) * (1 + 0.1 * std::sin(s));
        double dth2 = std::exp(0.4 * xi) * (-0.3 * std::cos(th)) * (1 + 0.1 * std::sin(s));
        double expect_m2 = d2 + d1 / xi + dth2 / (xi * xi);
        double phi = bishop.phi_at(s);
        double cs = std::cos(th + phi), sn = std::sin(th + phi);
        double expect_m1 = -k0 * cs * d1 + (k0 * sn / xi) * dth;
        CheckResult c{"coeff.lap_leading", 0, 1e-10, 0, 2, false, {}};
        c.measured = std::max(std::abs(ser.coeff(-2) - expect_m2),
                              std::abs(ser.coeff(-1) - expect_m1));
        c.max_abs = c.measured;
        rep.checks.push_back(c);
    }
    return rep;
}

std::string report_to_json(const SuiteReport& report) {
    nlohmann::json j;
    j["suite"] = report.suite;
    j["geometry"] = report.geometry;
    j["pass"] = report.all_pass();
    nlohmann::json per_op = nlohmann::json::object();
    for (const auto& c : report.checks) {
        nlohmann::json jc;
        jc["max_rel"] = c.measured;
        jc["max_abs"] = c.max_abs;
        jc["threshold"] = c.threshold;
        jc["n_points"] = c.n_points;
        jc["pass"] = c.pass();
        if (c.invert) jc["negative_control"] = true;
        jc["failures"] = c.failures;
        per_op[c.name] = jc;
    }
    j["per_op"] = per_op;
    return j.dump(2) + "\n";
}

}  // namespace sdcalc
