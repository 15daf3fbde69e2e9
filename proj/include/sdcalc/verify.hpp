#pragma once

// Verification suites: every check compares the curvilinear evaluation
// against an independent ambient/finite-difference path or a closed-form
// identity, at the tolerance pinned here. The CLI `verify` subcommand and
// the acceptance suite are both assembled from these.

#include <cstdint>

#include "sdcalc/asymptotics.hpp"
#include "sdcalc/oracle.hpp"

namespace sdcalc {

struct VerifyConfig {
    std::uint64_t seed = 42;
    int n_points = 200;    // oracle comparison points per operator and field
    int n_fields = 3;      // random pullback fields per geometry
    int n_eikonal = 1000;  // eikonal/round-trip sample count
    int grid_n = 32;       // curvature-identity grid
    int n_identity = 25;   // internal-identity sample count
    int n_ortho = 200;     // tube orthogonality samples
    double oracle_tol = 1e-4;  // criterion threshold for oracle max_rel
};

struct CheckResult {
    std::string name;
    double measured = 0.0;
    double threshold = 0.0;
    double max_abs = 0.0;
    int n_points = 0;
    bool invert = false;  // negative controls pass when measured > threshold
    std::vector<std::string> failures;

    bool pass() const { return invert ? measured > threshold : measured <= threshold; }
};

struct SuiteReport {
    std::string suite;
    std::string geometry;
    std::vector<CheckResult> checks;

    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass()) return false;
        return true;
    }
    const CheckResult* find(const std::string& name) const {
        for (const auto& c : checks)
            if (c.name == name) return &c;
        return nullptr;
    }
};

// Surface suite: eikonal/Gauss-map/round-trip checks, curvature
// compatibility residuals, the nine-operator oracle comparison with the
// injected-fault negative control, and the internal identities.
SuiteReport verify_surface_suite(const SurfaceGeometry& geom, const VerifyConfig& cfg);

// Tube suite: Jacobian-row orthogonality (with the rotation-disabled negative
// control where torsion is present), the tube operator oracle comparison with
// curvature-fault control, and the vector identity.
SuiteReport verify_tube_suite(const CurveGeometry& curve, const VerifyConfig& cfg);

// Evolution suite: coordinate-rate re-projection FD, chain-rule closure
// (surfaces) and Frenet constraints / torsion evolution FD (curves).
SuiteReport verify_evolution_suite(const SurfaceGeometry& geom, const VerifyConfig& cfg);
SuiteReport verify_evolution_suite(const CurveGeometry& curve, const VerifyConfig& cfg);

// Asymptotics suite: convergence slopes for Laplacian/divergence/advection at
// K = 0, 1, 2 plus leading-coefficient cross-checks on constant-curvature
// geometry.
SuiteReport verify_asymptotics_suite(const SurfaceGeometry& geom, const VerifyConfig& cfg);
SuiteReport verify_asymptotics_suite(const CurveGeometry& curve, const VerifyConfig& cfg);

std::string report_to_json(const SuiteReport& report);

// Deterministic collar samplers shared by the suites and tests.
struct SurfaceSample {
    SurfacePoint pt;
    Vec3d x;
};
std::vector<SurfaceSample> sample_surface_collar(const SurfaceGeometry& geom,
                                                 const ClosestPointProjector& proj, int n,
                                                 Rng& rng, double sigma_frac = 0.7,
                                                 double sigma_cap = 0.8);
struct TubeSample {
    TubePoint pt;
    Vec3d x;
};
std::vector<TubeSample> sample_tube_collar(const TubeContext& ctx, int n, Rng& rng,
                                           double sigma_cap = 0.45);

}  // namespace sdcalc
