// sdcalc: signed-distance coordinate calculus around surfaces and curves.
// Subcommands: project, frames, op, evolve, tube-frames, tube-op, expand,
// verify. All runs are deterministic given the seed; CSV floats carry 17
// significant digits, JSON uses shortest round-trip formatting.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "sdcalc/parallel.hpp"
#include "sdcalc/surface_calculus.hpp"
#include "sdcalc/surface_evolution.hpp"
#include "sdcalc/tube_calculus.hpp"
#include "sdcalc/verify.hpp"

using namespace sdcalc;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct PointsCsv {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

PointsCsv read_points_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open points file '" + path + "'");
    PointsCsv out;
    std::string line;
    if (!std::getline(in, line)) throw InputError(path + ": empty points file");
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) {
        cell.erase(0, cell.find_first_not_of(" \t\r"));
        cell.erase(cell.find_last_not_of(" \t\r") + 1);
        out.header.push_back(cell);
    }
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r,") == std::string::npos) continue;
        std::stringstream ls(line);
        std::vector<double> row;
        while (std::getline(ls, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (...) {
                throw InputError(path + ":" + std::to_string(lineno) + ": malformed number '" +
                                 cell + "'");
            }
        }
        if (row.size() != out.header.size())
            throw InputError(path + ":" + std::to_string(lineno) + ": wrong column count");
        out.rows.push_back(std::move(row));
    }
    return out;
}

bool header_is(const PointsCsv& csv, std::initializer_list<const char*> names) {
    if (csv.header.size() != names.size()) return false;
    std::size_t i = 0;
    for (const char* n : names)
        if (csv.header[i++] != n) return false;
    return true;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot open output file '" + path + "'");
    for (std::size_t i = 0; i < header.size(); ++i)
        out << header[i] << (i + 1 < header.size() ? "," : "\n");
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << fmt(row[i]) << (i + 1 < row.size() ? "," : "\n");
    }
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot open output file '" + path + "'");
    out << text;
}

GeometrySpec load_geom_checked(const std::string& path, bool want_surface, const char* cmd) {
    GeometrySpec spec = load_geometry_file(path);
    if (spec.is_surface != want_surface)
        throw InputError(std::string(cmd) + " expects a " +
                         (want_surface ? "surface" : "curve") + " geometry");
    return spec;
}

// ---- project ---------------------------------------------------------------

int cmd_project(const std::string& geom_path, const std::string& points_path,
                const std::string& out_path, double tau) {
    GeometrySpec spec = load_geometry_file(geom_path);
    PointsCsv pts = read_points_csv(points_path);
    if (!header_is(pts, {"x", "y", "z"}))
        throw InputError("project expects a points CSV with header x,y,z");

    std::vector<std::vector<double>> rows(pts.rows.size());
    if (spec.is_surface) {
        ClosestPointProjector proj(spec.surface, tau);
        parallel_for(static_cast<int>(pts.rows.size()), [&](int i) {
            const auto& r = pts.rows[i];
            SdfCoordinates c = proj.project({r[0], r[1], r[2]});
            rows[i] = {c.s1,     c.s2,     c.sigma,  c.foot.x, c.foot.y,
                       c.foot.z, c.nhat.x, c.nhat.y, c.nhat.z, c.outside_collar ? 1.0 : 0.0};
        });
        write_csv(out_path,
                  {"s1", "s2", "sigma", "footx", "footy", "footz", "nx", "ny", "nz",
                   "outside_collar"},
                  rows);
    } else {
        TubeBundle bundle(spec.curve, tau);
        TubeProjector proj(bundle.ctx());
        parallel_for(static_cast<int>(pts.rows.size()), [&](int i) {
            const auto& r = pts.rows[i];
            TubeCoordinates c = proj.project({r[0], r[1], r[2]});
            rows[i] = {c.s, c.theta, c.sigma, c.foot.x, c.foot.y, c.foot.z,
                       c.on_axis ? 1.0 : 0.0};
        });
        write_csv(out_path, {"s", "theta", "sigma", "footx", "footy", "footz", "on_axis"}, rows);
    }
    return 0;
}

// ---- frames ----------------------------------------------------------------

int cmd_frames(const std::string& geom_path, const std::string& grid, const std::string& out_path,
               double tau) {
    GeometrySpec spec = load_geom_checked(geom_path, true, "frames");
    const SurfaceGeometry& g = spec.surface;
    int n1 = 16, n2 = 16;
    if (std::sscanf(grid.c_str(), "%dx%d", &n1, &n2) != 2 || n1 < 2 || n2 < 2)
        throw InputError("frames --grid expects N1xN2 with counts >= 2");

    std::vector<std::vector<double>> rows(static_cast<std::size_t>(n1) * n2);
    parallel_for(n1 * n2, [&](int idx) {
        int i = idx / n2, j = idx % n2;
        double a = g.range1().lo + (i + 0.5) * g.range1().length() / n1;
        double b = g.range2().lo + (j + 0.5) * g.range2().length() / n2;
        DarbouxFrame F = tangent_basis(g, a, b, tau);
        CurvatureData c = shape_operator(g, a, b, tau);
        rows[idx] = {a,         b,         F.p.x,     F.p.y,     F.p.z,    F.nhat.x, F.nhat.y,
                     F.nhat.z,  F.that1.x, F.that1.y, F.that1.z, F.that2.x, F.that2.y, F.that2.z,
                     c.kappa1,  c.kappa2,  c.omega1,  c.omega2,  c.umbilic ? 1.0 : 0.0};
    });
    write_csv(out_path,
              {"s1", "s2", "px", "py", "pz", "nx", "ny", "nz", "t1x", "t1y", "t1z", "t2x", "t2y",
               "t2z", "kappa1", "kappa2", "omega1", "omega2", "umbilic"},
              rows);
    return 0;
}

// ---- op ---------------------------------------------------------------------

std::vector<SurfacePoint> surface_points_from_csv(const SurfaceGeometry& g, const PointsCsv& pts,
                                                  double tau) {
    std::vector<SurfacePoint> out(pts.rows.size());
    if (header_is(pts, {"s1", "s2", "sigma"})) {
        for (std::size_t i = 0; i < pts.rows.size(); ++i)
            out[i] = {pts.rows[i][0], pts.rows[i][1], pts.rows[i][2], tau};
    } else if (header_is(pts, {"x", "y", "z"})) {
        ClosestPointProjector proj(g, tau);
        parallel_for(static_cast<int>(pts.rows.size()), [&](int i) {
            const auto& r = pts.rows[i];
            SdfCoordinates c = proj.project({r[0], r[1], r[2]});
            out[i] = {c.s1, c.s2, c.sigma, tau};
        });
    } else {
        throw InputError("surface points CSV must have header s1,s2,sigma or x,y,z");
    }
    return out;
}

std::vector<TubePoint> tube_points_from_csv(const TubeContext& ctx, const PointsCsv& pts,
                                            double tau) {
    std::vector<TubePoint> out(pts.rows.size());
    if (header_is(pts, {"s", "theta", "sigma"})) {
        for (std::size_t i = 0; i < pts.rows.size(); ++i)
            out[i] = {pts.rows[i][0], pts.rows[i][1], pts.rows[i][2], tau};
    } else if (header_is(pts, {"x", "y", "z"})) {
        TubeProjector proj(ctx);
        parallel_for(static_cast<int>(pts.rows.size()), [&](int i) {
            const auto& r = pts.rows[i];
            TubeCoordinates c = proj.project({r[0], r[1], r[2]});
            out[i] = {c.s, c.theta, c.sigma, tau};
        });
    } else {
        throw InputError("tube points CSV must have header s,theta,sigma or x,y,z");
    }
    return out;
}

int cmd_op(const std::string& geom_path, const std::string& op, const std::string& field_path,
           const std::string& points_path, const std::string& out_path, double tau) {
    GeometrySpec spec = load_geom_checked(geom_path, true, "op");
    const SurfaceGeometry& g = spec.surface;
    SurfaceFieldSpec field = load_surface_field_file(field_path);
    PointsCsv pts = read_points_csv(points_path);
    auto points = surface_points_from_csv(g, pts, tau);

    bool scalar_op = (op == "grad" || op == "laplacian" || op == "hessian");
    bool scalar_out = (op == "div" || op == "laplacian");
    bool tensor_out = (op == "hessian" || op == "vecgrad");
    if (scalar_op && field.is_vector) throw InputError("op '" + op + "' needs a scalar field");
    if (!scalar_op && !field.is_vector) throw InputError("op '" + op + "' needs a vector field");

    std::vector<std::vector<double>> rows(points.size());
    parallel_for(static_cast<int>(points.size()), [&](int i) {
        const SurfacePoint& p = points[i];
        std::vector<double> row{p.s1, p.s2, p.sigma};
        auto push_vec = [&](const Vec3d& v) { row.insert(row.end(), {v.x, v.y, v.z}); };
        auto push_mat = [&](const Mat3d& m) {
            for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 3; ++c) row.push_back(m[r][c]);
        };
        if (op == "grad") push_vec(gradient(g, *field.scalar, p));
        else if (op == "laplacian") row.push_back(scalar_laplacian(g, *field.scalar, p));
        else if (op == "hessian") push_mat(hessian(g, *field.scalar, p));
        else if (op == "div") row.push_back(divergence(g, *field.vector, p));
        else if (op == "curl") push_vec(curl(g, *field.vector, p));
        else if (op == "veclap") push_vec(vector_laplacian(g, *field.vector, p));
        else if (op == "curlcurl") push_vec(curl_curl(g, *field.vector, p));
        else if (op == "vecgrad") push_mat(vector_gradient(g, *field.vector, p));
        else if (op == "convective") push_vec(convective_derivative(g, *field.vector, p));
        else throw InputError("unknown surface operator '" + op + "'");
        rows[i] = std::move(row);
    });

    std::vector<std::string> header{"s1", "s2", "sigma"};
    if (scalar_out) header.push_back("value");
    else if (tensor_out)
        for (const char* r : {"x", "y", "z"})
            for (const char* c : {"x", "y", "z"}) header.push_back(std::string("m") + r + c);
    else
        header.insert(header.end(), {"vx", "vy", "vz"});
    write_csv(out_path, header, rows);
    return 0;
}

// ---- evolve -------------------------------------------------------------------

int cmd_evolve(const std::string& geom_path, const std::string& op, const std::string& field_path,
               const std::string& points_path, const std::string& out_path, double tau) {
    GeometrySpec spec = load_geom_checked(geom_path, true, "evolve");
    const SurfaceGeometry& g = spec.surface;
    SurfaceFieldSpec field = load_surface_field_file(field_path);
    PointsCsv pts = read_points_csv(points_path);
    auto points = surface_points_from_csv(g, pts, tau);
    ChartMotion motion;

    std::vector<std::vector<double>> rows(points.size());
    parallel_for(static_cast<int>(points.size()), [&](int i) {
        const SurfacePoint& p = points[i];
        std::vector<double> row{p.s1, p.s2, p.sigma};
        if (op == "dtscalar") {
            if (field.is_vector) throw InputError("dtscalar needs a scalar field");
            row.push_back(dt_scalar(g, *field.scalar, motion, p));
        } else if (op == "dtvector") {
            if (!field.is_vector) throw InputError("dtvector needs a vector field");
            Vec3d v = dt_vector(g, *field.vector, motion, p);
            row.insert(row.end(), {v.x, v.y, v.z});
        } else {
            throw InputError("unknown evolve operator '" + op + "'");
        }
        rows[i] = std::move(row);
    });
    std::vector<std::string> header{"s1", "s2", "sigma"};
    if (op == "dtscalar") header.push_back("value");
    else header.insert(header.end(), {"vx", "vy", "vz"});
    write_csv(out_path, header, rows);
    return 0;
}

// ---- tube-frames ----------------------------------------------------------------

int cmd_tube_frames(const std::string& geom_path, double phi0, int samples,
                    const std::string& out_path, double tau) {
    GeometrySpec spec = load_geom_checked(geom_path, false, "tube-frames");
    const CurveGeometry& c = spec.curve;
    BishopAngle bishop(c, tau, phi0, samples);

    int n = samples;
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(n) + 1);
    parallel_for(n + 1, [&](int i) {
        double s = c.range().lo + c.range().length() * i / n;
        FrenetFrameT<double> F = frenet_frame<double>(c, s, tau);
        rows[i] = {s,        F.p.x,    F.p.y,    F.p.z,    F.that.x, F.that.y, F.that.z,
                   F.nhat.x, F.nhat.y, F.nhat.z, F.bhat.x, F.bhat.y, F.bhat.z, F.kappa,
                   F.omega,  bishop.phi_at(s)};
    });
    write_csv(out_path,
              {"s", "px", "py", "pz", "tx", "ty", "tz", "nx", "ny", "nz", "bx", "by", "bz",
               "kappa", "omega", "phi"},
              rows);
    std::cout << "bishop loop mismatch angle: " << fmt(bishop.loop_mismatch()) << "\n";
    return 0;
}

// ---- tube-op ---------------------------------------------------------------------

int cmd_tube_op(const std::string& geom_path, const std::string& op,
                const std::string& field_path, const std::string& points_path,
                const std::string& out_path, double phi0, double tau) {
    GeometrySpec spec = load_geom_checked(geom_path, false, "tube-op");
    const CurveGeometry& c = spec.curve;
    TubeBundle bundle(c, tau, phi0);
    const TubeContext& ctx = bundle.ctx();
    ChartCurveMotion motion;

    PointsCsv pts = read_points_csv(points_path);
    auto points = tube_points_from_csv(ctx, pts, tau);

    TubeFieldSpec field;
    if (op != "dtorsion") field = load_tube_field_file(field_path);

    std::vector<std::vector<double>> rows(points.size());
    parallel_for(static_cast<int>(points.size()), [&](int i) {
        const TubePoint& p = points[i];
        std::vector<double> row{p.s, p.theta, p.sigma};
        auto push_vec = [&](const Vec3d& v) { row.insert(row.end(), {v.x, v.y, v.z}); };
        if (op == "grad") push_vec(tube_gradient(ctx, *field.scalar, p));
        else if (op == "lap") row.push_back(tube_scalar_laplacian(ctx, *field.scalar, p));
        else if (op == "div") row.push_back(tube_divergence(ctx, *field.vector, p));
        else if (op == "curl") push_vec(tube_curl(ctx, *field.vector, p));
        else if (op == "veclap") push_vec(tube_vector_laplacian(ctx, *field.vector, p));
        else if (op == "vecgrad") {
            Mat3d m = tube_vector_gradient(ctx, *field.vector, p);
            for (int r = 0; r < 3; ++r)
                for (int cc = 0; cc < 3; ++cc) row.push_back(m[r][cc]);
        } else if (op == "dtscalar") row.push_back(dt_scalar_tube(ctx, *field.scalar, motion, p));
        else if (op == "dtvector") push_vec(dt_vector_tube(ctx, *field.vector, motion, p));
        else if (op == "dtorsion") row.push_back(torsion_evolution(c, motion, p.s, tau));
        else throw InputError("unknown tube operator '" + op + "'");
        rows[i] = std::move(row);
    });

    std::vector<std::string> header{"s", "theta", "sigma"};
    if (op == "lap" || op == "div" || op == "dtscalar" || op == "dtorsion")
        header.push_back("value");
    else if (op == "vecgrad")
        for (const char* r : {"x", "y", "z"})
            for (const char* cc : {"x", "y", "z"}) header.push_back(std::string("m") + r + cc);
    else
        header.insert(header.end(), {"vx", "vy", "vz"});
    write_csv(out_path, header, rows);
    return 0;
}

// ---- expand ---------------------------------------------------------------------

int cmd_expand(const std::string& geom_path, const std::string& op, int order, double xi,
               const std::string& at, const std::string& field_path,
               const std::string& velocity_path, const std::string& eps_csv,
               const std::string& out_path, double tau) {
    GeometrySpec spec = load_geometry_file(geom_path);

    std::vector<double> eps_list;
    {
        std::stringstream ss(eps_csv);
        std::string cell;
        while (std::getline(ss, cell, ',')) eps_list.push_back(std::stod(cell));
    }

    double a = 0, b = 0;
    if (std::sscanf(at.c_str(), "%lf,%lf", &a, &b) != 2)
        throw InputError("--at expects 'c1,c2' surface or curve coordinates");

    nlohmann::json j;
    EpsSeries series;
    SlopeResult slope;
    bool have_slope = !eps_list.empty();

    if (spec.is_surface) {
        const SurfaceGeometry& g = spec.surface;
        SurfaceExpandArgs args;
        if (!field_path.empty()) {
            SurfaceFieldSpec f = load_surface_field_file(field_path);
            args.f = f.scalar;
            if (f.is_vector) args.u = f.vector;
        }
        if (!velocity_path.empty()) {
            SurfaceFieldSpec u = load_surface_field_file(velocity_path);
            if (!u.is_vector) throw InputError("--velocity must be a vector field");
            args.u = u.vector;
        }
        SurfaceExpandOp kind;
        if (op == "lap") kind = SurfaceExpandOp::ScalarLap;
        else if (op == "grad") kind = SurfaceExpandOp::GradScalar;
        else if (op == "div") kind = SurfaceExpandOp::Div;
        else if (op == "vecgrad") kind = SurfaceExpandOp::GradVector;
        else if (op == "curlcurl") kind = SurfaceExpandOp::CurlCurl;
        else if (op == "advect") kind = SurfaceExpandOp::AdvectScalar;
        else if (op == "advectvec") kind = SurfaceExpandOp::AdvectVector;
        else if (op == "dt") kind = SurfaceExpandOp::Dt;
        else throw InputError("unknown surface expansion operator '" + op + "'");
        LayerPoint pt{a, b, xi, tau};
        series = expand_surface(g, kind, args, pt, order);
        if (have_slope) slope = convergence_slope(g, kind, args, pt, order, eps_list);
    } else {
        const CurveGeometry& c = spec.curve;
        TubeBundle bundle(c, tau);
        TubeExpandArgs args;
        if (!field_path.empty()) {
            TubeFieldSpec f = load_tube_field_file(field_path);
            args.f = f.scalar;
            if (f.is_vector) args.u = f.vector;
        }
        if (!velocity_path.empty()) {
            TubeFieldSpec u = load_tube_field_file(velocity_path);
            if (!u.is_vector) throw InputError("--velocity must be a vector field");
            args.u = u.vector;
        }
        TubeExpandOp kind;
        if (op == "lap") kind = TubeExpandOp::ScalarLap;
        else if (op == "grad") kind = TubeExpandOp::GradScalar;
        else if (op == "div") kind = TubeExpandOp::Div;
        else if (op == "vecgrad") kind = TubeExpandOp::GradVector;
        else if (op == "veclap") kind = TubeExpandOp::VectorLap;
        else if (op == "curl") kind = TubeExpandOp::Curl;
        else if (op == "advect") kind = TubeExpandOp::AdvectScalar;
        else if (op == "dt") kind = TubeExpandOp::DtScalar;
        else if (op == "dtvec") kind = TubeExpandOp::DtVector;
        else throw InputError("unknown tube expansion operator '" + op + "'");
        TubeLayerPoint pt{a, b, xi, tau};
        series = expand_tube(bundle.ctx(), kind, args, pt, order);
        if (have_slope) slope = convergence_slope(bundle.ctx(), kind, args, pt, order, eps_list);
    }

    j["min_order"] = series.min_order();
    j["order"] = series.order();
    nlohmann::json coeffs = nlohmann::json::array();
    for (int k = series.min_order(); k <= series.order(); ++k) {
        if (series.kind() == EpsSeries::Kind::Scalar) coeffs.push_back(series.coeff(k));
        else if (series.kind() == EpsSeries::Kind::Vector) {
            Vec3d v = series.coeff_vec(k);
            coeffs.push_back({v.x, v.y, v.z});
        } else {
            Mat3d m = series.coeff_mat(k);
            nlohmann::json jm = nlohmann::json::array();
            for (int r = 0; r < 3; ++r) jm.push_back({m[r][0], m[r][1], m[r][2]});
            coeffs.push_back(jm);
        }
    }
    j["coeffs"] = coeffs;
    if (have_slope) {
        nlohmann::json st;
        st["eps"] = slope.eps_used;
        st["errors"] = slope.errors;
        st["slope"] = slope.slope;
        st["exact"] = slope.exact;
        j["slope_test"] = st;
    }
    std::string text = j.dump(2) + "\n";
    if (!out_path.empty()) write_text(out_path, text);
    else std::cout << text;
    return 0;
}

// ---- verify -------------------------------------------------------------------

int cmd_verify(const std::string& geom_path, const std::string& suite, std::uint64_t seed,
               const std::string& out_path, double tol, int n_points) {
    GeometrySpec spec = load_geometry_file(geom_path);
    VerifyConfig cfg;
    cfg.seed = seed;
    cfg.oracle_tol = tol;
    if (n_points > 0) cfg.n_points = n_points;

    SuiteReport rep;
    if (suite == "surface") {
        if (!spec.is_surface) throw InputError("suite 'surface' needs a surface geometry");
        rep = verify_surface_suite(spec.surface, cfg);
    } else if (suite == "tube") {
        if (spec.is_surface) throw InputError("suite 'tube' needs a curve geometry");
        rep = verify_tube_suite(spec.curve, cfg);
    } else if (suite == "evolution") {
        rep = spec.is_surface ? verify_evolution_suite(spec.surface, cfg)
                              : verify_evolution_suite(spec.curve, cfg);
    } else if (suite == "asymptotics") {
        rep = spec.is_surface ? verify_asymptotics_suite(spec.surface, cfg)
                              : verify_asymptotics_suite(spec.curve, cfg);
    } else {
        throw InputError("unknown suite '" + suite + "'");
    }

    std::string text = report_to_json(rep);
    if (!out_path.empty()) write_text(out_path, text);
    else std::cout << text;
    for (const auto& c : rep.checks)
        std::cout << (c.pass() ? "[pass] " : "[FAIL] ") << c.name << " measured " << fmt(c.measured)
                  << (c.invert ? " > " : " <= ") << fmt(c.threshold) << "\n";
    return rep.all_pass() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"signed-distance coordinate calculus around surfaces and curves", "sdcalc"};
    app.require_subcommand(1);

    std::string geom, points, out, field, velocity, motion, op, suite = "surface";
    std::string grid = "16x16", at = "0,0", eps_csv;
    double tau = 0.0, phi0 = 0.0, xi = 0.5, tol = 1e-4;
    int samples = 512, order = 2, n_points = 0;
    std::uint64_t seed = 42;

    auto add_geom = [&](CLI::App* cmd) {
        cmd->add_option("--geom", geom, "geometry spec JSON file")->required();
        cmd->add_option("--tau", tau, "evaluation time for time-dependent charts");
    };

    CLI::App* project = app.add_subcommand("project", "project ambient points to coordinates");
    add_geom(project);
    project->add_option("--points", points, "CSV of ambient points (header x,y,z)")->required();
    project->add_option("--out", out, "output CSV path")->required();

    CLI::App* frames = app.add_subcommand("frames", "surface frames and curvature on a grid");
    add_geom(frames);
    frames->add_option("--grid", grid, "parameter grid N1xN2 (counts >= 2)");
    frames->add_option("--out", out, "output CSV path")->required();

    CLI::App* opc = app.add_subcommand("op", "surface differential operators at points");
    add_geom(opc);
    opc->add_option("--op", op,
                    "operator: laplacian|grad|div|curl|veclap|curlcurl|hessian|convective|vecgrad")
        ->required();
    opc->add_option("--field", field, "field spec JSON file")->required();
    opc->add_option("--points", points, "points CSV (header s1,s2,sigma or x,y,z)")->required();
    opc->add_option("--out", out, "output CSV path")->required();

    CLI::App* evolve = app.add_subcommand("evolve", "time derivatives on an evolving surface");
    add_geom(evolve);
    evolve->add_option("--op", op, "operator: dtscalar|dtvector")->required();
    evolve->add_option("--field", field, "field spec JSON file")->required();
    evolve->add_option("--points", points, "points CSV (header s1,s2,sigma or x,y,z)")->required();
    evolve->add_option("--out", out, "output CSV path")->required();

    CLI::App* tframes = app.add_subcommand("tube-frames", "Frenet frames and Bishop angle table");
    add_geom(tframes);
    tframes->add_option("--phi0", phi0, "initial Bishop angle");
    tframes->add_option("--samples", samples, "sample count along the curve");
    tframes->add_option("--out", out, "output CSV path")->required();

    CLI::App* top = app.add_subcommand("tube-op", "tube differential operators at points");
    add_geom(top);
    top->add_option("--op", op,
                    "operator: grad|div|lap|curl|veclap|vecgrad|dtscalar|dtvector|dtorsion")
        ->required();
    top->add_option("--field", field, "field spec JSON file (not needed for dtorsion)");
    top->add_option("--points", points, "points CSV (header s,theta,sigma or x,y,z)")->required();
    top->add_option("--phi0", phi0, "initial Bishop angle");
    top->add_option("--out", out, "output CSV path")->required();

    CLI::App* expand = app.add_subcommand("expand", "boundary-layer expansion of an operator");
    add_geom(expand);
    expand->add_option("--op", op,
                       "surface: lap|grad|div|vecgrad|curlcurl|advect|advectvec|dt; tube: "
                       "lap|grad|div|vecgrad|veclap|curl|advect|dt|dtvec")
        ->required();
    expand->add_option("--order", order, "truncation order K (0..6)");
    expand->add_option("--xi", xi, "rescaled normal coordinate");
    expand->add_option("--at", at, "base point coordinates 'c1,c2'");
    expand->add_option("--field", field, "field spec JSON file");
    expand->add_option("--velocity", velocity, "advecting velocity field JSON (vector)");
    expand->add_option("--eps", eps_csv, "comma-separated eps list for the slope test");
    expand->add_option("--out", out, "output JSON path (stdout when omitted)");

    CLI::App* verify = app.add_subcommand("verify", "run a verification suite");
    add_geom(verify);
    verify->add_option("--suite", suite, "suite: surface|tube|evolution|asymptotics");
    verify->add_option("--seed", seed, "RNG seed (runs are deterministic given the seed)");
    verify->add_option("--out", out, "report JSON path (stdout when omitted)");
    verify->add_option("--tol", tol, "oracle max-rel tolerance");
    verify->add_option("--points", n_points, "oracle comparison points per operator");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;  // usage errors exit 1; --help exits 0
    }

    try {
        if (project->parsed()) return cmd_project(geom, points, out, tau);
        if (frames->parsed()) return cmd_frames(geom, grid, out, tau);
        if (opc->parsed()) return cmd_op(geom, op, field, points, out, tau);
        if (evolve->parsed()) return cmd_evolve(geom, op, field, points, out, tau);
        if (tframes->parsed()) return cmd_tube_frames(geom, phi0, samples, out, tau);
        if (top->parsed()) return cmd_tube_op(geom, op, field, points, out, phi0, tau);
        if (expand->parsed())
            return cmd_expand(geom, op, order, xi, at, field, velocity, eps_csv, out, tau);
        if (verify->parsed()) return cmd_verify(geom, suite, seed, out, tol, n_points);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
