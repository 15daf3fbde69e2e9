#include "sdcalc/chart.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace sdcalc {

namespace {

std::string fmt_param(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "(%.17g)", v);
    return buf;
}

ExprPtr subst_var(const ExprPtr& e, Var from, Var to) {
    if (e->op == ExprOp::Variable) {
        if (e->var != from) return e;
        auto n = std::make_shared<ExprNode>(*e);
        n->var = to;
        return n;
    }
    if (!e->a && !e->b) return e;
    auto n = std::make_shared<ExprNode>(*e);
    if (e->a) n->a = subst_var(e->a, from, to);
    if (e->b) n->b = subst_var(e->b, from, to);
    return n;
}

std::array<ExprPtr, 3> parse_components(const std::array<std::string, 3>& exprs, unsigned allowed,
                                        const char* what) {
    std::array<ExprPtr, 3> c;
    for (int i = 0; i < 3; ++i) {
        c[i] = parse_expr(exprs[i]);
        unsigned used = free_vars(c[i]);
        if ((used & ~allowed) != 0)
            throw InputError(std::string(what) + " component '" + exprs[i] +
                             "' uses a variable outside its context");
    }
    return c;
}

constexpr unsigned bit(Var v) { return 1u << static_cast<unsigned>(v); }

}  // namespace

ExprSurfaceChart::ExprSurfaceChart(std::array<ExprPtr, 3> components) {
    unsigned used = 0;
    for (const auto& c : components) used |= free_vars(c);
    has_tau_ = (used & bit(Var::tau)) != 0;
    table_[0][0][0] = components;
    for (int a = 0; a <= kOrder; ++a)
        for (int b = 0; a + b <= kOrder; ++b) {
            if (a + b > 0) {
                for (int i = 0; i < 3; ++i) {
                    table_[a][b][0][i] = a > 0 ? diff_expr(table_[a - 1][b][0][i], Var::s1)
                                               : diff_expr(table_[a][b - 1][0][i], Var::s2);
                }
            }
            for (int i = 0; i < 3; ++i)
                table_[a][b][1][i] = diff_expr(table_[a][b][0][i], Var::tau);
        }
}

ExprCurveChart::ExprCurveChart(std::array<ExprPtr, 3> components) {
    unsigned used = 0;
    for (const auto& c : components) used |= free_vars(c);
    has_tau_ = (used & bit(Var::tau)) != 0;
    table_[0][0] = components;
    for (int ds = 0; ds <= kOrder; ++ds) {
        if (ds > 0)
            for (int i = 0; i < 3; ++i) table_[ds][0][i] = diff_expr(table_[ds - 1][0][i], Var::s);
        for (int i = 0; i < 3; ++i) table_[ds][1][i] = diff_expr(table_[ds][0][i], Var::tau);
    }
}

SurfaceGeometry make_surface_from_exprs(const std::array<std::string, 3>& exprs, AxisRange r1,
                                        AxisRange r2, std::string name) {
    unsigned allowed = bit(Var::s1) | bit(Var::s2) | bit(Var::tau);
    auto chart = std::make_shared<ExprSurfaceChart>(parse_components(exprs, allowed, "surface"));
    return {chart, r1, r2, std::move(name)};
}

CurveGeometry make_curve_from_exprs(const std::array<std::string, 3>& exprs, AxisRange r,
                                    std::string name) {
    unsigned allowed = bit(Var::s) | bit(Var::tau);
    auto chart = std::make_shared<ExprCurveChart>(parse_components(exprs, allowed, "curve"));
    return {chart, r, std::move(name)};
}

SurfaceGeometry make_plane(double L) {
    return make_surface_from_exprs({"s1", "s2", "0"}, {-L, L, false}, {-L, L, false}, "plane");
}

SurfaceGeometry make_sphere(double R) {
    // Poles sit on the +-x axis so the +-z points of interest are interior.
    std::string r = fmt_param(R);
    return make_surface_from_exprs(
        {r + "*cos(s1)", r + "*sin(s1)*cos(s2)", r + "*sin(s1)*sin(s2)"},
        {0.35, M_PI - 0.35, false}, {0.0, 2.0 * M_PI, true}, "sphere");
}

SurfaceGeometry make_cylinder(double R, double H) {
    std::string r = fmt_param(R);
    return make_surface_from_exprs({r + "*cos(s1)", r + "*sin(s1)", "s2"},
                                   {0.0, 2.0 * M_PI, true}, {-H, H, false}, "cylinder");
}

SurfaceGeometry make_torus(double R, double r) {
    std::string cR = fmt_param(R), cr = fmt_param(r);
    std::string ring = "(" + cR + "+" + cr + "*cos(s2))";
    return make_surface_from_exprs({ring + "*cos(s1)", ring + "*sin(s1)", cr + "*sin(s2)"},
                                   {0.0, 2.0 * M_PI, true}, {0.0, 2.0 * M_PI, true}, "torus");
}

SurfaceGeometry make_ellipsoid(double a, double b, double c) {
    return make_surface_from_exprs(
        {fmt_param(a) + "*sin(s1)*cos(s2)", fmt_param(b) + "*sin(s1)*sin(s2)",
         fmt_param(c) + "*cos(s1)"},
        {0.35, M_PI - 0.35, false}, {0.0, 2.0 * M_PI, true}, "ellipsoid");
}

SurfaceGeometry make_graph(const std::string& f_of_xy, double L) {
    ExprPtr f = parse_expr(f_of_xy);
    f = subst_var(f, Var::x, Var::s1);
    f = subst_var(f, Var::y, Var::s2);
    unsigned allowed = bit(Var::s1) | bit(Var::s2) | bit(Var::tau);
    if ((free_vars(f) & ~allowed) != 0)
        throw InputError("graph height function may only use x/s1, y/s2, tau");
    auto chart = std::make_shared<ExprSurfaceChart>(
        std::array<ExprPtr, 3>{parse_expr("s1"), parse_expr("s2"), f});
    return {chart, {-L, L, false}, {-L, L, false}, "graph"};
}

CurveGeometry make_line(double L) {
    return make_curve_from_exprs({"0", "0", "s"}, {-L, L, false}, "line");
}

CurveGeometry make_circle(double R) {
    std::string r = fmt_param(R);
    return make_curve_from_exprs({r + "*cos(s)", r + "*sin(s)", "0"}, {0.0, 2.0 * M_PI, true},
                                 "circle");
}

CurveGeometry make_helix(double a, double b) {
    return make_curve_from_exprs({fmt_param(a) + "*cos(s)", fmt_param(a) + "*sin(s)",
                                  fmt_param(b) + "*s"},
                                 {-2.0 * M_PI, 2.0 * M_PI, false}, "helix");
}

CurveGeometry make_paper_curve() {
    return make_curve_from_exprs({"cos(2*pi*s)", "sin(2*pi*s)", "s^2"}, {0.0, 1.0, false},
                                 "paper_curve");
}

namespace {

using nlohmann::json;

double named_param(const json& params, const char* name, int index, double fallback,
                   bool required) {
    if (params.is_object()) {
        if (params.contains(name)) return params.at(name).get<double>();
        if (required) throw InputError(std::string("missing geometry parameter '") + name + "'");
        return fallback;
    }
    if (params.is_array()) {
        if (index < static_cast<int>(params.size())) return params.at(index).get<double>();
        if (required) throw InputError(std::string("missing geometry parameter '") + name + "'");
        return fallback;
    }
    if (required) throw InputError(std::string("missing geometry parameter '") + name + "'");
    return fallback;
}

AxisRange range_from_json(const json& jr, bool periodic) {
    if (!jr.is_array() || jr.size() != 2)
        throw InputError("field 'domain': each axis must be [lo, hi]");
    return {jr.at(0).get<double>(), jr.at(1).get<double>(), periodic};
}

GeometrySpec load_from_json(const json& j) {
    GeometrySpec spec;
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "surface") spec.is_surface = true;
    else if (kind == "curve") spec.is_surface = false;
    else throw InputError("field 'kind': expected \"surface\" or \"curve\"");

    if (j.contains("builtin")) {
        std::string name = j.at("builtin").get<std::string>();
        json params = j.value("params", json::array());
        if (spec.is_surface) {
            if (name == "plane") spec.surface = make_plane(named_param(params, "L", 0, 8.0, false));
            else if (name == "sphere") spec.surface = make_sphere(named_param(params, "R", 0, 1.0, true));
            else if (name == "cylinder")
                spec.surface = make_cylinder(named_param(params, "R", 0, 1.0, true),
                                             named_param(params, "H", 1, 4.0, false));
            else if (name == "torus")
                spec.surface = make_torus(named_param(params, "R", 0, 2.0, true),
                                          named_param(params, "r", 1, 0.5, true));
            else if (name == "ellipsoid")
                spec.surface = make_ellipsoid(named_param(params, "a", 0, 1.0, true),
                                              named_param(params, "b", 1, 1.0, true),
                                              named_param(params, "c", 2, 1.0, true));
            else if (name == "graph")
                spec.surface = make_graph(j.at("f").get<std::string>(),
                                          named_param(params, "L", 0, 2.0, false));
            else throw InputError("field 'builtin': unknown surface builtin '" + name + "'");
        } else {
            if (name == "line") spec.curve = make_line(named_param(params, "L", 0, 6.0, false));
            else if (name == "circle") spec.curve = make_circle(named_param(params, "R", 0, 1.0, true));
            else if (name == "helix")
                spec.curve = make_helix(named_param(params, "a", 0, 1.0, true),
                                        named_param(params, "b", 1, 0.5, true));
            else if (name == "paper_curve" || name == "paper-curve")
                spec.curve = make_paper_curve();
            else throw InputError("field 'builtin': unknown curve builtin '" + name + "'");
        }
        return spec;
    }

    if (!j.contains("exprs")) throw InputError("geometry needs either 'builtin' or 'exprs'");
    auto je = j.at("exprs");
    if (!je.is_array() || je.size() != 3)
        throw InputError("field 'exprs': expected three component expressions");
    std::array<std::string, 3> exprs{je.at(0).get<std::string>(), je.at(1).get<std::string>(),
                                     je.at(2).get<std::string>()};
    auto jd = j.at("domain");
    std::vector<bool> periodic(2, false);
    if (j.contains("periodic")) {
        auto jp = j.at("periodic");
        for (std::size_t i = 0; i < jp.size() && i < 2; ++i) periodic[i] = jp.at(i).get<bool>();
    }
    if (spec.is_surface) {
        if (!jd.is_array() || jd.size() != 2)
            throw InputError("field 'domain': surface needs two axis ranges");
        spec.surface = make_surface_from_exprs(exprs, range_from_json(jd.at(0), periodic[0]),
                                               range_from_json(jd.at(1), periodic[1]), "surface");
    } else {
        const json& jr = (jd.is_array() && jd.size() == 1) ? jd.at(0) : jd;
        spec.curve = make_curve_from_exprs(exprs, range_from_json(jr, periodic[0]), "curve");
    }
    return spec;
}

}  // namespace

GeometrySpec load_geometry_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InputError(std::string("geometry JSON: ") + e.what());
    }
    try {
        return load_from_json(j);
    } catch (const json::exception& e) {
        throw InputError(std::string("geometry JSON: ") + e.what());
    }
}

GeometrySpec load_geometry_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open geometry file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return load_geometry_json(ss.str());
    } catch (const InputError& e) {
        throw InputError(path + ": " + e.what());
    }
}

}  // namespace sdcalc
