#include "sdcalc/fields.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace sdcalc {

namespace {

constexpr unsigned bit(Var v) { return 1u << static_cast<unsigned>(v); }

ExprPtr parse_checked(const std::string& text, unsigned allowed, const char* what) {
    ExprPtr e = parse_expr(text);
    if ((free_vars(e) & ~allowed) != 0)
        throw InputError(std::string(what) + " component '" + text +
                         "' uses a variable outside its context");
    return e;
}

constexpr unsigned kSurfaceVars =
    bit(Var::sigma) | bit(Var::s1) | bit(Var::s2) | bit(Var::tau);
constexpr unsigned kTubeVars = bit(Var::s) | bit(Var::theta) | bit(Var::sigma) | bit(Var::tau);
constexpr unsigned kAmbientVars = bit(Var::x) | bit(Var::y) | bit(Var::z) | bit(Var::tau);

}  // namespace

SurfaceExprScalarField::SurfaceExprScalarField(ExprPtr e) : expr_(std::move(e)) {
    if ((free_vars(expr_) & ~kSurfaceVars) != 0)
        throw InputError("surface scalar field may only use sigma, s1, s2, tau");
}

AmbientExprSurfaceScalarField::AmbientExprSurfaceScalarField(ExprPtr e) : expr_(std::move(e)) {
    if ((free_vars(expr_) & ~kAmbientVars) != 0)
        throw InputError("ambient scalar field may only use x, y, z, tau");
}

SurfaceExprVectorField::SurfaceExprVectorField(std::array<ExprPtr, 3> comps) : c_(std::move(comps)) {
    for (const auto& e : c_)
        if ((free_vars(e) & ~kSurfaceVars) != 0)
            throw InputError("surface vector field may only use sigma, s1, s2, tau");
}

AmbientExprSurfaceVectorField::AmbientExprSurfaceVectorField(std::array<ExprPtr, 3> comps)
    : c_(std::move(comps)) {
    for (const auto& e : c_)
        if ((free_vars(e) & ~kAmbientVars) != 0)
            throw InputError("ambient vector field may only use x, y, z, tau");
}

namespace {

// Tube fields must close up over a full revolution in theta.
void check_theta_periodic(const ExprPtr& e) {
    if ((free_vars(e) & (1u << static_cast<unsigned>(Var::theta))) == 0) return;
    for (double th : {0.37, 1.91, 4.73}) {
        double s = 0.41, sg = 0.23, tau = 0.11;
        double th2 = th + 2.0 * M_PI;
        ExprEnv<double> env;
        env.bind(Var::s, s);
        env.bind(Var::sigma, sg);
        env.bind(Var::tau, tau);
        env.bind(Var::theta, th);
        double a = eval_expr(*e, env);
        env.bind(Var::theta, th2);
        double b = eval_expr(*e, env);
        if (std::abs(a - b) > 1e-10 * std::max(1.0, std::abs(a)))
            throw InputError("tube field component is not 2*pi-periodic in theta");
    }
}

}  // namespace

TubeExprScalarField::TubeExprScalarField(ExprPtr e) : expr_(std::move(e)) {
    if ((free_vars(expr_) & ~kTubeVars) != 0)
        throw InputError("tube scalar field may only use s, theta, sigma, tau");
    check_theta_periodic(expr_);
}

AmbientExprTubeScalarField::AmbientExprTubeScalarField(ExprPtr e) : expr_(std::move(e)) {
    if ((free_vars(expr_) & ~kAmbientVars) != 0)
        throw InputError("ambient scalar field may only use x, y, z, tau");
}

TubeExprVectorField::TubeExprVectorField(std::array<ExprPtr, 3> comps) : c_(std::move(comps)) {
    for (const auto& e : c_) {
        if ((free_vars(e) & ~kTubeVars) != 0)
            throw InputError("tube vector field may only use s, theta, sigma, tau");
        check_theta_periodic(e);
    }
}

AmbientExprTubeVectorField::AmbientExprTubeVectorField(std::array<ExprPtr, 3> comps)
    : c_(std::move(comps)) {
    for (const auto& e : c_)
        if ((free_vars(e) & ~kAmbientVars) != 0)
            throw InputError("ambient vector field may only use x, y, z, tau");
}

namespace {

using nlohmann::json;

struct ParsedFieldJson {
    bool is_vector;
    bool pullback;
    std::array<std::string, 3> comps;
};

ParsedFieldJson parse_field_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InputError(std::string("field JSON: ") + e.what());
    }
    ParsedFieldJson out;
    try {
        std::string kind = j.at("kind").get<std::string>();
        if (kind == "scalar") out.is_vector = false;
        else if (kind == "vector") out.is_vector = true;
        else throw InputError("field 'kind': expected \"scalar\" or \"vector\"");
        out.pullback = j.value("pullback", false);
        auto jc = j.at("components");
        std::size_t need = out.is_vector ? 3 : 1;
        if (!jc.is_array() || jc.size() != need)
            throw InputError("field 'components': wrong number of expressions");
        for (std::size_t i = 0; i < need; ++i) out.comps[i] = jc.at(i).get<std::string>();
    } catch (const json::exception& e) {
        throw InputError(std::string("field JSON: ") + e.what());
    }
    return out;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open field file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

SurfaceFieldSpec load_surface_field_json(const std::string& text) {
    ParsedFieldJson p = parse_field_json(text);
    SurfaceFieldSpec spec;
    spec.is_vector = p.is_vector;
    if (!p.is_vector) {
        ExprPtr e = parse_checked(p.comps[0], p.pullback ? kAmbientVars : kSurfaceVars, "field");
        if (p.pullback) spec.scalar = std::make_shared<AmbientExprSurfaceScalarField>(e);
        else spec.scalar = std::make_shared<SurfaceExprScalarField>(e);
    } else {
        std::array<ExprPtr, 3> c;
        for (int i = 0; i < 3; ++i)
            c[i] = parse_checked(p.comps[i], p.pullback ? kAmbientVars : kSurfaceVars, "field");
        if (p.pullback) spec.vector = std::make_shared<AmbientExprSurfaceVectorField>(c);
        else spec.vector = std::make_shared<SurfaceExprVectorField>(c);
    }
    return spec;
}

SurfaceFieldSpec load_surface_field_file(const std::string& path) {
    try {
        return load_surface_field_json(slurp(path));
    } catch (const InputError& e) {
        throw InputError(path + ": " + e.what());
    }
}

TubeFieldSpec load_tube_field_json(const std::string& text) {
    ParsedFieldJson p = parse_field_json(text);
    TubeFieldSpec spec;
    spec.is_vector = p.is_vector;
    if (!p.is_vector) {
        ExprPtr e = parse_checked(p.comps[0], p.pullback ? kAmbientVars : kTubeVars, "field");
        if (p.pullback) spec.scalar = std::make_shared<AmbientExprTubeScalarField>(e);
        else spec.scalar = std::make_shared<TubeExprScalarField>(e);
    } else {
        std::array<ExprPtr, 3> c;
        for (int i = 0; i < 3; ++i)
            c[i] = parse_checked(p.comps[i], p.pullback ? kAmbientVars : kTubeVars, "field");
        if (p.pullback) spec.vector = std::make_shared<AmbientExprTubeVectorField>(c);
        else spec.vector = std::make_shared<TubeExprVectorField>(c);
    }
    return spec;
}

TubeFieldSpec load_tube_field_file(const std::string& path) {
    try {
        return load_tube_field_json(slurp(path));
    } catch (const InputError& e) {
        throw InputError(path + ": " + e.what());
    }
}

ExprPtr make_random_ambient_expr(Rng& rng) {
    char buf[512];
    auto c = [&]() { return rng.uniform(-1.0, 1.0); };
    auto w = [&]() { return rng.uniform(0.4, 1.1); };  // gentle frequencies
    std::snprintf(buf, sizeof buf,
                  "(%.17g) + (%.17g)*x + (%.17g)*y + (%.17g)*z"
                  " + (%.17g)*x*y + (%.17g)*y*z + (%.17g)*x*x"
                  " + (%.17g)*sin((%.17g)*x + (%.17g)*y)"
                  " + (%.17g)*cos((%.17g)*z + (%.17g)*x)",
                  c(), c(), c(), c(), 0.5 * c(), 0.5 * c(), 0.3 * c(), c(), w(), w(), c(), w(),
                  w());
    return parse_expr(buf);
}

std::shared_ptr<const SurfaceScalarField> make_random_surface_scalar(Rng& rng) {
    return std::make_shared<AmbientExprSurfaceScalarField>(make_random_ambient_expr(rng));
}

std::shared_ptr<const SurfaceVectorField> make_random_surface_vector(Rng& rng) {
    std::array<ExprPtr, 3> c{make_random_ambient_expr(rng), make_random_ambient_expr(rng),
                             make_random_ambient_expr(rng)};
    return std::make_shared<AmbientExprSurfaceVectorField>(c);
}

std::shared_ptr<const TubeScalarField> make_random_tube_scalar(Rng& rng) {
    return std::make_shared<AmbientExprTubeScalarField>(make_random_ambient_expr(rng));
}

std::shared_ptr<const TubeVectorField> make_random_tube_vector(Rng& rng) {
    std::array<ExprPtr, 3> c{make_random_ambient_expr(rng), make_random_ambient_expr(rng),
                             make_random_ambient_expr(rng)};
    return std::make_shared<AmbientExprTubeVectorField>(c);
}

}  // namespace sdcalc
