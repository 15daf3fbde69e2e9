#include "sdcalc/oracle.hpp"

namespace sdcalc {

namespace {

Vec3d axis(int i) {
    Vec3d e{0, 0, 0};
    e[i] = 1.0;
    return e;
}

// Run `probe(h)` with step shrinking on collar/projection failures, then one
// Richardson level: central differences are O(h^2), so (4 D(h/2) - D(h))/3.
template <class Value, class Probe>
Value richardson(const Probe& probe, double h, int max_shrinks) {
    for (int attempt = 0;; ++attempt) {
        try {
            Value coarse = probe(h);
            Value fine = probe(h * 0.5);
            return (fine * 4.0 - coarse) * (1.0 / 3.0);
        } catch (const Error&) {
            if (attempt >= max_shrinks) throw;
            h *= 0.5;
        }
    }
}

// Two Richardson levels (eliminates h^2 and h^4): second-derivative stencils
// need this near the collar edge, where curvature amplifies the pullback's
// higher derivatives.
template <class Value, class Probe>
Value richardson2(const Probe& probe, double h, int max_shrinks) {
    for (int attempt = 0;; ++attempt) {
        try {
            Value d1 = probe(h);
            Value d2 = probe(h * 0.5);
            Value d3 = probe(h * 0.25);
            Value r1 = (d2 * 4.0 - d1) * (1.0 / 3.0);
            Value r2 = (d3 * 4.0 - d2) * (1.0 / 3.0);
            return (r2 * 16.0 - r1) * (1.0 / 15.0);
        } catch (const Error&) {
            if (attempt >= max_shrinks) throw;
            h *= 0.5;
        }
    }
}

// Seed a hint at the stencil center so every stencil evaluation starts Newton
// from the projected center coordinates.
template <class Field>
AmbientEvalHint center_hint(const Field& f, const Vec3d& x) {
    AmbientEvalHint h;
    f.eval(x, h);
    return h;
}

}  // namespace

Vec3d fd_grad(const AmbientScalar& f, const Vec3d& x, const FdOptions& opt) {
    double h0 = opt.h1 * std::max(1.0, norm(x));
    AmbientEvalHint seed = center_hint(f, x);
    auto probe = [&](double h) {
        Vec3d g;
        for (int i = 0; i < 3; ++i) {
            AmbientEvalHint hp = seed, hm = seed;
            g[i] = (f.eval(x + axis(i) * h, hp) - f.eval(x - axis(i) * h, hm)) / (2.0 * h);
        }
        return g;
    };
    return richardson<Vec3d>(probe, h0, opt.max_shrinks);
}

Mat3d fd_vector_gradient(const AmbientVector& u, const Vec3d& x, const FdOptions& opt) {
    double h0 = opt.h1 * std::max(1.0, norm(x));
    AmbientEvalHint seed = center_hint(u, x);
    auto probe = [&](double h) {
        Mat3d m;
        for (int i = 0; i < 3; ++i) {
            AmbientEvalHint hp = seed, hm = seed;
            Vec3d d = (u.eval(x + axis(i) * h, hp) - u.eval(x - axis(i) * h, hm)) / (2.0 * h);
            for (int j = 0; j < 3; ++j) m[i][j] = d[j];
        }
        return m;
    };
    return richardson<Mat3d>(probe, h0, opt.max_shrinks);
}

double fd_div(const AmbientVector& u, const Vec3d& x, const FdOptions& opt) {
    return trace(fd_vector_gradient(u, x, opt));
}

Vec3d fd_curl(const AmbientVector& u, const Vec3d& x, const FdOptions& opt) {
    Mat3d g = fd_vector_gradient(u, x, opt);  // g[i][j] = d_i u_j
    return {g[1][2] - g[2][1], g[2][0] - g[0][2], g[0][1] - g[1][0]};
}

double fd_scalar_lap(const AmbientScalar& f, const Vec3d& x, const FdOptions& opt) {
    double h0 = opt.h2 * std::max(1.0, norm(x));
    AmbientEvalHint seed = center_hint(f, x);
    auto probe = [&](double h) {
        AmbientEvalHint h0c = seed;
        double fc = f.eval(x, h0c);
        double acc = 0.0;
        for (int i = 0; i < 3; ++i) {
            AmbientEvalHint hp = seed, hm = seed;
            acc += (f.eval(x + axis(i) * h, hp) - 2.0 * fc + f.eval(x - axis(i) * h, hm)) / (h * h);
        }
        return acc;
    };
    return richardson2<double>(probe, h0, opt.max_shrinks);
}

Vec3d fd_vector_lap(const AmbientVector& u, const Vec3d& x, const FdOptions& opt) {
    double h0 = opt.h2 * std::max(1.0, norm(x));
    AmbientEvalHint seed = center_hint(u, x);
    auto probe = [&](double h) {
        AmbientEvalHint h0c = seed;
        Vec3d uc = u.eval(x, h0c);
        Vec3d acc{0, 0, 0};
        for (int i = 0; i < 3; ++i) {
            AmbientEvalHint hp = seed, hm = seed;
            acc += (u.eval(x + axis(i) * h, hp) - uc * 2.0 + u.eval(x - axis(i) * h, hm)) *
                   (1.0 / (h * h));
        }
        return acc;
    };
    return richardson2<Vec3d>(probe, h0, opt.max_shrinks);
}

Mat3d fd_hessian(const AmbientScalar& f, const Vec3d& x, const FdOptions& opt) {
    double h0 = opt.h2 * std::max(1.0, norm(x));
    AmbientEvalHint seed = center_hint(f, x);
    auto probe = [&](double h) {
        Mat3d m;
        AmbientEvalHint hc = seed;
        double fc = f.eval(x, hc);
        for (int i = 0; i < 3; ++i) {
            AmbientEvalHint hp = seed, hm = seed;
            m[i][i] = (f.eval(x + axis(i) * h, hp) - 2.0 * fc + f.eval(x - axis(i) * h, hm)) /
                      (h * h);
        }
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j) {
                AmbientEvalHint a = seed, b = seed, c = seed, d = seed;
                double v = (f.eval(x + axis(i) * h + axis(j) * h, a) -
                            f.eval(x + axis(i) * h - axis(j) * h, b) -
                            f.eval(x - axis(i) * h + axis(j) * h, c) +
                            f.eval(x - axis(i) * h - axis(j) * h, d)) /
                           (4.0 * h * h);
                m[i][j] = v;
                m[j][i] = v;
            }
        return m;
    };
    return richardson2<Mat3d>(probe, h0, opt.max_shrinks);
}

Vec3d fd_convective(const AmbientVector& u, const Vec3d& x, const FdOptions& opt) {
    Mat3d g = fd_vector_gradient(u, x, opt);
    AmbientEvalHint h;
    Vec3d uc = u.eval(x, h);
    return vecmat(uc, g);
}

namespace {

// one Cartesian component of a vector field as an ambient scalar
class ComponentScalar final : public AmbientScalar {
public:
    ComponentScalar(const AmbientVector& u, int axis) : u_(u), axis_(axis) {}
    double eval(const Vec3d& x, AmbientEvalHint& hint) const override {
        return u_.eval(x, hint)[axis_];
    }

private:
    const AmbientVector& u_;
    int axis_;
};

}  // namespace

Vec3d fd_curl_curl(const AmbientVector& u, const Vec3d& x, const FdOptions& opt) {
    // -curl curl u = lap u - grad(div u); both assemble from the component
    // Hessians H_j of u_j: (grad div u)_i = sum_j H_j[i][j], (lap u)_i = tr H_i
    Mat3d H[3];
    for (int j = 0; j < 3; ++j) {
        ComponentScalar cj(u, j);
        H[j] = fd_hessian(cj, x, opt);
    }
    Vec3d out;
    for (int i = 0; i < 3; ++i) {
        double grad_div = H[0][i][0] + H[1][i][1] + H[2][i][2];
        out[i] = trace(H[i]) - grad_div;
    }
    return out;
}

}  // namespace sdcalc
