#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "sdcalc/error.hpp"

namespace sdcalc {

// Truncated Laurent series in a formal small parameter eps, with a fixed
// coefficient window. Running the exact operator evaluators on this scalar
// type produces boundary-layer expansions: every 1/|J|, 1/h_s, 1/sigma factor
// turns into its geometric series automatically.
//
// Window: orders MIN_ORD .. MAX_ORD inclusive. Coefficients above MAX_ORD are
// dropped (truncation); producing a nonzero coefficient below MIN_ORD throws.
// The window leaves ample guard above the largest requested expansion order
// (K <= 6) so that divisions by sigma-like factors keep retained coefficients
// exact.
class Series {
public:
    static constexpr int kMinOrd = -8;
    static constexpr int kMaxOrd = 15;
    static constexpr int kSize = kMaxOrd - kMinOrd + 1;

    Series() { c_.fill(0.0); }
    Series(double v) : Series() { c_[-kMinOrd] = v; }  // NOLINT: constants promote

    // The formal parameter itself.
    static Series eps() {
        Series s;
        s.c_[1 - kMinOrd] = 1.0;
        return s;
    }
    // value * eps^k
    static Series monomial(double value, int order) {
        Series s;
        s.set(order, value);
        return s;
    }

    double coeff(int order) const {
        if (order < kMinOrd || order > kMaxOrd) return 0.0;
        return c_[order - kMinOrd];
    }
    void set(int order, double value) {
        if (order < kMinOrd || order > kMaxOrd) throw Error("series order outside window");
        c_[order - kMinOrd] = value;
    }

    // Lowest order with a nonzero coefficient; kMaxOrd + 1 when identically 0.
    int min_order() const {
        for (int i = 0; i < kSize; ++i)
            if (c_[i] != 0.0) return i + kMinOrd;
        return kMaxOrd + 1;
    }

    bool is_zero() const { return min_order() > kMaxOrd; }

    double eval(double eps_value) const {
        double acc = 0.0;
        for (int i = kSize - 1; i >= 0; --i) {
            if (c_[i] == 0.0 && acc == 0.0) continue;
            acc = acc * eps_value + c_[i];
        }
        // acc now equals sum c_i eps^(i); undo the window offset.
        return acc * std::pow(eps_value, kMinOrd);
    }

    friend Series operator+(const Series& a, const Series& b) {
        Series r;
        for (int i = 0; i < kSize; ++i) r.c_[i] = a.c_[i] + b.c_[i];
        return r;
    }
    friend Series operator-(const Series& a, const Series& b) {
        Series r;
        for (int i = 0; i < kSize; ++i) r.c_[i] = a.c_[i] - b.c_[i];
        return r;
    }
    friend Series operator-(const Series& a) {
        Series r;
        for (int i = 0; i < kSize; ++i) r.c_[i] = -a.c_[i];
        return r;
    }
    friend Series operator+(const Series& a) { return a; }

    friend Series operator*(const Series& a, const Series& b) {
        Series r;
        for (int i = 0; i < kSize; ++i) {
            if (a.c_[i] == 0.0) continue;
            for (int j = 0; j < kSize; ++j) {
                if (b.c_[j] == 0.0) continue;
                int k = i + j + kMinOrd;  // absolute order (i+kMin)+(j+kMin) re-indexed
                if (k >= kSize) continue;  // truncated high order
                if (k < 0) throw Error("series underflow below window");
                r.c_[k] += a.c_[i] * b.c_[j];
            }
        }
        return r;
    }

    friend Series operator/(const Series& a, const Series& b) {
        int lead = b.min_order();
        if (lead > kMaxOrd) throw Error("series division by zero");
        // b = eps^lead * bh with bh unit-leading; invert bh as a power series.
        std::array<double, kSize> bh{}, inv{};
        for (int k = 0; k + (lead - kMinOrd) < kSize; ++k) bh[k] = b.c_[k + (lead - kMinOrd)];
        inv[0] = 1.0 / bh[0];
        for (int k = 1; k < kSize; ++k) {
            double acc = 0.0;
            for (int j = 1; j <= k; ++j) acc += bh[j] * inv[k - j];
            inv[k] = -acc / bh[0];
        }
        Series binv;  // eps^(-lead) * inv
        for (int k = 0; k < kSize; ++k) {
            int ord = k - lead;
            if (ord < kMinOrd) {
                if (inv[k] != 0.0) throw Error("series underflow below window");
                continue;
            }
            if (ord > kMaxOrd) break;
            binv.set(ord, inv[k]);
        }
        return a * binv;
    }

    friend Series operator+(const Series& a, double b) { return a + Series(b); }
    friend Series operator+(double a, const Series& b) { return Series(a) + b; }
    friend Series operator-(const Series& a, double b) { return a - Series(b); }
    friend Series operator-(double a, const Series& b) { return Series(a) - b; }
    friend Series operator*(const Series& a, double b) {
        Series r;
        for (int i = 0; i < kSize; ++i) r.c_[i] = a.c_[i] * b;
        return r;
    }
    friend Series operator*(double a, const Series& b) { return b * a; }
    friend Series operator/(const Series& a, double b) { return a * (1.0 / b); }
    friend Series operator/(double a, const Series& b) { return Series(a) / b; }

    Series& operator+=(const Series& o) { *this = *this + o; return *this; }
    Series& operator-=(const Series& o) { *this = *this - o; return *this; }
    Series& operator*=(const Series& o) { *this = *this * o; return *this; }
    Series& operator/=(const Series& o) { *this = *this / o; return *this; }

    // Regular (non-singular) part split for analytic composition.
    double const_part() const {
        if (has_singular_part()) throw DomainError("analytic function of a singular series");
        return c_[-kMinOrd];
    }
    bool has_singular_part() const {
        for (int i = 0; i < -kMinOrd; ++i)
            if (c_[i] != 0.0) return true;
        return false;
    }
    Series high_part() const {  // terms of order >= 1
        Series h = *this;
        for (int i = 0; i <= -kMinOrd; ++i) h.c_[i] = 0.0;
        return h;
    }

private:
    std::array<double, kSize> c_;
};

inline double primal(const Series& s) {
    int m = s.min_order();
    return m > Series::kMaxOrd ? 0.0 : s.coeff(m);
}

inline bool finite(const Series& s) {
    for (int k = Series::kMinOrd; k <= Series::kMaxOrd; ++k)
        if (!std::isfinite(s.coeff(k))) return false;
    return true;
}

namespace detail {
// sum_k taylor[k] * h^k where h has min order >= 1.
template <class Coeffs>
Series compose_taylor(const Coeffs& taylor, int n, const Series& h) {
    Series acc(taylor[0]);
    Series hk(1.0);
    for (int k = 1; k < n; ++k) {
        hk = hk * h;
        if (hk.is_zero()) break;
        acc += taylor[k] * hk;
    }
    return acc;
}
}  // namespace detail

inline Series exp(const Series& s) {
    double a = s.const_part();
    std::array<double, Series::kSize + 1> t{};
    double fac = 1.0;
    for (int k = 0; k <= Series::kSize; ++k) {
        if (k > 0) fac /= k;
        t[k] = std::exp(a) * fac;
    }
    return detail::compose_taylor(t, Series::kSize + 1, s.high_part());
}

inline Series log(const Series& s) {
    double a = s.const_part();
    if (a <= 0.0) throw DomainError("log of non-positive series leading value");
    std::array<double, Series::kSize + 1> t{};
    t[0] = std::log(a);
    double p = 1.0;
    for (int k = 1; k <= Series::kSize; ++k) {
        p /= a;
        t[k] = (k % 2 == 1 ? 1.0 : -1.0) * p / k;
    }
    return detail::compose_taylor(t, Series::kSize + 1, s.high_part());
}

inline Series pow(const Series& s, double e) {
    // Exact nonnegative integer exponents work for any series (incl. singular).
    double ip = 0.0;
    if (std::modf(e, &ip) == 0.0 && e >= 0.0 && e <= 32.0) {
        Series r(1.0), b = s;
        auto n = static_cast<unsigned>(e);
        while (n != 0) {
            if (n & 1u) r = r * b;
            b = b * b;
            n >>= 1u;
        }
        return r;
    }
    double a = s.const_part();
    if (a <= 0.0) throw DomainError("pow of non-positive series leading value");
    std::array<double, Series::kSize + 1> t{};
    double coef = std::pow(a, e);
    t[0] = coef;
    for (int k = 1; k <= Series::kSize; ++k) {
        coef *= (e - (k - 1)) / k / a;
        t[k] = coef;
    }
    return detail::compose_taylor(t, Series::kSize + 1, s.high_part());
}

inline Series sqrt(const Series& s) { return pow(s, 0.5); }

inline Series sin(const Series& s) {
    double a = s.const_part();
    std::array<double, Series::kSize + 1> t{};
    double sa = std::sin(a), ca = std::cos(a), fac = 1.0;
    for (int k = 0; k <= Series::kSize; ++k) {
        if (k > 0) fac /= k;
        switch (k % 4) {
            case 0: t[k] = sa * fac; break;
            case 1: t[k] = ca * fac; break;
            case 2: t[k] = -sa * fac; break;
            default: t[k] = -ca * fac; break;
        }
    }
    return detail::compose_taylor(t, Series::kSize + 1, s.high_part());
}

inline Series cos(const Series& s) {
    double a = s.const_part();
    std::array<double, Series::kSize + 1> t{};
    double sa = std::sin(a), ca = std::cos(a), fac = 1.0;
    for (int k = 0; k <= Series::kSize; ++k) {
        if (k > 0) fac /= k;
        switch (k % 4) {
            case 0: t[k] = ca * fac; break;
            case 1: t[k] = -sa * fac; break;
            case 2: t[k] = -ca * fac; break;
            default: t[k] = sa * fac; break;
        }
    }
    return detail::compose_taylor(t, Series::kSize + 1, s.high_part());
}

inline Series tan(const Series& s) { return sin(s) / cos(s); }

inline Series abs(const Series& s) { return primal(s) < 0.0 ? -s : s; }

}  // namespace sdcalc
