#pragma once

#include <cmath>
#include <type_traits>

namespace sdcalc {

// Forward-mode AD scalar. Nest (Dual<Dual<double>>, ...) for higher
// derivatives; all geometry code is templated on the scalar type so nesting
// depth is chosen at the call site.
template <class T>
struct Dual {
    using value_type = T;
    T val{};
    T dot{};

    Dual() = default;
    Dual(double v) : val(v), dot() {}  // NOLINT: implicit promotion of constants
    template <class U = T, std::enable_if_t<!std::is_same_v<U, double>, int> = 0>
    Dual(T v) : val(std::move(v)), dot() {}  // NOLINT: promotion with zero derivative
    Dual(T v, T d) : val(std::move(v)), dot(std::move(d)) {}

    Dual& operator+=(const Dual& o) { val += o.val; dot += o.dot; return *this; }
    Dual& operator-=(const Dual& o) { val -= o.val; dot -= o.dot; return *this; }
    Dual& operator*=(const Dual& o) { *this = *this * o; return *this; }
    Dual& operator/=(const Dual& o) { *this = *this / o; return *this; }

    friend Dual operator+(const Dual& a, const Dual& b) { return {a.val + b.val, a.dot + b.dot}; }
    friend Dual operator-(const Dual& a, const Dual& b) { return {a.val - b.val, a.dot - b.dot}; }
    friend Dual operator-(const Dual& a) { return {-a.val, -a.dot}; }
    friend Dual operator+(const Dual& a) { return a; }
    friend Dual operator*(const Dual& a, const Dual& b) {
        return {a.val * b.val, a.dot * b.val + a.val * b.dot};
    }
    friend Dual operator/(const Dual& a, const Dual& b) {
        T q = a.val / b.val;
        return {q, (a.dot - q * b.dot) / b.val};
    }

    friend Dual operator+(const Dual& a, double b) { return a + Dual(b); }
    friend Dual operator+(double a, const Dual& b) { return Dual(a) + b; }
    friend Dual operator-(const Dual& a, double b) { return a - Dual(b); }
    friend Dual operator-(double a, const Dual& b) { return Dual(a) - b; }
    friend Dual operator*(const Dual& a, double b) { return {a.val * b, a.dot * b}; }
    friend Dual operator*(double a, const Dual& b) { return {b.val * a, b.dot * a}; }
    friend Dual operator/(const Dual& a, double b) { return {a.val / b, a.dot / b}; }
    friend Dual operator/(double a, const Dual& b) { return Dual(a) / b; }
};

// primal(): the underlying double used for branch decisions (eigenvalue
// ordering, sign fixes, domain checks). Branches taken on primal values are
// locally constant, so they do not disturb derivative propagation.
inline double primal(double x) { return x; }
template <class T>
double primal(const Dual<T>& x) { return primal(x.val); }

inline bool finite(double x) { return std::isfinite(x); }
template <class T>
bool finite(const Dual<T>& x) { return finite(x.val) && finite(x.dot); }

template <class T>
struct is_dual : std::false_type {};
template <class T>
struct is_dual<Dual<T>> : std::true_type {};

// Math functions. The double overloads come from <cmath> via `using std::`
// at call sites; these are found by ADL.
template <class T> Dual<T> sqrt(const Dual<T>& x) {
    using std::sqrt;
    T r = sqrt(x.val);
    return {r, x.dot / (2.0 * r)};
}
template <class T> Dual<T> sin(const Dual<T>& x) {
    using std::sin; using std::cos;
    return {sin(x.val), cos(x.val) * x.dot};
}
template <class T> Dual<T> cos(const Dual<T>& x) {
    using std::sin; using std::cos;
    return {cos(x.val), -(sin(x.val) * x.dot)};
}
template <class T> Dual<T> tan(const Dual<T>& x) {
    using std::tan; using std::cos;
    T c = cos(x.val);
    return {tan(x.val), x.dot / (c * c)};
}
template <class T> Dual<T> exp(const Dual<T>& x) {
    using std::exp;
    T e = exp(x.val);
    return {e, e * x.dot};
}
template <class T> Dual<T> log(const Dual<T>& x) {
    using std::log;
    return {log(x.val), x.dot / x.val};
}
template <class T> Dual<T> pow(const Dual<T>& x, double e) {
    using std::pow;
    return {pow(x.val, e), e * pow(x.val, e - 1.0) * x.dot};
}
// General x^y via exp(y log x); only reached for non-constant exponents.
template <class T> Dual<T> pow(const Dual<T>& x, const Dual<T>& y) {
    return exp(y * log(x));
}
template <class T> Dual<T> abs(const Dual<T>& x) {
    return primal(x.val) < 0.0 ? -x : x;
}

// Derivative of f at x along one seeded direction.
template <class T, class F>
T derivative(F&& f, const T& x) {
    return f(Dual<T>{x, T(1.0)}).dot;
}

// Lift a scalar into a wider type, adding zero-derivative layers as needed.
template <class TOut, class TIn>
TOut promote(const TIn& v) {
    if constexpr (std::is_same_v<TOut, TIn>) {
        return v;
    } else if constexpr (is_dual<TOut>::value) {
        return TOut(promote<typename TOut::value_type>(v));
    } else {
        return TOut(v);
    }
}

}  // namespace sdcalc
