#pragma once

#include <array>
#include <cmath>

#include "sdcalc/dual.hpp"

namespace sdcalc {

template <class T>
struct Vec3 {
    T x{}, y{}, z{};

    Vec3() = default;
    Vec3(T x_, T y_, T z_) : x(std::move(x_)), y(std::move(y_)), z(std::move(z_)) {}

    T& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
    const T& operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    friend Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
    template <class S> friend Vec3 operator*(const Vec3& a, const S& s) { return {a.x * s, a.y * s, a.z * s}; }
    template <class S> friend Vec3 operator*(const S& s, const Vec3& a) { return {a.x * s, a.y * s, a.z * s}; }
    template <class S> friend Vec3 operator/(const Vec3& a, const S& s) { return {a.x / s, a.y / s, a.z / s}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
};

template <class T> T dot(const Vec3<T>& a, const Vec3<T>& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
template <class T> Vec3<T> cross(const Vec3<T>& a, const Vec3<T>& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
template <class T> T norm2(const Vec3<T>& a) { return dot(a, a); }
template <class T> T norm(const Vec3<T>& a) {
    using std::sqrt;
    return sqrt(norm2(a));
}
template <class T> Vec3<T> normalized(const Vec3<T>& a) { return a / norm(a); }

using Vec3d = Vec3<double>;

inline Vec3d primal(const Vec3d& v) { return v; }
template <class T> Vec3d primal(const Vec3<T>& v) { return {primal(v.x), primal(v.y), primal(v.z)}; }
template <class T> Vec3<T> constant_vec(const Vec3d& v) { return {T(v.x), T(v.y), T(v.z)}; }
// Lift a vector into a wider scalar type (e.g. Vec3<T> -> Vec3<Dual<T>>).
template <class TOut, class TIn> Vec3<TOut> promote_vec(const Vec3<TIn>& v) {
    return {TOut(v.x), TOut(v.y), TOut(v.z)};
}
template <class T> bool finite(const Vec3<T>& v) { return finite(v.x) && finite(v.y) && finite(v.z); }

// 3x3 second-order tensor in ambient Cartesian components (row-major:
// m[i][j] = (e_i . M . e_j); contraction conventions follow the row layout).
template <class T>
struct Mat3 {
    std::array<std::array<T, 3>, 3> m{};

    static Mat3 zero() { return {}; }
    static Mat3 identity() {
        Mat3 r;
        r.m[0][0] = T(1.0); r.m[1][1] = T(1.0); r.m[2][2] = T(1.0);
        return r;
    }

    std::array<T, 3>& operator[](int i) { return m[i]; }
    const std::array<T, 3>& operator[](int i) const { return m[i]; }

    friend Mat3 operator+(const Mat3& a, const Mat3& b) {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.m[i][j] = a.m[i][j] + b.m[i][j];
        return r;
    }
    friend Mat3 operator-(const Mat3& a, const Mat3& b) {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.m[i][j] = a.m[i][j] - b.m[i][j];
        return r;
    }
    friend Mat3 operator-(const Mat3& a) {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.m[i][j] = -a.m[i][j];
        return r;
    }
    template <class S> friend Mat3 operator*(const Mat3& a, const S& s) {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.m[i][j] = a.m[i][j] * s;
        return r;
    }
    template <class S> friend Mat3 operator*(const S& s, const Mat3& a) { return a * s; }
    template <class S> friend Mat3 operator/(const Mat3& a, const S& s) {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.m[i][j] = a.m[i][j] / s;
        return r;
    }
    Mat3& operator+=(const Mat3& o) { *this = *this + o; return *this; }
    Mat3& operator-=(const Mat3& o) { *this = *this - o; return *this; }
};

template <class T> Vec3<T> matvec(const Mat3<T>& a, const Vec3<T>& v) {
    Vec3<T> r;
    for (int i = 0; i < 3; ++i) r[i] = a[i][0] * v.x + a[i][1] * v.y + a[i][2] * v.z;
    return r;
}
// v . M (contraction on the first index).
template <class T> Vec3<T> vecmat(const Vec3<T>& v, const Mat3<T>& a) {
    Vec3<T> r;
    for (int j = 0; j < 3; ++j) r[j] = v.x * a[0][j] + v.y * a[1][j] + v.z * a[2][j];
    return r;
}
template <class T> Mat3<T> matmul(const Mat3<T>& a, const Mat3<T>& b) {
    Mat3<T> r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            T acc = a[i][0] * b[0][j];
            acc += a[i][1] * b[1][j];
            acc += a[i][2] * b[2][j];
            r[i][j] = acc;
        }
    return r;
}
template <class T> Mat3<T> outer(const Vec3<T>& a, const Vec3<T>& b) {
    Mat3<T> r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r[i][j] = a[i] * b[j];
    return r;
}
template <class T> Mat3<T> transpose(const Mat3<T>& a) {
    Mat3<T> r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r[i][j] = a[j][i];
    return r;
}
template <class T> T trace(const Mat3<T>& a) { return a[0][0] + a[1][1] + a[2][2]; }
template <class T> T det(const Mat3<T>& a) {
    return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
         - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
         + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
}

using Mat3d = Mat3<double>;

inline Mat3d primal(const Mat3d& a) { return a; }
template <class T> Mat3d primal(const Mat3<T>& a) {
    Mat3d r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r[i][j] = primal(a[i][j]);
    return r;
}
template <class T> bool finite(const Mat3<T>& a) {
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (!finite(a[i][j])) return false;
    return true;
}

inline double max_abs(const Mat3d& a) {
    double r = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r = std::max(r, std::abs(a[i][j]));
    return r;
}
inline double max_abs(const Vec3d& v) {
    return std::max({std::abs(v.x), std::abs(v.y), std::abs(v.z)});
}

// Solve a 2x2 system [a b; c d] u = r.
template <class T>
std::array<T, 2> solve2(const T& a, const T& b, const T& c, const T& d, const T& r0, const T& r1) {
    T den = a * d - b * c;
    return {(r0 * d - b * r1) / den, (a * r1 - r0 * c) / den};
}

}  // namespace sdcalc
