// Copyright 2026 The SGLV Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sglv {

inline constexpr double kPi = std::numbers::pi;

/// Library-wide error type. Contract violations and malformed inputs throw this.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Vec3() = default;
    constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
    constexpr double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }

    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    constexpr Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    constexpr Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    constexpr Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }

    friend constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
    friend constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
    friend constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
    friend constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
    friend constexpr Vec3 operator/(Vec3 a, double s) { return {a.x / s, a.y / s, a.z / s}; }
    friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
constexpr Vec3 mul(const Vec3& a, const Vec3& b) { return {a.x * b.x, a.y * b.y, a.z * b.z}; }
inline double length(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 normalize(const Vec3& a) {
    const double n = length(a);
    if (n == 0.0) throw Error("normalize: zero vector");
    return a / n;
}
constexpr double max_component(const Vec3& a) { return std::max({a.x, a.y, a.z}); }
constexpr double min_component(const Vec3& a) { return std::min({a.x, a.y, a.z}); }

/// Any unit vector orthogonal to `n` plus the completing axis; `n` must be unit.
inline void orthonormal_basis(const Vec3& n, Vec3& t, Vec3& b) {
    // Duff et al. branchless construction
    const double sign = std::copysign(1.0, n.z);
    const double a = -1.0 / (sign + n.z);
    const double bb = n.x * n.y * a;
    t = {1.0 + sign * n.x * n.x * a, sign * bb, -sign * n.x};
    b = {bb, sign + n.y * n.y * a, -n.y};
}

/// Rigid frame: origin plus orthonormal right/up/backward axes.
/// Local coordinates (x, y, z) map to origin + x*right + y*up + z*backward.
struct Frame {
    Vec3 origin{};
    Vec3 right{1, 0, 0};
    Vec3 up{0, 1, 0};
    Vec3 backward{0, 0, 1};

    Vec3 to_world_dir(const Vec3& d) const { return d.x * right + d.y * up + d.z * backward; }
    Vec3 to_local_dir(const Vec3& d) const { return {dot(d, right), dot(d, up), dot(d, backward)}; }
    Vec3 to_world_point(const Vec3& p) const { return origin + to_world_dir(p); }
    Vec3 to_local_point(const Vec3& p) const { return to_local_dir(p - origin); }

    bool is_orthonormal(double tol = 1e-6) const;
};

inline bool Frame::is_orthonormal(double tol) const {
    auto near = [tol](double v, double target) { return std::abs(v - target) <= tol; };
    return near(dot(right, right), 1) && near(dot(up, up), 1) && near(dot(backward, backward), 1) &&
           near(dot(right, up), 0) && near(dot(right, backward), 0) && near(dot(up, backward), 0);
}

inline double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

inline double softplus(double x) {
    return x > 30.0 ? x : std::log1p(std::exp(x));
}
inline double softplus_inverse(double y) {
    return y > 30.0 ? y : std::log(std::expm1(y));
}
inline double sigmoid(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}
inline double logit(double p) { return std::log(p / (1.0 - p)); }

}  // namespace sglv
