// Copyright 2026 The SGLV Authors
// SPDX-License-Identifier: Apache-2.0

#include "sglv/bvh.hpp"

#include <algorithm>
#include <numeric>

namespace sglv {

namespace {

constexpr std::uint32_t kLeafSize = 4;
constexpr double kInf = std::numeric_limits<double>::infinity();

Vec3 vmin(const Vec3& a, const Vec3& b) { return {std::min(a.x, b.x), std::min(a.y, b.y), std::min(a.z, b.z)}; }
Vec3 vmax(const Vec3& a, const Vec3& b) { return {std::max(a.x, b.x), std::max(a.y, b.y), std::max(a.z, b.z)}; }

bool hit_box(const Vec3& lo, const Vec3& hi, const Vec3& o, const Vec3& inv, double t_min, double t_max) {
    for (int a = 0; a < 3; ++a) {
        double t0 = (lo[a] - o[a]) * inv[a];
        double t1 = (hi[a] - o[a]) * inv[a];
        if (t0 > t1) std::swap(t0, t1);
        // NaN from 0*inf on an axis-parallel ray grazing a slab keeps the box
        if (t0 > t_min) t_min = t0;
        if (t1 < t_max) t_max = t1;
        if (t_min > t_max) return false;
    }
    return true;
}

}  // namespace

double intersect_triangle(const Vec3& o, const Vec3& d, const Vec3& a, const Vec3& b, const Vec3& c, double& u,
                          double& v) {
    const Vec3 e1 = b - a;
    const Vec3 e2 = c - a;
    const Vec3 p = cross(d, e2);
    const double det = dot(e1, p);
    if (std::abs(det) < 1e-14) return kInf;
    const double inv = 1.0 / det;
    const Vec3 s = o - a;
    u = dot(s, p) * inv;
    if (u < 0.0 || u > 1.0) return kInf;
    const Vec3 q = cross(s, e1);
    v = dot(d, q) * inv;
    if (v < 0.0 || u + v > 1.0) return kInf;
    const double t = dot(e2, q) * inv;
    return t > 0.0 ? t : kInf;
}

TriangleBvh::TriangleBvh(std::span<const Vec3> vertices, std::span<const std::array<std::uint32_t, 3>> triangles) {
    if (triangles.empty()) return;
    order_.resize(triangles.size());
    std::iota(order_.begin(), order_.end(), 0u);
    std::vector<Vec3> centroids(triangles.size());
    for (std::size_t i = 0; i < triangles.size(); ++i) {
        const auto& t = triangles[i];
        centroids[i] = (vertices[t[0]] + vertices[t[1]] + vertices[t[2]]) / 3.0;
    }
    nodes_.reserve(2 * triangles.size() / kLeafSize + 1);
    build(vertices, triangles, centroids, 0, static_cast<std::uint32_t>(triangles.size()));
}

std::uint32_t TriangleBvh::build(std::span<const Vec3> vertices,
                                 std::span<const std::array<std::uint32_t, 3>> triangles, std::vector<Vec3>& centroids,
                                 std::uint32_t begin, std::uint32_t end) {
    const std::uint32_t index = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back({});
    Vec3 lo{kInf, kInf, kInf}, hi{-kInf, -kInf, -kInf};
    Vec3 clo = lo, chi = hi;
    for (std::uint32_t i = begin; i < end; ++i) {
        for (std::uint32_t k : triangles[order_[i]]) {
            lo = vmin(lo, vertices[k]);
            hi = vmax(hi, vertices[k]);
        }
        clo = vmin(clo, centroids[order_[i]]);
        chi = vmax(chi, centroids[order_[i]]);
    }
    nodes_[index].lo = lo;
    nodes_[index].hi = hi;
    const Vec3 extent = chi - clo;
    if (end - begin <= kLeafSize || max_component(extent) <= 0.0) {
        nodes_[index].first = begin;
        nodes_[index].count = end - begin;
        return index;
    }
    const int axis = extent.x >= extent.y && extent.x >= extent.z ? 0 : (extent.y >= extent.z ? 1 : 2);
    const std::uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) { return centroids[a][axis] < centroids[b][axis]; });
    build(vertices, triangles, centroids, begin, mid);
    const std::uint32_t right = build(vertices, triangles, centroids, mid, end);
    nodes_[index].first = right;
    nodes_[index].count = 0;
    return index;
}

TriangleHit TriangleBvh::intersect(std::span<const Vec3> vertices,
                                   std::span<const std::array<std::uint32_t, 3>> triangles, const Vec3& origin,
                                   const Vec3& dir, double t_min, double t_max) const {
    TriangleHit best;
    if (nodes_.empty()) return best;
    const Vec3 inv{1.0 / dir.x, 1.0 / dir.y, 1.0 / dir.z};
    std::uint32_t stack[64];
    int top = 0;
    stack[top++] = 0;
    double limit = t_max;
    while (top > 0) {
        const Node& node = nodes_[stack[--top]];
        if (!hit_box(node.lo, node.hi, origin, inv, t_min, limit)) continue;
        if (node.count > 0) {
            for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
                const auto& tri = triangles[order_[i]];
                double u = 0, v = 0;
                const double t =
                    intersect_triangle(origin, dir, vertices[tri[0]], vertices[tri[1]], vertices[tri[2]], u, v);
                if (t > t_min && t < limit) {
                    limit = t;
                    best.t = t;
                    best.u = u;
                    best.v = v;
                    best.triangle = order_[i];
                }
            }
        } else {
            const std::uint32_t self = static_cast<std::uint32_t>(&node - nodes_.data());
            stack[top++] = node.first;
            stack[top++] = self + 1;
        }
    }
    return best;
}

}  // namespace sglv
