// Copyright 2026 The SGLV Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "sglv/math.hpp"

namespace sglv {

struct TriangleHit {
    double t = std::numeric_limits<double>::infinity();
    double u = 0.0;  // barycentric weight of vertex 1
    double v = 0.0;  // barycentric weight of vertex 2
    std::uint32_t triangle = 0;
    bool hit() const { return t < std::numeric_limits<double>::infinity(); }
};

/// Binary bounding-volume hierarchy over an indexed triangle list. Holds
/// references to neither array; callers pass them back on every query.
class TriangleBvh {
public:
    TriangleBvh() = default;
    TriangleBvh(std::span<const Vec3> vertices, std::span<const std::array<std::uint32_t, 3>> triangles);

    /// Closest hit with t in (t_min, t_max).
    TriangleHit intersect(std::span<const Vec3> vertices, std::span<const std::array<std::uint32_t, 3>> triangles,
                          const Vec3& origin, const Vec3& dir, double t_min = 1e-9,
                          double t_max = std::numeric_limits<double>::infinity()) const;

    std::size_t node_count() const { return nodes_.size(); }

private:
    struct Node {
        Vec3 lo;
        Vec3 hi;
        std::uint32_t first = 0;  // leaf: first index into order_; inner: right child
        std::uint32_t count = 0;  // leaf triangle count; 0 for inner nodes
    };
    std::uint32_t build(std::span<const Vec3> vertices, std::span<const std::array<std::uint32_t, 3>> triangles,
                        std::vector<Vec3>& centroids, std::uint32_t begin, std::uint32_t end);

    std::vector<Node> nodes_;
    std::vector<std::uint32_t> order_;
};

/// Moller-Trumbore ray/triangle test; returns t or +inf.
double intersect_triangle(const Vec3& origin, const Vec3& dir, const Vec3& a, const Vec3& b, const Vec3& c, double& u,
                          double& v);

}  // namespace sglv
