// Copyright 2026 The SGLV Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "sglv/bvh.hpp"
#include "sglv/camera.hpp"
#include "sglv/equirect.hpp"

namespace sglv {

/// Triangulated RGBD frame: one vertex per valid depth pixel, two triangles
/// per pixel quad, minus triangles that straddle a depth discontinuity.
struct PartialMesh {
    std::vector<Vec3> vertices;
    std::vector<Vec3> colors;  // clamped to [0,1]
    std::vector<double> vertex_depth;
    std::vector<std::array<std::uint32_t, 3>> triangles;
    TriangleBvh bvh;
};

inline constexpr double kDefaultGapThreshold = 0.1;

/// A triangle survives when max/min of its vertex depths minus one is at most `gap_threshold`.
PartialMesh build_partial_mesh(const Camera& camera, const DepthMap& depth, const HdrImage& image,
                               double gap_threshold = kDefaultGapThreshold);

/// Detail color (LDR), visibility mask and hit distance seen from one probe.
struct PanoBundle {
    EquirectMap color;
    EquirectMap mask;
    EquirectMap depth;  // +inf where mask == 0
};

/// Ray-casts the mesh from `position` (world). Pixel directions are expressed in `frame`.
PanoBundle render_partial_pano(const PartialMesh& mesh, const Vec3& position, int height, const Frame& frame = {});

}  // namespace sglv
