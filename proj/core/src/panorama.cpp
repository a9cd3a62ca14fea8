// Copyright 2026 The SGLV Authors
// SPDX-License-Identifier: Apache-2.0

#include "sglv/panorama.hpp"

#include <algorithm>
#include <cmath>

#include "sglv/parallel.hpp"

namespace sglv {

PartialMesh build_partial_mesh(const Camera& camera, const DepthMap& depth, const HdrImage& image,
                               double gap_threshold) {
    if (image.width() != depth.width() || image.height() != depth.height())
        throw Error("build_partial_mesh: image and depth resolution differ");
    if (image.channels() != 3) throw Error("build_partial_mesh: image must be RGB");
    const int W = depth.width();
    const int H = depth.height();
    PartialMesh mesh;
    std::vector<std::int64_t> vertex_of(static_cast<std::size_t>(W) * H, -1);
    for (int r = 0; r < H; ++r) {
        for (int c = 0; c < W; ++c) {
            if (!depth.is_valid(r, c)) continue;
            const double d = depth.depth.at(r, c);
            vertex_of[static_cast<std::size_t>(r) * W + c] = static_cast<std::int64_t>(mesh.vertices.size());
            mesh.vertices.push_back(unproject(camera, c, r, d));
            const Vec3 col = image.rgb(r, c);
            mesh.colors.push_back({clamp01(col.x), clamp01(col.y), clamp01(col.z)});
            mesh.vertex_depth.push_back(d);
        }
    }
    auto try_add = [&](std::int64_t a, std::int64_t b, std::int64_t c) {
        if (a < 0 || b < 0 || c < 0) return;
        const double da = mesh.vertex_depth[a], db = mesh.vertex_depth[b], dc = mesh.vertex_depth[c];
        const double hi = std::max({da, db, dc});
        const double lo = std::min({da, db, dc});
        if (hi / lo - 1.0 > gap_threshold) return;
        mesh.triangles.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b),
                                  static_cast<std::uint32_t>(c)});
    };
    for (int r = 0; r + 1 < H; ++r) {
        for (int c = 0; c + 1 < W; ++c) {
            const std::int64_t v00 = vertex_of[static_cast<std::size_t>(r) * W + c];
            const std::int64_t v01 = vertex_of[static_cast<std::size_t>(r) * W + c + 1];
            const std::int64_t v10 = vertex_of[static_cast<std::size_t>(r + 1) * W + c];
            const std::int64_t v11 = vertex_of[static_cast<std::size_t>(r + 1) * W + c + 1];
            try_add(v00, v01, v10);
            try_add(v01, v11, v10);
        }
    }
    mesh.bvh = TriangleBvh(mesh.vertices, mesh.triangles);
    return mesh;
}

PanoBundle render_partial_pano(const PartialMesh& mesh, const Vec3& position, int height, const Frame& frame) {
    PanoBundle b;
    b.color = EquirectMap(MapKind::Ldr, height);
    b.mask = EquirectMap::mask(height);
    b.depth = EquirectMap::depth(height);
    if (mesh.triangles.empty()) return b;
    const int W = 2 * height;
    parallel_for(static_cast<std::size_t>(height), [&](std::size_t row) {
        const int r = static_cast<int>(row);
        for (int c = 0; c < W; ++c) {
            const Vec3 d = frame.to_world_dir(pixel_to_direction(r, c, height));
            const TriangleHit hit = mesh.bvh.intersect(mesh.vertices, mesh.triangles, position, d);
            if (!hit.hit()) continue;
            const auto& tri = mesh.triangles[hit.triangle];
            const Vec3 col = (1.0 - hit.u - hit.v) * mesh.colors[tri[0]] + hit.u * mesh.colors[tri[1]] +
                             hit.v * mesh.colors[tri[2]];
            b.color.at(r, c, 0) = clamp01(col.x);
            b.color.at(r, c, 1) = clamp01(col.y);
            b.color.at(r, c, 2) = clamp01(col.z);
            b.mask.at(r, c) = 1.0;
            b.depth.at(r, c) = hit.t;
        }
    });
    return b;
}

}  // namespace sglv
