// Copyright 2026 The SGLV Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>

#include "sglv/bvh.hpp"
#include "sglv/camera.hpp"
#include "sglv/panorama.hpp"
#include "support.hpp"

using namespace sglv;

namespace {

Camera wall_camera(int w = 40, int h = 30) { return Camera::look_at({0, 0, 0}, {0, 0, -1}, {0, 1, 0}, w, h, 60.0); }

DepthMap flat(const Camera& cam, double d) {
    DepthMap dm(cam.width, cam.height);
    for (int r = 0; r < cam.height; ++r)
        for (int c = 0; c < cam.width; ++c) dm.set(r, c, d);
    return dm;
}

HdrImage gradient_image(const Camera& cam) {
    HdrImage img(cam.width, cam.height, 3);
    for (int r = 0; r < cam.height; ++r)
        for (int c = 0; c < cam.width; ++c) img.set_rgb(r, c, {c / 10.0, r / 30.0, 0.5});
    return img;
}

double covered_solid_angle(const PanoBundle& b) {
    double sum = 0.0;
    for (int r = 0; r < b.mask.height(); ++r)
        for (int c = 0; c < b.mask.width(); ++c) sum += b.mask.at(r, c) * pixel_solid_angle(r, b.mask.height());
    return sum;
}

}  // namespace

TEST_CASE("flat depth keeps every triangle") {
    const Camera cam = wall_camera();
    const PartialMesh m = build_partial_mesh(cam, flat(cam, 2.0), gradient_image(cam));
    CHECK(m.triangles.size() == static_cast<std::size_t>((cam.width - 1) * (cam.height - 1) * 2));
    CHECK(m.vertices.size() == static_cast<std::size_t>(cam.width * cam.height));
}

TEST_CASE("depth steps drop the straddling quads") {
    const Camera cam = wall_camera();
    DepthMap d = flat(cam, 2.0);
    for (int r = 0; r < cam.height; ++r)
        for (int c = cam.width / 2; c < cam.width; ++c) d.set(r, c, 4.0);
    const PartialMesh m = build_partial_mesh(cam, d, gradient_image(cam));
    CHECK(m.triangles.size() == static_cast<std::size_t>((cam.width - 2) * (cam.height - 1) * 2));
}

TEST_CASE("the gap threshold is a ratio test") {
    const Camera cam = wall_camera(3, 2);
    DepthMap d = flat(cam, 2.0);
    d.set(0, 2, 2.1);
    d.set(1, 2, 2.1);
    CHECK(build_partial_mesh(cam, d, gradient_image(cam), 0.1).triangles.size() == 4);
    CHECK(build_partial_mesh(cam, d, gradient_image(cam), 0.04).triangles.size() == 2);
}

TEST_CASE("empty depth gives an empty mesh and an empty bundle") {
    const Camera cam = wall_camera();
    const PartialMesh m = build_partial_mesh(cam, DepthMap(cam.width, cam.height), gradient_image(cam));
    CHECK(m.triangles.empty());
    const PanoBundle b = render_partial_pano(m, {0, 0, 0}, 8);
    for (double v : b.mask.image().data()) CHECK(v == 0.0);
    for (double v : b.depth.image().data()) CHECK(std::isinf(v));
}

TEST_CASE("covered solid angle of a flat wall matches the rectangle") {
    const Camera cam = wall_camera();
    const double depth = 2.0;
    const PartialMesh m = build_partial_mesh(cam, flat(cam, depth), gradient_image(cam));
    const PanoBundle b = render_partial_pano(m, cam.position(), 240);
    const Vec3 c00 = unproject(cam, 0, 0, depth);
    const Vec3 c11 = unproject(cam, cam.width - 1, cam.height - 1, depth);
    const Vec3 center = 0.5 * (c00 + c11);
    const Vec3 hu{0.5 * (c11.x - c00.x), 0, 0};
    const Vec3 hv{0, 0.5 * (c11.y - c00.y), 0};
    const double expect = testing::rect_solid_angle(cam.position(), center, hu, hv);
    CHECK(std::abs(covered_solid_angle(b) - expect) <= 0.02 * expect);
}

TEST_CASE("bundle invariants") {
    const Camera cam = wall_camera();
    HdrImage img = gradient_image(cam);
    const PartialMesh m = build_partial_mesh(cam, flat(cam, 2.0), img);
    const PanoBundle b = render_partial_pano(m, {0.2, -0.1, -0.5}, 32);
    for (int r = 0; r < 32; ++r)
        for (int c = 0; c < 64; ++c) {
            const double mask = b.mask.at(r, c);
            CHECK((mask == 0.0 || mask == 1.0));
            CHECK(std::isfinite(b.depth.at(r, c)) == (mask == 1.0));
            for (int ch = 0; ch < 3; ++ch) {
                CHECK(b.color.at(r, c, ch) >= 0.0);
                CHECK(b.color.at(r, c, ch) <= 1.0);
                if (mask == 0.0) CHECK(b.color.at(r, c, ch) == 0.0);
            }
        }
}

TEST_CASE("a probe behind the mesh sees nothing on the far side") {
    const Camera cam = wall_camera();
    const PartialMesh m = build_partial_mesh(cam, flat(cam, 2.0), gradient_image(cam));
    const PanoBundle b = render_partial_pano(m, {0, 0, -3.0}, 32);
    for (int r = 0; r < 32; ++r)
        for (int c = 0; c < 64; ++c)
            if (pixel_to_direction(r, c, 32).z < 0.0) CHECK(b.mask.at(r, c) == 0.0);
}

TEST_CASE("approaching the wall widens its solid angle") {
    const Camera cam = wall_camera();
    const PartialMesh m = build_partial_mesh(cam, flat(cam, 2.0), gradient_image(cam));
    double prev = 0.0;
    for (double z : {0.0, -0.5, -1.0, -1.5}) {
        const double cover = covered_solid_angle(render_partial_pano(m, {0, 0, z}, 48));
        CHECK(cover > prev);
        prev = cover;
    }
}

TEST_CASE("pano directions follow the requested frame") {
    const Camera cam = wall_camera();
    const PartialMesh m = build_partial_mesh(cam, flat(cam, 2.0), gradient_image(cam));
    Frame turned;
    turned.right = {0, 0, -1};
    turned.backward = {1, 0, 0};
    const PanoBundle world = render_partial_pano(m, {0, 0, 0}, 16);
    const PanoBundle local = render_partial_pano(m, {0, 0, 0}, 16, turned);
    // the wall sits at world -z, which is local +x in the turned frame
    const PixelCoord pw = direction_to_pixel({0, 0, -1}, 16);
    const PixelCoord pl = direction_to_pixel({1, 0, 0}, 16);
    CHECK(world.mask.at(static_cast<int>(pw.row), static_cast<int>(pw.col)) == 1.0);
    CHECK(local.mask.at(static_cast<int>(pl.row), static_cast<int>(pl.col) % 32) == 1.0);
}

TEST_CASE("BVH agrees with brute force") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Vec3> verts;
    std::vector<std::array<std::uint32_t, 3>> tris;
    for (std::uint32_t i = 0; i < 200; ++i) {
        const Vec3 c{u(rng), u(rng), u(rng)};
        for (int k = 0; k < 3; ++k) verts.push_back(c + 0.2 * Vec3{u(rng), u(rng), u(rng)});
        tris.push_back({3 * i, 3 * i + 1, 3 * i + 2});
    }
    const TriangleBvh bvh(verts, tris);
    for (int i = 0; i < 500; ++i) {
        const Vec3 o{2 * u(rng), 2 * u(rng), 2 * u(rng)};
        const Vec3 d = normalize({u(rng), u(rng), u(rng)});
        double best = std::numeric_limits<double>::infinity();
        for (const auto& t : tris) {
            double bu, bv;
            best = std::min(best, intersect_triangle(o, d, verts[t[0]], verts[t[1]], verts[t[2]], bu, bv));
        }
        const TriangleHit h = bvh.intersect(verts, tris, o, d);
        if (std::isinf(best))
            CHECK_FALSE(h.hit());
        else
            CHECK(h.t == doctest::Approx(best).epsilon(1e-12));
    }
}
