// Copyright 2026 The SGLV Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "sglv/camera.hpp"
#include "sglv/volume.hpp"
#include "support.hpp"

using namespace sglv;

namespace {

Camera box_camera() { return Camera::look_at({0, 0, 0}, {0, 0, -1}, {0, 1, 0}, 32, 24, 60.0); }

DepthMap flat_depth(int w, int h, double d) {
    DepthMap dm(w, h);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) dm.set(r, c, d);
    return dm;
}

SglvGrid scalar_grid(std::array<int, 3> counts, double value) {
    VolumeConfig cfg;
    cfg.lo = {0, 0, 0};
    cfg.hi = {1, 1, 1};
    cfg.counts = counts;
    SglvGrid g = SglvGrid::zeros(cfg);
    for (Grid* f : g.fields())
        for (double& v : f->data) v = value;
    for (std::size_t v = 0; v < cfg.voxel_count(); ++v) g.axis.set_vec3(v, {0, 0, 1});
    return g;
}

}  // namespace

TEST_CASE("make_volume_config ranges") {
    const VolumeConfig c = make_volume_config(5.0, box_camera());
    CHECK(c.lo[0] == doctest::Approx(-5.5));
    CHECK(c.hi[0] == doctest::Approx(5.5));
    CHECK(c.lo[1] == doctest::Approx(-4.0));
    CHECK(c.hi[1] == doctest::Approx(4.0));
    CHECK(c.lo[2] == doctest::Approx(-6.0));
    CHECK(c.hi[2] == doctest::Approx(2.5));
    CHECK(c.counts == std::array<int, 3>{84, 60, 64});
    CHECK(c.voxel_side(0) == doctest::Approx(11.0 / 84));
    const VolumeConfig one = make_volume_config(1.0, box_camera());
    CHECK(one.lo[0] == doctest::Approx(-1.1));
    CHECK(one.hi[0] == doctest::Approx(1.1));
    CHECK_THROWS_AS(make_volume_config(0.0, box_camera()), Error);
    CHECK_THROWS_AS(make_volume_config(-1.0, box_camera()), Error);
}

TEST_CASE("alpha branch examples") {
    CHECK(alpha_from_depth(2.0, 2.0, 0.1) == 1.0);
    CHECK(alpha_from_depth(2.0, 2.0 - 1.0 * 0.125, 0.125) == 0.0);
    CHECK(alpha_from_depth(2.0, 2.0 - 0.75 * 0.125, 0.125) == 1.0);
    CHECK(alpha_from_depth(2.0, 2.0 + 5.0 * 0.125, 0.125) == 0.0);
    // interior of both ramps
    CHECK(alpha_from_depth(2.0, 2.0 - 0.875 * 0.125, 0.125) == doctest::Approx(0.5));
    CHECK(alpha_from_depth(2.0, 2.0 + 4.875 * 0.125, 0.125) == doctest::Approx(0.5));
}

TEST_CASE("empty channel examples") {
    CHECK(empty_from_depth(2.0, 2.0 - 4 * 0.125, 0.125) == -1.0);
    CHECK(empty_from_depth(2.0, 2.0 - 2 * 0.125, 0.125) == 0.0);
    CHECK(empty_from_depth(2.0, 2.0 - 3 * 0.125, 0.125) == 0.0);
}

TEST_CASE("alpha profile along camera rays") {
    const double v = 0.1;
    for (int i = 0; i <= 1000; ++i) {
        const double offset = -8.0 + 16.0 * i / 1000.0;  // in voxels, positive = behind
        const double a = alpha_from_depth(3.0, 3.0 + offset * v, v);
        CHECK(a >= 0.0);
        CHECK(a <= 1.0);
        if (offset <= -1.0) CHECK(a == 0.0);
        if (offset >= -0.75 && offset <= 4.75) CHECK(a == 1.0);
        if (offset >= 5.0) CHECK(a == 0.0);
    }
}

TEST_CASE("init_alpha and init_empty on a fronto-parallel wall") {
    const Camera cam = box_camera();
    VolumeConfig cfg;
    cfg.lo = {-0.4, -0.3, -3.0};
    cfg.hi = {0.4, 0.3, 0.0};
    cfg.counts = {4, 3, 30};
    cfg.anchor = cam.pose;
    const DepthMap depth = flat_depth(cam.width, cam.height, 1.55);
    const Grid alpha = init_alpha(cfg, cam, depth);
    const Grid empty = init_empty_channel(cfg, cam, depth);
    const double side = cfg.voxel_side(2);
    for (int iz = 0; iz < cfg.counts[2]; ++iz)
        for (int iy = 0; iy < cfg.counts[1]; ++iy)
            for (int ix = 0; ix < cfg.counts[0]; ++ix) {
                const std::size_t idx = cfg.index(ix, iy, iz);
                const Vec3 wp = cfg.voxel_center_world(ix, iy, iz);
                const Projection p = project(cam, wp);
                if (!p.inside(cam.width, cam.height)) {
                    CHECK(alpha.at(idx) == 0.0);
                    CHECK(empty.at(idx) == 0.0);
                    continue;
                }
                const double diff = (p.depth - 1.55) / side;
                double expect = diff < 0 ? 4.0 * (diff + 1.0) : 4.0 * (-diff + 5.0);
                expect = std::clamp(expect, 0.0, 1.0);
                CHECK(alpha.at(idx) == doctest::Approx(expect).epsilon(1e-9));
                CHECK(empty.at(idx) == ((1.55 - p.depth) / side > 3.0 ? -1.0 : 0.0));
            }
}

TEST_CASE("voxels behind the camera or on invalid depth stay empty") {
    const Camera cam = box_camera();
    VolumeConfig cfg;
    cfg.lo = {-0.2, -0.2, 0.1};
    cfg.hi = {0.2, 0.2, 0.5};
    cfg.counts = {2, 2, 2};
    cfg.anchor = cam.pose;
    const Grid behind = init_alpha(cfg, cam, flat_depth(cam.width, cam.height, 1.0));
    for (double a : behind.data) CHECK(a == 0.0);

    cfg.lo = {-0.2, -0.2, -1.2};
    cfg.hi = {0.2, 0.2, -0.8};
    DepthMap none(cam.width, cam.height);
    const Grid invalid = init_alpha(cfg, cam, none);
    for (double a : invalid.data) CHECK(a == 0.0);
}

TEST_CASE("init_color premultiplies by alpha") {
    const Camera cam = box_camera();
    VolumeConfig cfg;
    cfg.lo = {-0.2, -0.2, -1.2};
    cfg.hi = {0.2, 0.2, -0.8};
    cfg.counts = {2, 2, 2};
    cfg.anchor = cam.pose;
    HdrImage img(cam.width, cam.height, 3);
    for (int r = 0; r < cam.height; ++r)
        for (int c = 0; c < cam.width; ++c) img.set_rgb(r, c, {0.2, 0.4, 0.6});
    Grid alpha(cfg.counts, 1, 1.0);
    alpha.at(1) = 0.0;
    alpha.at(2) = 0.5;
    const Grid color = init_color(alpha, cam, img, cfg);
    CHECK(color.at(0, 0) == doctest::Approx(0.2));
    CHECK(color.at(0, 2) == doctest::Approx(0.6));
    CHECK(color.at(1, 1) == 0.0);
    CHECK(color.at(2, 1) == doctest::Approx(0.2));
}

TEST_CASE("clear_near_surface") {
    SglvGrid g = testing::random_volume(3, 11);
    Grid e(g.config.counts, 1, 0.0);
    CHECK(clear_near_surface(g, e) == g);
    e.at(4) = -1.0;
    const SglvGrid cleared = clear_near_surface(g, e);
    CHECK(cleared.alpha.at(4) == 0.0);
    CHECK(cleared.color.vec3(4) == Vec3{0, 0, 0});
    CHECK(cleared.axis.vec3(4) == SglvGrid::kDefaultAxis);
    CHECK(cleared.alpha.at(5) == g.alpha.at(5));
    CHECK(clear_near_surface(cleared, e) == cleared);
    CHECK_THROWS_AS(clear_near_surface(g, Grid({2, 2, 2}, 1)), Error);
}

TEST_CASE("merge_volumes identities") {
    const SglvGrid a = scalar_grid({2, 2, 2}, 0.3);
    const SglvGrid b = scalar_grid({2, 2, 2}, 0.7);
    CHECK(merge_volumes(a, b, 0.0) == a);
    CHECK(merge_volumes(a, b, 1.0) == b);
    const SglvGrid half = merge_volumes(a, b, 0.5);
    CHECK(half.alpha.at(0) == (0.3 + 0.7) / 2);
    CHECK(half.sharpness.at(3) == (0.3 + 0.7) / 2);
    CHECK_THROWS_AS(merge_volumes(a, b, 1.5), Error);
    CHECK_THROWS_AS(merge_volumes(a, b, -0.1), Error);

    const SglvGrid r1 = testing::random_volume(3, 1), r2 = testing::random_volume(3, 2);
    CHECK(merge_volumes(r1, r2, 0.0) == r1);
    CHECK(merge_volumes(r1, r2, 1.0) == r2);
    const SglvGrid mid = merge_volumes(r1, r2, 0.3);
    for (std::size_t v = 0; v < mid.config.voxel_count(); ++v)
        CHECK(length(mid.axis.vec3(v)) == doctest::Approx(1.0));
}

TEST_CASE("trilinear lookup") {
    VolumeConfig cfg;
    cfg.lo = {0, 0, 0};
    cfg.hi = {2, 1, 1};
    cfg.counts = {2, 1, 1};
    Grid g(cfg.counts, 1, 0.0);
    g.at(1) = 2.0;
    CHECK(trilinear(cfg, g, cfg.voxel_center_local(1, 0, 0)) == 2.0);
    CHECK(trilinear(cfg, g, {1.0, 0.5, 0.5}) == doctest::Approx(1.0));
    CHECK(trilinear(cfg, g, {3.0, 0.5, 0.5}) == 0.0);
    const Grid flat(cfg.counts, 1, 0.4);
    CHECK(trilinear(cfg, flat, {0.1, 0.9, 0.2}) == doctest::Approx(0.4));

    const SglvGrid r = testing::random_volume(5, 8);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1.2, 1.2);
    for (int i = 0; i < 300; ++i) {
        const Vec3 p{u(rng), u(rng), u(rng)};
        CHECK(trilinear(r.config, r.color, p, 1) ==
              doctest::Approx(testing::naive_trilinear(r.config, r.color, p, 1)).epsilon(1e-12));
    }
}

TEST_CASE("SGLV file round trip") {
    const auto dir = std::filesystem::temp_directory_path() / "sglv_tests" / "sglv";
    std::filesystem::create_directories(dir);
    SglvGrid g = testing::random_volume(3, 21);
    for (Grid* f : g.fields())
        for (double& v : f->data) v = static_cast<float>(v);
    write_sglv(dir / "v.sglv", g);
    const SglvGrid back = read_sglv(dir / "v.sglv");
    CHECK(back.config.same_geometry(g.config));
    CHECK(back.alpha == g.alpha);
    CHECK(back.color == g.color);
}
