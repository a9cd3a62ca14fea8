// Copyright 2026 The SGLV Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "sglv/math.hpp"

namespace sglv {

/// Pinhole camera. The view direction is -backward; image rows grow downward
/// (against `up`) and columns grow along `right`. Pixel centers sit at integer
/// coordinates, so pixel (row, col) covers [col-0.5, col+0.5) x [row-0.5, row+0.5).
struct Camera {
    Frame pose;  // origin = camera center
    double fx = 1.0;
    double fy = 1.0;
    double cx = 0.0;
    double cy = 0.0;
    int width = 2;
    int height = 2;

    Vec3 position() const { return pose.origin; }
    Vec3 forward() const { return -pose.backward; }

    /// Throws if the intrinsics or axes break the camera invariants.
    void validate() const;

    /// Square-pixel camera looking from `eye` toward `target` with the given
    /// horizontal field of view; principal point at the image center.
    static Camera look_at(const Vec3& eye, const Vec3& target, const Vec3& world_up, int width, int height,
                          double hfov_degrees);
};

struct Projection {
    double x = 0.0;  // column coordinate
    double y = 0.0;  // row coordinate
    double depth = 0.0;
    bool in_front = false;

    /// Inside the pixel footprint of a width x height image.
    bool inside(int width, int height) const {
        return in_front && x >= -0.5 && x < width - 0.5 && y >= -0.5 && y < height - 0.5;
    }
};

/// Pinhole projection; `depth` is the distance along the forward axis.
Projection project(const Camera& cam, const Vec3& point);

/// Inverse of project. Throws for nonpositive depth.
Vec3 unproject(const Camera& cam, double x, double y, double depth);

}  // namespace sglv
