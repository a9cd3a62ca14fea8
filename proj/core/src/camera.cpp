// Copyright 2026 The SGLV Authors
// SPDX-License-Identifier: Apache-2.0

#include "sglv/camera.hpp"

#include <cmath>

namespace sglv {

void Camera::validate() const {
    if (!pose.is_orthonormal(1e-6)) throw Error("Camera: axes are not orthonormal");
    if (!(fx > 0.0) || !(fy > 0.0)) throw Error("Camera: focal lengths must be positive");
    if (width < 2 || height < 2) throw Error("Camera: image must be at least 2x2");
}

Camera Camera::look_at(const Vec3& eye, const Vec3& target, const Vec3& world_up, int width, int height,
                       double hfov_degrees) {
    Camera cam;
    const Vec3 fwd = normalize(target - eye);
    const Vec3 right = normalize(cross(fwd, world_up));
    const Vec3 up = cross(right, fwd);
    cam.pose = Frame{eye, right, up, -fwd};
    cam.width = width;
    cam.height = height;
    cam.fx = 0.5 * width / std::tan(0.5 * hfov_degrees * kPi / 180.0);
    cam.fy = cam.fx;
    cam.cx = 0.5 * (width - 1);
    cam.cy = 0.5 * (height - 1);
    return cam;
}

Projection project(const Camera& cam, const Vec3& point) {
    const Vec3 local = cam.pose.to_local_point(point);
    Projection p;
    p.depth = -local.z;
    p.in_front = p.depth > 0.0;
    if (!p.in_front) return p;
    p.x = cam.cx + cam.fx * local.x / p.depth;
    p.y = cam.cy - cam.fy * local.y / p.depth;
    return p;
}

Vec3 unproject(const Camera& cam, double x, double y, double depth) {
    if (!(depth > 0.0)) throw Error("unproject: depth must be positive");
    const Vec3 local{(x - cam.cx) / cam.fx * depth, -(y - cam.cy) / cam.fy * depth, -depth};
    return cam.pose.to_world_point(local);
}

}  // namespace sglv
