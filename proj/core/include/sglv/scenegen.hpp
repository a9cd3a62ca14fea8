// Copyright 2026 The SGLV Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "sglv/camera.hpp"
#include "sglv/equirect.hpp"
#include "sglv/image.hpp"

namespace sglv {

/// Diffuse surface, optionally a two-tone checkerboard with square cells.
struct SurfaceMaterial {
    Vec3 albedo{0.6, 0.6, 0.6};
    bool checker = false;
    Vec3 checker_albedo{0.2, 0.2, 0.2};
    double checker_size = 0.25;
};

/// One-sided emissive rectangle: center +- half_u +- half_v, emitting along cross(half_u, half_v).
struct RectLight {
    Vec3 center;
    Vec3 half_u;
    Vec3 half_v;
    Vec3 radiance;

    Vec3 normal() const { return normalize(cross(half_u, half_v)); }
    double area() const { return 4.0 * length(cross(half_u, half_v)); }
};

/// Opening in a wall. Rays leaving through it see `sky`; surfaces that can see
/// the opening along -direction receive `irradiance` (per unit area facing the light).
struct Window {
    int wall = 0;  // see BoxScene::walls
    Vec3 center;
    Vec3 half_u;
    Vec3 half_v;
    Vec3 direction;  // travel direction of the light, into the room
    Vec3 irradiance;
    Vec3 sky;
};

/// Axis-aligned solid box inside the room.
struct Blocker {
    Vec3 lo;
    Vec3 hi;
    SurfaceMaterial material;
};

/// Room [0,size.x] x [0,size.y] x [0,size.z] with +y up.
struct BoxScene {
    Vec3 size{4.0, 2.6, 4.0};
    /// Order: -x, +x, floor (-y), ceiling (+y), -z, +z.
    std::array<SurfaceMaterial, 6> walls{};
    std::vector<Blocker> blockers;
    std::vector<RectLight> lights;
    std::optional<Window> window;
    Vec3 ambient{0.0, 0.0, 0.0};

    /// Throws when a light or window leaves the room or a radiance is negative.
    void validate() const;
    /// Strictly inside the room and outside every blocker.
    bool is_free(const Vec3& p, double margin = 0.0) const;

    /// Furnished room with a ceiling panel, a window, checkerboard floor and a table-sized blocker.
    static BoxScene default_scene();
};

struct SceneHit {
    bool hit = false;
    double t = 0.0;
    Vec3 radiance;
};

/// Nearest-hit radiance along a world ray: emitters return their radiance,
/// diffuse surfaces return direct lighting (4x4 stratified light samples with
/// shadow rays, window sun) plus albedo * ambient; escaping through the
/// window returns the sky with no hit.
SceneHit trace_scene(const BoxScene& scene, const Vec3& origin, const Vec3& dir);

/// HDR color and forward depth per pixel. Pixels seeing the sky have invalid depth.
std::pair<HdrImage, DepthMap> render_scene_view(const BoxScene& scene, const Camera& camera);

inline constexpr int kDefaultEnvHeight = 120;

/// Ground-truth panorama at `position`; pixel directions are expressed in `frame`.
EquirectMap render_gt_envmap(const BoxScene& scene, const Vec3& position, int height = kDefaultEnvHeight,
                             const Frame& frame = {});

struct TrajectoryOptions {
    int width = 320;
    int height = 240;
    double hfov_deg = 60.0;
    double step = 0.09;            // mean translation between frames, meters
    double rotation_deg = 4.78;    // mean rotation between frames
    double margin = 0.1;           // clearance from walls and blockers
    double pitch_deg = -10.0;
};

inline constexpr int kDefaultTrajectoryFrames = 31;

/// Smooth spline path through random free-space waypoints, resampled to fixed
/// chord length; yaw turns by the target angle per frame with slow variation.
std::vector<Camera> gen_trajectory(const BoxScene& scene, int n_frames, std::uint64_t seed,
                                   const TrajectoryOptions& options = {});

/// Mean translation and rotation angle (degrees) between consecutive poses.
std::pair<double, double> trajectory_step_stats(const std::vector<Camera>& cameras);

inline constexpr double kProbeNear = 0.3;
inline constexpr double kProbeFar = 0.8;

/// Uniform in the frustum truncated to [near, far] * depth_max forward depth.
std::vector<Vec3> sample_probe_positions(const Camera& camera, double depth_max, int n, std::uint64_t seed,
                                         double near = kProbeNear, double far = kProbeFar);

/// Like sample_probe_positions, but rejects points that sit behind (or within
/// `clearance` of) the observed surface; depth_max is taken from `depth`.
std::vector<Vec3> sample_free_probe_positions(const Camera& camera, const DepthMap& depth, int n,
                                              std::uint64_t seed, double clearance = 0.15,
                                              double near = kProbeNear, double far = kProbeFar);

}  // namespace sglv
