// Copyright 2026 The SGLV Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <vector>

#include "sglv/camera.hpp"
#include "sglv/image.hpp"
#include "sglv/math.hpp"

namespace sglv {

/// Axis-aligned box in the anchor camera frame (x right, y up, z backward,
/// origin at the camera center) split into nx*ny*nz voxels.
struct VolumeConfig {
    std::array<double, 3> lo{};
    std::array<double, 3> hi{};
    std::array<int, 3> counts{};
    Frame anchor;

    static constexpr std::array<int, 3> kDefaultCounts{84, 60, 64};

    std::size_t voxel_count() const {
        return static_cast<std::size_t>(counts[0]) * counts[1] * counts[2];
    }
    double voxel_side(int axis) const { return (hi[axis] - lo[axis]) / counts[axis]; }
    double min_voxel_side() const;
    double diagonal() const;

    /// Linear index with x fastest, then y, then z.
    std::size_t index(int ix, int iy, int iz) const {
        return (static_cast<std::size_t>(iz) * counts[1] + iy) * counts[0] + ix;
    }
    Vec3 voxel_center_local(int ix, int iy, int iz) const;
    Vec3 voxel_center_world(int ix, int iy, int iz) const {
        return anchor.to_world_point(voxel_center_local(ix, iy, iz));
    }
    bool contains_local(const Vec3& p) const;
    bool contains_world(const Vec3& p) const { return contains_local(anchor.to_local_point(p)); }

    void validate() const;
    bool same_geometry(const VolumeConfig& o) const { return lo == o.lo && hi == o.hi && counts == o.counts; }
};

/// Volume extents scale with the largest depth seen by the anchor camera:
/// x in [-1.1, 1.1], y in [-0.8, 0.8], z in [-1.2, 0.5] times depth_max.
VolumeConfig make_volume_config(double depth_max, const Camera& anchor,
                                std::array<int, 3> counts = VolumeConfig::kDefaultCounts);

/// Voxel grid with `channels` values per voxel, interleaved.
struct Grid {
    std::array<int, 3> counts{};
    int channels = 1;
    std::vector<double> data;

    Grid() = default;
    Grid(std::array<int, 3> counts_, int channels_, double fill = 0.0);

    std::size_t voxel_count() const { return static_cast<std::size_t>(counts[0]) * counts[1] * counts[2]; }
    double& at(std::size_t voxel, int ch = 0) { return data[voxel * channels + ch]; }
    double at(std::size_t voxel, int ch = 0) const { return data[voxel * channels + ch]; }
    Vec3 vec3(std::size_t voxel) const { return {at(voxel, 0), at(voxel, 1), at(voxel, 2)}; }
    void set_vec3(std::size_t voxel, const Vec3& v) { at(voxel, 0) = v.x; at(voxel, 1) = v.y; at(voxel, 2) = v.z; }
    bool same_shape(const Grid& o) const { return counts == o.counts && channels == o.channels; }

    friend bool operator==(const Grid&, const Grid&) = default;
};

/// Color, opacity and empty-space channels built from one RGBD frame.
struct InitialVolume {
    VolumeConfig config;
    Grid color;    // 3 ch, alpha-premultiplied
    Grid alpha;    // 1 ch in [0,1]
    Grid empty;    // 1 ch in {-1, 0}
};

/// Spherical-Gaussian lighting volume: emission c, opacity alpha and a lobe
/// (w, lambda, s) per voxel.
struct SglvGrid {
    VolumeConfig config;
    Grid color;      // c, 3 ch, >= 0
    Grid alpha;      // 1 ch, [0,1]
    Grid weight;     // w, 3 ch, >= 0
    Grid sharpness;  // lambda, 1 ch, >= 0
    Grid axis;       // s, 3 ch, unit

    static constexpr Vec3 kDefaultAxis{0, 0, 1};

    /// Empty volume: c = w = alpha = 0, lambda = 1, s = +z.
    static SglvGrid zeros(const VolumeConfig& config);

    std::array<Grid*, 5> fields() { return {&color, &alpha, &weight, &sharpness, &axis}; }
    std::array<const Grid*, 5> fields() const { return {&color, &alpha, &weight, &sharpness, &axis}; }

    /// Throws if any grid breaks its range constraint (tolerance for unit axes 1e-5).
    void validate() const;

    friend bool operator==(const SglvGrid& a, const SglvGrid& b) {
        return a.color == b.color && a.alpha == b.alpha && a.weight == b.weight && a.sharpness == b.sharpness &&
               a.axis == b.axis;
    }
};

/// Opacity for a point at `point_depth` along the view axis when the observed
/// surface lies at `surface_depth`; both measured in units where one voxel is `voxel_side`.
double alpha_from_depth(double surface_depth, double point_depth, double voxel_side);
/// -1 when the point is more than three voxels in front of the surface, else 0.
double empty_from_depth(double surface_depth, double point_depth, double voxel_side);

/// Per-voxel projection into `camera` and the interpolated depth there, or
/// nothing when the voxel is behind the camera, outside the image, or lands on
/// invalid depth.
struct VoxelDepthSample {
    bool valid = false;
    double px = 0.0;
    double py = 0.0;
    double voxel_depth = 0.0;    // (v - o) . forward
    double surface_depth = 0.0;  // bilinear D at proj(v)
};
VoxelDepthSample sample_voxel_depth(const Camera& camera, const DepthMap& depth, const Vec3& world_point);

Grid init_alpha(const VolumeConfig& config, const Camera& camera, const DepthMap& depth);
Grid init_color(const Grid& alpha, const Camera& camera, const HdrImage& image, const VolumeConfig& config);
Grid init_empty_channel(const VolumeConfig& config, const Camera& camera, const DepthMap& depth);
InitialVolume build_initial_volume(const VolumeConfig& config, const Camera& camera, const HdrImage& image,
                                   const DepthMap& depth);

/// Lobe-free SGLV seeded from an initial volume (w = 0, lambda = 1, s = +z).
SglvGrid sglv_from_initial(const InitialVolume& init);

/// Scales every grid by (1 + e); cleared voxels get the default axis.
SglvGrid clear_near_surface(const SglvGrid& sglv, const Grid& empty);

/// Voxelwise current*(1-u) + u*previous for every grid; axes renormalized.
SglvGrid merge_volumes(const SglvGrid& current, const SglvGrid& previous, const Grid& update);
SglvGrid merge_volumes(const SglvGrid& current, const SglvGrid& previous, double update);

/// Trilinear stencil over voxel centers. Points outside the volume box get
/// no taps; inside, indices clamp at the outermost voxel centers.
struct TrilinearTaps {
    bool inside = false;
    std::array<std::size_t, 8> voxel{};
    std::array<double, 8> weight{};
};
TrilinearTaps trilinear_taps(const VolumeConfig& config, const Vec3& local_point);
double trilinear(const VolumeConfig& config, const Grid& grid, const Vec3& local_point, int ch = 0);

/// Binary SGLV file (magic "SGLV", version 1; see README for the layout).
void write_sglv(const std::filesystem::path& path, const SglvGrid& sglv);
SglvGrid read_sglv(const std::filesystem::path& path);

}  // namespace sglv
