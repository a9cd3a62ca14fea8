// Copyright 2026 The SGLV Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "sglv/equirect.hpp"
#include "sglv/volume.hpp"

namespace sglv {

/// Ray marching parameters. Zero-valued fields resolve against the volume:
/// step defaults to half the smallest voxel side and max_length to the volume diagonal.
struct RenderSettings {
    double step = 0.0;
    double max_length = 0.0;
    int max_samples = 256;
    /// Forward rendering stops once transmittance falls below this; gradient passes ignore it.
    double early_out_transmittance = 1e-4;
};

/// Uniform sample positions t_i = (i + 0.5) * step for i < count.
struct RaySampling {
    double step = 0.0;
    int count = 0;
};
RaySampling resolve_sampling(const VolumeConfig& config, const RenderSettings& settings);

/// Opacity-composited SGLV parameters along one ray.
struct RayAccum {
    Vec3 color;
    Vec3 weight;
    double sharpness = 0.0;
    Vec3 axis;
};

/// Front-to-back compositing of (c, w, lambda, s) from `origin` along `dir`,
/// both given in world coordinates. Throws for a non-unit direction.
RayAccum accumulate_ray(const SglvGrid& sglv, const Vec3& origin, const Vec3& dir, const RenderSettings& settings = {});

/// Radiance c + w * exp(lambda * (dir . s - 1)) with the accumulated axis used as is.
Vec3 eval_radiance(const RayAccum& accum, const Vec3& dir);

/// HDR panorama at `position` (world); pixel directions live in the volume frame.
EquirectMap render_envmap(const SglvGrid& sglv, const Vec3& position, int height, const RenderSettings& settings = {});

/// Per-voxel gradients with the same layout as SglvGrid.
struct SglvGradient {
    Grid color;
    Grid alpha;
    Grid weight;
    Grid sharpness;
    Grid axis;

    static SglvGradient zeros(const VolumeConfig& config);

    std::array<Grid*, 5> fields() { return {&color, &alpha, &weight, &sharpness, &axis}; }
    std::array<const Grid*, 5> fields() const { return {&color, &alpha, &weight, &sharpness, &axis}; }
    SglvGradient& operator+=(const SglvGradient& o);
    SglvGradient& operator*=(double s);
};

/// Reverse-mode pass: given dLoss/dRadiance per pixel and channel (an image the
/// size of the rendered map), adds dLoss/dParameter into `grad`. Compositing
/// runs without early termination so the result is the exact derivative.
void backprop_envmap(const SglvGrid& sglv, const Vec3& position, const Image& radiance_grad,
                     const RenderSettings& settings, SglvGradient& grad);

enum class EnvLoss { LogL2, L2 };

/// Renders at `position`, evaluates the selected mean loss against `target`,
/// and returns the loss with its gradient for every voxel parameter.
struct LossAndGradient {
    double loss = 0.0;
    SglvGradient grad;
};
LossAndGradient envmap_loss_gradients(const SglvGrid& sglv, const Vec3& position, const EquirectMap& target,
                                      const RenderSettings& settings = {}, EnvLoss loss = EnvLoss::LogL2);

}  // namespace sglv
