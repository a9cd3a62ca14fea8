// Copyright 2026 The SGLV Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "sglv/equirect.hpp"

namespace sglv {

/// Diffuse + GGX specular BRDF (Smith height-correlated masking, Schlick Fresnel).
/// GGX alpha = roughness^2.
struct MicrofacetBrdf {
    Vec3 albedo{0.8, 0.8, 0.8};
    double roughness = 0.2;
    double f0 = 0.04;
    bool diffuse_only = false;
};

/// f(l, v) without the cosine factor; zero below either horizon.
Vec3 eval_brdf(const MicrofacetBrdf& brdf, const Vec3& n, const Vec3& v, const Vec3& l);

struct BrdfSample {
    Vec3 l;
    double pdf = 0.0;
};

/// Picks GGX half-vector sampling with probability `specular_probability`,
/// cosine-weighted diffuse sampling otherwise. pdf is the full mixture density.
BrdfSample sample_brdf(const MicrofacetBrdf& brdf, const Vec3& n, const Vec3& v, std::mt19937_64& rng,
                       double specular_probability = 0.5);
double pdf_brdf(const MicrofacetBrdf& brdf, const Vec3& n, const Vec3& v, const Vec3& l,
                double specular_probability = 0.5);

/// Specular albedo heuristic for the mixture weight: f0 / (f0 + (1 - f0) * mean albedo).
double specular_sampling_weight(const MicrofacetBrdf& brdf);

enum class SamplingMode { Importance, Uniform };

struct SphereRenderSpec {
    int resolution = 128;
    int spp = 64;
    SamplingMode mode = SamplingMode::Importance;
    std::uint64_t seed = 0;
    /// Mixture weight for importance mode; unset uses specular_sampling_weight.
    std::optional<double> specular_probability;
};

/// Orthographic glossy sphere facing the camera (view direction +z in the map frame).
/// Pixels off the sphere are zero. Each pixel draws from its own seeded stream.
HdrImage render_sphere(const EquirectMap& env, const MicrofacetBrdf& brdf, const SphereRenderSpec& spec);

/// Frozen Monte-Carlo estimator as a sparse linear map from panorama pixels to
/// sphere pixels. Rendering two maps through one plan uses common random numbers.
class SpherePlan {
public:
    SpherePlan(int env_height, const MicrofacetBrdf& brdf, const SphereRenderSpec& spec);

    int resolution() const { return resolution_; }
    int env_height() const { return env_height_; }

    HdrImage apply(const EquirectMap& env) const;
    /// Adjoint: maps d/dSphere to d/dPanorama.
    Image apply_transpose(const Image& sphere_grad) const;

private:
    struct Entry {
        std::uint32_t env_pixel;
        Vec3 weight;
    };
    int resolution_ = 0;
    int env_height_ = 0;
    std::vector<std::size_t> offsets_;  // per sphere pixel, size res*res+1
    std::vector<Entry> entries_;
};

/// Unit normal of sphere pixel (row, col), or false when the pixel misses the sphere.
bool sphere_normal(int row, int col, int resolution, Vec3& n);

/// Per-pixel random stream derived from (seed, pixel index).
std::mt19937_64 pixel_rng(std::uint64_t seed, std::uint64_t pixel);

}  // namespace sglv
