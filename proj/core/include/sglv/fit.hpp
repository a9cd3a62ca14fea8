// Copyright 2026 The SGLV Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "sglv/equirect.hpp"
#include "sglv/raytrace.hpp"
#include "sglv/shading.hpp"
#include "sglv/volume.hpp"

namespace sglv {

struct LossWeights {
    double render = 0.3;
    double smooth = 0.01;
};

enum class LossMode { Single, Video };

/// Glossy-sphere setup shared by the render loss in fitting and evaluation.
struct RenderLossSpec {
    MicrofacetBrdf brdf{};
    SphereRenderSpec sphere{32, 64, SamplingMode::Importance, 0, 0.5};
};

/// Mean over sphere pixels and channels of (min(R,1) - min(R_gt,1))^2, both
/// spheres drawn from the same random samples.
double loss_render(const EquirectMap& pred, const EquirectMap& gt, const RenderLossSpec& spec = {});

/// Mean over the list of log-L2 + render * render-loss; video mode adds
/// smooth * the mean consecutive-prediction smoothness term.
double total_loss(const std::vector<EquirectMap>& preds, const std::vector<EquirectMap>& gts,
                  const LossWeights& weights, LossMode mode, const RenderLossSpec& spec = {});

/// Supervision: a probe position (world) and its HDR environment map.
struct FitTarget {
    Vec3 position;
    EquirectMap map;
};

struct FitOptions {
    int iterations = 500;
    double learning_rate = 0.1;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_epsilon = 1e-8;
    /// Starting values are clamped to [alpha_floor, 1 - alpha_floor] and
    /// [value_floor, inf) before mapping to unconstrained parameters.
    double alpha_floor = 1e-3;
    double value_floor = 1e-3;
    LossWeights weights{};
    /// Turns the render-loss term off entirely (weights.render is then ignored).
    bool render_loss = true;
    RenderLossSpec render{};
    RenderSettings settings{};
    std::uint64_t seed = 0;
};

struct FitTraceRow {
    int iteration = 0;
    double log_l2 = 0.0;
    double render = 0.0;
    double total = 0.0;
};

struct FitResult {
    SglvGrid sglv;
    std::vector<FitTraceRow> trace;  // one row per evaluated iterate, iterate 0 is the start
    int best_iteration = 0;
    double initial_loss = 0.0;
    double best_loss = 0.0;
};

/// Objective terms averaged over targets, with optional gradient.
struct ObjectiveValue {
    double log_l2 = 0.0;
    double render = 0.0;
    double total = 0.0;
};

/// Frozen fitting objective: sphere plans and clamped ground-truth spheres are
/// built once so every evaluation sees the same samples.
class FitObjective {
public:
    FitObjective(const VolumeConfig& config, std::vector<FitTarget> targets, const LossWeights& weights,
                 bool render_loss, const RenderLossSpec& render, const RenderSettings& settings);

    /// Adds the gradient into `grad` when it is non-null.
    ObjectiveValue evaluate(const SglvGrid& sglv, SglvGradient* grad = nullptr) const;

    const std::vector<FitTarget>& targets() const { return targets_; }

private:
    std::vector<FitTarget> targets_;
    LossWeights weights_;
    bool render_loss_;
    RenderSettings settings_;
    std::vector<SpherePlan> plans_;
    std::vector<HdrImage> gt_spheres_;
};

/// Adam over unconstrained parameters: logistic alpha, softplus c/w/lambda,
/// normalized free axis. Near-surface clearing runs on every iterate.
FitResult fit_sglv(const SglvGrid& start, const Grid& empty, const std::vector<FitTarget>& targets,
                   const FitOptions& options = {});
FitResult fit_sglv(const InitialVolume& init, const std::vector<FitTarget>& targets, const FitOptions& options = {});

void write_fit_trace(const std::filesystem::path& path, const std::vector<FitTraceRow>& trace);

struct GradCheckOptions {
    double eps = 1e-3;
    double denominator_floor = 1e-6;
    LossWeights weights{0.0, 0.0};
    bool render_loss = false;
    RenderLossSpec render{};
    RenderSettings settings{};
};

struct GradCheckReport {
    double max_relative_error = 0.0;
    std::size_t checked = 0;
    std::size_t skipped = 0;
    std::size_t sign_mismatches = 0;  // among entries where either side is above the floor
};

/// Central differences on every parameter against the analytic gradient.
/// Alpha entries sitting exactly at 0 or 1 are skipped.
GradCheckReport grad_check(const SglvGrid& sglv, const std::vector<FitTarget>& targets,
                           const GradCheckOptions& options = {});

/// Random valid volume: alpha in [0.05, 0.6], c and w in [0, 1], lambda in
/// [0, 8], uniformly random unit axes.
SglvGrid random_sglv(const VolumeConfig& config, std::uint64_t seed);

/// A random size^3 volume in the cube [-1,1]^3 with one probe target rendered
/// from an independent random volume.
struct GradCheckCase {
    SglvGrid sglv;
    std::vector<FitTarget> targets;
};
GradCheckCase random_gradcheck_case(int size, int height, std::uint64_t seed);

}  // namespace sglv
