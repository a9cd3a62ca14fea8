// Copyright 2026 The SGLV Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

#include "sglv/fit.hpp"
#include "sglv/panorama.hpp"
#include "sglv/scenegen.hpp"
#include "sglv/temporal.hpp"
#include "sglv/volume.hpp"

namespace sglv {

/// One RGBD frame with the probe supervision used to fit its volume.
struct VideoFrame {
    Camera camera;
    HdrImage image;
    DepthMap depth;
    std::vector<FitTarget> targets;  // maps expressed in the volume (frame-0 camera) frame
};

struct PipelineOptions {
    std::array<int, 3> volume_counts = VolumeConfig::kDefaultCounts;
    int env_height = kDefaultEnvHeight;
    FitOptions fit{};
    int feather = kDefaultFeather;
    double clamp_threshold = kDefaultClampThreshold;
    double gap_threshold = kDefaultGapThreshold;
    bool blend = true;
};

/// Volume box anchored at `frame`'s camera and sized by its largest valid depth.
VolumeConfig pipeline_volume_config(const VideoFrame& frame, const PipelineOptions& options);

struct SingleViewResult {
    FitResult fit;
    EquirectMap volume_map;  // rendered from the fitted volume
    PanoBundle bundle;
    BlendWeights weights;
    EquirectMap blended;  // equals volume_map when blending is off
};

/// Initial volume, fit, render at `probe`, partial panorama and blend for one frame.
/// Targets outside `config` are dropped; with none left the initial volume is used as is.
SingleViewResult run_single_view(const VideoFrame& frame, const Vec3& probe, const VolumeConfig& config,
                                 const PipelineOptions& options, std::uint64_t seed);

/// Everything needed to continue a video run bit-for-bit.
struct PipelineState {
    TemporalState temporal;
    std::optional<SglvGrid> volume;  // merged volume so far, frame-0 anchored
};

void write_pipeline_state(const std::filesystem::path& path, const PipelineState& state);
PipelineState read_pipeline_state(const std::filesystem::path& path);

struct VideoFrameReport {
    int frame = 0;
    double coverage = 0.0;  // mean accumulated mask
    double fit_initial_loss = 0.0;
    double fit_best_loss = 0.0;
    std::size_t targets_used = 0;
};

struct VideoResult {
    std::vector<EquirectMap> outputs;      // accumulated L per processed frame
    std::vector<EquirectMap> independent;  // single-view output of each frame on its own
    std::vector<VideoFrameReport> reports;
    PipelineState state;
};

/// Processes frames[state.temporal.frame ...]. Pass nullopt to start fresh;
/// `on_frame` runs after each frame with the state reached so far.
VideoResult run_video_pipeline(const std::vector<VideoFrame>& frames, const Vec3& probe,
                               const PipelineOptions& options, std::optional<PipelineState> resume = std::nullopt,
                               const std::function<void(const VideoFrameReport&, const PipelineState&)>& on_frame = {});

}  // namespace sglv
