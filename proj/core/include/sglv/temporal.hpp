// Copyright 2026 The SGLV Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>

#include "sglv/equirect.hpp"
#include "sglv/panorama.hpp"

namespace sglv {

/// Per-pixel weight in [0,1] for mixing detail into the volume-rendered map.
struct BlendWeights {
    EquirectMap weight;  // MapKind::Mask
};

inline constexpr int kDefaultFeather = 2;
inline constexpr double kDefaultClampThreshold = 0.25;

/// Mask eroded by `feather` pixels and ramped back linearly: a visible pixel
/// at chessboard distance d from the nearest invisible pixel gets
/// min(1, d / (feather + 1)). Columns wrap; rows stop at the poles.
BlendWeights compute_blend_weight(const PanoBundle& bundle, int feather = kDefaultFeather);

/// volume_map * (1 - w) + detail * w.
EquirectMap blend_single(const EquirectMap& volume_map, const PanoBundle& bundle, const BlendWeights& weights);

/// max(w - [prev_depth - new_depth < threshold], 0): detail only overwrites
/// history where the new surface is at least `threshold` closer.
BlendWeights conservative_clamp(const BlendWeights& weights, const EquirectMap& prev_depth,
                                const EquirectMap& new_depth, double threshold = kDefaultClampThreshold);

/// Accumulated history across video frames.
struct TemporalState {
    EquirectMap blended;      // previous output, HDR
    EquirectMap accum_depth;  // +inf where never seen
    EquirectMap accum_mask;   // in [0,1], nondecreasing
    int frame = 0;

    static TemporalState initial(int height);
};

struct TemporalStep {
    EquirectMap blended;
    TemporalState state;
};

/// One accumulation step; `weights` should already be conservative-clamped.
TemporalStep temporal_update(const TemporalState& state, const EquirectMap& volume_map, const PanoBundle& bundle,
                             const BlendWeights& weights);

/// Lossless (f64) binary snapshot of a temporal state.
void write_temporal_state(std::ostream& out, const TemporalState& state);
TemporalState read_temporal_state(std::istream& in);
void write_temporal_state(const std::filesystem::path& path, const TemporalState& state);
TemporalState read_temporal_state(const std::filesystem::path& path);

}  // namespace sglv
