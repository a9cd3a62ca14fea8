// Copyright 2026 The SGLV Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>

#include "sglv/equirect.hpp"
#include "sglv/image.hpp"

namespace sglv::io {

/// Portable float map: little-endian, scale -1.0, rows stored bottom-to-top.
/// 3-channel images write "PF", 1-channel write "Pf". Values are narrowed to f32.
void write_pfm(const std::filesystem::path& path, const Image& img);
Image read_pfm(const std::filesystem::path& path);

/// PNG with values clamped to [0,1] and quantized; 1 or 3 channels.
void write_png(const std::filesystem::path& path, const Image& img, int bit_depth = 8);
/// Reads an 8/16-bit gray or RGB PNG, normalized to [0,1].
Image read_png(const std::filesystem::path& path);

/// Depth maps serialize as single-channel PFM with 0 for invalid pixels.
void write_depth_pfm(const std::filesystem::path& path, const DepthMap& depth);
DepthMap read_depth_pfm(const std::filesystem::path& path);

/// Depth panoramas store the no-hit sentinel as +inf.
void write_map(const std::filesystem::path& path, const EquirectMap& map);
/// Loads a map by extension: .pfm gives Hdr (3 ch) or Mask (1 ch), .png gives Ldr or Mask.
EquirectMap read_map(const std::filesystem::path& path);

}  // namespace sglv::io
