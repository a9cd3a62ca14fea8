// Copyright 2026 The SGLV Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <limits>

#include "sglv/image.hpp"

namespace sglv {

// Equirectangular convention: row 0 touches the +y pole, theta = pi*(row+0.5)/H;
// phi = 2*pi*(col+0.5)/W runs from +x toward +z; W = 2H.
// direction = (sin(theta)cos(phi), cos(theta), sin(theta)sin(phi)).

enum class MapKind { Hdr, Ldr, Mask, Depth };

/// Panorama indexed by direction in the fixed volume frame.
class EquirectMap {
public:
    static constexpr double kNoDepth = std::numeric_limits<double>::infinity();

    EquirectMap() = default;
    EquirectMap(MapKind kind, int height, double fill = 0.0);

    static EquirectMap hdr(int height) { return {MapKind::Hdr, height}; }
    static EquirectMap mask(int height) { return {MapKind::Mask, height}; }
    static EquirectMap depth(int height) { return {MapKind::Depth, height, kNoDepth}; }

    MapKind kind() const { return kind_; }
    void set_kind(MapKind k) { kind_ = k; }
    int height() const { return image_.height(); }
    int width() const { return image_.width(); }
    int channels() const { return image_.channels(); }

    Image& image() { return image_; }
    const Image& image() const { return image_; }

    double& at(int row, int col, int ch = 0) { return image_.at(row, col, ch); }
    double at(int row, int col, int ch = 0) const { return image_.at(row, col, ch); }

    bool same_shape(const EquirectMap& o) const { return image_.same_shape(o.image_); }

    /// Wraps an existing image; throws unless width == 2*height and the channel
    /// count suits `kind`.
    static EquirectMap from_image(MapKind kind, Image img);

    friend bool operator==(const EquirectMap&, const EquirectMap&) = default;

private:
    MapKind kind_ = MapKind::Hdr;
    Image image_;
};

int channels_for(MapKind kind);

/// Unit direction through the center of pixel (row, col). Throws on out-of-range indices.
Vec3 pixel_to_direction(int row, int col, int height);

struct PixelCoord {
    double row = 0.0;
    double col = 0.0;
};

/// Continuous pixel coordinates of `dir`; col wraps into [0, 2H).
/// Throws for a zero vector; nonunit inputs are normalized.
PixelCoord direction_to_pixel(const Vec3& dir, int height);

/// Solid angle subtended by pixel row `row` (identical for every column).
double pixel_solid_angle(int row, int height);

/// Four bilinear taps of a direction lookup: columns wrap, rows clamp at the poles.
struct EnvTaps {
    std::array<std::size_t, 4> pixel{};  // row * width + col
    std::array<double, 4> weight{};
};
EnvTaps env_taps(const Vec3& dir, int height);

/// Bilinear radiance lookup by direction.
Vec3 sample_env(const EquirectMap& env, const Vec3& dir);

}  // namespace sglv
