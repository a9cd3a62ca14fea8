// Copyright 2026 The SGLV Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sglv/math.hpp"

namespace sglv {

/// Dense row-major multi-channel float image (double storage).
class Image {
public:
    Image() = default;
    Image(int width, int height, int channels, double fill = 0.0);

    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * height_; }
    bool empty() const { return data_.empty(); }

    double& at(int row, int col, int ch = 0) { return data_[index(row, col, ch)]; }
    double at(int row, int col, int ch = 0) const { return data_[index(row, col, ch)]; }

    Vec3 rgb(int row, int col) const;
    void set_rgb(int row, int col, const Vec3& v);

    std::span<double> data() { return data_; }
    std::span<const double> data() const { return data_; }

    bool same_shape(const Image& o) const {
        return width_ == o.width_ && height_ == o.height_ && channels_ == o.channels_;
    }

    friend bool operator==(const Image&, const Image&) = default;

private:
    std::size_t index(int row, int col, int ch) const {
        return (static_cast<std::size_t>(row) * width_ + col) * channels_ + ch;
    }

    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<double> data_;
};

/// Three-channel linear radiance, nonnegative and unbounded.
using HdrImage = Image;

/// Metric depth along the view direction with a validity flag per pixel.
struct DepthMap {
    Image depth;             // 1 channel
    std::vector<char> valid; // one entry per pixel

    DepthMap() = default;
    DepthMap(int width, int height);

    int width() const { return depth.width(); }
    int height() const { return depth.height(); }
    bool is_valid(int row, int col) const {
        return valid[static_cast<std::size_t>(row) * depth.width() + col] != 0;
    }
    void set(int row, int col, double d);
    void invalidate(int row, int col);
    double max_valid_depth() const;
};

/// Bilinear lookup with pixel centers at integer coordinates (x = col, y = row).
/// Coordinates outside the image clamp to the border.
double bilinear_sample(const Image& img, double x, double y, int ch = 0);
Vec3 bilinear_sample_rgb(const Image& img, double x, double y);

}  // namespace sglv
