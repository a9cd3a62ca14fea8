// Copyright 2026 The SGLV Authors
// SPDX-License-Identifier: Apache-2.0

#include "sglv/image.hpp"

#include <algorithm>
#include <cmath>

namespace sglv {

Image::Image(int width, int height, int channels, double fill)
    : width_(width), height_(height), channels_(channels) {
    if (width < 0 || height < 0 || channels <= 0) throw Error("Image: invalid dimensions");
    data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

Vec3 Image::rgb(int row, int col) const {
    const std::size_t i = index(row, col, 0);
    if (channels_ == 1) return {data_[i], data_[i], data_[i]};
    return {data_[i], data_[i + 1], data_[i + 2]};
}

void Image::set_rgb(int row, int col, const Vec3& v) {
    const std::size_t i = index(row, col, 0);
    data_[i] = v.x;
    data_[i + 1] = v.y;
    data_[i + 2] = v.z;
}

DepthMap::DepthMap(int width, int height)
    : depth(width, height, 1), valid(static_cast<std::size_t>(width) * height, 0) {}

void DepthMap::set(int row, int col, double d) {
    if (!(d > 0.0) || !std::isfinite(d)) {
        invalidate(row, col);
        return;
    }
    depth.at(row, col) = d;
    valid[static_cast<std::size_t>(row) * depth.width() + col] = 1;
}

void DepthMap::invalidate(int row, int col) {
    depth.at(row, col) = 0.0;
    valid[static_cast<std::size_t>(row) * depth.width() + col] = 0;
}

double DepthMap::max_valid_depth() const {
    double m = 0.0;
    for (int r = 0; r < height(); ++r)
        for (int c = 0; c < width(); ++c)
            if (is_valid(r, c)) m = std::max(m, depth.at(r, c));
    return m;
}

namespace {

struct BilinearTaps {
    int x0, x1, y0, y1;
    double fx, fy;
};

BilinearTaps taps(const Image& img, double x, double y) {
    const double cx = std::clamp(x, 0.0, static_cast<double>(img.width() - 1));
    const double cy = std::clamp(y, 0.0, static_cast<double>(img.height() - 1));
    BilinearTaps t{};
    t.x0 = static_cast<int>(std::floor(cx));
    t.y0 = static_cast<int>(std::floor(cy));
    t.x1 = std::min(t.x0 + 1, img.width() - 1);
    t.y1 = std::min(t.y0 + 1, img.height() - 1);
    t.fx = cx - t.x0;
    t.fy = cy - t.y0;
    return t;
}

}  // namespace

double bilinear_sample(const Image& img, double x, double y, int ch) {
    const BilinearTaps t = taps(img, x, y);
    const double top = (1 - t.fx) * img.at(t.y0, t.x0, ch) + t.fx * img.at(t.y0, t.x1, ch);
    const double bottom = (1 - t.fx) * img.at(t.y1, t.x0, ch) + t.fx * img.at(t.y1, t.x1, ch);
    return (1 - t.fy) * top + t.fy * bottom;
}

Vec3 bilinear_sample_rgb(const Image& img, double x, double y) {
    return {bilinear_sample(img, x, y, 0), bilinear_sample(img, x, y, 1), bilinear_sample(img, x, y, 2)};
}

}  // namespace sglv
