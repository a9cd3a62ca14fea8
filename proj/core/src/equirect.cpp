// Copyright 2026 The SGLV Authors
// SPDX-License-Identifier: Apache-2.0

#include "sglv/equirect.hpp"

#include <cmath>

namespace sglv {

int channels_for(MapKind kind) {
    switch (kind) {
        case MapKind::Hdr:
        case MapKind::Ldr:
            return 3;
        case MapKind::Mask:
        case MapKind::Depth:
            return 1;
    }
    return 3;
}

EquirectMap::EquirectMap(MapKind kind, int height, double fill)
    : kind_(kind), image_(2 * height, height, channels_for(kind), fill) {
    if (height < 1) throw Error("EquirectMap: height must be positive");
}

EquirectMap EquirectMap::from_image(MapKind kind, Image img) {
    if (img.width() != 2 * img.height()) throw Error("EquirectMap: width must equal 2 x height");
    if (img.channels() != channels_for(kind)) throw Error("EquirectMap: channel count does not match map kind");
    EquirectMap m;
    m.kind_ = kind;
    m.image_ = std::move(img);
    return m;
}

Vec3 pixel_to_direction(int row, int col, int height) {
    if (height < 1 || row < 0 || row >= height || col < 0 || col >= 2 * height)
        throw Error("pixel_to_direction: pixel index out of range");
    const double theta = kPi * (row + 0.5) / height;
    const double phi = 2.0 * kPi * (col + 0.5) / (2.0 * height);
    const double st = std::sin(theta);
    return {st * std::cos(phi), std::cos(theta), st * std::sin(phi)};
}

PixelCoord direction_to_pixel(const Vec3& dir, int height) {
    const double n = length(dir);
    if (n == 0.0 || !std::isfinite(n)) throw Error("direction_to_pixel: zero or non-finite direction");
    const Vec3 d = dir / n;
    const double theta = std::acos(std::clamp(d.y, -1.0, 1.0));
    double phi = std::atan2(d.z, d.x);
    if (phi < 0) phi += 2.0 * kPi;
    const int width = 2 * height;
    PixelCoord p;
    p.row = theta / kPi * height - 0.5;
    p.col = phi / (2.0 * kPi) * width - 0.5;
    if (p.col < 0.0) p.col += width;
    return p;
}

double pixel_solid_angle(int row, int height) {
    const double t0 = kPi * row / height;
    const double t1 = kPi * (row + 1) / height;
    return (2.0 * kPi / (2.0 * height)) * (std::cos(t0) - std::cos(t1));
}

EnvTaps env_taps(const Vec3& dir, int height) {
    const int width = 2 * height;
    const PixelCoord p = direction_to_pixel(dir, height);
    const double row = std::clamp(p.row, 0.0, static_cast<double>(height - 1));
    const int r0 = static_cast<int>(std::floor(row));
    const int r1 = std::min(r0 + 1, height - 1);
    const double fr = row - r0;
    const double cf = std::floor(p.col);
    const double fc = p.col - cf;
    int c0 = static_cast<int>(cf) % width;
    if (c0 < 0) c0 += width;
    const int c1 = (c0 + 1) % width;
    EnvTaps t;
    auto idx = [width](int r, int c) { return static_cast<std::size_t>(r) * width + c; };
    t.pixel = {idx(r0, c0), idx(r0, c1), idx(r1, c0), idx(r1, c1)};
    t.weight = {(1 - fr) * (1 - fc), (1 - fr) * fc, fr * (1 - fc), fr * fc};
    return t;
}

Vec3 sample_env(const EquirectMap& env, const Vec3& dir) {
    const EnvTaps t = env_taps(dir, env.height());
    const auto data = env.image().data();
    const int ch = env.channels();
    Vec3 out;
    for (int k = 0; k < 4; ++k) {
        const std::size_t base = t.pixel[k] * ch;
        const double w = t.weight[k];
        if (ch == 1) {
            out += Vec3{data[base], data[base], data[base]} * w;
        } else {
            out += Vec3{data[base], data[base + 1], data[base + 2]} * w;
        }
    }
    return out;
}

}  // namespace sglv
