// Copyright 2026 The SGLV Authors
// SPDX-License-Identifier: Apache-2.0

// Independent reference implementations used as test oracles. They share no
// code with the library beyond plain data types.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "sglv/equirect.hpp"
#include "sglv/volume.hpp"

namespace sglv::testing {

inline Vec3 equirect_dir(int row, int col, int height) {
    const double theta = kPi * (row + 0.5) / height;
    const double phi = 2.0 * kPi * (col + 0.5) / (2.0 * height);
    return {std::sin(theta) * std::cos(phi), std::cos(theta), std::sin(theta) * std::sin(phi)};
}

/// Trilinear lookup over voxel centers written from scratch.
inline double naive_trilinear(const VolumeConfig& cfg, const Grid& g, const Vec3& p, int ch) {
    for (int a = 0; a < 3; ++a)
        if (p[a] < cfg.lo[a] || p[a] > cfg.hi[a]) return 0.0;
    int lo[3];
    int hi[3];
    double f[3];
    for (int a = 0; a < 3; ++a) {
        const double side = (cfg.hi[a] - cfg.lo[a]) / cfg.counts[a];
        double u = (p[a] - cfg.lo[a]) / side - 0.5;
        u = std::max(0.0, std::min(u, cfg.counts[a] - 1.0));
        lo[a] = static_cast<int>(std::floor(u));
        hi[a] = std::min(lo[a] + 1, cfg.counts[a] - 1);
        f[a] = u - lo[a];
    }
    double sum = 0.0;
    for (int dz = 0; dz < 2; ++dz)
        for (int dy = 0; dy < 2; ++dy)
            for (int dx = 0; dx < 2; ++dx) {
                const int ix = dx ? hi[0] : lo[0];
                const int iy = dy ? hi[1] : lo[1];
                const int iz = dz ? hi[2] : lo[2];
                const double w = (dx ? f[0] : 1 - f[0]) * (dy ? f[1] : 1 - f[1]) * (dz ? f[2] : 1 - f[2]);
                const std::size_t v = (static_cast<std::size_t>(iz) * cfg.counts[1] + iy) * cfg.counts[0] + ix;
                sum += w * g.data[v * g.channels + ch];
            }
    return sum;
}

struct NaiveAccum {
    double c[3] = {0, 0, 0};
    double w[3] = {0, 0, 0};
    double lambda = 0.0;
    double s[3] = {0, 0, 0};
};

/// Straight loop over every sample: x = sum_i a_i x_i prod_{j<i} (1 - a_j),
/// stopping once transmittance drops below `early_out`.
inline NaiveAccum naive_accumulate(const SglvGrid& g, const Vec3& local_origin, const Vec3& local_dir, double step,
                                   int count, double early_out) {
    NaiveAccum acc;
    double trans = 1.0;
    for (int i = 0; i < count; ++i) {
        const double t = (i + 0.5) * step;
        const Vec3 p{local_origin.x + t * local_dir.x, local_origin.y + t * local_dir.y,
                     local_origin.z + t * local_dir.z};
        bool inside = true;
        for (int a = 0; a < 3; ++a) inside = inside && p[a] >= g.config.lo[a] && p[a] <= g.config.hi[a];
        if (!inside) continue;
        const double a = naive_trilinear(g.config, g.alpha, p, 0);
        const double wt = trans * a;
        for (int ch = 0; ch < 3; ++ch) {
            acc.c[ch] += wt * naive_trilinear(g.config, g.color, p, ch);
            acc.w[ch] += wt * naive_trilinear(g.config, g.weight, p, ch);
            acc.s[ch] += wt * naive_trilinear(g.config, g.axis, p, ch);
        }
        acc.lambda += wt * naive_trilinear(g.config, g.sharpness, p, 0);
        trans *= 1.0 - a;
        if (trans < early_out) break;
    }
    return acc;
}

/// Reference environment map: default sampling (half the smallest voxel side,
/// at most 256 samples over the box diagonal) and the 1e-4 early-out.
inline EquirectMap naive_render(const SglvGrid& g, const Vec3& world_pos, int height) {
    const VolumeConfig& cfg = g.config;
    double min_side = 1e300;
    double diag2 = 0.0;
    for (int a = 0; a < 3; ++a) {
        min_side = std::min(min_side, (cfg.hi[a] - cfg.lo[a]) / cfg.counts[a]);
        diag2 += (cfg.hi[a] - cfg.lo[a]) * (cfg.hi[a] - cfg.lo[a]);
    }
    const double step = 0.5 * min_side;
    const int count = std::min(256, static_cast<int>(std::ceil(std::sqrt(diag2) / step)));
    const Vec3 rel = world_pos - cfg.anchor.origin;
    const Vec3 o{dot(rel, cfg.anchor.right), dot(rel, cfg.anchor.up), dot(rel, cfg.anchor.backward)};
    EquirectMap out = EquirectMap::hdr(height);
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < 2 * height; ++c) {
            const Vec3 d = equirect_dir(r, c, height);
            const NaiveAccum a = naive_accumulate(g, o, d, step, count, 1e-4);
            const double ds = d.x * a.s[0] + d.y * a.s[1] + d.z * a.s[2];
            const double lobe = std::exp(a.lambda * (ds - 1.0));
            for (int ch = 0; ch < 3; ++ch) out.at(r, c, ch) = a.c[ch] + a.w[ch] * lobe;
        }
    return out;
}

/// Random volume in an axis-aligned box at the world origin.
inline SglvGrid random_volume(int n, std::uint64_t seed, double half = 1.0) {
    VolumeConfig cfg;
    cfg.lo = {-half, -half, -half};
    cfg.hi = {half, half, half};
    cfg.counts = {n, n, n};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> nd(0.0, 1.0);
    SglvGrid g = SglvGrid::zeros(cfg);
    for (double& v : g.color.data) v = u(rng);
    for (double& v : g.alpha.data) v = 0.6 * u(rng);
    for (double& v : g.weight.data) v = 2.0 * u(rng);
    for (double& v : g.sharpness.data) v = 10.0 * u(rng);
    for (std::size_t v = 0; v < cfg.voxel_count(); ++v) {
        Vec3 a{nd(rng), nd(rng), nd(rng)};
        a = a / std::sqrt(dot(a, a));
        g.axis.set_vec3(v, a);
    }
    return g;
}

inline double max_abs_diff(const Image& a, const Image& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

/// Solid angle of a planar rectangle seen from `p` (two-triangle Van Oosterom-Strackee sum).
inline double rect_solid_angle(const Vec3& p, const Vec3& center, const Vec3& hu, const Vec3& hv) {
    auto tri = [&](const Vec3& a, const Vec3& b, const Vec3& c) {
        const Vec3 ra = a - p, rb = b - p, rc = c - p;
        const double la = length(ra), lb = length(rb), lc = length(rc);
        const double num = dot(ra, cross(rb, rc));
        const double den = la * lb * lc + dot(ra, rb) * lc + dot(ra, rc) * lb + dot(rb, rc) * la;
        return std::abs(2.0 * std::atan2(num, den));
    };
    const Vec3 v0 = center - hu - hv, v1 = center + hu - hv, v2 = center + hu + hv, v3 = center - hu + hv;
    return tri(v0, v1, v2) + tri(v0, v2, v3);
}

}  // namespace sglv::testing
