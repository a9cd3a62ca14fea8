// Copyright 2026 The SGLV Authors
// SPDX-License-Identifier: Apache-2.0

#include "sglv/raytrace.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "sglv/loss.hpp"
#include "sglv/parallel.hpp"

namespace sglv {

namespace {

// Packed per-voxel layout: alpha, c[3], w[3], lambda, s[3].
constexpr int kStride = 11;
constexpr int kA = 0;
constexpr int kC = 1;
constexpr int kW = 4;
constexpr int kL = 7;
constexpr int kS = 8;

std::vector<double> pack(const SglvGrid& g) {
    const std::size_t n = g.config.voxel_count();
    std::vector<double> out(n * kStride);
    for (std::size_t v = 0; v < n; ++v) {
        double* p = &out[v * kStride];
        p[kA] = g.alpha.at(v);
        for (int ch = 0; ch < 3; ++ch) {
            p[kC + ch] = g.color.at(v, ch);
            p[kW + ch] = g.weight.at(v, ch);
            p[kS + ch] = g.axis.at(v, ch);
        }
        p[kL] = g.sharpness.at(v);
    }
    return out;
}

struct Sample {
    std::array<double, kStride> value{};
    TrilinearTaps taps;
};

inline void interpolate(const std::vector<double>& packed, const TrilinearTaps& t, std::array<double, kStride>& out) {
    out.fill(0.0);
    for (int k = 0; k < 8; ++k) {
        const double w = t.weight[k];
        if (w == 0.0) continue;
        const double* p = &packed[t.voxel[k] * kStride];
        for (int i = 0; i < kStride; ++i) out[i] += w * p[i];
    }
}

// Index range of samples whose positions may fall inside the volume box.
// Widened by one on each side; trilinear_taps makes the final containment call.
std::pair<int, int> candidate_range(const VolumeConfig& cfg, const Vec3& o, const Vec3& d, const RaySampling& s) {
    double t0 = 0.0;
    double t1 = s.step * s.count;
    for (int a = 0; a < 3; ++a) {
        if (d[a] == 0.0) {
            if (o[a] < cfg.lo[a] || o[a] > cfg.hi[a]) return {0, -1};
            continue;
        }
        double ta = (cfg.lo[a] - o[a]) / d[a];
        double tb = (cfg.hi[a] - o[a]) / d[a];
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
    }
    if (t0 > t1) return {0, -1};
    const int first = std::max(0, static_cast<int>(std::floor(t0 / s.step - 0.5)) - 1);
    const int last = std::min(s.count - 1, static_cast<int>(std::ceil(t1 / s.step - 0.5)) + 1);
    return {first, last};
}

RayAccum march(const VolumeConfig& cfg, const std::vector<double>& packed, const Vec3& o, const Vec3& d,
               const RaySampling& s, double early_out) {
    RayAccum acc;
    const auto [first, last] = candidate_range(cfg, o, d, s);
    double transmittance = 1.0;
    std::array<double, kStride> x{};
    for (int i = first; i <= last; ++i) {
        const double t = (i + 0.5) * s.step;
        const TrilinearTaps taps = trilinear_taps(cfg, o + t * d);
        if (!taps.inside) continue;
        interpolate(packed, taps, x);
        const double a = x[kA];
        const double wgt = transmittance * a;
        acc.color += wgt * Vec3{x[kC], x[kC + 1], x[kC + 2]};
        acc.weight += wgt * Vec3{x[kW], x[kW + 1], x[kW + 2]};
        acc.sharpness += wgt * x[kL];
        acc.axis += wgt * Vec3{x[kS], x[kS + 1], x[kS + 2]};
        transmittance *= 1.0 - a;
        if (transmittance < early_out) break;
    }
    return acc;
}

void check_unit(const Vec3& dir) {
    if (std::abs(length(dir) - 1.0) > 1e-6) throw Error("accumulate_ray: direction must be unit length");
}

// Gradient buffers are reduced in a fixed chunk order, so the chunk count depends only on problem size.
int gradient_chunks(std::size_t voxels, int rows) {
    const double bytes = static_cast<double>(voxels) * kStride * sizeof(double);
    const int by_memory = static_cast<int>(std::clamp((64.0 * 1024 * 1024) / bytes, 1.0, 16.0));
    return std::max(1, std::min(by_memory, rows));
}

}  // namespace

RaySampling resolve_sampling(const VolumeConfig& config, const RenderSettings& settings) {
    RaySampling s;
    s.step = settings.step > 0.0 ? settings.step : 0.5 * config.min_voxel_side();
    const double len = settings.max_length > 0.0 ? settings.max_length : config.diagonal();
    s.count = std::min(settings.max_samples, static_cast<int>(std::ceil(len / s.step)));
    if (s.count < 2) throw Error("RenderSettings: fewer than two samples per ray");
    return s;
}

RayAccum accumulate_ray(const SglvGrid& sglv, const Vec3& origin, const Vec3& dir, const RenderSettings& settings) {
    check_unit(dir);
    const VolumeConfig& cfg = sglv.config;
    const RaySampling s = resolve_sampling(cfg, settings);
    const Vec3 o = cfg.anchor.to_local_point(origin);
    const Vec3 d = cfg.anchor.to_local_dir(dir);
    return march(cfg, pack(sglv), o, d, s, settings.early_out_transmittance);
}

Vec3 eval_radiance(const RayAccum& a, const Vec3& dir) {
    const double lobe = std::exp(a.sharpness * (dot(dir, a.axis) - 1.0));
    return a.color + a.weight * lobe;
}

EquirectMap render_envmap(const SglvGrid& sglv, const Vec3& position, int height, const RenderSettings& settings) {
    const VolumeConfig& cfg = sglv.config;
    const RaySampling s = resolve_sampling(cfg, settings);
    const std::vector<double> packed = pack(sglv);
    const Vec3 o = cfg.anchor.to_local_point(position);
    EquirectMap out = EquirectMap::hdr(height);
    parallel_for(static_cast<std::size_t>(height), [&](std::size_t row) {
        const int r = static_cast<int>(row);
        for (int c = 0; c < out.width(); ++c) {
            const Vec3 d = pixel_to_direction(r, c, height);
            const RayAccum acc = march(cfg, packed, o, d, s, settings.early_out_transmittance);
            const Vec3 L = eval_radiance(acc, d);
            out.at(r, c, 0) = L.x;
            out.at(r, c, 1) = L.y;
            out.at(r, c, 2) = L.z;
        }
    });
    return out;
}

SglvGradient SglvGradient::zeros(const VolumeConfig& config) {
    SglvGradient g;
    g.color = Grid(config.counts, 3);
    g.alpha = Grid(config.counts, 1);
    g.weight = Grid(config.counts, 3);
    g.sharpness = Grid(config.counts, 1);
    g.axis = Grid(config.counts, 3);
    return g;
}

SglvGradient& SglvGradient::operator+=(const SglvGradient& o) {
    auto mine = fields();
    auto theirs = o.fields();
    for (std::size_t f = 0; f < mine.size(); ++f) {
        if (!mine[f]->same_shape(*theirs[f])) throw Error("SglvGradient: shape mismatch");
        for (std::size_t i = 0; i < mine[f]->data.size(); ++i) mine[f]->data[i] += theirs[f]->data[i];
    }
    return *this;
}

SglvGradient& SglvGradient::operator*=(double s) {
    for (Grid* g : fields())
        for (double& v : g->data) v *= s;
    return *this;
}

void backprop_envmap(const SglvGrid& sglv, const Vec3& position, const Image& radiance_grad,
                     const RenderSettings& settings, SglvGradient& grad) {
    const VolumeConfig& cfg = sglv.config;
    const int height = radiance_grad.height();
    const int width = radiance_grad.width();
    if (width != 2 * height || radiance_grad.channels() != 3) throw Error("backprop_envmap: gradient image must be an HDR panorama");
    const RaySampling s = resolve_sampling(cfg, settings);
    const std::vector<double> packed = pack(sglv);
    const Vec3 o = cfg.anchor.to_local_point(position);
    const std::size_t voxels = cfg.voxel_count();
    const int chunks = gradient_chunks(voxels, height);
    std::vector<std::vector<double>> partial(static_cast<std::size_t>(chunks));

    parallel_for(static_cast<std::size_t>(chunks), [&](std::size_t chunk) {
        std::vector<double>& g = partial[chunk];
        g.assign(voxels * kStride, 0.0);
        std::vector<Sample> samples;
        std::vector<double> trans;
        samples.reserve(static_cast<std::size_t>(s.count));
        const int row_begin = static_cast<int>(chunk * height / chunks);
        const int row_end = static_cast<int>((chunk + 1) * height / chunks);
        for (int r = row_begin; r < row_end; ++r) {
            for (int c = 0; c < width; ++c) {
                const Vec3 gL{radiance_grad.at(r, c, 0), radiance_grad.at(r, c, 1), radiance_grad.at(r, c, 2)};
                if (gL.x == 0.0 && gL.y == 0.0 && gL.z == 0.0) continue;
                const Vec3 d = pixel_to_direction(r, c, height);

                // forward, keeping every in-volume sample
                samples.clear();
                trans.clear();
                RayAccum acc;
                double T = 1.0;
                const auto [first, last] = candidate_range(cfg, o, d, s);
                for (int i = first; i <= last; ++i) {
                    Sample smp;
                    smp.taps = trilinear_taps(cfg, o + ((i + 0.5) * s.step) * d);
                    if (!smp.taps.inside) continue;
                    interpolate(packed, smp.taps, smp.value);
                    const auto& x = smp.value;
                    const double wgt = T * x[kA];
                    acc.color += wgt * Vec3{x[kC], x[kC + 1], x[kC + 2]};
                    acc.weight += wgt * Vec3{x[kW], x[kW + 1], x[kW + 2]};
                    acc.sharpness += wgt * x[kL];
                    acc.axis += wgt * Vec3{x[kS], x[kS + 1], x[kS + 2]};
                    trans.push_back(T);
                    samples.push_back(smp);
                    T *= 1.0 - x[kA];
                }
                if (samples.empty()) continue;

                // radiance -> accumulated parameters
                const double cosine = dot(d, acc.axis) - 1.0;
                const double lobe = std::exp(acc.sharpness * cosine);
                std::array<double, kStride> gx{};
                gx[kC] = gL.x;
                gx[kC + 1] = gL.y;
                gx[kC + 2] = gL.z;
                gx[kW] = gL.x * lobe;
                gx[kW + 1] = gL.y * lobe;
                gx[kW + 2] = gL.z * lobe;
                const double G = dot(gL, acc.weight) * lobe;
                gx[kL] = G * cosine;
                gx[kS] = G * acc.sharpness * d.x;
                gx[kS + 1] = G * acc.sharpness * d.y;
                gx[kS + 2] = G * acc.sharpness * d.z;

                // accumulated parameters -> samples -> voxels, back to front
                double suffix = 0.0;
                for (std::size_t k = samples.size(); k-- > 0;) {
                    const Sample& smp = samples[k];
                    const auto& x = smp.value;
                    double gdotx = 0.0;
                    for (int i = 1; i < kStride; ++i) gdotx += gx[i] * x[i];
                    const double a = x[kA];
                    const double wgt = trans[k] * a;
                    const double galpha = trans[k] * (gdotx - suffix);
                    suffix = a * gdotx + (1.0 - a) * suffix;
                    for (int t = 0; t < 8; ++t) {
                        const double tw = smp.taps.weight[t];
                        if (tw == 0.0) continue;
                        double* dst = &g[smp.taps.voxel[t] * kStride];
                        dst[kA] += tw * galpha;
                        const double sw = tw * wgt;
                        for (int i = 1; i < kStride; ++i) dst[i] += sw * gx[i];
                    }
                }
            }
        }
    });

    for (const std::vector<double>& g : partial) {
        for (std::size_t v = 0; v < voxels; ++v) {
            const double* p = &g[v * kStride];
            grad.alpha.at(v) += p[kA];
            for (int ch = 0; ch < 3; ++ch) {
                grad.color.at(v, ch) += p[kC + ch];
                grad.weight.at(v, ch) += p[kW + ch];
                grad.axis.at(v, ch) += p[kS + ch];
            }
            grad.sharpness.at(v) += p[kL];
        }
    }
}

LossAndGradient envmap_loss_gradients(const SglvGrid& sglv, const Vec3& position, const EquirectMap& target,
                                      const RenderSettings& settings, EnvLoss loss) {
    if (target.kind() != MapKind::Hdr || target.channels() != 3) throw Error("envmap_loss_gradients: target must be HDR");
    RenderSettings exact = settings;
    exact.early_out_transmittance = 0.0;
    const EquirectMap pred = render_envmap(sglv, position, target.height(), exact);
    if (!pred.same_shape(target)) throw Error("envmap_loss_gradients: target shape mismatch");
    LossAndGradient out;
    out.grad = SglvGradient::zeros(sglv.config);
    Image upstream;
    if (loss == EnvLoss::LogL2) {
        out.loss = loss_log_l2(pred, target);
        upstream = loss_log_l2_grad(pred, target);
    } else {
        out.loss = loss_l2(pred, target);
        upstream = loss_l2_grad(pred, target);
    }
    backprop_envmap(sglv, position, upstream, exact, out.grad);
    return out;
}

}  // namespace sglv
