// Copyright 2026 The SGLV Authors
// SPDX-License-Identifier: Apache-2.0

#include "sglv/shading.hpp"

#include <cmath>

#include "sglv/parallel.hpp"

namespace sglv {

namespace {

double ggx_d(double alpha2, double noh) {
    const double t = noh * noh * (alpha2 - 1.0) + 1.0;
    return alpha2 / (kPi * t * t);
}

double smith_lambda(double alpha2, double cos_theta) {
    const double c2 = cos_theta * cos_theta;
    const double tan2 = std::max(0.0, 1.0 - c2) / c2;
    return 0.5 * (-1.0 + std::sqrt(1.0 + alpha2 * tan2));
}

double uniform01(std::mt19937_64& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

Vec3 to_world(const Vec3& n, double x, double y, double z) {
    Vec3 t, b;
    orthonormal_basis(n, t, b);
    return x * t + y * b + z * n;
}

Vec3 reflect(const Vec3& v, const Vec3& h) { return 2.0 * dot(v, h) * h - v; }

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Calls fn(direction, weight) for each sample of a sphere pixel; the pixel
// estimate is sum(weight * L(direction)).
template <typename Fn>
void for_each_sample(const MicrofacetBrdf& brdf, const SphereRenderSpec& spec, int row, int col, Fn&& fn) {
    Vec3 n;
    if (!sphere_normal(row, col, spec.resolution, n)) return;
    const Vec3 v{0, 0, 1};
    std::mt19937_64 rng = pixel_rng(spec.seed, static_cast<std::uint64_t>(row) * spec.resolution + col);
    const double inv_n = 1.0 / spec.spp;
    const double spec_prob = spec.specular_probability.value_or(specular_sampling_weight(brdf));
    for (int s = 0; s < spec.spp; ++s) {
        Vec3 l;
        double pdf = 0.0;
        if (spec.mode == SamplingMode::Importance) {
            const BrdfSample bs = sample_brdf(brdf, n, v, rng, spec_prob);
            l = bs.l;
            pdf = bs.pdf;
        } else {
            const double theta = 0.5 * kPi * uniform01(rng);
            const double phi = 2.0 * kPi * uniform01(rng);
            const double st = std::sin(theta);
            l = to_world(n, st * std::cos(phi), st * std::sin(phi), std::cos(theta));
            pdf = st > 0.0 ? 1.0 / (kPi * kPi * st) : 0.0;
        }
        const double nol = dot(n, l);
        if (!(pdf > 0.0) || nol <= 0.0) continue;
        const Vec3 f = eval_brdf(brdf, n, v, l);
        fn(l, f * (nol / pdf * inv_n));
    }
}

}  // namespace

std::mt19937_64 pixel_rng(std::uint64_t seed, std::uint64_t pixel) {
    return std::mt19937_64(splitmix64(splitmix64(seed) ^ (pixel + 0x632be59bd9b4e019ull)));
}

Vec3 eval_brdf(const MicrofacetBrdf& brdf, const Vec3& n, const Vec3& v, const Vec3& l) {
    const double nol = dot(n, l);
    const double nov = dot(n, v);
    if (nol <= 0.0 || nov <= 0.0) return {};
    Vec3 f = brdf.albedo / kPi;
    if (brdf.diffuse_only) return f;
    const Vec3 hsum = v + l;
    const double hlen = length(hsum);
    if (hlen == 0.0) return f;
    const Vec3 h = hsum / hlen;
    const double alpha2 = std::pow(brdf.roughness, 4);
    const double D = ggx_d(alpha2, dot(n, h));
    const double G = 1.0 / (1.0 + smith_lambda(alpha2, nov) + smith_lambda(alpha2, nol));
    const double F = brdf.f0 + (1.0 - brdf.f0) * std::pow(1.0 - std::clamp(dot(v, h), 0.0, 1.0), 5);
    const double spec = D * G * F / (4.0 * nol * nov);
    return f + Vec3{spec, spec, spec};
}

double specular_sampling_weight(const MicrofacetBrdf& brdf) {
    if (brdf.diffuse_only) return 0.0;
    const double diffuse = (1.0 - brdf.f0) * (brdf.albedo.x + brdf.albedo.y + brdf.albedo.z) / 3.0;
    const double total = brdf.f0 + diffuse;
    return total > 0.0 ? brdf.f0 / total : 0.5;
}

double pdf_brdf(const MicrofacetBrdf& brdf, const Vec3& n, const Vec3& v, const Vec3& l, double specular_probability) {
    const double nol = dot(n, l);
    const double diffuse = nol > 0.0 ? nol / kPi : 0.0;
    if (brdf.diffuse_only || specular_probability <= 0.0) return diffuse;
    double specular = 0.0;
    const Vec3 hsum = v + l;
    const double hlen = length(hsum);
    if (hlen > 0.0) {
        const Vec3 h = hsum / hlen;
        const double voh = dot(v, h);
        const double noh = dot(n, h);
        if (voh > 0.0 && noh > 0.0) {
            const double alpha2 = std::pow(brdf.roughness, 4);
            specular = ggx_d(alpha2, noh) * noh / (4.0 * voh);
        }
    }
    return specular_probability * specular + (1.0 - specular_probability) * diffuse;
}

BrdfSample sample_brdf(const MicrofacetBrdf& brdf, const Vec3& n, const Vec3& v, std::mt19937_64& rng,
                       double specular_probability) {
    const double p = brdf.diffuse_only ? 0.0 : specular_probability;
    const double choice = uniform01(rng);
    const double u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    BrdfSample s;
    if (choice < p) {
        const double alpha2 = std::pow(brdf.roughness, 4);
        const double cos2 = (1.0 - u1) / (1.0 + (alpha2 - 1.0) * u1);
        const double ct = std::sqrt(cos2);
        const double st = std::sqrt(std::max(0.0, 1.0 - cos2));
        const double phi = 2.0 * kPi * u2;
        const Vec3 h = to_world(n, st * std::cos(phi), st * std::sin(phi), ct);
        s.l = reflect(v, h);
    } else {
        const double r = std::sqrt(u1);
        const double phi = 2.0 * kPi * u2;
        s.l = to_world(n, r * std::cos(phi), r * std::sin(phi), std::sqrt(std::max(0.0, 1.0 - u1)));
    }
    s.l = normalize(s.l);
    s.pdf = pdf_brdf(brdf, n, v, s.l, p);
    return s;
}

bool sphere_normal(int row, int col, int resolution, Vec3& n) {
    const double x = 2.0 * (col + 0.5) / resolution - 1.0;
    const double y = 1.0 - 2.0 * (row + 0.5) / resolution;
    const double r2 = x * x + y * y;
    if (r2 >= 1.0) return false;
    n = {x, y, std::sqrt(1.0 - r2)};
    return true;
}

HdrImage render_sphere(const EquirectMap& env, const MicrofacetBrdf& brdf, const SphereRenderSpec& spec) {
    if (env.kind() != MapKind::Hdr || env.channels() != 3) throw Error("render_sphere: environment map must be HDR");
    if (spec.spp < 1 || spec.resolution < 1) throw Error("render_sphere: spp and resolution must be positive");
    HdrImage out(spec.resolution, spec.resolution, 3);
    parallel_for(static_cast<std::size_t>(spec.resolution), [&](std::size_t row) {
        const int r = static_cast<int>(row);
        for (int c = 0; c < spec.resolution; ++c) {
            Vec3 sum;
            for_each_sample(brdf, spec, r, c, [&](const Vec3& l, const Vec3& w) { sum += mul(w, sample_env(env, l)); });
            out.set_rgb(r, c, sum);
        }
    });
    return out;
}

SpherePlan::SpherePlan(int env_height, const MicrofacetBrdf& brdf, const SphereRenderSpec& spec)
    : resolution_(spec.resolution), env_height_(env_height) {
    if (spec.spp < 1 || spec.resolution < 1) throw Error("SpherePlan: spp and resolution must be positive");
    const std::size_t pixels = static_cast<std::size_t>(resolution_) * resolution_;
    offsets_.assign(pixels + 1, 0);
    for (int r = 0; r < resolution_; ++r) {
        for (int c = 0; c < resolution_; ++c) {
            for_each_sample(brdf, spec, r, c, [&](const Vec3& l, const Vec3& w) {
                const EnvTaps taps = env_taps(l, env_height_);
                for (int k = 0; k < 4; ++k) {
                    if (taps.weight[k] == 0.0) continue;
                    entries_.push_back({static_cast<std::uint32_t>(taps.pixel[k]), w * taps.weight[k]});
                }
            });
            offsets_[static_cast<std::size_t>(r) * resolution_ + c + 1] = entries_.size();
        }
    }
}

HdrImage SpherePlan::apply(const EquirectMap& env) const {
    if (env.kind() != MapKind::Hdr || env.height() != env_height_) throw Error("SpherePlan: environment map mismatch");
    HdrImage out(resolution_, resolution_, 3);
    const auto data = env.image().data();
    for (int r = 0; r < resolution_; ++r) {
        for (int c = 0; c < resolution_; ++c) {
            const std::size_t p = static_cast<std::size_t>(r) * resolution_ + c;
            Vec3 sum;
            for (std::size_t e = offsets_[p]; e < offsets_[p + 1]; ++e) {
                const Entry& en = entries_[e];
                const std::size_t b = static_cast<std::size_t>(en.env_pixel) * 3;
                sum += mul(en.weight, Vec3{data[b], data[b + 1], data[b + 2]});
            }
            out.set_rgb(r, c, sum);
        }
    }
    return out;
}

Image SpherePlan::apply_transpose(const Image& sphere_grad) const {
    if (sphere_grad.width() != resolution_ || sphere_grad.height() != resolution_ || sphere_grad.channels() != 3)
        throw Error("SpherePlan: gradient image mismatch");
    Image out(2 * env_height_, env_height_, 3);
    const auto o = out.data();
    for (int r = 0; r < resolution_; ++r) {
        for (int c = 0; c < resolution_; ++c) {
            const std::size_t p = static_cast<std::size_t>(r) * resolution_ + c;
            const Vec3 g = sphere_grad.rgb(r, c);
            if (g.x == 0.0 && g.y == 0.0 && g.z == 0.0) continue;
            for (std::size_t e = offsets_[p]; e < offsets_[p + 1]; ++e) {
                const Entry& en = entries_[e];
                const std::size_t b = static_cast<std::size_t>(en.env_pixel) * 3;
                o[b] += en.weight.x * g.x;
                o[b + 1] += en.weight.y * g.y;
                o[b + 2] += en.weight.z * g.z;
            }
        }
    }
    return out;
}

}  // namespace sglv
