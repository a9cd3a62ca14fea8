// Copyright 2026 The SGLV Authors
// SPDX-License-Identifier: Apache-2.0

#include "sglv/volume.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace sglv {

double VolumeConfig::min_voxel_side() const {
    return std::min({voxel_side(0), voxel_side(1), voxel_side(2)});
}

double VolumeConfig::diagonal() const {
    const Vec3 d{hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]};
    return length(d);
}

Vec3 VolumeConfig::voxel_center_local(int ix, int iy, int iz) const {
    return {lo[0] + (ix + 0.5) * voxel_side(0), lo[1] + (iy + 0.5) * voxel_side(1),
            lo[2] + (iz + 0.5) * voxel_side(2)};
}

bool VolumeConfig::contains_local(const Vec3& p) const {
    for (int a = 0; a < 3; ++a)
        if (!(p[a] >= lo[a] && p[a] <= hi[a])) return false;
    return true;
}

void VolumeConfig::validate() const {
    for (int a = 0; a < 3; ++a) {
        if (!(hi[a] > lo[a])) throw Error("VolumeConfig: empty range on an axis");
        if (counts[a] < 1) throw Error("VolumeConfig: voxel counts must be positive");
    }
    if (!anchor.is_orthonormal(1e-6)) throw Error("VolumeConfig: anchor axes are not orthonormal");
}

VolumeConfig make_volume_config(double depth_max, const Camera& anchor, std::array<int, 3> counts) {
    if (!(depth_max > 0.0) || !std::isfinite(depth_max)) throw Error("make_volume_config: depth_max must be positive");
    VolumeConfig cfg;
    cfg.lo = {-1.1 * depth_max, -0.8 * depth_max, -1.2 * depth_max};
    cfg.hi = {1.1 * depth_max, 0.8 * depth_max, 0.5 * depth_max};
    cfg.counts = counts;
    cfg.anchor = anchor.pose;
    cfg.validate();
    return cfg;
}

Grid::Grid(std::array<int, 3> counts_, int channels_, double fill) : counts(counts_), channels(channels_) {
    data.assign(voxel_count() * channels, fill);
}

SglvGrid SglvGrid::zeros(const VolumeConfig& config) {
    SglvGrid g;
    g.config = config;
    g.color = Grid(config.counts, 3);
    g.alpha = Grid(config.counts, 1);
    g.weight = Grid(config.counts, 3);
    g.sharpness = Grid(config.counts, 1, 1.0);
    g.axis = Grid(config.counts, 3);
    for (std::size_t v = 0; v < g.axis.voxel_count(); ++v) g.axis.set_vec3(v, kDefaultAxis);
    return g;
}

void SglvGrid::validate() const {
    const std::size_t n = config.voxel_count();
    for (const Grid* g : fields())
        if (g->voxel_count() != n) throw Error("SglvGrid: grid shape does not match config");
    auto check = [](bool ok, const char* what) {
        if (!ok) throw Error(std::string("SglvGrid: ") + what);
    };
    for (double v : color.data) check(std::isfinite(v) && v >= 0.0, "negative or non-finite color");
    for (double v : weight.data) check(std::isfinite(v) && v >= 0.0, "negative or non-finite lobe weight");
    for (double v : alpha.data) check(v >= 0.0 && v <= 1.0, "opacity outside [0,1]");
    for (double v : sharpness.data) check(std::isfinite(v) && v >= 0.0, "negative or non-finite sharpness");
    for (std::size_t v = 0; v < n; ++v) check(std::abs(length(axis.vec3(v)) - 1.0) <= 1e-5, "lobe axis not unit");
}

double alpha_from_depth(double surface_depth, double point_depth, double voxel_side) {
    double a;
    if (surface_depth > point_depth) {
        a = 4.0 * ((point_depth - surface_depth) / voxel_side + 1.0);
    } else {
        a = 4.0 * ((surface_depth - point_depth) / voxel_side + 5.0);
    }
    return clamp01(a);
}

double empty_from_depth(double surface_depth, double point_depth, double voxel_side) {
    return (surface_depth - point_depth) / voxel_side > 3.0 ? -1.0 : 0.0;
}

VoxelDepthSample sample_voxel_depth(const Camera& camera, const DepthMap& depth, const Vec3& world_point) {
    VoxelDepthSample s;
    const Projection p = project(camera, world_point);
    if (!p.inside(depth.width(), depth.height())) return s;
    // every tap that carries weight must hold valid depth
    const double cx = std::clamp(p.x, 0.0, static_cast<double>(depth.width() - 1));
    const double cy = std::clamp(p.y, 0.0, static_cast<double>(depth.height() - 1));
    const int x0 = static_cast<int>(std::floor(cx));
    const int y0 = static_cast<int>(std::floor(cy));
    const int x1 = std::min(x0 + 1, depth.width() - 1);
    const int y1 = std::min(y0 + 1, depth.height() - 1);
    const double fx = cx - x0;
    const double fy = cy - y0;
    if (!depth.is_valid(y0, x0)) return s;
    if (fx > 0 && !depth.is_valid(y0, x1)) return s;
    if (fy > 0 && !depth.is_valid(y1, x0)) return s;
    if (fx > 0 && fy > 0 && !depth.is_valid(y1, x1)) return s;
    s.valid = true;
    s.px = p.x;
    s.py = p.y;
    s.voxel_depth = p.depth;
    s.surface_depth = bilinear_sample(depth.depth, p.x, p.y);
    return s;
}

namespace {

template <typename Fn>
void for_each_voxel(const VolumeConfig& config, Fn&& fn) {
    for (int iz = 0; iz < config.counts[2]; ++iz)
        for (int iy = 0; iy < config.counts[1]; ++iy)
            for (int ix = 0; ix < config.counts[0]; ++ix) fn(config.index(ix, iy, iz), ix, iy, iz);
}

// The depth-difference formulas measure distance in voxels along the volume's depth axis.
double depth_axis_side(const VolumeConfig& config) { return config.voxel_side(2); }

}  // namespace

Grid init_alpha(const VolumeConfig& config, const Camera& camera, const DepthMap& depth) {
    Grid alpha(config.counts, 1);
    const double side = depth_axis_side(config);
    for_each_voxel(config, [&](std::size_t v, int ix, int iy, int iz) {
        const VoxelDepthSample s = sample_voxel_depth(camera, depth, config.voxel_center_world(ix, iy, iz));
        if (s.valid) alpha.at(v) = alpha_from_depth(s.surface_depth, s.voxel_depth, side);
    });
    return alpha;
}

Grid init_color(const Grid& alpha, const Camera& camera, const HdrImage& image, const VolumeConfig& config) {
    if (alpha.counts != config.counts || alpha.channels != 1) throw Error("init_color: alpha grid does not match config");
    Grid color(config.counts, 3);
    for_each_voxel(config, [&](std::size_t v, int ix, int iy, int iz) {
        const double a = alpha.at(v);
        if (a <= 0.0) return;
        const Projection p = project(camera, config.voxel_center_world(ix, iy, iz));
        if (!p.inside(image.width(), image.height())) return;
        color.set_vec3(v, a * bilinear_sample_rgb(image, p.x, p.y));
    });
    return color;
}

Grid init_empty_channel(const VolumeConfig& config, const Camera& camera, const DepthMap& depth) {
    Grid empty(config.counts, 1);
    const double side = depth_axis_side(config);
    for_each_voxel(config, [&](std::size_t v, int ix, int iy, int iz) {
        const VoxelDepthSample s = sample_voxel_depth(camera, depth, config.voxel_center_world(ix, iy, iz));
        if (s.valid) empty.at(v) = empty_from_depth(s.surface_depth, s.voxel_depth, side);
    });
    return empty;
}

InitialVolume build_initial_volume(const VolumeConfig& config, const Camera& camera, const HdrImage& image,
                                   const DepthMap& depth) {
    if (image.width() != depth.width() || image.height() != depth.height())
        throw Error("build_initial_volume: image and depth resolution differ");
    InitialVolume init;
    init.config = config;
    init.alpha = init_alpha(config, camera, depth);
    init.color = init_color(init.alpha, camera, image, config);
    init.empty = init_empty_channel(config, camera, depth);
    return init;
}

SglvGrid sglv_from_initial(const InitialVolume& init) {
    SglvGrid g = SglvGrid::zeros(init.config);
    g.color = init.color;
    g.alpha = init.alpha;
    return g;
}

SglvGrid clear_near_surface(const SglvGrid& sglv, const Grid& empty) {
    if (empty.counts != sglv.config.counts || empty.channels != 1)
        throw Error("clear_near_surface: empty-channel grid shape mismatch");
    SglvGrid out = sglv;
    const std::size_t n = sglv.config.voxel_count();
    for (std::size_t v = 0; v < n; ++v) {
        const double scale = 1.0 + empty.at(v);
        if (scale == 1.0) continue;
        for (Grid* g : out.fields())
            for (int ch = 0; ch < g->channels; ++ch) g->at(v, ch) *= scale;
        // a positive scale keeps the axis direction, so only a cleared voxel changes it
        if (scale == 0.0) out.axis.set_vec3(v, SglvGrid::kDefaultAxis);
        else out.axis.set_vec3(v, sglv.axis.vec3(v));
    }
    return out;
}

SglvGrid merge_volumes(const SglvGrid& current, const SglvGrid& previous, const Grid& update) {
    if (!current.config.same_geometry(previous.config)) throw Error("merge_volumes: volume configs differ");
    if (update.counts != current.config.counts || update.channels != 1)
        throw Error("merge_volumes: update grid shape mismatch");
    for (double u : update.data)
        if (!(u >= 0.0 && u <= 1.0)) throw Error("merge_volumes: update weights must lie in [0,1]");
    SglvGrid out = current;
    const auto prev_fields = previous.fields();
    const auto out_fields = out.fields();
    const std::size_t n = current.config.voxel_count();
    for (std::size_t v = 0; v < n; ++v) {
        const double u = update.at(v);
        if (u == 0.0) continue;
        for (std::size_t f = 0; f < out_fields.size(); ++f) {
            Grid& g = *out_fields[f];
            for (int ch = 0; ch < g.channels; ++ch)
                g.at(v, ch) = u == 1.0 ? prev_fields[f]->at(v, ch) : g.at(v, ch) * (1.0 - u) + u * prev_fields[f]->at(v, ch);
        }
        if (u == 1.0) continue;
        const Vec3 s = out.axis.vec3(v);
        const double len = length(s);
        out.axis.set_vec3(v, len > 0.0 ? s / len : SglvGrid::kDefaultAxis);
    }
    return out;
}

SglvGrid merge_volumes(const SglvGrid& current, const SglvGrid& previous, double update) {
    return merge_volumes(current, previous, Grid(current.config.counts, 1, update));
}

TrilinearTaps trilinear_taps(const VolumeConfig& config, const Vec3& p) {
    TrilinearTaps t;
    if (!config.contains_local(p)) return t;
    t.inside = true;
    std::array<int, 3> i0{}, i1{};
    std::array<double, 3> f{};
    for (int a = 0; a < 3; ++a) {
        const int n = config.counts[a];
        const double u = std::clamp((p[a] - config.lo[a]) / config.voxel_side(a) - 0.5, 0.0, static_cast<double>(n - 1));
        i0[a] = std::min(static_cast<int>(u), n - 1);
        i1[a] = std::min(i0[a] + 1, n - 1);
        f[a] = u - i0[a];
    }
    int k = 0;
    for (int dz = 0; dz < 2; ++dz)
        for (int dy = 0; dy < 2; ++dy)
            for (int dx = 0; dx < 2; ++dx) {
                t.voxel[k] = config.index(dx ? i1[0] : i0[0], dy ? i1[1] : i0[1], dz ? i1[2] : i0[2]);
                t.weight[k] = (dx ? f[0] : 1 - f[0]) * (dy ? f[1] : 1 - f[1]) * (dz ? f[2] : 1 - f[2]);
                ++k;
            }
    return t;
}

double trilinear(const VolumeConfig& config, const Grid& grid, const Vec3& p, int ch) {
    const TrilinearTaps t = trilinear_taps(config, p);
    if (!t.inside) return 0.0;
    double v = 0.0;
    for (int k = 0; k < 8; ++k) v += t.weight[k] * grid.at(t.voxel[k], ch);
    return v;
}

namespace {

constexpr char kMagic[4] = {'S', 'G', 'L', 'V'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& out, T v) {
    static_assert(std::endian::native == std::endian::little, "SGLV IO assumes a little-endian host");
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw Error("read_sglv: truncated file");
    return v;
}

}  // namespace

void write_sglv(const std::filesystem::path& path, const SglvGrid& sglv) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("write_sglv: cannot open " + path.string());
    out.write(kMagic, 4);
    put<std::uint32_t>(out, kVersion);
    const VolumeConfig& c = sglv.config;
    for (int a = 0; a < 3; ++a) {
        put<double>(out, c.lo[a]);
        put<double>(out, c.hi[a]);
    }
    for (int a = 0; a < 3; ++a) put<std::uint32_t>(out, static_cast<std::uint32_t>(c.counts[a]));
    for (const Vec3& v : {c.anchor.origin, c.anchor.right, c.anchor.up, c.anchor.backward})
        for (int a = 0; a < 3; ++a) put<double>(out, v[a]);
    for (const Grid* g : sglv.fields())
        for (double v : g->data) put<float>(out, static_cast<float>(v));
    if (!out) throw Error("write_sglv: write failed for " + path.string());
}

SglvGrid read_sglv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("read_sglv: cannot open " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) throw Error("read_sglv: bad magic");
    if (get<std::uint32_t>(in) != kVersion) throw Error("read_sglv: unsupported version");
    VolumeConfig c;
    for (int a = 0; a < 3; ++a) {
        c.lo[a] = get<double>(in);
        c.hi[a] = get<double>(in);
    }
    for (int a = 0; a < 3; ++a) c.counts[a] = static_cast<int>(get<std::uint32_t>(in));
    for (Vec3* v : {&c.anchor.origin, &c.anchor.right, &c.anchor.up, &c.anchor.backward})
        for (int a = 0; a < 3; ++a) (*v)[a] = get<double>(in);
    c.validate();
    SglvGrid g = SglvGrid::zeros(c);
    for (Grid* grid : g.fields())
        for (double& v : grid->data) v = get<float>(in);
    return g;
}

}  // namespace sglv
