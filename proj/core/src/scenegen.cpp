// Copyright 2026 The SGLV Authors
// SPDX-License-Identifier: Apache-2.0

#include "sglv/scenegen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "sglv/parallel.hpp"

namespace sglv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRayEps = 1e-7;
constexpr int kLightGrid = 4;

bool finite_nonneg(const Vec3& v) {
    return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z) && v.x >= 0 && v.y >= 0 && v.z >= 0;
}

bool in_room(const BoxScene& s, const Vec3& p, double tol) {
    return p.x >= -tol && p.y >= -tol && p.z >= -tol && p.x <= s.size.x + tol && p.y <= s.size.y + tol &&
           p.z <= s.size.z + tol;
}

// Entry distance of a ray into an AABB, or inf. `axis` receives the entry face axis.
double hit_aabb(const Vec3& lo, const Vec3& hi, const Vec3& o, const Vec3& d, int& axis) {
    double t0 = -kInf, t1 = kInf;
    axis = -1;
    for (int a = 0; a < 3; ++a) {
        if (d[a] == 0.0) {
            if (o[a] < lo[a] || o[a] > hi[a]) return kInf;
            continue;
        }
        double ta = (lo[a] - o[a]) / d[a];
        double tb = (hi[a] - o[a]) / d[a];
        if (ta > tb) std::swap(ta, tb);
        if (ta > t0) {
            t0 = ta;
            axis = a;
        }
        t1 = std::min(t1, tb);
    }
    if (t0 > t1 || t0 <= kRayEps || axis < 0) return kInf;
    return t0;
}

// Exit distance from the room box and the wall index it leaves through.
double hit_walls(const BoxScene& s, const Vec3& o, const Vec3& d, int& wall) {
    double best = kInf;
    wall = -1;
    for (int a = 0; a < 3; ++a) {
        if (d[a] == 0.0) continue;
        const int side = d[a] > 0.0 ? 1 : 0;
        const double plane = side ? s.size[a] : 0.0;
        const double t = (plane - o[a]) / d[a];
        if (t > kRayEps && t < best) {
            best = t;
            wall = 2 * a + side;
        }
    }
    return best;
}

bool in_rect(const Vec3& p, const Vec3& center, const Vec3& hu, const Vec3& hv) {
    const Vec3 r = p - center;
    const double a = dot(r, hu) / dot(hu, hu);
    const double b = dot(r, hv) / dot(hv, hv);
    return std::abs(a) <= 1.0 && std::abs(b) <= 1.0;
}

double hit_rect(const RectLight& l, const Vec3& o, const Vec3& d) {
    const Vec3 n = cross(l.half_u, l.half_v);
    const double denom = dot(d, n);
    if (denom == 0.0) return kInf;
    const double t = dot(l.center - o, n) / denom;
    if (t <= kRayEps) return kInf;
    return in_rect(o + t * d, l.center, l.half_u, l.half_v) ? t : kInf;
}

bool through_window(const BoxScene& s, int wall, const Vec3& p) {
    return s.window && s.window->wall == wall && in_rect(p, s.window->center, s.window->half_u, s.window->half_v);
}

// Any blocker strictly between o and o + t_max * d.
bool blocked(const BoxScene& s, const Vec3& o, const Vec3& d, double t_max) {
    int axis = 0;
    for (const Blocker& b : s.blockers)
        if (hit_aabb(b.lo, b.hi, o, d, axis) < t_max) return true;
    return false;
}

Vec3 material_albedo(const SurfaceMaterial& m, double a, double b) {
    if (!m.checker) return m.albedo;
    const long ia = static_cast<long>(std::floor(a / m.checker_size));
    const long ib = static_cast<long>(std::floor(b / m.checker_size));
    return ((ia + ib) & 1) ? m.checker_albedo : m.albedo;
}

Vec3 shade(const BoxScene& s, const Vec3& p, const Vec3& n, const Vec3& albedo) {
    const Vec3 origin = p + 1e-6 * n;
    Vec3 irradiance;
    for (const RectLight& l : s.lights) {
        const Vec3 ln = l.normal();
        const double sample_area = l.area() / (kLightGrid * kLightGrid);
        for (int i = 0; i < kLightGrid; ++i) {
            for (int j = 0; j < kLightGrid; ++j) {
                const double a = 2.0 * (i + 0.5) / kLightGrid - 1.0;
                const double b = 2.0 * (j + 0.5) / kLightGrid - 1.0;
                const Vec3 q = l.center + a * l.half_u + b * l.half_v;
                const Vec3 w = q - origin;
                const double r2 = dot(w, w);
                if (r2 == 0.0) continue;
                const double r = std::sqrt(r2);
                const Vec3 dir = w / r;
                const double cos_p = dot(n, dir);
                const double cos_l = -dot(ln, dir);
                if (cos_p <= 0.0 || cos_l <= 0.0) continue;
                if (blocked(s, origin, dir, r - 1e-6)) continue;
                irradiance += (cos_p * cos_l * sample_area / r2) * l.radiance;
            }
        }
    }
    if (s.window) {
        const Vec3 to_sun = -normalize(s.window->direction);
        const double cos_p = dot(n, to_sun);
        if (cos_p > 0.0) {
            int wall = -1;
            const double t = hit_walls(s, origin, to_sun, wall);
            if (std::isfinite(t) && through_window(s, wall, origin + t * to_sun) && !blocked(s, origin, to_sun, t))
                irradiance += cos_p * s.window->irradiance;
        }
    }
    return mul(albedo, irradiance / kPi + s.ambient);
}

}  // namespace

void BoxScene::validate() const {
    if (!(size.x > 0 && size.y > 0 && size.z > 0)) throw Error("scene: room size must be positive");
    if (!finite_nonneg(ambient)) throw Error("scene: ambient must be nonnegative");
    for (const RectLight& l : lights) {
        if (!finite_nonneg(l.radiance)) throw Error("scene: light radiance must be nonnegative");
        if (length(cross(l.half_u, l.half_v)) == 0.0) throw Error("scene: degenerate light rectangle");
        for (int a : {-1, 1})
            for (int b : {-1, 1})
                if (!in_room(*this, l.center + a * l.half_u + b * l.half_v, 1e-9))
                    throw Error("scene: light outside the room");
    }
    if (window) {
        if (window->wall < 0 || window->wall > 5) throw Error("scene: window wall index must be 0..5");
        if (!finite_nonneg(window->irradiance) || !finite_nonneg(window->sky))
            throw Error("scene: window radiance must be nonnegative");
        if (length(window->direction) == 0.0) throw Error("scene: window direction is zero");
        const int axis = window->wall / 2;
        const double plane = window->wall % 2 ? size[axis] : 0.0;
        if (std::abs(window->center[axis] - plane) > 1e-9 || window->half_u[axis] != 0.0 ||
            window->half_v[axis] != 0.0)
            throw Error("scene: window must lie in its wall plane");
    }
    for (const Blocker& b : blockers)
        if (!(b.lo.x < b.hi.x && b.lo.y < b.hi.y && b.lo.z < b.hi.z)) throw Error("scene: empty blocker");
}

bool BoxScene::is_free(const Vec3& p, double margin) const {
    if (!(p.x > margin && p.y > margin && p.z > margin && p.x < size.x - margin && p.y < size.y - margin &&
          p.z < size.z - margin))
        return false;
    for (const Blocker& b : blockers) {
        if (p.x > b.lo.x - margin && p.x < b.hi.x + margin && p.y > b.lo.y - margin && p.y < b.hi.y + margin &&
            p.z > b.lo.z - margin && p.z < b.hi.z + margin)
            return false;
    }
    return true;
}

BoxScene BoxScene::default_scene() {
    BoxScene s;
    s.size = {4.0, 2.6, 4.0};
    s.walls[0].albedo = {0.65, 0.55, 0.45};
    s.walls[1].albedo = {0.6, 0.6, 0.6};
    s.walls[2] = {{0.75, 0.75, 0.7}, true, {0.15, 0.12, 0.1}, 0.4};
    s.walls[3].albedo = {0.8, 0.8, 0.8};
    s.walls[4] = {{0.45, 0.55, 0.7}, true, {0.7, 0.7, 0.72}, 0.3};
    s.walls[5].albedo = {0.55, 0.6, 0.5};
    s.lights.push_back({{2.0, 2.6, 2.0}, {0.4, 0.0, 0.0}, {0.0, 0.0, 0.3}, {18.0, 17.0, 15.0}});
    s.window = Window{1, {4.0, 1.5, 2.2}, {0.0, 0.0, 0.5}, {0.0, 0.4, 0.0}, {-0.8, -0.6, 0.1}, {5.0, 4.6, 4.0},
                      {1.2, 1.4, 1.8}};
    s.blockers.push_back({{1.2, 0.0, 1.3}, {2.3, 0.75, 2.1}, {{0.5, 0.3, 0.15}, false, {}, 0.25}});
    s.ambient = {0.04, 0.04, 0.045};
    return s;
}

SceneHit trace_scene(const BoxScene& s, const Vec3& o, const Vec3& d) {
    SceneHit out;
    int wall = -1;
    double best = hit_walls(s, o, d, wall);
    int blocker = -1;
    int blocker_axis = -1;
    for (std::size_t i = 0; i < s.blockers.size(); ++i) {
        int axis = -1;
        const double t = hit_aabb(s.blockers[i].lo, s.blockers[i].hi, o, d, axis);
        if (t < best) {
            best = t;
            blocker = static_cast<int>(i);
            blocker_axis = axis;
        }
    }
    // emitters win ties with the surface they are mounted on
    int light = -1;
    for (std::size_t i = 0; i < s.lights.size(); ++i) {
        const double t = hit_rect(s.lights[i], o, d);
        if (t <= best + 1e-9 && (light < 0 || t < hit_rect(s.lights[light], o, d))) light = static_cast<int>(i);
    }
    if (light >= 0) {
        const RectLight& l = s.lights[light];
        out.hit = true;
        out.t = hit_rect(l, o, d);
        out.radiance = dot(d, l.normal()) < 0.0 ? l.radiance : Vec3{};
        return out;
    }
    if (!std::isfinite(best)) return out;
    const Vec3 p = o + best * d;
    if (blocker >= 0) {
        const Blocker& b = s.blockers[blocker];
        Vec3 n;
        n[blocker_axis] = d[blocker_axis] > 0.0 ? -1.0 : 1.0;
        const int a1 = (blocker_axis + 1) % 3, a2 = (blocker_axis + 2) % 3;
        out.hit = true;
        out.t = best;
        out.radiance = shade(s, p, n, material_albedo(b.material, p[a1], p[a2]));
        return out;
    }
    if (through_window(s, wall, p)) {
        out.radiance = s.window->sky;
        return out;
    }
    const int axis = wall / 2;
    Vec3 n;
    n[axis] = wall % 2 ? -1.0 : 1.0;
    const int a1 = (axis + 1) % 3, a2 = (axis + 2) % 3;
    out.hit = true;
    out.t = best;
    out.radiance = shade(s, p, n, material_albedo(s.walls[wall], p[a1], p[a2]));
    return out;
}

std::pair<HdrImage, DepthMap> render_scene_view(const BoxScene& scene, const Camera& camera) {
    camera.validate();
    if (!scene.is_free(camera.position())) throw Error("render_scene_view: camera is outside the room");
    HdrImage image(camera.width, camera.height, 3);
    DepthMap depth(camera.width, camera.height);
    const Vec3 forward = camera.forward();
    parallel_for(static_cast<std::size_t>(camera.height), [&](std::size_t row) {
        const int r = static_cast<int>(row);
        for (int c = 0; c < camera.width; ++c) {
            const Vec3 dir = normalize(unproject(camera, c, r, 1.0) - camera.position());
            const SceneHit h = trace_scene(scene, camera.position(), dir);
            image.set_rgb(r, c, h.radiance);
            if (h.hit) depth.set(r, c, h.t * dot(dir, forward));
            else depth.invalidate(r, c);
        }
    });
    return {std::move(image), std::move(depth)};
}

EquirectMap render_gt_envmap(const BoxScene& scene, const Vec3& position, int height, const Frame& frame) {
    if (!scene.is_free(position)) throw Error("render_gt_envmap: position is outside the room");
    EquirectMap env = EquirectMap::hdr(height);
    const int W = env.width();
    parallel_for(static_cast<std::size_t>(height), [&](std::size_t row) {
        const int r = static_cast<int>(row);
        for (int c = 0; c < W; ++c) {
            const Vec3 dir = frame.to_world_dir(pixel_to_direction(r, c, height));
            const Vec3 L = trace_scene(scene, position, dir).radiance;
            env.at(r, c, 0) = L.x;
            env.at(r, c, 1) = L.y;
            env.at(r, c, 2) = L.z;
        }
    });
    return env;
}

namespace {

Vec3 catmull_rom(const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& p3, double t) {
    const double t2 = t * t, t3 = t2 * t;
    return 0.5 * ((2.0 * p1) + (p2 - p0) * t + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * t2 +
                  (3.0 * p1 - p0 - 3.0 * p2 + p3) * t3);
}

// Points along `poly` at successive chord distance `step`; empty if the polyline runs out.
std::vector<Vec3> resample_chord(const std::vector<Vec3>& poly, int count, double step) {
    std::vector<Vec3> out{poly.front()};
    std::size_t seg = 0;
    while (static_cast<int>(out.size()) < count) {
        const Vec3 cur = out.back();
        bool found = false;
        for (; seg + 1 < poly.size(); ++seg) {
            const Vec3 a = poly[seg], b = poly[seg + 1];
            if (length(b - cur) < step) continue;
            // solve |a + s (b - a) - cur| = step for the larger root in [0,1]
            const Vec3 ab = b - a, ac = a - cur;
            const double qa = dot(ab, ab), qb = 2.0 * dot(ab, ac), qc = dot(ac, ac) - step * step;
            const double disc = std::max(qb * qb - 4.0 * qa * qc, 0.0);
            const double s = std::clamp((-qb + std::sqrt(disc)) / (2.0 * qa), 0.0, 1.0);
            out.push_back(a + s * ab);
            found = true;
            break;
        }
        if (!found) return {};
    }
    return out;
}

Camera camera_at(const Vec3& eye, double yaw, double pitch, const TrajectoryOptions& o) {
    const Vec3 look{std::cos(pitch) * std::cos(yaw), std::sin(pitch), std::cos(pitch) * std::sin(yaw)};
    return Camera::look_at(eye, eye + look, {0.0, 1.0, 0.0}, o.width, o.height, o.hfov_deg);
}

}  // namespace

std::vector<Camera> gen_trajectory(const BoxScene& scene, int n_frames, std::uint64_t seed,
                                   const TrajectoryOptions& options) {
    if (n_frames < 1) throw Error("gen_trajectory: n_frames must be at least 1");
    scene.validate();
    const double inset = options.margin + 0.3;
    if (scene.size.x - 2.0 * inset < 2.0 * options.step || scene.size.z - 2.0 * inset < 2.0 * options.step ||
        scene.size.y < 2.0 * options.margin + 0.5)
        throw Error("gen_trajectory: room too small for the trajectory step");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double pitch = options.pitch_deg * kPi / 180.0;

    auto random_free_point = [&]() {
        for (int tries = 0; tries < 10000; ++tries) {
            const Vec3 p{inset + unit(rng) * (scene.size.x - 2 * inset), scene.size.y * (0.45 + 0.15 * unit(rng)),
                         inset + unit(rng) * (scene.size.z - 2 * inset)};
            if (scene.is_free(p, inset)) return p;
        }
        throw Error("gen_trajectory: no free space for waypoints");
    };

    std::vector<Vec3> positions;
    const double path_length = (n_frames - 1) * options.step;
    for (int attempt = 0; attempt < 200 && positions.empty(); ++attempt) {
        const int n_way = 4 + static_cast<int>(std::ceil(path_length / 0.4));
        std::vector<Vec3> way;
        for (int i = 0; i < n_way; ++i) way.push_back(random_free_point());
        std::vector<Vec3> poly;
        for (int i = 1; i + 2 < n_way; ++i)
            for (int k = 0; k < 256; ++k) poly.push_back(catmull_rom(way[i - 1], way[i], way[i + 1], way[i + 2], k / 256.0));
        poly.push_back(way[n_way - 2]);
        std::vector<Vec3> pts = n_frames == 1 ? std::vector<Vec3>{poly.front()} : resample_chord(poly, n_frames, options.step);
        bool ok = !pts.empty();
        for (const Vec3& p : pts) ok = ok && scene.is_free(p, options.margin);
        if (ok) positions = std::move(pts);
    }
    if (positions.empty()) throw Error("gen_trajectory: could not fit a path in the room");

    // yaw increments vary slowly around the target, then are rescaled to hit the mean
    const double yaw0 = 2.0 * kPi * unit(rng);
    const double phase = 2.0 * kPi * unit(rng);
    const double turn = unit(rng) < 0.5 ? -1.0 : 1.0;
    std::vector<double> deltas(static_cast<std::size_t>(std::max(n_frames - 1, 0)));
    double sum = 0.0;
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        deltas[i] = 1.0 + 0.15 * std::sin(phase + 2.0 * kPi * static_cast<double>(i) / 12.0);
        sum += deltas[i];
    }
    const double scale = deltas.empty() ? 0.0 : options.rotation_deg * kPi / 180.0 * deltas.size() / sum;
    std::vector<Camera> cams;
    double yaw = yaw0;
    for (int i = 0; i < n_frames; ++i) {
        if (i > 0) yaw += turn * scale * deltas[i - 1];
        cams.push_back(camera_at(positions[i], yaw, pitch, options));
    }
    return cams;
}

std::pair<double, double> trajectory_step_stats(const std::vector<Camera>& cams) {
    if (cams.size() < 2) return {0.0, 0.0};
    double trans = 0.0, rot = 0.0;
    for (std::size_t i = 1; i < cams.size(); ++i) {
        const Frame& a = cams[i - 1].pose;
        const Frame& b = cams[i].pose;
        trans += length(b.origin - a.origin);
        // trace of Rb Ra^T over matching axes
        const double tr = dot(a.right, b.right) + dot(a.up, b.up) + dot(a.backward, b.backward);
        rot += std::acos(std::clamp((tr - 1.0) / 2.0, -1.0, 1.0)) * 180.0 / kPi;
    }
    const double n = static_cast<double>(cams.size() - 1);
    return {trans / n, rot / n};
}

namespace {

Vec3 frustum_point(const Camera& camera, std::mt19937_64& rng, double z_lo, double z_hi) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    // density proportional to z^2 makes the point uniform in volume
    const double a3 = z_lo * z_lo * z_lo, b3 = z_hi * z_hi * z_hi;
    const double z = std::cbrt(a3 + unit(rng) * (b3 - a3));
    const double x = -0.5 + unit(rng) * camera.width;
    const double y = -0.5 + unit(rng) * camera.height;
    return unproject(camera, x, y, z);
}

}  // namespace

std::vector<Vec3> sample_probe_positions(const Camera& camera, double depth_max, int n, std::uint64_t seed,
                                         double near, double far) {
    if (n < 1) throw Error("sample_probe_positions: n must be at least 1");
    if (!(depth_max > 0.0) || !(near > 0.0 && near < far)) throw Error("sample_probe_positions: bad depth band");
    std::mt19937_64 rng(seed);
    std::vector<Vec3> out;
    for (int i = 0; i < n; ++i) out.push_back(frustum_point(camera, rng, near * depth_max, far * depth_max));
    return out;
}

std::vector<Vec3> sample_free_probe_positions(const Camera& camera, const DepthMap& depth, int n,
                                              std::uint64_t seed, double clearance, double near, double far) {
    if (n < 1) throw Error("sample_free_probe_positions: n must be at least 1");
    const double depth_max = depth.max_valid_depth();
    if (!(depth_max > 0.0)) throw Error("sample_free_probe_positions: depth map has no valid pixels");
    std::mt19937_64 rng(seed);
    std::vector<Vec3> out;
    for (int tries = 0; tries < 100000 && static_cast<int>(out.size()) < n; ++tries) {
        const Vec3 p = frustum_point(camera, rng, near * depth_max, far * depth_max);
        const Projection proj = project(camera, p);
        const int c = std::clamp(static_cast<int>(std::lround(proj.x)), 0, camera.width - 1);
        const int r = std::clamp(static_cast<int>(std::lround(proj.y)), 0, camera.height - 1);
        if (!depth.is_valid(r, c) || depth.depth.at(r, c) < proj.depth + clearance) continue;
        out.push_back(p);
    }
    if (static_cast<int>(out.size()) < n) throw Error("sample_free_probe_positions: not enough free space");
    return out;
}

}  // namespace sglv
