// Copyright 2026 The SGLV Authors
// SPDX-License-Identifier: Apache-2.0

#include "scene_json.hpp"

#include <fstream>

namespace sglv::cli {

json vec_to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

Vec3 vec_from_json(const json& j) {
    if (!j.is_array() || j.size() != 3) throw Error("scene: expected a 3-element array");
    for (const json& e : j)
        if (!e.is_number()) throw Error("scene: vector entries must be numbers");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

namespace {

json material_to_json(const SurfaceMaterial& m) {
    json j{{"albedo", vec_to_json(m.albedo)}};
    if (m.checker) {
        j["checker"] = {{"albedo", vec_to_json(m.checker_albedo)}, {"size", m.checker_size}};
    }
    return j;
}

SurfaceMaterial material_from_json(const json& j) {
    SurfaceMaterial m;
    if (!j.is_object()) throw Error("scene: material must be an object");
    if (j.contains("albedo")) m.albedo = vec_from_json(j.at("albedo"));
    if (j.contains("checker")) {
        const json& c = j.at("checker");
        m.checker = true;
        m.checker_albedo = vec_from_json(c.at("albedo"));
        m.checker_size = c.value("size", 0.25);
        if (!(m.checker_size > 0.0)) throw Error("scene: checker size must be positive");
    }
    return m;
}

constexpr const char* kWallNames[6] = {"x_min", "x_max", "floor", "ceiling", "z_min", "z_max"};

}  // namespace

json scene_to_json(const BoxScene& s) {
    json j;
    j["room"] = vec_to_json(s.size);
    json walls = json::object();
    for (int i = 0; i < 6; ++i) walls[kWallNames[i]] = material_to_json(s.walls[i]);
    j["walls"] = walls;
    j["lights"] = json::array();
    for (const RectLight& l : s.lights)
        j["lights"].push_back({{"center", vec_to_json(l.center)},
                               {"half_u", vec_to_json(l.half_u)},
                               {"half_v", vec_to_json(l.half_v)},
                               {"radiance", vec_to_json(l.radiance)}});
    j["blockers"] = json::array();
    for (const Blocker& b : s.blockers)
        j["blockers"].push_back(
            {{"lo", vec_to_json(b.lo)}, {"hi", vec_to_json(b.hi)}, {"material", material_to_json(b.material)}});
    if (s.window) {
        const Window& w = *s.window;
        j["window"] = {{"wall", kWallNames[w.wall]},       {"center", vec_to_json(w.center)},
                       {"half_u", vec_to_json(w.half_u)},  {"half_v", vec_to_json(w.half_v)},
                       {"direction", vec_to_json(w.direction)}, {"irradiance", vec_to_json(w.irradiance)},
                       {"sky", vec_to_json(w.sky)}};
    }
    j["ambient"] = vec_to_json(s.ambient);
    return j;
}

BoxScene scene_from_json(const json& j) {
    try {
        if (!j.is_object()) throw Error("scene: top level must be an object");
        BoxScene s;
        s.walls = {};
        s.size = vec_from_json(j.at("room"));
        if (j.contains("walls")) {
            const json& walls = j.at("walls");
            for (auto it = walls.begin(); it != walls.end(); ++it) {
                int idx = -1;
                for (int i = 0; i < 6; ++i)
                    if (it.key() == kWallNames[i]) idx = i;
                if (idx < 0) throw Error("scene: unknown wall '" + it.key() + "'");
                s.walls[idx] = material_from_json(it.value());
            }
        }
        for (const json& l : j.value("lights", json::array()))
            s.lights.push_back({vec_from_json(l.at("center")), vec_from_json(l.at("half_u")),
                                vec_from_json(l.at("half_v")), vec_from_json(l.at("radiance"))});
        for (const json& b : j.value("blockers", json::array())) {
            Blocker blk{vec_from_json(b.at("lo")), vec_from_json(b.at("hi")), {}};
            if (b.contains("material")) blk.material = material_from_json(b.at("material"));
            s.blockers.push_back(blk);
        }
        if (j.contains("window")) {
            const json& w = j.at("window");
            Window win;
            const std::string wall = w.at("wall").get<std::string>();
            win.wall = -1;
            for (int i = 0; i < 6; ++i)
                if (wall == kWallNames[i]) win.wall = i;
            if (win.wall < 0) throw Error("scene: unknown window wall '" + wall + "'");
            win.center = vec_from_json(w.at("center"));
            win.half_u = vec_from_json(w.at("half_u"));
            win.half_v = vec_from_json(w.at("half_v"));
            win.direction = vec_from_json(w.at("direction"));
            win.irradiance = vec_from_json(w.at("irradiance"));
            win.sky = vec_from_json(w.at("sky"));
            s.window = win;
        }
        if (j.contains("ambient")) s.ambient = vec_from_json(j.at("ambient"));
        s.validate();
        return s;
    } catch (const json::exception& e) {
        throw Error(std::string("scene: ") + e.what());
    }
}

json load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

BoxScene load_scene(const std::filesystem::path& path) { return scene_from_json(load_json(path)); }

void save_json(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

json poses_to_json(const std::vector<Camera>& cameras) {
    json j;
    if (!cameras.empty()) {
        const Camera& c = cameras.front();
        j["intrinsics"] = {{"fx", c.fx}, {"fy", c.fy}, {"cx", c.cx}, {"cy", c.cy}, {"width", c.width},
                           {"height", c.height}};
    }
    j["frames"] = json::array();
    for (const Camera& c : cameras) {
        const Frame& f = c.pose;
        json m = json::array();
        for (int r = 0; r < 3; ++r)
            for (const Vec3* col : {&f.right, &f.up, &f.backward, &f.origin}) m.push_back((*col)[r]);
        for (double v : {0.0, 0.0, 0.0, 1.0}) m.push_back(v);
        j["frames"].push_back({{"camera_to_world", m}});
    }
    return j;
}

std::vector<Camera> poses_from_json(const json& j) {
    try {
        const json& in = j.at("intrinsics");
        std::vector<Camera> cams;
        for (const json& fr : j.at("frames")) {
            const json& m = fr.at("camera_to_world");
            if (!m.is_array() || m.size() != 16) throw Error("poses: camera_to_world must have 16 entries");
            Camera c;
            c.fx = in.at("fx").get<double>();
            c.fy = in.at("fy").get<double>();
            c.cx = in.at("cx").get<double>();
            c.cy = in.at("cy").get<double>();
            c.width = in.at("width").get<int>();
            c.height = in.at("height").get<int>();
            Vec3* cols[4] = {&c.pose.right, &c.pose.up, &c.pose.backward, &c.pose.origin};
            for (int r = 0; r < 3; ++r)
                for (int k = 0; k < 4; ++k) (*cols[k])[r] = m[4 * r + k].get<double>();
            c.validate();
            cams.push_back(c);
        }
        return cams;
    } catch (const json::exception& e) {
        throw Error(std::string("poses: ") + e.what());
    }
}

}  // namespace sglv::cli
