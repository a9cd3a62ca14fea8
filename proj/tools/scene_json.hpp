// Copyright 2026 The SGLV Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <vector>

#include <json.hpp>

#include "sglv/camera.hpp"
#include "sglv/scenegen.hpp"

namespace sglv::cli {

using nlohmann::json;

json vec_to_json(const Vec3& v);
Vec3 vec_from_json(const json& j);

json scene_to_json(const BoxScene& scene);
/// Throws sglv::Error on schema violations.
BoxScene scene_from_json(const json& j);

BoxScene load_scene(const std::filesystem::path& path);
void save_json(const std::filesystem::path& path, const json& j);
json load_json(const std::filesystem::path& path);

/// Intrinsics plus a 4x4 row-major camera-to-world matrix per frame.
json poses_to_json(const std::vector<Camera>& cameras);
std::vector<Camera> poses_from_json(const json& j);

}  // namespace sglv::cli
