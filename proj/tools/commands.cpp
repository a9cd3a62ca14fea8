// Copyright 2026 The SGLV Authors
// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "scene_json.hpp"
#include "sglv/fit.hpp"
#include "sglv/io.hpp"
#include "sglv/loss.hpp"
#include "sglv/parallel.hpp"
#include "sglv/pipeline.hpp"
#include "sglv/scenegen.hpp"
#include "sglv/shading.hpp"

namespace sglv::cli {

namespace fs = std::filesystem;

namespace {

std::string numbered(const char* prefix, int i, const char* suffix) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s%04d%s", prefix, i, suffix);
    return buf;
}

Vec3 parse_vec3(const std::string& s) {
    std::stringstream ss(s);
    Vec3 v;
    char c1 = 0, c2 = 0;
    if (!(ss >> v.x >> c1 >> v.y >> c2 >> v.z) || c1 != ',' || c2 != ',' || !ss.eof())
        throw Error("expected x,y,z but got '" + s + "'");
    return v;
}

std::array<int, 3> parse_counts(const std::string& s) {
    std::stringstream ss(s);
    std::array<int, 3> n{};
    char c1 = 0, c2 = 0;
    if (!(ss >> n[0] >> c1 >> n[1] >> c2 >> n[2]) || c1 != 'x' || c2 != 'x' || !ss.eof() || n[0] < 2 || n[1] < 2 ||
        n[2] < 2)
        throw Error("expected NXxNYxNZ with each count >= 2 but got '" + s + "'");
    return n;
}

std::pair<int, int> parse_size(const std::string& s) {
    std::stringstream ss(s);
    int w = 0, h = 0;
    char c = 0;
    if (!(ss >> w >> c >> h) || c != 'x' || !ss.eof() || w < 2 || h < 2)
        throw Error("expected WIDTHxHEIGHT but got '" + s + "'");
    return {w, h};
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error("cannot create directory " + dir.string() + ": " + ec.message());
}

void write_map_pfm(const fs::path& path, const EquirectMap& m) { io::write_pfm(path, m.image()); }

EquirectMap read_hdr_map(const fs::path& path) {
    EquirectMap m = io::read_map(path);
    if (m.kind() != MapKind::Hdr) throw Error(path.string() + ": expected an HDR (3-channel PFM) environment map");
    return m;
}

// ---- sequence loading -------------------------------------------------------

struct Sequence {
    fs::path dir;
    std::vector<Camera> cameras;
    std::optional<Vec3> default_probe;
};

Sequence load_sequence(const fs::path& dir, const std::optional<fs::path>& poses_path) {
    if (!fs::is_directory(dir)) throw Error("frames directory " + dir.string() + " does not exist");
    Sequence seq;
    seq.dir = dir;
    const json poses = load_json(poses_path ? *poses_path : dir / "poses.json");
    seq.cameras = poses_from_json(poses);
    if (seq.cameras.empty()) throw Error("poses file lists no frames");
    if (poses.contains("probe")) seq.default_probe = vec_from_json(poses.at("probe"));
    int files = 0;
    while (fs::exists(dir / numbered("frame_", files, ".pfm"))) ++files;
    if (files != static_cast<int>(seq.cameras.size()))
        throw Error("pose count (" + std::to_string(seq.cameras.size()) + ") does not match frame count (" +
                    std::to_string(files) + ")");
    return seq;
}

VideoFrame load_frame(const Sequence& seq, int i) {
    VideoFrame f;
    f.camera = seq.cameras.at(static_cast<std::size_t>(i));
    f.image = io::read_pfm(seq.dir / numbered("frame_", i, ".pfm"));
    if (f.image.channels() != 3) throw Error("frame " + std::to_string(i) + " must be an RGB PFM");
    f.depth = io::read_depth_pfm(seq.dir / numbered("depth_", i, ".pfm"));
    if (f.depth.width() != f.image.width() || f.depth.height() != f.image.height())
        throw Error("frame " + std::to_string(i) + ": depth and color resolution differ");
    if (f.image.width() != f.camera.width || f.image.height() != f.camera.height)
        throw Error("frame " + std::to_string(i) + ": image size does not match the intrinsics");
    const fs::path probes = seq.dir / numbered("probes_", i, ".json");
    if (fs::exists(probes)) {
        const json j = load_json(probes);
        try {
            const json& pos = j.at("positions");
            const json& maps = j.at("maps");
            if (pos.size() != maps.size()) throw Error(probes.string() + ": positions and maps differ in count");
            for (std::size_t k = 0; k < pos.size(); ++k)
                f.targets.push_back({vec_from_json(pos[k]), read_hdr_map(seq.dir / maps[k].get<std::string>())});
        } catch (const json::exception& e) {
            throw Error(probes.string() + ": " + e.what());
        }
    }
    return f;
}

Vec3 resolve_probe(const std::string& flag, const Sequence& seq) {
    if (!flag.empty()) return parse_vec3(flag);
    if (seq.default_probe) return *seq.default_probe;
    throw Error("no --probe given and the poses file has no default probe");
}

// ---- shared pipeline flags --------------------------------------------------

struct PipelineFlags {
    std::string frames;
    std::string poses;
    std::string probe;
    std::string out;
    std::string vol_res = "21x15x16";
    int height = kDefaultEnvHeight;
    int iters = 500;
    double lr = 0.1;
    int spp = 64;
    int sphere_res = 32;
    bool no_render_loss = false;
    int feather = kDefaultFeather;
    double clamp_threshold = kDefaultClampThreshold;
    bool no_blend = false;
    std::uint64_t seed = 0;

    void add(CLI::App& app) {
        app.add_option("--frames", frames, "Sequence directory written by `sglv scenegen`")->required();
        app.add_option("--poses", poses, "Poses JSON (default: <frames>/poses.json)");
        app.add_option("--probe", probe, "Probe position x,y,z in world coordinates");
        app.add_option("--out", out, "Output directory")->required();
        app.add_option("--vol-res", vol_res, "Volume resolution NXxNYxNZ")->capture_default_str();
        app.add_option("--height", height, "Output panorama height")->capture_default_str()->check(CLI::Range(2, 4096));
        app.add_option("--iters", iters, "Fit iterations")->capture_default_str()->check(CLI::Range(1, 1000000));
        app.add_option("--lr", lr, "Adam step size")->capture_default_str();
        app.add_option("--spp", spp, "Render-loss samples per sphere pixel")->capture_default_str()->check(CLI::Range(1, 1 << 20));
        app.add_option("--sphere-res", sphere_res, "Render-loss sphere resolution")->capture_default_str()->check(CLI::Range(2, 4096));
        app.add_flag("--no-render-loss", no_render_loss, "Fit with the log-L2 term only");
        app.add_option("--feather", feather, "Blend-weight feather width in pixels")->capture_default_str()->check(CLI::NonNegativeNumber);
        app.add_option("--clamp-threshold", clamp_threshold, "Conservative clamp depth margin")->capture_default_str();
        app.add_flag("--no-blend", no_blend, "Skip detail blending and emit the volume render only");
        app.add_option("--seed", seed, "Random seed")->capture_default_str();
    }

    PipelineOptions options() const {
        PipelineOptions o;
        o.volume_counts = parse_counts(vol_res);
        o.env_height = height;
        o.fit.iterations = iters;
        o.fit.learning_rate = lr;
        o.fit.render_loss = !no_render_loss;
        o.fit.render.sphere.resolution = sphere_res;
        o.fit.render.sphere.spp = spp;
        o.fit.seed = seed;
        o.feather = feather;
        o.clamp_threshold = clamp_threshold;
        o.blend = !no_blend;
        return o;
    }

    json to_json() const {
        return {{"frames", frames},       {"poses", poses},         {"probe", probe},
                {"out", out},             {"vol_res", vol_res},     {"height", height},
                {"iters", iters},         {"lr", lr},               {"spp", spp},
                {"sphere_res", sphere_res}, {"no_render_loss", no_render_loss}, {"feather", feather},
                {"clamp_threshold", clamp_threshold}, {"no_blend", no_blend}, {"seed", seed}};
    }
};

void write_sidecar(const fs::path& dir, const std::string& command, json options) {
    save_json(dir / "run.json", {{"command", command}, {"options", std::move(options)}});
}

// ---- scenegen -----------------------------------------------------------------

struct ScenegenFlags {
    std::string out;
    std::string scene;
    int num_frames = kDefaultTrajectoryFrames;
    std::string image_size = "320x240";
    int height = kDefaultEnvHeight;
    int target_height = 60;
    int probes = 3;
    std::uint64_t seed = 0;
};

int cmd_scenegen(const ScenegenFlags& f) {
    const BoxScene scene = f.scene.empty() ? BoxScene::default_scene() : load_scene(f.scene);
    const auto [w, h] = parse_size(f.image_size);
    TrajectoryOptions topt;
    topt.width = w;
    topt.height = h;
    const std::vector<Camera> cams = gen_trajectory(scene, f.num_frames, f.seed, topt);
    const fs::path dir = f.out;
    ensure_dir(dir);
    save_json(dir / "scene.json", scene_to_json(scene));
    const Frame anchor = cams.front().pose;

    std::optional<Vec3> eval_probe;
    for (int i = 0; i < f.num_frames; ++i) {
        const auto [image, depth] = render_scene_view(scene, cams[i]);
        io::write_pfm(dir / numbered("frame_", i, ".pfm"), image);
        io::write_depth_pfm(dir / numbered("depth_", i, ".pfm"), depth);
        const std::vector<Vec3> probes =
            sample_free_probe_positions(cams[i], depth, f.probes, f.seed * 1000003ULL + static_cast<std::uint64_t>(i));
        json pj{{"positions", json::array()}, {"maps", json::array()}};
        for (int k = 0; k < f.probes; ++k) {
            if (!scene.is_free(probes[k])) continue;
            const std::string name = numbered("probe_", i, ("_" + std::to_string(k) + ".pfm").c_str());
            write_map_pfm(dir / name, render_gt_envmap(scene, probes[k], f.target_height, anchor));
            pj["positions"].push_back(vec_to_json(probes[k]));
            pj["maps"].push_back(name);
        }
        save_json(dir / numbered("probes_", i, ".json"), pj);
        if (i == 0) eval_probe = sample_free_probe_positions(cams[0], depth, 1, f.seed + 0x5eedULL)[0];
    }
    json poses = poses_to_json(cams);
    poses["probe"] = vec_to_json(*eval_probe);
    save_json(dir / "poses.json", poses);
    write_map_pfm(dir / "gt_probe.pfm", render_gt_envmap(scene, *eval_probe, f.height, anchor));
    write_sidecar(dir, "scenegen",
                  {{"out", f.out}, {"scene", f.scene}, {"num_frames", f.num_frames}, {"image_size", f.image_size},
                   {"height", f.height}, {"target_height", f.target_height}, {"probes", f.probes}, {"seed", f.seed}});
    std::cout << "wrote " << f.num_frames << " frames to " << dir.string() << '\n';
    return kExitOk;
}

// ---- fit-single ---------------------------------------------------------------

struct FitSingleFlags : PipelineFlags {
    int frame_index = 0;
};

int cmd_fit_single(const FitSingleFlags& f) {
    const Sequence seq = load_sequence(f.frames, f.poses.empty() ? std::nullopt : std::optional<fs::path>(f.poses));
    if (f.frame_index < 0 || f.frame_index >= static_cast<int>(seq.cameras.size()))
        throw Error("--frame-index out of range");
    const Vec3 probe = resolve_probe(f.probe, seq);
    const PipelineOptions opt = f.options();
    const VolumeConfig config = pipeline_volume_config(load_frame(seq, 0), opt);
    const VideoFrame frame = load_frame(seq, f.frame_index);
    if (!config.contains_world(probe)) throw Error("probe lies outside the volume");
    const SingleViewResult r = run_single_view(frame, probe, config, opt, opt.fit.seed);

    const fs::path dir = f.out;
    ensure_dir(dir);
    write_sglv(dir / "volume.sglv", r.fit.sglv);
    write_map_pfm(dir / "volume_map.pfm", r.volume_map);
    if (opt.blend) {
        write_map_pfm(dir / "pano_color.pfm", r.bundle.color);
        write_map_pfm(dir / "pano_mask.pfm", r.bundle.mask);
        write_map_pfm(dir / "pano_depth.pfm", r.bundle.depth);
        write_map_pfm(dir / "blend_weight.pfm", r.weights.weight);
        write_map_pfm(dir / "blended.pfm", r.blended);
    }
    if (!r.fit.trace.empty()) write_fit_trace(dir / "loss_trace.csv", r.fit.trace);
    json opts = f.to_json();
    opts["frame_index"] = f.frame_index;
    write_sidecar(dir, "fit-single", opts);
    std::cout << std::setprecision(6) << "fit: initial " << r.fit.initial_loss << ", best " << r.fit.best_loss
              << " at iteration " << r.fit.best_iteration << '\n';
    return kExitOk;
}

// ---- video --------------------------------------------------------------------

struct VideoFlags : PipelineFlags {
    int frames_limit = 0;
    std::string state_in;
    std::string state_out;
    std::string scene;
};

int cmd_video(const VideoFlags& f) {
    const Sequence seq = load_sequence(f.frames, f.poses.empty() ? std::nullopt : std::optional<fs::path>(f.poses));
    const Vec3 probe = resolve_probe(f.probe, seq);
    const PipelineOptions opt = f.options();
    int count = static_cast<int>(seq.cameras.size());
    if (f.frames_limit > 0) count = std::min(count, f.frames_limit);

    std::optional<PipelineState> resume;
    if (!f.state_in.empty()) resume = read_pipeline_state(f.state_in);
    const int first = resume ? resume->temporal.frame : 0;
    if (first > count) throw Error("state is past the requested frame range");
    EquirectMap previous = resume && first > 0 ? resume->temporal.blended : EquirectMap{};

    // frame 0 fixes the volume box; it is only needed when starting fresh
    std::vector<VideoFrame> frames(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        if (i >= first || (i == 0 && !resume)) frames[i] = load_frame(seq, i);
    if (!resume) {
        const VolumeConfig config = pipeline_volume_config(frames[0], opt);
        if (!config.contains_world(probe)) throw Error("probe lies outside the volume");
    }

    std::optional<EquirectMap> gt;
    const fs::path scene_path = !f.scene.empty() ? fs::path(f.scene) : seq.dir / "scene.json";
    if (fs::exists(scene_path))
        gt = render_gt_envmap(load_scene(scene_path), probe, opt.env_height, seq.cameras.front().pose);

    const fs::path dir = f.out;
    ensure_dir(dir);
    std::ofstream metrics(dir / "metrics.csv");
    if (!metrics) throw Error("cannot write metrics.csv");
    metrics << "frame,log_l2_gt,smoothness,coverage,fit_initial,fit_best\n" << std::setprecision(17);

    const VideoResult result = run_video_pipeline(frames, probe, opt, resume);
    for (std::size_t k = 0; k < result.outputs.size(); ++k) {
        const EquirectMap& L = result.outputs[k];
        const VideoFrameReport& rep = result.reports[k];
        write_map_pfm(dir / numbered("L_", rep.frame, ".pfm"), L);
        const double gt_loss = gt ? loss_log_l2(L, *gt) : std::nan("");
        const double smooth = previous.height() > 0 ? loss_smooth(L, previous) : std::nan("");
        metrics << rep.frame << ',' << gt_loss << ',' << smooth << ',' << rep.coverage << ',' << rep.fit_initial_loss
                << ',' << rep.fit_best_loss << '\n';
        previous = L;
    }
    if (!f.state_out.empty()) write_pipeline_state(f.state_out, result.state);
    json opts = f.to_json();
    opts["frames_limit"] = f.frames_limit;
    opts["state_in"] = f.state_in;
    opts["state_out"] = f.state_out;
    opts["scene"] = f.scene;
    write_sidecar(dir, "video", opts);
    std::cout << "processed frames " << first << ".." << count - 1 << '\n';
    return kExitOk;
}

// ---- render-sphere ------------------------------------------------------------

struct RenderSphereFlags {
    std::string env;
    std::string out;
    int res = 128;
    int spp = 128;
    int ref_spp = 4096;
    std::string mode = "both";
    double roughness = 0.2;
    std::uint64_t seed = 0;
};

double mse(const Image& a, const Image& b) {
    const auto x = a.data();
    const auto y = b.data();
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
    return s / static_cast<double>(x.size());
}

int cmd_render_sphere(const RenderSphereFlags& f) {
    const EquirectMap env = io::read_map(f.env);
    if (env.kind() != MapKind::Hdr) throw Error(f.env + ": render-sphere needs an HDR environment map, not LDR");
    MicrofacetBrdf brdf;
    brdf.roughness = f.roughness;
    const fs::path dir = f.out;
    ensure_dir(dir);
    SphereRenderSpec ref{f.res, f.ref_spp, SamplingMode::Importance, f.seed + 1};
    const HdrImage reference = render_sphere(env, brdf, ref);
    io::write_pfm(dir / "sphere_reference.pfm", reference);
    io::write_png(dir / "sphere_reference.png", reference);
    std::ofstream report(dir / "report.csv");
    report << "mode,spp,mse\n" << std::setprecision(17);
    std::vector<std::pair<std::string, SamplingMode>> modes;
    if (f.mode == "importance" || f.mode == "both") modes.emplace_back("importance", SamplingMode::Importance);
    if (f.mode == "uniform" || f.mode == "both") modes.emplace_back("uniform", SamplingMode::Uniform);
    for (const auto& [name, mode] : modes) {
        const HdrImage img = render_sphere(env, brdf, {f.res, f.spp, mode, f.seed});
        io::write_pfm(dir / ("sphere_" + name + ".pfm"), img);
        io::write_png(dir / ("sphere_" + name + ".png"), img);
        const double e = mse(img, reference);
        report << name << ',' << f.spp << ',' << e << '\n';
        std::cout << name << " mse " << std::setprecision(6) << e << '\n';
    }
    write_sidecar(dir, "render-sphere",
                  {{"env", f.env}, {"out", f.out}, {"res", f.res}, {"spp", f.spp}, {"ref_spp", f.ref_spp},
                   {"mode", f.mode}, {"roughness", f.roughness}, {"seed", f.seed},
                   {"specular_probability", specular_sampling_weight(brdf)}});
    return kExitOk;
}

// ---- gradcheck ----------------------------------------------------------------

struct GradcheckFlags {
    int volumes = 10;
    int size = 4;
    int height = 16;
    double eps = 1e-3;
    double tolerance = 1e-4;
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_gradcheck(const GradcheckFlags& f) {
    double worst = 0.0;
    json rows = json::array();
    GradCheckOptions opt;
    opt.eps = f.eps;
    for (int v = 0; v < f.volumes; ++v) {
        const GradCheckCase c = random_gradcheck_case(f.size, f.height, f.seed + static_cast<std::uint64_t>(v));
        const GradCheckReport r = grad_check(c.sglv, c.targets, opt);
        worst = std::max(worst, r.max_relative_error);
        std::cout << "volume " << v << ": max relative error " << std::setprecision(6) << std::scientific
                  << r.max_relative_error << std::defaultfloat << " over " << r.checked << " entries\n";
        rows.push_back({{"volume", v}, {"max_relative_error", r.max_relative_error}, {"checked", r.checked},
                        {"skipped", r.skipped}});
    }
    const bool pass = worst < f.tolerance;
    std::cout << "max relative error " << std::scientific << std::setprecision(6) << worst << std::defaultfloat
              << (pass ? " (pass)" : " (FAIL)") << '\n';
    if (!f.out.empty()) {
        const fs::path dir = f.out;
        ensure_dir(dir);
        save_json(dir / "gradcheck.json", {{"volumes", rows}, {"max_relative_error", worst}, {"pass", pass}});
        write_sidecar(dir, "gradcheck",
                      {{"volumes", f.volumes}, {"size", f.size}, {"height", f.height}, {"eps", f.eps},
                       {"tolerance", f.tolerance}, {"seed", f.seed}, {"out", f.out}});
    }
    return pass ? kExitOk : kExitValidation;
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"sglv: lighting volumes from RGBD frames"};
    app.require_subcommand(1);
    app.fallthrough();
    int threads = 0;
    app.add_option("--threads", threads, "Worker threads (default: SGLV_THREADS or all cores)")
        ->check(CLI::NonNegativeNumber);

    ScenegenFlags sg;
    CLI::App* c_sg = app.add_subcommand("scenegen", "Render a synthetic RGBD sequence with ground-truth probes");
    c_sg->add_option("--out", sg.out, "Output directory")->required();
    c_sg->add_option("--scene", sg.scene, "Scene JSON (default: built-in furnished room)");
    c_sg->add_option("--num-frames", sg.num_frames, "Number of frames")->capture_default_str()->check(CLI::Range(1, 100000));
    c_sg->add_option("--image-size", sg.image_size, "Frame size WIDTHxHEIGHT")->capture_default_str();
    c_sg->add_option("--height", sg.height, "Ground-truth panorama height at the evaluation probe")->capture_default_str()->check(CLI::Range(2, 4096));
    c_sg->add_option("--target-height", sg.target_height, "Panorama height of the fitting probes")->capture_default_str()->check(CLI::Range(2, 4096));
    c_sg->add_option("--probes", sg.probes, "Fitting probes per frame")->capture_default_str()->check(CLI::Range(1, 1000));
    c_sg->add_option("--seed", sg.seed, "Random seed")->capture_default_str();

    FitSingleFlags fs_flags;
    CLI::App* c_fit = app.add_subcommand("fit-single", "Fit a lighting volume to one frame and blend detail");
    fs_flags.add(*c_fit);
    c_fit->add_option("--frame-index", fs_flags.frame_index, "Frame to use")->capture_default_str();

    VideoFlags vf;
    CLI::App* c_video = app.add_subcommand("video", "Run the temporal pipeline over a frame sequence");
    vf.add(*c_video);
    c_video->add_option("--frames-limit", vf.frames_limit, "Stop after this many frames (0 = all)")->capture_default_str();
    c_video->add_option("--state-in", vf.state_in, "Resume from a saved pipeline state");
    c_video->add_option("--state-out", vf.state_out, "Save the pipeline state after the last frame");
    c_video->add_option("--scene", vf.scene, "Scene JSON for ground-truth metrics (default: <frames>/scene.json)");

    RenderSphereFlags rs;
    CLI::App* c_rs = app.add_subcommand("render-sphere", "Render a glossy sphere under an HDR environment map");
    c_rs->add_option("--env", rs.env, "Environment map (PFM)")->required();
    c_rs->add_option("--out", rs.out, "Output directory")->required();
    c_rs->add_option("--res", rs.res, "Sphere image resolution")->capture_default_str()->check(CLI::Range(2, 8192));
    c_rs->add_option("--spp", rs.spp, "Samples per pixel")->capture_default_str()->check(CLI::Range(1, 1 << 24));
    c_rs->add_option("--ref-spp", rs.ref_spp, "Reference samples per pixel")->capture_default_str()->check(CLI::Range(1, 1 << 24));
    c_rs->add_option("--mode", rs.mode, "Sampling mode")->capture_default_str()->check(CLI::IsMember({"importance", "uniform", "both"}));
    c_rs->add_option("--roughness", rs.roughness, "GGX roughness")->capture_default_str()->check(CLI::Range(0.01, 1.0));
    c_rs->add_option("--seed", rs.seed, "Random seed")->capture_default_str();

    GradcheckFlags gc;
    CLI::App* c_gc = app.add_subcommand("gradcheck", "Compare analytic and finite-difference gradients");
    c_gc->add_option("--volumes", gc.volumes, "Random volumes to check")->capture_default_str()->check(CLI::Range(1, 10000));
    c_gc->add_option("--size", gc.size, "Voxels per axis")->capture_default_str()->check(CLI::Range(2, 8));
    c_gc->add_option("--height", gc.height, "Target panorama height")->capture_default_str()->check(CLI::Range(2, 512));
    c_gc->add_option("--eps", gc.eps, "Finite-difference step")->capture_default_str()->check(CLI::PositiveNumber);
    c_gc->add_option("--tolerance", gc.tolerance, "Pass threshold on the max relative error")->capture_default_str();
    c_gc->add_option("--seed", gc.seed, "Random seed")->capture_default_str();
    c_gc->add_option("--out", gc.out, "Optional report directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }
    try {
        if (threads > 0) set_thread_count(threads);
        if (c_sg->parsed()) return cmd_scenegen(sg);
        if (c_fit->parsed()) return cmd_fit_single(fs_flags);
        if (c_video->parsed()) return cmd_video(vf);
        if (c_rs->parsed()) return cmd_render_sphere(rs);
        if (c_gc->parsed()) return cmd_gradcheck(gc);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
    return kExitInput;
}

int run(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    for (const std::string& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace sglv::cli
