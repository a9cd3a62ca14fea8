// Copyright 2026 The SGLV Authors
// SPDX-License-Identifier: Apache-2.0

#include "sglv/pipeline.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace sglv {

VolumeConfig pipeline_volume_config(const VideoFrame& frame, const PipelineOptions& options) {
    const double depth_max = frame.depth.max_valid_depth();
    if (!(depth_max > 0.0)) throw Error("pipeline: frame has no valid depth");
    return make_volume_config(depth_max, frame.camera, options.volume_counts);
}

SingleViewResult run_single_view(const VideoFrame& frame, const Vec3& probe, const VolumeConfig& config,
                                 const PipelineOptions& options, std::uint64_t seed) {
    if (!config.contains_world(probe)) throw Error("pipeline: probe lies outside the volume");
    const InitialVolume init = build_initial_volume(config, frame.camera, frame.image, frame.depth);
    std::vector<FitTarget> targets;
    for (const FitTarget& t : frame.targets)
        if (config.contains_world(t.position)) targets.push_back(t);

    SingleViewResult r;
    if (targets.empty()) {
        r.fit.sglv = clear_near_surface(sglv_from_initial(init), init.empty);
    } else {
        FitOptions fo = options.fit;
        fo.seed = seed;
        r.fit = fit_sglv(init, targets, fo);
    }
    r.volume_map = render_envmap(r.fit.sglv, probe, options.env_height, options.fit.settings);
    const PartialMesh mesh = build_partial_mesh(frame.camera, frame.depth, frame.image, options.gap_threshold);
    r.bundle = render_partial_pano(mesh, probe, options.env_height, config.anchor);
    r.weights = compute_blend_weight(r.bundle, options.feather);
    if (!options.blend) r.weights.weight = EquirectMap::mask(options.env_height);
    r.blended = options.blend ? blend_single(r.volume_map, r.bundle, r.weights) : r.volume_map;
    return r;
}

namespace {

constexpr char kStateMagic[4] = {'S', 'G', 'P', 'S'};

template <typename T>
void put(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw Error("read_pipeline_state: truncated file");
    return v;
}

}  // namespace

void write_pipeline_state(const std::filesystem::path& path, const PipelineState& state) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("write_pipeline_state: cannot open " + path.string());
    out.write(kStateMagic, 4);
    write_temporal_state(out, state.temporal);
    put<std::uint8_t>(out, state.volume ? 1 : 0);
    if (state.volume) {
        const SglvGrid& g = *state.volume;
        const VolumeConfig& c = g.config;
        for (int a = 0; a < 3; ++a) put<double>(out, c.lo[a]);
        for (int a = 0; a < 3; ++a) put<double>(out, c.hi[a]);
        for (int a = 0; a < 3; ++a) put<std::int32_t>(out, c.counts[a]);
        for (const Vec3* v : {&c.anchor.origin, &c.anchor.right, &c.anchor.up, &c.anchor.backward})
            for (int a = 0; a < 3; ++a) put<double>(out, (*v)[a]);
        for (const Grid* grid : g.fields())
            out.write(reinterpret_cast<const char*>(grid->data.data()),
                      static_cast<std::streamsize>(grid->data.size() * sizeof(double)));
    }
    if (!out) throw Error("write_pipeline_state: write failed");
}

PipelineState read_pipeline_state(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("read_pipeline_state: cannot open " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kStateMagic, 4) != 0) throw Error("read_pipeline_state: bad magic");
    PipelineState state;
    state.temporal = read_temporal_state(in);
    if (get<std::uint8_t>(in)) {
        VolumeConfig c;
        for (int a = 0; a < 3; ++a) c.lo[a] = get<double>(in);
        for (int a = 0; a < 3; ++a) c.hi[a] = get<double>(in);
        for (int a = 0; a < 3; ++a) c.counts[a] = get<std::int32_t>(in);
        for (Vec3* v : {&c.anchor.origin, &c.anchor.right, &c.anchor.up, &c.anchor.backward})
            for (int a = 0; a < 3; ++a) (*v)[a] = get<double>(in);
        c.validate();
        SglvGrid g = SglvGrid::zeros(c);
        for (Grid* grid : g.fields()) {
            in.read(reinterpret_cast<char*>(grid->data.data()),
                    static_cast<std::streamsize>(grid->data.size() * sizeof(double)));
            if (!in) throw Error("read_pipeline_state: truncated volume");
        }
        state.volume = std::move(g);
    }
    return state;
}

VideoResult run_video_pipeline(const std::vector<VideoFrame>& frames, const Vec3& probe,
                               const PipelineOptions& options, std::optional<PipelineState> resume,
                               const std::function<void(const VideoFrameReport&, const PipelineState&)>& on_frame) {
    if (frames.empty()) throw Error("run_video_pipeline: empty frame sequence");
    VideoResult result;
    result.state = resume ? std::move(*resume) : PipelineState{TemporalState::initial(options.env_height), {}};
    // the volume box is fixed by the first frame for the whole sequence
    const VolumeConfig config =
        result.state.volume ? result.state.volume->config : pipeline_volume_config(frames.front(), options);
    if (result.state.temporal.blended.height() != options.env_height)
        throw Error("run_video_pipeline: resumed state has a different map height");

    for (std::size_t i = static_cast<std::size_t>(result.state.temporal.frame); i < frames.size(); ++i) {
        const SingleViewResult single = run_single_view(frames[i], probe, config, options, options.fit.seed + i);
        const double u = static_cast<double>(i) / static_cast<double>(i + 1);
        SglvGrid merged = result.state.volume ? merge_volumes(single.fit.sglv, *result.state.volume, u)
                                              : single.fit.sglv;
        const EquirectMap volume_map =
            i == 0 ? single.volume_map : render_envmap(merged, probe, options.env_height, options.fit.settings);
        BlendWeights weights = single.weights;
        if (options.blend)
            weights = conservative_clamp(weights, result.state.temporal.accum_depth, single.bundle.depth,
                                         options.clamp_threshold);
        TemporalStep step = temporal_update(result.state.temporal, volume_map, single.bundle, weights);
        result.state.temporal = std::move(step.state);
        result.state.volume = std::move(merged);

        VideoFrameReport report;
        report.frame = static_cast<int>(i);
        double sum = 0.0;
        for (double m : result.state.temporal.accum_mask.image().data()) sum += m;
        report.coverage = sum / static_cast<double>(result.state.temporal.accum_mask.image().data().size());
        report.fit_initial_loss = single.fit.initial_loss;
        report.fit_best_loss = single.fit.best_loss;
        for (const FitTarget& t : frames[i].targets) report.targets_used += config.contains_world(t.position);

        result.outputs.push_back(std::move(step.blended));
        result.independent.push_back(single.blended);
        result.reports.push_back(report);
        if (on_frame) on_frame(report, result.state);
    }
    return result;
}

}  // namespace sglv
