// Copyright 2026 The SGLV Authors
// SPDX-License-Identifier: Apache-2.0

#include "sglv/temporal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace sglv {

BlendWeights compute_blend_weight(const PanoBundle& bundle, int feather) {
    if (feather < 0) throw Error("compute_blend_weight: feather must be nonnegative");
    const EquirectMap& mask = bundle.mask;
    const int H = mask.height();
    const int W = mask.width();
    BlendWeights out{EquirectMap::mask(H)};
    const int reach = feather + 1;
    for (int r = 0; r < H; ++r) {
        for (int c = 0; c < W; ++c) {
            if (mask.at(r, c) <= 0.0) continue;
            // chessboard distance to the nearest invisible pixel, capped at feather + 1
            int dist = reach;
            for (int dr = -feather; dr <= feather && dist > 1; ++dr) {
                const int rr = r + dr;
                if (rr < 0 || rr >= H) continue;
                for (int dc = -feather; dc <= feather; ++dc) {
                    const int d = std::max(std::abs(dr), std::abs(dc));
                    if (d >= dist) continue;
                    const int cc = ((c + dc) % W + W) % W;
                    if (mask.at(rr, cc) <= 0.0) dist = d;
                }
            }
            out.weight.at(r, c) = std::min(1.0, static_cast<double>(dist) / reach);
        }
    }
    return out;
}

EquirectMap blend_single(const EquirectMap& volume_map, const PanoBundle& bundle, const BlendWeights& weights) {
    const EquirectMap& detail = bundle.color;
    if (volume_map.width() != detail.width() || volume_map.height() != detail.height() ||
        volume_map.channels() != 3 || detail.channels() != 3 || weights.weight.height() != volume_map.height() ||
        weights.weight.width() != volume_map.width())
        throw Error("blend_single: map shapes differ");
    EquirectMap out = EquirectMap::hdr(volume_map.height());
    for (int r = 0; r < out.height(); ++r)
        for (int c = 0; c < out.width(); ++c) {
            const double w = weights.weight.at(r, c);
            for (int ch = 0; ch < 3; ++ch)
                out.at(r, c, ch) = w * detail.at(r, c, ch) + (1.0 - w) * volume_map.at(r, c, ch);
        }
    return out;
}

BlendWeights conservative_clamp(const BlendWeights& weights, const EquirectMap& prev_depth,
                                const EquirectMap& new_depth, double threshold) {
    if (!weights.weight.same_shape(prev_depth) || !prev_depth.same_shape(new_depth))
        throw Error("conservative_clamp: map shapes differ");
    BlendWeights out = weights;
    for (int r = 0; r < out.weight.height(); ++r)
        for (int c = 0; c < out.weight.width(); ++c) {
            const double indicator = prev_depth.at(r, c) - new_depth.at(r, c) < threshold ? 1.0 : 0.0;
            out.weight.at(r, c) = std::max(out.weight.at(r, c) - indicator, 0.0);
        }
    return out;
}

TemporalState TemporalState::initial(int height) {
    TemporalState s;
    s.blended = EquirectMap::hdr(height);
    s.accum_depth = EquirectMap::depth(height);
    s.accum_mask = EquirectMap::mask(height);
    s.frame = 0;
    return s;
}

TemporalStep temporal_update(const TemporalState& state, const EquirectMap& volume_map, const PanoBundle& bundle,
                             const BlendWeights& weights) {
    const int H = volume_map.height();
    const int W = volume_map.width();
    auto fits = [&](const EquirectMap& m) { return m.height() == H && m.width() == W; };
    if (!fits(state.blended) || !fits(state.accum_depth) || !fits(state.accum_mask) || !fits(bundle.color) ||
        !fits(bundle.depth) || !fits(weights.weight))
        throw Error("temporal_update: map shapes differ");
    TemporalStep step{EquirectMap::hdr(H), state};
    step.state.frame = state.frame + 1;
    for (int r = 0; r < H; ++r) {
        for (int c = 0; c < W; ++c) {
            const double w = weights.weight.at(r, c);
            const double seen = state.accum_mask.at(r, c);
            for (int ch = 0; ch < 3; ++ch) {
                const double history = (1.0 - seen) * volume_map.at(r, c, ch) + seen * state.blended.at(r, c, ch);
                step.blended.at(r, c, ch) = w * bundle.color.at(r, c, ch) + (1.0 - w) * history;
            }
            const double prev_d = state.accum_depth.at(r, c);
            const double new_d = bundle.depth.at(r, c);
            double d = prev_d;
            if (w == 1.0 || (w > 0.0 && std::isinf(prev_d))) d = new_d;
            else if (w > 0.0) d = w * new_d + (1.0 - w) * prev_d;
            step.state.accum_depth.at(r, c) = d;
            step.state.accum_mask.at(r, c) = std::min(seen + w, 1.0);
        }
    }
    step.state.blended = step.blended;
    return step;
}

namespace {

constexpr char kStateMagic[4] = {'S', 'G', 'T', 'S'};

void put_map(std::ostream& out, const EquirectMap& m) {
    const std::int32_t header[3] = {static_cast<std::int32_t>(m.kind()), m.height(), m.channels()};
    out.write(reinterpret_cast<const char*>(header), sizeof(header));
    const auto d = m.image().data();
    out.write(reinterpret_cast<const char*>(d.data()), static_cast<std::streamsize>(d.size() * sizeof(double)));
}

EquirectMap get_map(std::istream& in) {
    std::int32_t header[3];
    in.read(reinterpret_cast<char*>(header), sizeof(header));
    if (!in || header[1] < 1 || header[0] < 0 || header[0] > 3) throw Error("read_temporal_state: corrupt map header");
    EquirectMap m(static_cast<MapKind>(header[0]), header[1]);
    if (m.channels() != header[2]) throw Error("read_temporal_state: channel mismatch");
    auto d = m.image().data();
    in.read(reinterpret_cast<char*>(d.data()), static_cast<std::streamsize>(d.size() * sizeof(double)));
    if (!in) throw Error("read_temporal_state: truncated file");
    return m;
}

}  // namespace

void write_temporal_state(std::ostream& out, const TemporalState& state) {
    out.write(kStateMagic, 4);
    const std::int32_t frame = state.frame;
    out.write(reinterpret_cast<const char*>(&frame), sizeof(frame));
    put_map(out, state.blended);
    put_map(out, state.accum_depth);
    put_map(out, state.accum_mask);
    if (!out) throw Error("write_temporal_state: write failed");
}

TemporalState read_temporal_state(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kStateMagic, 4) != 0) throw Error("read_temporal_state: bad magic");
    std::int32_t frame = 0;
    in.read(reinterpret_cast<char*>(&frame), sizeof(frame));
    TemporalState s;
    s.frame = frame;
    s.blended = get_map(in);
    s.accum_depth = get_map(in);
    s.accum_mask = get_map(in);
    return s;
}

void write_temporal_state(const std::filesystem::path& path, const TemporalState& state) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("write_temporal_state: cannot open " + path.string());
    write_temporal_state(out, state);
}

TemporalState read_temporal_state(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("read_temporal_state: cannot open " + path.string());
    return read_temporal_state(in);
}

}  // namespace sglv
