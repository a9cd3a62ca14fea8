// Copyright 2026 The SGLV Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "sglv/temporal.hpp"

using namespace sglv;

namespace {

PanoBundle bundle_from_mask(const EquirectMap& mask, double color, double depth) {
    PanoBundle b{EquirectMap::hdr(mask.height()), mask, EquirectMap::depth(mask.height())};
    for (int r = 0; r < mask.height(); ++r)
        for (int c = 0; c < mask.width(); ++c)
            if (mask.at(r, c) > 0.0) {
                for (int ch = 0; ch < 3; ++ch) b.color.at(r, c, ch) = color;
                b.depth.at(r, c) = depth;
            }
    return b;
}

EquirectMap filled(MapKind kind, int h, double v) {
    EquirectMap m(kind, h);
    for (double& x : m.image().data()) x = v;
    return m;
}

// Repeated 3x3 erosion (columns wrap, rows outside the map ignored); the
// number of rounds a pixel survives is its distance to the mask boundary.
EquirectMap erosion_weights(const EquirectMap& mask, int feather) {
    const int h = mask.height(), w = mask.width();
    EquirectMap cur = mask;
    EquirectMap rounds = EquirectMap::mask(h);
    for (int k = 1; k <= feather + 1; ++k) {
        EquirectMap next = EquirectMap::mask(h);
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c) {
                if (cur.at(r, c) == 0.0) continue;
                rounds.at(r, c) += 1.0;
                bool keep = true;
                for (int dr = -1; dr <= 1; ++dr)
                    for (int dc = -1; dc <= 1; ++dc) {
                        const int rr = r + dr;
                        if (rr < 0 || rr >= h) continue;
                        keep = keep && cur.at(rr, ((c + dc) % w + w) % w) > 0.0;
                    }
                next.at(r, c) = keep ? 1.0 : 0.0;
            }
        cur = next;
    }
    for (double& v : rounds.image().data()) v = std::min(1.0, v / (feather + 1));
    return rounds;
}

}  // namespace

TEST_CASE("blend weight of full and empty masks") {
    const PanoBundle full = bundle_from_mask(filled(MapKind::Mask, 8, 1.0), 0.5, 1.0);
    for (int feather : {0, 2}) {
        const BlendWeights w = compute_blend_weight(full, feather);
        for (double v : w.weight.image().data()) CHECK(v == 1.0);
    }
    const BlendWeights none = compute_blend_weight(bundle_from_mask(EquirectMap::mask(8), 0.5, 1.0), 2);
    for (double v : none.weight.image().data()) CHECK(v == 0.0);
}

TEST_CASE("half-panorama mask ramps over the seam") {
    EquirectMap mask = EquirectMap::mask(16);
    for (int r = 0; r < 16; ++r)
        for (int c = 0; c < 16; ++c) mask.at(r, c) = 1.0;
    const BlendWeights w = compute_blend_weight(bundle_from_mask(mask, 0.5, 1.0), 2);
    const EquirectMap ref = erosion_weights(mask, 2);
    CHECK(w.weight == ref);
    // both seams ramp 1/3, 2/3, 1
    CHECK(w.weight.at(8, 0) == doctest::Approx(1.0 / 3));
    CHECK(w.weight.at(8, 1) == doctest::Approx(2.0 / 3));
    CHECK(w.weight.at(8, 2) == 1.0);
    CHECK(w.weight.at(8, 15) == doctest::Approx(1.0 / 3));
    CHECK(w.weight.at(8, 16) == 0.0);
}

TEST_CASE("blend weight matches erosion on random masks") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 5; ++trial) {
        EquirectMap mask = EquirectMap::mask(12);
        // random union of rectangles so the mask has interiors
        for (int k = 0; k < 4; ++k) {
            const int r0 = static_cast<int>(rng() % 12), c0 = static_cast<int>(rng() % 24);
            const int hh = 1 + static_cast<int>(rng() % 8), ww = 1 + static_cast<int>(rng() % 12);
            for (int r = r0; r < std::min(12, r0 + hh); ++r)
                for (int c = c0; c < c0 + ww; ++c) mask.at(r, c % 24) = 1.0;
        }
        for (int feather : {0, 1, 2, 3}) {
            const BlendWeights w = compute_blend_weight(bundle_from_mask(mask, 0.5, 1.0), feather);
            const EquirectMap ref = erosion_weights(mask, feather);
            for (std::size_t i = 0; i < ref.image().data().size(); ++i)
                CHECK(w.weight.image().data()[i] == doctest::Approx(ref.image().data()[i]).epsilon(1e-15));
        }
    }
}

TEST_CASE("blend_single") {
    const EquirectMap vol = filled(MapKind::Hdr, 4, 0.2);
    const PanoBundle b = bundle_from_mask(filled(MapKind::Mask, 4, 1.0), 0.6, 1.0);
    BlendWeights w{filled(MapKind::Mask, 4, 0.0)};
    CHECK(blend_single(vol, b, w) == vol);
    w.weight = filled(MapKind::Mask, 4, 1.0);
    CHECK(blend_single(vol, b, w).image() == b.color.image());
    w.weight = filled(MapKind::Mask, 4, 0.5);
    CHECK(blend_single(vol, b, w).at(1, 1, 0) == doctest::Approx(0.4));
    CHECK_THROWS_AS(blend_single(filled(MapKind::Hdr, 8, 0.2), b, w), Error);
}

TEST_CASE("conservative clamp cases") {
    BlendWeights w{filled(MapKind::Mask, 2, 0.8)};
    EquirectMap prev = EquirectMap::depth(2);
    EquirectMap next = filled(MapKind::Depth, 2, 2.0);
    prev.at(0, 0) = 2.1;   // 0.1 closer: blocked
    prev.at(0, 1) = 2.3;   // 0.3 closer: kept
    // (1, *) never seen: kept
    const BlendWeights out = conservative_clamp(w, prev, next, 0.25);
    CHECK(out.weight.at(0, 0) == 0.0);
    CHECK(out.weight.at(0, 1) == 0.8);
    CHECK(out.weight.at(1, 0) == 0.8);
    CHECK(out.weight.at(1, 3) == 0.8);
}

TEST_CASE("conservative clamp with nothing new seen") {
    BlendWeights w{filled(MapKind::Mask, 2, 0.0)};
    const EquirectMap prev = EquirectMap::depth(2);
    const EquirectMap next = EquirectMap::depth(2);
    const BlendWeights out = conservative_clamp(w, prev, next);
    for (double v : out.weight.image().data()) CHECK(v == 0.0);
}

TEST_CASE("temporal_update first frame reduces to blend_single") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    EquirectMap vol = EquirectMap::hdr(4), mask = EquirectMap::mask(4), wm = EquirectMap::mask(4);
    for (double& v : vol.image().data()) v = 3.0 * u(rng);
    for (double& v : mask.image().data()) v = u(rng) < 0.5 ? 1.0 : 0.0;
    PanoBundle b = bundle_from_mask(mask, 0.7, 1.5);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 8; ++c) wm.at(r, c) = mask.at(r, c) * u(rng);
    const BlendWeights w{wm};
    const TemporalStep step = temporal_update(TemporalState::initial(4), vol, b, w);
    CHECK(step.blended == blend_single(vol, b, w));
    CHECK(step.state.frame == 1);
}

TEST_CASE("temporal_update keeps history where the accumulated mask is full") {
    TemporalState s = TemporalState::initial(2);
    s.blended = filled(MapKind::Hdr, 2, 0.9);
    s.accum_mask = filled(MapKind::Mask, 2, 1.0);
    s.accum_depth = filled(MapKind::Depth, 2, 3.0);
    const PanoBundle b = bundle_from_mask(EquirectMap::mask(2), 0.5, 1.0);
    const TemporalStep step = temporal_update(s, filled(MapKind::Hdr, 2, 0.1), b, BlendWeights{EquirectMap::mask(2)});
    CHECK(step.blended == s.blended);
    CHECK(step.state.accum_depth == s.accum_depth);
}

TEST_CASE("three-frame run against a direct loop") {
    const int h = 6;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    TemporalState s = TemporalState::initial(h);
    const int n = h * 2 * h;
    std::vector<double> L(n * 3, 0.0), HD(n, INFINITY), HM(n, 0.0);
    for (int f = 0; f < 3; ++f) {
        EquirectMap vol = EquirectMap::hdr(h), mask = EquirectMap::mask(h), wm = EquirectMap::mask(h);
        for (double& v : vol.image().data()) v = 2.0 * u(rng);
        for (double& v : mask.image().data()) v = u(rng) < 0.6 ? 1.0 : 0.0;
        PanoBundle b = bundle_from_mask(mask, 0.0, 0.0);
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < 2 * h; ++c)
                if (mask.at(r, c) > 0) {
                    for (int ch = 0; ch < 3; ++ch) b.color.at(r, c, ch) = u(rng);
                    b.depth.at(r, c) = 0.5 + 3.0 * u(rng);
                    wm.at(r, c) = u(rng);
                }
        const TemporalStep step = temporal_update(s, vol, b, BlendWeights{wm});
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < 2 * h; ++c) {
                const int p = r * 2 * h + c;
                const double lm = wm.at(r, c), hm = HM[p];
                for (int ch = 0; ch < 3; ++ch)
                    L[p * 3 + ch] = lm * b.color.at(r, c, ch) +
                                    (1 - lm) * ((1 - hm) * vol.at(r, c, ch) + hm * L[p * 3 + ch]);
                if (lm == 1.0 || (lm > 0.0 && std::isinf(HD[p])))
                    HD[p] = b.depth.at(r, c);
                else if (lm > 0.0)
                    HD[p] = lm * b.depth.at(r, c) + (1 - lm) * HD[p];
                HM[p] = std::min(HM[p] + lm, 1.0);
            }
        s = step.state;
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < 2 * h; ++c) {
                const int p = r * 2 * h + c;
                for (int ch = 0; ch < 3; ++ch) CHECK(step.blended.at(r, c, ch) == doctest::Approx(L[p * 3 + ch]));
                CHECK(s.accum_mask.at(r, c) == doctest::Approx(HM[p]));
                if (std::isinf(HD[p]))
                    CHECK(std::isinf(s.accum_depth.at(r, c)));
                else
                    CHECK(s.accum_depth.at(r, c) == doctest::Approx(HD[p]));
            }
    }
}

TEST_CASE("accumulated mask grows monotonically and frozen pixels never change") {
    const int h = 8;
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    TemporalState s = TemporalState::initial(h);
    EquirectMap frozen_value;
    for (int f = 0; f < 10; ++f) {
        EquirectMap vol = EquirectMap::hdr(h), mask = EquirectMap::mask(h), wm = EquirectMap::mask(h);
        for (double& v : vol.image().data()) v = 2.0 * u(rng);
        // pixel (0,0) fills up during the first two frames and is never seen again
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < 2 * h; ++c) {
                const bool corner = r == 0 && c == 0;
                mask.at(r, c) = corner ? (f < 2 ? 1.0 : 0.0) : (u(rng) < 0.3 ? 1.0 : 0.0);
                if (mask.at(r, c) > 0) wm.at(r, c) = corner ? 0.6 : u(rng);
            }
        const PanoBundle b = bundle_from_mask(mask, 0.4, 2.0);
        const TemporalStep step = temporal_update(s, vol, b, BlendWeights{wm});
        for (std::size_t i = 0; i < s.accum_mask.image().data().size(); ++i) {
            CHECK(step.state.accum_mask.image().data()[i] >= s.accum_mask.image().data()[i]);
            CHECK(step.state.accum_mask.image().data()[i] <= 1.0);
        }
        for (double v : step.blended.image().data()) CHECK(v >= 0.0);
        if (f == 1) {
            CHECK(step.state.accum_mask.at(0, 0) == 1.0);
            frozen_value = step.blended;
        }
        if (f > 1)
            for (int ch = 0; ch < 3; ++ch) CHECK(step.blended.at(0, 0, ch) == frozen_value.at(0, 0, ch));
        s = step.state;
    }
}

TEST_CASE("temporal state round trip is lossless") {
    TemporalState s = TemporalState::initial(4);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (double& v : s.blended.image().data()) v = u(rng) * 1e3;
    for (double& v : s.accum_mask.image().data()) v = u(rng);
    s.accum_depth.at(1, 2) = 1.0 / 3.0;
    s.frame = 7;
    std::stringstream buf;
    write_temporal_state(buf, s);
    const TemporalState r = read_temporal_state(buf);
    CHECK(r.blended == s.blended);
    CHECK(r.accum_mask == s.accum_mask);
    CHECK(r.accum_depth == s.accum_depth);
    CHECK(r.frame == 7);
    std::stringstream bad("XXXX");
    CHECK_THROWS_AS(read_temporal_state(bad), Error);
}
