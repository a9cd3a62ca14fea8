// Copyright 2026 The SGLV Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "sglv/fit.hpp"
#include "sglv/loss.hpp"
#include "support.hpp"

using namespace sglv;

namespace {

EquirectMap random_map(int h, std::uint64_t seed, double scale) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, scale);
    EquirectMap m = EquirectMap::hdr(h);
    for (double& v : m.image().data()) v = u(rng);
    return m;
}

EquirectMap constant_map(int h, double k) {
    EquirectMap m = EquirectMap::hdr(h);
    for (double& v : m.image().data()) v = k;
    return m;
}

RenderLossSpec small_render_spec() {
    RenderLossSpec s;
    s.sphere.resolution = 8;
    s.sphere.spp = 8;
    return s;
}

}  // namespace

TEST_CASE("log-L2 loss") {
    const EquirectMap a = random_map(4, 1, 5.0);
    CHECK(loss_log_l2(a, a) == 0.0);
    EquirectMap p = EquirectMap::hdr(1), g = EquirectMap::hdr(1);
    for (int c = 0; c < 2; ++c)
        for (int ch = 0; ch < 3; ++ch) p.at(0, c, ch) = std::exp(1.0) - 1.0;
    CHECK(loss_log_l2(p, g) == doctest::Approx(1.0));
    const EquirectMap b = random_map(4, 2, 5.0);
    double direct = 0.0;
    for (std::size_t i = 0; i < a.image().data().size(); ++i) {
        const double d = std::log(a.image().data()[i] + 1.0) - std::log(b.image().data()[i] + 1.0);
        direct += d * d;
    }
    CHECK(loss_log_l2(a, b) == doctest::Approx(direct / a.image().data().size()));
    EquirectMap neg = a;
    neg.at(0, 0, 0) = -0.1;
    CHECK_THROWS_AS(loss_log_l2(neg, b), Error);
    CHECK_THROWS_AS(loss_log_l2(a, random_map(8, 1, 1.0)), Error);
}

TEST_CASE("log-L2 gradient matches finite differences") {
    const EquirectMap a = random_map(3, 3, 4.0), b = random_map(3, 4, 4.0);
    const Image g = loss_log_l2_grad(a, b);
    for (std::size_t i = 0; i < a.image().data().size(); i += 5) {
        EquirectMap hi = a, lo = a;
        hi.image().data()[i] += 1e-6;
        lo.image().data()[i] -= 1e-6;
        const double fd = (loss_log_l2(hi, b) - loss_log_l2(lo, b)) / 2e-6;
        CHECK(g.data()[i] == doctest::Approx(fd).epsilon(1e-5));
    }
}

TEST_CASE("smoothness uses the log-L2 kernel") {
    const EquirectMap a = random_map(4, 5, 3.0), b = random_map(4, 6, 3.0);
    CHECK(loss_smooth(a, a) == 0.0);
    CHECK(loss_smooth(a, b) == loss_log_l2(a, b));
    CHECK_THROWS_AS(loss_smooth(a, random_map(2, 5, 1.0)), Error);
}

TEST_CASE("render loss") {
    const RenderLossSpec spec = small_render_spec();
    const EquirectMap a = random_map(8, 7, 2.0);
    CHECK(loss_render(a, a, spec) == 0.0);
    // both spheres saturate everywhere
    CHECK(loss_render(constant_map(8, 50.0), constant_map(8, 20.0), spec) == 0.0);
    const EquirectMap gt = constant_map(8, 0.2);
    CHECK(loss_render(constant_map(8, 0.4), gt, spec) > loss_render(constant_map(8, 0.3), gt, spec));
}

TEST_CASE("total loss") {
    const RenderLossSpec spec = small_render_spec();
    const std::vector<EquirectMap> p{random_map(8, 1, 2.0), random_map(8, 2, 2.0)};
    const std::vector<EquirectMap> g{random_map(8, 3, 2.0), random_map(8, 4, 2.0)};
    const double l2 = 0.5 * (loss_log_l2(p[0], g[0]) + loss_log_l2(p[1], g[1]));
    const double lr = 0.5 * (loss_render(p[0], g[0], spec) + loss_render(p[1], g[1], spec));
    const double ls = loss_smooth(p[1], p[0]);
    CHECK(total_loss(p, g, {0.0, 0.0}, LossMode::Single, spec) == doctest::Approx(l2));
    CHECK(total_loss(p, g, {0.3, 0.01}, LossMode::Single, spec) == doctest::Approx(l2 + 0.3 * lr));
    CHECK(total_loss(p, g, {0.3, 0.01}, LossMode::Video, spec) == doctest::Approx(l2 + 0.3 * lr + 0.01 * ls));
    CHECK(total_loss(p, p, {0.3, 0.01}, LossMode::Single, spec) == 0.0);
    CHECK_THROWS_AS(total_loss(p, {g[0]}, {}, LossMode::Single, spec), Error);
    const LossWeights defaults;
    CHECK(defaults.render == 0.3);
    CHECK(defaults.smooth == 0.01);
}

TEST_CASE("objective rejects bad targets") {
    const GradCheckCase gc = random_gradcheck_case(3, 4, 1);
    CHECK_THROWS_AS(FitObjective(gc.sglv.config, {}, {}, false, {}, {}), Error);
    CHECK_THROWS_AS(FitObjective(gc.sglv.config, {{{5, 0, 0}, gc.targets[0].map}}, {}, false, {}, {}), Error);
    FitTarget mask{{0, 0, 0}, EquirectMap::mask(4)};
    CHECK_THROWS_AS(FitObjective(gc.sglv.config, {mask}, {}, false, {}, {}), Error);
}

TEST_CASE("fit keeps an exact solution in place") {
    SglvGrid g = random_sglv(testing::random_volume(3, 0).config, 4);
    for (double& v : g.color.data) v = std::max(v, 0.01);
    for (double& v : g.weight.data) v = std::max(v, 0.01);
    for (double& v : g.sharpness.data) v = std::max(v, 0.01);
    const Vec3 probe{0.1, 0.0, -0.1};
    const std::vector<FitTarget> targets{{probe, render_envmap(g, probe, 6)}};
    FitOptions opts;
    opts.iterations = 5;
    opts.render = small_render_spec();
    const FitResult r = fit_sglv(g, Grid(g.config.counts, 1, 0.0), targets, opts);
    CHECK(r.best_loss == 0.0);
    CHECK(r.sglv == g);
}

TEST_CASE("fit reduces loss, respects constraints and is deterministic") {
    const GradCheckCase gc = random_gradcheck_case(4, 6, 5);
    SglvGrid start = SglvGrid::zeros(gc.sglv.config);
    for (double& v : start.alpha.data) v = 0.2;
    for (std::size_t v = 0; v < start.config.voxel_count(); ++v) start.color.set_vec3(v, {0.3, 0.3, 0.3});
    Grid empty(start.config.counts, 1, 0.0);
    empty.at(0) = -1.0;
    FitOptions opts;
    opts.iterations = 30;
    opts.render = small_render_spec();
    const FitResult a = fit_sglv(start, empty, gc.targets, opts);
    CHECK(a.best_loss < 0.8 * a.initial_loss);
    CHECK_NOTHROW(a.sglv.validate());
    CHECK(a.sglv.alpha.at(0) == 0.0);
    CHECK(a.trace.size() == 31);
    CHECK(a.trace.front().iteration == 0);
    double best = a.trace.front().total;
    for (const FitTraceRow& row : a.trace) best = std::min(best, row.total);
    CHECK(best == a.best_loss);
    CHECK(a.trace[a.best_iteration].total == a.best_loss);
    const FitResult b = fit_sglv(start, empty, gc.targets, opts);
    CHECK(b.sglv == a.sglv);
    CHECK(b.best_loss == a.best_loss);
}

TEST_CASE("initial volumes start lobe free") {
    const GradCheckCase gc = random_gradcheck_case(3, 4, 6);
    const InitialVolume init{gc.sglv.config, Grid(gc.sglv.config.counts, 3, 0.2),
                             Grid(gc.sglv.config.counts, 1, 0.3), Grid(gc.sglv.config.counts, 1, 0.0)};
    const SglvGrid g = sglv_from_initial(init);
    for (std::size_t v = 0; v < init.config.voxel_count(); ++v) {
        CHECK(g.axis.vec3(v) == Vec3{0, 0, 1});
        CHECK(g.sharpness.at(v) == 1.0);
        CHECK(g.weight.vec3(v) == Vec3{0, 0, 0});
    }
    FitOptions opts;
    opts.iterations = 0;
    CHECK_THROWS_AS(fit_sglv(init, gc.targets, opts), Error);
}

TEST_CASE("analytic gradients agree with finite differences") {
    for (std::uint64_t seed : {0, 1}) {
        const GradCheckCase gc = random_gradcheck_case(4, 16, seed);
        const GradCheckReport rep = grad_check(gc.sglv, gc.targets);
        CHECK(rep.max_relative_error < 1e-4);
        CHECK(rep.checked == 11u * 64u);
    }
}

TEST_CASE("gradient check error shrinks with the step") {
    const GradCheckCase gc = random_gradcheck_case(3, 8, 4);
    double prev = INFINITY;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        GradCheckOptions o;
        o.eps = eps;
        const double err = grad_check(gc.sglv, gc.targets, o).max_relative_error;
        CHECK(err < prev);
        prev = err;
    }
}

TEST_CASE("zero lobe weights: gradient signs agree with differences") {
    GradCheckCase gc = random_gradcheck_case(3, 8, 7);
    for (double& v : gc.sglv.weight.data) v = 0.0;
    const GradCheckReport rep = grad_check(gc.sglv, gc.targets);
    CHECK(rep.sign_mismatches == 0u);
}

TEST_CASE("alpha at the clip boundary is skipped") {
    GradCheckCase gc = random_gradcheck_case(3, 6, 8);
    gc.sglv.alpha.at(0) = 0.0;
    gc.sglv.alpha.at(1) = 1.0;
    const GradCheckReport rep = grad_check(gc.sglv, gc.targets);
    CHECK(rep.skipped == 2u);
}

TEST_CASE("fit trace CSV") {
    const auto dir = std::filesystem::temp_directory_path() / "sglv_tests" / "trace";
    std::filesystem::create_directories(dir);
    write_fit_trace(dir / "t.csv", {{0, 1.0, 0.5, 1.15}, {1, 0.5, 0.25, 0.575}});
    std::ifstream in(dir / "t.csv");
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(header == "iteration,log_l2,render,total");
    CHECK(row.rfind("0,", 0) == 0);
}
