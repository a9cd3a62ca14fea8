// Copyright 2026 The SGLV Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "sglv/camera.hpp"
#include "sglv/fit.hpp"
#include "sglv/parallel.hpp"
#include "sglv/raytrace.hpp"
#include "sglv/shading.hpp"

namespace {

sglv::SglvGrid full_volume() {
    const sglv::Camera cam = sglv::Camera::look_at({0, 0, 0}, {0, 0, -1}, {0, 1, 0}, 320, 240, 60.0);
    sglv::SglvGrid g = sglv::random_sglv(sglv::make_volume_config(4.0, cam), 3);
    for (double& a : g.alpha.data) a *= 0.01;
    return g;
}

void BM_RenderEnvmap(benchmark::State& state) {
    static const sglv::SglvGrid g = full_volume();
    const int saved = sglv::thread_count();
    sglv::set_thread_count(static_cast<int>(state.range(1)));
    for (auto _ : state) benchmark::DoNotOptimize(sglv::render_envmap(g, {0, 0, -2}, static_cast<int>(state.range(0))));
    sglv::set_thread_count(saved);
}
BENCHMARK(BM_RenderEnvmap)->Args({60, 1})->Args({120, 1})->Args({120, 4})->Unit(benchmark::kMillisecond);

void BM_EnvmapGradient(benchmark::State& state) {
    const sglv::GradCheckCase c = sglv::random_gradcheck_case(static_cast<int>(state.range(0)), 16, 0);
    for (auto _ : state)
        benchmark::DoNotOptimize(sglv::envmap_loss_gradients(c.sglv, c.targets[0].position, c.targets[0].map));
}
BENCHMARK(BM_EnvmapGradient)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_RenderSphere(benchmark::State& state) {
    sglv::EquirectMap env = sglv::EquirectMap::hdr(64);
    for (double& v : env.image().data()) v = 1.0;
    const sglv::SamplingMode mode = state.range(0) ? sglv::SamplingMode::Uniform : sglv::SamplingMode::Importance;
    for (auto _ : state)
        benchmark::DoNotOptimize(sglv::render_sphere(env, sglv::MicrofacetBrdf{}, {32, 64, mode, 0}));
}
BENCHMARK(BM_RenderSphere)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
