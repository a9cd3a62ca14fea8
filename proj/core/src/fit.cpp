// Copyright 2026 The SGLV Authors
// SPDX-License-Identifier: Apache-2.0

#include "sglv/fit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>

#include "sglv/loss.hpp"

namespace sglv {

namespace {

// Mean squared difference of clamped sphere renders, plus d/dpred when requested.
double clamped_sphere_loss(const HdrImage& pred, const HdrImage& gt, Image* grad) {
    const auto p = pred.data();
    const auto g = gt.data();
    const double n = static_cast<double>(p.size());
    double sum = 0.0;
    if (grad) *grad = Image(pred.width(), pred.height(), pred.channels());
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double d = std::min(p[i], 1.0) - std::min(g[i], 1.0);
        sum += d * d;
        if (grad && p[i] < 1.0) grad->data()[i] = 2.0 * d / n;
    }
    return sum / n;
}

void check_hdr(const EquirectMap& m, const char* what) {
    if (m.kind() != MapKind::Hdr || m.channels() != 3) throw Error(std::string(what) + ": map must be HDR");
}

}  // namespace

double loss_render(const EquirectMap& pred, const EquirectMap& gt, const RenderLossSpec& spec) {
    check_hdr(pred, "loss_render");
    check_hdr(gt, "loss_render");
    if (!pred.same_shape(gt)) throw Error("loss_render: map shapes differ");
    const SpherePlan plan(pred.height(), spec.brdf, spec.sphere);
    return clamped_sphere_loss(plan.apply(pred), plan.apply(gt), nullptr);
}

double total_loss(const std::vector<EquirectMap>& preds, const std::vector<EquirectMap>& gts,
                  const LossWeights& weights, LossMode mode, const RenderLossSpec& spec) {
    if (preds.size() != gts.size()) throw Error("total_loss: prediction and target counts differ");
    if (preds.empty()) throw Error("total_loss: empty lists");
    double sum = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        sum += loss_log_l2(preds[i], gts[i]);
        if (weights.render != 0.0) sum += weights.render * loss_render(preds[i], gts[i], spec);
    }
    double total = sum / static_cast<double>(preds.size());
    if (mode == LossMode::Video && preds.size() > 1 && weights.smooth != 0.0) {
        double smooth = 0.0;
        for (std::size_t i = 1; i < preds.size(); ++i) smooth += loss_smooth(preds[i], preds[i - 1]);
        total += weights.smooth * smooth / static_cast<double>(preds.size() - 1);
    }
    return total;
}

FitObjective::FitObjective(const VolumeConfig& config, std::vector<FitTarget> targets, const LossWeights& weights,
                           bool render_loss, const RenderLossSpec& render, const RenderSettings& settings)
    : targets_(std::move(targets)), weights_(weights), render_loss_(render_loss && weights.render != 0.0) {
    if (targets_.empty()) throw Error("fit: at least one target is required");
    for (const FitTarget& t : targets_) {
        check_hdr(t.map, "fit");
        if (!config.contains_world(t.position)) throw Error("fit: target position lies outside the volume");
    }
    settings_ = settings;
    settings_.early_out_transmittance = 0.0;
    if (render_loss_) {
        for (const FitTarget& t : targets_) {
            plans_.emplace_back(t.map.height(), render.brdf, render.sphere);
            gt_spheres_.push_back(plans_.back().apply(t.map));
        }
    }
}

ObjectiveValue FitObjective::evaluate(const SglvGrid& sglv, SglvGradient* grad) const {
    ObjectiveValue v;
    const double inv_n = 1.0 / static_cast<double>(targets_.size());
    for (std::size_t i = 0; i < targets_.size(); ++i) {
        const FitTarget& t = targets_[i];
        const EquirectMap pred = render_envmap(sglv, t.position, t.map.height(), settings_);
        const double l2 = loss_log_l2(pred, t.map);
        double lr = 0.0;
        Image upstream;
        if (grad) upstream = loss_log_l2_grad(pred, t.map);
        if (render_loss_) {
            Image sphere_grad;
            lr = clamped_sphere_loss(plans_[i].apply(pred), gt_spheres_[i], grad ? &sphere_grad : nullptr);
            if (grad) {
                const Image env_grad = plans_[i].apply_transpose(sphere_grad);
                auto u = upstream.data();
                const auto e = env_grad.data();
                for (std::size_t k = 0; k < u.size(); ++k) u[k] += weights_.render * e[k];
            }
        }
        if (grad) {
            for (double& x : upstream.data()) x *= inv_n;
            backprop_envmap(sglv, t.position, upstream, settings_, *grad);
        }
        v.log_l2 += l2 * inv_n;
        v.render += lr * inv_n;
    }
    v.total = v.log_l2 + (render_loss_ ? weights_.render * v.render : 0.0);
    return v;
}

namespace {

// Unconstrained parameters, one vector per grid with the grid's layout.
struct Params {
    std::vector<double> color, alpha, weight, sharpness, axis;

    std::array<std::vector<double>*, 5> fields() { return {&color, &alpha, &weight, &sharpness, &axis}; }
};

Params to_params(const SglvGrid& g, double alpha_floor, double value_floor) {
    Params p;
    auto soft = [&](const std::vector<double>& src) {
        std::vector<double> out(src.size());
        for (std::size_t i = 0; i < src.size(); ++i) out[i] = softplus_inverse(std::max(src[i], value_floor));
        return out;
    };
    p.color = soft(g.color.data);
    p.weight = soft(g.weight.data);
    p.sharpness = soft(g.sharpness.data);
    p.alpha.resize(g.alpha.data.size());
    for (std::size_t i = 0; i < p.alpha.size(); ++i)
        p.alpha[i] = logit(std::clamp(g.alpha.data[i], alpha_floor, 1.0 - alpha_floor));
    p.axis = g.axis.data;
    return p;
}

SglvGrid from_params(const Params& p, const SglvGrid& shape) {
    SglvGrid g = shape;
    for (std::size_t i = 0; i < p.color.size(); ++i) g.color.data[i] = softplus(p.color[i]);
    for (std::size_t i = 0; i < p.weight.size(); ++i) g.weight.data[i] = softplus(p.weight[i]);
    for (std::size_t i = 0; i < p.sharpness.size(); ++i) g.sharpness.data[i] = softplus(p.sharpness[i]);
    for (std::size_t i = 0; i < p.alpha.size(); ++i) g.alpha.data[i] = sigmoid(p.alpha[i]);
    const std::size_t n = g.config.voxel_count();
    for (std::size_t v = 0; v < n; ++v) {
        const Vec3 q{p.axis[3 * v], p.axis[3 * v + 1], p.axis[3 * v + 2]};
        const double len = length(q);
        g.axis.set_vec3(v, len > 0.0 ? q / len : SglvGrid::kDefaultAxis);
    }
    return g;
}

// Chain rule from grid gradients (after clearing) back to unconstrained parameters.
Params param_gradient(const SglvGradient& gg, const Params& p, const Grid& empty) {
    Params out;
    const std::size_t n = empty.voxel_count();
    auto soft = [&](const std::vector<double>& raw, const Grid& g) {
        std::vector<double> r(raw.size());
        const int ch = g.channels;
        for (std::size_t v = 0; v < n; ++v) {
            const double keep = 1.0 + empty.at(v);
            for (int c = 0; c < ch; ++c) {
                const std::size_t i = v * ch + c;
                r[i] = g.data[i] * keep * sigmoid(raw[i]);
            }
        }
        return r;
    };
    out.color = soft(p.color, gg.color);
    out.weight = soft(p.weight, gg.weight);
    out.sharpness = soft(p.sharpness, gg.sharpness);
    out.alpha.resize(p.alpha.size());
    for (std::size_t v = 0; v < n; ++v) {
        const double a = sigmoid(p.alpha[v]);
        out.alpha[v] = gg.alpha.data[v] * (1.0 + empty.at(v)) * a * (1.0 - a);
    }
    out.axis.assign(p.axis.size(), 0.0);
    for (std::size_t v = 0; v < n; ++v) {
        const double keep = 1.0 + empty.at(v);
        if (keep == 0.0) continue;
        const Vec3 q{p.axis[3 * v], p.axis[3 * v + 1], p.axis[3 * v + 2]};
        const double len = length(q);
        if (len == 0.0) continue;
        const Vec3 s = q / len;
        const Vec3 gs = keep * gg.axis.vec3(v);
        const Vec3 gq = (gs - dot(gs, s) * s) / len;
        out.axis[3 * v] = gq.x;
        out.axis[3 * v + 1] = gq.y;
        out.axis[3 * v + 2] = gq.z;
    }
    return out;
}

struct Adam {
    double lr, b1, b2, eps;
    std::array<std::vector<double>, 5> m, v;
    int t = 0;

    void step(Params& p, Params& g) {
        ++t;
        const double c1 = 1.0 - std::pow(b1, t);
        const double c2 = 1.0 - std::pow(b2, t);
        auto pf = p.fields();
        auto gf = g.fields();
        for (int f = 0; f < 5; ++f) {
            std::vector<double>& x = *pf[f];
            const std::vector<double>& d = *gf[f];
            if (m[f].empty()) {
                m[f].assign(x.size(), 0.0);
                v[f].assign(x.size(), 0.0);
            }
            for (std::size_t i = 0; i < x.size(); ++i) {
                m[f][i] = b1 * m[f][i] + (1.0 - b1) * d[i];
                v[f][i] = b2 * v[f][i] + (1.0 - b2) * d[i] * d[i];
                x[i] -= lr * (m[f][i] / c1) / (std::sqrt(v[f][i] / c2) + eps);
            }
        }
    }
};

}  // namespace

FitResult fit_sglv(const SglvGrid& start, const Grid& empty, const std::vector<FitTarget>& targets,
                   const FitOptions& options) {
    if (options.iterations < 1) throw Error("fit_sglv: iteration budget must be at least 1");
    start.config.validate();
    RenderLossSpec render = options.render;
    render.sphere.seed = options.seed;
    const FitObjective objective(start.config, targets, options.weights, options.render_loss, render,
                                 options.settings);

    FitResult result;
    result.sglv = clear_near_surface(start, empty);
    const ObjectiveValue v0 = objective.evaluate(result.sglv);
    result.trace.push_back({0, v0.log_l2, v0.render, v0.total});
    result.initial_loss = v0.total;
    result.best_loss = v0.total;

    if (!(options.alpha_floor > 0.0 && options.alpha_floor < 0.5 && options.value_floor > 0.0))
        throw Error("fit_sglv: parameter floors out of range");
    Params params = to_params(start, options.alpha_floor, options.value_floor);
    Adam adam{options.learning_rate, options.beta1, options.beta2, options.adam_epsilon, {}, {}, 0};
    for (int it = 1; it <= options.iterations; ++it) {
        const SglvGrid current = clear_near_surface(from_params(params, start), empty);
        SglvGradient grad = SglvGradient::zeros(start.config);
        const ObjectiveValue v = objective.evaluate(current, &grad);
        // the loss recorded at row `it` belongs to the iterate after it - 1 steps
        if (it > 1) {
            result.trace.push_back({it - 1, v.log_l2, v.render, v.total});
            if (v.total < result.best_loss) {
                result.best_loss = v.total;
                result.best_iteration = it - 1;
                result.sglv = current;
            }
        }
        Params g = param_gradient(grad, params, empty);
        adam.step(params, g);
        for (std::size_t k = 0; k + 2 < params.axis.size(); k += 3) {
            const Vec3 q{params.axis[k], params.axis[k + 1], params.axis[k + 2]};
            const double len = length(q);
            if (len > 0.0) {
                params.axis[k] /= len;
                params.axis[k + 1] /= len;
                params.axis[k + 2] /= len;
            }
        }
    }
    const SglvGrid last = clear_near_surface(from_params(params, start), empty);
    const ObjectiveValue vl = objective.evaluate(last);
    result.trace.push_back({options.iterations, vl.log_l2, vl.render, vl.total});
    if (vl.total < result.best_loss) {
        result.best_loss = vl.total;
        result.best_iteration = options.iterations;
        result.sglv = last;
    }
    return result;
}

FitResult fit_sglv(const InitialVolume& init, const std::vector<FitTarget>& targets, const FitOptions& options) {
    return fit_sglv(sglv_from_initial(init), init.empty, targets, options);
}

void write_fit_trace(const std::filesystem::path& path, const std::vector<FitTraceRow>& trace) {
    std::ofstream out(path);
    if (!out) throw Error("write_fit_trace: cannot open " + path.string());
    out << "iteration,log_l2,render,total\n" << std::setprecision(17);
    for (const FitTraceRow& r : trace) out << r.iteration << ',' << r.log_l2 << ',' << r.render << ',' << r.total << '\n';
}

GradCheckReport grad_check(const SglvGrid& sglv, const std::vector<FitTarget>& targets,
                           const GradCheckOptions& options) {
    const FitObjective objective(sglv.config, targets, options.weights, options.render_loss, options.render,
                                 options.settings);
    SglvGradient analytic = SglvGradient::zeros(sglv.config);
    objective.evaluate(sglv, &analytic);

    GradCheckReport report;
    SglvGrid probe = sglv;
    auto probe_fields = probe.fields();
    const auto base_fields = sglv.fields();
    const auto grad_fields = analytic.fields();
    for (int f = 0; f < 5; ++f) {
        std::vector<double>& values = probe_fields[f]->data;
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double x = base_fields[f]->data[i];
            if (f == 1 && (x == 0.0 || x == 1.0)) {
                ++report.skipped;
                continue;
            }
            values[i] = x + options.eps;
            const double up = objective.evaluate(probe).total;
            values[i] = x - options.eps;
            const double down = objective.evaluate(probe).total;
            values[i] = x;
            const double numeric = (up - down) / (2.0 * options.eps);
            const double a = grad_fields[f]->data[i];
            const double denom = std::max({std::abs(a), std::abs(numeric), options.denominator_floor});
            report.max_relative_error = std::max(report.max_relative_error, std::abs(a - numeric) / denom);
            if (std::max(std::abs(a), std::abs(numeric)) > options.denominator_floor &&
                std::signbit(a) != std::signbit(numeric))
                ++report.sign_mismatches;
            ++report.checked;
        }
    }
    return report;
}

SglvGrid random_sglv(const VolumeConfig& config, std::uint64_t seed) {
    config.validate();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    SglvGrid g = SglvGrid::zeros(config);
    for (double& v : g.color.data) v = unit(rng);
    for (double& v : g.alpha.data) v = 0.05 + 0.55 * unit(rng);
    for (double& v : g.weight.data) v = unit(rng);
    for (double& v : g.sharpness.data) v = 8.0 * unit(rng);
    for (std::size_t v = 0; v < config.voxel_count(); ++v) {
        Vec3 a;
        do a = {normal(rng), normal(rng), normal(rng)};
        while (length(a) < 1e-3);
        g.axis.set_vec3(v, normalize(a));
    }
    return g;
}

GradCheckCase random_gradcheck_case(int size, int height, std::uint64_t seed) {
    VolumeConfig config;
    config.lo = {-1.0, -1.0, -1.0};
    config.hi = {1.0, 1.0, 1.0};
    config.counts = {size, size, size};
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> offset(-0.5, 0.5);
    const Vec3 probe{offset(rng), offset(rng), offset(rng)};
    GradCheckCase c;
    c.sglv = random_sglv(config, seed * 2 + 1);
    const SglvGrid other = random_sglv(config, seed * 2 + 2);
    c.targets.push_back({probe, render_envmap(other, probe, height)});
    return c;
}

}  // namespace sglv
