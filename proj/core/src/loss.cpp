// Copyright 2026 The SGLV Authors
// SPDX-License-Identifier: Apache-2.0

#include "sglv/loss.hpp"

#include <cmath>

namespace sglv {

namespace {

void check_pair(const EquirectMap& pred, const EquirectMap& gt, const char* who) {
    if (!pred.same_shape(gt)) throw Error(std::string(who) + ": map shapes differ");
    for (double v : pred.image().data())
        if (!(v >= 0.0)) throw Error(std::string(who) + ": prediction has negative or NaN values");
    for (double v : gt.image().data())
        if (!(v >= 0.0)) throw Error(std::string(who) + ": target has negative or NaN values");
}

}  // namespace

double loss_log_l2(const EquirectMap& pred, const EquirectMap& gt) {
    check_pair(pred, gt, "loss_log_l2");
    const auto p = pred.image().data();
    const auto g = gt.image().data();
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double d = std::log1p(p[i]) - std::log1p(g[i]);
        sum += d * d;
    }
    return p.empty() ? 0.0 : sum / static_cast<double>(p.size());
}

Image loss_log_l2_grad(const EquirectMap& pred, const EquirectMap& gt) {
    check_pair(pred, gt, "loss_log_l2_grad");
    Image out(pred.width(), pred.height(), pred.channels());
    const auto p = pred.image().data();
    const auto g = gt.image().data();
    const auto o = out.data();
    const double scale = 2.0 / static_cast<double>(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) o[i] = scale * (std::log1p(p[i]) - std::log1p(g[i])) / (1.0 + p[i]);
    return out;
}

double loss_l2(const EquirectMap& pred, const EquirectMap& gt) {
    if (!pred.same_shape(gt)) throw Error("loss_l2: map shapes differ");
    const auto p = pred.image().data();
    const auto g = gt.image().data();
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) sum += (p[i] - g[i]) * (p[i] - g[i]);
    return p.empty() ? 0.0 : sum / static_cast<double>(p.size());
}

Image loss_l2_grad(const EquirectMap& pred, const EquirectMap& gt) {
    if (!pred.same_shape(gt)) throw Error("loss_l2_grad: map shapes differ");
    Image out(pred.width(), pred.height(), pred.channels());
    const auto p = pred.image().data();
    const auto g = gt.image().data();
    const auto o = out.data();
    const double scale = 2.0 / static_cast<double>(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) o[i] = scale * (p[i] - g[i]);
    return out;
}

double loss_smooth(const EquirectMap& curr, const EquirectMap& prev) {
    if (!curr.same_shape(prev)) throw Error("loss_smooth: map shapes differ");
    return loss_log_l2(curr, prev);
}

}  // namespace sglv
