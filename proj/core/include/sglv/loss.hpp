// Copyright 2026 The SGLV Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "sglv/equirect.hpp"

namespace sglv {

/// Mean over pixels and channels of (log(pred+1) - log(gt+1))^2.
/// Throws on shape mismatch or negative values.
double loss_log_l2(const EquirectMap& pred, const EquirectMap& gt);
/// d loss_log_l2 / d pred, laid out like pred.
Image loss_log_l2_grad(const EquirectMap& pred, const EquirectMap& gt);

/// Mean squared difference, used for plain-L2 gradient checks.
double loss_l2(const EquirectMap& pred, const EquirectMap& gt);
Image loss_l2_grad(const EquirectMap& pred, const EquirectMap& gt);

/// Consecutive-frame smoothness: the log-L2 kernel between two predictions.
double loss_smooth(const EquirectMap& curr, const EquirectMap& prev);

}  // namespace sglv
