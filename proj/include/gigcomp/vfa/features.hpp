// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "gigcomp/core/instance.hpp"

namespace gigcomp::vfa {

// Set encoding of a post-decision request state at step t. Per-request rows
// are [x_i, reward, penalty, tte/T, urgency, travel_time, pickup one-hot,
// dropoff one-hot]; globals are [count, min tte/T, t/T], recomputable for
// leave-one-out evaluation.
struct StateFeatures {
  Mat requests;   // one row per request
  Vec tte_norm;   // time-to-expiry / T per request
  double t_norm = 0.0;
  std::vector<int> ids;  // request ids, row-aligned

  Index count() const { return requests.rows(); }

  Vec globals(Index excluded_row = -1) const {
    Vec g = Vec::Zero(3);
    double min_tte = 0.0;
    Index n = 0;
    for (Index i = 0; i < tte_norm.size(); ++i) {
      if (i == excluded_row) continue;
      min_tte = (n == 0) ? tte_norm[i] : std::min(min_tte, tte_norm[i]);
      ++n;
    }
    g[0] = static_cast<double>(n);
    g[1] = min_tte;
    g[2] = t_norm;
    return g;
  }
};

constexpr Index kGlobalsDim = 3;

Index request_feature_dim(const Instance& instance);

// Encodes the given request set as the post-decision state formed at step t.
StateFeatures featurize(const std::vector<int>& post_state,
                        const Instance& instance, int t);

}  // namespace gigcomp::vfa
