// SPDX-License-Identifier: Apache-2.0
#include "gigcomp/vfa/features.hpp"

#include <stdexcept>

namespace gigcomp::vfa {

Index request_feature_dim(const Instance& instance) {
  const Index m = instance.requests.empty()
                      ? 0
                      : instance.requests.front().features.size();
  return m + 5 + instance.n_pickup + instance.n_dropoff;
}

StateFeatures featurize(const std::vector<int>& post_state,
                        const Instance& instance, int t) {
  const double T = static_cast<double>(instance.horizon);
  StateFeatures f;
  f.t_norm = static_cast<double>(t) / T;
  f.ids = post_state;
  const Index n = static_cast<Index>(post_state.size());
  f.requests = Mat::Zero(n, request_feature_dim(instance));
  f.tte_norm = Vec::Zero(n);
  for (Index row = 0; row < n; ++row) {
    const Request& r = instance.request(post_state[row]);
    if (r.expiry_step < t)
      throw std::invalid_argument("featurize: request expired before t");
    const double tte = static_cast<double>(r.expiry_step - t);
    Index k = 0;
    f.requests.row(row).head(r.features.size()) = r.features.transpose();
    k += r.features.size();
    f.requests(row, k++) = r.reward;
    f.requests(row, k++) = r.penalty;
    f.requests(row, k++) = tte / T;
    f.requests(row, k++) = tte < 3.0 ? 1.0 : 0.0;
    f.requests(row, k++) = r.travel_time;
    f.requests(row, k + r.pickup) = 1.0;
    k += instance.n_pickup;
    f.requests(row, k + r.dropoff) = 1.0;
    f.tte_norm[row] = tte / T;
  }
  return f;
}

}  // namespace gigcomp::vfa
