// SPDX-License-Identifier: Apache-2.0
#include "gigcomp/core/instance.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gigcomp {

Vec request_encoding(const Instance& instance, const Request& request) {
  Vec enc = Vec::Zero(encoding_dim(instance));
  Index k = 0;
  enc.head(request.features.size()) = request.features;
  k += request.features.size();
  enc[k++] = request.travel_time;
  enc[k + request.pickup] = 1.0;
  k += instance.n_pickup;
  enc[k + request.dropoff] = 1.0;
  return enc;
}

Index encoding_dim(const Instance& instance) {
  const Index m = instance.requests.empty()
                      ? 0
                      : instance.requests.front().features.size();
  return m + 1 + instance.n_pickup + instance.n_dropoff;
}

namespace {

[[noreturn]] void fail(const std::string& what) {
  throw std::invalid_argument("instance invariant violated: " + what);
}

}  // namespace

void validate_instance(const Instance& instance) {
  const int T = instance.horizon;
  if (T <= 0) fail("horizon must be positive");
  for (std::size_t i = 0; i < instance.requests.size(); ++i) {
    const Request& r = instance.requests[i];
    if (r.id != static_cast<int>(i)) fail("request ids must be 0..N-1 in order");
    if (!(r.reward > 0)) fail("reward must be > 0");
    if (!(r.penalty < 0)) fail("penalty must be < 0");
    if (r.travel_time < 0) fail("travel_time must be >= 0");
    if (r.arrival_step < 1 || r.arrival_step > T) fail("request arrival outside [1,T]");
    if (r.expiry_step < r.arrival_step || r.expiry_step > T)
      fail("expiry must lie in [arrival,T]");
    if (r.pickup < 0 || r.pickup >= instance.n_pickup) fail("pickup zone out of range");
    if (r.dropoff < 0 || r.dropoff >= instance.n_dropoff) fail("dropoff zone out of range");
  }
  for (std::size_t j = 0; j < instance.workers.size(); ++j) {
    const GigWorker& w = instance.workers[j];
    if (w.id != static_cast<int>(j)) fail("worker ids must be 0..M-1 in order");
    if (w.arrival_step < 1 || w.arrival_step > T) fail("worker arrival outside [1,T]");
    if (w.group < 0 || w.group >= instance.n_groups()) fail("worker group out of range");
    if (w.noise_per_request.size() != instance.requests.size())
      fail("worker noise must cover every request");
  }
  const Mat& tt = instance.travel_time_matrix;
  if (tt.rows() != instance.n_locations || tt.cols() != instance.n_locations)
    fail("travel_time_matrix shape");
  for (Index a = 0; a < tt.rows(); ++a) {
    if (tt(a, a) != 0.0) fail("travel_time_matrix diagonal must be zero");
    for (Index b = 0; b < tt.cols(); ++b) {
      if (tt(a, b) < 0) fail("travel times must be nonnegative");
      if (tt(a, b) != tt(b, a)) fail("travel_time_matrix must be symmetric");
    }
  }
  if (instance.utility.rows() != instance.n_groups() ||
      instance.utility.cols() != static_cast<Index>(instance.requests.size()))
    fail("utility cache shape");
  if ((instance.mu.array() <= 0).any()) fail("mu must be positive");
}

}  // namespace gigcomp
