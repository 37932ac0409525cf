// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "gigcomp/types.hpp"

namespace gigcomp {

// An on-demand request. Rewards are positive, penalties negative, and a
// request is offerable at every step t with arrival_step <= t <= expiry_step.
struct Request {
  int id = -1;
  Vec features;          // x_i, one vector per request type
  int pickup = 0;        // zone id in [0, n_pickup)
  int dropoff = 0;       // zone id in [0, n_dropoff)
  double travel_time = 0.0;
  double reward = 0.0;   // r_i > 0
  double penalty = 0.0;  // beta_i < 0, paid if the request expires unserved
  int arrival_step = 1;
  int expiry_step = 1;
};

// A gig worker with pre-drawn choice noise: one Gumbel draw per request of
// the owning instance plus one draw for the no-selection alternative. The
// pre-draws keep the exogenous randomness identical across policies.
struct GigWorker {
  int id = -1;
  int group = 0;  // d in [0, D)
  int arrival_step = 1;
  std::vector<double> noise_per_request;  // aligned with Instance::requests
  double noise_null = 0.0;
};

// One realization of exogenous randomness for a full episode.
struct Instance {
  int id = -1;
  int horizon = 0;  // T
  std::vector<Request> requests;
  std::vector<GigWorker> workers;
  int n_pickup = 0;
  int n_dropoff = 0;
  int n_locations = 0;
  Mat travel_time_matrix;  // symmetric, zero diagonal
  std::uint64_t seed = 0;

  // True choice-model values cached from the generator: utility(d, i) is the
  // deterministic utility of request i for group d; mu holds the Gumbel
  // scale per group.
  Mat utility;  // D x |requests|
  Vec mu;       // per group, > 0
  double u0 = 0.0;

  int n_groups() const { return static_cast<int>(mu.size()); }
  const Request& request(int id) const { return requests.at(id); }
};

// Feature encoding used for utility models:
// [features, travel_time, one-hot pickup, one-hot dropoff].
Vec request_encoding(const Instance& instance, const Request& request);
Index encoding_dim(const Instance& instance);

// Throws std::invalid_argument if any Request/GigWorker/Instance invariant
// is violated (signs, step ranges, matrix symmetry, noise coverage).
void validate_instance(const Instance& instance);

}  // namespace gigcomp
