// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "gigcomp/choice/mnl.hpp"
#include "gigcomp/core/episode.hpp"
#include "gigcomp/pricing/optimal.hpp"
#include "gigcomp/vfa/network.hpp"

namespace gigcomp::vfa {

// Appendix-style training hyperparameters. c_steps and k_steps count
// environment steps; the learning-rate decay counts gradient updates.
struct TrainConfig {
  double gamma = 0.95;
  int batch_size = 512;
  double lr0 = 1e-5;
  double lr_decay_rate = 1e-2;
  double lr_decay_steps = 10000;
  int epochs = 30;
  long c_steps = 4000;   // env steps between theta updates
  long k_steps = 20000;  // env steps between target syncs, multiple of c
  double huber_delta = 1.0;
  double grad_clip = 0.5;  // global norm, applied before Adam
  double delta0 = 10.0;    // initial exploration stddev
  double delta_decay = 1e-4;  // per environment step
  std::size_t replay_capacity = 200000;
  std::uint64_t seed = 0;

  void validate() const;
};

struct ActiveRequest {
  double reward = 0.0;
  double penalty = 0.0;
  bool expiring = false;
  Vec encoding;
  int loo_row = -1;  // row of this request in succ, -1 when expiring
};

// One stored experience: the observed post-decision state at t-1 and the
// successor pre-decision state at t it evolved into.
struct Transition {
  StateFeatures prev;
  int t = 1;
  bool terminal = false;  // t == horizon: future value is exactly zero
  double beta_expiring_sum = 0.0;
  bool has_worker = false;
  int group = 0;
  std::vector<ActiveRequest> active;
  StateFeatures succ;  // surviving request set R' at t
};

Transition make_transition(StateFeatures prev_post, const PreState& state,
                           const Instance& instance);

// Estimated optimal value of the successor pre-decision state, evaluated
// with the target weights and the Lemma-3 closed form under discounted
// opportunity costs.
double bellman_target(const Transition& transition, const Weights& target,
                      const NetworkDims& dims,
                      const std::map<int, mnl::MnlParams>& estimates,
                      double gamma);

struct DecisionPrices {
  std::vector<int> active;  // request order the vectors below align with
  pricing::PricingOutput prices;
};

// Closed-form prices for a pre-decision state with a worker present, with
// opportunity costs taken from gamma-scaled leave-one-out value differences
// of the given weights.
DecisionPrices decision_prices(const Weights& weights,
                               const NetworkDims& dims,
                               const Instance& instance, const PreState& state,
                               const mnl::MnlParams& group_params,
                               double gamma);

struct EpochLog {
  int epoch = 0;
  long env_steps = 0;
  long updates = 0;
  double mean_loss = 0.0;
  double val_score = 0.0;
};

struct TrainResult {
  ValueNetwork net;  // best-validation snapshot
  int best_epoch = 0;
  double best_score = 0.0;
  std::vector<EpochLog> log;
};

// Approximate value iteration on the post-decision value function: episodes
// under the Gaussian-perturbed closed-form policy fill a replay buffer; the
// main weights take one Huber batch step per c_steps environment steps with
// targets from the periodically synced target copy; the best snapshot on
// validation total reward is returned. Deterministic given config.seed.
TrainResult train(const std::vector<Instance>& train_instances,
                  const std::vector<Instance>& val_instances,
                  const std::map<int, mnl::MnlParams>& estimates,
                  const TrainConfig& config);

}  // namespace gigcomp::vfa
