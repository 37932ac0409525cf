// SPDX-License-Identifier: Apache-2.0
#include "gigcomp/vfa/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gigcomp/util/rng.hpp"

namespace gigcomp::vfa {

void TrainConfig::validate() const {
  if (gamma <= 0 || batch_size <= 0 || lr0 <= 0 || epochs < 0 ||
      c_steps <= 0 || k_steps <= 0 || huber_delta <= 0 || grad_clip <= 0 ||
      delta0 < 0 || delta_decay < 0 || replay_capacity == 0)
    throw std::invalid_argument("train config values must be positive");
  if (k_steps % c_steps != 0)
    throw std::invalid_argument("k_steps must be a multiple of c_steps");
}

namespace {

pricing::PricingInput build_pricing_input(
    const std::vector<ActiveRequest>& active, const mnl::MnlParams& params,
    double gamma, double v_full, const Vec& v_without) {
  const Index n = static_cast<Index>(active.size());
  pricing::PricingInput in;
  in.rewards = Vec(n);
  in.penalties = Vec(n);
  in.utilities = Vec(n);
  in.opportunity_cost = Vec(n);
  in.expiring.resize(n);
  in.mu = params.mu;
  in.u0 = params.u0;
  for (Index i = 0; i < n; ++i) {
    const ActiveRequest& r = active[i];
    in.rewards[i] = r.reward;
    in.penalties[i] = r.penalty;
    in.expiring[i] = r.expiring;
    in.utilities[i] = params.weights.dot(r.encoding);
    in.opportunity_cost[i] =
        r.expiring ? 0.0 : gamma * (v_full - v_without[r.loo_row]);
  }
  return in;
}

const mnl::MnlParams& group_estimate(
    const std::map<int, mnl::MnlParams>& estimates, int group) {
  const auto it = estimates.find(group);
  if (it == estimates.end())
    throw std::invalid_argument("no MNL estimate for worker group " +
                                std::to_string(group));
  return it->second;
}

}  // namespace

Transition make_transition(StateFeatures prev_post, const PreState& state,
                           const Instance& instance) {
  Transition tr;
  tr.prev = std::move(prev_post);
  tr.t = state.step;
  tr.terminal = state.step == instance.horizon;
  tr.has_worker = state.worker.has_value();
  tr.group = tr.has_worker ? instance.workers[*state.worker].group : 0;

  std::vector<int> surviving;
  for (int id : state.active) {
    const Request& r = instance.request(id);
    ActiveRequest a;
    a.reward = r.reward;
    a.penalty = r.penalty;
    a.expiring = r.expiry_step == state.step;
    a.encoding = request_encoding(instance, r);
    if (a.expiring) {
      tr.beta_expiring_sum += r.penalty;
    } else {
      a.loo_row = static_cast<int>(surviving.size());
      surviving.push_back(id);
    }
    tr.active.push_back(std::move(a));
  }
  tr.succ = featurize(surviving, instance, state.step);
  return tr;
}

double bellman_target(const Transition& transition, const Weights& target,
                      const NetworkDims& dims,
                      const std::map<int, mnl::MnlParams>& estimates,
                      double gamma) {
  double v_full = 0.0;
  Vec v_without = Vec::Zero(transition.succ.count());
  if (!transition.terminal) {
    const LeaveOneOut loo = forward_leave_one_out(target, dims, transition.succ);
    v_full = loo.full;
    v_without = loo.without;
  }
  if (!transition.has_worker)
    return transition.beta_expiring_sum + gamma * v_full;

  const mnl::MnlParams& params = group_estimate(estimates, transition.group);
  const pricing::PricingInput in =
      build_pricing_input(transition.active, params, gamma, v_full, v_without);
  const double phi_star = pricing::optimal_compensations(in).phi_star;
  return phi_star + gamma * v_full + transition.beta_expiring_sum;
}

DecisionPrices decision_prices(const Weights& weights,
                               const NetworkDims& dims,
                               const Instance& instance, const PreState& state,
                               const mnl::MnlParams& group_params,
                               double gamma) {
  DecisionPrices out;
  out.active = state.active;
  std::vector<ActiveRequest> active;
  std::vector<int> surviving;
  for (int id : state.active) {
    const Request& r = instance.request(id);
    ActiveRequest a;
    a.reward = r.reward;
    a.penalty = r.penalty;
    a.expiring = r.expiry_step == state.step;
    a.encoding = request_encoding(instance, r);
    if (!a.expiring) {
      a.loo_row = static_cast<int>(surviving.size());
      surviving.push_back(id);
    }
    active.push_back(std::move(a));
  }
  const StateFeatures succ = featurize(surviving, instance, state.step);
  double v_full = 0.0;
  Vec v_without = Vec::Zero(succ.count());
  if (state.step < instance.horizon) {
    const LeaveOneOut loo = forward_leave_one_out(weights, dims, succ);
    v_full = loo.full;
    v_without = loo.without;
  }
  const pricing::PricingInput in =
      build_pricing_input(active, group_params, gamma, v_full, v_without);
  out.prices = pricing::optimal_compensations(in);
  return out;
}

namespace {

class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {}

  void push(Transition tr) {
    if (data_.size() < capacity_) {
      data_.push_back(std::move(tr));
    } else {
      data_[next_] = std::move(tr);
    }
    next_ = (next_ + 1) % capacity_;
  }

  std::size_t size() const { return data_.size(); }

  const Transition& sample(Rng& rng) const {
    return data_[rng.uniform_int(data_.size())];
  }

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<Transition> data_;
};

class Adam {
 public:
  Adam(Index n, double lr0, double decay_rate, double decay_steps)
      : m_(Vec::Zero(n)),
        v_(Vec::Zero(n)),
        lr0_(lr0),
        decay_rate_(decay_rate),
        decay_steps_(decay_steps) {}

  void step(Vec& params, CRef<Vec> grad) {
    ++t_;
    const double lr =
        lr0_ * std::pow(decay_rate_, static_cast<double>(t_ - 1) / decay_steps_);
    m_ = 0.9 * m_ + 0.1 * grad;
    v_ = 0.999 * v_.array() + 0.001 * grad.array().square();
    const double bc1 = 1.0 - std::pow(0.9, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(0.999, static_cast<double>(t_));
    params -= (lr * (m_ / bc1).array() /
               ((v_ / bc2).array().sqrt() + 1e-8))
                  .matrix();
  }

 private:
  Vec m_, v_;
  long t_ = 0;
  double lr0_, decay_rate_, decay_steps_;
};

double exploration_std(const TrainConfig& cfg, long env_steps) {
  return std::max(0.0, cfg.delta0 - static_cast<double>(env_steps) *
                                        cfg.delta_decay);
}

// Greedy closed-form policy on fixed weights; used for validation scoring.
class GreedyValuePolicy : public Policy {
 public:
  GreedyValuePolicy(const Weights& w, const NetworkDims& dims,
                    const std::map<int, mnl::MnlParams>& estimates,
                    double gamma)
      : w_(w), dims_(dims), estimates_(estimates), gamma_(gamma) {}

  CompensationDecision decide(const PreState& state,
                              const Instance& instance) override {
    CompensationDecision d;
    if (!state.worker) {
      for (int id : state.active) d.comp[id] = 0.0;
      return d;
    }
    const int group = instance.workers[*state.worker].group;
    const DecisionPrices dp = decision_prices(
        w_, dims_, instance, state, group_estimate(estimates_, group), gamma_);
    for (std::size_t k = 0; k < dp.active.size(); ++k)
      d.comp[dp.active[k]] = dp.prices.comps[static_cast<Index>(k)];
    return d;
  }

 private:
  const Weights& w_;
  const NetworkDims& dims_;
  const std::map<int, mnl::MnlParams>& estimates_;
  double gamma_;
};

double validation_score(const Weights& w, const NetworkDims& dims,
                        const std::vector<Instance>& val_instances,
                        const std::map<int, mnl::MnlParams>& estimates,
                        double gamma) {
  if (val_instances.empty()) return 0.0;
  GreedyValuePolicy policy(w, dims, estimates, gamma);
  double total = 0.0;
  for (const Instance& inst : val_instances)
    total += run_episode(inst, policy).total_reward;
  return total / static_cast<double>(val_instances.size());
}

}  // namespace

TrainResult train(const std::vector<Instance>& train_instances,
                  const std::vector<Instance>& val_instances,
                  const std::map<int, mnl::MnlParams>& estimates,
                  const TrainConfig& config) {
  config.validate();
  if (train_instances.empty())
    throw std::invalid_argument("train: no training instances");

  NetworkDims dims;
  dims.request_dim = request_feature_dim(train_instances.front());
  for (const Instance& inst : train_instances)
    if (request_feature_dim(inst) != dims.request_dim)
      throw std::invalid_argument("instances disagree on feature dimension");

  ValueNetwork net = init_network(dims, derive_seed(config.seed, "vfa_net"));
  ReplayBuffer buffer(config.replay_capacity);
  Rng noise_rng(derive_seed(config.seed, "vfa_explore"));
  Rng sample_rng(derive_seed(config.seed, "vfa_sample"));
  Adam adam(Weights::flat_size(dims), config.lr0, config.lr_decay_rate,
            config.lr_decay_steps);

  TrainResult result;
  result.net = net;
  result.best_epoch = 0;
  result.best_score = -std::numeric_limits<double>::infinity();

  long env_steps = 0;
  long updates = 0;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    double loss_sum = 0.0;
    long loss_count = 0;

    for (const Instance& inst : train_instances) {
      PreState state = initial_state(inst);
      StateFeatures prev_post = featurize({}, inst, 0);
      for (int t = 1; t <= inst.horizon; ++t) {
        CompensationDecision decision;
        if (state.worker) {
          const int group = inst.workers[*state.worker].group;
          const DecisionPrices dp =
              decision_prices(net.main, dims, inst, state,
                              group_estimate(estimates, group), config.gamma);
          const double stddev = exploration_std(config, env_steps);
          for (std::size_t k = 0; k < dp.active.size(); ++k) {
            const double eps =
                stddev > 0.0 ? noise_rng.normal(0.0, stddev) : 0.0;
            decision.comp[dp.active[k]] =
                std::max(0.0, dp.prices.comps_raw[static_cast<Index>(k)] + eps);
          }
        } else {
          for (int id : state.active) decision.comp[id] = 0.0;
        }

        buffer.push(make_transition(std::move(prev_post), state, inst));

        const StepOutcome outcome = step_transition(state, decision, inst);
        prev_post = featurize(outcome.post_active, inst, t);
        state = outcome.next_state;
        ++env_steps;

        if (env_steps % config.c_steps == 0 && buffer.size() > 0) {
          // One Huber batch step of the main weights toward targets from
          // the frozen copy.
          Vec flat = net.main.flatten();
          Vec grad = Vec::Zero(flat.size());
          double batch_loss = 0.0;
          const double inv_batch = 1.0 / config.batch_size;
          for (int b = 0; b < config.batch_size; ++b) {
            const Transition& tr = buffer.sample(sample_rng);
            const double target = bellman_target(tr, net.target, dims,
                                                 estimates, config.gamma);
            const double pred = forward(net.main, dims, tr.prev);
            const double err = pred - target;
            const double d = config.huber_delta;
            batch_loss += (std::abs(err) <= d)
                              ? 0.5 * err * err
                              : d * (std::abs(err) - 0.5 * d);
            const double dloss = std::clamp(err, -d, d) * inv_batch;
            grad += backward(net.main, dims, tr.prev, dloss).flatten();
          }
          batch_loss *= inv_batch;
          if (!std::isfinite(batch_loss))
            throw std::runtime_error("vfa training diverged: non-finite loss");
          const double gnorm = grad.norm();
          if (gnorm > config.grad_clip) grad *= config.grad_clip / gnorm;

          adam.step(flat, grad);
          net.main = Weights::from_flat(dims, flat);
          loss_sum += batch_loss;
          ++loss_count;
          ++updates;
        }
        if (env_steps % config.k_steps == 0) net.target = net.main;
      }
    }

    EpochLog row;
    row.epoch = epoch;
    row.env_steps = env_steps;
    row.updates = updates;
    row.mean_loss = loss_count > 0 ? loss_sum / loss_count : 0.0;
    row.val_score = validation_score(net.main, dims, val_instances, estimates,
                                     config.gamma);
    result.log.push_back(row);

    if (row.val_score > result.best_score) {
      result.best_score = row.val_score;
      result.best_epoch = epoch;
      result.net = net;
    }
  }

  if (config.epochs == 0) result.net = net;
  return result;
}

}  // namespace gigcomp::vfa
