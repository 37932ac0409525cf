// SPDX-License-Identifier: Apache-2.0
#include "gigcomp/core/episode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gigcomp {

std::pair<std::vector<int>, std::vector<int>> expire_split(
    const std::vector<int>& active, int t, const Instance& instance) {
  std::vector<int> surviving, expiring;
  for (int id : active) {
    const Request& r = instance.request(id);
    if (r.expiry_step < t)
      throw std::invalid_argument("active request already expired");
    (r.expiry_step == t ? expiring : surviving).push_back(id);
  }
  return {std::move(surviving), std::move(expiring)};
}

std::vector<int> admission_schedule(const Instance& instance) {
  std::vector<int> admission(instance.workers.size(), -1);
  // Workers enter the queue in (arrival_step, id) order; one is admitted
  // per step, never before its arrival.
  std::vector<int> order(instance.workers.size());
  for (std::size_t j = 0; j < order.size(); ++j) order[j] = static_cast<int>(j);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return instance.workers[a].arrival_step < instance.workers[b].arrival_step;
  });
  int next_free = 1;
  for (int j : order) {
    const int step = std::max(next_free, instance.workers[j].arrival_step);
    if (step > instance.horizon) break;
    admission[j] = step;
    next_free = step + 1;
  }
  return admission;
}

namespace {

std::vector<int> arrivals_at(const Instance& instance, int t) {
  std::vector<int> ids;
  for (const Request& r : instance.requests)
    if (r.arrival_step == t) ids.push_back(r.id);
  return ids;
}

void admit_from_queue(PreState& state) {
  if (!state.queue.empty()) {
    state.worker = state.queue.front();
    state.queue.pop_front();
  } else {
    state.worker.reset();
  }
}

void enqueue_worker_arrivals(PreState& state, const Instance& instance, int t) {
  for (const GigWorker& w : instance.workers)
    if (w.arrival_step == t) state.queue.push_back(w.id);
}

}  // namespace

PreState initial_state(const Instance& instance) {
  PreState state;
  state.step = 1;
  state.active = arrivals_at(instance, 1);
  enqueue_worker_arrivals(state, instance, 1);
  admit_from_queue(state);
  return state;
}

StepOutcome step_transition(const PreState& state,
                            const CompensationDecision& decision,
                            const Instance& instance) {
  if (decision.comp.size() != state.active.size())
    throw std::invalid_argument("decision does not cover the active set");
  for (int id : state.active) {
    auto it = decision.comp.find(id);
    if (it == decision.comp.end())
      throw std::invalid_argument("decision missing active request");
    if (!(it->second >= 0) || !std::isfinite(it->second))
      throw std::invalid_argument("compensation must be finite and >= 0");
  }

  const int t = state.step;
  auto [surviving, expiring] = expire_split(state.active, t, instance);

  StepOutcome out;
  out.choice = kChoiceNone;

  if (state.worker) {
    const GigWorker& w = instance.workers[*state.worker];
    // Gumbel-max choice over offered requests and the null option; ties go
    // to the lowest request id, and the null option loses any tie.
    double best = instance.u0 + w.noise_null;
    for (int id : state.active) {
      const double val = instance.utility(w.group, id) +
                         decision.comp.at(id) + w.noise_per_request[id];
      if (val > best || (val == best && out.choice == kChoiceNone) ||
          (val == best && out.choice != kChoiceNone && id < out.choice)) {
        best = val;
        out.choice = id;
      }
    }
  }

  double reward = 0.0;
  if (out.choice != kChoiceNone) {
    const Request& r = instance.request(out.choice);
    reward += r.reward - decision.comp.at(out.choice);
  }
  for (int id : expiring)
    if (id != out.choice) reward += instance.request(id).penalty;
  out.realized_reward = reward;

  out.post_active = surviving;
  std::erase(out.post_active, out.choice);

  PreState next;
  next.step = t + 1;
  next.active = out.post_active;
  for (int id : arrivals_at(instance, t + 1)) next.active.push_back(id);
  std::sort(next.active.begin(), next.active.end());
  next.queue = state.queue;
  enqueue_worker_arrivals(next, instance, t + 1);
  admit_from_queue(next);
  out.next_state = std::move(next);
  return out;
}

double expected_immediate_reward(CRef<Vec> rewards, CRef<Vec> penalties,
                                 const std::vector<bool>& expiring,
                                 CRef<Vec> comps, CRef<Vec> probs,
                                 double p_null, bool has_worker) {
  const Index n = rewards.size();
  if (penalties.size() != n || comps.size() != n || probs.size() != n ||
      static_cast<Index>(expiring.size()) != n)
    throw std::invalid_argument("expected_immediate_reward: length mismatch");
  double sum_p = p_null;
  for (Index i = 0; i < n; ++i) {
    if (probs[i] < 0.0 || probs[i] > 1.0)
      throw std::invalid_argument("acceptance probability outside [0,1]");
    sum_p += probs[i];
  }
  if (has_worker && std::abs(sum_p - 1.0) > 1e-9)
    throw std::invalid_argument("acceptance probabilities must sum to 1");

  double value = 0.0;
  if (has_worker)
    for (Index i = 0; i < n; ++i)
      value += probs[i] * (rewards[i] - comps[i] -
                           (expiring[i] ? penalties[i] : 0.0));
  for (Index i = 0; i < n; ++i)
    if (expiring[i]) value += penalties[i];
  return value;
}

EpisodeResult run_episode(const Instance& instance, Policy& policy,
                          const StepObserver& observer) {
  EpisodeResult result;
  PreState state = initial_state(instance);
  for (int t = 1; t <= instance.horizon; ++t) {
    const CompensationDecision decision = policy.decide(state, instance);
    const StepOutcome outcome = step_transition(state, decision, instance);

    StepRecord rec;
    rec.step = t;
    rec.active = state.active;
    rec.expiring = expire_split(state.active, t, instance).second;
    rec.worker = state.worker.value_or(-1);
    rec.comps.reserve(state.active.size());
    for (int id : state.active) rec.comps.push_back(decision.comp.at(id));
    rec.choice = outcome.choice;
    rec.realized_reward = outcome.realized_reward;

    if (outcome.choice != kChoiceNone)
      result.accepted.push_back({t, *state.worker, outcome.choice,
                                 decision.comp.at(outcome.choice)});
    for (int id : rec.expiring)
      if (id != outcome.choice) result.expired.push_back({t, id});
    result.total_reward += outcome.realized_reward;
    result.per_step_log.push_back(rec);

    if (observer) observer(state, rec);
    state = outcome.next_state;
  }
  return result;
}

}  // namespace gigcomp
