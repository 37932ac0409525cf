// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "gigcomp/core/instance.hpp"

namespace gigcomp {

// Pre-decision state: the active request set, at most one admitted worker,
// and the FIFO queue of arrived-but-not-yet-admitted workers.
struct PreState {
  int step = 1;
  std::vector<int> active;  // request ids, ascending
  std::optional<int> worker;
  std::deque<int> queue;
};

// Nonnegative compensation per active request. Keys must equal the active
// set of the state the decision answers.
struct CompensationDecision {
  std::map<int, double> comp;
};

constexpr int kChoiceNone = -1;

struct StepRecord {
  int step = 0;
  std::vector<int> active;
  std::vector<int> expiring;
  int worker = -1;  // -1 when no worker admitted this step
  std::vector<double> comps;  // aligned with active
  int choice = kChoiceNone;   // request id, or kChoiceNone
  double realized_reward = 0.0;
};

struct AcceptEvent {
  int step;
  int worker;
  int request;
  double compensation;
};

struct ExpireEvent {
  int step;
  int request;
};

struct EpisodeResult {
  double total_reward = 0.0;
  std::vector<AcceptEvent> accepted;
  std::vector<ExpireEvent> expired;
  std::vector<StepRecord> per_step_log;
};

struct StepOutcome {
  std::vector<int> post_active;  // surviving requests minus the accepted one
  int choice = kChoiceNone;
  double realized_reward = 0.0;
  PreState next_state;
};

class Policy {
 public:
  virtual ~Policy() = default;
  virtual CompensationDecision decide(const PreState& state,
                                      const Instance& instance) = 0;
};

// Splits the active set into requests surviving past t and requests whose
// expiry step equals t.
std::pair<std::vector<int>, std::vector<int>> expire_split(
    const std::vector<int>& active, int t, const Instance& instance);

// The step each worker is admitted from the FIFO queue (one admission per
// step), or -1 if the queue never reaches them within the horizon. Fully
// determined by the arrival sequence, independent of any policy.
std::vector<int> admission_schedule(const Instance& instance);

PreState initial_state(const Instance& instance);

StepOutcome step_transition(const PreState& state,
                            const CompensationDecision& decision,
                            const Instance& instance);

// Eq.-style expected immediate reward: the worker term is included only when
// a worker is present; expiring requests always contribute their penalty,
// offset for an expiring request that is accepted.
double expected_immediate_reward(CRef<Vec> rewards, CRef<Vec> penalties,
                                 const std::vector<bool>& expiring,
                                 CRef<Vec> comps, CRef<Vec> probs,
                                 double p_null, bool has_worker);

using StepObserver = std::function<void(const PreState&, const StepRecord&)>;

EpisodeResult run_episode(const Instance& instance, Policy& policy,
                          const StepObserver& observer = nullptr);

}  // namespace gigcomp
