// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gigcomp/choice/mnl.hpp"

namespace gigcomp::mnl {

struct Offer {
  Vec encoding;
  double compensation = 0.0;
};

constexpr int kChosenNone = -1;

// One decision epoch observed under some data-collection policy.
struct ChoiceObservation {
  int group = 0;
  std::vector<Offer> offers;
  int chosen = kChosenNone;  // index into offers
};

enum class EstimatorMode { kMnl, kBinary };

struct FitConfig {
  EstimatorMode mode = EstimatorMode::kMnl;
  double learning_rate = 1e-2;  // decayed by 1/sqrt(epoch)
  int epochs = 200;
  int batch_size = 256;  // <= 0 means full batch
  double l2_mu = 1e-3;   // penalty strength on the Gumbel scale parameter
  double u0 = 0.0;
  double mu_init = 1.0;
  std::uint64_t seed = 0;
};

struct MnlEstimate {
  MnlParams params;
  double train_loss = 0.0;        // final full-batch objective
  std::vector<double> loss_history;  // full-batch objective per epoch
  int n_obs = 0;
};

// Maximum-likelihood fit of the per-group MNL (or per-offer binary logit)
// with the scale kept positive through a log parameterization. Deterministic
// given config.seed. Throws if a group has no observations.
std::map<int, MnlEstimate> fit_mnl(
    const std::vector<ChoiceObservation>& observations,
    const FitConfig& config);

// Full-batch objective (mean negative log-likelihood plus the scale
// penalty) of fixed parameters on a dataset; exposed for monotonicity
// checks in tests and for reporting.
double full_batch_loss(const std::vector<const ChoiceObservation*>& obs,
                       const MnlParams& params, const FitConfig& config);

// Line-delimited observation log.
void write_observations(const std::string& path,
                        const std::vector<ChoiceObservation>& observations);
std::vector<ChoiceObservation> read_observations(const std::string& path);

}  // namespace gigcomp::mnl
