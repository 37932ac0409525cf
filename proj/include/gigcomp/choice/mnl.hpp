// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "gigcomp/types.hpp"

namespace gigcomp::mnl {

// Per-group MNL parameters: deterministic utility weights over the request
// encoding, Gumbel scale mu > 0, and the outside-option utility u0.
struct MnlParams {
  int group = 0;
  Vec weights;
  double mu = 1.0;
  double u0 = 0.0;
};

struct Probabilities {
  Vec probs;
  double p_null = 1.0;
};

double utility_of(const MnlParams& params, CRef<Vec> encoding);

// Softmax over (u_i + c_i)/mu against exp(u0/mu), max-subtracted so that
// large utilities or compensations cannot overflow.
Probabilities acceptance_probabilities(CRef<Vec> utilities, CRef<Vec> comps,
                                       double mu, double u0);

// Inverse of the map above for one request:
// c_i = -u_i + u0 + mu ln(p_i) - mu ln(p_null). Interior probabilities only.
double compensation_from_probs(double p_i, double p_null, double u_i,
                               double mu, double u0);

}  // namespace gigcomp::mnl
