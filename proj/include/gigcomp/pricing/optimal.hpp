// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "gigcomp/types.hpp"

namespace gigcomp::pricing {

// Inputs of the closed-form compensation solver for one decision epoch with
// a worker present. Arrays are aligned by request; opportunity_cost is the
// (discount-scaled) post-decision value difference of removing the request.
struct PricingInput {
  Vec rewards;
  Vec penalties;
  std::vector<bool> expiring;
  Vec utilities;         // deterministic worker utility per request
  Vec opportunity_cost;  // Delta_i
  double mu = 1.0;
  double u0 = 0.0;

  Index size() const { return rewards.size(); }
};

struct PricingOutput {
  Vec comps;      // clamped at zero
  Vec comps_raw;  // pre-clamp optimal prices
  Vec probs;      // acceptance probabilities at the raw optimum
  double p_null = 1.0;
  double m = 0.0;        // state-level price component, >= mu
  double phi_star = 0.0; // optimal expected surplus of the decision
};

// State scalar m = mu * (W0(sum_i exp((r_i + u_i - u0 - beta_i 1{exp}
// - Delta_i - mu)/mu)) + 1), evaluated through log-sum-exp and the
// log-domain Lambert solver so large rewards cannot overflow.
double solve_m(const PricingInput& input);

// Closed-form optimum: comps_raw_i = r_i - beta_i 1{exp} - Delta_i - m,
// probs_i = (mu/m) exp((r_i + u_i - u0 - beta_i 1{exp} - Delta_i - m)/mu).
PricingOutput optimal_compensations(const PricingInput& input);

// Expected surplus of an arbitrary compensation vector,
// sum_i P_i(c) * (r_i - c_i - Delta_i - beta_i 1{exp}); the verification
// objective the optimum maximizes.
double phi(const PricingInput& input, CRef<Vec> comps);

// The same objective over acceptance probabilities treated as free
// variables (with the null probability passed explicitly); concave on the
// simplex, used by optimality and curvature checks.
double phi_prob(const PricingInput& input, CRef<Vec> probs, double p_null);

}  // namespace gigcomp::pricing
