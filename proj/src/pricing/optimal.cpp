// SPDX-License-Identifier: Apache-2.0
#include "gigcomp/pricing/optimal.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "gigcomp/choice/mnl.hpp"
#include "gigcomp/pricing/lambert.hpp"

namespace gigcomp::pricing {

namespace {

void check_input(const PricingInput& in) {
  const Index n = in.size();
  if (in.penalties.size() != n || in.utilities.size() != n ||
      in.opportunity_cost.size() != n ||
      static_cast<Index>(in.expiring.size()) != n)
    throw std::invalid_argument("pricing input arrays must align");
  if (!(in.mu > 0)) throw std::invalid_argument("mu must be positive");
}

// Exponents a_i = (r_i + u_i - u0 - beta_i 1{exp} - Delta_i - mu) / mu.
Vec exponents(const PricingInput& in) {
  Vec a(in.size());
  for (Index i = 0; i < in.size(); ++i) {
    const double beta_term = in.expiring[i] ? in.penalties[i] : 0.0;
    a[i] = (in.rewards[i] + in.utilities[i] - in.u0 - beta_term -
            in.opportunity_cost[i] - in.mu) /
           in.mu;
  }
  return a;
}

double log_sum_exp(CRef<Vec> a) {
  if (a.size() == 0) return -std::numeric_limits<double>::infinity();
  const double m = a.maxCoeff();
  return m + std::log((a.array() - m).exp().sum());
}

}  // namespace

double solve_m(const PricingInput& input) {
  check_input(input);
  if (input.size() == 0) return input.mu;  // W0(0) = 0
  const double lse = log_sum_exp(exponents(input));
  if (std::isinf(lse) && lse < 0) return input.mu;
  return input.mu * (lambert_w0_log(lse) + 1.0);
}

PricingOutput optimal_compensations(const PricingInput& input) {
  check_input(input);
  const Index n = input.size();
  PricingOutput out;
  out.m = solve_m(input);
  out.p_null = input.mu / out.m;
  out.comps_raw = Vec(n);
  out.comps = Vec(n);
  out.probs = Vec(n);
  const double log_p_null = std::log(input.mu) - std::log(out.m);
  const Vec a = exponents(input);
  for (Index i = 0; i < n; ++i) {
    const double beta_term = input.expiring[i] ? input.penalties[i] : 0.0;
    out.comps_raw[i] = input.rewards[i] - beta_term -
                       input.opportunity_cost[i] - out.m;
    out.comps[i] = std::max(0.0, out.comps_raw[i]);
    // exponent of P_i relative to p_null: a_i + 1 - m/mu
    out.probs[i] = std::exp(log_p_null + a[i] + 1.0 - out.m / input.mu);
  }
  out.phi_star = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double beta_term = input.expiring[i] ? input.penalties[i] : 0.0;
    out.phi_star += out.probs[i] * (input.rewards[i] - out.comps_raw[i] -
                                    input.opportunity_cost[i] - beta_term);
  }
  return out;
}

double phi(const PricingInput& input, CRef<Vec> comps) {
  check_input(input);
  if (comps.size() != input.size())
    throw std::invalid_argument("phi: comps length mismatch");
  const auto p = mnl::acceptance_probabilities(input.utilities, comps,
                                               input.mu, input.u0);
  double value = 0.0;
  for (Index i = 0; i < input.size(); ++i) {
    const double beta_term = input.expiring[i] ? input.penalties[i] : 0.0;
    value += p.probs[i] * (input.rewards[i] - comps[i] -
                           input.opportunity_cost[i] - beta_term);
  }
  return value;
}

double phi_prob(const PricingInput& input, CRef<Vec> probs, double p_null) {
  check_input(input);
  if (probs.size() != input.size())
    throw std::invalid_argument("phi_prob: probs length mismatch");
  double value = 0.0;
  for (Index i = 0; i < input.size(); ++i) {
    const double p = probs[i];
    if (p <= 0.0) continue;  // p ln p -> 0 at the boundary
    const double beta_term = input.expiring[i] ? input.penalties[i] : 0.0;
    value += p * (input.rewards[i] + input.utilities[i] - input.u0 -
                  input.mu * std::log(p) + input.mu * std::log(p_null) -
                  input.opportunity_cost[i] - beta_term);
  }
  return value;
}

}  // namespace gigcomp::pricing
