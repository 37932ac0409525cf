// SPDX-License-Identifier: Apache-2.0
#include "gigcomp/choice/mnl.hpp"

#include <cmath>
#include <stdexcept>

namespace gigcomp::mnl {

double utility_of(const MnlParams& params, CRef<Vec> encoding) {
  if (encoding.size() != params.weights.size())
    throw std::invalid_argument("encoding dimension does not match weights");
  return params.weights.dot(encoding);
}

Probabilities acceptance_probabilities(CRef<Vec> utilities, CRef<Vec> comps,
                                       double mu, double u0) {
  if (utilities.size() != comps.size())
    throw std::invalid_argument("utilities and comps must align");
  if (!(mu > 0)) throw std::invalid_argument("mu must be positive");
  if (!utilities.allFinite() || !comps.allFinite() || !std::isfinite(u0))
    throw std::invalid_argument("non-finite input to acceptance_probabilities");

  const Index n = utilities.size();
  Probabilities out;
  if (n == 0) {
    out.probs = Vec();
    out.p_null = 1.0;
    return out;
  }
  Vec logits = (utilities + comps) / mu;
  const double logit_null = u0 / mu;
  const double m = std::max(logits.maxCoeff(), logit_null);
  const Vec e = (logits.array() - m).exp();
  const double e_null = std::exp(logit_null - m);
  const double denom = e.sum() + e_null;
  out.probs = e / denom;
  out.p_null = e_null / denom;
  return out;
}

double compensation_from_probs(double p_i, double p_null, double u_i,
                               double mu, double u0) {
  if (!(p_i > 0 && p_i < 1) || !(p_null > 0 && p_null < 1))
    throw std::invalid_argument("probabilities must be interior");
  if (!(mu > 0)) throw std::invalid_argument("mu must be positive");
  return -u_i + u0 + mu * std::log(p_i) - mu * std::log(p_null);
}

}  // namespace gigcomp::mnl
