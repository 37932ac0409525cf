// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "gigcomp/core/instance.hpp"
#include "gigcomp/pricing/optimal.hpp"
#include "gigcomp/util/rng.hpp"

namespace gigcomp::testing {

// Minimal hand-built instance: one group, explicit utilities and noise.
// Requests get unit features and zone 0 so encodings stay well-formed.
struct InstanceBuilder {
  Instance inst;

  explicit InstanceBuilder(int horizon, double mu = 1.0, double u0 = 0.0) {
    inst.id = 0;
    inst.horizon = horizon;
    inst.n_pickup = 1;
    inst.n_dropoff = 1;
    inst.n_locations = 1;
    inst.travel_time_matrix = Mat::Zero(1, 1);
    inst.mu = Vec::Constant(1, mu);
    inst.u0 = u0;
    inst.utility = Mat::Zero(1, 0);
  }

  int add_request(double reward, double penalty, int arrival, int expiry,
                  double utility) {
    Request r;
    r.id = static_cast<int>(inst.requests.size());
    r.features = Vec::Ones(1);
    r.reward = reward;
    r.penalty = penalty;
    r.arrival_step = arrival;
    r.expiry_step = expiry;
    inst.requests.push_back(r);
    Mat u(1, inst.requests.size());
    u.leftCols(inst.utility.cols()) = inst.utility;
    u(0, inst.requests.size() - 1) = utility;
    inst.utility = u;
    for (GigWorker& w : inst.workers) w.noise_per_request.push_back(0.0);
    return r.id;
  }

  int add_worker(int arrival, std::vector<double> noise = {},
                 double noise_null = 0.0) {
    GigWorker w;
    w.id = static_cast<int>(inst.workers.size());
    w.group = 0;
    w.arrival_step = arrival;
    noise.resize(inst.requests.size(), 0.0);
    w.noise_per_request = std::move(noise);
    w.noise_null = noise_null;
    inst.workers.push_back(w);
    return w.id;
  }

  Instance build() {
    validate_instance(inst);
    return inst;
  }
};

inline pricing::PricingInput random_pricing_input(Rng& rng, int max_requests,
                                                  bool allow_empty = false) {
  const int n =
      static_cast<int>(rng.uniform_int(max_requests + (allow_empty ? 1 : 0))) +
      (allow_empty ? 0 : 1);
  pricing::PricingInput in;
  in.rewards = Vec(n);
  in.penalties = Vec(n);
  in.utilities = Vec(n);
  in.opportunity_cost = Vec(n);
  in.expiring.resize(n);
  for (int i = 0; i < n; ++i) {
    in.rewards[i] = rng.uniform(1.0, 18.0);
    in.penalties[i] = -rng.uniform(0.5, 4.0);
    in.utilities[i] = -rng.uniform(0.0, 9.0);
    in.opportunity_cost[i] = rng.uniform(-3.0, 5.0);
    in.expiring[i] = rng.uniform() < 0.3;
  }
  in.mu = rng.uniform(0.6, 2.5);
  in.u0 = rng.uniform(-1.0, 1.0);
  return in;
}

// Euclidean projection onto {y >= 0, sum y = mass} (Duchi et al. 2008).
inline Vec project_simplex(CRef<Vec> v, double mass = 1.0) {
  const Index n = v.size();
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<>());
  double css = 0.0;
  int rho = 0;
  double cum = 0.0;
  for (Index j = 0; j < n; ++j) {
    cum += u[j];
    const double t = (cum - mass) / static_cast<double>(j + 1);
    if (u[j] - t > 0) {
      rho = static_cast<int>(j + 1);
      css = cum;
    }
  }
  const double theta = (css - mass) / rho;
  Vec out(n);
  for (Index i = 0; i < n; ++i) out[i] = std::max(0.0, v[i] - theta);
  return out;
}

// Projection onto the eps-interior of the simplex. Keeping iterates away
// from the boundary bounds the log terms, so ascent steps remain effective
// at double precision; interior-optimum coordinates below eps contribute
// O(eps) to phi.
inline Vec project_simplex_interior(CRef<Vec> v, double eps) {
  const Index n = v.size();
  const Vec shifted = v.array() - eps;
  return Vec(project_simplex(shifted, 1.0 - eps * static_cast<double>(n))
                 .array() +
             eps);
}

// Independent maximizer of phi over the probability simplex; never touches
// the closed-form path it is used to verify. Gradient ascent projected onto
// the simplex in the entropic geometry (multiplicative updates, which keep
// iterates interior and handle optima whose coordinates span many orders of
// magnitude), then a Euclidean projected-gradient polish from the solution.
// Both phases are monotone with per-iteration backtracking.
inline double maximize_phi_projected_gradient(const pricing::PricingInput& in,
                                              int max_iters = 30000) {
  const Index n = in.size();
  if (n == 0) return 0.0;
  Vec q = Vec::Constant(n + 1, 1.0 / static_cast<double>(n + 1));
  const double tiny = 1e-300;
  auto value = [&](const Vec& qq) {
    return pricing::phi_prob(in, qq.head(n), qq[n]);
  };
  auto grad = [&](const Vec& qq) {
    Vec g(n + 1);
    const double p_null = std::max(qq[n], tiny);
    double sum_p = 0.0;
    for (Index i = 0; i < n; ++i) {
      const double p = std::max(qq[i], tiny);
      sum_p += qq[i];
      const double beta_term = in.expiring[i] ? in.penalties[i] : 0.0;
      g[i] = in.rewards[i] + in.utilities[i] - in.u0 - in.mu * std::log(p) +
             in.mu * std::log(p_null) - in.opportunity_cost[i] - beta_term -
             in.mu;
    }
    g[n] = in.mu * sum_p / p_null;
    return g;
  };

  double f = value(q);
  double eta = 0.1 / in.mu;
  int stalled = 0;
  for (int it = 0; it < max_iters; ++it) {
    const Vec g = grad(q);
    bool moved = false;
    for (int bt = 0; bt < 90; ++bt) {
      Vec logits = q.array().max(tiny).log() + eta * (g.array() - g.maxCoeff());
      Vec cand = (logits.array() - logits.maxCoeff()).exp();
      cand /= cand.sum();
      const double fc = value(cand);
      if (fc > f) {
        stalled = (fc - f <= 1e-15 * (1.0 + std::abs(f))) ? stalled + 1 : 0;
        q = cand;
        f = fc;
        eta = std::min(eta * 2.0, 1e4);
        moved = true;
        break;
      }
      eta *= 0.5;
      if (eta < 1e-18) break;
    }
    if (!moved || stalled > 60) break;
  }

  // Euclidean polish: accept any improving projected step.
  double step = 1.0 / in.mu;
  for (int it = 0; it < 200; ++it) {
    const Vec g = grad(q);
    bool moved = false;
    for (int bt = 0; bt < 60; ++bt) {
      const Vec cand = project_simplex_interior(q + step * g, 1e-15);
      const double fc = value(cand);
      if (fc > f) {
        q = cand;
        f = fc;
        step *= 2.0;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  return f;
}

}  // namespace gigcomp::testing
