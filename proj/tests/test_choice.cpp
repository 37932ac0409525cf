// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "gigcomp/choice/fit.hpp"
#include "gigcomp/choice/mnl.hpp"
#include "gigcomp/util/rng.hpp"

using namespace gigcomp;
using namespace gigcomp::mnl;

TEST_SUITE_BEGIN("choice");

TEST_CASE("utility_of is the weight dot product") {
  MnlParams p;
  p.weights = (Vec(2) << 1.0, -2.0).finished();
  CHECK(utility_of(p, Vec::Zero(2)) == 0.0);
  CHECK(utility_of(p, (Vec(2) << 3.0, 1.0).finished()) == doctest::Approx(1.0));
  CHECK_THROWS_AS(utility_of(p, Vec::Zero(3)), std::invalid_argument);
}

TEST_CASE("acceptance probabilities") {
  SUBCASE("empty offer set") {
    const auto p = acceptance_probabilities(Vec(), Vec(), 1.0, 0.0);
    CHECK(p.p_null == 1.0);
    CHECK(p.probs.size() == 0);
  }
  SUBCASE("single symmetric offer") {
    const auto p = acceptance_probabilities(Vec::Constant(1, -2.0),
                                            Vec::Constant(1, 2.0), 1.0, 0.0);
    CHECK(p.probs[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p.p_null == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("two identical offers split with the null into thirds") {
    const auto p = acceptance_probabilities(Vec::Constant(2, 0.0),
                                            Vec::Constant(2, 0.0), 2.0, 0.0);
    CHECK(p.probs[0] == doctest::Approx(1.0 / 3).epsilon(1e-12));
    CHECK(p.probs[1] == doctest::Approx(1.0 / 3).epsilon(1e-12));
    CHECK(p.p_null == doctest::Approx(1.0 / 3).epsilon(1e-12));
  }
  SUBCASE("overflow-prone logits stay normalized") {
    const auto p = acceptance_probabilities(Vec::Constant(1, 5000.0),
                                            Vec::Constant(1, 800.0), 1.0, 0.0);
    CHECK(std::isfinite(p.probs[0]));
    CHECK(p.probs[0] + p.p_null == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("non-finite inputs rejected") {
    CHECK_THROWS_AS(acceptance_probabilities(
                        Vec::Constant(1, std::nan("")), Vec::Zero(1), 1.0, 0.0),
                    std::invalid_argument);
  }
}

TEST_CASE("probability properties on random inputs") {
  // Ranges keep every probability away from double saturation so the
  // strict-monotonicity checks are numerically meaningful.
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform_int(6));
    Vec u(n), c(n);
    for (int i = 0; i < n; ++i) {
      u[i] = rng.uniform(-8, 1);
      c[i] = rng.uniform(0, 8);
    }
    const double mu = rng.uniform(0.5, 3.0);
    const double u0 = rng.uniform(-2, 2);
    const auto p = acceptance_probabilities(u, c, mu, u0);
    CHECK(p.probs.sum() + p.p_null == doctest::Approx(1.0).epsilon(1e-12));

    // translation invariance
    const double shift = rng.uniform(-50, 50);
    const auto p2 = acceptance_probabilities(
        u, Vec(c.array() + shift), mu, u0 + shift);
    for (int i = 0; i < n; ++i)
      CHECK(p.probs[i] == doctest::Approx(p2.probs[i]).epsilon(1e-12));
    CHECK(p.p_null == doctest::Approx(p2.p_null).epsilon(1e-12));

    // raising one compensation raises that probability, lowers the null
    const int j = static_cast<int>(rng.uniform_int(n));
    Vec c3 = c;
    c3[j] += rng.uniform(0.1, 3.0);
    const auto p3 = acceptance_probabilities(u, c3, mu, u0);
    CHECK(p3.probs[j] > p.probs[j]);
    CHECK(p3.p_null < p.p_null);
  }
}

TEST_CASE("compensation-probability bijection") {
  SUBCASE("symmetry and the ln e case") {
    CHECK(compensation_from_probs(0.25, 0.25, 0.0, 1.0, 0.0) ==
          doctest::Approx(0.0).epsilon(1e-12));
    const double e = std::exp(1.0);
    CHECK(compensation_from_probs(0.3 * e / (1 + 0.3 * e + 0.3), 0.3 / (1 + 0.3 * e + 0.3),
                                  0.0, 1.0, 0.0) == doctest::Approx(1.0));
  }
  SUBCASE("boundary probabilities rejected") {
    CHECK_THROWS_AS(compensation_from_probs(0.0, 0.5, 0.0, 1.0, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(compensation_from_probs(0.5, 1.0, 0.0, 1.0, 0.0),
                    std::invalid_argument);
  }
  SUBCASE("round trip over 1000 random interior cases") {
    Rng rng(11);
    double max_err = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
      const int n = 1 + static_cast<int>(rng.uniform_int(8));
      Vec u(n), c(n);
      for (int i = 0; i < n; ++i) {
        u[i] = rng.uniform(-8, 1);
        c[i] = rng.uniform(0, 8);
      }
      const double mu = rng.uniform(0.5, 3.0);
      const double u0 = rng.uniform(-1, 1);
      const auto p = acceptance_probabilities(u, c, mu, u0);
      for (int i = 0; i < n; ++i) {
        const double back =
            compensation_from_probs(p.probs[i], p.p_null, u[i], mu, u0);
        max_err = std::max(max_err, std::abs(back - c[i]));
      }
    }
    CHECK(max_err < 1e-9);
  }
}

namespace {

// Synthetic choice data from known parameters via Gumbel-max draws.
std::vector<ChoiceObservation> synth_observations(const Vec& w, double mu,
                                                  double u0, int n_obs,
                                                  Rng& rng) {
  std::vector<ChoiceObservation> obs;
  obs.reserve(n_obs);
  const Index dim = w.size();
  for (int t = 0; t < n_obs; ++t) {
    ChoiceObservation o;
    o.group = 0;
    const int n = 1 + static_cast<int>(rng.uniform_int(4));
    double best = u0 + rng.gumbel(mu);
    o.chosen = kChosenNone;
    for (int k = 0; k < n; ++k) {
      Offer offer;
      offer.encoding = Vec(dim);
      for (Index d = 0; d < dim; ++d) offer.encoding[d] = rng.uniform(0, 5);
      offer.compensation = rng.uniform(0, 15);
      const double v =
          w.dot(offer.encoding) + offer.compensation + rng.gumbel(mu);
      if (v > best) {
        best = v;
        o.chosen = k;
      }
      o.offers.push_back(std::move(offer));
    }
    obs.push_back(std::move(o));
  }
  return obs;
}

}  // namespace

TEST_CASE("fit_mnl recovers known parameters") {
  Rng rng(17);
  const Vec w_true = (Vec(4) << -1.2, -0.4, -2.0, 0.6).finished();
  const double mu_true = 1.0;
  const auto obs = synth_observations(w_true, mu_true, 0.0, 20000, rng);

  FitConfig cfg;
  cfg.seed = 3;
  const auto est = fit_mnl(obs, cfg);
  REQUIRE(est.count(0) == 1);
  const MnlParams& p = est.at(0).params;

  // RMSE of predicted utilities over a request population
  double se = 0.0;
  const int n_pop = 500;
  for (int i = 0; i < n_pop; ++i) {
    Vec x(4);
    for (int d = 0; d < 4; ++d) x[d] = rng.uniform(0, 5);
    const double diff = w_true.dot(x) - p.weights.dot(x);
    se += diff * diff;
  }
  CHECK(std::sqrt(se / n_pop) <= 0.5 * mu_true);
  CHECK(p.mu > 0);
}

TEST_CASE("fit_mnl on all-reject data drives utilities negative") {
  Rng rng(23);
  std::vector<ChoiceObservation> obs;
  for (int t = 0; t < 2000; ++t) {
    ChoiceObservation o;
    o.group = 0;
    o.chosen = kChosenNone;
    Offer offer;
    offer.encoding = Vec(2);
    offer.encoding << rng.uniform(1, 5), rng.uniform(1, 5);
    offer.compensation = rng.uniform(0, 10);
    o.offers.push_back(std::move(offer));
    obs.push_back(std::move(o));
  }
  FitConfig cfg;
  cfg.epochs = 80;
  const auto est = fit_mnl(obs, cfg);
  const MnlParams& p = est.at(0).params;
  const Vec x = (Vec(2) << 3.0, 3.0).finished();
  CHECK(utility_of(p, x) < 0.0);
}

TEST_CASE("full-batch fit is invariant under dataset duplication") {
  Rng rng(29);
  const Vec w_true = (Vec(3) << -1.0, -0.5, 0.2).finished();
  const auto base = synth_observations(w_true, 1.0, 0.0, 300, rng);
  std::vector<ChoiceObservation> doubled;
  for (const auto& o : base) {
    doubled.push_back(o);
    doubled.push_back(o);
  }
  FitConfig cfg;
  cfg.batch_size = 0;  // full batch: the average loss is scale invariant
  cfg.epochs = 40;
  const auto a = fit_mnl(base, cfg).at(0);
  const auto b = fit_mnl(doubled, cfg).at(0);
  CHECK((a.params.weights - b.params.weights).norm() <=
        1e-12 * (1.0 + a.params.weights.norm()));
  CHECK(a.params.mu == doctest::Approx(b.params.mu).epsilon(1e-12));
}

TEST_CASE("fit_mnl objective is non-increasing over epochs") {
  Rng rng(31);
  const Vec w_true = (Vec(3) << -1.5, -0.2, 0.4).finished();
  const auto obs = synth_observations(w_true, 1.0, 0.0, 1500, rng);
  FitConfig cfg;
  cfg.batch_size = 0;
  cfg.learning_rate = 5e-3;
  cfg.epochs = 60;
  const auto est = fit_mnl(obs, cfg).at(0);
  for (std::size_t e = 1; e < est.loss_history.size(); ++e)
    CHECK(est.loss_history[e] <= est.loss_history[e - 1] + 1e-9);
}

TEST_CASE("empty input and bad chosen index rejected") {
  CHECK_THROWS_AS(fit_mnl({}, FitConfig{}), std::invalid_argument);
  ChoiceObservation o;
  o.group = 2;
  o.chosen = 3;
  Offer offer;
  offer.encoding = Vec::Zero(2);
  o.offers.push_back(offer);
  CHECK_THROWS_AS(fit_mnl({o}, FitConfig{}), std::invalid_argument);
}

TEST_CASE("binary estimator mode fits direction of preference") {
  Rng rng(37);
  const Vec w_true = (Vec(2) << -2.0, 1.0).finished();
  const auto obs = synth_observations(w_true, 1.0, 0.0, 8000, rng);
  FitConfig cfg;
  cfg.mode = EstimatorMode::kBinary;
  cfg.epochs = 120;
  const auto est = fit_mnl(obs, cfg).at(0);
  // The per-offer variant is misspecified for multi-offer data, so only
  // the preference ordering is required to survive.
  CHECK(est.params.weights[0] < 0.0);
  CHECK(est.params.weights[1] > est.params.weights[0]);
}

TEST_CASE("observation log round trip") {
  Rng rng(41);
  const Vec w = (Vec(2) << -1.0, 0.5).finished();
  const auto obs = synth_observations(w, 1.0, 0.0, 25, rng);
  const std::string path = "obs_roundtrip_test.jsonl";
  write_observations(path, obs);
  const auto back = read_observations(path);
  REQUIRE(back.size() == obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i) {
    CHECK(back[i].group == obs[i].group);
    CHECK(back[i].chosen == obs[i].chosen);
    REQUIRE(back[i].offers.size() == obs[i].offers.size());
    for (std::size_t k = 0; k < obs[i].offers.size(); ++k) {
      CHECK(back[i].offers[k].compensation == obs[i].offers[k].compensation);
      CHECK(back[i].offers[k].encoding == obs[i].offers[k].encoding);
    }
  }
  std::remove(path.c_str());
}

TEST_SUITE_END();
