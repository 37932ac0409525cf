// SPDX-License-Identifier: Apache-2.0
#include "gigcomp/choice/fit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "gigcomp/util/rng.hpp"

namespace gigcomp::mnl {

namespace {

using Json = nlohmann::json;

struct WorkingParams {
  Vec w;
  double log_mu = 0.0;
  double mu() const { return std::exp(log_mu); }
};

struct Gradient {
  Vec w;
  double log_mu = 0.0;
};

// Negative log-likelihood of one observation plus its gradient contribution.
double observation_nll(const ChoiceObservation& obs, const WorkingParams& p,
                       const FitConfig& cfg, Gradient* grad) {
  const double mu = p.mu();
  const Index n = static_cast<Index>(obs.offers.size());
  Vec scores(n);
  for (Index k = 0; k < n; ++k)
    scores[k] = (p.w.dot(obs.offers[k].encoding) + obs.offers[k].compensation) / mu;
  const double score_null = cfg.u0 / mu;

  if (cfg.mode == EstimatorMode::kBinary) {
    // Independent per-offer logit on the score margin against the null.
    double nll = 0.0;
    for (Index k = 0; k < n; ++k) {
      const double z = scores[k] - score_null;
      const double y = (obs.chosen == k) ? 1.0 : 0.0;
      // log(1 + e^z) evaluated stably
      const double softplus = z > 0 ? z + std::log1p(std::exp(-z))
                                    : std::log1p(std::exp(z));
      nll += softplus - y * z;
      if (grad) {
        const double sig = 1.0 / (1.0 + std::exp(-z));
        const double dz = sig - y;
        grad->w += dz * obs.offers[k].encoding / mu;
        grad->log_mu += dz * (-z);
      }
    }
    return nll;
  }

  // Choice-level MNL over the offered set plus the null alternative.
  const double m = n > 0 ? std::max(scores.maxCoeff(), score_null) : score_null;
  const Vec e = (scores.array() - m).exp();
  const double e_null = std::exp(score_null - m);
  const double denom = e.sum() + e_null;
  const double lse = m + std::log(denom);
  const double s_chosen = (obs.chosen == kChosenNone) ? score_null : scores[obs.chosen];
  if (grad) {
    // d nll / d score_k = P_k - 1{k chosen}; scores scale as 1/mu.
    for (Index k = 0; k < n; ++k) {
      const double d = e[k] / denom - ((obs.chosen == k) ? 1.0 : 0.0);
      grad->w += d * obs.offers[k].encoding / mu;
      grad->log_mu += d * (-scores[k]);
    }
    const double d_null =
        e_null / denom - ((obs.chosen == kChosenNone) ? 1.0 : 0.0);
    grad->log_mu += d_null * (-score_null);
  }
  return lse - s_chosen;
}

double dataset_loss(const std::vector<const ChoiceObservation*>& obs,
                    const WorkingParams& p, const FitConfig& cfg,
                    Gradient* grad) {
  double total = 0.0;
  for (const ChoiceObservation* o : obs) total += observation_nll(*o, p, cfg, grad);
  const double inv = 1.0 / static_cast<double>(obs.size());
  if (grad) {
    grad->w *= inv;
    grad->log_mu *= inv;
  }
  double loss = total * inv;
  // L2 penalty on the scale parameter itself, not its log.
  const double mu = p.mu();
  loss += cfg.l2_mu * mu * mu;
  if (grad) grad->log_mu += cfg.l2_mu * 2.0 * mu * mu;
  return loss;
}

MnlEstimate fit_group(int group, const std::vector<const ChoiceObservation*>& obs,
                      const FitConfig& cfg) {
  Index dim = 0;
  for (const ChoiceObservation* o : obs)
    for (const Offer& offer : o->offers) dim = std::max(dim, offer.encoding.size());
  if (dim == 0)
    throw std::invalid_argument("fit_mnl: group " + std::to_string(group) +
                                " has no offers to fit on");

  WorkingParams p;
  p.w = Vec::Zero(dim);
  p.log_mu = std::log(cfg.mu_init);

  Rng rng(derive_seed(cfg.seed, "fit_mnl", static_cast<std::uint64_t>(group)));
  const int n = static_cast<int>(obs.size());
  const int batch = cfg.batch_size <= 0 ? n : std::min(cfg.batch_size, n);

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);

  MnlEstimate est;
  est.loss_history.reserve(cfg.epochs);
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    // Fisher-Yates with our own rng for reproducibility.
    for (int i = n - 1; i > 0; --i)
      std::swap(order[i], order[static_cast<int>(rng.uniform_int(i + 1))]);

    const double lr = cfg.learning_rate / std::sqrt(static_cast<double>(epoch));
    for (int start = 0; start < n; start += batch) {
      const int end = std::min(start + batch, n);
      std::vector<int> idx(order.begin() + start, order.begin() + end);
      std::sort(idx.begin(), idx.end());  // fixed accumulation order
      std::vector<const ChoiceObservation*> chunk;
      chunk.reserve(idx.size());
      for (int i : idx) chunk.push_back(obs[i]);

      Gradient grad{Vec::Zero(dim), 0.0};
      dataset_loss(chunk, p, cfg, &grad);
      p.w -= lr * grad.w;
      p.log_mu -= lr * grad.log_mu;
    }
    MnlParams snapshot{group, p.w, p.mu(), cfg.u0};
    est.loss_history.push_back(full_batch_loss(obs, snapshot, cfg));
  }

  est.params = MnlParams{group, p.w, p.mu(), cfg.u0};
  est.n_obs = n;
  est.train_loss = est.loss_history.empty()
                       ? full_batch_loss(obs, est.params, cfg)
                       : est.loss_history.back();
  return est;
}

}  // namespace

double full_batch_loss(const std::vector<const ChoiceObservation*>& obs,
                       const MnlParams& params, const FitConfig& cfg) {
  WorkingParams p{params.weights, std::log(params.mu)};
  return dataset_loss(obs, p, cfg, nullptr);
}

std::map<int, MnlEstimate> fit_mnl(
    const std::vector<ChoiceObservation>& observations,
    const FitConfig& config) {
  if (observations.empty())
    throw std::invalid_argument("fit_mnl: no observations");
  std::map<int, std::vector<const ChoiceObservation*>> by_group;
  for (const ChoiceObservation& obs : observations) {
    if (obs.chosen != kChosenNone &&
        (obs.chosen < 0 || obs.chosen >= static_cast<int>(obs.offers.size())))
      throw std::invalid_argument("fit_mnl: chosen index out of bounds");
    by_group[obs.group].push_back(&obs);
  }
  std::map<int, MnlEstimate> estimates;
  for (const auto& [group, obs] : by_group)
    estimates.emplace(group, fit_group(group, obs, config));
  return estimates;
}

void write_observations(const std::string& path,
                        const std::vector<ChoiceObservation>& observations) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  for (const ChoiceObservation& obs : observations) {
    Json rec;
    rec["group"] = obs.group;
    rec["chosen"] = obs.chosen;
    Json offers = Json::array();
    for (const Offer& offer : obs.offers) {
      Json o;
      o["x"] = std::vector<double>(offer.encoding.begin(), offer.encoding.end());
      o["c"] = offer.compensation;
      offers.push_back(std::move(o));
    }
    rec["offers"] = std::move(offers);
    out << rec.dump() << '\n';
  }
}

std::vector<ChoiceObservation> read_observations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for read: " + path);
  std::vector<ChoiceObservation> result;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const Json rec = Json::parse(line);
    ChoiceObservation obs;
    obs.group = rec.at("group").get<int>();
    obs.chosen = rec.at("chosen").get<int>();
    for (const Json& o : rec.at("offers")) {
      Offer offer;
      const auto xs = o.at("x").get<std::vector<double>>();
      offer.encoding = Eigen::Map<const Vec>(xs.data(), static_cast<Index>(xs.size()));
      offer.compensation = o.at("c").get<double>();
      obs.offers.push_back(std::move(offer));
    }
    result.push_back(std::move(obs));
  }
  return result;
}

}  // namespace gigcomp::mnl
