// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>

#include "gigcomp/vfa/features.hpp"

namespace gigcomp::vfa {

struct NetworkDims {
  Index request_dim = 0;
  Index globals_dim = kGlobalsDim;
  Index embed = 32;   // request embedding width
  Index att = 64;     // attention score width
  Index trunk = 16;   // each of the two trunk layers

  bool operator==(const NetworkDims&) const = default;
};

// One full weight set. The attention scores each embedded request with
// sigma(v_att . tanh(W_att e_i)); the trunk maps [context, globals] to the
// scalar value.
struct Weights {
  Mat w_emb;   // embed x request_dim
  Vec b_emb;   // embed
  Mat w_att;   // att x embed
  Vec v_att;   // att
  Mat w1;      // trunk x (embed + globals)
  Vec b1;      // trunk
  Mat w2;      // trunk x trunk
  Vec b2;      // trunk
  Vec w_out;   // trunk
  double b_out = 0.0;

  Vec flatten() const;
  static Weights from_flat(const NetworkDims& dims, CRef<Vec> flat);
  static Index flat_size(const NetworkDims& dims);
};

// Main parameters plus the periodically synchronized target copy.
struct ValueNetwork {
  NetworkDims dims;
  Weights main;
  Weights target;
};

ValueNetwork init_network(const NetworkDims& dims, std::uint64_t seed);

double forward(const Weights& w, const NetworkDims& dims,
               const StateFeatures& features);

struct LeaveOneOut {
  double full = 0.0;
  Vec without;  // value of the state with row i removed
};

// Shares the per-request embeddings across the full set and every
// single-removal subset; only pooling, globals, and the trunk are
// recomputed per removal.
LeaveOneOut forward_leave_one_out(const Weights& w, const NetworkDims& dims,
                                  const StateFeatures& features);

// Reverse-mode gradient of (upstream * forward(w, features)) in every
// weight.
Weights backward(const Weights& w, const NetworkDims& dims,
                 const StateFeatures& features, double upstream);

// Binary checkpoint: header (dims, seed, epoch, config digest) plus flat
// main and target weight arrays; round trips bit-exactly.
struct Checkpoint {
  ValueNetwork net;
  std::uint64_t seed = 0;
  int epoch = 0;
  std::string config_digest;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace gigcomp::vfa
