// SPDX-License-Identifier: Apache-2.0
#include "gigcomp/vfa/network.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "gigcomp/util/rng.hpp"

namespace gigcomp::vfa {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Vec swish(CRef<Vec> x) {
  Vec out(x.size());
  for (Index i = 0; i < x.size(); ++i) out[i] = x[i] * sigmoid(x[i]);
  return out;
}

Vec swish_grad(CRef<Vec> x) {
  Vec out(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    const double s = sigmoid(x[i]);
    out[i] = s * (1.0 + x[i] * (1.0 - s));
  }
  return out;
}

struct ForwardCache {
  Mat z_emb;    // n x embed, pre-activation
  Mat e;        // n x embed, embeddings
  Mat t_att;    // n x att, tanh output
  Vec a;        // n, attention logits
  Vec beta;     // n, attention weights
  Vec context;  // embed
  Vec h0, z1, h1, z2, h2;
  double value = 0.0;
};

void check_dims(const Weights& w, const NetworkDims& d,
                const StateFeatures& f) {
  if (f.requests.cols() != d.request_dim && f.requests.rows() > 0)
    throw std::invalid_argument("feature dimension does not match network");
  if (w.w_emb.rows() != d.embed || w.w_emb.cols() != d.request_dim ||
      w.w_att.rows() != d.att || w.w_att.cols() != d.embed ||
      w.w1.cols() != d.embed + d.globals_dim)
    throw std::invalid_argument("weight shapes do not match network dims");
}

double trunk_value(const Weights& w, CRef<Vec> context, CRef<Vec> globals,
                   ForwardCache* cache) {
  Vec h0(context.size() + globals.size());
  h0 << context, globals;
  const Vec z1 = w.w1 * h0 + w.b1;
  const Vec h1 = swish(z1);
  const Vec z2 = w.w2 * h1 + w.b2;
  const Vec h2 = swish(z2);
  const double v = w.w_out.dot(h2) + w.b_out;
  if (cache) {
    cache->h0 = std::move(h0);
    cache->z1 = z1;
    cache->h1 = h1;
    cache->z2 = z2;
    cache->h2 = h2;
    cache->value = v;
  }
  return v;
}

ForwardCache run_forward(const Weights& w, const NetworkDims& d,
                         const StateFeatures& f) {
  check_dims(w, d, f);
  const Index n = f.count();
  ForwardCache c;
  c.z_emb = Mat(n, d.embed);
  c.e = Mat(n, d.embed);
  c.t_att = Mat(n, d.att);
  c.a = Vec(n);
  c.beta = Vec(n);
  c.context = Vec::Zero(d.embed);
  for (Index i = 0; i < n; ++i) {
    const Vec z = w.w_emb * f.requests.row(i).transpose() + w.b_emb;
    const Vec e = swish(z);
    const Vec t = (w.w_att * e).array().tanh();
    const double a = w.v_att.dot(t);
    const double beta = sigmoid(a);
    c.z_emb.row(i) = z.transpose();
    c.e.row(i) = e.transpose();
    c.t_att.row(i) = t.transpose();
    c.a[i] = a;
    c.beta[i] = beta;
    c.context += beta * e;
  }
  trunk_value(w, c.context, f.globals(), &c);
  return c;
}

}  // namespace

Index Weights::flat_size(const NetworkDims& d) {
  return d.embed * d.request_dim + d.embed + d.att * d.embed + d.att +
         d.trunk * (d.embed + d.globals_dim) + d.trunk + d.trunk * d.trunk +
         d.trunk + d.trunk + 1;
}

Vec Weights::flatten() const {
  Vec out(w_emb.size() + b_emb.size() + w_att.size() + v_att.size() +
          w1.size() + b1.size() + w2.size() + b2.size() + w_out.size() + 1);
  Index at = 0;
  auto put = [&](const double* data, Index size) {
    std::memcpy(out.data() + at, data, sizeof(double) * size);
    at += size;
  };
  put(w_emb.data(), w_emb.size());
  put(b_emb.data(), b_emb.size());
  put(w_att.data(), w_att.size());
  put(v_att.data(), v_att.size());
  put(w1.data(), w1.size());
  put(b1.data(), b1.size());
  put(w2.data(), w2.size());
  put(b2.data(), b2.size());
  put(w_out.data(), w_out.size());
  out[at] = b_out;
  return out;
}

Weights Weights::from_flat(const NetworkDims& d, CRef<Vec> flat) {
  if (flat.size() != flat_size(d))
    throw std::invalid_argument("flat weight vector has wrong size");
  Weights w;
  Index at = 0;
  auto take_mat = [&](Index rows, Index cols) {
    Mat m(rows, cols);
    std::memcpy(m.data(), flat.data() + at, sizeof(double) * rows * cols);
    at += rows * cols;
    return m;
  };
  auto take_vec = [&](Index size) {
    Vec v(size);
    std::memcpy(v.data(), flat.data() + at, sizeof(double) * size);
    at += size;
    return v;
  };
  w.w_emb = take_mat(d.embed, d.request_dim);
  w.b_emb = take_vec(d.embed);
  w.w_att = take_mat(d.att, d.embed);
  w.v_att = take_vec(d.att);
  w.w1 = take_mat(d.trunk, d.embed + d.globals_dim);
  w.b1 = take_vec(d.trunk);
  w.w2 = take_mat(d.trunk, d.trunk);
  w.b2 = take_vec(d.trunk);
  w.w_out = take_vec(d.trunk);
  w.b_out = flat[at];
  return w;
}

ValueNetwork init_network(const NetworkDims& dims, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "vfa_init"));
  auto uniform_mat = [&](Index rows, Index cols) {
    const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
    Mat m(rows, cols);
    for (Index i = 0; i < rows; ++i)
      for (Index j = 0; j < cols; ++j) m(i, j) = rng.uniform(-bound, bound);
    return m;
  };
  ValueNetwork net;
  net.dims = dims;
  Weights& w = net.main;
  w.w_emb = uniform_mat(dims.embed, dims.request_dim);
  w.b_emb = Vec::Zero(dims.embed);
  w.w_att = uniform_mat(dims.att, dims.embed);
  w.v_att = uniform_mat(dims.att, 1).col(0);
  w.w1 = uniform_mat(dims.trunk, dims.embed + dims.globals_dim);
  w.b1 = Vec::Zero(dims.trunk);
  w.w2 = uniform_mat(dims.trunk, dims.trunk);
  w.b2 = Vec::Zero(dims.trunk);
  w.w_out = uniform_mat(dims.trunk, 1).col(0);
  w.b_out = 0.0;
  net.target = net.main;
  return net;
}

double forward(const Weights& w, const NetworkDims& dims,
               const StateFeatures& features) {
  return run_forward(w, dims, features).value;
}

LeaveOneOut forward_leave_one_out(const Weights& w, const NetworkDims& dims,
                                  const StateFeatures& features) {
  const ForwardCache c = run_forward(w, dims, features);
  LeaveOneOut out;
  out.full = c.value;
  const Index n = features.count();
  out.without = Vec(n);
  for (Index i = 0; i < n; ++i) {
    const Vec ctx = c.context - c.beta[i] * c.e.row(i).transpose();
    out.without[i] = trunk_value(w, ctx, features.globals(i), nullptr);
  }
  return out;
}

Weights backward(const Weights& w, const NetworkDims& dims,
                 const StateFeatures& features, double upstream) {
  const ForwardCache c = run_forward(w, dims, features);
  Weights g;
  g.w_emb = Mat::Zero(dims.embed, dims.request_dim);
  g.b_emb = Vec::Zero(dims.embed);
  g.w_att = Mat::Zero(dims.att, dims.embed);
  g.v_att = Vec::Zero(dims.att);
  g.w1 = Mat::Zero(dims.trunk, dims.embed + dims.globals_dim);
  g.b1 = Vec::Zero(dims.trunk);
  g.w2 = Mat::Zero(dims.trunk, dims.trunk);
  g.b2 = Vec::Zero(dims.trunk);
  g.w_out = Vec::Zero(dims.trunk);
  g.b_out = 0.0;
  if (upstream == 0.0) return g;

  // trunk
  g.w_out = upstream * c.h2;
  g.b_out = upstream;
  const Vec dh2 = upstream * w.w_out;
  const Vec dz2 = dh2.cwiseProduct(swish_grad(c.z2));
  g.w2 = dz2 * c.h1.transpose();
  g.b2 = dz2;
  const Vec dh1 = w.w2.transpose() * dz2;
  const Vec dz1 = dh1.cwiseProduct(swish_grad(c.z1));
  g.w1 = dz1 * c.h0.transpose();
  g.b1 = dz1;
  const Vec dh0 = w.w1.transpose() * dz1;
  const Vec dcontext = dh0.head(dims.embed);

  // attention pooling
  for (Index i = 0; i < features.count(); ++i) {
    const Vec e_i = c.e.row(i).transpose();
    const double dbeta = dcontext.dot(e_i);
    Vec de = c.beta[i] * dcontext;

    const double da = dbeta * c.beta[i] * (1.0 - c.beta[i]);
    const Vec t_i = c.t_att.row(i).transpose();
    g.v_att += da * t_i;
    const Vec dq = (da * w.v_att).cwiseProduct(
        (1.0 - t_i.array().square()).matrix());
    g.w_att += dq * e_i.transpose();
    de += w.w_att.transpose() * dq;

    const Vec dz = de.cwiseProduct(swish_grad(c.z_emb.row(i).transpose()));
    g.w_emb += dz * features.requests.row(i);
    g.b_emb += dz;
  }
  return g;
}

namespace {

constexpr char kMagic[8] = {'g', 'c', 'v', 'f', 'a', 'c', 'k', '1'};

template <class T>
void write_pod(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T read_pod(std::ifstream& in) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out.write(kMagic, sizeof(kMagic));
  const NetworkDims& d = ckpt.net.dims;
  for (Index v : {d.request_dim, d.globals_dim, d.embed, d.att, d.trunk})
    write_pod(out, static_cast<std::int64_t>(v));
  write_pod(out, ckpt.seed);
  write_pod(out, static_cast<std::int64_t>(ckpt.epoch));
  write_pod(out, static_cast<std::int64_t>(ckpt.config_digest.size()));
  out.write(ckpt.config_digest.data(),
            static_cast<std::streamsize>(ckpt.config_digest.size()));
  const Vec main = ckpt.net.main.flatten();
  const Vec target = ckpt.net.target.flatten();
  write_pod(out, static_cast<std::int64_t>(main.size()));
  out.write(reinterpret_cast<const char*>(main.data()),
            static_cast<std::streamsize>(sizeof(double) * main.size()));
  out.write(reinterpret_cast<const char*>(target.data()),
            static_cast<std::streamsize>(sizeof(double) * target.size()));
  if (!out) throw std::runtime_error("checkpoint write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read checkpoint: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(magic)) != 0)
    throw std::runtime_error("not a checkpoint file: " + path);
  Checkpoint ckpt;
  NetworkDims d;
  d.request_dim = static_cast<Index>(read_pod<std::int64_t>(in));
  d.globals_dim = static_cast<Index>(read_pod<std::int64_t>(in));
  d.embed = static_cast<Index>(read_pod<std::int64_t>(in));
  d.att = static_cast<Index>(read_pod<std::int64_t>(in));
  d.trunk = static_cast<Index>(read_pod<std::int64_t>(in));
  ckpt.net.dims = d;
  ckpt.seed = read_pod<std::uint64_t>(in);
  ckpt.epoch = static_cast<int>(read_pod<std::int64_t>(in));
  const auto digest_len = read_pod<std::int64_t>(in);
  ckpt.config_digest.resize(static_cast<std::size_t>(digest_len));
  in.read(ckpt.config_digest.data(), digest_len);
  const auto flat_len = read_pod<std::int64_t>(in);
  if (flat_len != Weights::flat_size(d))
    throw std::runtime_error("checkpoint weight size mismatch: " + path);
  Vec main(flat_len), target(flat_len);
  in.read(reinterpret_cast<char*>(main.data()),
          static_cast<std::streamsize>(sizeof(double) * flat_len));
  in.read(reinterpret_cast<char*>(target.data()),
          static_cast<std::streamsize>(sizeof(double) * flat_len));
  if (!in) throw std::runtime_error("checkpoint truncated: " + path);
  ckpt.net.main = Weights::from_flat(d, main);
  ckpt.net.target = Weights::from_flat(d, target);
  return ckpt;
}

}  // namespace gigcomp::vfa
