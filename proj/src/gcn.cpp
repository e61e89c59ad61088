#include "feras/gcn.hpp"

#include <cmath>
#include <stdexcept>

#include "feras/kernels.hpp"
#include "feras/rng.hpp"

namespace feras {

using kernels::gemm;
using kernels::gemm_nt;
using kernels::gemm_tn;
using kernels::relu;
using kernels::relu_backward;
using kernels::spmm;

LossKind loss_kind_from_string(const std::string& s) {
  if (s == "squared") return LossKind::kSquared;
  if (s == "bce_multilabel") return LossKind::kBceMultilabel;
  if (s == "ce_singlelabel") return LossKind::kCeSinglelabel;
  throw std::invalid_argument("unknown loss_kind '" + s + "'");
}

std::string to_string(LossKind k) {
  switch (k) {
    case LossKind::kSquared: return "squared";
    case LossKind::kBceMultilabel: return "bce_multilabel";
    case LossKind::kCeSinglelabel: return "ce_singlelabel";
  }
  return "?";
}

void Hyper::validate() const {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw std::invalid_argument("eta must be > 0");
  if (lambda < 0.0 || !std::isfinite(lambda))
    throw std::invalid_argument("lambda must be >= 0");
}

double ModelParams::frobenius_norm() const {
  return std::sqrt(w1.frobenius_norm_sq() + w2.frobenius_norm_sq() +
                   w_dense.frobenius_norm_sq());
}

double ModelParams::distance(const ModelParams& o) const {
  double s = 0.0;
  auto acc = [&s](const Matrix& a, const Matrix& b) {
    for (std::size_t i = 0; i < a.data.size(); ++i) {
      const double d = a.data[i] - b.data[i];
      s += d * d;
    }
  };
  acc(w1, o.w1);
  acc(w2, o.w2);
  acc(w_dense, o.w_dense);
  return std::sqrt(s);
}

namespace {

Matrix glorot(int fan_in, int fan_out, Rng& rng) {
  Matrix m(fan_in, fan_out);
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  for (double& v : m.data) v = rng.uniform(-limit, limit);
  return m;
}

}  // namespace

ModelParams init_params(int m1, int m2, int m3, int num_classes, std::uint64_t seed) {
  Rng rng(derive_seed(seed, /*stream=*/0x1417u));
  ModelParams p;
  p.w1 = glorot(m1, m2, rng);
  p.w2 = glorot(m2, m3, rng);
  p.w_dense = glorot(m3, num_classes, rng);
  return p;
}

ModelParams average_params(const std::vector<ModelParams>& snapshots) {
  if (snapshots.empty()) throw std::invalid_argument("average_params: no snapshots");
  ModelParams out = snapshots[0];
  for (std::size_t i = 1; i < snapshots.size(); ++i) {
    kernels::axpy(out.w1, 1.0, snapshots[i].w1);
    kernels::axpy(out.w2, 1.0, snapshots[i].w2);
    kernels::axpy(out.w_dense, 1.0, snapshots[i].w_dense);
  }
  const double inv = 1.0 / static_cast<double>(snapshots.size());
  kernels::scale(out.w1, inv);
  kernels::scale(out.w2, inv);
  kernels::scale(out.w_dense, inv);
  return out;
}

Matrix forward_pre(const ModelParams& params, const Csr& norm_adj,
                   const Matrix& masked_features, int p_share, ForwardTape& tape) {
  if (p_share < 1 || p_share > kNumConvLayers)
    throw std::invalid_argument("forward_pre: p_share must be in [1, 2]");
  if (masked_features.cols != params.w1.rows)
    throw std::invalid_argument("forward_pre: feature dim disagrees with w1");
  if (norm_adj.n_cols != masked_features.rows)
    throw std::invalid_argument("forward_pre: adjacency/feature shape mismatch");

  tape = ForwardTape{};
  tape.adj = &norm_adj;
  tape.p_share = p_share;
  tape.ax.resize(kNumConvLayers);
  tape.pre.resize(kNumConvLayers);
  tape.visible.assign(masked_features.rows, 1);  // caller narrows to labeled nodes

  Matrix h = masked_features;
  for (int l = 0; l < p_share; ++l) {
    tape.ax[l] = spmm(norm_adj, h);
    tape.pre[l] = gemm(tape.ax[l], params.conv(l));
    h = relu(tape.pre[l]);
  }
  if (!h.all_finite()) throw std::runtime_error("forward_pre: non-finite embeddings");
  tape.pre_done = true;
  return h;
}

Matrix forward_post(const ModelParams& params, const Csr& norm_adj,
                    const Matrix& shared_embeddings,
                    const std::vector<double>& share_coeff, ForwardTape& tape) {
  if (!tape.pre_done || tape.consumed)
    throw std::runtime_error("forward_post: tape not primed by forward_pre");
  if (share_coeff.size() != static_cast<std::size_t>(shared_embeddings.rows))
    throw std::invalid_argument("forward_post: share_coeff length mismatch");
  if (shared_embeddings.cols != params.conv(tape.p_share - 1).cols)
    throw std::invalid_argument("forward_post: embedding width mismatch");

  tape.x_tilde = shared_embeddings;
  tape.share_coeff = share_coeff;

  Matrix h = shared_embeddings;
  for (int l = tape.p_share; l < kNumConvLayers; ++l) {
    tape.ax[l] = spmm(norm_adj, h);
    tape.pre[l] = gemm(tape.ax[l], params.conv(l));
    h = relu(tape.pre[l]);
  }
  tape.head_in = h;
  tape.logits = gemm(h, params.w_dense);
  tape.post_done = true;
  return tape.logits;
}

Matrix forward_full(const ModelParams& params, const Csr& norm_adj,
                    const Matrix& masked_features, int p_share, ForwardTape& tape) {
  Matrix e = forward_pre(params, norm_adj, masked_features, p_share, tape);
  const std::vector<double> identity(e.rows, 1.0);
  return forward_post(params, norm_adj, e, identity, tape);
}

namespace {

int count_visible(const std::vector<char>& visible) {
  int n = 0;
  for (char c : visible) n += c != 0;
  return n;
}

double sigmoid(double z) {
  return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

double data_loss(const Matrix& logits, const Matrix& labels,
                 const std::vector<char>& visible, LossKind kind, int n_vis) {
  double total = 0.0;
  for (int i = 0; i < logits.rows; ++i) {
    if (!visible[i]) continue;
    const double* z = logits.row_ptr(i);
    const double* y = labels.row_ptr(i);
    switch (kind) {
      case LossKind::kSquared: {
        for (int c = 0; c < logits.cols; ++c) {
          const double d = z[c] - y[c];
          total += 0.5 * d * d;
        }
        break;
      }
      case LossKind::kBceMultilabel: {
        // max(z,0) - z*y + log(1 + exp(-|z|)), stable in both tails
        for (int c = 0; c < logits.cols; ++c)
          total += std::max(z[c], 0.0) - z[c] * y[c] + std::log1p(std::exp(-std::abs(z[c])));
        break;
      }
      case LossKind::kCeSinglelabel: {
        double zmax = z[0];
        for (int c = 1; c < logits.cols; ++c) zmax = std::max(zmax, z[c]);
        double sum = 0.0, zy = 0.0;
        for (int c = 0; c < logits.cols; ++c) {
          sum += std::exp(z[c] - zmax);
          zy += z[c] * y[c];
        }
        total += zmax + std::log(sum) - zy;
        break;
      }
    }
  }
  return total / n_vis;
}

// d(data_loss)/d(logits); zero rows for masked nodes
Matrix loss_gradient(const Matrix& logits, const Matrix& labels,
                     const std::vector<char>& visible, LossKind kind, int n_vis) {
  Matrix g(logits.rows, logits.cols);
  const double inv = 1.0 / n_vis;
  for (int i = 0; i < logits.rows; ++i) {
    if (!visible[i]) continue;
    const double* z = logits.row_ptr(i);
    const double* y = labels.row_ptr(i);
    double* out = g.row_ptr(i);
    switch (kind) {
      case LossKind::kSquared:
        for (int c = 0; c < logits.cols; ++c) out[c] = (z[c] - y[c]) * inv;
        break;
      case LossKind::kBceMultilabel:
        for (int c = 0; c < logits.cols; ++c) out[c] = (sigmoid(z[c]) - y[c]) * inv;
        break;
      case LossKind::kCeSinglelabel: {
        double zmax = z[0];
        for (int c = 1; c < logits.cols; ++c) zmax = std::max(zmax, z[c]);
        double sum = 0.0;
        for (int c = 0; c < logits.cols; ++c) sum += std::exp(z[c] - zmax);
        for (int c = 0; c < logits.cols; ++c)
          out[c] = (std::exp(z[c] - zmax) / sum - y[c]) * inv;
        break;
      }
    }
  }
  return g;
}

}  // namespace

double loss(const Matrix& logits, const Matrix& labels, const std::vector<char>& visible,
            const ModelParams& params, const Hyper& hyper) {
  if (static_cast<int>(visible.size()) != logits.rows || !logits.same_shape(labels))
    throw std::invalid_argument("loss: shape mismatch");
  const int n_vis = count_visible(visible);
  if (n_vis == 0) throw std::invalid_argument("loss: all nodes masked");
  const double reg = 0.5 * hyper.lambda *
                     (params.w1.frobenius_norm_sq() + params.w2.frobenius_norm_sq() +
                      params.w_dense.frobenius_norm_sq());
  return data_loss(logits, labels, visible, hyper.loss_kind, n_vis) + reg;
}

Gradients backward(ForwardTape& tape, const Matrix& labels, const ModelParams& params,
                   const Hyper& hyper) {
  if (!tape.post_done || tape.consumed) throw std::runtime_error("backward: stale tape");
  if (static_cast<int>(tape.visible.size()) != tape.logits.rows ||
      !tape.logits.same_shape(labels))
    throw std::invalid_argument("backward: label/mask shape mismatch");
  tape.consumed = true;

  const int n_vis = count_visible(tape.visible);
  if (n_vis == 0) throw std::invalid_argument("backward: all nodes masked");

  Gradients grads;
  Matrix g = loss_gradient(tape.logits, labels, tape.visible, hyper.loss_kind, n_vis);

  grads.w_dense = gemm_tn(tape.head_in, g);
  kernels::axpy(grads.w_dense, hyper.lambda, params.w_dense);
  Matrix dh = gemm_nt(g, params.w_dense);

  for (int l = kNumConvLayers - 1; l >= tape.p_share; --l) {
    Matrix dpre = relu_backward(dh, tape.pre[l]);
    Matrix gw = gemm_tn(tape.ax[l], dpre);
    kernels::axpy(gw, hyper.lambda, params.conv(l));
    (l == 0 ? grads.w1 : grads.w2) = std::move(gw);
    dh = spmm(*tape.adj, gemm_nt(dpre, params.conv(l)));
  }

  // share layer: only the host's own pushed rows carry gradient, each with
  // its averaging weight
  for (int i = 0; i < dh.rows; ++i) {
    const double coeff = tape.share_coeff[i];
    double* row = dh.row_ptr(i);
    for (int c = 0; c < dh.cols; ++c) row[c] *= coeff;
  }

  for (int l = tape.p_share - 1; l >= 0; --l) {
    Matrix dpre = relu_backward(dh, tape.pre[l]);
    Matrix gw = gemm_tn(tape.ax[l], dpre);
    kernels::axpy(gw, hyper.lambda, params.conv(l));
    (l == 0 ? grads.w1 : grads.w2) = std::move(gw);
    if (l > 0) dh = spmm(*tape.adj, gemm_nt(dpre, params.conv(l)));
  }
  return grads;
}

void sgd_step(ModelParams& params, const Gradients& grads, double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("sgd_step: eta must be > 0");
  if (!grads.all_finite()) throw std::runtime_error("sgd_step: non-finite gradients");
  kernels::axpy(params.w1, -eta, grads.w1);
  kernels::axpy(params.w2, -eta, grads.w2);
  kernels::axpy(params.w_dense, -eta, grads.w_dense);
}

double f1_micro(const Matrix& logits, const Matrix& labels,
                const std::vector<char>& visible, F1Task task) {
  if (count_visible(visible) == 0) throw std::invalid_argument("f1_micro: empty mask");
  long tp = 0, fp = 0, fn = 0;
  for (int i = 0; i < logits.rows; ++i) {
    if (!visible[i]) continue;
    const double* z = logits.row_ptr(i);
    const double* y = labels.row_ptr(i);
    if (task == F1Task::kMultilabel) {
      for (int c = 0; c < logits.cols; ++c) {
        const bool pred = z[c] > 0.0;  // sigmoid(z) > 0.5
        const bool truth = y[c] != 0.0;
        tp += pred && truth;
        fp += pred && !truth;
        fn += !pred && truth;
      }
    } else {
      int arg = 0;
      for (int c = 1; c < logits.cols; ++c)
        if (z[c] > z[arg]) arg = c;
      for (int c = 0; c < logits.cols; ++c) {
        const bool pred = c == arg;
        const bool truth = y[c] != 0.0;
        tp += pred && truth;
        fp += pred && !truth;
        fn += !pred && truth;
      }
    }
  }
  if (tp == 0 && fp == 0 && fn == 0) return 1.0;  // nothing to predict, nothing wrong
  if (tp == 0) return 0.0;
  return 2.0 * tp / (2.0 * tp + fp + fn);
}

}  // namespace feras
