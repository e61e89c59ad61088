#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "feras/csr.hpp"
#include "feras/matrix.hpp"

namespace feras {

enum class LossKind { kSquared, kBceMultilabel, kCeSinglelabel };

LossKind loss_kind_from_string(const std::string& s);
std::string to_string(LossKind k);

struct Hyper {
  double eta = 0.1;
  double lambda = 0.0;
  LossKind loss_kind = LossKind::kSquared;

  // Lipschitz constant of the loss derivative in the logits
  double c_star() const {
    return loss_kind == LossKind::kBceMultilabel ? 0.25 : 1.0;
  }
  void validate() const;
  bool operator==(const Hyper&) const = default;
};

// Two convolution matrices plus the dense head. Value-semantic: hosts work
// on their own snapshots.
struct ModelParams {
  Matrix w1;       // m1 x m2
  Matrix w2;       // m2 x m3
  Matrix w_dense;  // m3 x num_classes

  Matrix& conv(int l) { return l == 0 ? w1 : w2; }
  const Matrix& conv(int l) const { return l == 0 ? w1 : w2; }

  bool all_finite() const {
    return w1.all_finite() && w2.all_finite() && w_dense.all_finite();
  }
  double frobenius_norm() const;
  double distance(const ModelParams& o) const;  // Frobenius over all matrices
};

constexpr int kNumConvLayers = 2;

// Glorot-uniform, deterministic per seed.
ModelParams init_params(int m1, int m2, int m3, int num_classes, std::uint64_t seed);

ModelParams average_params(const std::vector<ModelParams>& snapshots);

// Cached activations for one forward pass; feeds exactly one backward call.
struct ForwardTape {
  const Csr* adj = nullptr;
  int p_share = 1;
  std::vector<Matrix> ax;        // per conv layer, A * input
  std::vector<Matrix> pre;       // per conv layer, pre-activation
  Matrix x_tilde;                // shared embeddings, input of layer p
  std::vector<double> share_coeff;  // per row, host's own averaging weight
  Matrix head_in;                // dense-head input
  Matrix logits;
  std::vector<char> visible;
  bool pre_done = false;
  bool post_done = false;
  bool consumed = false;
};

// Convolution layers 1..p: embeddings = relu(A x w) chained. p in {1,2}.
Matrix forward_pre(const ModelParams& params, const Csr& norm_adj,
                   const Matrix& masked_features, int p_share, ForwardTape& tape);

// Remaining layers from the shared embeddings through the dense head.
// share_coeff holds each row's weight of the host's own push inside the
// pulled average (1 for identity sharing, 0 when the push was blank).
Matrix forward_post(const ModelParams& params, const Csr& norm_adj,
                    const Matrix& shared_embeddings,
                    const std::vector<double>& share_coeff, ForwardTape& tape);

// Whole network with identity sharing (local inference, single host).
Matrix forward_full(const ModelParams& params, const Csr& norm_adj,
                    const Matrix& masked_features, int p_share, ForwardTape& tape);

// Mean per-visible-node data loss plus lambda/2 * ||w||_F^2 over all three
// matrices. Throws when the mask is all false.
double loss(const Matrix& logits, const Matrix& labels, const std::vector<char>& visible,
            const ModelParams& params, const Hyper& hyper);

struct Gradients {
  Matrix w1;
  Matrix w2;
  Matrix w_dense;

  bool all_finite() const {
    return w1.all_finite() && w2.all_finite() && w_dense.all_finite();
  }
};

// Exact gradients of the regularized objective. Masked rows contribute no
// data gradient; the share layer passes gradient only through the host's own
// contribution, scaled by its averaging weight.
Gradients backward(ForwardTape& tape, const Matrix& labels, const ModelParams& params,
                   const Hyper& hyper);

void sgd_step(ModelParams& params, const Gradients& grads, double eta);

enum class F1Task { kMultilabel, kSinglelabel };

// Micro-averaged F1 over all (node, class) decisions of unmasked rows.
// Multilabel thresholds logits at 0, singlelabel takes the argmax.
double f1_micro(const Matrix& logits, const Matrix& labels,
                const std::vector<char>& visible, F1Task task);

}  // namespace feras
