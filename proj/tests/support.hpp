#pragma once

// Shared fixtures and oracles for the unit and acceptance tests. Everything
// here is test-side only and intentionally written independently of the
// library internals it checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "feras/config.hpp"
#include "feras/gcn.hpp"
#include "feras/graph.hpp"
#include "feras/kernels.hpp"
#include "feras/rng.hpp"
#include "feras/sampler.hpp"
#include "feras/theory.hpp"
#include "feras/trainer.hpp"

namespace feras::testsup {

// Erdos-Renyi-ish random graph with valid one-hot or multilabel labels.
inline Graph random_graph(int n, double p_edge, int m1, int classes, Task task,
                          std::uint64_t seed, bool nonneg_features = false) {
  Rng rng(mix_seed(seed));
  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (rng.uniform() < p_edge) edges.emplace_back(u, v);

  Matrix features(n, m1);
  for (double& x : features.data)
    x = nonneg_features ? rng.uniform(0.05, 1.0) : rng.uniform(-1.0, 1.0);

  Matrix labels(n, classes);
  for (int v = 0; v < n; ++v) {
    if (task == Task::kSinglelabel) {
      labels(v, static_cast<int>(rng.uniform_int(classes))) = 1.0;
    } else {
      int set = 0;
      for (int c = 0; c < classes; ++c)
        if (rng.uniform() < 0.4) {
          labels(v, c) = 1.0;
          ++set;
        }
      if (set == 0) labels(v, static_cast<int>(rng.uniform_int(classes))) = 1.0;
    }
  }

  std::vector<Role> roles(n, Role::kTrain);
  for (int v = 0; v < n; ++v) {
    const double u = rng.uniform();
    roles[v] = u < 0.66 ? Role::kTrain : (u < 0.76 ? Role::kVal : Role::kTest);
  }
  // tiny graphs must keep at least one node per split
  if (n >= 3) {
    roles[0] = Role::kTrain;
    roles[1] = Role::kVal;
    roles[2] = Role::kTest;
  }
  return make_graph(n, std::move(edges), std::move(features), std::move(labels),
                    std::move(roles), task);
}

// One host's federated objective on a frozen instance: other hosts' pushes
// enter as constants, exactly as the training loop treats them.
struct FrozenHostObjective {
  const FixedInstance* inst;
  int host;
  Matrix x_hat_others;  // stacked pushes of the other hosts, own block zero

  double operator()(const ModelParams& params) const {
    const auto& sg = inst->sgs[host];
    const auto& mi = inst->mis[host];
    ForwardTape tape;
    const Matrix e =
        forward_pre(params, sg.norm_adj, mi.features, inst->p_share, tape);
    Matrix x_hat = x_hat_others;
    const int off = inst->block_offset[host];
    for (int i = 0; i < e.rows; ++i) {
      if (!mi.visible[i]) continue;
      for (int c = 0; c < e.cols; ++c) x_hat(off + i, c) = e(i, c);
    }
    const Matrix x_tilde = kernels::gemm(inst->thetas[host], x_hat);
    std::vector<double> coeff(sg.nodes.size());
    for (std::size_t i = 0; i < coeff.size(); ++i)
      coeff[i] = inst->thetas[host](static_cast<int>(i), off + static_cast<int>(i));
    const Matrix logits = forward_post(params, sg.norm_adj, x_tilde, coeff, tape);
    return loss(logits, mi.labels, mi.visible, params, inst->hyper);
  }

  // Smallest |pre-activation| across the relu layers. Finite differencing is
  // only trustworthy when every kink is further than the probe step away.
  double min_abs_preactivation(const ModelParams& params) const {
    const auto& sg = inst->sgs[host];
    const auto& mi = inst->mis[host];
    ForwardTape tape;
    const Matrix e =
        forward_pre(params, sg.norm_adj, mi.features, inst->p_share, tape);
    Matrix x_hat = x_hat_others;
    const int off = inst->block_offset[host];
    for (int i = 0; i < e.rows; ++i) {
      if (!mi.visible[i]) continue;
      for (int c = 0; c < e.cols; ++c) x_hat(off + i, c) = e(i, c);
    }
    const Matrix x_tilde = kernels::gemm(inst->thetas[host], x_hat);
    std::vector<double> coeff(sg.nodes.size());
    for (std::size_t i = 0; i < coeff.size(); ++i)
      coeff[i] = inst->thetas[host](static_cast<int>(i), off + static_cast<int>(i));
    forward_post(params, sg.norm_adj, x_tilde, coeff, tape);
    double m = std::numeric_limits<double>::infinity();
    for (const Matrix& pre : tape.pre)
      for (double v : pre.data) m = std::min(m, std::abs(v));
    return m;
  }

  Gradients analytic(const ModelParams& params) const {
    const auto& sg = inst->sgs[host];
    const auto& mi = inst->mis[host];
    ForwardTape tape;
    const Matrix e =
        forward_pre(params, sg.norm_adj, mi.features, inst->p_share, tape);
    Matrix x_hat = x_hat_others;
    const int off = inst->block_offset[host];
    for (int i = 0; i < e.rows; ++i) {
      if (!mi.visible[i]) continue;
      for (int c = 0; c < e.cols; ++c) x_hat(off + i, c) = e(i, c);
    }
    const Matrix x_tilde = kernels::gemm(inst->thetas[host], x_hat);
    std::vector<double> coeff(sg.nodes.size());
    for (std::size_t i = 0; i < coeff.size(); ++i)
      coeff[i] = inst->thetas[host](static_cast<int>(i), off + static_cast<int>(i));
    tape.visible = mi.visible;
    forward_post(params, sg.norm_adj, x_tilde, coeff, tape);
    return backward(tape, mi.labels, params, inst->hyper);
  }
};

// Central finite differences over every coordinate of every weight matrix.
// Returns the worst mixed relative/absolute discrepancy.
template <typename Objective>
double max_gradient_error(const Objective& obj, const ModelParams& at,
                          const Gradients& analytic, double h = 1e-6) {
  double worst = 0.0;
  ModelParams p = at;
  const std::pair<Matrix*, const Matrix*> mats[] = {
      {&p.w1, &analytic.w1}, {&p.w2, &analytic.w2}, {&p.w_dense, &analytic.w_dense}};
  for (auto [m, g] : mats) {
    for (std::size_t i = 0; i < m->data.size(); ++i) {
      const double orig = m->data[i];
      m->data[i] = orig + h;
      const double fp = obj(p);
      m->data[i] = orig - h;
      const double fm = obj(p);
      m->data[i] = orig;
      const double fd = (fp - fm) / (2.0 * h);
      const double a = g->data[i];
      const double err = std::abs(a - fd) / (std::max(std::abs(a), std::abs(fd)) + 1e-4);
      worst = std::max(worst, err);
    }
  }
  return worst;
}

// Monolithic single-machine GraphSAINT-style loop with no federation
// plumbing at all; consumes the same sampler stream as host 0 so the
// subgraph sequence coincides with a 1-host run.
inline std::vector<double> centralized_losses(const Graph& g, const TrainConfig& cfg) {
  const auto train_nodes = g.nodes_with_role(Role::kTrain);
  ModelParams params = init_params(g.feature_dim(), cfg.hidden1, cfg.hidden2,
                                   g.num_classes(), cfg.seed);
  Rng rng(derive_seed(cfg.seed, 0x5a3fu, 0));
  std::vector<double> losses;
  for (int t = 0; t < cfg.epochs; ++t) {
    const auto nodes = sample(g, train_nodes, cfg.sampler, rng);
    const Subgraph sg = induce_subgraph(g, nodes);
    Matrix feats(sg.size(), g.feature_dim());
    Matrix labels(sg.size(), g.num_classes());
    for (int i = 0; i < sg.size(); ++i) {
      for (int c = 0; c < feats.cols; ++c) feats(i, c) = g.features(sg.nodes[i], c);
      for (int c = 0; c < labels.cols; ++c) labels(i, c) = g.labels(sg.nodes[i], c);
    }
    ForwardTape tape;
    const Matrix logits = forward_full(params, sg.norm_adj, feats, cfg.p_share, tape);
    const std::vector<char> all(sg.size(), 1);
    losses.push_back(loss(logits, labels, all, params, cfg.hyper));
    const Gradients grads = backward(tape, labels, params, cfg.hyper);
    sgd_step(params, grads, cfg.hyper.eta);
  }
  return losses;
}

}  // namespace feras::testsup
