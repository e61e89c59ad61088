#include "feras/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "feras/aggregator.hpp"
#include "feras/rng.hpp"

namespace feras {

TrainMode train_mode_from_string(const std::string& s) {
  if (s == "sequential") return TrainMode::kSequential;
  if (s == "parallel") return TrainMode::kParallel;
  throw std::invalid_argument("unknown mode '" + s + "'");
}

std::string to_string(TrainMode m) {
  return m == TrainMode::kSequential ? "sequential" : "parallel";
}

Variant variant_from_string(const std::string& s) {
  if (s == "feras") return Variant::kFeras;
  if (s == "isolated") return Variant::kIsolated;
  if (s == "share_weights_only") return Variant::kShareWeightsOnly;
  throw std::invalid_argument("unknown variant '" + s + "'");
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::kFeras: return "feras";
    case Variant::kIsolated: return "isolated";
    case Variant::kShareWeightsOnly: return "share_weights_only";
  }
  return "?";
}

void TrainConfig::validate(const Graph& g) const {
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (n_hosts < 1) throw std::invalid_argument("n_hosts must be >= 1");
  if (q < 1) throw std::invalid_argument("q must be >= 1");
  if (p_share < 1 || p_share > kNumConvLayers)
    throw std::invalid_argument("p_share out of range");
  if (hidden1 < 1 || hidden2 < 1) throw std::invalid_argument("hidden dims must be >= 1");
  if (eval_every < 1) throw std::invalid_argument("eval_every must be >= 1");
  hyper.validate();
  sampler.validate();
  if (plan.n_hosts != n_hosts || static_cast<int>(plan.views.size()) != n_hosts)
    throw std::invalid_argument("federation plan does not match n_hosts");
  for (const auto& view : plan.views)
    if (static_cast<int>(view.visible.size()) != g.num_nodes)
      throw std::invalid_argument("host view does not match graph size");
}

namespace {

constexpr double kDivergeLimit = 1e6;

const char* split_name(Role r) {
  switch (r) {
    case Role::kTrain: return "train";
    case Role::kVal: return "val";
    case Role::kTest: return "test";
  }
  return "?";
}

struct HostState {
  ModelParams params;
  Rng sample_rng{0};
  Subgraph sg;
  MaskedInputs mi;
  ForwardTape tape;
  Matrix embeddings;
  double last_loss = 0.0;
  bool skipped = false;     // sample had no visible labeled node
  std::string error;
};

TrainResult run_loop(const Graph& g, const TrainConfig& cfg, Variant variant) {
  cfg.validate(g);
  const auto t_start = std::chrono::steady_clock::now();

  const std::vector<int> train_nodes = g.nodes_with_role(Role::kTrain);
  if (train_nodes.empty()) throw std::invalid_argument("train: dataset has no train nodes");

  const int N = cfg.n_hosts;
  const bool share_emb = variant == Variant::kFeras;
  const bool share_w = variant != Variant::kIsolated;
  const bool sequential = cfg.mode == TrainMode::kSequential;

  TrainResult res;
  const ModelParams w0 = init_params(g.feature_dim(), cfg.hidden1, cfg.hidden2,
                                     g.num_classes(), cfg.seed);
  std::vector<HostState> hs(N);
  for (int n = 0; n < N; ++n) {
    hs[n].params = w0;
    hs[n].sample_rng = Rng(derive_seed(cfg.seed, 0x5a3fu, static_cast<std::uint64_t>(n)));
  }

  EmbeddingTable table(g.num_nodes, cfg.hidden1, N, /*persistent=*/sequential);
  WeightBuffer wbuf(N, cfg.q);

  std::vector<int> all_nodes(g.num_nodes);
  std::iota(all_nodes.begin(), all_nodes.end(), 0);
  const Subgraph full = induce_subgraph(g, all_nodes);

  // sample -> mask -> first conv block -> push
  auto phase1 = [&](int n, int t) {
    HostState& h = hs[n];
    const std::vector<int> nodes = sample(g, train_nodes, cfg.sampler, h.sample_rng);
    h.sg = induce_subgraph(g, nodes);
    h.mi = mask_inputs(h.sg, cfg.plan.views[n], g.features, g.labels);
    h.embeddings = forward_pre(h.params, h.sg.norm_adj, h.mi.features, cfg.p_share, h.tape);
    if (share_emb) table.push(n, h.sg.nodes, h.embeddings, h.mi.visible, t);
  };

  // pull -> remaining layers -> backward -> step
  auto phase2 = [&](int n) {
    HostState& h = hs[n];
    const int k = static_cast<int>(h.sg.nodes.size());
    Matrix x_tilde;
    std::vector<double> coeff(k, 1.0);
    if (share_emb) {
      x_tilde = table.pull(h.sg.nodes);
      for (int i = 0; i < k; ++i)
        coeff[i] = h.mi.visible[i] ? 1.0 / table.count(h.sg.nodes[i]) : 0.0;
    } else {
      x_tilde = h.embeddings;  // local embeddings stand in for the AS average
    }
    h.tape.visible = h.mi.visible;
    const Matrix logits =
        forward_post(h.params, h.sg.norm_adj, x_tilde, coeff, h.tape);

    int n_vis = 0;
    for (char c : h.mi.visible) n_vis += c != 0;
    if (n_vis == 0) {  // can only happen at extreme privacy with tiny samples
      h.skipped = true;
      h.last_loss = 0.0;
      return;
    }
    h.skipped = false;
    h.last_loss = loss(logits, h.mi.labels, h.mi.visible, h.params, cfg.hyper);
    const Gradients grads = backward(h.tape, h.mi.labels, h.params, cfg.hyper);
    sgd_step(h.params, grads, cfg.hyper.eta);
  };

  auto guarded = [&](int n, auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      hs[n].error = e.what();
    }
  };

  auto run_eval = [&](int t) {
    for (Role split : {Role::kVal, Role::kTest}) {
      double f1_sum = 0.0, loss_sum = 0.0;
      for (int n = 0; n < N; ++n) {
        MetricsRecord r = evaluate(hs[n].params, g, full.norm_adj, cfg.plan.views[n],
                                   split, cfg.hyper, cfg.p_share);
        r.epoch = t + 1;
        r.host = n;
        res.metrics.push_back(r);
        f1_sum += r.f1_micro;
        loss_sum += r.loss;
      }
      res.metrics.push_back({t + 1, -1, split, f1_sum / N, loss_sum / N});
      if (split == Role::kTest) res.final_mean_test_f1 = f1_sum / N;
    }
  };

  for (int t = 0; t < cfg.epochs && !res.diverged; ++t) {
    table.begin_iteration(t);

    if (sequential) {
      for (int n = 0; n < N; ++n)
        guarded(n, [&] { phase1(n, t); phase2(n); });
    } else {
#pragma omp parallel for schedule(static)
      for (int n = 0; n < N; ++n) guarded(n, [&] { phase1(n, t); });
#pragma omp parallel for schedule(static)
      for (int n = 0; n < N; ++n) guarded(n, [&] { phase2(n); });
    }

    for (int n = 0; n < N; ++n) {
      if (!hs[n].error.empty())
        throw std::runtime_error("host " + std::to_string(n) + ": " + hs[n].error);
      res.iter_loss.push_back(hs[n].last_loss);
      if (!std::isfinite(hs[n].last_loss) || hs[n].last_loss > kDivergeLimit ||
          hs[n].skipped) {
        res.diverged = true;
        res.diagnostic = hs[n].skipped
                             ? "host " + std::to_string(n) + " epoch " +
                                   std::to_string(t + 1) + ": no visible labeled nodes"
                             : "host " + std::to_string(n) + " epoch " +
                                   std::to_string(t + 1) + ": loss " +
                                   std::to_string(hs[n].last_loss);
        res.metrics.push_back({t + 1, n, Role::kTrain, 0.0, hs[n].last_loss});
      }
    }
    if (res.diverged) break;

    if (share_w) {
      for (int n = 0; n < N; ++n) wbuf.push(hs[n].params);
      if (wbuf.tick()) {
        const ModelParams avg = wbuf.average();
        for (int n = 0; n < N; ++n) hs[n].params = avg;
      } else {
        wbuf.pushes.clear();
      }
    }

    if ((t + 1) % cfg.eval_every == 0 || t == cfg.epochs - 1) run_eval(t);
  }

  res.params.reserve(N);
  for (int n = 0; n < N; ++n) res.params.push_back(std::move(hs[n].params));
  res.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return res;
}

}  // namespace

TrainResult train(const Graph& g, const TrainConfig& cfg) {
  return run_loop(g, cfg, Variant::kFeras);
}

TrainResult train_baseline(const Graph& g, const TrainConfig& cfg, Variant variant) {
  return run_loop(g, cfg, variant);
}

MetricsRecord evaluate(const ModelParams& params, const Graph& g, const Csr& full_adj,
                       const HostView& view, Role split, const Hyper& hyper,
                       int p_share) {
  std::vector<char> vis(g.num_nodes, 0);
  int n_split = 0;
  for (int v = 0; v < g.num_nodes; ++v) {
    if (g.roles[v] != split) continue;
    ++n_split;
    if (view.sees(v)) vis[v] = 1;
  }
  if (n_split == 0) throw std::invalid_argument("evaluate: empty split");
  if (std::none_of(vis.begin(), vis.end(), [](char c) { return c != 0; }))
    throw std::invalid_argument("evaluate: no split node visible to host");

  Matrix feats = g.features;
  for (int v = 0; v < g.num_nodes; ++v)
    if (!view.sees(v))
      for (int c = 0; c < feats.cols; ++c) feats(v, c) = 0.0;

  ForwardTape tape;
  const Matrix logits = forward_full(params, full_adj, feats, p_share, tape);
  const F1Task task =
      g.task == Task::kMultilabel ? F1Task::kMultilabel : F1Task::kSinglelabel;
  MetricsRecord r;
  r.epoch = 0;
  r.host = view.host_id;
  r.split = split;
  r.f1_micro = f1_micro(logits, g.labels, vis, task);
  r.loss = loss(logits, g.labels, vis, params, hyper);
  return r;
}

void write_metrics_csv(const std::string& path, const std::vector<MetricsRecord>& recs) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_metrics_csv: cannot open " + path);
  os << "epoch,host,split,f1_micro,loss\n";
  char buf[64];
  for (const auto& r : recs) {
    os << r.epoch << ',';
    if (r.host < 0)
      os << "mean";
    else
      os << r.host;
    os << ',' << split_name(r.split) << ',';
    std::snprintf(buf, sizeof buf, "%.17g", r.f1_micro);
    os << buf << ',';
    std::snprintf(buf, sizeof buf, "%.17g", r.loss);
    os << buf << '\n';
  }
  if (!os) throw std::runtime_error("write_metrics_csv: write failed for " + path);
}

}  // namespace feras
