#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "feras/federation.hpp"
#include "feras/gcn.hpp"
#include "feras/graph.hpp"
#include "feras/sampler.hpp"

namespace feras {

enum class TrainMode { kSequential, kParallel };
enum class Variant { kFeras, kIsolated, kShareWeightsOnly };

TrainMode train_mode_from_string(const std::string& s);
std::string to_string(TrainMode m);
Variant variant_from_string(const std::string& s);
std::string to_string(Variant v);

struct TrainConfig {
  int epochs = 100;
  int n_hosts = 1;
  int q = 10;             // weight-share period
  int p_share = 1;        // conv layer after which embeddings are shared
  int hidden1 = 64;       // m2
  int hidden2 = 64;       // m3
  SamplerConfig sampler;
  Hyper hyper;
  FederationPlan plan;
  TrainMode mode = TrainMode::kSequential;
  int eval_every = 10;
  std::uint64_t seed = 0;

  void validate(const Graph& g) const;
};

struct MetricsRecord {
  int epoch;      // 1-indexed
  int host;       // -1 = mean over hosts
  Role split;
  double f1_micro;
  double loss;
};

struct TrainResult {
  std::vector<ModelParams> params;  // per host, post-training
  std::vector<MetricsRecord> metrics;
  std::vector<double> iter_loss;    // minibatch loss, [epoch * n_hosts + host]
  bool diverged = false;
  std::string diagnostic;
  double final_mean_test_f1 = 0.0;
  double wall_seconds = 0.0;
};

// Full federated loop: per epoch, each host samples, masks, runs the first
// conv layer(s), pushes/pulls embeddings through the table, finishes the
// forward pass, steps, and pushes weights; weights merge every q epochs.
TrainResult train(const Graph& g, const TrainConfig& cfg);

// isolated: no table, no weight merge. share_weights_only: no table, merges.
TrainResult train_baseline(const Graph& g, const TrainConfig& cfg, Variant variant);

// Full-graph inference under the host's masking; embeddings stay local.
// Scores split nodes visible to the host.
MetricsRecord evaluate(const ModelParams& params, const Graph& g, const Csr& full_adj,
                       const HostView& view, Role split, const Hyper& hyper,
                       int p_share);

void write_metrics_csv(const std::string& path, const std::vector<MetricsRecord>& recs);

}  // namespace feras
