#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "feras/graph.hpp"
#include "feras/sampler.hpp"
#include "feras/synthetic.hpp"
#include "feras/trainer.hpp"

namespace feras {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One experiment, fully seeded. Either dataset_path or synthetic is set.
struct ExperimentConfig {
  std::string dataset_path;
  bool has_synthetic = false;
  SyntheticSpec synthetic;

  Variant variant = Variant::kFeras;
  std::string output_dir = "out";

  // federation
  double pi_private = 0.0;
  bool exact_split = false;
  std::string visibility_csv;  // optional override of the random assignment

  // train
  int epochs = 100;
  int n_hosts = 1;
  int q = 10;
  TrainMode mode = TrainMode::kSequential;
  int eval_every = 10;
  std::uint64_t seed = 0;
  SamplerConfig sampler;

  // gcn
  int hidden1 = 64;
  int hidden2 = 64;
  int p_share = 1;
  Hyper hyper;

  bool operator==(const ExperimentConfig&) const = default;
};

ExperimentConfig parse_config(const std::string& json_text);  // throws ConfigError
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& cfg);

// Loads the dataset directory or generates the synthetic graph.
Graph realize_dataset(const ExperimentConfig& cfg);

// Builds the federation plan and the trainer view of the config.
TrainConfig make_train_config(const ExperimentConfig& cfg, const Graph& g);

}  // namespace feras
