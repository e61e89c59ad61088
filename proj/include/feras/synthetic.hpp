#pragma once

#include <cstdint>
#include <string>

#include "feras/graph.hpp"

namespace feras {

// Stochastic block model: desk-scale stand-in for the public benchmark
// graphs. Labels are the block ids (singlelabel task), features a one-hot
// block signal plus Gaussian noise, roles a stratified train/val/test split
// (remainder goes to test).
struct SyntheticSpec {
  int blocks = 2;
  int nodes_per_block = 50;
  double p_in = 0.1;
  double p_out = 0.01;
  int feature_dim = 8;
  double noise = 0.1;
  double train_frac = 0.66;
  double val_frac = 0.10;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const SyntheticSpec&) const = default;
};

Graph generate_sbm(const SyntheticSpec& spec);

// Writes the dataset directory format (edges.txt, features.csv, labels.csv,
// roles.csv, meta.json). Creates the directory if needed.
void write_dataset(const Graph& g, const std::string& dir_path);

}  // namespace feras
