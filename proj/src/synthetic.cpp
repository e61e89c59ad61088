#include "feras/synthetic.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "feras/rng.hpp"

namespace feras {

void SyntheticSpec::validate() const {
  if (blocks < 1 || nodes_per_block < 1)
    throw std::invalid_argument("sbm: blocks and nodes_per_block must be >= 1");
  if (!(0.0 <= p_out && p_out <= p_in && p_in <= 1.0))
    throw std::invalid_argument("sbm: need 0 <= p_out <= p_in <= 1");
  if (feature_dim < 1) throw std::invalid_argument("sbm: feature_dim must be >= 1");
  if (noise < 0.0) throw std::invalid_argument("sbm: noise must be >= 0");
  if (!(train_frac > 0.0 && val_frac >= 0.0 && train_frac + val_frac <= 1.0))
    throw std::invalid_argument("sbm: need train_frac > 0, val_frac >= 0, sum <= 1");
}

Graph generate_sbm(const SyntheticSpec& spec) {
  spec.validate();
  const int n = spec.blocks * spec.nodes_per_block;
  auto block_of = [&](int v) { return v / spec.nodes_per_block; };

  Rng edge_rng(derive_seed(spec.seed, 0x5b31u));
  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) {
      const double p = block_of(u) == block_of(v) ? spec.p_in : spec.p_out;
      if (edge_rng.uniform() < p) edges.emplace_back(u, v);
    }

  Rng feat_rng(derive_seed(spec.seed, 0x5b32u));
  Matrix features(n, spec.feature_dim);
  for (int v = 0; v < n; ++v) {
    features(v, block_of(v) % spec.feature_dim) = 1.0;
    for (int c = 0; c < spec.feature_dim; ++c)
      features(v, c) += spec.noise * feat_rng.normal();
  }

  Matrix labels(n, spec.blocks);
  for (int v = 0; v < n; ++v) labels(v, block_of(v)) = 1.0;

  // stratified per block so every block lands in every split
  Rng role_rng(derive_seed(spec.seed, 0x5b33u));
  std::vector<Role> roles(n, Role::kTrain);
  for (int b = 0; b < spec.blocks; ++b) {
    std::vector<int> ids(spec.nodes_per_block);
    std::iota(ids.begin(), ids.end(), b * spec.nodes_per_block);
    for (int i = static_cast<int>(ids.size()) - 1; i > 0; --i)
      std::swap(ids[i], ids[role_rng.uniform_int(i + 1)]);
    const int n_train = std::max(1, static_cast<int>(ids.size() * spec.train_frac));
    const int n_val = static_cast<int>(ids.size() * spec.val_frac);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (static_cast<int>(i) < n_train)
        roles[ids[i]] = Role::kTrain;
      else if (static_cast<int>(i) < n_train + n_val)
        roles[ids[i]] = Role::kVal;
      else
        roles[ids[i]] = Role::kTest;
    }
  }

  return make_graph(n, std::move(edges), std::move(features), std::move(labels),
                    std::move(roles), Task::kSinglelabel);
}

void write_dataset(const Graph& g, const std::string& dir_path) {
  namespace fs = std::filesystem;
  fs::create_directories(dir_path);
  const fs::path dir(dir_path);

  auto open = [](const fs::path& p) {
    std::ofstream os(p);
    if (!os) throw std::runtime_error("write_dataset: cannot open " + p.string());
    return os;
  };

  {
    std::ofstream os = open(dir / "edges.txt");
    for (int u = 0; u < g.num_nodes; ++u)
      for (int p = g.edges.indptr[u]; p < g.edges.indptr[u + 1]; ++p) {
        const int v = g.edges.indices[p];
        if (u < v) os << u << ' ' << v << '\n';
      }
  }
  {
    std::ofstream os = open(dir / "features.csv");
    char buf[64];
    for (int i = 0; i < g.num_nodes; ++i) {
      for (int c = 0; c < g.features.cols; ++c) {
        std::snprintf(buf, sizeof buf, "%.17g", g.features(i, c));
        os << (c ? "," : "") << buf;
      }
      os << '\n';
    }
  }
  {
    std::ofstream os = open(dir / "labels.csv");
    for (int i = 0; i < g.num_nodes; ++i) {
      for (int c = 0; c < g.labels.cols; ++c)
        os << (c ? "," : "") << static_cast<int>(g.labels(i, c));
      os << '\n';
    }
  }
  {
    std::ofstream os = open(dir / "roles.csv");
    for (Role r : g.roles)
      os << (r == Role::kTrain ? "train" : r == Role::kVal ? "val" : "test") << '\n';
  }
  {
    std::ofstream os = open(dir / "meta.json");
    os << "{\"task\": \""
       << (g.task == Task::kMultilabel ? "multilabel" : "singlelabel") << "\"}\n";
  }
}

}  // namespace feras
