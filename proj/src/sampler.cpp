#include "feras/sampler.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace feras {

namespace {

// adjacency restricted to train nodes, in train-local indices
struct TrainSubgraph {
  std::vector<int> nodes;            // global ids, sorted
  std::vector<int> local_of_global;  // -1 when not a train node
  Csr adj;

  int degree(int local) const { return adj.row_degree(local); }
};

TrainSubgraph build_train_subgraph(const Graph& g, const std::vector<int>& train_nodes) {
  TrainSubgraph ts;
  ts.nodes = train_nodes;
  std::sort(ts.nodes.begin(), ts.nodes.end());
  ts.nodes.erase(std::unique(ts.nodes.begin(), ts.nodes.end()), ts.nodes.end());
  ts.local_of_global.assign(g.num_nodes, -1);
  for (int i = 0; i < static_cast<int>(ts.nodes.size()); ++i)
    ts.local_of_global[ts.nodes[i]] = i;

  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < static_cast<int>(ts.nodes.size()); ++i) {
    const int v = ts.nodes[i];
    for (int p = g.edges.indptr[v]; p < g.edges.indptr[v + 1]; ++p) {
      const int lu = ts.local_of_global[g.edges.indices[p]];
      if (lu > i) edges.emplace_back(i, lu);
    }
  }
  ts.adj = csr_from_undirected_edges(static_cast<int>(ts.nodes.size()), std::move(edges));
  return ts;
}

// draws an index from an unnormalized weight table via its cumulative sums
int draw_weighted(const std::vector<double>& cumulative, Rng& rng) {
  const double u = rng.uniform() * cumulative.back();
  return static_cast<int>(
      std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
}

std::vector<double> cumulative_sums(const std::vector<double>& w) {
  std::vector<double> c(w.size());
  double run = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    run += w[i];
    c[i] = run;
  }
  return c;
}

std::vector<int> finalize(const TrainSubgraph& ts, std::vector<int> locals) {
  std::sort(locals.begin(), locals.end());
  locals.erase(std::unique(locals.begin(), locals.end()), locals.end());
  std::vector<int> out;
  out.reserve(locals.size());
  for (int l : locals) out.push_back(ts.nodes[l]);
  return out;
}

std::vector<int> sample_node(const TrainSubgraph& ts, int budget, Rng& rng) {
  const int n = static_cast<int>(ts.nodes.size());
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = 1.0 + ts.degree(i);
  const auto cum = cumulative_sums(w);
  std::vector<int> picked;
  picked.reserve(budget);
  for (int d = 0; d < budget; ++d) picked.push_back(draw_weighted(cum, rng));
  return finalize(ts, std::move(picked));
}

std::vector<int> sample_edge(const TrainSubgraph& ts, int budget, Rng& rng) {
  std::vector<std::pair<int, int>> edges;
  std::vector<double> w;
  for (int u = 0; u < ts.adj.n_rows; ++u)
    for (int p = ts.adj.indptr[u]; p < ts.adj.indptr[u + 1]; ++p) {
      const int v = ts.adj.indices[p];
      if (v > u) {
        edges.emplace_back(u, v);
        w.push_back(1.0 / ts.degree(u) + 1.0 / ts.degree(v));
      }
    }
  std::vector<int> picked;
  if (edges.empty()) {
    // edgeless train set: degenerate fallback to uniform node draws
    const int n = static_cast<int>(ts.nodes.size());
    for (int d = 0; d < budget; ++d)
      picked.push_back(static_cast<int>(rng.uniform_int(n)));
    return finalize(ts, std::move(picked));
  }
  const auto cum = cumulative_sums(w);
  picked.reserve(2 * budget);
  for (int d = 0; d < budget; ++d) {
    const auto& [u, v] = edges[draw_weighted(cum, rng)];
    picked.push_back(u);
    picked.push_back(v);
  }
  return finalize(ts, std::move(picked));
}

std::vector<int> sample_rw(const TrainSubgraph& ts, int roots, int depth, Rng& rng) {
  const int n = static_cast<int>(ts.nodes.size());
  std::vector<int> picked;
  picked.reserve(static_cast<std::size_t>(roots) * (depth + 1));
  for (int r = 0; r < roots; ++r) {
    int cur = static_cast<int>(rng.uniform_int(n));
    picked.push_back(cur);
    for (int s = 0; s < depth; ++s) {
      const int deg = ts.degree(cur);
      if (deg == 0) break;  // stuck walk truncates
      cur = ts.adj.indices[ts.adj.indptr[cur] + static_cast<int>(rng.uniform_int(deg))];
      picked.push_back(cur);
    }
  }
  return finalize(ts, std::move(picked));
}

std::vector<int> sample_mrw(const TrainSubgraph& ts, int frontier_size, Rng& rng) {
  const int n = static_cast<int>(ts.nodes.size());
  std::vector<int> frontier(frontier_size);
  for (int i = 0; i < frontier_size; ++i)
    frontier[i] = static_cast<int>(rng.uniform_int(n));

  std::vector<int> picked;
  picked.reserve(frontier_size);
  std::vector<double> w(frontier_size);
  for (int step = 0; step < frontier_size; ++step) {
    for (int i = 0; i < frontier_size; ++i) w[i] = 1.0 + ts.degree(frontier[i]);
    const int slot = draw_weighted(cumulative_sums(w), rng);
    const int u = frontier[slot];
    picked.push_back(u);
    const int deg = ts.degree(u);
    frontier[slot] = deg == 0
                         ? static_cast<int>(rng.uniform_int(n))
                         : ts.adj.indices[ts.adj.indptr[u] +
                                          static_cast<int>(rng.uniform_int(deg))];
  }
  return finalize(ts, std::move(picked));
}

}  // namespace

void SamplerConfig::validate() const {
  switch (kind) {
    case SamplerKind::kNode:
    case SamplerKind::kMultiRandomWalk:
      if (node_budget < 1) throw std::invalid_argument("sampler: node_budget must be >= 1");
      break;
    case SamplerKind::kEdge:
      if (edge_budget < 1) throw std::invalid_argument("sampler: edge_budget must be >= 1");
      break;
    case SamplerKind::kRandomWalk:
      if (roots < 1 || depth < 1)
        throw std::invalid_argument("sampler: roots and depth must be >= 1");
      break;
    case SamplerKind::kFull:
      break;
  }
}

SamplerKind sampler_kind_from_string(const std::string& s) {
  if (s == "node") return SamplerKind::kNode;
  if (s == "edge") return SamplerKind::kEdge;
  if (s == "rw") return SamplerKind::kRandomWalk;
  if (s == "mrw") return SamplerKind::kMultiRandomWalk;
  if (s == "full") return SamplerKind::kFull;
  throw std::invalid_argument("unknown sampler kind '" + s + "'");
}

std::string to_string(SamplerKind k) {
  switch (k) {
    case SamplerKind::kNode: return "node";
    case SamplerKind::kEdge: return "edge";
    case SamplerKind::kRandomWalk: return "rw";
    case SamplerKind::kMultiRandomWalk: return "mrw";
    case SamplerKind::kFull: return "full";
  }
  return "?";
}

std::vector<int> sample(const Graph& g, const std::vector<int>& train_nodes,
                        const SamplerConfig& cfg, Rng& rng) {
  if (train_nodes.empty()) throw std::invalid_argument("sample: train_nodes empty");
  cfg.validate();

  if (cfg.kind == SamplerKind::kFull) {
    std::vector<int> out = train_nodes;
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  const TrainSubgraph ts = build_train_subgraph(g, train_nodes);
  switch (cfg.kind) {
    case SamplerKind::kNode: return sample_node(ts, cfg.node_budget, rng);
    case SamplerKind::kEdge: return sample_edge(ts, cfg.edge_budget, rng);
    case SamplerKind::kRandomWalk: return sample_rw(ts, cfg.roots, cfg.depth, rng);
    case SamplerKind::kMultiRandomWalk: return sample_mrw(ts, cfg.node_budget, rng);
    default: break;
  }
  throw std::logic_error("unreachable");
}

}  // namespace feras
