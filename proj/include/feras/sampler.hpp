#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "feras/graph.hpp"
#include "feras/rng.hpp"

namespace feras {

enum class SamplerKind { kNode, kEdge, kRandomWalk, kMultiRandomWalk, kFull };

struct SamplerConfig {
  SamplerKind kind = SamplerKind::kNode;
  int node_budget = 1;  // node and mrw (mrw: frontier size = selection steps)
  int edge_budget = 1;  // edge
  int roots = 1;        // rw
  int depth = 1;        // rw

  void validate() const;
  bool operator==(const SamplerConfig&) const = default;
};

SamplerKind sampler_kind_from_string(const std::string& s);
std::string to_string(SamplerKind k);

// Draws one training subgraph node list. Nodes come exclusively from
// train_nodes, deduplicated and sorted ascending; never empty.
//   node: budget draws, p(v) proportional to 1 + train-degree(v)
//         (squared column norm of A + I restricted to the train subgraph)
//   edge: budget edge draws, p(u,v) proportional to 1/deg(u) + 1/deg(v),
//         endpoints collected
//   rw:   `roots` uniform roots each walking `depth` steps inside the
//         train-induced subgraph; walks stuck on isolated nodes truncate
//   mrw:  frontier walk: pick a frontier node with p proportional to its
//         degree, emit it, replace it by a uniform neighbour
//   full: the whole train set (debugging and fixed-instance studies)
std::vector<int> sample(const Graph& g, const std::vector<int>& train_nodes,
                        const SamplerConfig& cfg, Rng& rng);

}  // namespace feras
