#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "feras/graph.hpp"

namespace feras {

// Node visibility of one host. Public nodes appear in every view, private
// nodes in exactly one.
struct HostView {
  int host_id = 0;
  std::vector<char> visible;  // indexed by global node id

  bool sees(int v) const { return visible[v] != 0; }
};

struct FederationPlan {
  int n_hosts = 1;
  double pi_private = 0.0;  // fraction of private nodes
  double kappa = 0.0;       // (N-1)/N * pi, unseen fraction per host
  std::vector<HostView> views;
  std::uint64_t seed = 0;
};

// Marks round(pi * num_nodes) nodes private, assigns each to a host drawn
// uniformly, and leaves the rest public. `exact_split` deals the private
// nodes round-robin after a shuffle instead of i.i.d. host draws.
FederationPlan assign_visibility(const Graph& g, int n_hosts, double pi_private,
                                 std::uint64_t seed, bool exact_split = false);

// Scripted visibility: one line per node, comma separated host ids.
FederationPlan load_visibility_csv(const Graph& g, int n_hosts, const std::string& path);

struct MaskedInputs {
  Matrix features;             // k x m1, rows of unseen nodes zeroed
  Matrix labels;               // k x classes, rows of unseen nodes zeroed
  std::vector<char> visible;   // k, per local row
};

// Gathers feature/label rows for sg.nodes and zeroes everything the view
// cannot see. Pure function; the subgraph topology stays shared.
MaskedInputs mask_inputs(const Subgraph& sg, const HostView& view,
                         const Matrix& features, const Matrix& labels);

}  // namespace feras
