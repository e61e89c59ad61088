#pragma once

#include <string>
#include <vector>

#include "feras/csr.hpp"
#include "feras/matrix.hpp"

namespace feras {

enum class Role { kTrain, kVal, kTest };
enum class Task { kMultilabel, kSinglelabel };

// Full training graph: undirected CSR adjacency without self loops, node
// features, 0/1 label rows and a train/val/test role per node. Immutable
// after construction, safe to read from any number of workers.
struct Graph {
  int num_nodes = 0;
  Csr edges;        // symmetric, no self loops
  Matrix features;  // num_nodes x m1
  Matrix labels;    // num_nodes x num_classes, entries in {0,1}
  std::vector<Role> roles;
  Task task = Task::kSinglelabel;

  int feature_dim() const { return features.cols; }
  int num_classes() const { return labels.cols; }
  int degree(int v) const { return edges.row_degree(v); }

  std::vector<int> nodes_with_role(Role r) const;
};

// Subgraph induced on an ordered list of global node ids.
struct Subgraph {
  std::vector<int> nodes;  // global ids, defines the local index order
  Csr local_edges;         // induced edges over local indices, no self loops
  Csr norm_adj;            // D^{-1/2} (A + I) D^{-1/2}, subgraph-local degrees

  int size() const { return static_cast<int>(nodes.size()); }
};

// Reads a dataset directory: edges.txt, features.csv, labels.csv, roles.csv,
// meta.json. Directed input edges are symmetrized; raw self loops dropped.
Graph load_graph(const std::string& dir_path);

// Builds a Graph directly from parts (used by generators and tests).
Graph make_graph(int num_nodes, std::vector<std::pair<int, int>> edge_list,
                 Matrix features, Matrix labels, std::vector<Role> roles, Task task);

// Induces the subgraph on `nodes` and computes its normalized adjacency.
// Throws on duplicate ids, out-of-range ids or an empty list.
Subgraph induce_subgraph(const Graph& g, const std::vector<int>& nodes);

// Symmetric normalization with one self loop per node added on the fly:
// out_ij = (A + I)_ij / sqrt(d_i d_j) with d_i = 1 + degree_i.
Csr normalize_adjacency(const Csr& local_edges, int k);

// True iff one BFS component covers every node of the subgraph.
bool is_connected(const Subgraph& sg);

}  // namespace feras
