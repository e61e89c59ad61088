#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "feras/federation.hpp"
#include "feras/gcn.hpp"
#include "feras/matrix.hpp"

namespace feras {

// Aggregation-server embedding table. Stores one (sum, count) slot per
// (node, host) so pulls always sum in host order -- deterministic no matter
// how pushes interleave. Two lifetimes:
//   persistent=false : only pushes tagged with the current iteration are
//                      readable (parallel mode; old slots are dead weight
//                      until overwritten)
//   persistent=true  : the latest push per (node, host) stays readable
//                      across iterations (sequential simulation)
class EmbeddingTable {
 public:
  EmbeddingTable(int num_nodes, int dim, int n_hosts, bool persistent);

  void begin_iteration(int epoch);

  // Adds one occurrence per visible row; invisible rows are blank pushes and
  // leave the table untouched. Throws on an epoch tag that is not current.
  // Thread-safe across distinct hosts.
  void push(int host_id, const std::vector<int>& nodes, const Matrix& embeddings,
            const std::vector<char>& visible, int epoch);

  // Row v = sum/count over readable slots, zero vector when count = 0.
  Matrix pull(const std::vector<int>& nodes) const;

  // Number of readable pushed occurrences of a node.
  int count(int node) const;

  int dim() const { return dim_; }
  int epoch() const { return epoch_; }

  void dump_csv(std::ostream& os) const;  // node_id,count,<dim values>

 private:
  struct Slot {
    int epoch = -1;
    int count = 0;
    std::vector<double> sum;
  };

  bool readable(const Slot& s) const {
    return s.count > 0 && (persistent_ ? s.epoch >= 0 : s.epoch == epoch_);
  }

  int num_nodes_;
  int dim_;
  int n_hosts_;
  bool persistent_;
  int epoch_ = 0;
  std::vector<Slot> slots_;  // node-major: slots_[node * n_hosts_ + host]
};

// Explicit theta matrices, one per host: rows are host n's sampled nodes,
// columns the concatenation of every host's sampled-node list. Entry is
// 1/count(v) at each occurrence of v visible to its pusher, count(v) being
// the number of such occurrences; zero elsewhere. Test/theory oracle for the
// matrix-free table.
std::vector<Matrix> build_theta(const std::vector<std::vector<int>>& all_sg_nodes,
                                const std::vector<HostView>& views);

// q-periodic weight merge buffer.
struct WeightBuffer {
  int n_hosts = 1;
  int q = 1;
  int counter = 0;  // iterations since start
  std::vector<ModelParams> pushes;

  WeightBuffer() = default;
  WeightBuffer(int n_hosts_, int q_);

  void push(const ModelParams& p);
  bool tick() { return ++counter % q == 0; }  // true when a merge is due
  // Mean of exactly n_hosts pushes; clears the buffer. Throws otherwise.
  ModelParams average();
};

}  // namespace feras
