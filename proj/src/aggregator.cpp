#include "feras/aggregator.hpp"

#include <cstring>
#include <ostream>
#include <stdexcept>

namespace feras {

EmbeddingTable::EmbeddingTable(int num_nodes, int dim, int n_hosts, bool persistent)
    : num_nodes_(num_nodes), dim_(dim), n_hosts_(n_hosts), persistent_(persistent) {
  if (num_nodes < 1 || dim < 1 || n_hosts < 1)
    throw std::invalid_argument("EmbeddingTable: bad sizes");
  slots_.resize(static_cast<std::size_t>(num_nodes) * n_hosts);
}

void EmbeddingTable::begin_iteration(int epoch) {
  if (epoch < epoch_) throw std::invalid_argument("begin_iteration: epoch went backwards");
  epoch_ = epoch;
}

void EmbeddingTable::push(int host_id, const std::vector<int>& nodes,
                          const Matrix& embeddings, const std::vector<char>& visible,
                          int epoch) {
  if (epoch != epoch_) throw std::runtime_error("push: late push (epoch tag mismatch)");
  if (host_id < 0 || host_id >= n_hosts_) throw std::invalid_argument("push: bad host id");
  if (embeddings.rows != static_cast<int>(nodes.size()) ||
      visible.size() != nodes.size() || embeddings.cols != dim_)
    throw std::invalid_argument("push: shape mismatch");

  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!visible[i]) continue;
    const int v = nodes[i];
    if (v < 0 || v >= num_nodes_) throw std::invalid_argument("push: node out of range");
    Slot& s = slots_[static_cast<std::size_t>(v) * n_hosts_ + host_id];
    if (s.epoch != epoch) {
      s.epoch = epoch;
      s.count = 0;
      s.sum.assign(dim_, 0.0);
    }
    const double* row = embeddings.row_ptr(static_cast<int>(i));
    for (int c = 0; c < dim_; ++c) s.sum[c] += row[c];
    ++s.count;
  }
}

Matrix EmbeddingTable::pull(const std::vector<int>& nodes) const {
  Matrix out(static_cast<int>(nodes.size()), dim_);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const int v = nodes[i];
    if (v < 0 || v >= num_nodes_) throw std::invalid_argument("pull: node out of range");
    double* row = out.row_ptr(static_cast<int>(i));
    int cnt = 0;
    for (int h = 0; h < n_hosts_; ++h) {
      const Slot& s = slots_[static_cast<std::size_t>(v) * n_hosts_ + h];
      if (!readable(s)) continue;
      for (int c = 0; c < dim_; ++c) row[c] += s.sum[c];
      cnt += s.count;
    }
    if (cnt > 0) {
      const double inv = 1.0 / cnt;
      for (int c = 0; c < dim_; ++c) row[c] *= inv;
    }
  }
  return out;
}

int EmbeddingTable::count(int node) const {
  if (node < 0 || node >= num_nodes_) throw std::invalid_argument("count: node out of range");
  int cnt = 0;
  for (int h = 0; h < n_hosts_; ++h) {
    const Slot& s = slots_[static_cast<std::size_t>(node) * n_hosts_ + h];
    if (readable(s)) cnt += s.count;
  }
  return cnt;
}

void EmbeddingTable::dump_csv(std::ostream& os) const {
  for (int v = 0; v < num_nodes_; ++v) {
    const int cnt = count(v);
    if (cnt == 0) continue;
    os << v << ',' << cnt;
    const std::vector<int> one{v};
    const Matrix row = pull(one);
    for (int c = 0; c < dim_; ++c) os << ',' << row(0, c);
    os << '\n';
  }
}

std::vector<Matrix> build_theta(const std::vector<std::vector<int>>& all_sg_nodes,
                                const std::vector<HostView>& views) {
  if (all_sg_nodes.size() != views.size())
    throw std::invalid_argument("build_theta: host count mismatch");
  const int n_hosts = static_cast<int>(views.size());

  int total = 0;
  for (const auto& lst : all_sg_nodes) total += static_cast<int>(lst.size());

  // visible-occurrence count per node over the concatenated lists
  std::vector<int> vis_count;
  for (int h = 0; h < n_hosts; ++h)
    for (int v : all_sg_nodes[h]) {
      if (v >= static_cast<int>(vis_count.size())) vis_count.resize(v + 1, 0);
      if (views[h].sees(v)) ++vis_count[v];
    }

  std::vector<Matrix> thetas;
  thetas.reserve(n_hosts);
  for (int n = 0; n < n_hosts; ++n) {
    Matrix theta(static_cast<int>(all_sg_nodes[n].size()), total);
    for (int i = 0; i < theta.rows; ++i) {
      const int vi = all_sg_nodes[n][i];
      const int cnt = vi < static_cast<int>(vis_count.size()) ? vis_count[vi] : 0;
      if (cnt == 0) continue;
      const double w = 1.0 / cnt;
      int col = 0;
      for (int h = 0; h < n_hosts; ++h)
        for (int v : all_sg_nodes[h]) {
          if (v == vi && views[h].sees(v)) theta(i, col) = w;
          ++col;
        }
    }
    thetas.push_back(std::move(theta));
  }
  return thetas;
}

WeightBuffer::WeightBuffer(int n_hosts_, int q_) : n_hosts(n_hosts_), q(q_) {
  if (n_hosts < 1 || q < 1) throw std::invalid_argument("WeightBuffer: bad sizes");
}

void WeightBuffer::push(const ModelParams& p) {
  if (static_cast<int>(pushes.size()) >= n_hosts)
    throw std::runtime_error("WeightBuffer: too many pushes");
  pushes.push_back(p);
}

ModelParams WeightBuffer::average() {
  if (static_cast<int>(pushes.size()) != n_hosts)
    throw std::runtime_error("WeightBuffer: wrong push count");
  ModelParams m = average_params(pushes);
  pushes.clear();
  return m;
}

}  // namespace feras
