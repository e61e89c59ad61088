#include "feras/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"

namespace feras {

namespace {

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  return f;
}

std::vector<double> parse_csv_row(const std::string& line, const std::string& path,
                                  int lineno) {
  std::vector<double> out;
  const char* p = line.data();
  const char* end = p + line.size();
  while (p < end) {
    const char* comma = std::find(p, end, ',');
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(p, comma, v);
    if (ec != std::errc() || ptr != comma)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": non-numeric value");
    out.push_back(v);
    p = comma < end ? comma + 1 : end;
  }
  return out;
}

Matrix read_csv_matrix(const std::string& path, int expected_rows) {
  auto f = open_or_throw(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    rows.push_back(parse_csv_row(line, path, lineno));
    if (rows.size() > 1 && rows.back().size() != rows.front().size())
      throw std::runtime_error(path + ": ragged rows");
  }
  if (static_cast<int>(rows.size()) != expected_rows)
    throw std::runtime_error(path + ": expected " + std::to_string(expected_rows) +
                             " rows, found " + std::to_string(rows.size()));
  Matrix m(expected_rows, rows.empty() ? 0 : static_cast<int>(rows[0].size()));
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) m(i, j) = rows[i][j];
  return m;
}

}  // namespace

Csr csr_from_undirected_edges(int n, std::vector<std::pair<int, int>> edges) {
  for (auto& [u, v] : edges) {
    if (u < 0 || v < 0 || u >= n || v >= n)
      throw std::runtime_error("edge endpoint out of range");
    if (u > v) std::swap(u, v);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  // drop self loops; they are reintroduced by normalization only
  edges.erase(std::remove_if(edges.begin(), edges.end(),
                             [](const auto& e) { return e.first == e.second; }),
              edges.end());

  Csr csr(n, n);
  for (const auto& [u, v] : edges) {
    ++csr.indptr[u + 1];
    ++csr.indptr[v + 1];
  }
  for (int i = 0; i < n; ++i) csr.indptr[i + 1] += csr.indptr[i];
  csr.indices.resize(2 * edges.size());
  csr.values.assign(2 * edges.size(), 1.0);
  std::vector<int> cursor(csr.indptr.begin(), csr.indptr.end() - 1);
  for (const auto& [u, v] : edges) {
    csr.indices[cursor[u]++] = v;
    csr.indices[cursor[v]++] = u;
  }
  for (int i = 0; i < n; ++i)
    std::sort(csr.indices.begin() + csr.indptr[i], csr.indices.begin() + csr.indptr[i + 1]);
  return csr;
}

Csr csr_identity(int n) {
  Csr csr(n, n);
  csr.indices.resize(n);
  csr.values.assign(n, 1.0);
  for (int i = 0; i < n; ++i) {
    csr.indptr[i + 1] = i + 1;
    csr.indices[i] = i;
  }
  return csr;
}

std::vector<int> Graph::nodes_with_role(Role r) const {
  std::vector<int> out;
  for (int v = 0; v < num_nodes; ++v)
    if (roles[v] == r) out.push_back(v);
  return out;
}

Graph make_graph(int num_nodes, std::vector<std::pair<int, int>> edge_list,
                 Matrix features, Matrix labels, std::vector<Role> roles, Task task) {
  if (features.rows != num_nodes || labels.rows != num_nodes ||
      static_cast<int>(roles.size()) != num_nodes)
    throw std::runtime_error("make_graph: row counts disagree with num_nodes");
  Graph g;
  g.num_nodes = num_nodes;
  g.edges = csr_from_undirected_edges(num_nodes, std::move(edge_list));
  g.features = std::move(features);
  g.labels = std::move(labels);
  g.roles = std::move(roles);
  g.task = task;
  if (g.task == Task::kSinglelabel) {
    for (int v = 0; v < num_nodes; ++v) {
      int positives = 0;
      for (int c = 0; c < g.labels.cols; ++c)
        if (g.labels(v, c) != 0.0) ++positives;
      if (positives != 1)
        throw std::runtime_error("singlelabel node " + std::to_string(v) + " has " +
                                 std::to_string(positives) + " positive labels");
    }
  }
  return g;
}

Graph load_graph(const std::string& dir) {
  // roles first: their line count fixes num_nodes
  std::vector<Role> roles;
  {
    auto f = open_or_throw(dir + "/roles.csv");
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
      ++lineno;
      if (line.empty()) continue;
      if (line == "train")
        roles.push_back(Role::kTrain);
      else if (line == "val")
        roles.push_back(Role::kVal);
      else if (line == "test")
        roles.push_back(Role::kTest);
      else
        throw std::runtime_error(dir + "/roles.csv:" + std::to_string(lineno) +
                                 ": unknown role '" + line + "'");
    }
  }
  const int n = static_cast<int>(roles.size());
  if (n == 0) throw std::runtime_error(dir + "/roles.csv: no nodes");

  std::vector<std::pair<int, int>> edge_list;
  {
    auto f = open_or_throw(dir + "/edges.txt");
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
      ++lineno;
      if (line.empty()) continue;
      std::istringstream ss(line);
      long u = -1, v = -1;
      if (!(ss >> u >> v))
        throw std::runtime_error(dir + "/edges.txt:" + std::to_string(lineno) +
                                 ": expected 'u v'");
      if (u < 0 || v < 0 || u >= n || v >= n)
        throw std::runtime_error(dir + "/edges.txt:" + std::to_string(lineno) +
                                 ": node id out of range");
      edge_list.emplace_back(static_cast<int>(u), static_cast<int>(v));
    }
  }

  Matrix features = read_csv_matrix(dir + "/features.csv", n);
  Matrix labels = read_csv_matrix(dir + "/labels.csv", n);
  for (double v : labels.data)
    if (v != 0.0 && v != 1.0)
      throw std::runtime_error(dir + "/labels.csv: labels must be 0/1 flags");

  Task task;
  {
    auto f = open_or_throw(dir + "/meta.json");
    nlohmann::json meta = nlohmann::json::parse(f);
    const std::string t = meta.at("task").get<std::string>();
    if (t == "multilabel")
      task = Task::kMultilabel;
    else if (t == "singlelabel")
      task = Task::kSinglelabel;
    else
      throw std::runtime_error(dir + "/meta.json: unknown task '" + t + "'");
  }

  return make_graph(n, std::move(edge_list), std::move(features), std::move(labels),
                    std::move(roles), task);
}

Subgraph induce_subgraph(const Graph& g, const std::vector<int>& nodes) {
  if (nodes.empty()) throw std::invalid_argument("induce_subgraph: empty node list");
  const int k = static_cast<int>(nodes.size());
  std::unordered_map<int, int> local;
  local.reserve(nodes.size());
  for (int i = 0; i < k; ++i) {
    const int v = nodes[i];
    if (v < 0 || v >= g.num_nodes)
      throw std::invalid_argument("induce_subgraph: node id out of range");
    if (!local.emplace(v, i).second)
      throw std::invalid_argument("induce_subgraph: duplicate node id");
  }

  std::vector<std::pair<int, int>> kept;
  for (int i = 0; i < k; ++i) {
    const int v = nodes[i];
    for (int p = g.edges.indptr[v]; p < g.edges.indptr[v + 1]; ++p) {
      auto it = local.find(g.edges.indices[p]);
      if (it != local.end() && i < it->second) kept.emplace_back(i, it->second);
    }
  }

  Subgraph sg;
  sg.nodes = nodes;
  sg.local_edges = csr_from_undirected_edges(k, std::move(kept));
  sg.norm_adj = normalize_adjacency(sg.local_edges, k);
  return sg;
}

Csr normalize_adjacency(const Csr& local_edges, int k) {
  if (k < 1) throw std::invalid_argument("normalize_adjacency: k must be >= 1");
  // d_i = 1 + degree_i: the self loop gives isolated nodes d = 1
  std::vector<double> inv_sqrt_d(k);
  for (int i = 0; i < k; ++i)
    inv_sqrt_d[i] = 1.0 / std::sqrt(1.0 + local_edges.row_degree(i));

  Csr out(k, k);
  out.indices.reserve(local_edges.nnz() + k);
  out.values.reserve(local_edges.nnz() + k);
  for (int i = 0; i < k; ++i) {
    bool self_emitted = false;
    for (int p = local_edges.indptr[i]; p < local_edges.indptr[i + 1]; ++p) {
      const int j = local_edges.indices[p];
      if (!self_emitted && j > i) {
        out.indices.push_back(i);
        out.values.push_back(inv_sqrt_d[i] * inv_sqrt_d[i]);
        self_emitted = true;
      }
      out.indices.push_back(j);
      out.values.push_back(inv_sqrt_d[i] * inv_sqrt_d[j]);
    }
    if (!self_emitted) {
      out.indices.push_back(i);
      out.values.push_back(inv_sqrt_d[i] * inv_sqrt_d[i]);
    }
    out.indptr[i + 1] = static_cast<int>(out.indices.size());
  }
  return out;
}

bool is_connected(const Subgraph& sg) {
  const int k = sg.size();
  if (k == 0) return false;
  std::vector<char> seen(k, 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (int p = sg.local_edges.indptr[u]; p < sg.local_edges.indptr[u + 1]; ++p) {
      const int v = sg.local_edges.indices[p];
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        q.push(v);
      }
    }
  }
  return reached == k;
}

}  // namespace feras
